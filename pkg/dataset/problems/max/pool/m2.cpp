#include <iostream>
#include <climits>

int main() {
    int n;
    std::cin >> n;
    int best = INT_MIN;
    for (int i = 0; i < n; i++) {
        int value;
        std::cin >> value;
        best = std::max(best, value);
    }
    std::cout << best << "\n";
    return 0;
}

#include <iostream>

long long gcd(long long x, long long y) {
    if (y == 0) {
        return x;
    }
    return gcd(y, x % y);
}

int main() {
    long long x, y;
    std::cin >> x >> y;
    std::cout << gcd(x, y) << "\n";
    return 0;
}

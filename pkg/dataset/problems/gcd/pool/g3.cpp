#include <iostream>
#include <numeric>

int main() {
    long long p, q;
    std::cin >> p >> q;
    std::cout << std::gcd(p, q) << "\n";
    return 0;
}

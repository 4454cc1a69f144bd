#include <cstdio>

int main() {
    long long n, total = 0, k = 1;
    scanf("%lld", &n);
    while (k <= n) {
        total += k;
        k++;
    }
    printf("%lld\n", total);
    return 0;
}

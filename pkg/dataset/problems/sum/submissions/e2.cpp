#include <iostream>
using namespace std;

int main() {
    long long n;
    cin >> n;
    long long total = 0
    for (long long k = 1; k <= n; k++) {
        total += k;
    }
    cout << total << endl;
    return 0;
}

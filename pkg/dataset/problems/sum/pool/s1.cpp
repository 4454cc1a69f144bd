#include <iostream>
using namespace std;

int main() {
    long long n;
    cin >> n;
    long long sum = 0;
    for (long long t = 1; t <= n; t++) {
        sum += t;
    }
    cout << sum << endl;
    return 0;
}

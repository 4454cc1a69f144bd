#include <iostream>
using namespace std;

int main() {
    long long a, b;
    cin >> a >> b;
    while (b != 0) {
        long long t = b;
        b = a % b;
        a = t;
    }
    cout << a << endl;
    return 0;
}

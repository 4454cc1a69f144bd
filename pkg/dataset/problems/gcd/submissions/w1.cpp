#include <iostream>
using namespace std;

int main() {
    long long a, b;
    cin >> a >> b;
    if (a % b == 0) {
        cout << b << endl;
    } else {
        cout << 1 << endl;
    }
    return 0;
}

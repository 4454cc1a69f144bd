#include <iostream>
using namespace std;

int main() {
    int n;
    cin >> n;
    int maxv = 0;
    for (int i = 0; i < n; i++) {
        int x;
        cin >> x;
        if (x > maxv) {
            maxv = x;
        }
    }
    cout << maxv << endl;
    return 0;
}

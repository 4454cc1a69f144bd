#include <iostream>
using namespace std;

int main() {
    int n;
    cin >> n;
    int maxv;
    for (int i = 0; i < n; i++) {
        int x;
        cin >> x;
        if (i == 0 || x > maxv) {
            maxv = x;
        }
    }
    cout << maxv << endl;
    return 0;
}

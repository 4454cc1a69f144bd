#include <algorithm>
#include <iostream>
using namespace std;

int main() {
    int n;
    cin >> n;
    int a[10000];
    for (int i = 0; i < n; i++) {
        cin >> a[i];
    }
    sort(a, a + n);
    for (int i = 0; i < n; i++) {
        cout << a[i];
        if (i + 1 < n) {
            cout << " ";
        }
    }
    cout << endl;
    return 0;
}

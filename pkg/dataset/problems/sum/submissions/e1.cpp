#include <iostream>
using namespace std;

int main() {
    long long M;
    cin >> M;
    long long s = 0;
    for (long long i = 1; i < M; i++) {
        s += i;
    }
    cout << s << endl;
    return 0;
}

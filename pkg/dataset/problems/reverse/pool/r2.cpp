#include <iostream>
#include <string>
using namespace std;

int main() {
    string s;
    getline(cin, s);
    string t = "";
    for (int i = (int)s.size() - 1; i >= 0; i--) {
        t += s[i];
    }
    cout << t << endl;
    return 0;
}

#include <cstdio>

int main() {
    std::puts("ccfqh: placeholder");
    return 0;
}

#include <cstdio>
int main() { std::puts("qpf: not built yet"); return 2; }

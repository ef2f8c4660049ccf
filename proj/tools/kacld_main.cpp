#include <cstdio>
int main() { std::puts("kacld: cli under construction"); return 0; }

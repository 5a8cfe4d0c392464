#include <iostream>
int main() { std::cout << "sbm cli placeholder\n"; return 0; }

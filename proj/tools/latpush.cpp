#include <cstdio>

int main() {
  std::printf("latpush: placeholder\n");
  return 0;
}

// Acceptance run: one line per criterion, exit status 0 only if all pass.
// Usage: acceptance [suite] [seed]
#include <cstdio>
#include <algorithm>
#include <cstdlib>
#include <string>

#include "chollag/chollag.h"

int main(int argc, char** argv) {
  const char* suite = argc > 1 ? argv[1] : "all";
  const uint64_t seed = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 0;
  int threads = 1;
  if (const char* env = std::getenv("CHOL_LAG_THREADS")) threads = std::max(1, std::atoi(env));

  char* lines = nullptr;
  int all_passed = 0;
  if (chollag_validate(suite, seed, threads, nullptr, &lines, &all_passed) != CHOLLAG_OK) {
    std::fprintf(stderr, "acceptance: %s\n", chollag_last_error());
    return 2;
  }
  std::fputs(lines, stdout);
  chollag_string_free(lines);
  return all_passed ? 0 : 1;
}

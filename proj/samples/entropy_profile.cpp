// Entanglement entropy S(m, n) of the Prime state across all cuts, next to
// the odd-composite state, whose entropy stays near 2 bits.
//
//   entropy_profile [n]

#include <cstdlib>
#include <cstdio>

#include "ntqs/analysis.hpp"

int main(int argc, char** argv) {
  using namespace ntqs;
  const unsigned n = argc > 1 ? static_cast<unsigned>(std::atoi(argv[1])) : 16;
  const auto prime = build_prime_state(n);
  const auto composite = build_odd_composite_state(n);
  std::printf("%3s %12s %12s\n", "m", "prime", "composite");
  for (unsigned m = 1; m < n; ++m)
    std::printf("%3u %12.6f %12.6f\n", m, bipartition_entropy<double>(prime, m),
                bipartition_entropy<double>(composite, m));
}

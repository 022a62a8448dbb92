// Exact top of the Prime-state entanglement spectrum against the analytic
// model with eigenvalues labelled by odd square-free k.
//
//   model_spectrum [n]

#include <algorithm>
#include <cstdio>
#include <cmath>
#include <cstdlib>

#include "ntqs/analysis.hpp"

int main(int argc, char** argv) {
  using namespace ntqs;
  const unsigned n = argc > 1 ? static_cast<unsigned>(std::atoi(argv[1])) : 20;
  const unsigned m = n / 2;
  auto exact = symmetric_eigen(reduced_density<double>(build_prime_state(n), m).entries).eigenvalues;
  std::sort(exact.rbegin(), exact.rend());

  const auto opt = ModelOptions<double>::asymptotic(appendix_constants<double>(1'000'000));
  const auto model = analytic_spectrum<double>(n, m, opt);
  std::printf("%4s %4s %5s %14s %14s\n", "k", "phi", "mult", "model -ln l", "exact -ln l");
  auto entries = model.entries;
  std::stable_sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) { return a.lambda > b.lambda; });
  std::size_t at = 0;
  for (const auto& e : entries) {
    if (at >= 72 || at >= exact.size()) break;
    std::printf("%4llu %4llu %5llu %14.6f %14.6f\n", static_cast<unsigned long long>(e.k),
                static_cast<unsigned long long>(e.phi), static_cast<unsigned long long>(e.multiplicity),
                -std::log(e.lambda), -std::log(exact[at]));
    at += e.multiplicity;
  }
  std::printf("model entropy %.6f bits, exact %.6f bits\n", model_entropy(model),
              bipartition_entropy<double>(build_prime_state(n), m));
}

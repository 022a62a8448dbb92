// Read modular prime counts off the QFT peaks of the Prime state.
//
//   prime_peaks [n]

#include <cstdlib>
#include <iostream>

#include "ntqs/spectral.hpp"

int main(int argc, char** argv) {
  using namespace ntqs;
  const unsigned n = argc > 1 ? static_cast<unsigned>(std::atoi(argv[1])) : 16;
  const auto table = sieve_primes(register_size(2, n));
  const auto r = closed_form_peaks<quad>(n, table);

  std::cout << "n = " << n << ", pi(N) = " << r.pi << '\n';
  std::cout << "P(N/3) = " << to_decimal(r.PN3.direct) << '\n';
  std::cout << "P(N/4) = " << to_decimal(r.PN4.direct) << '\n';
  std::cout << "P(N/6) = " << to_decimal(r.PN6.direct) << '\n';

  const auto [u, v] = extract_biases(r.PN3.direct, r.PN6.direct, r.pi, r.N);
  std::cout << "pi_{6,1} = " << u << " (sieve " << r.pi61 << "), pi_{6,5} = " << v << " (sieve " << r.pi65 << ")\n";
  std::cout << "|Delta| = " << chebyshev_from_peak(r.PN4.direct, r.pi, r.N) << " (sieve " << r.delta << ")\n";
}

#pragma once

#include <cstdint>

#include "bandlab/rng.hpp"
#include "bandlab/types.hpp"

namespace testing {

using namespace bandlab;

// GUE-like matrix with entries of variance 1/N.
inline ComplexMatrix randomHermitian(Index N, std::uint64_t seed) {
  StreamRng rng(seed);
  ComplexMatrix H(N, N);
  const double sd = 1.0 / std::sqrt(2.0 * N);
  for (Index a = 0; a < N; ++a) {
    H(a, a) = rng.normal() * std::sqrt(2.0) * sd;
    for (Index b = a + 1; b < N; ++b) {
      H(a, b) = Complex(rng.normal(), rng.normal()) * sd;
      H(b, a) = std::conj(H(a, b));
    }
  }
  return H;
}

inline ComplexMatrix directResolvent(const ComplexMatrix& H, Complex z) {
  const Index N = H.rows();
  return (H - z * ComplexMatrix::Identity(N, N)).fullPivLu().inverse();
}

}  // namespace testing

#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "blab/fock.hpp"
#include "blab/operators.hpp"
#include "blab/state.hpp"
#include "blab/tensor.hpp"

namespace blab {

// Seeded source for every stochastic choice (random states, operators and
// weights in the suites).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  double uniform(double lo = 0.0, double hi = 1.0) { return std::uniform_real_distribution<double>(lo, hi)(eng_); }
  double gauss() { return std::normal_distribution<double>(0.0, 1.0)(eng_); }
  cplx complex_gauss() {
    const double re = gauss();
    const double im = gauss();
    return {re, im};
  }

  std::vector<cplx> complex_vector(std::size_t n) {
    std::vector<cplx> v(n);
    for (auto& x : v) x = complex_gauss();
    return v;
  }

  SiteFunction condensate(const Lattice& lat) { return site_normalized(lat, complex_vector(lat.sites())); }

  OneBodyOperator op(int m) { return OneBodyOperator(m, complex_vector(static_cast<std::size_t>(m) * m)); }

  OneBodyOperator hermitian(int m) {
    OneBodyOperator a = op(m);
    OneBodyOperator h = 0.5 * (a + a.adjoint());
    for (int r = 0; r < m; ++r)
      for (int s = 0; s < r; ++s) h(r, s) = std::conj(h(s, r));
    for (int r = 0; r < m; ++r) h(r, r) = h(r, r).real();
    h.set_hermitian(true);
    return h;
  }

  TwoBodyKernel kernel(int m) {
    TwoBodyKernel k(m);
    for (std::size_t i = 0; i < k.pair_dim(); ++i)
      for (std::size_t j = 0; j < k.pair_dim(); ++j) k(i, j) = complex_gauss();
    return k;
  }

  TensorState tensor(const TensorSpace& sp) { return normalized(TensorState(sp.shape(), complex_vector(sp.dim()))); }
  TensorState symmetric_tensor(const TensorSpace& sp) { return normalized(sp.symmetrize(tensor(sp))); }
  FockState fock(const FockSpace& sp) { return normalized(FockState(sp.shape(), complex_vector(sp.dim()))); }

  std::mt19937_64& engine() { return eng_; }

 private:
  std::mt19937_64 eng_;
};

}  // namespace blab

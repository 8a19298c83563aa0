#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "blab/errors.hpp"
#include "blab/lattice.hpp"
#include "blab/operators.hpp"
#include "blab/state.hpp"

namespace blab {

// Dense (C^M)^{(x)N} amplitudes in row-major order: slot 0 is the most
// significant digit of the flat index.
class TensorSpace {
 public:
  using state_type = TensorState;
  static constexpr std::size_t max_dim = std::size_t{1} << 25;

  TensorSpace() = default;
  TensorSpace(Lattice lat, int particles) : lattice_(lat), n_(particles), m_(lat.sites()) {
    if (particles < 0) throw ShapeError("negative particle number");
    stride_.assign(n_, 1);
    std::size_t d = 1;
    for (int j = n_ - 1; j >= 0; --j) {
      stride_[j] = d;
      if (d > max_dim / static_cast<std::size_t>(m_))
        throw RangeError("tensor dimension M^N exceeds " + std::to_string(max_dim));
      d *= static_cast<std::size_t>(m_);
    }
    dim_ = d;
  }

  const Lattice& lattice() const { return lattice_; }
  int particles() const { return n_; }
  int sites() const { return m_; }
  std::size_t dim() const { return dim_; }
  StateShape shape() const { return StateShape{lattice_, n_}; }
  std::size_t stride(int slot) const { return stride_[slot]; }

  TensorState zero() const { return TensorState(shape(), dim_); }

  int digit(std::size_t idx, int slot) const {
    return static_cast<int>((idx / stride_[slot]) % static_cast<std::size_t>(m_));
  }

  std::vector<int> tuple(std::size_t idx) const {
    std::vector<int> x(n_);
    for (int j = 0; j < n_; ++j) x[j] = digit(idx, j);
    return x;
  }

  std::size_t index(const std::vector<int>& x) const {
    std::size_t idx = 0;
    for (int j = 0; j < n_; ++j) idx += static_cast<std::size_t>(x[j]) * stride_[j];
    return idx;
  }

  // Grid delta at the tuple x, normalised in the weighted norm.
  TensorState delta(const std::vector<int>& x) const {
    TensorState s = zero();
    s[index(x)] = 1.0 / std::sqrt(shape().weight());
    return s;
  }

  // f_1 (x) ... (x) f_N.
  TensorState product(const std::vector<SiteFunction>& fs) const {
    if (static_cast<int>(fs.size()) != n_) throw ShapeError("product needs one factor per particle");
    TensorState s = zero();
    for (std::size_t idx = 0; idx < dim_; ++idx) {
      cplx a{1.0, 0.0};
      for (int j = 0; j < n_; ++j) a *= fs[j][digit(idx, j)];
      s[idx] = a;
    }
    return s;
  }

  TensorState product(const SiteFunction& f) const { return product(std::vector<SiteFunction>(n_, f)); }

  TensorState apply_factor(const OneBodyOperator& x, int slot, const TensorState& psi) const {
    check(psi);
    if (slot < 0 || slot >= n_) throw RangeError("slot " + std::to_string(slot) + " out of range");
    if (x.sites() != m_) throw ShapeError("one-body operator size mismatch");
    TensorState out = zero();
    const std::size_t st = stride_[slot];
    const std::size_t block = st * m_;
    std::vector<cplx> col(m_);
    for (std::size_t hi = 0; hi < dim_; hi += block)
      for (std::size_t lo = 0; lo < st; ++lo) {
        const std::size_t base = hi + lo;
        for (int s = 0; s < m_; ++s) col[s] = psi[base + s * st];
        for (int r = 0; r < m_; ++r) {
          cplx acc{0.0, 0.0};
          for (int s = 0; s < m_; ++s) acc += x(r, s) * col[s];
          out[base + r * st] = acc;
        }
      }
    return out;
  }

  // Kernel on the ordered slot pair (i, j): row index r_i * M + r_j.
  TensorState apply_two_slot(const TwoBodyKernel& k, int i, int j, const TensorState& psi) const {
    check(psi);
    if (i < 0 || i >= n_ || j < 0 || j >= n_ || i == j) throw RangeError("invalid slot pair");
    if (k.sites() != m_) throw ShapeError("two-body kernel size mismatch");
    TensorState out = zero();
    const std::size_t si = stride_[i], sj = stride_[j];
    const std::size_t pd = k.pair_dim();
    std::vector<cplx> in(pd);
    for (std::size_t base = 0; base < dim_; ++base) {
      if (digit(base, i) != 0 || digit(base, j) != 0) continue;
      for (int r = 0; r < m_; ++r)
        for (int s = 0; s < m_; ++s) in[r * m_ + s] = psi[base + r * si + s * sj];
      for (int r = 0; r < m_; ++r)
        for (int s = 0; s < m_; ++s) {
          const cplx* row = &k(static_cast<std::size_t>(r * m_ + s), 0);
          cplx acc{0.0, 0.0};
          for (std::size_t c = 0; c < pd; ++c) acc += row[c] * in[c];
          out[base + r * si + s * sj] = acc;
        }
    }
    return out;
  }

  TensorState one_body_sum(const OneBodyOperator& x, const TensorState& psi) const {
    TensorState out = zero();
    for (int j = 0; j < n_; ++j) out += apply_factor(x, j, psi);
    return out;
  }

  // sum_{i<j} K_ij
  TensorState pair_sum(const TwoBodyKernel& k, const TensorState& psi) const {
    TensorState out = zero();
    for (int i = 0; i < n_; ++i)
      for (int j = i + 1; j < n_; ++j) out += apply_two_slot(k, i, j, psi);
    return out;
  }

  // sum_{i != j} X_i Y_j
  TensorState pair_apply(const OneBodyOperator& x, const OneBodyOperator& y, const TensorState& psi) const {
    TensorState out = zero();
    for (int j = 0; j < n_; ++j) {
      const TensorState yj = apply_factor(y, j, psi);
      for (int i = 0; i < n_; ++i)
        if (i != j) out += apply_factor(x, i, yj);
    }
    return out;
  }

  // Pointwise sum_{i<j} w(x_i - x_j).
  TensorState pair_diagonal(const PairTable& w, const TensorState& psi) const {
    check(psi);
    TensorState out = zero();
    std::vector<int> x(n_);
    for (std::size_t idx = 0; idx < dim_; ++idx) {
      for (int j = 0; j < n_; ++j) x[j] = digit(idx, j);
      double acc = 0.0;
      for (int i = 0; i < n_; ++i)
        for (int j = i + 1; j < n_; ++j) acc += w(x[i], x[j]);
      out[idx] = acc * psi[idx];
    }
    return out;
  }

  // pattern[j] in {'p', 'q', 'i'} selects p^phi, q^phi or the identity on slot j.
  TensorState projector_chain(const std::string& pattern, const SiteFunction& phi, const TensorState& psi) const {
    if (static_cast<int>(pattern.size()) != n_) throw ShapeError("projector pattern length must equal N");
    const OneBodyOperator p = OneBodyOperator::projector(lattice_, phi);
    const OneBodyOperator q = OneBodyOperator::complement(lattice_, phi);
    TensorState out = psi;
    for (int j = 0; j < n_; ++j) {
      switch (pattern[j]) {
        case 'p':
          out = apply_factor(p, j, out);
          break;
        case 'q':
          out = apply_factor(q, j, out);
          break;
        case 'i':
          break;
        default:
          throw ShapeError(std::string("unknown projector symbol '") + pattern[j] + "'");
      }
    }
    return out;
  }

  // Index of the tuple with slots sorted in ascending order.
  std::size_t canonical(std::size_t idx) const {
    std::vector<int> x = tuple(idx);
    std::sort(x.begin(), x.end());
    return index(x);
  }

  // Average over all coordinate permutations. Each orbit is summed once and
  // its mean written back to every member.
  TensorState symmetrize(const TensorState& psi) const {
    check(psi);
    std::vector<cplx> sum(dim_, cplx{0.0, 0.0});
    std::vector<std::uint32_t> count(dim_, 0);
    std::vector<std::size_t> canon(dim_);
    for (std::size_t idx = 0; idx < dim_; ++idx) {
      canon[idx] = canonical(idx);
      sum[canon[idx]] += psi[idx];
      ++count[canon[idx]];
    }
    TensorState out = zero();
    for (std::size_t idx = 0; idx < dim_; ++idx) out[idx] = sum[canon[idx]] / static_cast<double>(count[canon[idx]]);
    return out;
  }

  // Index after exchanging slots i and j.
  std::size_t swap_index(std::size_t idx, int i, int j) const {
    const int a = digit(idx, i), b = digit(idx, j);
    return idx + (static_cast<std::size_t>(b) - a) * stride_[i] + (static_cast<std::size_t>(a) - b) * stride_[j];
  }

  // max over adjacent transpositions T of ||psi - T psi|| / ||psi||.
  double transposition_residual(const TensorState& psi) const {
    check(psi);
    double nrm = 0.0;
    for (const auto& a : psi.amplitudes()) nrm += std::norm(a);
    if (nrm == 0.0) return 0.0;
    double worst = 0.0;
    for (int j = 0; j + 1 < n_; ++j) {
      double acc = 0.0;
      for (std::size_t idx = 0; idx < dim_; ++idx) acc += std::norm(psi[idx] - psi[swap_index(idx, j, j + 1)]);
      worst = std::max(worst, std::sqrt(acc / nrm));
    }
    return worst;
  }

  bool is_symmetric(const TensorState& psi, double tol = 1e-12) const { return transposition_residual(psi) <= tol; }

  void check(const TensorState& psi) const {
    if (psi.size() != dim_ || !(psi.shape() == shape())) throw ShapeError("tensor state does not belong to this space");
  }

 private:
  Lattice lattice_;
  int n_ = 0;
  int m_ = 0;
  std::size_t dim_ = 1;
  std::vector<std::size_t> stride_;
};

}  // namespace blab

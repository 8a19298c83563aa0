#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "blab/errors.hpp"
#include "blab/lattice.hpp"
#include "blab/operators.hpp"
#include "blab/state.hpp"
#include "blab/tensor.hpp"

namespace blab {

// Number of occupation vectors of N bosons on M sites, C(N+M-1, N), or
// `ceiling + 1` once that is exceeded.
inline std::size_t basis_size(int sites, int particles, std::size_t ceiling = SIZE_MAX - 1) {
  if (sites == 0) return particles == 0 ? 1 : 0;
  // C(N+M-1, M-1) by the multiplicative formula; every prefix is itself a
  // binomial coefficient, so the division is exact.
  const std::size_t k = static_cast<std::size_t>(sites - 1);
  unsigned __int128 c = 1;
  for (std::size_t i = 1; i <= k; ++i) {
    c = c * (static_cast<std::size_t>(particles) + i) / i;
    if (c > ceiling) return ceiling + 1;
  }
  return static_cast<std::size_t>(c);
}

// Occupation vectors (n_1 .. n_M), sum N, in descending lexicographic
// order: (N,0,..,0) first, (0,..,0,N) last.
class OccupationBasis {
 public:
  static constexpr std::size_t default_ceiling = 5'000'000;

  OccupationBasis() = default;
  OccupationBasis(int sites, int particles, std::size_t ceiling = default_ceiling) : m_(sites), n_(particles) {
    if (sites < 1) throw ShapeError("occupation basis needs at least one site");
    if (particles < 0) throw ShapeError("negative particle number");
    const std::size_t size = basis_size(sites, particles, ceiling);
    if (size > ceiling)
      throw RangeError("occupation basis for N=" + std::to_string(particles) + ", M=" + std::to_string(sites) +
                       " exceeds the ceiling of " + std::to_string(ceiling) + " states");
    compositions_.assign(static_cast<std::size_t>(n_ + 1) * (m_ + 1), 0);
    for (int n = 0; n <= n_; ++n)
      for (int k = 0; k <= m_; ++k) compositions_[n * (m_ + 1) + k] = basis_size(k, n);
    occ_.reserve(size * m_);
    std::vector<int> cur(m_, 0);
    fill(cur, 0, n_);
  }

  int sites() const { return m_; }
  int particles() const { return n_; }
  std::size_t size() const { return m_ == 0 ? 0 : occ_.size() / m_; }

  const int* occupation(std::size_t idx) const { return &occ_[idx * m_]; }
  int occupation(std::size_t idx, int site) const { return occ_[idx * m_ + site]; }
  std::vector<int> vector(std::size_t idx) const { return {occupation(idx), occupation(idx) + m_}; }

  // Position of an occupation vector in the ordering.
  std::size_t rank(const int* n) const {
    std::size_t r = 0;
    int remaining = n_;
    for (int s = 0; s + 1 < m_; ++s) {
      for (int v = n[s] + 1; v <= remaining; ++v) r += compositions_[(remaining - v) * (m_ + 1) + (m_ - s - 1)];
      remaining -= n[s];
    }
    return r;
  }
  std::size_t rank(const std::vector<int>& n) const {
    if (static_cast<int>(n.size()) != m_) throw ShapeError("occupation vector length mismatch");
    int total = 0;
    for (int v : n) {
      if (v < 0) throw ShapeError("negative occupation");
      total += v;
    }
    if (total != n_) throw ShapeError("occupation vector has the wrong particle number");
    return rank(n.data());
  }

 private:
  void fill(std::vector<int>& cur, int site, int remaining) {
    if (site == m_ - 1) {
      cur[site] = remaining;
      occ_.insert(occ_.end(), cur.begin(), cur.end());
      return;
    }
    for (int v = remaining; v >= 0; --v) {
      cur[site] = v;
      fill(cur, site + 1, remaining - v);
    }
  }

  int m_ = 0;
  int n_ = 0;
  std::vector<int> occ_;
  std::vector<std::size_t> compositions_;
};

inline OccupationBasis enumerate_basis(int sites, int particles,
                                       std::size_t ceiling = OccupationBasis::default_ceiling) {
  return OccupationBasis(sites, particles, ceiling);
}

// N! / prod_r n_r!
inline double multinomial(const int* n, int sites) {
  double out = 1.0;
  int total = 0;
  for (int r = 0; r < sites; ++r)
    for (int k = 1; k <= n[r]; ++k) {
      ++total;
      out *= static_cast<double>(total) / k;
    }
  return out;
}

// Symmetric N-boson sector in the site-occupation basis. Amplitudes are
// Psi_n = sqrt(N!/prod n_r!) psi(x_n) for any tuple x_n with occupations n,
// so norms and inner products carry the same h^{dN} weight as tensor states.
class FockSpace {
 public:
  using state_type = FockState;

  FockSpace() = default;
  FockSpace(Lattice lat, int particles, std::size_t ceiling = OccupationBasis::default_ceiling)
      : lattice_(lat), n_(particles), m_(lat.sites()) {
    basis_.push_back(OccupationBasis(m_, n_, ceiling));
    if (n_ >= 1) basis_.push_back(OccupationBasis(m_, n_ - 1, ceiling));
    if (n_ >= 2) basis_.push_back(OccupationBasis(m_, n_ - 2, ceiling));
    for (std::size_t level = 0; level + 1 < basis_.size(); ++level) ladders_.push_back(build_ladder(level));
  }

  const Lattice& lattice() const { return lattice_; }
  int particles() const { return n_; }
  int sites() const { return m_; }
  std::size_t dim() const { return basis_[0].size(); }
  StateShape shape() const { return StateShape{lattice_, n_}; }
  const OccupationBasis& basis() const { return basis_[0]; }

  FockState zero() const { return FockState(shape(), dim()); }

  FockState basis_state(const std::vector<int>& occupation) const {
    FockState s = zero();
    s[basis_[0].rank(occupation)] = 1.0 / std::sqrt(shape().weight());
    return s;
  }

  // f^{(x)N} in occupation amplitudes.
  FockState product(const SiteFunction& f) const {
    FockState s = zero();
    for (std::size_t i = 0; i < dim(); ++i) {
      const int* n = basis_[0].occupation(i);
      cplx a{1.0, 0.0};
      for (int r = 0; r < m_; ++r)
        for (int k = 0; k < n[r]; ++k) a *= f[r];
      s[i] = std::sqrt(multinomial(n, m_)) * a;
    }
    return s;
  }

  // dGamma(X) = sum_{r,s} X_rs a_r^+ a_s.
  FockState one_body_sum(const OneBodyOperator& x, const FockState& psi) const {
    check(psi);
    if (x.sites() != m_) throw ShapeError("one-body operator size mismatch");
    if (n_ == 0) return zero();
    const std::vector<cplx> phi1 = lower(0, psi.raw(), 1);
    const std::size_t d1 = basis_[1].size();
    std::vector<cplx> y1(d1 * m_, cplx{0.0, 0.0});
    for (std::size_t c = 0; c < d1; ++c)
      for (int r = 0; r < m_; ++r) {
        cplx acc{0.0, 0.0};
        for (int s = 0; s < m_; ++s) acc += x(r, s) * phi1[c * m_ + s];
        y1[c * m_ + r] = acc;
      }
    FockState out = zero();
    out.raw() = raise(0, y1, 1);
    return out;
  }

  // sum_{i<j} K_ij for a swap-symmetric kernel, realised as
  // (1/2) sum K_(rs),(r's') a_r^+ a_s^+ a_s' a_r'.
  FockState pair_sum(const TwoBodyKernel& k, const FockState& psi) const {
    check(psi);
    if (k.sites() != m_) throw ShapeError("two-body kernel size mismatch");
    if (n_ < 2) return zero();
    const std::size_t pd = k.pair_dim();
    const std::vector<cplx> phi1 = lower(0, psi.raw(), 1);
    const std::vector<cplx> phi2 = lower(1, phi1, m_);  // index (c2 * M + s') * M + r'
    const std::size_t d2 = basis_[2].size();
    std::vector<cplx> in(pd), y2(d2 * pd);
    for (std::size_t c = 0; c < d2; ++c) {
      for (int rp = 0; rp < m_; ++rp)
        for (int sp = 0; sp < m_; ++sp) in[rp * m_ + sp] = phi2[(c * m_ + sp) * m_ + rp];
      for (std::size_t row = 0; row < pd; ++row) {
        const cplx* kr = &k(row, 0);
        cplx acc{0.0, 0.0};
        for (std::size_t col = 0; col < pd; ++col) acc += kr[col] * in[col];
        // stored as (c2 * M + s) * M + r for raising a_s^+ first
        const int r = static_cast<int>(row) / m_, s = static_cast<int>(row) % m_;
        y2[(c * m_ + s) * m_ + r] = 0.5 * acc;
      }
    }
    const std::vector<cplx> y1 = raise(1, y2, m_);
    FockState out = zero();
    out.raw() = raise(0, y1, 1);
    return out;
  }

  // sum_{i != j} X_i Y_j = dGamma(X) dGamma(Y) - dGamma(XY).
  FockState pair_apply(const OneBodyOperator& x, const OneBodyOperator& y, const FockState& psi) const {
    if (n_ < 2) {
      check(psi);
      return zero();
    }
    FockState out = one_body_sum(x, one_body_sum(y, psi));
    out -= one_body_sum(x * y, psi);
    return out;
  }

  // sum_{i<j} w(x_i - x_j) = (1/2) sum_{r,s} W_rs n_r (n_s - delta_rs).
  FockState pair_diagonal(const PairTable& w, const FockState& psi) const {
    check(psi);
    FockState out = zero();
    for (std::size_t i = 0; i < dim(); ++i) {
      const int* n = basis_[0].occupation(i);
      double acc = 0.0;
      for (int r = 0; r < m_; ++r) {
        if (n[r] == 0) continue;
        for (int s = 0; s < m_; ++s) acc += w(r, s) * n[r] * (n[s] - (r == s ? 1 : 0));
      }
      out[i] = 0.5 * acc * psi[i];
    }
    return out;
  }

  // Occupation vector of a tensor index.
  std::vector<int> occupation_of(const TensorSpace& ts, std::size_t idx) const {
    std::vector<int> n(m_, 0);
    for (int j = 0; j < n_; ++j) ++n[ts.digit(idx, j)];
    return n;
  }

  TensorState embed(const FockState& psi) const {
    check(psi);
    const TensorSpace ts(lattice_, n_);
    TensorState out = ts.zero();
    std::vector<int> n(m_);
    for (std::size_t idx = 0; idx < ts.dim(); ++idx) {
      std::fill(n.begin(), n.end(), 0);
      for (int j = 0; j < n_; ++j) ++n[ts.digit(idx, j)];
      out[idx] = psi[basis_[0].rank(n.data())] / std::sqrt(multinomial(n.data(), m_));
    }
    return out;
  }

  FockState extract(const TensorState& psi, double tol = 1e-10) const {
    const TensorSpace ts(lattice_, n_);
    ts.check(psi);
    const double res = ts.transposition_residual(psi);
    if (res > tol)
      throw ShapeError("extract requires a symmetric tensor state (transposition residual " + std::to_string(res) + ")");
    FockState out = zero();
    std::vector<int> x(n_);
    for (std::size_t i = 0; i < dim(); ++i) {
      const int* n = basis_[0].occupation(i);
      int pos = 0;
      for (int r = 0; r < m_; ++r)
        for (int k = 0; k < n[r]; ++k) x[pos++] = r;
      out[i] = std::sqrt(multinomial(n, m_)) * psi[ts.index(x)];
    }
    return out;
  }

  void check(const FockState& psi) const {
    if (psi.size() != dim() || !(psi.shape() == shape())) throw ShapeError("occupation state does not belong to this space");
  }

 private:
  struct Move {
    int site;
    std::uint32_t target;
    double factor;
  };
  // Per state of level `level`, every nonzero a_s with its image in level+1.
  struct Ladder {
    std::vector<std::size_t> offset;
    std::vector<Move> moves;
  };

  Ladder build_ladder(std::size_t level) const {
    const OccupationBasis& from = basis_[level];
    const OccupationBasis& to = basis_[level + 1];
    Ladder l;
    l.offset.reserve(from.size() + 1);
    std::vector<int> n(m_);
    for (std::size_t i = 0; i < from.size(); ++i) {
      l.offset.push_back(l.moves.size());
      const int* occ = from.occupation(i);
      for (int s = 0; s < m_; ++s) {
        if (occ[s] == 0) continue;
        std::copy(occ, occ + m_, n.begin());
        --n[s];
        l.moves.push_back({s, static_cast<std::uint32_t>(to.rank(n.data())), std::sqrt(static_cast<double>(occ[s]))});
      }
    }
    l.offset.push_back(l.moves.size());
    return l;
  }

  // in: (state of `level`, inner) with `inner` trailing components;
  // out: (state of level+1, s, inner) with out = <c| a_s |in>.
  std::vector<cplx> lower(std::size_t level, const std::vector<cplx>& in, int inner) const {
    const Ladder& l = ladders_[level];
    const std::size_t dto = basis_[level + 1].size();
    const std::size_t dfrom = basis_[level].size();
    std::vector<cplx> out(dto * m_ * inner, cplx{0.0, 0.0});
    for (std::size_t i = 0; i < dfrom; ++i)
      for (std::size_t k = l.offset[i]; k < l.offset[i + 1]; ++k) {
        const Move& mv = l.moves[k];
        const cplx* src = &in[i * inner];
        cplx* dst = &out[(static_cast<std::size_t>(mv.target) * m_ + mv.site) * inner];
        for (int u = 0; u < inner; ++u) dst[u] += mv.factor * src[u];
      }
    return out;
  }

  // Adjoint of lower: in indexed (state of level+1, r, inner), out (state of level, inner).
  std::vector<cplx> raise(std::size_t level, const std::vector<cplx>& in, int inner) const {
    const Ladder& l = ladders_[level];
    const std::size_t dfrom = basis_[level].size();
    std::vector<cplx> out(dfrom * inner, cplx{0.0, 0.0});
    for (std::size_t i = 0; i < dfrom; ++i)
      for (std::size_t k = l.offset[i]; k < l.offset[i + 1]; ++k) {
        const Move& mv = l.moves[k];
        const cplx* src = &in[(static_cast<std::size_t>(mv.target) * m_ + mv.site) * inner];
        cplx* dst = &out[i * inner];
        for (int u = 0; u < inner; ++u) dst[u] += mv.factor * src[u];
      }
    return out;
  }

  Lattice lattice_;
  int n_ = 0;
  int m_ = 0;
  std::vector<OccupationBasis> basis_;
  std::vector<Ladder> ladders_;
};

}  // namespace blab

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "blab/errors.hpp"
#include "blab/lattice.hpp"
#include "blab/state.hpp"

namespace blab {

// Dense M x M coefficient table acting on site functions, (X f)(r) = sum_s X_rs f(s).
class OneBodyOperator {
 public:
  OneBodyOperator() = default;
  explicit OneBodyOperator(int sites) : m_(sites), a_(static_cast<std::size_t>(sites) * sites) {}
  OneBodyOperator(int sites, std::vector<cplx> coeffs, bool hermitian = false)
      : m_(sites), a_(std::move(coeffs)), hermitian_(hermitian) {
    if (a_.size() != static_cast<std::size_t>(m_) * m_) throw ShapeError("one-body table size mismatch");
    if (hermitian_ && hermitian_defect() > 1e-14 * std::max(1.0, max_abs()))
      throw ConsistencyError("one-body table flagged hermitian is not self-adjoint");
  }

  static OneBodyOperator identity(int sites) {
    OneBodyOperator op(sites);
    for (int r = 0; r < sites; ++r) op(r, r) = 1.0;
    op.hermitian_ = true;
    return op;
  }

  static OneBodyOperator diagonal(const std::vector<double>& d) {
    OneBodyOperator op(static_cast<int>(d.size()));
    for (std::size_t r = 0; r < d.size(); ++r) op(static_cast<int>(r), static_cast<int>(r)) = d[r];
    op.hermitian_ = true;
    return op;
  }

  // |f><g| in the h^d-weighted inner product: (f g^* h^d)_rs.
  static OneBodyOperator outer(const Lattice& lat, const SiteFunction& f, const SiteFunction& g) {
    const int m = static_cast<int>(f.size());
    OneBodyOperator op(m);
    const double w = lat.cell_volume();
    for (int r = 0; r < m; ++r)
      for (int s = 0; s < m; ++s) op(r, s) = w * f[r] * std::conj(g[s]);
    return op;
  }

  // p = |phi><phi| for a normalised phi.
  static OneBodyOperator projector(const Lattice& lat, const SiteFunction& phi) {
    require_normalized(lat, phi);
    OneBodyOperator p = outer(lat, phi, phi);
    p.hermitian_ = true;
    return p;
  }

  // q = 1 - |phi><phi|.
  static OneBodyOperator complement(const Lattice& lat, const SiteFunction& phi) {
    OneBodyOperator q = identity(static_cast<int>(phi.size()));
    q -= projector(lat, phi);
    q.hermitian_ = true;
    return q;
  }

  int sites() const { return m_; }
  bool hermitian() const { return hermitian_; }
  void set_hermitian(bool h) { hermitian_ = h; }

  cplx& operator()(int r, int s) { return a_[static_cast<std::size_t>(r) * m_ + s]; }
  const cplx& operator()(int r, int s) const { return a_[static_cast<std::size_t>(r) * m_ + s]; }
  const std::vector<cplx>& coefficients() const { return a_; }

  SiteFunction apply(const SiteFunction& f) const {
    if (static_cast<int>(f.size()) != m_) throw ShapeError("one-body operator applied to wrong size");
    SiteFunction out(m_, cplx{0.0, 0.0});
    for (int r = 0; r < m_; ++r) {
      cplx acc{0.0, 0.0};
      for (int s = 0; s < m_; ++s) acc += (*this)(r, s) * f[s];
      out[r] = acc;
    }
    return out;
  }

  OneBodyOperator adjoint() const {
    OneBodyOperator out(m_);
    for (int r = 0; r < m_; ++r)
      for (int s = 0; s < m_; ++s) out(r, s) = std::conj((*this)(s, r));
    out.hermitian_ = hermitian_;
    return out;
  }

  double hermitian_defect() const {
    double d = 0.0;
    for (int r = 0; r < m_; ++r)
      for (int s = 0; s < m_; ++s) d = std::max(d, std::abs((*this)(r, s) - std::conj((*this)(s, r))));
    return d;
  }

  double max_abs() const {
    double d = 0.0;
    for (const auto& v : a_) d = std::max(d, std::abs(v));
    return d;
  }

  OneBodyOperator& operator+=(const OneBodyOperator& o) {
    check(o);
    for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += o.a_[i];
    hermitian_ = hermitian_ && o.hermitian_;
    return *this;
  }
  OneBodyOperator& operator-=(const OneBodyOperator& o) {
    check(o);
    for (std::size_t i = 0; i < a_.size(); ++i) a_[i] -= o.a_[i];
    hermitian_ = hermitian_ && o.hermitian_;
    return *this;
  }
  OneBodyOperator& operator*=(cplx c) {
    for (auto& v : a_) v *= c;
    hermitian_ = hermitian_ && c.imag() == 0.0;
    return *this;
  }

  friend OneBodyOperator operator+(OneBodyOperator a, const OneBodyOperator& b) { return a += b; }
  friend OneBodyOperator operator-(OneBodyOperator a, const OneBodyOperator& b) { return a -= b; }
  friend OneBodyOperator operator*(cplx c, OneBodyOperator a) { return a *= c; }

  friend OneBodyOperator operator*(const OneBodyOperator& a, const OneBodyOperator& b) {
    a.check(b);
    const int m = a.m_;
    OneBodyOperator out(m);
    for (int r = 0; r < m; ++r)
      for (int k = 0; k < m; ++k) {
        const cplx ark = a(r, k);
        if (ark == cplx{0.0, 0.0}) continue;
        for (int s = 0; s < m; ++s) out(r, s) += ark * b(k, s);
      }
    return out;
  }

 private:
  void check(const OneBodyOperator& o) const {
    if (o.m_ != m_) throw ShapeError("one-body operator size mismatch");
  }

  int m_ = 0;
  std::vector<cplx> a_;
  bool hermitian_ = false;
};

// Two-body operator on C^M (x) C^M stored as an M^2 x M^2 table with row
// index r*M + s, where r acts on the first coordinate of the pair.
class TwoBodyKernel {
 public:
  TwoBodyKernel() = default;
  explicit TwoBodyKernel(int sites)
      : m_(sites), a_(static_cast<std::size_t>(sites) * sites * sites * sites) {}

  int sites() const { return m_; }
  std::size_t pair_dim() const { return static_cast<std::size_t>(m_) * m_; }

  cplx& operator()(std::size_t row, std::size_t col) { return a_[row * pair_dim() + col]; }
  const cplx& operator()(std::size_t row, std::size_t col) const { return a_[row * pair_dim() + col]; }

  static TwoBodyKernel kron(const OneBodyOperator& x, const OneBodyOperator& y) {
    const int m = x.sites();
    TwoBodyKernel k(m);
    for (int r = 0; r < m; ++r)
      for (int s = 0; s < m; ++s)
        for (int rp = 0; rp < m; ++rp)
          for (int sp = 0; sp < m; ++sp) k(r * m + s, rp * m + sp) = x(r, rp) * y(s, sp);
    return k;
  }

  // (A (x) B) diag(z) (C (x) D) with z indexed by r*M + s.
  static TwoBodyKernel sandwich(const OneBodyOperator& a, const OneBodyOperator& b,
                                const std::vector<double>& z, const OneBodyOperator& c,
                                const OneBodyOperator& d) {
    const int m = a.sites();
    const std::size_t md = static_cast<std::size_t>(m);
    const std::size_t pd = md * md;
    // right[(u,v),(r',s')] = z_uv C_ur' D_vs'
    std::vector<cplx> right(pd * pd);
    for (std::size_t u = 0; u < md; ++u)
      for (std::size_t v = 0; v < md; ++v) {
        const double zuv = z[u * md + v];
        if (zuv == 0.0) continue;
        for (std::size_t rp = 0; rp < md; ++rp) {
          const cplx cu = zuv * c(static_cast<int>(u), static_cast<int>(rp));
          if (cu == cplx{0.0, 0.0}) continue;
          for (std::size_t sp = 0; sp < md; ++sp)
            right[(u * md + v) * pd + rp * md + sp] = cu * d(static_cast<int>(v), static_cast<int>(sp));
        }
      }
    // mid[(u,s),col] = sum_v B_sv right[(u,v),col]
    std::vector<cplx> mid(pd * pd);
    for (std::size_t u = 0; u < md; ++u)
      for (std::size_t s = 0; s < md; ++s)
        for (std::size_t v = 0; v < md; ++v) {
          const cplx bsv = b(static_cast<int>(s), static_cast<int>(v));
          if (bsv == cplx{0.0, 0.0}) continue;
          const cplx* src = &right[(u * md + v) * pd];
          cplx* dst = &mid[(u * md + s) * pd];
          for (std::size_t col = 0; col < pd; ++col) dst[col] += bsv * src[col];
        }
    TwoBodyKernel out(m);
    for (std::size_t r = 0; r < md; ++r)
      for (std::size_t s = 0; s < md; ++s)
        for (std::size_t u = 0; u < md; ++u) {
          const cplx aru = a(static_cast<int>(r), static_cast<int>(u));
          if (aru == cplx{0.0, 0.0}) continue;
          const cplx* src = &mid[(u * md + s) * pd];
          cplx* dst = &out.a_[(r * md + s) * pd];
          for (std::size_t col = 0; col < pd; ++col) dst[col] += aru * src[col];
        }
    return out;
  }

  TwoBodyKernel adjoint() const {
    TwoBodyKernel out(m_);
    const std::size_t pd = pair_dim();
    for (std::size_t i = 0; i < pd; ++i)
      for (std::size_t j = 0; j < pd; ++j) out(i, j) = std::conj((*this)(j, i));
    return out;
  }

  // S K S with S the coordinate swap.
  TwoBodyKernel swapped() const {
    TwoBodyKernel out(m_);
    const std::size_t md = static_cast<std::size_t>(m_);
    for (std::size_t r = 0; r < md; ++r)
      for (std::size_t s = 0; s < md; ++s)
        for (std::size_t rp = 0; rp < md; ++rp)
          for (std::size_t sp = 0; sp < md; ++sp) out(s * md + r, sp * md + rp) = (*this)(r * md + s, rp * md + sp);
    return out;
  }

  double max_abs_difference(const TwoBodyKernel& o) const {
    double d = 0.0;
    for (std::size_t i = 0; i < a_.size(); ++i) d = std::max(d, std::abs(a_[i] - o.a_[i]));
    return d;
  }

  TwoBodyKernel& operator+=(const TwoBodyKernel& o) {
    if (o.m_ != m_) throw ShapeError("two-body kernel size mismatch");
    for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += o.a_[i];
    return *this;
  }
  TwoBodyKernel& operator*=(cplx c) {
    for (auto& v : a_) v *= c;
    return *this;
  }
  friend TwoBodyKernel operator+(TwoBodyKernel a, const TwoBodyKernel& b) { return a += b; }
  friend TwoBodyKernel operator*(cplx c, TwoBodyKernel a) { return a *= c; }

  const std::vector<cplx>& coefficients() const { return a_; }

 private:
  int m_ = 0;
  std::vector<cplx> a_;
};

// Interaction samples w(r) indexed by minimum-image displacement, with the
// dense site-pair table W(r, s) = w(r - s) precomputed.
class PairTable {
 public:
  PairTable() = default;
  PairTable(Lattice lat, std::vector<double> by_displacement)
      : lattice_(lat), by_disp_(std::move(by_displacement)) {
    const int m = lattice_.sites();
    if (static_cast<int>(by_disp_.size()) != m) throw ShapeError("pair table size mismatch");
    dense_.resize(static_cast<std::size_t>(m) * m);
    for (int r = 0; r < m; ++r)
      for (int s = 0; s < m; ++s) dense_[static_cast<std::size_t>(r) * m + s] = by_disp_[lattice_.displacement_index(r, s)];
  }

  static PairTable zero(const Lattice& lat) { return PairTable(lat, std::vector<double>(lat.sites(), 0.0)); }

  const Lattice& lattice() const { return lattice_; }
  int sites() const { return lattice_.sites(); }

  // w at the displacement encoded as a site index ((r - s) mod L per dimension).
  double at_displacement(int disp_index) const { return by_disp_[disp_index]; }
  double operator()(int r, int s) const { return dense_[static_cast<std::size_t>(r) * sites() + s]; }

  const std::vector<double>& by_displacement() const { return by_disp_; }
  const std::vector<double>& dense() const { return dense_; }

  bool is_zero() const {
    return std::all_of(by_disp_.begin(), by_disp_.end(), [](double v) { return v == 0.0; });
  }

 private:
  Lattice lattice_;
  std::vector<double> by_disp_;
  std::vector<double> dense_;
};

}  // namespace blab

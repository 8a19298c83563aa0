#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "blab/errors.hpp"
#include "blab/lattice.hpp"

namespace blab {

using cplx = std::complex<double>;

// One-body function on the lattice sites.
using SiteFunction = std::vector<cplx>;

// Particle number and lattice shared by every amplitude vector of a space.
struct StateShape {
  Lattice lattice;
  int particles = 0;

  // Weight h^{dN} of the N-body lattice inner product.
  double weight() const { return std::pow(lattice.cell_volume(), particles); }

  friend bool operator==(const StateShape&, const StateShape&) = default;
};

struct TensorRep {
  static constexpr const char* name = "tensor";
};
struct FockRep {
  static constexpr const char* name = "occupation";
};

// Amplitude vector tagged with its representation. Tensor and occupation
// states share the weighting convention h^{dN} so norms agree across the
// embedding.
template <class Rep>
class StateVector {
 public:
  using rep_type = Rep;

  StateVector() = default;
  StateVector(StateShape shape, std::size_t dim) : shape_(shape), amp_(dim, cplx{0.0, 0.0}) {}
  StateVector(StateShape shape, std::vector<cplx> amp) : shape_(shape), amp_(std::move(amp)) {}

  const StateShape& shape() const { return shape_; }
  std::size_t size() const { return amp_.size(); }

  cplx& operator[](std::size_t i) { return amp_[i]; }
  const cplx& operator[](std::size_t i) const { return amp_[i]; }

  std::span<cplx> amplitudes() { return amp_; }
  std::span<const cplx> amplitudes() const { return amp_; }
  std::vector<cplx>& raw() { return amp_; }
  const std::vector<cplx>& raw() const { return amp_; }

  bool all_finite() const {
    for (const auto& a : amp_)
      if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) return false;
    return true;
  }

  StateVector& operator+=(const StateVector& o) {
    check_same(o);
    for (std::size_t i = 0; i < amp_.size(); ++i) amp_[i] += o.amp_[i];
    return *this;
  }
  StateVector& operator-=(const StateVector& o) {
    check_same(o);
    for (std::size_t i = 0; i < amp_.size(); ++i) amp_[i] -= o.amp_[i];
    return *this;
  }
  StateVector& operator*=(cplx c) {
    for (auto& a : amp_) a *= c;
    return *this;
  }

  // this += c * o
  StateVector& add_scaled(cplx c, const StateVector& o) {
    check_same(o);
    for (std::size_t i = 0; i < amp_.size(); ++i) amp_[i] += c * o.amp_[i];
    return *this;
  }

  friend StateVector operator+(StateVector a, const StateVector& b) { return a += b; }
  friend StateVector operator-(StateVector a, const StateVector& b) { return a -= b; }
  friend StateVector operator*(cplx c, StateVector a) { return a *= c; }

  void check_same(const StateVector& o) const {
    if (!(shape_ == o.shape_) || amp_.size() != o.amp_.size())
      throw ShapeError(std::string("shape mismatch between ") + Rep::name + " states");
  }

 private:
  StateShape shape_;
  std::vector<cplx> amp_;
};

using TensorState = StateVector<TensorRep>;
using FockState = StateVector<FockRep>;

// h^{dN}-weighted sesquilinear product, conjugate-linear in the first slot.
template <class Rep>
cplx inner(const StateVector<Rep>& a, const StateVector<Rep>& b) {
  a.check_same(b);
  cplx acc{0.0, 0.0};
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::conj(a[i]) * b[i];
  return a.shape().weight() * acc;
}

template <class Rep>
double norm(const StateVector<Rep>& a) {
  double acc = 0.0;
  for (const auto& v : a.amplitudes()) acc += std::norm(v);
  return std::sqrt(a.shape().weight() * acc);
}

template <class Rep>
StateVector<Rep> normalized(StateVector<Rep> a) {
  const double n = norm(a);
  if (n == 0.0) throw NormalizationError("cannot normalise the zero state");
  a *= 1.0 / n;
  return a;
}

// y + c * k, the update primitive of the one-step kernels.
template <class Rep>
StateVector<Rep> add_scaled(const StateVector<Rep>& y, cplx c, const StateVector<Rep>& k) {
  StateVector<Rep> out = y;
  out.add_scaled(c, k);
  return out;
}

template <class Rep>
std::vector<StateVector<Rep>> add_scaled(const std::vector<StateVector<Rep>>& y, cplx c,
                                         const std::vector<StateVector<Rep>>& k) {
  if (y.size() != k.size()) throw ShapeError("system size mismatch");
  std::vector<StateVector<Rep>> out = y;
  for (std::size_t i = 0; i < y.size(); ++i) out[i].add_scaled(c, k[i]);
  return out;
}

template <class Rep>
void scale(StateVector<Rep>& y, cplx c) {
  y *= c;
}

template <class Rep>
void scale(std::vector<StateVector<Rep>>& y, cplx c) {
  for (auto& x : y) x *= c;
}

template <class Rep>
bool all_finite(const StateVector<Rep>& s) {
  return s.all_finite();
}

template <class Rep>
bool all_finite(const std::vector<StateVector<Rep>>& s) {
  for (const auto& x : s)
    if (!x.all_finite()) return false;
  return true;
}

// One-body (h^d-weighted) helpers.
inline cplx site_inner(const Lattice& lat, const SiteFunction& a, const SiteFunction& b) {
  if (a.size() != b.size()) throw ShapeError("site function size mismatch");
  cplx acc{0.0, 0.0};
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::conj(a[i]) * b[i];
  return lat.cell_volume() * acc;
}

inline double site_norm(const Lattice& lat, const SiteFunction& a) {
  return std::sqrt(std::abs(site_inner(lat, a, a)));
}

inline SiteFunction site_normalized(const Lattice& lat, SiteFunction a) {
  const double n = site_norm(lat, a);
  if (n == 0.0) throw NormalizationError("cannot normalise the zero site function");
  for (auto& v : a) v /= n;
  return a;
}

inline void require_normalized(const Lattice& lat, const SiteFunction& phi, double tol = 1e-10) {
  const double n = site_norm(lat, phi);
  if (std::abs(n - 1.0) > tol)
    throw NormalizationError("condensate norm deviates from 1 by " + std::to_string(std::abs(n - 1.0)));
}

}  // namespace blab

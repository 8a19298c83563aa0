#pragma once

#include <complex>
#include <vector>

#include "blab/errors.hpp"
#include "blab/state.hpp"

namespace blab {

inline SiteFunction add_scaled(const SiteFunction& y, cplx c, const SiteFunction& k) {
  if (y.size() != k.size()) throw ShapeError("site function size mismatch");
  SiteFunction out = y;
  for (std::size_t i = 0; i < y.size(); ++i) out[i] += c * k[i];
  return out;
}

inline void scale(SiteFunction& f, cplx c) {
  for (auto& v : f) v *= c;
}

inline bool all_finite(const SiteFunction& f) {
  for (const auto& a : f)
    if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) return false;
  return true;
}

// One classical fourth-order Runge-Kutta step of dy/dt = f(stage, y), where
// stage 0, 1, 2 stand for t, t + h/2, t + h. Callers resolve stage times
// themselves so that every stage lands exactly on a stored grid point.
template <class State, class Deriv>
State rk4_step(Deriv&& f, const State& y, double h) {
  const State k1 = f(0, y);
  const State k2 = f(1, add_scaled(y, 0.5 * h, k1));
  const State k3 = f(1, add_scaled(y, 0.5 * h, k2));
  const State k4 = f(2, add_scaled(y, h, k3));
  State out = add_scaled(y, h / 6.0, k1);
  out = add_scaled(out, h / 3.0, k2);
  out = add_scaled(out, h / 3.0, k3);
  out = add_scaled(out, h / 6.0, k4);
  if (!all_finite(out)) throw IntegratorError("non-finite amplitudes after a time step");
  return out;
}

}  // namespace blab

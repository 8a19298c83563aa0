#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <list>
#include <string>
#include <utility>

#include "blab/errors.hpp"
#include "blab/hamiltonians.hpp"
#include "blab/integrator.hpp"
#include "blab/meanfield.hpp"

namespace blab {

inline constexpr double propagation_drift_abort = 1e-6;

// One fourth-order step of i d/dt psi = A(t) psi; `apply(stage, psi)` must
// return A at t, t + dt/2, t + dt for stage 0, 1, 2.
template <class State, class Apply>
State step(Apply&& apply, const State& psi, double dt) {
  auto deriv = [&apply](int stage, const State& y) {
    State out = apply(stage, y);
    scale(out, cplx{0.0, -1.0});
    return out;
  };
  return rk4_step(deriv, psi, dt);
}

// Pieces for the trajectory samples most recently requested. Sequential
// stepping touches each half-step sample a bounded number of times.
class PiecesCache {
 public:
  PiecesCache(const Model& model, const HartreeTrajectory& traj, std::size_t capacity = 8)
      : model_(&model), traj_(&traj), capacity_(capacity) {}

  const EffectivePieces& at(std::size_t half_index) {
    for (auto it = entries_.begin(); it != entries_.end(); ++it)
      if (it->first == half_index) {
        entries_.splice(entries_.begin(), entries_, it);
        return entries_.front().second;
      }
    entries_.emplace_front(half_index, EffectivePieces(*model_, traj_->sample(half_index)));
    if (entries_.size() > capacity_) entries_.pop_back();
    return entries_.front().second;
  }

  const HartreeTrajectory& trajectory() const { return *traj_; }

 private:
  const Model* model_;
  const HartreeTrajectory* traj_;
  std::size_t capacity_;
  std::list<std::pair<std::size_t, EffectivePieces>> entries_;
};

template <class State>
struct EvolveResult {
  State state;
  double max_drift = 0.0;
  long steps = 0;
};

template <class State>
using StepObserver = std::function<void(long step, double t, const State& psi)>;

namespace detail {

template <class State>
void check_drift(double n0, const State& psi, double t, double& max_drift) {
  const double drift = std::abs(norm(psi) - n0);
  max_drift = std::max(max_drift, drift);
  if (drift > propagation_drift_abort)
    throw IntegratorError("norm drift " + std::to_string(drift) + " exceeds 1e-6 at t = " + std::to_string(t));
}

inline long step_count(double t0, double t1, double dt) {
  if (!(dt > 0.0)) throw ConfigError("dt must be positive");
  if (t1 < t0) throw RangeError("evolution requires t1 >= t0");
  const long steps = std::lround((t1 - t0) / dt);
  if (std::abs(steps * dt - (t1 - t0)) > 1e-9 * std::max(1.0, t1 - t0))
    throw ConfigError("dt does not divide the evolution interval");
  return steps;
}

}  // namespace detail

// psi(t1) = U(t1, t0) psi0 with generator H^beta(t).
template <class Space>
EvolveResult<typename Space::state_type> evolve_full(const Hamiltonians<Space>& ham,
                                                     const typename Space::state_type& psi0, double t0, double t1,
                                                     double dt,
                                                     const StepObserver<typename Space::state_type>& observe = {}) {
  using State = typename Space::state_type;
  const long steps = detail::step_count(t0, t1, dt);
  EvolveResult<State> res{psi0, 0.0, steps};
  const double n0 = norm(psi0);
  if (observe) observe(0, t0, res.state);
  for (long m = 0; m < steps; ++m) {
    const double t = t0 + static_cast<double>(m) * dt;
    auto apply = [&](int stage, const State& y) { return ham.apply_H(t + 0.5 * stage * dt, y); };
    res.state = step(apply, res.state, dt);
    detail::check_drift(n0, res.state, t + dt, res.max_drift);
    if (observe) observe(m + 1, t0 + static_cast<double>(m + 1) * dt, res.state);
  }
  return res;
}

// Utilde_phi(t, s) psi0 with generator Htilde on the stored condensate; s
// and t must be step times of the trajectory.
template <class Space>
EvolveResult<typename Space::state_type> evolve_aux(const Hamiltonians<Space>& ham, PiecesCache& cache,
                                                    const typename Space::state_type& psi0, double s, double t,
                                                    const StepObserver<typename Space::state_type>& observe = {}) {
  using State = typename Space::state_type;
  const HartreeTrajectory& traj = cache.trajectory();
  const long m0 = traj.step_index(s), m1 = traj.step_index(t);
  if (m1 < m0) throw RangeError("evolve_aux requires t >= s");
  const double dt = traj.dt();
  EvolveResult<State> res{psi0, 0.0, m1 - m0};
  const double n0 = norm(psi0);
  if (observe) observe(0, traj.time(2 * m0), res.state);
  for (long m = m0; m < m1; ++m) {
    auto apply = [&](int stage, const State& y) {
      const std::size_t h = static_cast<std::size_t>(2 * m + stage);
      return ham.apply_Htilde(cache.at(h), traj.time(h), y);
    };
    res.state = step(apply, res.state, dt);
    detail::check_drift(n0, res.state, traj.time(2 * m + 2), res.max_drift);
    if (observe) observe(m + 1 - m0, traj.time(2 * m + 2), res.state);
  }
  return res;
}

template <class Space>
EvolveResult<typename Space::state_type> evolve_aux(const Hamiltonians<Space>& ham, const HartreeTrajectory& traj,
                                                    const typename Space::state_type& psi0, double s, double t) {
  PiecesCache cache(ham.model(), traj);
  return evolve_aux(ham, cache, psi0, s, t);
}

}  // namespace blab

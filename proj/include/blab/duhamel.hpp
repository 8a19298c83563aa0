#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "blab/errors.hpp"
#include "blab/hamiltonians.hpp"
#include "blab/propagation.hpp"

namespace blab {

// n-tuples over {1, 2} with entries summing to k, in lexicographic order.
inline std::vector<std::vector<int>> tuple_set(int n, int k) {
  std::vector<std::vector<int>> out;
  if (n < 0 || k < n || k > 2 * n) return out;
  std::vector<int> cur(n, 1);
  // choose which k - n positions carry a 2
  const int twos = k - n;
  std::vector<bool> mask(n, false);
  std::fill(mask.end() - twos, mask.end(), true);
  do {
    for (int i = 0; i < n; ++i) cur[i] = mask[i] ? 2 : 1;
    out.push_back(cur);
  } while (std::next_permutation(mask.begin(), mask.end()));
  return out;
}

// Index pairs (n, k) carried by a hierarchy of the given order:
// 0 <= n <= order - 1 and n <= k <= min(2n, order - 1).
inline std::vector<std::pair<int, int>> hierarchy_terms(int order) {
  std::vector<std::pair<int, int>> out;
  for (int n = 0; n <= order - 1; ++n)
    for (int k = n; k <= std::min(2 * n, order - 1); ++k) out.emplace_back(n, k);
  return out;
}

template <class State>
class Hierarchy {
 public:
  Hierarchy() = default;
  Hierarchy(int order, std::vector<State> terms, double t) : order_(order), terms_(std::move(terms)), t_(t) {
    const auto idx = hierarchy_terms(order_);
    for (std::size_t i = 0; i < idx.size(); ++i) index_[idx[i]] = i;
  }

  int order() const { return order_; }
  double time() const { return t_; }
  bool has(int n, int k) const { return index_.count({n, k}) != 0; }

  // Phi_n^(k); absent pairs are not stored.
  const State& term(int n, int k) const {
    auto it = index_.find({n, k});
    if (it == index_.end())
      throw RangeError("hierarchy of order " + std::to_string(order_) + " holds no term (" + std::to_string(n) +
                       ", " + std::to_string(k) + ")");
    return terms_[it->second];
  }
  const std::vector<State>& terms() const { return terms_; }

 private:
  int order_ = 0;
  std::vector<State> terms_;
  std::map<std::pair<int, int>, std::size_t> index_;
  double t_ = 0.0;
};

// Advances i d/dt Phi_n^k = Htilde Phi_n^k + C Phi_{n-1}^{k-1} + Q Phi_{n-1}^{k-2}
// from Phi_0^0(0) = psi0, all others zero, as one staged system.
template <class Space>
Hierarchy<typename Space::state_type> hierarchy_evolve(
    const Hamiltonians<Space>& ham, PiecesCache& cache, const typename Space::state_type& psi0, int order, double t,
    const std::function<void(long, double, const Hierarchy<typename Space::state_type>&)>& observe = {}) {
  using State = typename Space::state_type;
  if (order < 1) throw RangeError("hierarchy order must be at least 1");
  const HartreeTrajectory& traj = cache.trajectory();
  const long m0 = traj.step_index(traj.t0());
  const long m1 = traj.step_index(t);
  const auto idx = hierarchy_terms(order);
  std::map<std::pair<int, int>, std::size_t> where;
  for (std::size_t i = 0; i < idx.size(); ++i) where[idx[i]] = i;
  auto find = [&where](int n, int k) -> long {
    auto it = where.find({n, k});
    return it == where.end() ? -1 : static_cast<long>(it->second);
  };
  std::vector<long> src_c(idx.size()), src_q(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    src_c[i] = find(idx[i].first - 1, idx[i].second - 1);
    src_q[i] = find(idx[i].first - 1, idx[i].second - 2);
  }
  std::vector<State> sys(idx.size(), ham.space().zero());
  sys[0] = psi0;
  const double dt = traj.dt();
  for (long m = m0; m < m1; ++m) {
    auto apply = [&](int stage, const std::vector<State>& y) {
      const std::size_t h = static_cast<std::size_t>(2 * m + stage);
      const EffectivePieces& e = cache.at(h);
      e.require_time(traj.time(h));
      std::vector<State> out;
      out.reserve(y.size());
      for (std::size_t i = 0; i < y.size(); ++i) {
        State r = ham.apply_Htilde(e, y[i]);
        if (src_c[i] >= 0) r += ham.apply_C(e, y[src_c[i]]);
        if (src_q[i] >= 0) r += ham.apply_Q(e, y[src_q[i]]);
        out.push_back(std::move(r));
      }
      return out;
    };
    sys = step(apply, sys, dt);
    if (observe) observe(m + 1, traj.time(2 * m + 2), Hierarchy<State>(order, sys, traj.time(2 * m + 2)));
  }
  return Hierarchy<State>(order, std::move(sys), t);
}

template <class Space>
Hierarchy<typename Space::state_type> hierarchy_evolve(const Hamiltonians<Space>& ham, const HartreeTrajectory& traj,
                                                       const typename Space::state_type& psi0, int order, double t) {
  PiecesCache cache(ham.model(), traj);
  return hierarchy_evolve(ham, cache, psi0, order, t);
}

// psi^(a) = sum_{k=0}^{a-1} sum_{n=ceil(k/2)}^{k} T_n^(k), never renormalised.
template <class State>
State assemble(const Hierarchy<State>& h, int a) {
  if (a < 1) throw RangeError("correction order must be at least 1");
  if (a > h.order()) throw RangeError("correction order exceeds hierarchy order");
  State out = h.term(0, 0);
  for (int k = 1; k <= a - 1; ++k)
    for (int n = (k + 1) / 2; n <= k; ++n) out += h.term(n, k);
  return out;
}

namespace detail {

// Composite trapezoid of -i int_0^{s_m} Ustep(s_m, s) X(s) ds at every node
// s_m = t0 + m dt, through A_{m+1} = Ustep_m (A_m + c_m X_m), c_0 = 1/2, c_m = 1,
// integral_m = dt (A_m + X_m / 2) for m >= 1 and 0 at m = 0.
// `advance(m, psi)` maps s_m -> s_{m+1}.
template <class State, class Advance>
std::vector<State> trapezoid_nodes(const std::vector<State>& x, double dt, Advance&& advance) {
  std::vector<State> out;
  out.reserve(x.size());
  State acc = x[0];
  acc *= 0.0;
  for (std::size_t m = 0; m < x.size(); ++m) {
    State node = acc;
    if (m > 0) node.add_scaled(0.5, x[m]);
    node *= cplx{0.0, -dt};
    out.push_back(std::move(node));
    if (m + 1 < x.size()) {
      acc.add_scaled(m == 0 ? 0.5 : 1.0, x[m]);
      acc = advance(static_cast<long>(m), acc);
    }
  }
  return out;
}

}  // namespace detail

// T_n^(k)(t) for n in {1, 2} by nested composite-trapezoid quadrature over
// the ordered simplex with nodes at the trajectory step times.
template <class Space>
typename Space::state_type quadrature_Tnk(const Hamiltonians<Space>& ham, PiecesCache& cache, int n, int k,
                                          double t, const typename Space::state_type& psi0) {
  using State = typename Space::state_type;
  if (n < 1 || n > 2) throw RangeError("quadrature oracle covers n = 1 and n = 2 only");
  const auto tuples = tuple_set(n, k);
  if (tuples.empty()) return ham.space().zero();
  const HartreeTrajectory& traj = cache.trajectory();
  const long m1 = traj.step_index(t);
  const long m0 = traj.step_index(traj.t0());
  const double dt = traj.dt();
  auto advance = [&](long m, const State& psi) {
    const long g = m0 + m;
    auto apply = [&](int stage, const State& y) {
      const std::size_t h = static_cast<std::size_t>(2 * g + stage);
      return ham.apply_Htilde(cache.at(h), traj.time(h), y);
    };
    return step(apply, psi, dt);
  };
  auto apply_i = [&](int j, long m, const State& psi) {
    const std::size_t h = static_cast<std::size_t>(2 * (m0 + m));
    return j == 1 ? ham.apply_C(cache.at(h), traj.time(h), psi) : ham.apply_Q(cache.at(h), traj.time(h), psi);
  };
  // Utilde(s_m, 0) psi0 at every node
  std::vector<State> base;
  base.reserve(static_cast<std::size_t>(m1 - m0 + 1));
  base.push_back(psi0);
  for (long m = 0; m < m1 - m0; ++m) base.push_back(advance(m, base.back()));

  State total = ham.space().zero();
  for (const auto& tup : tuples) {
    std::vector<State> level = base;
    for (int j : tup) {
      std::vector<State> x;
      x.reserve(level.size());
      for (std::size_t m = 0; m < level.size(); ++m) x.push_back(apply_i(j, static_cast<long>(m), level[m]));
      level = detail::trapezoid_nodes(x, dt, advance);
    }
    total += level.back();
  }
  return total;
}

struct CorrectionError {
  double err = 0.0;
  double err_sq = 0.0;
  double corr_norm = 0.0;
};

template <class State>
CorrectionError correction_error(const State& exact, const State& corrected) {
  CorrectionError r;
  r.err = norm(exact - corrected);
  r.err_sq = r.err * r.err;
  r.corr_norm = norm(corrected);
  return r;
}

// || (psi(t) - psi^(1)(t)) - (-i int_0^t U(t,s) (C + Q)(s) Utilde(s,0) psi0 ds) ||
// with the integral by composite trapezoid over full-evolution segments.
template <class Space>
double first_order_duhamel_defect(const Hamiltonians<Space>& ham, PiecesCache& cache,
                                  const typename Space::state_type& psi0, double t) {
  using State = typename Space::state_type;
  const HartreeTrajectory& traj = cache.trajectory();
  const long m0 = traj.step_index(traj.t0());
  const long m1 = traj.step_index(t);
  const double dt = traj.dt();
  auto aux = [&](long m, const State& psi) {
    const long g = m0 + m;
    auto apply = [&](int stage, const State& y) {
      const std::size_t h = static_cast<std::size_t>(2 * g + stage);
      return ham.apply_Htilde(cache.at(h), traj.time(h), y);
    };
    return step(apply, psi, dt);
  };
  auto full = [&](long m, const State& psi) {
    const long g = m0 + m;
    auto apply = [&](int stage, const State& y) { return ham.apply_H(traj.time(static_cast<std::size_t>(2 * g + stage)), y); };
    return step(apply, psi, dt);
  };
  std::vector<State> x;
  State aux_state = psi0, full_state = psi0;
  for (long m = 0; m <= m1 - m0; ++m) {
    const std::size_t h = static_cast<std::size_t>(2 * (m0 + m));
    const EffectivePieces& e = cache.at(h);
    State src = ham.apply_C(e, aux_state);
    src += ham.apply_Q(e, aux_state);
    x.push_back(std::move(src));
    if (m < m1 - m0) {
      aux_state = aux(m, aux_state);
      full_state = full(m, full_state);
    }
  }
  const std::vector<State> integral = detail::trapezoid_nodes(x, dt, full);
  State lhs = full_state - aux_state;
  lhs -= integral.back();
  return norm(lhs);
}

}  // namespace blab

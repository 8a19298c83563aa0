#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "blab/errors.hpp"
#include "blab/fock.hpp"
#include "blab/operators.hpp"
#include "blab/state.hpp"
#include "blab/tensor.hpp"

namespace blab {

inline void require_symmetric(const TensorSpace& sp, const TensorState& psi, double tol = 1e-10) {
  const double res = sp.transposition_residual(psi);
  if (res > tol) throw ShapeError("state is not symmetric (transposition residual " + std::to_string(res) + ")");
}
inline void require_symmetric(const FockSpace&, const FockState&, double = 0.0) {}

// S = sum_j q_j, the excitation-number observable whose spectrum is {0..N}.
template <class Space>
typename Space::state_type apply_excitation_number(const Space& sp, const OneBodyOperator& q,
                                                   const typename Space::state_type& psi) {
  return sp.one_body_sum(q, psi);
}

// P_k = prod_{l != k} (S - l) / (k - l), factors applied in ascending |k - l|.
template <class Space>
typename Space::state_type apply_Pk(const Space& sp, int k, const SiteFunction& phi,
                                    const typename Space::state_type& psi) {
  const int n = sp.particles();
  if (k < 0 || k > n) return sp.zero();
  const OneBodyOperator q = OneBodyOperator::complement(sp.lattice(), phi);
  std::vector<int> others;
  for (int l = 0; l <= n; ++l)
    if (l != k) others.push_back(l);
  std::stable_sort(others.begin(), others.end(), [k](int a, int b) { return std::abs(k - a) < std::abs(k - b); });
  auto out = psi;
  for (int l : others) {
    auto s = apply_excitation_number(sp, q, out);
    s.add_scaled(-static_cast<double>(l), out);
    s *= 1.0 / static_cast<double>(k - l);
    out = std::move(s);
  }
  return out;
}

template <class Space>
std::vector<typename Space::state_type> spectral_components(const Space& sp, const SiteFunction& phi,
                                                            const typename Space::state_type& psi) {
  std::vector<typename Space::state_type> out;
  for (int k = 0; k <= sp.particles(); ++k) out.push_back(apply_Pk(sp, k, phi, psi));
  return out;
}

// (||P_0 psi||^2, ..., ||P_N psi||^2)
struct SpectralWeights {
  std::vector<double> w;

  int particles() const { return static_cast<int>(w.size()) - 1; }
  double operator[](int k) const { return k < 0 || k >= static_cast<int>(w.size()) ? 0.0 : w[k]; }
  double total() const {
    double s = 0.0;
    for (double v : w) s += v;
    return s;
  }
};

template <class Space>
SpectralWeights spectral_weights(const Space& sp, const SiteFunction& phi, const typename Space::state_type& psi) {
  require_normalized(sp.lattice(), phi);
  require_symmetric(sp, psi);
  SpectralWeights out;
  for (int k = 0; k <= sp.particles(); ++k) {
    const double nk = norm(apply_Pk(sp, k, phi, psi));
    out.w.push_back(nk * nk);
  }
  return out;
}

// f on {0..N} with an optional shift j: fhat_j = sum_n f(n + j) P_n.
struct WeightFunction {
  std::function<double(int)> f;
  int shift = 0;

  double operator()(int n) const { return f(n + shift); }
  WeightFunction shifted(int j) const { return {f, shift + j}; }

  // n(k) = sqrt(k/N), m(k) = sqrt((k+1)/N) and their powers.
  static WeightFunction n_weight(int particles, double power = 1.0) {
    return {[particles, power](int k) { return std::pow(static_cast<double>(k) / particles, 0.5 * power); }, 0};
  }
  static WeightFunction m_weight(int particles, double power = 1.0) {
    return {[particles, power](int k) { return std::pow(static_cast<double>(k + 1) / particles, 0.5 * power); }, 0};
  }
  // w_lambda(k)^j with w_lambda(k) = (k+1)/N^lambda below N^lambda - 1, 1 above.
  static WeightFunction w_lambda(int particles, double lambda, int j) {
    return {[particles, lambda, j](int k) {
              const double nl = std::pow(static_cast<double>(particles), lambda);
              const double base = k <= nl - 1.0 ? (k + 1) / nl : 1.0;
              return std::pow(base, j);
            },
            0};
  }
};

template <class Space>
typename Space::state_type apply_weight(const Space& sp, const WeightFunction& f, const SiteFunction& phi,
                                        const typename Space::state_type& psi) {
  auto out = sp.zero();
  const int n = sp.particles();
  for (int k = 0; k <= n; ++k) {
    if (k + f.shift < 0 || k + f.shift > n) continue;
    const double fk = f(k);
    if (fk < 0.0 || !std::isfinite(fk)) throw RangeError("weight function is negative or non-finite at k = " + std::to_string(k));
    if (fk == 0.0) continue;
    out.add_scaled(fk, apply_Pk(sp, k, phi, psi));
  }
  return out;
}

inline double weight_expectation(const WeightFunction& f, const SpectralWeights& w) {
  double acc = 0.0;
  const int n = w.particles();
  for (int k = 0; k <= n; ++k) {
    if (k + f.shift < 0 || k + f.shift > n) continue;
    const double fk = f(k);
    if (fk < 0.0 || !std::isfinite(fk)) throw RangeError("weight function is negative or non-finite at k = " + std::to_string(k));
    acc += fk * w[k];
  }
  return acc;
}

template <class Space>
double weight_expectation(const Space& sp, const WeightFunction& f, const SiteFunction& phi,
                          const typename Space::state_type& psi) {
  return weight_expectation(f, spectral_weights(sp, phi, psi));
}

// ||m^a psi||^2 = sum_k ((k+1)/N)^a w_k
inline double m_moment(const SpectralWeights& w, int a) {
  const int n = w.particles();
  double acc = 0.0;
  for (int k = 0; k <= n; ++k) acc += std::pow(static_cast<double>(k + 1) / n, a) * w[k];
  return acc;
}

// ||n^a psi||^2 = sum_k (k/N)^a w_k
inline double n_moment(const SpectralWeights& w, int a) {
  const int n = w.particles();
  double acc = 0.0;
  for (int k = 0; k <= n; ++k) acc += (a == 0 ? 1.0 : std::pow(static_cast<double>(k) / n, a)) * w[k];
  return acc;
}

// <xi, N^a xi> = sum_k k^a w_k
inline double excitation_moment(const SpectralWeights& w, int a) {
  const int n = w.particles();
  double acc = 0.0;
  for (int k = 0; k <= n; ++k) acc += (a == 0 ? 1.0 : std::pow(static_cast<double>(k), a)) * w[k];
  return acc;
}

// sum_k (k)_a / (N)_a w_k
inline double falling_factorial_expectation(const SpectralWeights& w, int a) {
  const int n = w.particles();
  double acc = 0.0;
  for (int k = a; k <= n; ++k) {
    double ratio = 1.0;
    for (int i = 0; i < a; ++i) ratio *= static_cast<double>(k - i) / (n - i);
    acc += ratio * w[k];
  }
  return acc;
}

// <psi, q_1 ... q_a psi> by the representation's own route.
inline double qchain_direct(const TensorSpace& sp, int a, const SiteFunction& phi, const TensorState& psi) {
  std::string pattern(sp.particles(), 'i');
  for (int j = 0; j < a; ++j) pattern[j] = 'q';
  return inner(psi, sp.projector_chain(pattern, phi, psi)).real();
}

// Symmetric states: sum over ordered distinct a-tuples of q's is (S)_a.
inline double qchain_direct(const FockSpace& sp, int a, const SiteFunction& phi, const FockState& psi) {
  const OneBodyOperator q = OneBodyOperator::complement(sp.lattice(), phi);
  FockState chi = psi;
  double falling = 1.0;
  for (int m = 0; m < a; ++m) {
    FockState s = sp.one_body_sum(q, chi);
    s.add_scaled(-static_cast<double>(m), chi);
    chi = std::move(s);
    falling *= sp.particles() - m;
  }
  return inner(psi, chi).real() / falling;
}

struct QChainResult {
  double direct = 0.0;
  double spectral = 0.0;
  double value() const { return direct; }
  double discrepancy() const { return std::abs(direct - spectral); }
};

template <class Space>
QChainResult qchain_expectation(const Space& sp, int a, const SiteFunction& phi,
                                const typename Space::state_type& psi) {
  if (a < 0 || a > sp.particles()) throw RangeError("q-chain length must lie in [0, N]");
  require_symmetric(sp, psi);
  QChainResult r;
  r.direct = a == 0 ? std::pow(norm(psi), 2) : qchain_direct(sp, a, phi, psi);
  r.spectral = falling_factorial_expectation(spectral_weights(sp, phi, psi), a);
  if (r.discrepancy() > 1e-8 * std::max(1.0, std::abs(r.spectral)))
    throw ConsistencyError("q-chain routes disagree: direct " + std::to_string(r.direct) + ", spectral " +
                           std::to_string(r.spectral));
  return r;
}

inline double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double out = 1.0;
  for (int i = 1; i <= k; ++i) out = out * (n - k + i) / i;
  return out;
}

// xi^(k) = sqrt(C(N,k)) q^{(x)k} <phi^{(x)(N-k)}| psi>, contracted on the
// last N - k slots. k = 0 yields a one-amplitude state with zero particles.
inline TensorState excitation_extract(const TensorSpace& sp, int k, const SiteFunction& phi, const TensorState& psi) {
  const int n = sp.particles();
  if (k < 0 || k > n) throw RangeError("excitation index out of range");
  if (n > 8) throw RangeError("excitation extraction is limited to N <= 8");
  require_normalized(sp.lattice(), phi);
  require_symmetric(sp, psi);
  const int m = sp.sites();
  const double vol = sp.lattice().cell_volume();
  std::vector<cplx> cur = psi.raw();
  for (int level = n; level > k; --level) {
    std::vector<cplx> next(cur.size() / m, cplx{0.0, 0.0});
    for (std::size_t i = 0; i < next.size(); ++i) {
      cplx acc{0.0, 0.0};
      for (int y = 0; y < m; ++y) acc += std::conj(phi[y]) * cur[i * m + y];
      next[i] = vol * acc;
    }
    cur = std::move(next);
  }
  const TensorSpace out_space(sp.lattice(), k);
  TensorState xi(out_space.shape(), std::move(cur));
  if (k > 0) {
    const OneBodyOperator q = OneBodyOperator::complement(sp.lattice(), phi);
    for (int j = 0; j < k; ++j) xi = out_space.apply_factor(q, j, xi);
  }
  xi *= std::sqrt(binomial(n, k));
  return xi;
}

struct A3Row {
  int a = 0;
  double m_moment = 0.0;
  double n_moment = 0.0;
  double qchain = 0.0;
  double excitation_moment = 0.0;
  double c_a = 0.0;       // ||m^a psi||^2 N^{gamma a}
  double c_prime = 0.0;   // ||q_1..q_a psi||^2 N^{gamma a}
  double c_second = 0.0;  // <xi, N^a xi> N^{-(1-gamma) a}
};

struct A3Report {
  double gamma = 1.0;
  double cap = 10.0;
  std::vector<A3Row> rows;
  std::vector<double> weights;
  // Largest gamma in (0, 1] with c_a <= cap for all a, or 0 if none.
  double gamma_max = 0.0;
};

template <class Space>
A3Report a3_report(const Space& sp, const typename Space::state_type& psi0, const SiteFunction& phi0, double gamma,
                   int moments, double cap = 10.0) {
  const int n = sp.particles();
  if (moments > n) throw RangeError("moment order exceeds the particle number");
  const SpectralWeights w = spectral_weights(sp, phi0, psi0);
  A3Report rep;
  rep.gamma = gamma;
  rep.cap = cap;
  rep.weights = w.w;
  const double logn = std::log(static_cast<double>(n));
  double gmax = 1.0;
  for (int a = 0; a <= moments; ++a) {
    A3Row row;
    row.a = a;
    row.m_moment = m_moment(w, a);
    row.n_moment = n_moment(w, a);
    row.qchain = qchain_expectation(sp, a, phi0, psi0).value();
    row.excitation_moment = excitation_moment(w, a);
    row.c_a = row.m_moment * std::pow(static_cast<double>(n), gamma * a);
    row.c_prime = row.qchain * std::pow(static_cast<double>(n), gamma * a);
    row.c_second = row.excitation_moment * std::pow(static_cast<double>(n), -(1.0 - gamma) * a);
    if (a > 0 && n > 1) gmax = std::min(gmax, std::log(cap / row.m_moment) / (a * logn));
    rep.rows.push_back(row);
  }
  rep.gamma_max = std::max(0.0, gmax);
  return rep;
}

}  // namespace blab

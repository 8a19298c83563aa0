#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "blab/errors.hpp"
#include "blab/integrator.hpp"
#include "blab/model.hpp"
#include "blab/operators.hpp"
#include "blab/state.hpp"

namespace blab {

// vbar(x) = h^d sum_y w(x - y) |phi(y)|^2
inline std::vector<double> vbar(const Lattice& lat, const SiteFunction& phi, const PairTable& w) {
  const int m = lat.sites();
  if (static_cast<int>(phi.size()) != m) throw ShapeError("condensate size mismatch");
  const double vol = lat.cell_volume();
  std::vector<double> out(m, 0.0);
  for (int x = 0; x < m; ++x) {
    double acc = 0.0;
    for (int y = 0; y < m; ++y) acc += w(x, y) * std::norm(phi[y]);
    out[x] = vol * acc;
  }
  return out;
}

// mu = (1/2) h^d sum_x |phi(x)|^2 vbar(x)
inline double mu(const Lattice& lat, const SiteFunction& phi, const std::vector<double>& vb) {
  double acc = 0.0;
  for (std::size_t x = 0; x < phi.size(); ++x) acc += std::norm(phi[x]) * vb[x];
  return 0.5 * lat.cell_volume() * acc;
}

inline double mu(const Lattice& lat, const SiteFunction& phi, const PairTable& w) {
  return mu(lat, phi, vbar(lat, phi, w));
}

// Mean-field generator -Delta + V^ext(t) + vbar - mu applied to an arbitrary
// (not necessarily normalised) site function.
inline SiteFunction hartree_generator(const Model& model, const SiteFunction& phi, double t) {
  const std::vector<double> vb = vbar(model.lattice, phi, model.interaction);
  const double m = mu(model.lattice, phi, vb);
  SiteFunction out = model.minus_laplacian.apply(phi);
  if (!model.potential.is_zero()) {
    const std::vector<double> v = model.potential.values(t);
    for (std::size_t x = 0; x < phi.size(); ++x) out[x] += v[x] * phi[x];
  }
  for (std::size_t x = 0; x < phi.size(); ++x) out[x] += (vb[x] - m) * phi[x];
  return out;
}

// phi(t) with its derived fields frozen at construction.
class Condensate {
 public:
  static constexpr double default_tolerance = 1e-10;

  Condensate() = default;
  Condensate(const Model& model, SiteFunction phi, double t, double tol = default_tolerance)
      : lattice_(model.lattice), phi_(std::move(phi)), t_(t) {
    require_normalized(lattice_, phi_, tol);
    vbar_ = vbar(lattice_, phi_, model.interaction);
    mu_ = mu(lattice_, phi_, vbar_);
    std::vector<double> shift(vbar_);
    for (auto& v : shift) v -= mu_;
    h_ = model.one_body(t) + OneBodyOperator::diagonal(shift);
    h_.set_hermitian(true);
  }

  const Lattice& lattice() const { return lattice_; }
  const SiteFunction& phi() const { return phi_; }
  double time() const { return t_; }
  const std::vector<double>& vbar_values() const { return vbar_; }
  double mu_value() const { return mu_; }
  // h^phi(t) = -Delta + V^ext(t) + vbar - mu
  const OneBodyOperator& h_phi() const { return h_; }
  double norm() const { return site_norm(lattice_, phi_); }

 private:
  Lattice lattice_;
  SiteFunction phi_;
  double t_ = 0.0;
  std::vector<double> vbar_;
  double mu_ = 0.0;
  OneBodyOperator h_;
};

// -i h^phi(t) phi
inline SiteFunction hartree_rhs(const Condensate& c) {
  SiteFunction out = c.h_phi().apply(c.phi());
  for (auto& v : out) v *= cplx{0.0, -1.0};
  return out;
}

inline SiteFunction hartree_rhs(const Model& model, const SiteFunction& phi, double t) {
  SiteFunction out = hartree_generator(model, phi, t);
  for (auto& v : out) v *= cplx{0.0, -1.0};
  return out;
}

// Condensate sampled on the half-step grid t0 + i dt/2, i = 0 .. 2 * steps.
// The N-body steppers read their stage values t, t + dt/2, t + dt directly
// from here.
class HartreeTrajectory {
 public:
  HartreeTrajectory() = default;
  HartreeTrajectory(double t0, double dt, std::vector<Condensate> samples, double max_drift)
      : t0_(t0), dt_(dt), samples_(std::move(samples)), max_drift_(max_drift) {}

  double t0() const { return t0_; }
  double dt() const { return dt_; }
  long steps() const { return static_cast<long>(samples_.size() / 2); }
  double t1() const { return time(samples_.size() - 1); }
  std::size_t size() const { return samples_.size(); }
  double max_drift() const { return max_drift_; }

  double time(std::size_t half_index) const { return t0_ + static_cast<double>(half_index) * (0.5 * dt_); }
  const Condensate& sample(std::size_t half_index) const {
    if (half_index >= samples_.size())
      throw TrajectoryGapError("trajectory sample " + std::to_string(half_index) + " beyond stored range");
    return samples_[half_index];
  }

  // Half-step index of a grid time; off-grid or uncovered times are a gap.
  std::size_t half_index(double t) const {
    const double x = (t - t0_) / (0.5 * dt_);
    const long i = std::lround(x);
    if (i < 0 || static_cast<std::size_t>(i) >= samples_.size() || std::abs(x - i) > 1e-6)
      throw TrajectoryGapError("time " + std::to_string(t) + " is not covered by the Hartree trajectory");
    return static_cast<std::size_t>(i);
  }

  // Step index m of the time t0 + m dt.
  long step_index(double t) const {
    const std::size_t h = half_index(t);
    if (h % 2 != 0) throw TrajectoryGapError("time " + std::to_string(t) + " is not a step time");
    return static_cast<long>(h / 2);
  }

  const Condensate& at(double t) const { return samples_[half_index(t)]; }
  const Condensate& at_step(long m, int stage = 0) const { return sample(static_cast<std::size_t>(2 * m + stage)); }

 private:
  double t0_ = 0.0;
  double dt_ = 1.0;
  std::vector<Condensate> samples_;
  double max_drift_ = 0.0;
};

inline constexpr double hartree_drift_abort = 1e-6;

// Fixed-step fourth-order integration of the Hartree equation on the
// half-step grid. No renormalisation; the norm drift is recorded.
inline HartreeTrajectory hartree_evolve(const Model& model, const SiteFunction& phi0, double t0, double t1,
                                        double dt) {
  if (!(dt > 0.0)) throw ConfigError("dt must be positive");
  if (t1 < t0) throw RangeError("hartree_evolve requires t1 >= t0");
  const long steps = std::lround((t1 - t0) / dt);
  if (std::abs(steps * dt - (t1 - t0)) > 1e-9 * std::max(1.0, std::abs(t1 - t0)))
    throw ConfigError("dt does not divide the evolution interval");
  require_normalized(model.lattice, phi0);
  const double h = 0.5 * dt;
  const std::size_t count = static_cast<std::size_t>(2 * steps + 1);
  std::vector<Condensate> samples;
  samples.reserve(count);
  samples.emplace_back(model, phi0, t0);
  SiteFunction phi = phi0;
  double max_drift = 0.0;
  for (std::size_t i = 1; i < count; ++i) {
    const double t = t0 + static_cast<double>(i - 1) * h;
    auto f = [&](int stage, const SiteFunction& y) { return hartree_rhs(model, y, t + 0.5 * stage * h); };
    phi = rk4_step(f, phi, h);
    const double drift = std::abs(site_norm(model.lattice, phi) - 1.0);
    max_drift = std::max(max_drift, drift);
    if (drift > hartree_drift_abort)
      throw IntegratorError("Hartree norm drift " + std::to_string(drift) + " exceeds 1e-6 at t = " +
                            std::to_string(t + h));
    samples.emplace_back(model, phi, t0 + static_cast<double>(i) * h, hartree_drift_abort);
  }
  return HartreeTrajectory(t0, dt, std::move(samples), max_drift);
}

// Discrete H^k proxy <phi, (1 - Delta)^k phi> with k = ceil(d/2).
inline double hk_proxy(const Lattice& lat, const SiteFunction& phi) {
  const int k = (lat.dim + 1) / 2;
  const OneBodyOperator lap = laplacian(lat);
  SiteFunction f = phi;
  for (int i = 0; i < k; ++i) {
    SiteFunction g = lap.apply(f);
    for (std::size_t x = 0; x < f.size(); ++x) f[x] += g[x];
  }
  return site_inner(lat, phi, f).real();
}

// Hartree energy <phi, (-Delta + V^ext(t)) phi> + mu.
inline double energy_proxy(const Model& model, const Condensate& c) {
  const SiteFunction f = model.one_body(c.time()).apply(c.phi());
  return site_inner(model.lattice, c.phi(), f).real() + c.mu_value();
}

// 1 + (1/2) sum_i cos(2 pi x_i / L), normalised: the default real condensate.
inline SiteFunction default_condensate(const Lattice& lat) {
  SiteFunction phi(lat.sites());
  for (int r = 0; r < lat.sites(); ++r) {
    const auto c = lat.coords(r);
    double v = 1.0;
    for (int k = 0; k < lat.dim; ++k) v += 0.5 * std::cos(2.0 * M_PI * c[k] / lat.sites_per_dim);
    phi[r] = v;
  }
  return site_normalized(lat, phi);
}

inline SiteFunction plane_wave(const Lattice& lat, std::array<int, 2> k) {
  SiteFunction phi(lat.sites());
  for (int r = 0; r < lat.sites(); ++r) {
    const auto c = lat.coords(r);
    double arg = 0.0;
    for (int d = 0; d < lat.dim; ++d) arg += 2.0 * M_PI * k[d] * c[d] / lat.sites_per_dim;
    phi[r] = std::polar(1.0, arg);
  }
  return site_normalized(lat, phi);
}

}  // namespace blab

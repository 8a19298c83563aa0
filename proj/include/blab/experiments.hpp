#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "blab/config.hpp"
#include "blab/duhamel.hpp"
#include "blab/errors.hpp"
#include "blab/fock.hpp"
#include "blab/hamiltonians.hpp"
#include "blab/meanfield.hpp"
#include "blab/model.hpp"
#include "blab/projections.hpp"
#include "blab/propagation.hpp"
#include "blab/random.hpp"
#include "blab/tensor.hpp"

namespace blab {

inline std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// delta(beta, gamma) = 1 - 4 d beta for gamma >= 1 - d beta,
// 3 gamma - 2 - d beta for (2 + d beta)/3 < gamma < 1 - d beta.
inline double delta_exponent(double beta, double gamma, int d) {
  if (d != 1 && d != 2) throw RangeError("dimension must be 1 or 2");
  const double bmax = 1.0 / (4.0 * d);
  if (!(beta >= 0.0 && beta < bmax))
    throw RangeError("beta = " + fmt(beta) + " outside [0, 1/(4d)) = [0, " + fmt(bmax) + ")");
  const double glo = (2.0 + d * beta) / 3.0;
  if (!(gamma > glo && gamma <= 1.0))
    throw RangeError("gamma = " + fmt(gamma) + " outside ((2 + d beta)/3, 1] = (" + fmt(glo) + ", 1]");
  if (gamma >= 1.0 - d * beta) return 1.0 - 4.0 * d * beta;
  return 3.0 * gamma - 2.0 - d * beta;
}

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // sum of squared residuals
  double slope_stderr = 0.0;
  int points = 0;
};

// Ordinary least squares y = slope x + intercept.
inline SlopeFit fit_slope(const std::vector<std::pair<double, double>>& pts) {
  if (pts.size() < 3) throw RangeError("slope fit needs at least 3 points");
  const double n = static_cast<double>(pts.size());
  double mx = 0.0, my = 0.0;
  for (const auto& [x, y] : pts) {
    mx += x;
    my += y;
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [x, y] : pts) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
  }
  if (!(sxx > 0.0)) throw RangeError("slope fit needs distinct x values");
  SlopeFit f;
  f.points = static_cast<int>(pts.size());
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  for (const auto& [x, y] : pts) {
    const double r = y - (f.slope * x + f.intercept);
    f.residual += r * r;
  }
  f.slope_stderr = std::sqrt(f.residual / (n - 2.0) / sxx);
  return f;
}

enum class InitialKind { product, one_excitation, mixed };

struct InitialSpec {
  InitialKind kind = InitialKind::product;
  double epsilon = 0.1;
};

// cos(2 pi x / L), or sin if that lies in span(phi0), orthogonalised
// against phi0 and normalised.
inline SiteFunction excitation_orbital(const Lattice& lat, const SiteFunction& phi0) {
  for (int variant = 0; variant < 2; ++variant) {
    SiteFunction chi(lat.sites());
    for (int r = 0; r < lat.sites(); ++r) {
      const double arg = 2.0 * M_PI * lat.coords(r)[0] / lat.sites_per_dim;
      chi[r] = variant == 0 ? std::cos(arg) : std::sin(arg);
    }
    const cplx ov = site_inner(lat, phi0, chi);
    for (int r = 0; r < lat.sites(); ++r) chi[r] -= ov * phi0[r];
    if (site_norm(lat, chi) > 1e-6) return site_normalized(lat, chi);
  }
  throw NormalizationError("no excitation orbital orthogonal to the condensate found");
}

template <class Space>
typename Space::state_type product_state(const Space& sp, const SiteFunction& phi0) {
  return sp.product(phi0);
}

// Sym(phi0^{(x)(N-1)} (x) chi), normalised; dGamma(|chi><phi0|) phi0^{(x)N} up to a factor.
template <class Space>
typename Space::state_type one_excitation_state(const Space& sp, const SiteFunction& phi0, const SiteFunction& chi) {
  const OneBodyOperator lift = OneBodyOperator::outer(sp.lattice(), chi, phi0);
  return normalized(sp.one_body_sum(lift, sp.product(phi0)));
}

template <class Space>
typename Space::state_type mixed_state(const Space& sp, const SiteFunction& phi0, const SiteFunction& chi,
                                       double eps) {
  auto out = sp.product(phi0);
  out.add_scaled(eps, one_excitation_state(sp, phi0, chi));
  return normalized(out);
}

template <class Space>
typename Space::state_type initial_state(const Space& sp, const SiteFunction& phi0, const InitialSpec& spec) {
  switch (spec.kind) {
    case InitialKind::product:
      return product_state(sp, phi0);
    case InitialKind::one_excitation:
      return one_excitation_state(sp, phi0, excitation_orbital(sp.lattice(), phi0));
    case InitialKind::mixed:
      return mixed_state(sp, phi0, excitation_orbital(sp.lattice(), phi0), spec.epsilon);
  }
  return product_state(sp, phi0);
}

// Everything one correction run produces at time t.
template <class State>
struct CorrectionRun {
  State exact;
  Hierarchy<State> hierarchy;
  std::vector<CorrectionError> errors;  // index a - 1
  double hartree_drift = 0.0;
  double full_drift = 0.0;
};

template <class Space>
CorrectionRun<typename Space::state_type> correction_run(const Model& model, const Space& sp,
                                                         const typename Space::state_type& psi0,
                                                         const SiteFunction& phi0, int order, double t) {
  const double dt = model.config.dt;
  const HartreeTrajectory traj = hartree_evolve(model, phi0, 0.0, t, dt);
  const Hamiltonians<Space> ham(sp, model);
  PiecesCache cache(model, traj);
  CorrectionRun<typename Space::state_type> run;
  run.hartree_drift = traj.max_drift();
  auto full = evolve_full(ham, psi0, 0.0, t, dt);
  run.exact = std::move(full.state);
  run.full_drift = full.max_drift;
  run.hierarchy = hierarchy_evolve(ham, cache, psi0, order, t);
  for (int a = 1; a <= order; ++a) run.errors.push_back(correction_error(run.exact, assemble(run.hierarchy, a)));
  return run;
}

struct SweepRow {
  int particles = 0;
  int sites = 0;
  int dimension = 1;
  double beta = 0.0;
  double gamma = 1.0;
  double t = 0.0;
  double dt = 0.0;
  int order = 1;
  double err_sq = 0.0;
  double corr_norm = 0.0;
  double runtime_s = 0.0;
  bool failed = false;
  std::string message;
};

struct SweepOptions {
  std::vector<int> particles = {4, 6, 8, 10, 12};
  std::vector<int> orders = {1, 2, 3};
  double t = 0.5;
  int jobs = 1;
  bool timing = true;
  InitialSpec initial;
  RunKind kind = RunKind::correction;
};

inline constexpr const char* sweep_csv_header = "N,M,d,beta,gamma,t,dt,order,err_sq,corr_norm,runtime_s";

struct SweepResult {
  std::vector<SweepRow> rows;
  std::map<int, std::optional<SlopeFit>> slopes;
  std::optional<double> delta;

  std::string csv() const {
    std::string out = std::string(sweep_csv_header) + "\n";
    for (const auto& r : rows) {
      out += std::to_string(r.particles) + "," + std::to_string(r.sites) + "," + std::to_string(r.dimension) + "," +
             fmt(r.beta) + "," + fmt(r.gamma) + "," + fmt(r.t) + "," + fmt(r.dt) + "," + std::to_string(r.order) + ",";
      if (r.failed)
        out += "nan,nan,";
      else
        out += fmt(r.err_sq) + "," + fmt(r.corr_norm) + ",";
      out += fmt(r.runtime_s) + "\n";
    }
    return out;
  }

  double err_sq(int particles, int order) const {
    for (const auto& r : rows)
      if (r.particles == particles && r.order == order && !r.failed) return r.err_sq;
    return std::nan("");
  }

  std::string summary() const {
    std::string out;
    for (const auto& [a, fit] : slopes) {
      out += "order " + std::to_string(a) + ": ";
      if (!fit) {
        out += "slope undefined (fewer than 3 usable points)\n";
        continue;
      }
      char buf[256];
      std::snprintf(buf, sizeof buf, "slope %.4f +- %.4f", fit->slope, fit->slope_stderr);
      out += buf;
      if (delta) {
        std::snprintf(buf, sizeof buf, " (asymptotic target -a*delta = %.4f)", -a * *delta);
        out += buf;
      }
      out += "\n";
    }
    return out;
  }
};

// err^2(N, a) for every grid point, occupation representation throughout.
inline SweepResult sweep_scaling(const ModelConfig& base, const SweepOptions& opt) {
  if (opt.orders.empty() || opt.particles.empty()) throw ConfigError("sweep grid is empty");
  const int max_order = *std::max_element(opt.orders.begin(), opt.orders.end());
  const std::size_t npts = opt.particles.size();
  std::vector<std::vector<SweepRow>> per_point(npts);

  auto run_point = [&](std::size_t i) {
    const int n = opt.particles[i];
    std::vector<SweepRow> rows;
    SweepRow proto;
    proto.particles = n;
    proto.sites = base.sites;
    proto.dimension = base.dimension;
    proto.beta = base.beta;
    proto.gamma = base.gamma;
    proto.t = opt.t;
    proto.dt = base.dt;
    const auto start = std::chrono::steady_clock::now();
    try {
      const ModelConfig cfg = with_particles(base, n, opt.kind);
      const Model model = Model::build(cfg);
      const FockSpace sp(model.lattice, n);
      const SiteFunction phi0 = default_condensate(model.lattice);
      const auto psi0 = initial_state(sp, phi0, opt.initial);
      const auto run = correction_run(model, sp, psi0, phi0, max_order, opt.t);
      const double secs =
          opt.timing ? std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() : 0.0;
      for (int a : opt.orders) {
        SweepRow r = proto;
        r.order = a;
        r.err_sq = run.errors[a - 1].err_sq;
        r.corr_norm = run.errors[a - 1].corr_norm;
        r.runtime_s = secs;
        rows.push_back(r);
      }
    } catch (const Error& e) {
      for (int a : opt.orders) {
        SweepRow r = proto;
        r.order = a;
        r.failed = true;
        r.message = e.what();
        rows.push_back(r);
      }
    }
    per_point[i] = std::move(rows);
  };

  const int jobs = std::max(1, std::min<int>(opt.jobs, static_cast<int>(npts)));
  if (jobs == 1) {
    for (std::size_t i = 0; i < npts; ++i) run_point(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < jobs; ++w)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < npts; i = next++) run_point(i);
      });
    for (auto& th : pool) th.join();
  }

  SweepResult res;
  for (auto& rows : per_point)
    for (auto& r : rows) res.rows.push_back(std::move(r));
  for (int a : opt.orders) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& r : res.rows)
      if (r.order == a && !r.failed && r.err_sq > 1e-30) pts.emplace_back(std::log(r.particles), std::log(r.err_sq));
    if (pts.size() >= 3)
      res.slopes[a] = fit_slope(pts);
    else
      res.slopes[a] = std::nullopt;
  }
  try {
    res.delta = delta_exponent(base.beta, base.gamma, base.dimension);
  } catch (const RangeError&) {
    res.delta = std::nullopt;
  }
  return res;
}

struct MomentRow {
  std::string evolution;  // "full" or "aux"
  double t = 0.0;
  int j = 0;
  double lhs = 0.0;
  double log_rhs = 0.0;
  double ratio = 0.0;
};

struct MomentGrowthResult {
  std::vector<MomentRow> rows;

  double max_ratio(const std::string& evolution) const {
    double m = 0.0;
    for (const auto& r : rows)
      if (r.evolution == evolution) m = std::max(m, r.ratio);
    return m;
  }

  std::string csv() const {
    std::string out = "evolution,t,j,lhs,log_rhs,ratio\n";
    for (const auto& r : rows)
      out += r.evolution + "," + fmt(r.t) + "," + std::to_string(r.j) + "," + fmt(r.lhs) + "," + fmt(r.log_rhs) + "," +
             fmt(r.ratio) + "\n";
    return out;
  }
};

// log C_j^{t,0} = log j! + j (j+1) log 3 + 9^j I_t with I_t the integrated H^k proxy.
inline double log_moment_constant(int j, double integrated_proxy) {
  return std::lgamma(j + 1.0) + j * (j + 1.0) * std::log(3.0) + std::pow(9.0, j) * integrated_proxy;
}

// lhs_j(t) = ||m^{phi(t)}^j psi_t||^2 against the explicit bound
// C_j sum_{n<=j} N^{n(-1+d beta)} ||m^{phi0}^{j-n} psi0||^2 for both
// evolutions. The full evolution uses the b = 0 instance of its bound, which
// adds 2^0 C_0 ||psi0||^2. Sampled at `samples` equally spaced step times.
inline MomentGrowthResult moment_growth(const ModelConfig& cfg, const std::vector<int>& js, double t,
                                        const InitialSpec& init = {}, int samples = 5) {
  const Model model = Model::build(cfg);
  const int n = cfg.particles;
  for (int j : js)
    if (j < 0 || j > n) throw RangeError("moment order must lie in [0, N]");
  const FockSpace sp(model.lattice, n);
  const SiteFunction phi0 = default_condensate(model.lattice);
  const FockState psi0 = initial_state(sp, phi0, init);
  const double dt = cfg.dt;
  const HartreeTrajectory traj = hartree_evolve(model, phi0, 0.0, t, dt);
  const Hamiltonians<FockSpace> ham(sp, model);
  PiecesCache cache(model, traj);
  const SpectralWeights w0 = spectral_weights(sp, phi0, psi0);
  const double db = cfg.dimension * cfg.beta;

  // integrated proxy at every step time (trapezoid on the half-step grid)
  std::vector<double> integ(static_cast<std::size_t>(traj.steps() + 1), 0.0);
  {
    double acc = 0.0;
    const double h = 0.5 * dt;
    double prev = hk_proxy(model.lattice, traj.sample(0).phi());
    for (std::size_t i = 1; i < traj.size(); ++i) {
      const double cur = hk_proxy(model.lattice, traj.sample(i).phi());
      acc += 0.5 * h * (prev + cur);
      prev = cur;
      if (i % 2 == 0) integ[i / 2] = acc;
    }
  }

  const long steps = traj.steps();
  std::vector<long> marks;
  for (int s = 0; s < samples; ++s) marks.push_back(samples == 1 ? steps : steps * s / (samples - 1));

  MomentGrowthResult res;
  auto record = [&](const std::string& evo, long m, const FockState& psi) {
    if (std::find(marks.begin(), marks.end(), m) == marks.end()) return;
    const SiteFunction phit = site_normalized(model.lattice, traj.at_step(m).phi());
    SpectralWeights wt;
    for (int k = 0; k <= n; ++k) {
      const double nk = norm(apply_Pk(sp, k, phit, psi));
      wt.w.push_back(nk * nk);
    }
    for (int j : js) {
      MomentRow row;
      row.evolution = evo;
      row.t = traj.time(static_cast<std::size_t>(2 * m));
      row.j = j;
      row.lhs = m_moment(wt, j);
      double sum = 0.0;
      for (int k = 0; k <= j; ++k) sum += std::pow(static_cast<double>(n), k * (-1.0 + db)) * m_moment(w0, j - k);
      double log_rhs = log_moment_constant(j, integ[m]) + std::log(sum);
      if (evo == "full") {
        // + 2^0 C_0 ||psi0||^2, combined in the log domain
        const double extra = log_moment_constant(0, integ[m]) + std::log(w0.total());
        const double hi = std::max(log_rhs, extra), lo = std::min(log_rhs, extra);
        log_rhs = hi + std::log1p(std::exp(lo - hi));
      }
      row.log_rhs = log_rhs;
      row.ratio = row.lhs > 0.0 ? std::exp(std::log(row.lhs) - log_rhs) : 0.0;
      res.rows.push_back(row);
    }
  };
  evolve_full(ham, psi0, 0.0, t, dt, [&](long m, double, const FockState& psi) { record("full", m, psi); });
  evolve_aux(ham, cache, psi0, 0.0, t, [&](long m, double, const FockState& psi) { record("aux", m, psi); });
  return res;
}

struct CheckResult {
  std::string name;
  double value = 0.0;      // residual for identities, worst violation lhs - rhs for inequalities
  double threshold = 0.0;
  bool pass = true;
};

struct SuiteReport {
  std::vector<CheckResult> checks;

  bool pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
  }

  void identity(const std::string& name, double residual, double tol) {
    merge(name, residual, tol, residual <= tol);
  }

  // lhs <= rhs up to roundoff relative to the scale of rhs.
  void inequality(const std::string& name, double lhs, double rhs) {
    const double slack = 1e-12 * std::max(1.0, std::abs(rhs));
    merge(name, lhs - rhs, slack, lhs - rhs <= slack);
  }

  std::string csv() const {
    std::string out = "check,value,threshold,pass\n";
    for (const auto& c : checks) out += c.name + "," + fmt(c.value) + "," + fmt(c.threshold) + "," + (c.pass ? "1" : "0") + "\n";
    return out;
  }

 private:
  void merge(const std::string& name, double value, double tol, bool ok) {
    for (auto& c : checks)
      if (c.name == name) {
        if (value > c.value) {
          c.value = value;
          c.threshold = tol;
        }
        c.pass = c.pass && ok;
        return;
      }
    checks.push_back({name, value, tol, ok});
  }
};

inline double relative_residual(const TensorState& a, const TensorState& b) {
  const double s = std::max(norm(a), norm(b));
  return s == 0.0 ? 0.0 : norm(a - b) / s;
}

// Exact identities and explicit-constant inequalities on random (phi, psi),
// tensor representation, cross-checked in the occupation representation.
inline SuiteReport lemma_suite(const ModelConfig& cfg, std::uint64_t seed, int trials = 1, int max_a = 4) {
  const Model model = Model::build(cfg);
  const Lattice& lat = model.lattice;
  const int n = cfg.particles;
  const int m = lat.sites();
  const TensorSpace ts(lat, n);
  const FockSpace fs(lat, n);
  const Hamiltonians<TensorSpace> ht(ts, model);
  const Hamiltonians<FockSpace> hf(fs, model);
  const double id_tol = model.interacting() ? 1e-10 : 1e-13;
  SuiteReport rep;
  Rng rng(seed);
  const int amax = std::min(max_a, n);
  for (int trial = 0; trial < trials; ++trial) {
    const SiteFunction phi = rng.condensate(lat);
    const TensorState psi = rng.symmetric_tensor(ts);
    const double t = 0.0;
    const Condensate cond(model, phi, t);
    const EffectivePieces e(model, cond);

    if (n >= 2) {
      rep.identity("decomposition_tensor", ht.decomposition_residual(t, e, psi), id_tol);
      rep.identity("decomposition_occupation", hf.decomposition_residual(t, e, fs.extract(psi)), id_tol);
    }

    // projections
    const auto comps = spectral_components(ts, phi, psi);
    TensorState sum = ts.zero();
    for (const auto& c : comps) sum += c;
    rep.identity("resolution_of_identity", relative_residual(sum, psi), 1e-10);
    double idem = 0.0, orth = 0.0;
    for (int k = 0; k <= n; ++k) {
      idem = std::max(idem, norm(apply_Pk(ts, k, phi, comps[k]) - comps[k]));
      for (int l = 0; l <= n; ++l)
        if (l != k) orth = std::max(orth, norm(apply_Pk(ts, l, phi, comps[k])));
    }
    rep.identity("pk_idempotence", idem, 1e-10);
    rep.identity("pk_orthogonality", orth, 1e-10);

    SpectralWeights w;
    for (const auto& c : comps) w.w.push_back(std::pow(norm(c), 2));

    // excitation vectors
    double xi_norm = 0.0, xi_orth = 0.0;
    std::vector<double> xi_w;
    const OneBodyOperator p = OneBodyOperator::projector(lat, phi);
    for (int k = 0; k <= n; ++k) {
      const TensorState xi = excitation_extract(ts, k, phi, psi);
      const double nx = norm(xi);
      xi_w.push_back(nx * nx);
      xi_norm = std::max(xi_norm, std::abs(nx * nx - w[k]));
      const TensorSpace xs(lat, k);
      for (int j = 0; j < k; ++j) xi_orth = std::max(xi_orth, norm(xs.apply_factor(p, j, xi)));
    }
    rep.identity("xi_norm_equals_pk_weight", xi_norm, 1e-10);
    rep.identity("xi_orthogonal_to_condensate", xi_orth, 1e-12);

    // (n^)^2 = (1/N) sum_j q_j
    {
      const OneBodyOperator q = OneBodyOperator::complement(lat, phi);
      const double lhs = inner(psi, apply_weight(ts, WeightFunction::n_weight(n, 2.0), phi, psi)).real();
      const double rhs = inner(psi, ts.one_body_sum(q, psi)).real() / n;
      rep.identity("n_squared_identity", std::abs(lhs - rhs), 1e-12);
    }

    std::vector<double> qchain(amax + 1);
    for (int a = 0; a <= amax; ++a) {
      const auto r = qchain_expectation(ts, a, phi, psi);
      rep.identity("qchain_dual_route", r.discrepancy(), 1e-10);
      qchain[a] = r.direct;
    }

    // ||q_1..q_a psi||^2 <= ||q_1..q_j n^{a-j} psi||^2
    for (int a = 1; a <= amax; ++a)
      for (int j = 0; j <= a; ++j) {
        const TensorState np = apply_weight(ts, WeightFunction::n_weight(n, a - j), phi, psi);
        std::string pattern(n, 'i');
        for (int l = 0; l < j; ++l) pattern[l] = 'q';
        const double rhs = std::pow(norm(ts.projector_chain(pattern, phi, np)), 2);
        rep.inequality("qchain_vs_n_weight", qchain[a], rhs);
      }

    for (int a = 1; a <= amax; ++a) {
      const double ma = m_moment(w, a);
      double bound = std::pow(static_cast<double>(n), -a);
      double fact = 1.0;
      for (int i = 2; i <= a; ++i) fact *= i;
      for (int j = 1; j <= a; ++j) bound += std::pow(4.0, a) * fact * std::pow(static_cast<double>(n), -a + j) * qchain[j];
      rep.inequality("qchain_below_m_moment", qchain[a], ma);
      rep.inequality("m_moment_below_qchain_bound", ma, bound);

      double ex = 0.0;
      for (int k = 0; k <= n; ++k) ex += std::pow(static_cast<double>(k), a) * xi_w[k];
      const double nma = std::pow(static_cast<double>(n), a) * ma;
      rep.inequality("excitation_moment_below_m_moment", ex, nma);
      rep.inequality("m_moment_below_excitation_bound", nma, 1.0 + std::pow(2.0, a) * ex);

      const double n2a = n_moment(w, a);
      rep.inequality("n_power_below_m_power", n2a, ma);
      rep.inequality("m_power_below_n_bound", ma, std::pow(2.0, a) * n2a + std::pow(static_cast<double>(n), -a));
    }

    // Q_mu f T Q_nu = Q_mu T f_{mu-nu} Q_nu on a generic state
    if (n >= 2) {
      const TensorState chi = rng.tensor(ts);
      std::vector<double> fvals(n + 1);
      for (auto& v : fvals) v = rng.uniform(0.0, 1.0);
      const WeightFunction f{[fvals](int k) { return fvals[k]; }, 0};
      const TwoBodyKernel tk = rng.kernel(m);
      const OneBodyOperator q = OneBodyOperator::complement(lat, phi);
      auto qmu = [&](const std::string& two, const TensorState& s) {
        std::string pattern(n, 'i');
        pattern[0] = two[0];
        pattern[1] = two[1];
        return ts.projector_chain(pattern, phi, s);
      };
      const std::vector<std::pair<int, std::string>> qs = {{0, "pp"}, {1, "pq"}, {1, "qp"}, {2, "qq"}};
      double worst = 0.0;
      for (const auto& [mu, a] : qs)
        for (const auto& [nu, b] : qs) {
          const TensorState lhs = qmu(a, apply_weight(ts, f, phi, ts.apply_two_slot(tk, 0, 1, qmu(b, chi))));
          const TensorState rhs = qmu(a, ts.apply_two_slot(tk, 0, 1, apply_weight(ts, f.shifted(mu - nu), phi, qmu(b, chi))));
          worst = std::max(worst, norm(lhs - rhs) / std::max(1.0, norm(lhs)));
        }
      rep.identity("weight_shift_identity", worst, 1e-10);
    }
  }
  return rep;
}

}  // namespace blab

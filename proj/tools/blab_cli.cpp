#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "blab/blab.hpp"

namespace {

using namespace blab;

enum Exit { ok = 0, suite_failure = 1, config_failure = 2, range_failure = 3, integrator_failure = 4 };

struct Common {
  std::string config;
  long long seed = -1;
};

ModelConfig load(const Common& c, RunKind kind = RunKind::general) {
  if (c.config.empty()) throw ConfigError("--config PATH is required");
  RawConfig raw = load_config_file(c.config);
  if (c.seed >= 0) raw["seed"] = std::to_string(c.seed);
  return validate_config(raw, kind);
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write '" + path + "'");
  f << text;
}

InitialSpec parse_initial(const std::string& name, double eps) {
  InitialSpec s;
  s.epsilon = eps;
  if (name == "product")
    s.kind = InitialKind::product;
  else if (name == "one_excitation")
    s.kind = InitialKind::one_excitation;
  else if (name == "mixed")
    s.kind = InitialKind::mixed;
  else
    throw ConfigError("unknown initial state '" + name + "'");
  return s;
}

std::vector<int> parse_int_list(const std::string& text, const std::string& what) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t pos = 0;
      out.push_back(std::stoi(item, &pos));
      if (pos != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("malformed " + what + " list '" + text + "'");
    }
  }
  if (out.empty()) throw ConfigError("empty " + what + " list");
  return out;
}

int run_check(const Common& c, int trials) {
  const ModelConfig cfg = load(c);
  if (cfg.particles > 6 || cfg.sites > 4)
    throw RangeError("check runs on small configurations only (N <= 6, M <= 4)");
  const SuiteReport rep = lemma_suite(cfg, cfg.seed, trials);
  for (const auto& chk : rep.checks)
    std::printf("%-36s %-4s value %.3e  threshold %.1e\n", chk.name.c_str(), chk.pass ? "ok" : "FAIL", chk.value,
                chk.threshold);
  std::printf("%s\n", rep.pass() ? "all checks passed" : "some checks FAILED");
  return rep.pass() ? ok : suite_failure;
}

int run_hartree(const Common& c, const std::string& out) {
  const ModelConfig cfg = load(c);
  const Model model = Model::build(cfg);
  const HartreeTrajectory traj = hartree_evolve(model, default_condensate(model.lattice), 0.0, cfg.t_final, cfg.dt);
  std::string csv = "t,norm,mu,energy_proxy\n";
  for (long m = 0; m <= traj.steps(); ++m) {
    const Condensate& s = traj.at_step(m);
    csv += fmt(s.time()) + "," + fmt(s.norm()) + "," + fmt(s.mu_value()) + "," + fmt(energy_proxy(model, s)) + "\n";
  }
  emit(csv, out);
  return ok;
}

struct EvolveOptions {
  std::string save, load, observable = "norm", rep = "occupation", evolution = "full", initial = "product", out;
  int every = 100;
  double epsilon = 0.1;
};

template <class Space>
int evolve_in(const ModelConfig& cfg, const Model& model, const Space& sp, const EvolveOptions& o) {
  using State = typename Space::state_type;
  const SiteFunction phi0 = default_condensate(model.lattice);
  State psi0 = initial_state(sp, phi0, parse_initial(o.initial, o.epsilon));
  if (!o.load.empty()) psi0 = snapshot_state<typename Space::state_type::rep_type>(read_snapshot(o.load), sp.shape(), sp.dim());
  const HartreeTrajectory traj = hartree_evolve(model, phi0, 0.0, cfg.t_final, cfg.dt);
  const Hamiltonians<Space> ham(sp, model);
  PiecesCache cache(model, traj);
  const int every = std::max(1, o.every);
  std::string csv;
  if (o.observable == "norm") {
    csv = "step,t,norm\n";
  } else if (o.observable == "weights") {
    csv = "step,t";
    for (int k = 0; k <= cfg.particles; ++k) csv += ",w" + std::to_string(k);
    csv += "\n";
  } else if (o.observable == "moments") {
    csv = "step,t";
    for (int a = 1; a <= std::min(cfg.moment_order, cfg.particles); ++a) csv += ",m" + std::to_string(a);
    csv += "\n";
  } else {
    throw ConfigError("observable must be norm, weights or moments");
  }
  auto observe = [&](long m, double t, const State& psi) {
    if (m % every != 0 && m != traj.steps()) return;
    csv += std::to_string(m) + "," + fmt(t);
    if (o.observable == "norm") {
      csv += "," + fmt(norm(psi));
    } else {
      const SiteFunction phit = site_normalized(model.lattice, traj.at_step(m).phi());
      SpectralWeights w;
      for (int k = 0; k <= cfg.particles; ++k) w.w.push_back(std::pow(norm(apply_Pk(sp, k, phit, psi)), 2));
      if (o.observable == "weights")
        for (double v : w.w) csv += "," + fmt(v);
      else
        for (int a = 1; a <= std::min(cfg.moment_order, cfg.particles); ++a) csv += "," + fmt(m_moment(w, a));
    }
    csv += "\n";
  };
  State final_state;
  if (o.evolution == "full")
    final_state = evolve_full(ham, psi0, 0.0, cfg.t_final, cfg.dt, observe).state;
  else if (o.evolution == "aux")
    final_state = evolve_aux(ham, cache, psi0, 0.0, cfg.t_final, observe).state;
  else
    throw ConfigError("evolution must be full or aux");
  emit(csv, o.out);
  if (!o.save.empty()) write_snapshot(o.save, final_state);
  return ok;
}

int run_evolve(const Common& c, const EvolveOptions& o) {
  const ModelConfig cfg = load(c);
  const Model model = Model::build(cfg);
  if (o.rep == "tensor") return evolve_in(cfg, model, TensorSpace(model.lattice, cfg.particles), o);
  if (o.rep == "occupation") return evolve_in(cfg, model, FockSpace(model.lattice, cfg.particles), o);
  throw ConfigError("representation must be tensor or occupation");
}

int run_correct(const Common& c, int order, double t, const std::string& out) {
  Common cc = c;
  RawConfig raw = load_config_file(cc.config);
  if (cc.seed >= 0) raw["seed"] = std::to_string(cc.seed);
  if (order > 0) raw["order"] = std::to_string(order);
  if (t > 0.0) raw["t_final"] = fmt(t);
  const ModelConfig cfg = validate_config(raw, RunKind::correction);
  const Model model = Model::build(cfg);
  const FockSpace sp(model.lattice, cfg.particles);
  const SiteFunction phi0 = default_condensate(model.lattice);
  const auto run = correction_run(model, sp, product_state(sp, phi0), phi0, cfg.order, cfg.t_final);
  const auto& e = run.errors.back();
  std::string csv = "order,t,err,corr_norm\n";
  csv += std::to_string(cfg.order) + "," + fmt(cfg.t_final) + "," + fmt(e.err) + "," + fmt(e.corr_norm) + "\n";
  csv += "n,k,term_norm\n";
  for (const auto& [n, k] : hierarchy_terms(cfg.order))
    csv += std::to_string(n) + "," + std::to_string(k) + "," + fmt(norm(run.hierarchy.term(n, k))) + "\n";
  emit(csv, out);
  return ok;
}

int run_moments(const Common& c, const std::string& initial, double eps, const std::string& out) {
  const ModelConfig cfg = load(c);
  const Model model = Model::build(cfg);
  const FockSpace sp(model.lattice, cfg.particles);
  const SiteFunction phi0 = default_condensate(model.lattice);
  const FockState psi0 = initial_state(sp, phi0, parse_initial(initial, eps));
  const A3Report rep = a3_report(sp, psi0, phi0, cfg.gamma, std::min(cfg.moment_order, cfg.particles));
  std::string csv = "k,weight\n";
  for (std::size_t k = 0; k < rep.weights.size(); ++k) csv += std::to_string(k) + "," + fmt(rep.weights[k]) + "\n";
  csv += "a,m_moment,n_moment,excitation_moment,c_a\n";
  for (const auto& r : rep.rows)
    csv += std::to_string(r.a) + "," + fmt(r.m_moment) + "," + fmt(r.n_moment) + "," + fmt(r.excitation_moment) + "," +
           fmt(r.c_a) + "\n";
  emit(csv, out);
  std::fprintf(stderr, "largest gamma with all c_a <= %.3g: %.6g\n", rep.cap, rep.gamma_max);
  return ok;
}

int run_sweep(const Common& c, const std::string& grid, const std::string& orders, const std::string& out, int jobs,
              bool timing) {
  const ModelConfig cfg = load(c, RunKind::correction);
  SweepOptions opt;
  std::string g = grid;
  if (g.rfind("N=", 0) == 0) g = g.substr(2);
  opt.particles = parse_int_list(g, "grid");
  opt.orders = parse_int_list(orders, "order");
  for (int a : opt.orders)
    if (a < 1) throw ConfigError("orders must be positive");
  opt.t = cfg.t_final;
  opt.jobs = jobs;
  opt.timing = timing;
  const SweepResult res = sweep_scaling(cfg, opt);
  emit(res.csv(), out);
  std::fprintf(stderr, "%s", res.summary().c_str());
  bool failed = false;
  for (const auto& r : res.rows)
    if (r.failed) {
      std::fprintf(stderr, "N=%d order %d failed: %s\n", r.particles, r.order, r.message.c_str());
      failed = true;
    }
  return failed ? suite_failure : ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lattice laboratory for Duhamel corrections to mean-field boson dynamics"};
  app.set_version_flag("--version", std::string("blab ") + blab::version + " (snapshot format " +
                                        blab::snapshot_format + ")");
  Common common;
  app.add_option("--seed", common.seed, "override the configuration seed");
  app.require_subcommand(1);

  auto* check = app.add_subcommand("check", "run the identity and inequality suite");
  int trials = 20;
  check->add_option("--config", common.config)->required();
  check->add_option("--trials", trials, "random (phi, psi) draws");

  auto* hartree = app.add_subcommand("hartree", "integrate the Hartree equation, CSV t,norm,mu,energy_proxy");
  std::string hartree_out;
  hartree->add_option("--config", common.config)->required();
  hartree->add_option("--out", hartree_out);

  auto* evolve = app.add_subcommand("evolve", "N-body evolution with periodic observables");
  EvolveOptions eo;
  evolve->add_option("--config", common.config)->required();
  evolve->add_option("--save", eo.save, "write the final state as a BLAB1 snapshot");
  evolve->add_option("--load", eo.load, "start from a BLAB1 snapshot");
  evolve->add_option("--observable", eo.observable, "norm, weights or moments");
  evolve->add_option("--every", eo.every, "report every K steps");
  evolve->add_option("--rep", eo.rep, "tensor or occupation");
  evolve->add_option("--evolution", eo.evolution, "full or aux");
  evolve->add_option("--initial", eo.initial, "product, one_excitation or mixed");
  evolve->add_option("--epsilon", eo.epsilon, "excitation admixture for the mixed state");
  evolve->add_option("--out", eo.out);

  auto* correct = app.add_subcommand("correct", "error of the order-a correction at time t");
  int order = 0;
  double tcorr = 0.0;
  std::string correct_out;
  correct->add_option("--config", common.config)->required();
  correct->add_option("--order", order);
  correct->add_option("--t", tcorr);
  correct->add_option("--out", correct_out);

  auto* moments = app.add_subcommand("moments", "spectral weights and moment constants of the initial state");
  std::string minitial = "product", mout;
  double meps = 0.1;
  moments->add_option("--config", common.config)->required();
  moments->add_option("--initial", minitial);
  moments->add_option("--epsilon", meps);
  moments->add_option("--out", mout);

  auto* sweep = app.add_subcommand("sweep", "correction-error scaling sweep over N");
  std::string grid = "N=4,6,8,10,12", orders = "1,2,3", sweep_out;
  int jobs = 1;
  bool no_timing = false;
  sweep->add_option("--config", common.config)->required();
  sweep->add_option("--grid", grid);
  sweep->add_option("--orders", orders);
  sweep->add_option("--out", sweep_out);
  sweep->add_option("--jobs", jobs);
  sweep->add_flag("--no-timing", no_timing, "write runtime_s = 0 for byte-reproducible output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return config_failure;
  }

  try {
    if (*check) return run_check(common, trials);
    if (*hartree) return run_hartree(common, hartree_out);
    if (*evolve) return run_evolve(common, eo);
    if (*correct) return run_correct(common, order, tcorr, correct_out);
    if (*moments) return run_moments(common, minitial, meps, mout);
    if (*sweep) return run_sweep(common, grid, orders, sweep_out, jobs, !no_timing);
  } catch (const blab::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return config_failure;
  } catch (const blab::ShapeError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return config_failure;
  } catch (const blab::RangeError& e) {
    std::cerr << "range error: " << e.what() << "\n";
    return range_failure;
  } catch (const blab::ResolutionError& e) {
    std::cerr << "resolution error: " << e.what() << "\n";
    return range_failure;
  } catch (const blab::IntegratorError& e) {
    std::cerr << "integrator failure: " << e.what() << "\n";
    return integrator_failure;
  } catch (const blab::Error& e) {
    std::cerr << "failure: " << e.what() << "\n";
    return suite_failure;
  }
  std::cerr << app.help();
  return config_failure;
}

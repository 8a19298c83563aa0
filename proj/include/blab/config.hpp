#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "blab/errors.hpp"
#include "blab/lattice.hpp"

namespace blab {

enum class InteractionProfile { bump, tophat, zero, tabulated };
enum class PotentialKind { none, harmonic, tabulated };

// What a configuration is validated for. Correction runs enforce the
// narrower (beta, gamma) window in which the correction hierarchy converges.
enum class RunKind { general, correction };

struct InteractionSpec {
  InteractionProfile profile = InteractionProfile::bump;
  double amplitude = 0.5;
  double radius = 2.0;
  // Radial samples (distance, value) for the tabulated profile; linear
  // interpolation, zero beyond the last sample.
  std::vector<std::pair<double, double>> samples;

  // Unscaled profile v(|x|).
  double evaluate(double r) const {
    switch (profile) {
      case InteractionProfile::zero:
        return 0.0;
      case InteractionProfile::tophat:
        return r <= radius ? amplitude : 0.0;
      case InteractionProfile::bump: {
        if (r >= radius) return 0.0;
        const double u = r / radius;
        return amplitude * std::exp(-1.0 / (1.0 - u * u));
      }
      case InteractionProfile::tabulated: {
        if (samples.empty() || r > samples.back().first) return 0.0;
        if (r <= samples.front().first) return samples.front().second;
        for (std::size_t i = 1; i < samples.size(); ++i) {
          if (r <= samples[i].first) {
            const auto [r0, v0] = samples[i - 1];
            const auto [r1, v1] = samples[i];
            return v0 + (v1 - v0) * (r - r0) / (r1 - r0);
          }
        }
        return 0.0;
      }
    }
    return 0.0;
  }

  // Radius beyond which the unscaled profile vanishes.
  double support() const {
    switch (profile) {
      case InteractionProfile::zero:
        return 0.0;
      case InteractionProfile::tabulated:
        return samples.empty() ? 0.0 : samples.back().first;
      default:
        return radius;
    }
  }

  friend bool operator==(const InteractionSpec&, const InteractionSpec&) = default;
};

struct PotentialSpec {
  PotentialKind kind = PotentialKind::none;
  // Harmonic: V(t, x) = strength * (1 + modulation_amplitude * sin(modulation_frequency * t)) * dist(x, centre)^2.
  double strength = 0.0;
  double modulation_amplitude = 0.0;
  double modulation_frequency = 0.0;
  // Tabulated: values[k][site] at times[k], linear in time, constant outside.
  std::vector<double> times;
  std::vector<std::vector<double>> values;

  friend bool operator==(const PotentialSpec&, const PotentialSpec&) = default;
};

struct ModelConfig {
  int dimension = 1;
  int sites_per_dim = 4;
  double torus_length = 4.0;
  int particles = 4;
  double beta = 0.0;
  double gamma = 1.0;
  InteractionSpec interaction;
  PotentialSpec potential;
  double t_final = 0.5;
  double dt = 5e-4;
  int order = 3;
  int moment_order = 4;
  std::uint64_t seed = 1;

  // Derived by validate_config.
  double spacing = 1.0;
  int sites = 4;
  long steps = 1000;

  Lattice lattice() const { return Lattice{dimension, sites_per_dim, torus_length}; }

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

using RawConfig = std::map<std::string, std::string>;

inline const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "dimension",         "sites_per_dim",         "torus_length",         "particles",
      "beta",              "gamma",                 "interaction.profile",  "interaction.amplitude",
      "interaction.radius", "potential.kind",       "potential.strength",   "t_final",
      "dt",                "order",                 "moment_order",         "seed"};
  return keys;
}

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double out = std::stod(v, &pos);
    if (pos != v.size() || !std::isfinite(out)) throw std::invalid_argument(v);
    return out;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': expected a real number, got '" + v + "'");
  }
}

inline long long parse_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long long out = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return out;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': expected an integer, got '" + v + "'");
  }
}

inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

// Flat key=value text; '#' starts a comment. Unknown or repeated keys are
// configuration errors.
inline RawConfig parse_config_text(const std::string& text) {
  RawConfig raw;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key=value");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    bool known = false;
    for (const auto& k : config_keys()) known = known || k == key;
    if (!known) throw ConfigError("unknown configuration key '" + key + "'");
    if (raw.count(key)) throw ConfigError("configuration key '" + key + "' given twice");
    raw[key] = value;
  }
  return raw;
}

inline RawConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open configuration file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

inline ModelConfig validate_config(const ModelConfig& in, RunKind kind = RunKind::general);

inline ModelConfig validate_config(const RawConfig& raw, RunKind kind = RunKind::general) {
  for (const auto& [k, v] : raw) {
    bool known = false;
    for (const auto& key : config_keys()) known = known || key == k;
    if (!known) throw ConfigError("unknown configuration key '" + k + "'");
  }
  ModelConfig c;
  auto get = [&raw](const char* key) -> const std::string* {
    auto it = raw.find(key);
    return it == raw.end() ? nullptr : &it->second;
  };
  if (auto v = get("dimension")) c.dimension = static_cast<int>(detail::parse_int("dimension", *v));
  if (auto v = get("sites_per_dim")) c.sites_per_dim = static_cast<int>(detail::parse_int("sites_per_dim", *v));
  c.torus_length = static_cast<double>(c.sites_per_dim);
  if (auto v = get("torus_length")) c.torus_length = detail::parse_double("torus_length", *v);
  if (auto v = get("particles")) c.particles = static_cast<int>(detail::parse_int("particles", *v));
  if (auto v = get("beta")) c.beta = detail::parse_double("beta", *v);
  if (auto v = get("gamma")) c.gamma = detail::parse_double("gamma", *v);
  if (auto v = get("interaction.profile")) {
    if (*v == "bump")
      c.interaction.profile = InteractionProfile::bump;
    else if (*v == "tophat")
      c.interaction.profile = InteractionProfile::tophat;
    else if (*v == "zero" || *v == "none")
      c.interaction.profile = InteractionProfile::zero;
    else
      throw ConfigError("interaction.profile must be bump, tophat or zero, got '" + *v + "'");
  }
  if (auto v = get("interaction.amplitude")) c.interaction.amplitude = detail::parse_double("interaction.amplitude", *v);
  if (auto v = get("interaction.radius")) c.interaction.radius = detail::parse_double("interaction.radius", *v);
  if (auto v = get("potential.kind")) {
    if (*v == "none")
      c.potential.kind = PotentialKind::none;
    else if (*v == "harmonic")
      c.potential.kind = PotentialKind::harmonic;
    else
      throw ConfigError("potential.kind must be none or harmonic, got '" + *v + "'");
  }
  if (auto v = get("potential.strength")) c.potential.strength = detail::parse_double("potential.strength", *v);
  if (auto v = get("t_final")) c.t_final = detail::parse_double("t_final", *v);
  if (auto v = get("dt")) c.dt = detail::parse_double("dt", *v);
  if (auto v = get("order")) c.order = static_cast<int>(detail::parse_int("order", *v));
  if (auto v = get("moment_order")) c.moment_order = static_cast<int>(detail::parse_int("moment_order", *v));
  if (auto v = get("seed")) {
    const long long s = detail::parse_int("seed", *v);
    if (s < 0) throw ConfigError("seed must be non-negative");
    c.seed = static_cast<std::uint64_t>(s);
  }
  return validate_config(c, kind);
}

inline ModelConfig validate_config(const ModelConfig& in, RunKind kind) {
  ModelConfig c = in;
  if (c.dimension != 1 && c.dimension != 2) throw ConfigError("dimension must be 1 or 2");
  if (c.sites_per_dim < 2) throw ConfigError("sites_per_dim must be at least 2");
  if (!(c.torus_length > 0.0) || !std::isfinite(c.torus_length)) throw ConfigError("torus_length must be positive");
  if (c.particles < 1) throw ConfigError("particles must be at least 1");
  if (!(c.dt > 0.0)) throw ConfigError("dt must be positive");
  if (!(c.t_final > 0.0)) throw ConfigError("t_final must be positive");
  if (c.order < 1) throw ConfigError("order must be at least 1");
  if (c.moment_order < 1) throw ConfigError("moment_order must be at least 1");

  const double d = c.dimension;
  if (!(c.beta >= 0.0 && c.beta < 1.0 / d))
    throw RangeError("beta = " + detail::format_double(c.beta) + " violates 0 <= beta < 1/d = " +
                     detail::format_double(1.0 / d));
  if (!(c.gamma > 0.0 && c.gamma <= 1.0))
    throw RangeError("gamma = " + detail::format_double(c.gamma) + " violates 0 < gamma <= 1");
  if (kind == RunKind::correction) {
    if (!(c.beta < 1.0 / (4.0 * d)))
      throw RangeError("beta = " + detail::format_double(c.beta) + " violates beta < 1/(4d) = " +
                       detail::format_double(1.0 / (4.0 * d)) + " required for correction runs");
    const double lower = (2.0 + d * c.beta) / 3.0;
    if (!(c.gamma > lower))
      throw RangeError("gamma = " + detail::format_double(c.gamma) + " violates gamma > (2 + d*beta)/3 = " +
                       detail::format_double(lower) + " required for correction runs");
  }

  const auto& ia = c.interaction;
  if ((ia.profile == InteractionProfile::bump || ia.profile == InteractionProfile::tophat) && !(ia.radius > 0.0))
    throw ConfigError("interaction.radius must be positive");
  for (std::size_t i = 1; i < ia.samples.size(); ++i)
    if (!(ia.samples[i].first > ia.samples[i - 1].first))
      throw ConfigError("tabulated interaction radii must be strictly increasing");

  c.spacing = c.torus_length / c.sites_per_dim;
  c.sites = c.dimension == 1 ? c.sites_per_dim : c.sites_per_dim * c.sites_per_dim;

  if (c.beta > 0.0 && ia.profile != InteractionProfile::zero) {
    const double scaled = std::pow(static_cast<double>(c.particles), -c.beta) * ia.support();
    if (scaled < 2.0 * c.spacing)
      throw ResolutionError("scaled interaction support N^-beta R = " + detail::format_double(scaled) +
                            " spans fewer than 2 lattice spacings (h = " + detail::format_double(c.spacing) + ")");
  }

  const double ratio = c.t_final / c.dt;
  const long steps = std::lround(ratio);
  if (steps < 1 || std::abs(steps * c.dt - c.t_final) > 1e-9 * std::max(1.0, c.t_final))
    throw ConfigError("dt = " + detail::format_double(c.dt) + " does not divide t_final = " +
                      detail::format_double(c.t_final));
  c.steps = steps;

  const auto& pot = c.potential;
  if (pot.kind == PotentialKind::tabulated) {
    if (pot.times.empty() || pot.times.size() != pot.values.size())
      throw ConfigError("tabulated potential needs one site table per time sample");
    for (const auto& row : pot.values)
      if (static_cast<int>(row.size()) != c.sites) throw ConfigError("tabulated potential row has wrong site count");
  }
  return c;
}

inline RawConfig to_raw(const ModelConfig& c) {
  RawConfig raw;
  raw["dimension"] = std::to_string(c.dimension);
  raw["sites_per_dim"] = std::to_string(c.sites_per_dim);
  raw["torus_length"] = detail::format_double(c.torus_length);
  raw["particles"] = std::to_string(c.particles);
  raw["beta"] = detail::format_double(c.beta);
  raw["gamma"] = detail::format_double(c.gamma);
  switch (c.interaction.profile) {
    case InteractionProfile::bump:
      raw["interaction.profile"] = "bump";
      break;
    case InteractionProfile::tophat:
      raw["interaction.profile"] = "tophat";
      break;
    default:
      raw["interaction.profile"] = "zero";
      break;
  }
  raw["interaction.amplitude"] = detail::format_double(c.interaction.amplitude);
  raw["interaction.radius"] = detail::format_double(c.interaction.radius);
  raw["potential.kind"] = c.potential.kind == PotentialKind::harmonic ? "harmonic" : "none";
  raw["potential.strength"] = detail::format_double(c.potential.strength);
  raw["t_final"] = detail::format_double(c.t_final);
  raw["dt"] = detail::format_double(c.dt);
  raw["order"] = std::to_string(c.order);
  raw["moment_order"] = std::to_string(c.moment_order);
  raw["seed"] = std::to_string(c.seed);
  return raw;
}

inline std::string to_text(const RawConfig& raw) {
  std::string out;
  for (const auto& key : config_keys()) {
    auto it = raw.find(key);
    if (it != raw.end()) out += key + " = " + it->second + "\n";
  }
  return out;
}

}  // namespace blab

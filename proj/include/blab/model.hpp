#pragma once

#include <cmath>
#include <vector>

#include "blab/config.hpp"
#include "blab/errors.hpp"
#include "blab/lattice.hpp"
#include "blab/operators.hpp"

namespace blab {

// w(r) = N^{d beta} v(N^beta |r|) at every minimum-image displacement.
inline PairTable sample_interaction(const ModelConfig& c) {
  const Lattice lat = c.lattice();
  const int m = lat.sites();
  const double n = c.particles;
  if (c.beta > 0.0 && c.interaction.profile != InteractionProfile::zero &&
      std::pow(n, -c.beta) * c.interaction.support() < 2.0 * lat.spacing())
    throw ResolutionError("scaled interaction support spans fewer than 2 lattice spacings");
  const double amp = std::pow(n, c.dimension * c.beta);
  const double stretch = std::pow(n, c.beta);
  std::vector<double> w(m, 0.0);
  for (int disp = 0; disp < m; ++disp) w[disp] = amp * c.interaction.evaluate(stretch * lat.distance(disp, 0));
  return PairTable(lat, std::move(w));
}

// -Delta: periodic nearest-neighbour second difference scaled by 1/h^2.
inline OneBodyOperator laplacian(const Lattice& lat) {
  const int m = lat.sites();
  const double inv_h2 = 1.0 / (lat.spacing() * lat.spacing());
  std::vector<cplx> a(static_cast<std::size_t>(m) * m, cplx{0.0, 0.0});
  for (int r = 0; r < m; ++r) {
    const auto c = lat.coords(r);
    for (int k = 0; k < lat.dim; ++k) {
      a[static_cast<std::size_t>(r) * m + r] += 2.0 * inv_h2;
      for (int sign : {-1, 1}) {
        auto nb = c;
        nb[k] += sign;
        a[static_cast<std::size_t>(r) * m + lat.site(nb)] -= inv_h2;
      }
    }
  }
  return OneBodyOperator(m, std::move(a), true);
}

inline OneBodyOperator laplacian(const ModelConfig& c) { return laplacian(c.lattice()); }

// V^ext(t, x) on the lattice sites.
class ExternalPotential {
 public:
  ExternalPotential() = default;
  ExternalPotential(Lattice lat, PotentialSpec spec) : lattice_(lat), spec_(std::move(spec)) {
    const int m = lattice_.sites();
    dist2_.assign(m, 0.0);
    const double half = 0.5 * lattice_.torus_length;
    for (int r = 0; r < m; ++r) {
      const auto c = lattice_.coords(r);
      double acc = 0.0;
      for (int k = 0; k < lattice_.dim; ++k) {
        double dx = c[k] * lattice_.spacing() - half;
        dx -= lattice_.torus_length * std::round(dx / lattice_.torus_length);
        acc += dx * dx;
      }
      dist2_[r] = acc;
    }
  }

  bool is_zero() const {
    if (spec_.kind == PotentialKind::none) return true;
    if (spec_.kind == PotentialKind::harmonic) return spec_.strength == 0.0;
    for (const auto& row : spec_.values)
      for (double v : row)
        if (v != 0.0) return false;
    return true;
  }

  bool time_dependent() const {
    if (spec_.kind == PotentialKind::harmonic)
      return spec_.modulation_amplitude != 0.0 && spec_.modulation_frequency != 0.0;
    return spec_.kind == PotentialKind::tabulated && spec_.times.size() > 1;
  }

  std::vector<double> values(double t) const {
    const int m = lattice_.sites();
    std::vector<double> v(m, 0.0);
    switch (spec_.kind) {
      case PotentialKind::none:
        break;
      case PotentialKind::harmonic: {
        const double omega =
            spec_.strength * (1.0 + spec_.modulation_amplitude * std::sin(spec_.modulation_frequency * t));
        for (int r = 0; r < m; ++r) v[r] = omega * dist2_[r];
        break;
      }
      case PotentialKind::tabulated: {
        const auto& ts = spec_.times;
        if (t <= ts.front()) return spec_.values.front();
        if (t >= ts.back()) return spec_.values.back();
        std::size_t k = 1;
        while (ts[k] < t) ++k;
        const double u = (t - ts[k - 1]) / (ts[k] - ts[k - 1]);
        for (int r = 0; r < m; ++r) v[r] = (1.0 - u) * spec_.values[k - 1][r] + u * spec_.values[k][r];
        break;
      }
    }
    return v;
  }

 private:
  Lattice lattice_;
  PotentialSpec spec_;
  std::vector<double> dist2_;
};

// Everything the dynamical modules need from a validated configuration.
struct Model {
  ModelConfig config;
  Lattice lattice;
  OneBodyOperator minus_laplacian;
  PairTable interaction;
  ExternalPotential potential;

  static Model build(const ModelConfig& c) {
    Model m;
    m.config = c;
    m.lattice = c.lattice();
    m.minus_laplacian = laplacian(m.lattice);
    m.interaction = sample_interaction(c);
    m.potential = ExternalPotential(m.lattice, c.potential);
    return m;
  }

  int particles() const { return config.particles; }
  int sites() const { return lattice.sites(); }

  // 1/(N-1), zero for a single particle.
  double pair_prefactor() const { return config.particles > 1 ? 1.0 / (config.particles - 1) : 0.0; }

  // -Delta + V^ext(t).
  OneBodyOperator one_body(double t) const {
    OneBodyOperator h = minus_laplacian;
    if (!potential.is_zero()) h += OneBodyOperator::diagonal(potential.values(t));
    return h;
  }

  bool interacting() const { return !interaction.is_zero() && config.particles > 1; }
};

// Same configuration at a different particle number, revalidated.
inline ModelConfig with_particles(const ModelConfig& c, int n, RunKind kind = RunKind::general) {
  ModelConfig out = c;
  out.particles = n;
  return validate_config(out, kind);
}

}  // namespace blab

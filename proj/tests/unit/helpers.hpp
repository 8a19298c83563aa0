#pragma once

#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "blab/blab.hpp"

namespace blab::testing {

inline ModelConfig small_config(int sites = 3, int particles = 3, double coupling = 0.5) {
  ModelConfig c;
  c.sites_per_dim = sites;
  c.torus_length = sites;
  c.particles = particles;
  c.interaction.amplitude = coupling;
  c.t_final = 0.2;
  c.dt = 1e-3;
  c.moment_order = std::min(particles, 3);
  return validate_config(c);
}

inline ModelConfig free_config(int sites = 3, int particles = 3) {
  ModelConfig c = small_config(sites, particles);
  c.interaction.profile = InteractionProfile::zero;
  return validate_config(c);
}

template <class Rep>
double distance(const StateVector<Rep>& a, const StateVector<Rep>& b) {
  return norm(a - b);
}

inline double site_distance(const SiteFunction& a, const SiteFunction& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc = std::max(acc, std::abs(a[i] - b[i]));
  return acc;
}

}  // namespace blab::testing

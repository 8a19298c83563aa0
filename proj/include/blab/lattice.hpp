#pragma once

#include <array>
#include <cmath>
#include <cstdlib>
#include <string>

#include "blab/errors.hpp"

namespace blab {

// Periodic lattice of L sites per dimension on a torus of side length
// `torus_length`. Sites are numbered x + L*y in two dimensions.
struct Lattice {
  int dim = 1;
  int sites_per_dim = 2;
  double torus_length = 2.0;

  double spacing() const { return torus_length / sites_per_dim; }
  int sites() const { return dim == 1 ? sites_per_dim : sites_per_dim * sites_per_dim; }

  // Weight h^d carried by each coordinate in lattice inner products.
  double cell_volume() const { return std::pow(spacing(), dim); }

  std::array<int, 2> coords(int site) const {
    if (dim == 1) return {site, 0};
    return {site % sites_per_dim, site / sites_per_dim};
  }

  int site(std::array<int, 2> c) const {
    auto wrap = [this](int v) { return ((v % sites_per_dim) + sites_per_dim) % sites_per_dim; };
    if (dim == 1) return wrap(c[0]);
    return wrap(c[0]) + sites_per_dim * wrap(c[1]);
  }

  // Minimum-image integer displacement r - s per dimension, each component in
  // [-L/2, L/2].
  std::array<int, 2> displacement(int r, int s) const {
    auto cr = coords(r), cs = coords(s);
    std::array<int, 2> out{0, 0};
    for (int k = 0; k < dim; ++k) {
      int v = ((cr[k] - cs[k]) % sites_per_dim + sites_per_dim) % sites_per_dim;
      if (2 * v > sites_per_dim) v -= sites_per_dim;
      out[k] = v;
    }
    return out;
  }

  // Physical minimum-image distance between two sites.
  double distance(int r, int s) const {
    auto d = displacement(r, s);
    double acc = 0.0;
    for (int k = 0; k < dim; ++k) acc += std::abs(d[k]) * std::abs(d[k]);
    return spacing() * std::sqrt(acc);
  }

  // Site index encoding the displacement (r - s) mod L per dimension.
  int displacement_index(int r, int s) const {
    auto cr = coords(r), cs = coords(s);
    return site({cr[0] - cs[0], cr[1] - cs[1]});
  }

  friend bool operator==(const Lattice&, const Lattice&) = default;
};

}  // namespace blab

#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "blab/errors.hpp"
#include "blab/state.hpp"

namespace blab {

// BLAB1 layout, all fields little-endian:
//   magic "BLAB1" | d u32 | L u32 | N u32 | h f64 | tag u8 | (re f64, im f64) * count
inline constexpr char snapshot_magic[5] = {'B', 'L', 'A', 'B', '1'};
inline constexpr std::uint8_t snapshot_tag_tensor = 0;
inline constexpr std::uint8_t snapshot_tag_occupation = 1;

template <class Rep>
constexpr std::uint8_t snapshot_tag() {
  return std::is_same_v<Rep, TensorRep> ? snapshot_tag_tensor : snapshot_tag_occupation;
}

struct Snapshot {
  int dimension = 1;
  int sites_per_dim = 0;
  int particles = 0;
  double spacing = 0.0;
  std::uint8_t tag = 0;
  std::vector<cplx> amplitudes;

  Lattice lattice() const { return Lattice{dimension, sites_per_dim, spacing * sites_per_dim}; }
};

namespace detail {

inline void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
inline void put_f64(std::string& out, double d) {
  std::uint64_t v;
  std::memcpy(&v, &d, 8);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
inline std::uint32_t get_u32(const std::string& in, std::size_t& pos) {
  if (pos + 4 > in.size()) throw ShapeError("truncated snapshot");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(in[pos + i])) << (8 * i);
  pos += 4;
  return v;
}
inline double get_f64(const std::string& in, std::size_t& pos) {
  if (pos + 8 > in.size()) throw ShapeError("truncated snapshot");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[pos + i])) << (8 * i);
  pos += 8;
  double d;
  std::memcpy(&d, &v, 8);
  return d;
}

}  // namespace detail

template <class Rep>
std::string encode_snapshot(const StateVector<Rep>& psi) {
  const StateShape& sh = psi.shape();
  std::string out(snapshot_magic, snapshot_magic + 5);
  detail::put_u32(out, static_cast<std::uint32_t>(sh.lattice.dim));
  detail::put_u32(out, static_cast<std::uint32_t>(sh.lattice.sites_per_dim));
  detail::put_u32(out, static_cast<std::uint32_t>(sh.particles));
  detail::put_f64(out, sh.lattice.spacing());
  out.push_back(static_cast<char>(snapshot_tag<Rep>()));
  for (const auto& a : psi.amplitudes()) {
    detail::put_f64(out, a.real());
    detail::put_f64(out, a.imag());
  }
  return out;
}

inline Snapshot decode_snapshot(const std::string& in) {
  if (in.size() < 5 || std::memcmp(in.data(), snapshot_magic, 5) != 0) throw ShapeError("not a BLAB1 snapshot");
  std::size_t pos = 5;
  Snapshot s;
  s.dimension = static_cast<int>(detail::get_u32(in, pos));
  s.sites_per_dim = static_cast<int>(detail::get_u32(in, pos));
  s.particles = static_cast<int>(detail::get_u32(in, pos));
  s.spacing = detail::get_f64(in, pos);
  if (pos >= in.size()) throw ShapeError("truncated snapshot");
  s.tag = static_cast<std::uint8_t>(in[pos++]);
  if (s.tag > 1) throw ShapeError("unknown snapshot representation tag");
  if ((in.size() - pos) % 16 != 0) throw ShapeError("snapshot amplitude block is not a whole number of pairs");
  while (pos < in.size()) {
    const double re = detail::get_f64(in, pos);
    const double im = detail::get_f64(in, pos);
    s.amplitudes.emplace_back(re, im);
  }
  return s;
}

template <class Rep>
void write_snapshot(const std::string& path, const StateVector<Rep>& psi) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write snapshot '" + path + "'");
  const std::string bytes = encode_snapshot(psi);
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

inline Snapshot read_snapshot(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open snapshot '" + path + "'");
  std::string bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return decode_snapshot(bytes);
}

// Rebuild a state of the expected representation and shape.
template <class Rep>
StateVector<Rep> snapshot_state(const Snapshot& s, const StateShape& expected, std::size_t dim) {
  if (s.tag != snapshot_tag<Rep>()) throw ShapeError("snapshot holds a different representation");
  const Lattice lat = s.lattice();
  if (lat.dim != expected.lattice.dim || lat.sites_per_dim != expected.lattice.sites_per_dim ||
      s.particles != expected.particles ||
      std::abs(s.spacing - expected.lattice.spacing()) > 1e-12 * expected.lattice.spacing())
    throw ShapeError("snapshot shape does not match the configuration");
  if (s.amplitudes.size() != dim) throw ShapeError("snapshot amplitude count does not match the space");
  return StateVector<Rep>(expected, s.amplitudes);
}

}  // namespace blab

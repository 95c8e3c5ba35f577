// Reference implementations and random generators shared by the unit and acceptance tests.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "beamlearn/array_codebook.hpp"
#include "beamlearn/channel.hpp"

namespace testsupport {

using beamlearn::ArrayGeometry;
using beamlearn::Beam;
using beamlearn::ChannelRealization;
using beamlearn::PointingDirection;
using cplx = std::complex<double>;

inline double deg2rad(double d) { return d * std::numbers::pi / 180.0; }

// Element-by-element steering vector straight from the array definition.
inline std::vector<cplx> naive_steering(const ArrayGeometry& g, const PointingDirection& d) {
  const int n = g.n_x * g.n_y;
  std::vector<cplx> v(static_cast<std::size_t>(n), cplx{0.0, 0.0});
  if (d.elevation_deg >= 90.0) return v;
  const double st = std::sin(deg2rad(d.elevation_deg));
  const double ox = 2.0 * std::numbers::pi * g.spacing_x * st * std::cos(deg2rad(d.azimuth_deg));
  const double oy = 2.0 * std::numbers::pi * g.spacing_y * st * std::sin(deg2rad(d.azimuth_deg));
  for (int iy = 0; iy < g.n_y; ++iy) {
    for (int ix = 0; ix < g.n_x; ++ix) {
      v[static_cast<std::size_t>(iy * g.n_x + ix)] =
          std::exp(cplx{0.0, ix * ox + iy * oy}) / std::sqrt(static_cast<double>(n));
    }
  }
  return v;
}

inline cplx naive_inner(const std::vector<cplx>& u, const std::vector<cplx>& v) {
  cplx acc{0.0, 0.0};
  for (std::size_t i = 0; i < u.size(); ++i) acc += std::conj(u[i]) * v[i];
  return acc;
}

inline double naive_gain(const ArrayGeometry& g, const PointingDirection& beam,
                         const PointingDirection& eval) {
  return std::norm(naive_inner(naive_steering(g, beam), naive_steering(g, eval))) * g.n_x * g.n_y;
}

inline PointingDirection random_front_direction(std::mt19937_64& rng, double max_elevation = 89.0) {
  std::uniform_real_distribution<double> az(-179.9, 180.0);
  std::uniform_real_distribution<double> el(0.0, max_elevation);
  return {az(rng), el(rng)};
}

inline ChannelRealization random_realization(std::mt19937_64& rng, int n_paths,
                                             double max_elevation = 60.0) {
  std::uniform_real_distribution<double> amp(1e-6, 1e-5);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  std::uniform_real_distribution<double> delay(0.0, 20e-9);
  ChannelRealization ch;
  for (int k = 0; k < n_paths; ++k) {
    beamlearn::PathComponent p;
    p.gain = std::polar(amp(rng), phase(rng));
    p.delay_s = delay(rng);
    p.aod = random_front_direction(rng, max_elevation);
    p.aoa = random_front_direction(rng, max_elevation);
    ch.paths.push_back(p);
  }
  std::sort(ch.paths.begin(), ch.paths.end(),
            [](const auto& a, const auto& b) { return a.delay_s < b.delay_s; });
  return ch;
}

// Gain in dB relative to peak where beams a and b (same elevation) are equally strong on
// the azimuth arc running forward from a to b.
inline double crossover_db(const ArrayGeometry& g, const Beam& a, const Beam& b) {
  const double el = a.direction.elevation_deg;
  double span = std::fmod(b.direction.azimuth_deg - a.direction.azimuth_deg + 720.0, 360.0);
  double lo = 0.0;
  double hi = span;
  auto diff = [&](double off) {
    const PointingDirection d{a.direction.azimuth_deg + off, el};
    return beamlearn::beam_power_gain(g, a.direction, d) - beamlearn::beam_power_gain(g, b.direction, d);
  };
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (diff(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const PointingDirection cross{a.direction.azimuth_deg + 0.5 * (lo + hi), el};
  return 10.0 * std::log10(beamlearn::beam_power_gain(g, a.direction, cross) / (g.n_x * g.n_y));
}

}  // namespace testsupport

#include "beamlearn/array_codebook.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

namespace beamlearn {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;
constexpr double kScanStepDeg = 0.05;
constexpr double kBisectionTolDeg = 1e-4;
constexpr double kSearchLimitDeg = 90.0;

struct Phases {
  double omega_x;
  double omega_y;
};

Phases spatial_phases(const ArrayGeometry& geom, const PointingDirection& dir) {
  const double st = std::sin(dir.elevation_deg * kDeg);
  const double az = dir.azimuth_deg * kDeg;
  return {2.0 * std::numbers::pi * geom.spacing_x * st * std::cos(az),
          2.0 * std::numbers::pi * geom.spacing_y * st * std::sin(az)};
}

cplx phase_sum(int n, double delta) {
  cplx acc{0.0, 0.0};
  for (int k = 0; k < n; ++k) acc += std::polar(1.0, k * delta);
  return acc;
}

double normalized_gain(const ArrayGeometry& geom, const PointingDirection& beam,
                       const PointingDirection& eval) {
  return beam_power_gain(geom, beam, eval) / geom.element_count();
}

// Finds the first offset t in (lo, hi) where f(t) drops below zero, assuming f(lo) >= 0.
// Returns NaN when the scan reaches hi without a sign change.
template <typename F>
double first_drop(F&& f, double lo, double hi) {
  double prev = lo;
  for (double t = lo + kScanStepDeg;; t += kScanStepDeg) {
    const bool last = t >= hi;
    const double probe = last ? hi : t;
    if (f(probe) < 0.0) {
      double a = prev;
      double b = probe;
      while (b - a > kBisectionTolDeg) {
        const double mid = 0.5 * (a + b);
        if (f(mid) < 0.0) {
          b = mid;
        } else {
          a = mid;
        }
      }
      return 0.5 * (a + b);
    }
    if (last) break;
    prev = probe;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

// Offset at which a cut leaves the visible region (elevation reaches 90).
double visible_edge(const PointingDirection& dir, CutAxis axis, int side) {
  const bool polar_cut = axis == CutAxis::elevation || dir.elevation_deg == 0.0;
  if (!polar_cut) return std::numeric_limits<double>::infinity();
  return side > 0 ? 90.0 - dir.elevation_deg : 90.0 + dir.elevation_deg;
}

struct SideResult {
  double offset;
  bool truncated;
  bool found;
};

SideResult half_power_side(const ArrayGeometry& geom, const PointingDirection& beam, CutAxis axis,
                           int side) {
  const double edge = visible_edge(beam, axis, side);
  const double limit = std::min(kSearchLimitDeg, edge);
  // Stay strictly inside the visible region so the element cutoff is not
  // mistaken for a lobe crossing.
  const double hi = edge <= kSearchLimitDeg ? edge - 1e-9 : limit;
  auto f = [&](double t) {
    return normalized_gain(geom, beam, along_cut(beam, axis, side * t)) - 0.5;
  };
  const double t = first_drop(f, 0.0, hi);
  if (!std::isnan(t)) return {t, false, true};
  if (edge <= kSearchLimitDeg) return {edge, true, true};
  return {0.0, false, false};
}

Beam make_beam(const ArrayGeometry& geom, const PointingDirection& dir, int tier) {
  Beam b;
  b.direction = normalized(dir);
  b.az_beamwidth_deg = half_power_beamwidth(geom, b.direction, CutAxis::azimuth);
  b.el_beamwidth_deg = half_power_beamwidth(geom, b.direction, CutAxis::elevation);
  b.tier = tier;
  return b;
}

void sweep_azimuth(const ArrayGeometry& geom, double theta, int tier, std::vector<Beam>& out) {
  const double back0 = half_power_offsets(geom, {0.0, theta}, CutAxis::azimuth).lower_deg;
  std::vector<double> positions{0.0};
  for (;;) {
    const double p = positions.back();
    const double pc = p + half_power_offsets(geom, {p, theta}, CutAxis::azimuth).upper_deg;
    if (pc >= 360.0 - back0) break;
    const PointingDirection crossing{pc, theta};
    auto f = [&](double q) { return normalized_gain(geom, {q, theta}, crossing) - 0.5; };
    const double q = first_drop(f, pc, pc + kSearchLimitDeg);
    if (std::isnan(q)) {
      throw BeamwidthError("azimuth sweep found no half-power crossing at elevation " +
                           std::to_string(theta));
    }
    if (q >= 360.0) break;
    positions.push_back(q);
  }
  for (double p : positions) out.push_back(make_beam(geom, {p, theta}, tier));
}

}  // namespace

void ArrayGeometry::validate() const {
  if (n_x < 1 || n_y < 1) throw std::invalid_argument("array dimensions must be >= 1");
  if (!(spacing_x > 0.0) || !(spacing_y > 0.0)) {
    throw std::invalid_argument("element spacing must be positive");
  }
}

PointingDirection normalized(PointingDirection d) {
  if (d.elevation_deg < 0.0) {
    d.elevation_deg = -d.elevation_deg;
    d.azimuth_deg += 180.0;
  }
  double az = std::fmod(d.azimuth_deg, 360.0);
  if (az <= -180.0) az += 360.0;
  if (az > 180.0) az -= 360.0;
  d.azimuth_deg = az;
  return d;
}

double angular_distance_deg(const PointingDirection& a, const PointingDirection& b) {
  auto unit = [](const PointingDirection& d) {
    const double st = std::sin(d.elevation_deg * kDeg);
    return std::array<double, 3>{st * std::cos(d.azimuth_deg * kDeg),
                                 st * std::sin(d.azimuth_deg * kDeg),
                                 std::cos(d.elevation_deg * kDeg)};
  };
  const auto u = unit(a);
  const auto v = unit(b);
  const double dot = std::clamp(u[0] * v[0] + u[1] * v[1] + u[2] * v[2], -1.0, 1.0);
  return std::acos(dot) / kDeg;
}

double element_gain(ElementPattern pattern, const PointingDirection& dir) {
  if (!(dir.elevation_deg < 90.0)) return 0.0;
  switch (pattern) {
    case ElementPattern::front_hemisphere:
      return 1.0;
    case ElementPattern::cosine:
      return std::cos(dir.elevation_deg * kDeg);
  }
  return 0.0;
}

std::vector<cplx> steering_vector(const ArrayGeometry& geom, const PointingDirection& dir) {
  const int n = geom.element_count();
  std::vector<cplx> a(static_cast<std::size_t>(n), cplx{0.0, 0.0});
  const double g = element_gain(geom.element, dir);
  if (g == 0.0) return a;
  const Phases ph = spatial_phases(geom, dir);
  const double scale = g / std::sqrt(static_cast<double>(n));
  for (int iy = 0; iy < geom.n_y; ++iy) {
    for (int ix = 0; ix < geom.n_x; ++ix) {
      a[static_cast<std::size_t>(iy * geom.n_x + ix)] =
          std::polar(scale, iy * ph.omega_y + ix * ph.omega_x);
    }
  }
  return a;
}

cplx array_response(const ArrayGeometry& geom, const PointingDirection& beam_dir,
                    const PointingDirection& eval_dir) {
  const double gw = element_gain(geom.element, beam_dir);
  const double ga = element_gain(geom.element, eval_dir);
  if (gw == 0.0 || ga == 0.0) return {0.0, 0.0};
  const Phases pw = spatial_phases(geom, beam_dir);
  const Phases pa = spatial_phases(geom, eval_dir);
  const cplx sx = phase_sum(geom.n_x, pa.omega_x - pw.omega_x);
  const cplx sy = phase_sum(geom.n_y, pa.omega_y - pw.omega_y);
  return gw * ga / geom.element_count() * sx * sy;
}

double beam_power_gain(const ArrayGeometry& geom, const PointingDirection& beam_dir,
                       const PointingDirection& eval_dir) {
  return std::norm(array_response(geom, beam_dir, eval_dir)) * geom.element_count();
}

PointingDirection along_cut(const PointingDirection& dir, CutAxis axis, double offset_deg) {
  if (axis == CutAxis::elevation) {
    return normalized({dir.azimuth_deg, dir.elevation_deg + offset_deg});
  }
  if (dir.elevation_deg == 0.0) {
    return normalized({dir.azimuth_deg + 90.0, offset_deg});
  }
  return normalized({dir.azimuth_deg + offset_deg, dir.elevation_deg});
}

HalfPowerOffsets half_power_offsets(const ArrayGeometry& geom, const PointingDirection& beam_dir,
                                    CutAxis axis) {
  if (!(beam_dir.elevation_deg < 90.0)) {
    throw BeamwidthError("beam direction lies outside the front hemisphere");
  }
  const SideResult up = half_power_side(geom, beam_dir, axis, +1);
  const SideResult down = half_power_side(geom, beam_dir, axis, -1);
  if (!up.found || !down.found || (up.truncated && down.truncated)) {
    throw BeamwidthError("no half-power crossing within 90 degrees of the beam direction");
  }
  return {down.offset, up.offset, down.truncated, up.truncated};
}

double half_power_beamwidth(const ArrayGeometry& geom, const PointingDirection& beam_dir,
                            CutAxis axis) {
  return half_power_offsets(geom, beam_dir, axis).width();
}

Codebook generate_codebook(const ArrayGeometry& geom) {
  geom.validate();
  if (geom.n_x < 2 || geom.n_y < 2) {
    throw std::invalid_argument("codebook generation needs at least 2 elements per axis");
  }
  Codebook cb;
  cb.geometry = geom;
  cb.beams.push_back(make_beam(geom, {0.0, 0.0}, 0));

  double prev_theta = 0.0;
  for (int tier = 1;; ++tier) {
    const HalfPowerOffsets off = half_power_offsets(geom, {0.0, prev_theta}, CutAxis::elevation);
    if (off.upper_truncated) break;
    const double theta_c = prev_theta + off.upper_deg;
    if (theta_c >= 90.0) break;
    const PointingDirection crossing{0.0, theta_c};
    auto f = [&](double th) { return normalized_gain(geom, {0.0, th}, crossing) - 0.5; };
    const double theta = first_drop(f, theta_c, 90.0 - 1e-9);
    if (std::isnan(theta) || theta >= 90.0) break;
    sweep_azimuth(geom, theta, tier, cb.beams);
    prev_theta = theta;
  }
  return cb;
}

void write_codebook(std::ostream& os, const Codebook& cb) {
  const auto old_precision = os.precision(17);
  os << "# index\tazimuth_deg\televation_deg\taz_beamwidth_deg\tel_beamwidth_deg\ttier\n";
  for (std::size_t i = 0; i < cb.beams.size(); ++i) {
    const Beam& b = cb.beams[i];
    os << i << '\t' << b.direction.azimuth_deg << '\t' << b.direction.elevation_deg << '\t'
       << b.az_beamwidth_deg << '\t' << b.el_beamwidth_deg << '\t' << b.tier << '\n';
  }
  os.precision(old_precision);
}

Codebook read_codebook(std::istream& is, const ArrayGeometry& geom) {
  Codebook cb;
  cb.geometry = geom;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::size_t index = 0;
    Beam b;
    if (!(ls >> index >> b.direction.azimuth_deg >> b.direction.elevation_deg >>
          b.az_beamwidth_deg >> b.el_beamwidth_deg >> b.tier)) {
      throw std::runtime_error("malformed codebook row: " + line);
    }
    if (index != cb.beams.size()) throw std::runtime_error("codebook rows out of order");
    cb.beams.push_back(b);
  }
  return cb;
}

}  // namespace beamlearn

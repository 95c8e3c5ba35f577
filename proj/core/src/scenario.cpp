#include "beamlearn/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "beamlearn/seeding.hpp"

namespace beamlearn {

namespace {

constexpr double kSpeedOfLight = 299792458.0;
constexpr double kRad = 180.0 / std::numbers::pi;
constexpr double kLayoutMarginM = 20.0;
constexpr double kWarmupM = 200.0;

struct Vec3 {
  double x, y, z;
};

Vec3 operator-(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
Vec3 operator+(const Vec3& a, const Vec3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
Vec3 operator*(double s, const Vec3& a) { return {s * a.x, s * a.y, s * a.z}; }
double norm(const Vec3& a) { return std::sqrt(a.x * a.x + a.y * a.y + a.z * a.z); }

PointingDirection local_direction(double lx, double ly, double lz) {
  const double r = std::sqrt(lx * lx + ly * ly + lz * lz);
  const double theta = std::acos(std::clamp(lz / r, -1.0, 1.0)) * kRad;
  const double phi = (lx == 0.0 && ly == 0.0) ? 0.0 : std::atan2(ly, lx) * kRad;
  return normalized({phi, theta});
}

// Base station array: normal along +x, in-plane axes +y and +z.
PointingDirection bs_direction(const Vec3& v) { return local_direction(v.y, v.z, v.x); }

// Mobile array: normal along -x, in-plane axes -y and +z.
PointingDirection mu_direction(const Vec3& v) { return local_direction(-v.y, v.z, -v.x); }

// Slab test of segment p0 -> p1 against an axis-aligned box.
bool segment_hits_box(const Vec3& p0, const Vec3& p1, const Vec3& lo, const Vec3& hi) {
  double t0 = 0.0;
  double t1 = 1.0;
  const double origin[3] = {p0.x, p0.y, p0.z};
  const double delta[3] = {p1.x - p0.x, p1.y - p0.y, p1.z - p0.z};
  const double bmin[3] = {lo.x, lo.y, lo.z};
  const double bmax[3] = {hi.x, hi.y, hi.z};
  for (int a = 0; a < 3; ++a) {
    if (std::abs(delta[a]) < 1e-15) {
      if (origin[a] < bmin[a] || origin[a] > bmax[a]) return false;
      continue;
    }
    double ta = (bmin[a] - origin[a]) / delta[a];
    double tb = (bmax[a] - origin[a]) / delta[a];
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
    if (t0 > t1) return false;
  }
  return true;
}

double db_to_amplitude(double db) { return std::pow(10.0, -db / 20.0); }

}  // namespace

void ScenarioConfig::validate() const {
  if (!(bandwidth_ghz > 0.0)) throw std::invalid_argument("bandwidth must be positive");
  if (!(carrier_ghz > 0.0)) throw std::invalid_argument("carrier frequency must be positive");
  if (!(bin_half_width_m > 0.0)) throw std::invalid_argument("bin half width must be positive");
  if (!(bin_center_m - bin_half_width_m > 0.0)) {
    throw std::invalid_argument("location bin must lie in front of the base station");
  }
  if (!(bs_height_m > 0.0) || !(mu_height_m > 0.0)) {
    throw std::invalid_argument("antenna heights must be positive");
  }
  if (!(near_wall_y_m < 0.0 && mu_lane_y_m > 0.0 && far_wall_y_m > mu_lane_y_m)) {
    throw std::invalid_argument("walls must enclose the base station and the mobile lane");
  }
  if (reflection_loss_db < 0.0 || blockage_loss_db < 0.0) {
    throw std::invalid_argument("losses must be non-negative");
  }
  if (blockers_enabled) {
    if (!(truck_length_m > 0.0 && truck_width_m > 0.0 && truck_height_m > 0.0)) {
      throw std::invalid_argument("truck dimensions must be positive");
    }
    if (!(blocker_gap_shape > 0.0 && blocker_gap_scale_m > 0.0)) {
      throw std::invalid_argument("blocker gap distribution parameters must be positive");
    }
  }
}

double ScenarioConfig::wavelength_m() const { return kSpeedOfLight / (carrier_ghz * 1e9); }

ScenarioGenerator::ScenarioGenerator(ScenarioConfig cfg) : cfg_(cfg) { cfg_.validate(); }

std::vector<Blocker> ScenarioGenerator::draw_blockers(std::mt19937_64& rng) const {
  std::vector<Blocker> out;
  if (!cfg_.blockers_enabled) return out;
  std::gamma_distribution<double> gap(cfg_.blocker_gap_shape, cfg_.blocker_gap_scale_m);
  const double x_min = -kLayoutMarginM;
  const double x_max = cfg_.bin_center_m + cfg_.bin_half_width_m + kLayoutMarginM;
  double cursor = x_min - kWarmupM;
  while (cursor <= x_max) {
    cursor += gap(rng);
    const Blocker b{cursor, cursor + cfg_.truck_length_m};
    if (b.x_end >= x_min && b.x_begin <= x_max) out.push_back(b);
    cursor = b.x_end;
  }
  return out;
}

ChannelRealization ScenarioGenerator::realize(double position_m, std::span<const Blocker> blockers,
                                              std::span<const double> phases_rad) const {
  const Vec3 bs{0.0, 0.0, cfg_.bs_height_m};
  const Vec3 mu{position_m, cfg_.mu_lane_y_m, cfg_.mu_height_m};
  const double lambda = cfg_.wavelength_m();
  const double y_lo = cfg_.truck_lane_y_m - 0.5 * cfg_.truck_width_m;
  const double y_hi = cfg_.truck_lane_y_m + 0.5 * cfg_.truck_width_m;

  auto blocked = [&](const Vec3& a, const Vec3& b) {
    for (const auto& bl : blockers) {
      if (segment_hits_box(a, b, {bl.x_begin, y_lo, 0.0}, {bl.x_end, y_hi, cfg_.truck_height_m})) {
        return true;
      }
    }
    return false;
  };

  ChannelRealization ch;
  ch.position_m = position_m;

  auto add_path = [&](std::size_t slot, double distance, double extra_loss_db, const Vec3& depart,
                      const Vec3& arrive) {
    const double phase = slot < phases_rad.size() ? phases_rad[slot] : 0.0;
    const double amp = lambda / (4.0 * std::numbers::pi * distance) * db_to_amplitude(extra_loss_db);
    PathComponent p;
    p.gain = std::polar(amp, phase);
    p.delay_s = distance / kSpeedOfLight;
    p.aod = bs_direction(depart);
    p.aoa = mu_direction(arrive);
    ch.paths.push_back(p);
  };

  const bool los_blocked = blocked(bs, mu);
  ch.los_blocked = los_blocked;
  add_path(0, norm(mu - bs), los_blocked ? cfg_.blockage_loss_db : 0.0, mu - bs, bs - mu);

  const double walls[2] = {cfg_.near_wall_y_m, cfg_.far_wall_y_m};
  for (std::size_t w = 0; w < 2; ++w) {
    const double wall = walls[w];
    const Vec3 image{mu.x, 2.0 * wall - mu.y, mu.z};
    const double s = (wall - bs.y) / (image.y - bs.y);
    const Vec3 hit = bs + s * (image - bs);
    const bool hit_blocked = blocked(bs, hit) || blocked(hit, mu);
    const double loss = cfg_.reflection_loss_db + (hit_blocked ? cfg_.blockage_loss_db : 0.0);
    add_path(w + 1, norm(image - bs), loss, image - bs, hit - mu);
  }

  std::stable_sort(ch.paths.begin(), ch.paths.end(),
                   [](const PathComponent& a, const PathComponent& b) { return a.delay_s < b.delay_s; });
  return ch;
}

ChannelRealization ScenarioGenerator::draw(std::uint64_t index) const {
  std::mt19937_64 rng(derive_seed(cfg_.rng_seed, SeedStream::scenario, index));
  std::uniform_real_distribution<double> pos(cfg_.bin_center_m - cfg_.bin_half_width_m,
                                             cfg_.bin_center_m + cfg_.bin_half_width_m);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  const double x = pos(rng);
  const auto blockers = draw_blockers(rng);
  const double phases[3] = {phase(rng), phase(rng), phase(rng)};
  return realize(x, blockers, phases);
}

double nlos_fraction(const ScenarioGenerator& gen, std::uint64_t first, std::uint64_t count) {
  if (count == 0) return 0.0;
  std::uint64_t blocked = 0;
  for (std::uint64_t i = first; i < first + count; ++i) {
    if (gen.draw(i).los_blocked) ++blocked;
  }
  return static_cast<double>(blocked) / static_cast<double>(count);
}

}  // namespace beamlearn

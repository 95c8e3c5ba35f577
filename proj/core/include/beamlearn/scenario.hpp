// Seeded street-canyon scenario producing spatially consistent multipath realizations.
//
// World frame: x runs down the street away from the base station, y across the
// street, z up. The base station sits at the origin at bs_height_m with its array
// normal along +x. The mobile drives in the far lane with its array normal facing
// back toward the base station (-x). Walls at y = near_wall_y_m and y = far_wall_y_m
// give one specular reflection each; trucks occupy the near lane.
#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "beamlearn/channel.hpp"

namespace beamlearn {

struct ScenarioConfig {
  double bin_center_m = 30.0;
  double bin_half_width_m = 2.5;
  double carrier_ghz = 60.0;
  double bandwidth_ghz = 1.76;

  double bs_height_m = 7.0;
  double mu_height_m = 1.5;
  double mu_lane_y_m = 5.75;
  double near_wall_y_m = -2.0;
  double far_wall_y_m = 10.0;
  double reflection_loss_db = 6.0;

  bool blockers_enabled = true;
  double truck_lane_y_m = 2.25;
  double truck_length_m = 12.0;
  double truck_width_m = 2.5;
  double truck_height_m = 3.8;
  double blocker_gap_shape = 2.0;   // Erlang shape k
  double blocker_gap_scale_m = 10.8;  // Erlang scale; mean gap = shape * scale
  double blockage_loss_db = 25.0;

  std::uint64_t rng_seed = 1;

  void validate() const;
  double symbol_period_s() const { return 1e-9 / bandwidth_ghz; }
  double wavelength_m() const;
};

struct Blocker {
  double x_begin = 0.0;
  double x_end = 0.0;
};

class ScenarioGenerator {
 public:
  explicit ScenarioGenerator(ScenarioConfig cfg);

  // Realization number `index` of the seeded stream.
  ChannelRealization draw(std::uint64_t index) const;

  // Deterministic geometry for a given position, blocker layout and per-path phases
  // (LOS, near-wall, far-wall order; missing phases default to zero).
  ChannelRealization realize(double position_m, std::span<const Blocker> blockers,
                             std::span<const double> phases_rad) const;

  std::vector<Blocker> draw_blockers(std::mt19937_64& rng) const;

  const ScenarioConfig& config() const { return cfg_; }

 private:
  ScenarioConfig cfg_;
};

// Fraction of draws [first, first + count) whose line-of-sight path is blocked.
double nlos_fraction(const ScenarioGenerator& gen, std::uint64_t first, std::uint64_t count);

}  // namespace beamlearn

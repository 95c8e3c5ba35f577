// Wideband geometric channel: per-path model, beamformed taps and strengths.
#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "beamlearn/array_codebook.hpp"

namespace beamlearn {

struct PathComponent {
  cplx gain{0.0, 0.0};  // single-antenna referenced amplitude
  double delay_s = 0.0;
  PointingDirection aoa;
  PointingDirection aod;
};

struct ChannelRealization {
  std::vector<PathComponent> paths;  // ascending delay
  double position_m = 0.0;
  bool los_blocked = false;
};

// Raised cosine with roll-off 0.25, truncated to +-4 symbol periods, g(0) = 1.
double pulse(double t_s, double symbol_period_s);

// ceil(delay spread / T) + 8 taps.
int channel_length(const ChannelRealization& ch, double symbol_period_s);

// h[m] = sum_l g(mT + tau_0 - tau_l) sqrt(Nr Nt) alpha_l (w^H a_r(aoa_l)) (a_t(aod_l)^H f).
std::vector<cplx> effective_channel(const ChannelRealization& ch, const PointingDirection& tx_dir,
                                    const PointingDirection& rx_dir, const ArrayGeometry& geom_tx,
                                    const ArrayGeometry& geom_rx, double symbol_period_s,
                                    int n_taps);

double channel_strength(std::span<const cplx> h);

struct BestPair {
  std::size_t pair = 0;
  double strength = 0.0;
};

// Strength evaluation for one realization through the per-path pulse Gram matrix:
// gamma = x^H G x with x_l = sqrt(Nr Nt) alpha_l (w^H a_r) (a_t^H f) and
// G_{kl} = sum_m g(mT + tau_0 - tau_k) g(mT + tau_0 - tau_l).
class ChannelModel {
 public:
  ChannelModel(ChannelRealization ch, ArrayGeometry geom_tx, ArrayGeometry geom_rx,
               double symbol_period_s, int n_taps = 0);

  double strength(const PointingDirection& tx_dir, const PointingDirection& rx_dir) const;
  std::vector<cplx> taps(const PointingDirection& tx_dir, const PointingDirection& rx_dir) const;

  // Strengths of every codebook pair, indexed t * |rx| + r.
  std::vector<double> all_pair_strengths(const Codebook& tx, const Codebook& rx) const;
  BestPair exhaustive_best(const Codebook& tx, const Codebook& rx) const;

  const ChannelRealization& realization() const { return ch_; }
  const ArrayGeometry& geometry_tx() const { return geom_tx_; }
  const ArrayGeometry& geometry_rx() const { return geom_rx_; }
  double symbol_period() const { return period_; }
  int n_taps() const { return n_taps_; }

 private:
  double quadratic_form(std::span<const cplx> x) const;

  ChannelRealization ch_;
  ArrayGeometry geom_tx_;
  ArrayGeometry geom_rx_;
  double period_;
  int n_taps_;
  std::vector<double> gram_;  // row-major, paths x paths
};

BestPair exhaustive_best(const ChannelRealization& ch, const Codebook& tx, const Codebook& rx,
                         double symbol_period_s, int n_taps);

}  // namespace beamlearn

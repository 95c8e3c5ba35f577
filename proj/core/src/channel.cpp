#include "beamlearn/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace beamlearn {

namespace {

constexpr double kRollOff = 0.25;
constexpr double kTruncationPeriods = 4.0;
constexpr int kTailTaps = 8;

double sinc(double x) {
  if (std::abs(x) < 1e-12) return 1.0;
  const double px = std::numbers::pi * x;
  return std::sin(px) / px;
}

double earliest_delay(const ChannelRealization& ch) {
  double t0 = 0.0;
  bool first = true;
  for (const auto& p : ch.paths) {
    if (first || p.delay_s < t0) t0 = p.delay_s;
    first = false;
  }
  return t0;
}

cplx inner(const std::vector<cplx>& u, const std::vector<cplx>& v) {
  cplx acc{0.0, 0.0};
  for (std::size_t i = 0; i < u.size(); ++i) acc += std::conj(u[i]) * v[i];
  return acc;
}

}  // namespace

double pulse(double t_s, double symbol_period_s) {
  const double x = t_s / symbol_period_s;
  if (std::abs(x) > kTruncationPeriods) return 0.0;
  const double denom = 1.0 - (2.0 * kRollOff * x) * (2.0 * kRollOff * x);
  if (std::abs(denom) < 1e-10) {
    return std::numbers::pi / 4.0 * sinc(1.0 / (2.0 * kRollOff));
  }
  return sinc(x) * std::cos(std::numbers::pi * kRollOff * x) / denom;
}

int channel_length(const ChannelRealization& ch, double symbol_period_s) {
  if (!(symbol_period_s > 0.0)) throw std::invalid_argument("symbol period must be positive");
  double lo = 0.0;
  double hi = 0.0;
  for (std::size_t i = 0; i < ch.paths.size(); ++i) {
    const double d = ch.paths[i].delay_s;
    if (i == 0 || d < lo) lo = d;
    if (i == 0 || d > hi) hi = d;
  }
  return static_cast<int>(std::ceil((hi - lo) / symbol_period_s)) + kTailTaps;
}

std::vector<cplx> effective_channel(const ChannelRealization& ch, const PointingDirection& tx_dir,
                                    const PointingDirection& rx_dir, const ArrayGeometry& geom_tx,
                                    const ArrayGeometry& geom_rx, double symbol_period_s,
                                    int n_taps) {
  if (n_taps < 1) throw std::invalid_argument("channel needs at least one tap");
  std::vector<cplx> h(static_cast<std::size_t>(n_taps), cplx{0.0, 0.0});
  if (ch.paths.empty()) return h;
  const auto f = steering_vector(geom_tx, tx_dir);
  const auto w = steering_vector(geom_rx, rx_dir);
  const double scale =
      std::sqrt(static_cast<double>(geom_tx.element_count()) * geom_rx.element_count());
  const double t0 = earliest_delay(ch);
  for (const auto& p : ch.paths) {
    const cplx rx_term = inner(w, steering_vector(geom_rx, p.aoa));
    const cplx tx_term = inner(steering_vector(geom_tx, p.aod), f);
    const cplx c = scale * p.gain * rx_term * tx_term;
    for (int m = 0; m < n_taps; ++m) {
      h[static_cast<std::size_t>(m)] += pulse(m * symbol_period_s + t0 - p.delay_s, symbol_period_s) * c;
    }
  }
  return h;
}

double channel_strength(std::span<const cplx> h) {
  double acc = 0.0;
  for (const cplx& v : h) acc += std::norm(v);
  return acc;
}

ChannelModel::ChannelModel(ChannelRealization ch, ArrayGeometry geom_tx, ArrayGeometry geom_rx,
                           double symbol_period_s, int n_taps)
    : ch_(std::move(ch)),
      geom_tx_(geom_tx),
      geom_rx_(geom_rx),
      period_(symbol_period_s),
      n_taps_(n_taps > 0 ? n_taps : channel_length(ch_, symbol_period_s)) {
  const std::size_t np = ch_.paths.size();
  const double t0 = earliest_delay(ch_);
  std::vector<double> weights(np * static_cast<std::size_t>(n_taps_));
  for (std::size_t k = 0; k < np; ++k) {
    for (int m = 0; m < n_taps_; ++m) {
      weights[k * n_taps_ + m] = pulse(m * period_ + t0 - ch_.paths[k].delay_s, period_);
    }
  }
  gram_.assign(np * np, 0.0);
  for (std::size_t k = 0; k < np; ++k) {
    for (std::size_t l = k; l < np; ++l) {
      double acc = 0.0;
      for (int m = 0; m < n_taps_; ++m) acc += weights[k * n_taps_ + m] * weights[l * n_taps_ + m];
      gram_[k * np + l] = acc;
      gram_[l * np + k] = acc;
    }
  }
}

double ChannelModel::quadratic_form(std::span<const cplx> x) const {
  const std::size_t np = x.size();
  double acc = 0.0;
  for (std::size_t k = 0; k < np; ++k) {
    acc += gram_[k * np + k] * std::norm(x[k]);
    for (std::size_t l = k + 1; l < np; ++l) {
      acc += 2.0 * gram_[k * np + l] * (std::conj(x[k]) * x[l]).real();
    }
  }
  return std::max(acc, 0.0);
}

double ChannelModel::strength(const PointingDirection& tx_dir,
                              const PointingDirection& rx_dir) const {
  const std::size_t np = ch_.paths.size();
  if (np == 0) return 0.0;
  const double scale =
      std::sqrt(static_cast<double>(geom_tx_.element_count()) * geom_rx_.element_count());
  std::vector<cplx> x(np);
  for (std::size_t k = 0; k < np; ++k) {
    const auto& p = ch_.paths[k];
    // Same association order as all_pair_strengths so codebook pairs match bit for bit.
    const cplx t = scale * p.gain * std::conj(array_response(geom_tx_, tx_dir, p.aod));
    x[k] = t * array_response(geom_rx_, rx_dir, p.aoa);
  }
  return quadratic_form(x);
}

std::vector<cplx> ChannelModel::taps(const PointingDirection& tx_dir,
                                     const PointingDirection& rx_dir) const {
  return effective_channel(ch_, tx_dir, rx_dir, geom_tx_, geom_rx_, period_, n_taps_);
}

std::vector<double> ChannelModel::all_pair_strengths(const Codebook& tx, const Codebook& rx) const {
  const std::size_t np = ch_.paths.size();
  const std::size_t nt = tx.size();
  const std::size_t nr = rx.size();
  std::vector<double> out(nt * nr, 0.0);
  if (np == 0) return out;
  const double scale =
      std::sqrt(static_cast<double>(geom_tx_.element_count()) * geom_rx_.element_count());
  std::vector<cplx> a_tx(nt * np);
  std::vector<cplx> a_rx(nr * np);
  for (std::size_t t = 0; t < nt; ++t) {
    for (std::size_t k = 0; k < np; ++k) {
      a_tx[t * np + k] = scale * ch_.paths[k].gain *
                         std::conj(array_response(geom_tx_, tx[t].direction, ch_.paths[k].aod));
    }
  }
  for (std::size_t r = 0; r < nr; ++r) {
    for (std::size_t k = 0; k < np; ++k) {
      a_rx[r * np + k] = array_response(geom_rx_, rx[r].direction, ch_.paths[k].aoa);
    }
  }
  std::vector<cplx> x(np);
  for (std::size_t t = 0; t < nt; ++t) {
    for (std::size_t r = 0; r < nr; ++r) {
      for (std::size_t k = 0; k < np; ++k) x[k] = a_tx[t * np + k] * a_rx[r * np + k];
      out[t * nr + r] = quadratic_form(x);
    }
  }
  return out;
}

BestPair ChannelModel::exhaustive_best(const Codebook& tx, const Codebook& rx) const {
  const auto s = all_pair_strengths(tx, rx);
  BestPair best;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] > best.strength) best = {i, s[i]};
  }
  return best;
}

BestPair exhaustive_best(const ChannelRealization& ch, const Codebook& tx, const Codebook& rx,
                         double symbol_period_s, int n_taps) {
  if (tx.size() == 0 || rx.size() == 0) throw std::invalid_argument("empty codebook");
  ChannelModel model(ch, tx.geometry, rx.geometry, symbol_period_s, n_taps);
  return model.exhaustive_best(tx, rx);
}

}  // namespace beamlearn

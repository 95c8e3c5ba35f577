#include "beamlearn/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace beamlearn {

double power_loss(double best_strength, double selected_strength) {
  if (selected_strength > 0.0) return best_strength / selected_strength;
  if (best_strength > 0.0) return std::numeric_limits<double>::infinity();
  return 1.0;
}

double to_db(double linear) {
  if (linear <= 0.0) return -std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(linear);
}

double from_db(double db) { return std::pow(10.0, db / 10.0); }

MetricLog::MetricLog(std::vector<double> thresholds) : thresholds_(std::move(thresholds)) {}

void MetricLog::write_csv(std::ostream& os) const {
  const auto old_precision = os.precision(10);
  os << "step,selected_pair,gamma_selected,gamma_best,xi_db";
  for (double c : thresholds_) os << ",xi_gt_" << c;
  os << '\n';
  for (const auto& r : records_) {
    const double xi = r.xi();
    os << r.step << ',' << r.selected_pair << ',' << r.gamma_selected << ',' << r.gamma_best << ','
       << to_db(xi);
    for (double c : thresholds_) os << ',' << (xi > c ? 1 : 0);
    os << '\n';
  }
  os.precision(old_precision);
}

double power_loss_probability(const MetricLog& log, double c, std::size_t begin, std::size_t end) {
  if (end > log.size()) end = log.size();
  if (begin >= end) throw std::invalid_argument("empty power-loss window");
  std::size_t hits = 0;
  for (std::size_t i = begin; i < end; ++i) {
    if (log[i].xi() > c) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(end - begin);
}

double power_loss_probability(const MetricLog& log, double c) {
  return power_loss_probability(log, c, 0, log.size());
}

double estimate_p_opt(std::span<const PairIndex> winners, PairIndex pair) {
  if (winners.empty()) return 0.0;
  std::size_t hits = 0;
  for (PairIndex w : winners) {
    if (w == pair) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(winners.size());
}

std::vector<double> moving_average(std::span<const double> in, std::size_t window) {
  if (window == 0) throw std::invalid_argument("moving-average window must be >= 1");
  std::vector<double> out(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) {
    const std::size_t first = i + 1 >= window ? i + 1 - window : 0;
    double acc = 0.0;
    for (std::size_t k = first; k <= i; ++k) acc += in[k];
    out[i] = acc / static_cast<double>(i + 1 - first);
  }
  return out;
}

}  // namespace beamlearn

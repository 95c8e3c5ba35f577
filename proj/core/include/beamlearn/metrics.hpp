// Power loss, power-loss probability and probability-of-being-optimal estimates.
#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "beamlearn/array_codebook.hpp"

namespace beamlearn {

// xi = best / selected; +inf when only the selected strength is zero, 1 when both are.
double power_loss(double best_strength, double selected_strength);

// 10 log10(x), with -inf for zero.
double to_db(double linear);
double from_db(double db);

struct StepRecord {
  std::size_t step = 0;
  PairIndex selected_pair = 0;
  double gamma_selected = 0.0;
  double gamma_best = 0.0;

  double xi() const { return power_loss(gamma_best, gamma_selected); }
};

class MetricLog {
 public:
  explicit MetricLog(std::vector<double> thresholds = {1.0, 2.0});

  void append(const StepRecord& r) { records_.push_back(r); }
  std::size_t size() const { return records_.size(); }
  const StepRecord& operator[](std::size_t i) const { return records_[i]; }
  const std::vector<StepRecord>& records() const { return records_; }
  const std::vector<double>& thresholds() const { return thresholds_; }

  // step, selected_pair, gamma_selected, gamma_best, xi_db, then one 0/1 column per threshold.
  void write_csv(std::ostream& os) const;

 private:
  std::vector<double> thresholds_;
  std::vector<StepRecord> records_;
};

// Fraction of records in [begin, end) with xi > c.
double power_loss_probability(const MetricLog& log, double c, std::size_t begin, std::size_t end);
double power_loss_probability(const MetricLog& log, double c);

// Fraction of observations whose winner is `pair`; 0 for an empty list.
double estimate_p_opt(std::span<const PairIndex> winners, PairIndex pair);

// Trailing moving average: out[i] is the mean of in[max(0, i-window+1) .. i].
std::vector<double> moving_average(std::span<const double> in, std::size_t window);

}  // namespace beamlearn

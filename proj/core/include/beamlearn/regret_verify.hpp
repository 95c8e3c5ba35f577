// Synthetic bandit with ideal rewards for checking empirical regret against the
// closed-form bounds of the greedy and risk-aware selectors.
#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <vector>

namespace beamlearn {

struct SyntheticBanditSpec {
  std::vector<double> p_opt;
  std::size_t budget = 3;
  std::uint64_t horizon = 10000;
  std::vector<double> acceptance;       // zeta per arm; empty means always accept
  double replacement_gap_scale = 0.5;   // replacement gap = scale * gap

  void validate() const;
  double zeta(std::size_t arm) const { return acceptance.empty() ? 1.0 : acceptance[arm]; }
};

// Ten arms, budget 3, gaps between 0.05 and 0.40. With acceptance > 0 every arm gets
// that constant acceptance probability.
SyntheticBanditSpec reference_synthetic_spec(double acceptance = 0.0);

struct GapTable {
  std::vector<std::size_t> optimal;     // top-budget arms, descending P_opt, ties by index
  std::vector<std::size_t> suboptimal;  // ascending index
  std::vector<double> gap;              // gap[s * optimal.size() + o] = P(opt o) - P(sub s)

  double at(std::size_t s, std::size_t o) const { return gap[s * optimal.size() + o]; }
};

GapTable optimality_gaps(const SyntheticBanditSpec& spec);

// Arm that is best this round, or nothing with probability 1 - sum P_opt.
std::optional<std::size_t> ideal_reward_draw(const SyntheticBanditSpec& spec, std::mt19937_64& rng);

double theorem1_bound(const SyntheticBanditSpec& spec, double n);
double theorem2_bound(const SyntheticBanditSpec& spec, double n);

enum class SyntheticAlgorithm { greedy_ucb, risk_aware_fixed };

struct BoundTrace {
  std::vector<double> mean_regret;  // entry k is n = k + 1
  std::vector<double> bound_t1;
  std::vector<double> bound_t2;
};

// Per step, suboptimal UCB proposals (slot order) are matched with the optimal arms
// missing from the proposals (descending P_opt); each match adds its gap, or the
// replacement gap when the proposal was rejected.
BoundTrace run_bound_check(const SyntheticBanditSpec& spec, SyntheticAlgorithm algorithm,
                           std::size_t n_runs, std::uint64_t seed, unsigned threads = 0);

void write_bound_csv(std::ostream& os, const BoundTrace& trace);

struct SlopeFit {
  double slope = 0.0;  // d(R/ln n) / d(log10 n)
  double intercept = 0.0;
  double mean = 0.0;   // mean of R/ln n over the fitted range
};

// Least-squares line of R(n)/ln n against log10 n over integer n in [n_lo, n_hi].
SlopeFit fit_regret_slope(const BoundTrace& trace, std::uint64_t n_lo, std::uint64_t n_hi);

}  // namespace beamlearn

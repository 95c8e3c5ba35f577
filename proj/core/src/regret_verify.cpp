#include "beamlearn/regret_verify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "beamlearn/bandit_selection.hpp"
#include "beamlearn/parallel.hpp"
#include "beamlearn/seeding.hpp"

namespace beamlearn {

namespace {

const double kDelta = (std::sqrt(5.0) - 1.0) / 2.0;

void require_positive_gaps(const GapTable& g) {
  for (double d : g.gap) {
    if (!(d > 0.0)) throw std::invalid_argument("regret bound needs strictly positive optimality gaps");
  }
}

std::vector<double> run_once(const SyntheticBanditSpec& spec, const GapTable& gaps,
                             SyntheticAlgorithm algorithm, std::uint64_t seed) {
  const std::size_t k = spec.p_opt.size();
  std::mt19937_64 rng(seed);
  std::vector<PairIndex> arms(k);
  std::iota(arms.begin(), arms.end(), PairIndex{0});
  const std::vector<double> flat(k, 0.0);
  SelectionState state = init_state(arms, flat);
  SelectionConfig cfg;
  cfg.training_budget = spec.budget;
  cfg.risk_aware = algorithm == SyntheticAlgorithm::risk_aware_fixed;
  std::vector<double> acceptance(k);
  for (std::size_t a = 0; a < k; ++a) acceptance[a] = spec.zeta(a);
  const RejectionModel model = RejectionModel::fixed(acceptance);

  std::vector<int> opt_slot(k, -1);
  for (std::size_t o = 0; o < gaps.optimal.size(); ++o) opt_slot[gaps.optimal[o]] = static_cast<int>(o);
  std::vector<int> sub_slot(k, -1);
  for (std::size_t s = 0; s < gaps.suboptimal.size(); ++s) sub_slot[gaps.suboptimal[s]] = static_cast<int>(s);

  std::vector<double> cumulative(spec.horizon, 0.0);
  double total = 0.0;
  for (std::uint64_t step = 0; step < spec.horizon; ++step) {
    SelectionOutcome out;
    if (algorithm == SyntheticAlgorithm::greedy_ucb) {
      out.selected = select_greedy_ucb(state, cfg);
      out.proposed = out.selected;
      out.accepted.assign(out.selected.size(), 1);
    } else {
      out = select_risk_aware(state, cfg, rng, model);
    }

    std::vector<char> proposed_opt(gaps.optimal.size(), 0);
    for (std::size_t a : out.proposed) {
      if (opt_slot[a] >= 0) proposed_opt[static_cast<std::size_t>(opt_slot[a])] = 1;
    }
    std::size_t next_missing = 0;
    for (std::size_t j = 0; j < out.proposed.size(); ++j) {
      const int s = sub_slot[out.proposed[j]];
      if (s < 0) continue;
      while (next_missing < gaps.optimal.size() && proposed_opt[next_missing]) ++next_missing;
      if (next_missing >= gaps.optimal.size()) break;
      const double d = gaps.at(static_cast<std::size_t>(s), next_missing);
      total += out.accepted[j] ? d : spec.replacement_gap_scale * d;
      ++next_missing;
    }

    record_reward(state, out.selected, ideal_reward_draw(spec, rng));
    cumulative[step] = total;
  }
  return cumulative;
}

}  // namespace

void SyntheticBanditSpec::validate() const {
  if (p_opt.empty()) throw std::invalid_argument("synthetic bandit needs at least one arm");
  double sum = 0.0;
  for (double p : p_opt) {
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("optimality probabilities must lie in [0, 1]");
    sum += p;
  }
  if (sum > 1.0 + 1e-12) throw std::invalid_argument("optimality probabilities sum above 1");
  if (budget < 1 || budget > p_opt.size()) throw std::invalid_argument("budget must lie in [1, arms]");
  if (!acceptance.empty()) {
    if (acceptance.size() != p_opt.size()) throw std::invalid_argument("one acceptance per arm");
    for (double z : acceptance) {
      if (!(z > 0.0) || z > 1.0) throw std::invalid_argument("acceptance probabilities must lie in (0, 1]");
    }
  }
  if (replacement_gap_scale < 0.0) throw std::invalid_argument("replacement gap scale must be >= 0");
}

SyntheticBanditSpec reference_synthetic_spec(double acceptance) {
  SyntheticBanditSpec spec;
  spec.p_opt = {0.40, 0.22, 0.20, 0.15, 0.02, 0.01, 0.0, 0.0, 0.0, 0.0};
  spec.budget = 3;
  spec.horizon = 10000;
  if (acceptance > 0.0) spec.acceptance.assign(spec.p_opt.size(), acceptance);
  return spec;
}

GapTable optimality_gaps(const SyntheticBanditSpec& spec) {
  spec.validate();
  const std::size_t k = spec.p_opt.size();
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return spec.p_opt[a] > spec.p_opt[b]; });
  GapTable g;
  g.optimal.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(spec.budget));
  g.suboptimal.assign(order.begin() + static_cast<std::ptrdiff_t>(spec.budget), order.end());
  std::sort(g.suboptimal.begin(), g.suboptimal.end());
  for (std::size_t s : g.suboptimal) {
    for (std::size_t o : g.optimal) g.gap.push_back(spec.p_opt[o] - spec.p_opt[s]);
  }
  return g;
}

std::optional<std::size_t> ideal_reward_draw(const SyntheticBanditSpec& spec, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double u = unit(rng);
  double cum = 0.0;
  for (std::size_t a = 0; a < spec.p_opt.size(); ++a) {
    cum += spec.p_opt[a];
    if (u < cum) return a;
  }
  return std::nullopt;
}

double theorem1_bound(const SyntheticBanditSpec& spec, double n) {
  const GapTable g = optimality_gaps(spec);
  require_positive_gaps(g);
  double inv = 0.0;
  double lin = 0.0;
  for (double d : g.gap) {
    inv += 1.0 / d;
    lin += d;
  }
  return 8.0 * std::log(n) * inv + (1.0 + std::numbers::pi * std::numbers::pi / 3.0) * lin;
}

double theorem2_bound(const SyntheticBanditSpec& spec, double n) {
  const GapTable g = optimality_gaps(spec);
  require_positive_gaps(g);
  const double c = 8.0 * std::log(n) / (kDelta * kDelta);
  double first = 0.0;
  double second = 0.0;
  double third = 0.0;
  for (std::size_t s = 0; s < g.suboptimal.size(); ++s) {
    const double z = spec.zeta(g.suboptimal[s]);
    for (std::size_t o = 0; o < g.optimal.size(); ++o) {
      const double d = g.at(s, o);
      const double dt = spec.replacement_gap_scale * d;
      first += 1.0 / d;
      second += (1.0 - z) * dt / (z * d * d);
      third += z * d + (1.0 - z) * dt;
    }
  }
  return c * first + c * second + (1.0 + std::numbers::pi * std::numbers::pi / 2.0) * third;
}

BoundTrace run_bound_check(const SyntheticBanditSpec& spec, SyntheticAlgorithm algorithm,
                           std::size_t n_runs, std::uint64_t seed, unsigned threads) {
  spec.validate();
  if (n_runs < 1) throw std::invalid_argument("at least one run is required");
  const GapTable gaps = optimality_gaps(spec);
  std::vector<std::vector<double>> runs(n_runs);
  parallel_for(n_runs, threads, [&](std::size_t r) {
    runs[r] = run_once(spec, gaps, algorithm, derive_seed(seed, SeedStream::synthetic, r));
  });

  BoundTrace trace;
  trace.mean_regret.assign(spec.horizon, 0.0);
  for (const auto& run : runs) {
    for (std::size_t i = 0; i < spec.horizon; ++i) trace.mean_regret[i] += run[i];
  }
  for (double& v : trace.mean_regret) v /= static_cast<double>(n_runs);

  const bool has_gaps = !gaps.suboptimal.empty();
  trace.bound_t1.resize(spec.horizon);
  trace.bound_t2.resize(spec.horizon);
  for (std::size_t i = 0; i < spec.horizon; ++i) {
    const double n = static_cast<double>(i + 1);
    trace.bound_t1[i] = has_gaps ? theorem1_bound(spec, n) : 0.0;
    trace.bound_t2[i] = has_gaps ? theorem2_bound(spec, n) : 0.0;
  }
  return trace;
}

void write_bound_csv(std::ostream& os, const BoundTrace& trace) {
  const auto old_precision = os.precision(10);
  os << "n,mean_regret,bound_t1,bound_t2\n";
  for (std::size_t i = 0; i < trace.mean_regret.size(); ++i) {
    os << (i + 1) << ',' << trace.mean_regret[i] << ',' << trace.bound_t1[i] << ',' << trace.bound_t2[i]
       << '\n';
  }
  os.precision(old_precision);
}

SlopeFit fit_regret_slope(const BoundTrace& trace, std::uint64_t n_lo, std::uint64_t n_hi) {
  if (n_lo < 2 || n_hi <= n_lo || n_hi > trace.mean_regret.size()) {
    throw std::invalid_argument("invalid slope-fit range");
  }
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double m = static_cast<double>(n_hi - n_lo + 1);
  for (std::uint64_t n = n_lo; n <= n_hi; ++n) {
    const double x = std::log10(static_cast<double>(n));
    const double y = trace.mean_regret[n - 1] / std::log(static_cast<double>(n));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  SlopeFit f;
  f.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  f.mean = sy / m;
  f.intercept = (sy - f.slope * sx) / m;
  return f;
}

}  // namespace beamlearn

#include "beamlearn/bandit_selection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

#include "beamlearn/metrics.hpp"
#include "beamlearn/offline_db.hpp"

namespace beamlearn {

namespace {

constexpr std::size_t kNone = static_cast<std::size_t>(-1);

std::vector<double> ucb_values(const SelectionState& s, std::uint64_t n) {
  std::vector<double> u(s.size());
  for (std::size_t k = 0; k < s.size(); ++k) u[k] = ucb_index(s, k, n);
  return u;
}

double beta_draw(std::mt19937_64& rng, double a, double b) {
  std::gamma_distribution<double> ga(a, 1.0);
  std::gamma_distribution<double> gb(b, 1.0);
  const double x = ga(rng);
  const double y = gb(rng);
  return x + y > 0.0 ? x / (x + y) : 0.5;
}

std::size_t replacement_arm(const SelectionState& s, const std::vector<char>& in_s) {
  std::size_t best = kNone;
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (in_s[k] || s.x_tot[k] == 0) continue;
    if (best == kNone || s.p_opt_hat(k) > s.p_opt_hat(best)) best = k;
  }
  if (best != kNone) return best;
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (in_s[k]) continue;
    if (best == kNone || s.avg_strength[k] > s.avg_strength[best]) best = k;
  }
  return best;
}

}  // namespace

void SelectionConfig::validate(std::size_t n_candidates) const {
  if (training_budget < 1 || training_budget > n_candidates) {
    throw std::invalid_argument("training budget must lie in [1, number of candidates]");
  }
  if (!(risk_threshold_db > 0.0)) throw std::invalid_argument("risk threshold must be positive");
}

SelectionState init_state(std::vector<PairIndex> candidates, std::span<const double> averages,
                          std::uint64_t avg_count) {
  if (candidates.empty()) throw std::invalid_argument("candidate set is empty");
  if (averages.size() != candidates.size()) {
    throw std::invalid_argument("one initial average per candidate is required");
  }
  SelectionState s;
  const std::size_t k = candidates.size();
  s.candidates = std::move(candidates);
  s.x_tot.assign(k, 0);
  s.z_tot.assign(k, 0);
  s.trained.assign(k, 1);
  s.avg_strength.assign(averages.begin(), averages.end());
  s.avg_count.assign(k, avg_count);
  std::size_t seed = 0;
  for (std::size_t i = 1; i < k; ++i) {
    if (averages[i] > averages[seed]) seed = i;
  }
  s.x_tot[seed] = 1;
  return s;
}

SelectionState init_state(std::vector<PairIndex> candidates, const OfflineDatabase& db) {
  const auto all = average_strengths(db);
  std::vector<double> avg;
  avg.reserve(candidates.size());
  for (PairIndex p : candidates) avg.push_back(all.at(p));
  return init_state(std::move(candidates), avg, db.rows.size());
}

double ucb_index(const SelectionState& s, std::size_t arm, std::uint64_t n) {
  if (n < 1) throw std::invalid_argument("UCB needs n >= 1");
  const double t = static_cast<double>(s.trained[arm]);
  return static_cast<double>(s.x_tot[arm]) / t + std::sqrt(2.0 * std::log(static_cast<double>(n)) / t);
}

std::vector<std::size_t> select_greedy_ucb(const SelectionState& s, const SelectionConfig& cfg) {
  cfg.validate(s.size());
  const auto u = ucb_values(s, s.n + 1);
  std::vector<std::size_t> order(s.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(cfg.training_budget),
                    order.end(), [&](std::size_t a, std::size_t b) {
                      if (u[a] != u[b]) return u[a] > u[b];
                      return a < b;
                    });
  order.resize(cfg.training_budget);
  return order;
}

double rejection_probability(const SelectionState& s, std::size_t arm, std::uint64_t n,
                             double beta_draw_value) {
  double z = beta_draw_value;
  if (s.x_tot[arm] > 0) {
    z *= std::sqrt(2.0 * std::log(static_cast<double>(n)) / static_cast<double>(s.trained[arm]));
  }
  return std::clamp(z, 0.0, 1.0);
}

SelectionOutcome select_risk_aware(const SelectionState& s, const SelectionConfig& cfg,
                                   std::mt19937_64& rng, const RejectionModel& model) {
  cfg.validate(s.size());
  if (model.kind == RejectionModel::Kind::fixed_acceptance && model.acceptance.size() != s.size()) {
    throw std::invalid_argument("fixed acceptance needs one probability per arm");
  }
  const std::uint64_t n = s.n + 1;
  const auto u = ucb_values(s, n);
  std::vector<char> in_s(s.size(), 0);
  std::vector<char> rejected(s.size(), 0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  SelectionOutcome out;

  for (std::size_t slot = 0; slot < cfg.training_budget; ++slot) {
    std::size_t prop = kNone;
    for (std::size_t k = 0; k < s.size(); ++k) {
      if (in_s[k] || rejected[k]) continue;
      if (prop == kNone || u[k] > u[prop]) prop = k;
    }
    if (prop == kNone) {
      const std::size_t r = replacement_arm(s, in_s);
      in_s[r] = 1;
      out.selected.push_back(r);
      continue;
    }

    bool reject = false;
    switch (model.kind) {
      case RejectionModel::Kind::beta_posterior: {
        const double a = 1.0 + static_cast<double>(s.z_tot[prop]);
        const double b = 1.0 + static_cast<double>(s.trained[prop] - s.z_tot[prop]);
        const double z = rejection_probability(s, prop, n, beta_draw(rng, a, b));
        reject = unit(rng) < z;
        break;
      }
      case RejectionModel::Kind::fixed_acceptance:
        reject = unit(rng) >= model.acceptance[prop];
        break;
      case RejectionModel::Kind::always_accept:
        reject = false;
        break;
      case RejectionModel::Kind::always_reject:
        reject = true;
        break;
    }

    out.proposed.push_back(prop);
    out.accepted.push_back(reject ? 0 : 1);
    if (!reject) {
      in_s[prop] = 1;
      out.selected.push_back(prop);
      continue;
    }
    rejected[prop] = 1;
    const std::size_t r = replacement_arm(s, in_s);
    in_s[r] = 1;
    out.selected.push_back(r);
  }
  return out;
}

SelectionOutcome select_arms(const SelectionState& s, const SelectionConfig& cfg,
                             std::mt19937_64& rng) {
  if (cfg.risk_aware) return select_risk_aware(s, cfg, rng);
  SelectionOutcome out;
  out.selected = select_greedy_ucb(s, cfg);
  out.proposed = out.selected;
  out.accepted.assign(out.selected.size(), 1);
  return out;
}

void update_after_training(SelectionState& s, std::span<const std::size_t> selected,
                           std::span<const double> gammas, const SelectionConfig& cfg) {
  if (selected.size() != gammas.size()) {
    throw std::invalid_argument("one measurement per selected arm is required");
  }
  std::vector<char> seen(s.size(), 0);
  for (std::size_t k : selected) {
    if (k >= s.size() || seen[k]) throw std::invalid_argument("selected arms must be distinct");
    seen[k] = 1;
  }
  double best = 0.0;
  std::size_t winner = kNone;
  for (std::size_t j = 0; j < selected.size(); ++j) {
    if (gammas[j] < 0.0) throw std::invalid_argument("strengths must be non-negative");
    if (gammas[j] > best || (gammas[j] == best && best > 0.0 && selected[j] < winner)) {
      best = gammas[j];
      winner = selected[j];
    }
  }
  for (std::size_t k : selected) ++s.trained[k];
  if (winner != kNone) {
    ++s.x_tot[winner];
    const double threshold = from_db(cfg.risk_threshold_db);
    for (std::size_t j = 0; j < selected.size(); ++j) {
      const std::size_t k = selected[j];
      if (gammas[j] == 0.0 || best / gammas[j] > threshold) ++s.z_tot[k];
      const double c = static_cast<double>(s.avg_count[k]);
      s.avg_strength[k] = (s.avg_strength[k] * c + gammas[j]) / (c + 1.0);
      ++s.avg_count[k];
    }
  }
  ++s.n;
}

void record_reward(SelectionState& s, std::span<const std::size_t> selected,
                   std::optional<std::size_t> winner) {
  bool winner_trained = false;
  for (std::size_t k : selected) {
    ++s.trained[k];
    if (winner && *winner == k) winner_trained = true;
  }
  if (winner_trained) ++s.x_tot[*winner];
  ++s.n;
}

std::string to_json(const SelectionState& s) {
  nlohmann::json j;
  j["candidates"] = s.candidates;
  j["x_tot"] = s.x_tot;
  j["z_tot"] = s.z_tot;
  j["trained"] = s.trained;
  j["avg_strength"] = s.avg_strength;
  j["avg_count"] = s.avg_count;
  j["n"] = s.n;
  return j.dump();
}

SelectionState selection_state_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  SelectionState s;
  j.at("candidates").get_to(s.candidates);
  j.at("x_tot").get_to(s.x_tot);
  j.at("z_tot").get_to(s.z_tot);
  j.at("trained").get_to(s.trained);
  j.at("avg_strength").get_to(s.avg_strength);
  j.at("avg_count").get_to(s.avg_count);
  j.at("n").get_to(s.n);
  const std::size_t k = s.candidates.size();
  if (s.x_tot.size() != k || s.z_tot.size() != k || s.trained.size() != k ||
      s.avg_strength.size() != k || s.avg_count.size() != k) {
    throw std::runtime_error("selection snapshot has inconsistent array lengths");
  }
  return s;
}

}  // namespace beamlearn

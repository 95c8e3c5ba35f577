// Multiple-play UCB beam-pair selection, plain and risk-aware.
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "beamlearn/array_codebook.hpp"

namespace beamlearn {

struct OfflineDatabase;

struct SelectionConfig {
  std::size_t training_budget = 30;
  double risk_threshold_db = 5.0;
  bool risk_aware = true;

  void validate(std::size_t n_candidates) const;
};

// Per-arm statistics. Arms are positions in `candidates`; the global pair index of
// arm k is candidates[k].
struct SelectionState {
  std::vector<PairIndex> candidates;
  std::vector<std::uint64_t> x_tot;
  std::vector<std::uint64_t> z_tot;
  std::vector<std::uint64_t> trained;
  std::vector<double> avg_strength;
  std::vector<std::uint64_t> avg_count;
  std::uint64_t n = 0;  // completed steps

  std::size_t size() const { return candidates.size(); }
  double p_opt_hat(std::size_t arm) const {
    return static_cast<double>(x_tot[arm]) / static_cast<double>(trained[arm]);
  }
};

// averages[k] is the offline average strength of arm k, backed by avg_count samples.
SelectionState init_state(std::vector<PairIndex> candidates, std::span<const double> averages,
                          std::uint64_t avg_count = 0);
SelectionState init_state(std::vector<PairIndex> candidates, const OfflineDatabase& db);

double ucb_index(const SelectionState& s, std::size_t arm, std::uint64_t n);

// Arms in selection order.
std::vector<std::size_t> select_greedy_ucb(const SelectionState& s, const SelectionConfig& cfg);

// Source of the per-proposal rejection decision.
struct RejectionModel {
  enum class Kind { beta_posterior, fixed_acceptance, always_accept, always_reject };
  Kind kind = Kind::beta_posterior;
  std::vector<double> acceptance;  // per arm, used by fixed_acceptance

  static RejectionModel beta_posterior() { return {}; }
  static RejectionModel fixed(std::vector<double> zeta) {
    return {Kind::fixed_acceptance, std::move(zeta)};
  }
  static RejectionModel accept_all() { return {Kind::always_accept, {}}; }
  static RejectionModel reject_all() { return {Kind::always_reject, {}}; }
};

struct SelectionOutcome {
  std::vector<std::size_t> selected;  // arms in slot order
  std::vector<std::size_t> proposed;  // UCB proposal per slot
  std::vector<char> accepted;         // whether each proposal was kept
};

// Rejection probability of a UCB proposal under the posterior model, clamped to [0, 1].
double rejection_probability(const SelectionState& s, std::size_t arm, std::uint64_t n,
                             double beta_draw);

SelectionOutcome select_risk_aware(const SelectionState& s, const SelectionConfig& cfg,
                                   std::mt19937_64& rng,
                                   const RejectionModel& model = RejectionModel::beta_posterior());

// Dispatches on cfg.risk_aware.
SelectionOutcome select_arms(const SelectionState& s, const SelectionConfig& cfg,
                             std::mt19937_64& rng);

// Reward, risk and running-average update from one training pass.
void update_after_training(SelectionState& s, std::span<const std::size_t> selected,
                           std::span<const double> gammas, const SelectionConfig& cfg);

// Bookkeeping for an externally decided reward: T for every selected arm, one reward to
// `winner` if present, and the step counter.
void record_reward(SelectionState& s, std::span<const std::size_t> selected,
                   std::optional<std::size_t> winner);

std::string to_json(const SelectionState& s);
SelectionState selection_state_from_json(const std::string& text);

}  // namespace beamlearn

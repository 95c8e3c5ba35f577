// Two-layer beam alignment: codebook pair selection on top, per-pair refinement below.
#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <variant>
#include <vector>

#include "beamlearn/bandit_selection.hpp"
#include "beamlearn/channel.hpp"
#include "beamlearn/hoo_refinement.hpp"
#include "beamlearn/metrics.hpp"

namespace beamlearn {

enum class RefinePolicy {
  all,           // refine every selected pair from the first step
  after_reward,  // only pairs that have won at least once
  after_n,       // every pair once the step counter reaches refine_start_step
};

enum class RefinerKind { hoo, flat_leaf };

struct LearnerConfig {
  SelectionConfig selection;
  RefinementConfig refinement;
  bool refine_enabled = true;
  RefinePolicy policy = RefinePolicy::all;
  std::uint64_t refine_start_step = 100;
  RefinerKind refiner = RefinerKind::hoo;

  void validate(std::size_t n_candidates) const;
};

struct TrainingResult {
  std::vector<std::size_t> arms;  // slot order
  std::vector<BeamPairDirections> measured;
  std::vector<double> gammas;
  std::vector<char> refined;
  std::size_t served_slot = 0;

  std::size_t served_arm() const { return arms[served_slot]; }
  double served_gamma() const { return gammas[served_slot]; }
};

class BinLearner {
 public:
  BinLearner(SelectionState init, const Codebook& tx, const Codebook& rx, LearnerConfig cfg);

  // One training pass against `channel`: select, measure, update both layers.
  TrainingResult step(const ChannelModel& channel, std::mt19937_64& rng);

  const SelectionState& selection() const { return state_; }
  const LearnerConfig& config() const { return cfg_; }
  std::size_t refiner_count() const { return refiners_.size(); }
  // Tree of a global pair index, or nullptr when none exists or the flat refiner is used.
  const RefinementTree* tree(PairIndex pair) const;

 private:
  using Refiner = std::variant<RefinementTree, FlatLeafBandit>;

  bool refinement_active(std::size_t arm, std::uint64_t step) const;
  BeamPairDirections codebook_directions(PairIndex pair) const;
  Refiner& refiner_for(PairIndex pair);

  SelectionState state_;
  const Codebook* tx_;
  const Codebook* rx_;
  LearnerConfig cfg_;
  std::vector<double> nu_;
  std::map<PairIndex, Refiner> refiners_;
};

// Runs one learner step and scores the served pair against the exhaustive codebook best.
StepRecord alignment_step(BinLearner& learner, const ChannelModel& channel, const BestPair& best,
                          std::size_t step_number, std::mt19937_64& rng);

}  // namespace beamlearn

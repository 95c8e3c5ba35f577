#include "beamlearn/two_layer.hpp"

#include <stdexcept>

namespace beamlearn {

void LearnerConfig::validate(std::size_t n_candidates) const {
  selection.validate(n_candidates);
  refinement.validate();
}

BinLearner::BinLearner(SelectionState init, const Codebook& tx, const Codebook& rx,
                       LearnerConfig cfg)
    : state_(std::move(init)), tx_(&tx), rx_(&rx), cfg_(cfg) {
  cfg_.validate(state_.size());
  for (PairIndex p : state_.candidates) {
    if (p >= tx.size() * rx.size()) throw std::invalid_argument("candidate outside the codebooks");
  }
  nu_ = smoothness_coefficients(tx.geometry, rx.geometry, cfg_.refinement);
}

const RefinementTree* BinLearner::tree(PairIndex pair) const {
  auto it = refiners_.find(pair);
  if (it == refiners_.end()) return nullptr;
  return std::get_if<RefinementTree>(&it->second);
}

bool BinLearner::refinement_active(std::size_t arm, std::uint64_t step) const {
  if (!cfg_.refine_enabled) return false;
  switch (cfg_.policy) {
    case RefinePolicy::all:
      return true;
    case RefinePolicy::after_reward:
      return state_.x_tot[arm] > 0;
    case RefinePolicy::after_n:
      return step >= cfg_.refine_start_step;
  }
  return false;
}

BeamPairDirections BinLearner::codebook_directions(PairIndex pair) const {
  const std::size_t nr = rx_->size();
  return {(*tx_)[pair / nr].direction, (*rx_)[pair % nr].direction};
}

BinLearner::Refiner& BinLearner::refiner_for(PairIndex pair) {
  auto it = refiners_.find(pair);
  if (it != refiners_.end()) return it->second;
  const std::size_t nr = rx_->size();
  const Beam& bt = (*tx_)[pair / nr];
  const Beam& br = (*rx_)[pair % nr];
  const PairBeamwidths bw{bt.az_beamwidth_deg, bt.el_beamwidth_deg, br.az_beamwidth_deg,
                          br.el_beamwidth_deg};
  const BeamPairDirections root{bt.direction, br.direction};
  if (cfg_.refiner == RefinerKind::hoo) {
    return refiners_.emplace(pair, RefinementTree(root, bw, cfg_.refinement.max_depth, pair))
        .first->second;
  }
  return refiners_.emplace(pair, FlatLeafBandit(root, bw, cfg_.refinement)).first->second;
}

TrainingResult BinLearner::step(const ChannelModel& channel, std::mt19937_64& rng) {
  const std::uint64_t step_no = state_.n + 1;
  TrainingResult out;
  out.arms = select_arms(state_, cfg_.selection, rng).selected;
  const std::size_t k = out.arms.size();
  out.measured.resize(k);
  out.gammas.resize(k);
  out.refined.assign(k, 0);

  for (std::size_t slot = 0; slot < k; ++slot) {
    const std::size_t arm = out.arms[slot];
    const PairIndex pair = state_.candidates[arm];
    if (!refinement_active(arm, step_no)) {
      out.measured[slot] = codebook_directions(pair);
      out.gammas[slot] = channel.strength(out.measured[slot].tx, out.measured[slot].rx);
      continue;
    }
    out.refined[slot] = 1;
    Refiner& r = refiner_for(pair);
    if (auto* tree = std::get_if<RefinementTree>(&r)) {
      const auto path = select_node(*tree);
      const BeamPairDirections dirs = tree->node(path.back()).dirs;
      const double g = channel.strength(dirs.tx, dirs.rx);
      update_after_sample(*tree, path, g, cfg_.refinement, nu_);
      out.measured[slot] = dirs;
      out.gammas[slot] = g;
    } else {
      auto& flat = std::get<FlatLeafBandit>(r);
      const std::size_t leaf = flat.select();
      const BeamPairDirections dirs = flat.arm(leaf);
      const double g = channel.strength(dirs.tx, dirs.rx);
      flat.update(leaf, g);
      out.measured[slot] = dirs;
      out.gammas[slot] = g;
    }
  }

  for (std::size_t slot = 1; slot < k; ++slot) {
    const double g = out.gammas[slot];
    const double best = out.gammas[out.served_slot];
    if (g > best || (g == best && out.arms[slot] < out.arms[out.served_slot])) out.served_slot = slot;
  }

  update_after_training(state_, out.arms, out.gammas, cfg_.selection);
  return out;
}

StepRecord alignment_step(BinLearner& learner, const ChannelModel& channel, const BestPair& best,
                          std::size_t step_number, std::mt19937_64& rng) {
  const TrainingResult r = learner.step(channel, rng);
  StepRecord rec;
  rec.step = step_number;
  rec.selected_pair = learner.selection().candidates[r.served_arm()];
  rec.gamma_selected = r.served_gamma();
  rec.gamma_best = best.strength;
  return rec;
}

}  // namespace beamlearn

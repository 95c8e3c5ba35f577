#include <doctest.h>

#include <random>

#include "beamlearn/experiment.hpp"
#include "beamlearn/offline_db.hpp"
#include "beamlearn/two_layer.hpp"

using namespace beamlearn;

namespace {

constexpr double kT = 1e-9 / 1.76;

struct Fixture {
  ArrayGeometry geom{8, 8};
  Codebook cb = generate_codebook(geom);
  ChannelModel channel{static_single_path(cb, cb, 1, 0.25), geom, geom, kT};
  BestPair best = channel.exhaustive_best(cb, cb);

  SelectionState initial(std::size_t m = 12) const {
    const auto all = channel.all_pair_strengths(cb, cb);
    auto cands = select_avg_pow(all, m);
    std::sort(cands.begin(), cands.end());
    std::vector<double> avg;
    for (PairIndex p : cands) avg.push_back(all[p]);
    return init_state(cands, avg, 1);
  }
};

LearnerConfig config(std::size_t budget = 3) {
  LearnerConfig cfg;
  cfg.selection.training_budget = budget;
  return cfg;
}

}  // namespace

TEST_SUITE("two_layer") {

TEST_CASE("without refinement the learner is plain pair selection") {
  const Fixture f;
  LearnerConfig cfg = config();
  cfg.refine_enabled = false;
  BinLearner learner(f.initial(), f.cb, f.cb, cfg);
  SelectionState ref = f.initial();
  std::mt19937_64 rng_a(81);
  std::mt19937_64 rng_b(81);
  for (int i = 0; i < 50; ++i) {
    const TrainingResult r = learner.step(f.channel, rng_a);
    const auto sel = select_arms(ref, cfg.selection, rng_b).selected;
    CHECK(r.arms == sel);
    std::vector<double> g;
    for (std::size_t a : sel) {
      const PairIndex p = ref.candidates[a];
      g.push_back(f.channel.strength(f.cb[p / f.cb.size()].direction, f.cb[p % f.cb.size()].direction));
    }
    CHECK(r.gammas == g);
    for (char c : r.refined) CHECK(c == 0);
    update_after_training(ref, sel, g, cfg.selection);
  }
  CHECK(to_json(learner.selection()) == to_json(ref));
  CHECK(learner.refiner_count() == 0);
}

TEST_CASE("each step measures the training budget and serves the strongest slot") {
  const Fixture f;
  BinLearner learner(f.initial(), f.cb, f.cb, config(4));
  std::mt19937_64 rng(82);
  for (int i = 0; i < 40; ++i) {
    const TrainingResult r = learner.step(f.channel, rng);
    REQUIRE(r.arms.size() == 4);
    CHECK(r.measured.size() == 4);
    CHECK(r.gammas.size() == 4);
    for (std::size_t s = 0; s < 4; ++s) {
      CHECK(r.gammas[s] == doctest::Approx(f.channel.strength(r.measured[s].tx, r.measured[s].rx)));
      CHECK(r.served_gamma() >= r.gammas[s]);
    }
  }
  CHECK(learner.selection().n == 40);
}

TEST_CASE("unrefined serving never beats the exhaustive codebook best") {
  const Fixture f;
  LearnerConfig cfg = config();
  cfg.refine_enabled = false;
  BinLearner learner(f.initial(), f.cb, f.cb, cfg);
  std::mt19937_64 rng(83);
  for (std::size_t i = 1; i <= 100; ++i) {
    const StepRecord rec = alignment_step(learner, f.channel, f.best, i, rng);
    CHECK(rec.step == i);
    CHECK(rec.xi() >= 1.0);
  }
}

TEST_CASE("refinement starts at the configured step") {
  const Fixture f;
  LearnerConfig cfg = config();
  cfg.policy = RefinePolicy::after_n;
  cfg.refine_start_step = 5;
  BinLearner learner(f.initial(), f.cb, f.cb, cfg);
  std::mt19937_64 rng(84);
  for (int i = 1; i <= 10; ++i) {
    const TrainingResult r = learner.step(f.channel, rng);
    for (char c : r.refined) CHECK(c == (i >= 5 ? 1 : 0));
  }
}

TEST_CASE("refine-after-reward only refines pairs that have won") {
  const Fixture f;
  LearnerConfig cfg = config();
  cfg.policy = RefinePolicy::after_reward;
  BinLearner learner(f.initial(), f.cb, f.cb, cfg);
  std::mt19937_64 rng(85);
  for (int i = 0; i < 60; ++i) {
    const auto before = learner.selection().x_tot;
    const TrainingResult r = learner.step(f.channel, rng);
    for (std::size_t s = 0; s < r.arms.size(); ++s) CHECK((r.refined[s] == 1) == (before[r.arms[s]] > 0));
  }
  for (std::size_t a = 0; a < learner.selection().size(); ++a) {
    const PairIndex p = learner.selection().candidates[a];
    if (learner.tree(p) != nullptr) CHECK(learner.tree(p)->samples() > 0);
  }
}

TEST_CASE("refinement beats the codebook on an offset static path") {
  const Fixture f;
  BinLearner learner(f.initial(), f.cb, f.cb, config());
  std::mt19937_64 rng(86);
  double late = 0.0;
  for (std::size_t i = 1; i <= 500; ++i) {
    const StepRecord rec = alignment_step(learner, f.channel, f.best, i, rng);
    if (i > 400) late += to_db(rec.gamma_selected / rec.gamma_best) / 100.0;
  }
  CHECK(late > 0.0);
  CHECK(learner.tree(f.best.pair) != nullptr);
}

TEST_CASE("flat refiner keeps no trees") {
  const Fixture f;
  LearnerConfig cfg = config();
  cfg.refiner = RefinerKind::flat_leaf;
  BinLearner learner(f.initial(), f.cb, f.cb, cfg);
  std::mt19937_64 rng(87);
  for (int i = 0; i < 10; ++i) learner.step(f.channel, rng);
  CHECK(learner.refiner_count() > 0);
  for (PairIndex p : learner.selection().candidates) CHECK(learner.tree(p) == nullptr);
}

TEST_CASE("invalid learner setups are rejected") {
  const Fixture f;
  CHECK_THROWS(BinLearner(f.initial(3), f.cb, f.cb, config(4)));
  const std::vector<double> avg{1.0};
  CHECK_THROWS(BinLearner(init_state({f.cb.size() * f.cb.size()}, avg), f.cb, f.cb, config(1)));
  LearnerConfig bad = config();
  bad.refinement.max_depth = 0;
  CHECK_THROWS(BinLearner(f.initial(), f.cb, f.cb, bad));
}

}  // TEST_SUITE

#include <random>

#include <benchmark/benchmark.h>

#include "beamlearn/array_codebook.hpp"
#include "beamlearn/bandit_selection.hpp"
#include "beamlearn/channel.hpp"
#include "beamlearn/experiment.hpp"
#include "beamlearn/hoo_refinement.hpp"
#include "beamlearn/scenario.hpp"

using namespace beamlearn;

namespace {

void BM_SteeringVector(benchmark::State& state) {
  const ArrayGeometry g{static_cast<int>(state.range(0)), static_cast<int>(state.range(0))};
  double az = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(steering_vector(g, {az, 30.0}));
    az += 0.1;
  }
}
BENCHMARK(BM_SteeringVector)->Arg(8)->Arg(16);

void BM_AllPairStrengths(benchmark::State& state) {
  const ArrayGeometry g{static_cast<int>(state.range(0)), static_cast<int>(state.range(0))};
  const Codebook cb = generate_codebook(g);
  const ScenarioGenerator gen(ScenarioConfig{});
  const ChannelModel model(gen.draw(0), g, g, gen.config().symbol_period_s());
  for (auto _ : state) benchmark::DoNotOptimize(model.all_pair_strengths(cb, cb));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(cb.size() * cb.size()));
}
BENCHMARK(BM_AllPairStrengths)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_HooStep(benchmark::State& state) {
  const ArrayGeometry g{16, 16};
  const Codebook cb = generate_codebook(g);
  const ChannelModel model(static_single_path(cb, cb, 1, 0.25), g, g, 1e-9 / 1.76);
  RefinementConfig cfg;
  const PairBeamwidths bw{cb[1].az_beamwidth_deg, cb[1].el_beamwidth_deg, cb[1].az_beamwidth_deg,
                          cb[1].el_beamwidth_deg};
  const auto nu = smoothness_coefficients(g, g, cfg);
  RefinementTree tree({cb[1].direction, cb[1].direction}, bw, cfg.max_depth);
  for (auto _ : state) {
    const auto path = select_node(tree);
    const auto& d = tree.node(path.back()).dirs;
    update_after_sample(tree, path, model.strength(d.tx, d.rx), cfg, nu);
  }
}
BENCHMARK(BM_HooStep);

void BM_RiskAwareSelection(benchmark::State& state) {
  const std::size_t k = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<PairIndex> cands(k);
  std::vector<double> avg(k);
  for (std::size_t i = 0; i < k; ++i) {
    cands[i] = i;
    avg[i] = u(rng);
  }
  SelectionState s = init_state(cands, avg, 5);
  SelectionConfig cfg;
  cfg.training_budget = 30;
  for (auto _ : state) {
    const auto out = select_risk_aware(s, cfg, rng);
    std::vector<double> g(out.selected.size());
    for (auto& v : g) v = u(rng);
    update_after_training(s, out.selected, g, cfg);
  }
}
BENCHMARK(BM_RiskAwareSelection)->Arg(100)->Arg(400);

}  // namespace

BENCHMARK_MAIN();

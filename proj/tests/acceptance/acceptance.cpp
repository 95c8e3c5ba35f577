// Acceptance checks. Each criterion prints one PASS/FAIL line; the exit code is the
// number of failures. Run a single criterion with --only N.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include <CLI11.hpp>

#include "beamlearn/array_codebook.hpp"
#include "beamlearn/experiment.hpp"
#include "beamlearn/metrics.hpp"
#include "beamlearn/offline_db.hpp"
#include "beamlearn/regret_verify.hpp"
#include "support.hpp"

using namespace beamlearn;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

ArrayGeometry upa16() { return {16, 16}; }

Outcome codebook_count() {
  const Codebook cb = generate_codebook(upa16());
  return {cb.size() == 271, "16x16 codebook has " + std::to_string(cb.size()) + " beams, expected 271"};
}

Outcome adjacent_crossing() {
  const ArrayGeometry g = upa16();
  const Codebook cb = generate_codebook(g);
  std::map<int, std::vector<std::size_t>> tiers;
  for (std::size_t i = 0; i < cb.size(); ++i) tiers[cb[i].tier].push_back(i);
  double worst = 0.0;
  std::size_t pairs = 0;
  for (const auto& [tier, members] : tiers) {
    // Consecutive in azimuth order; the wrap from the last beam back to the first is not a pair.
    for (std::size_t k = 0; k + 1 < members.size(); ++k) {
      const double x = testsupport::crossover_db(g, cb[members[k]], cb[members[k + 1]]);
      worst = std::max(worst, std::abs(x + 3.0));
      ++pairs;
    }
  }
  return {pairs > 0 && worst <= 0.5,
          std::to_string(pairs) + " pairs, worst |crossover + 3 dB| = " + fmt("%.4f dB", worst) + " (tol 0.5)"};
}

Outcome modularity_oracle() {
  std::mt19937_64 rng(20240611);
  std::exponential_distribution<double> fading(1.0);
  std::uniform_real_distribution<double> scale(0.2, 3.0);
  const std::size_t n = 12;
  std::vector<double> mean(n);
  for (auto& m : mean) m = scale(rng);
  std::vector<std::vector<double>> obs(200, std::vector<double>(n));
  for (auto& row : obs) {
    for (std::size_t p = 0; p < n; ++p) row[p] = mean[p] * fading(rng);
  }
  const OfflineDatabase db = build_database(obs);
  std::vector<unsigned> winner_mask;
  for (const auto& row : db.rows) winner_mask.push_back(1u << row.winner());
  auto covered = [&](unsigned mask) {
    std::size_t c = 0;
    for (unsigned w : winner_mask) c += (mask & w) ? 1 : 0;
    return c;
  };
  bool ok = true;
  std::string detail;
  for (std::size_t m = 1; m <= 6; ++m) {
    std::size_t best = 0;
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
      if (static_cast<std::size_t>(__builtin_popcount(mask)) == m) best = std::max(best, covered(mask));
    }
    unsigned greedy = 0;
    for (PairIndex p : select_min_mis_prob(db, m)) greedy |= 1u << p;
    const std::size_t got = covered(greedy);
    ok = ok && got == best;
    detail += " M=" + std::to_string(m) + ":" + std::to_string(got) + "/" + std::to_string(best);
  }
  return {ok, "winners covered greedy/brute-force of 200:" + detail};
}

Outcome theorem1(unsigned threads) {
  const SyntheticBanditSpec spec = reference_synthetic_spec();
  const BoundTrace t = run_bound_check(spec, SyntheticAlgorithm::greedy_ucb, 50, 1, threads);
  std::size_t violations = 0;
  double ratio = 0.0;
  for (std::size_t i = 0; i < t.mean_regret.size(); ++i) {
    if (t.mean_regret[i] > t.bound_t1[i]) ++violations;
    ratio = std::max(ratio, t.mean_regret[i] / t.bound_t1[i]);
  }
  const SlopeFit f = fit_regret_slope(t, 1000, 10000);
  const double rel = std::abs(f.slope) / std::abs(f.mean);
  const bool ok = violations == 0 && rel < 0.10;
  return {ok, std::to_string(violations) + " bound violations (max regret/bound " + fmt("%.4f", ratio) +
                  "); R/ln n slope " + fmt("%.4f", f.slope) + " vs mean " + fmt("%.4f", f.mean) +
                  " -> |slope|/mean " + fmt("%.3f", rel) + " (tol 0.10)"};
}

Outcome theorem2(unsigned threads) {
  const SyntheticBanditSpec spec = reference_synthetic_spec(0.7);
  const BoundTrace t = run_bound_check(spec, SyntheticAlgorithm::risk_aware_fixed, 50, 2, threads);
  std::size_t violations = 0;
  std::size_t order = 0;
  double ratio = 0.0;
  for (std::size_t i = 0; i < t.mean_regret.size(); ++i) {
    if (t.mean_regret[i] > t.bound_t2[i]) ++violations;
    if (i + 1 >= 3 && t.bound_t2[i] < t.bound_t1[i]) ++order;
    ratio = std::max(ratio, t.mean_regret[i] / t.bound_t2[i]);
  }
  return {violations == 0 && order == 0,
          std::to_string(violations) + " bound violations (max regret/bound " + fmt("%.4f", ratio) + "), " +
              std::to_string(order) + " points with bound_t2 < bound_t1"};
}

ExperimentConfig scenario_config(unsigned threads) {
  ExperimentConfig cfg;
  cfg.tx_array = upa16();
  cfg.rx_array = upa16();
  cfg.n_runs = 20;
  cfg.horizon = 2000;
  cfg.pool_size = 10000;
  cfg.learner.selection.training_budget = 30;
  cfg.learner.selection.risk_threshold_db = 5.0;
  cfg.threads = threads;
  return cfg;
}

Outcome risk_direction(unsigned threads) {
  ExperimentConfig base = scenario_config(threads);
  base.learner.refine_enabled = false;
  ExperimentConfig alg1 = base;
  apply_preset(alg1, "alg1");
  ExperimentConfig alg2 = base;
  apply_preset(alg2, "alg2");
  const auto res = compare_variants({{"alg2", alg2}, {"alg1", alg1}});
  const std::size_t min_cands = *std::min_element(res[0].candidate_counts.begin(), res[0].candidate_counts.end());
  std::size_t bad = 0;
  double worst = -1.0;
  for (std::size_t step = 100; step <= 1000; ++step) {
    const double d = res[0].loss_3db[step - 1] - res[1].loss_3db[step - 1];
    if (!(d < 0.0)) ++bad;
    worst = std::max(worst, d);
  }
  return {bad == 0 && min_cands >= 100,
          "min |B| " + std::to_string(min_cands) + "; " + std::to_string(bad) +
              " steps in [100,1000] where alg2 3dB-loss >= alg1 (max difference " + fmt("%.4f", worst) + ")"};
}

std::vector<PairIndex> top_by(const std::vector<double>& score, const std::vector<PairIndex>& ids, std::size_t m) {
  std::vector<std::size_t> order(score.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return score[a] > score[b]; });
  std::vector<PairIndex> out;
  for (std::size_t k = 0; k < m && k < order.size(); ++k) out.push_back(ids[order[k]]);
  return out;
}

Outcome reward_fidelity(unsigned threads) {
  ExperimentConfig cfg = scenario_config(threads);
  cfg.learner.refine_enabled = false;
  const ChannelPool train = build_pool(cfg);
  const RunTrace run = simulate_run(cfg, train, 0);
  const SelectionState& s = run.final_state;
  std::vector<double> learned(s.size());
  for (std::size_t a = 0; a < s.size(); ++a) learned[a] = s.p_opt_hat(a);
  const auto learned_top = top_by(learned, s.candidates, 30);

  std::vector<std::size_t> all(train.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  const auto exact = brute_force_p_opt(train, all);
  std::vector<PairIndex> ids(exact.size());
  std::iota(ids.begin(), ids.end(), PairIndex{0});
  const auto exact_top = top_by(exact, ids, 30);

  ExperimentConfig held = cfg;
  held.master_seed = cfg.master_seed + 1000;
  held.pool_size = 500;
  const ChannelPool test = build_pool(held);
  std::vector<std::size_t> entries(test.size());
  std::iota(entries.begin(), entries.end(), std::size_t{0});
  const double threshold = from_db(3.0);
  const double p_learned = subset_power_loss_probability(test, entries, learned_top, threshold);
  const double p_exact = subset_power_loss_probability(test, entries, exact_top, threshold);
  const double diff = std::abs(p_learned - p_exact);
  return {diff <= 0.02, "held-out 3dB loss: learned top-30 " + fmt("%.4f", p_learned) + ", brute-force top-30 " +
                            fmt("%.4f", p_exact) + ", |diff| " + fmt("%.4f", diff) + " (tol 0.02)"};
}

Outcome hoo_vs_flat(unsigned threads) {
  RefinementTrialConfig cfg;
  cfg.tx_array = upa16();
  cfg.rx_array = upa16();
  cfg.refinement.max_depth = 3;
  cfg.refinement.alpha_norm = 0.0;
  cfg.n_runs = 20;
  cfg.horizon = 1000;
  cfg.threads = threads;
  const RefinementTrialResult r = run_refinement_trial(cfg);
  std::size_t bad = 0;
  double margin = 1e300;
  for (std::size_t step = 50; step <= 500; ++step) {
    const double d = r.hoo_gain_db[step - 1] - r.flat_gain_db[step - 1];
    if (!(d > 0.0)) ++bad;
    margin = std::min(margin, d);
  }
  const double gap = std::abs(r.hoo_final_gain_db - r.grid_optimum_db);
  return {bad == 0 && gap <= 0.2,
          std::to_string(bad) + " steps in [50,500] with HOO <= flat (min margin " + fmt("%.3f dB", margin) +
              "); HOO final " + fmt("%.3f dB", r.hoo_final_gain_db) + " vs grid optimum " +
              fmt("%.3f dB", r.grid_optimum_db) + " (tol 0.2)"};
}

Outcome lemma() {
  const auto pts = lemma_sweep(upa16(), 81);
  double worst = 1e300;
  std::size_t n = 0;
  for (const auto& p : pts) {
    if (!p.in_domain) continue;
    ++n;
    worst = std::min(worst, p.slack);
  }
  return {n > 0 && worst >= -1e-9,
          std::to_string(n) + " in-domain grid points, minimum slack " + fmt("%.3e", worst) + " (tol -1e-9)"};
}

Outcome integrated_gain(unsigned threads) {
  ExperimentConfig cfg = scenario_config(threads);
  apply_preset(cfg, "refine-all");
  const CampaignResult scen = run_campaign(cfg, build_pool(cfg));
  double scen_min = 1e300;
  for (std::size_t step = 200; step <= cfg.horizon; ++step) scen_min = std::min(scen_min, scen.gain_db[step - 1]);

  ExperimentConfig st = cfg;
  st.channel = ChannelSource::static_single_path;
  const CampaignResult stat = run_campaign(st, build_pool(st));
  double stat_min = 1e300;
  for (std::size_t step = 200; step <= st.horizon; ++step) stat_min = std::min(stat_min, stat.gain_db[step - 1]);

  return {scen_min >= 0.0 && stat_min > 0.2,
          "smoothed gain from step 200: scenario min " + fmt("%.3f dB", scen_min) + " (>= 0), static min " +
              fmt("%.3f dB", stat_min) + " (> 0.2)"};
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism() {
  const auto dir = std::filesystem::temp_directory_path() / ("beamlearn_acceptance_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  ExperimentConfig cfg = scenario_config(1);
  cfg.pool_size = 300;
  cfg.n_runs = 8;
  cfg.horizon = 300;
  auto run = [&](unsigned threads, const std::string& tag) {
    ExperimentConfig c = cfg;
    c.threads = threads;
    c.out_csv = (dir / (tag + ".csv")).string();
    c.out_manifest = (dir / (tag + ".json")).string();
    run_campaign_to_files(c);
    return read_file(c.out_csv);
  };
  const std::string a = run(1, "serial");
  const std::string b = run(1, "serial_again");
  const std::string c = run(4, "parallel");
  std::filesystem::remove_all(dir);
  const bool ok = !a.empty() && a == b && a == c;
  return {ok, "serial rerun " + std::string(a == b ? "identical" : "differs") + ", 4 threads " +
                  std::string(a == c ? "identical" : "differs") + " (" + std::to_string(a.size()) + " bytes)"};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"beamlearn acceptance checks"};
  int only = 0;
  unsigned threads = 0;
  app.add_option("--only", only, "Run a single criterion (1-11)")->check(CLI::Range(1, 11));
  app.add_option("--threads", threads, "Worker threads for the simulation criteria (0 = all cores)");
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"codebook count", codebook_count},
      {"adjacent-beam crossover", adjacent_crossing},
      {"min-misalignment modularity", modularity_oracle},
      {"greedy regret bound and slope", [&] { return theorem1(threads); }},
      {"risk-aware regret bound", [&] { return theorem2(threads); }},
      {"risk-awareness direction", [&] { return risk_direction(threads); }},
      {"reward-signal fidelity", [&] { return reward_fidelity(threads); }},
      {"HOO versus flat leaf bandit", [&] { return hoo_vs_flat(threads); }},
      {"smoothness inequality", lemma},
      {"integrated refinement gain", [&] { return integrated_gain(threads); }},
      {"determinism", determinism},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int n = static_cast<int>(i) + 1;
    if (only != 0 && only != n) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s criterion %d (%s): %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", n, criteria[i].first,
                o.detail.c_str(), secs);
    std::fflush(stdout);
    if (!o.pass) ++failures;
  }
  return failures;
}

// Seeded simulation campaigns: channel pool, per-run learners, aggregation and output.
//
// Seeds: the scenario stream is derive_seed(master, scenario, 0); run r permutes the
// pool with derive_seed(master, permutation, r) and drives its learner with
// derive_seed(master, selection, r). Runs only write their own slot, so results do not
// depend on the thread count.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "beamlearn/scenario.hpp"
#include "beamlearn/two_layer.hpp"

namespace beamlearn {

enum class ChannelSource {
  scenario,            // street-canyon draws
  static_single_path,  // one fixed path offset from a codebook pair
};

struct ExperimentConfig {
  ScenarioConfig scenario;
  ArrayGeometry tx_array;
  ArrayGeometry rx_array;
  std::size_t offline_n = 5;
  std::size_t screen_c = 200;
  LearnerConfig learner;
  std::uint64_t horizon = 2000;
  std::size_t n_runs = 100;
  std::size_t window = 50;
  std::size_t pool_size = 10000;
  ChannelSource channel = ChannelSource::scenario;
  std::size_t static_beam = 1;           // codebook index used on both sides
  double static_offset_fraction = 0.25;  // path offset in elevation, fraction of the beamwidth
  std::uint64_t master_seed = 1;
  unsigned threads = 0;  // 0 = hardware concurrency
  std::string out_csv = "campaign.csv";
  std::string out_manifest = "campaign.json";

  void validate() const;
};

// Gains below this are reported at the floor so that outages stay finite in averages.
constexpr double kGainFloorDb = -100.0;

struct ChannelPool {
  Codebook tx;
  Codebook rx;
  std::vector<ChannelModel> models;
  std::vector<BestPair> best;  // exhaustive codebook best per entry
  std::uint64_t scenario_seed = 0;

  std::size_t size() const { return models.size(); }
};

ChannelPool build_pool(const ExperimentConfig& cfg);
// Same channels with codebooks supplied by the caller.
ChannelPool build_pool(const ExperimentConfig& cfg, Codebook tx, Codebook rx);

// Single path whose departure and arrival directions sit `offset_fraction` of the
// elevation beamwidth above beam `beam` of each codebook.
ChannelRealization static_single_path(const Codebook& tx, const Codebook& rx, std::size_t beam,
                                      double offset_fraction);

// Pool entries used by run `run`: the first offline_n build its database, the rest
// are consumed cyclically by the online steps.
std::vector<std::size_t> run_permutation(const ExperimentConfig& cfg, std::size_t pool_size,
                                         std::size_t run);

struct RunTrace {
  std::vector<double> gain_db;  // served over exhaustive best, floored
  std::vector<char> loss_3db;
  std::vector<char> misaligned;  // xi > 1
  std::size_t candidates = 0;
  SelectionState final_state;
};

RunTrace simulate_run(const ExperimentConfig& cfg, const ChannelPool& pool, std::size_t run);

struct CampaignResult {
  // Means across runs per step.
  std::vector<double> raw_gain_db;
  std::vector<double> raw_loss_3db;
  std::vector<double> raw_misalign;
  // Trailing moving averages of the above.
  std::vector<double> gain_db;
  std::vector<double> loss_3db;
  std::vector<double> misalign;
  std::vector<double> cumulative_misalign;  // running sum of raw_misalign
  std::vector<std::size_t> candidate_counts;  // per run
};

CampaignResult run_campaign(const ExperimentConfig& cfg, const ChannelPool& pool);

// Columns: step, mean_gain_db, p_loss_3db, p_misalign, cum_misalign, raw_gain_db,
// raw_p_loss_3db, raw_p_misalign.
void write_campaign_csv(std::ostream& os, const CampaignResult& result);
void write_manifest(std::ostream& os, const ExperimentConfig& cfg, const ChannelPool& pool,
                    const CampaignResult& result);

// Builds the pool, runs the campaign and writes cfg.out_csv and cfg.out_manifest.
CampaignResult run_campaign_to_files(const ExperimentConfig& cfg);

struct Variant {
  std::string name;
  ExperimentConfig config;
};

// Runs every variant on one shared pool. Variants must agree on horizon, scenario,
// arrays, channel source, pool size and master seed.
std::vector<CampaignResult> compare_variants(const std::vector<Variant>& variants);
std::vector<CampaignResult> compare_variants(const std::vector<Variant>& variants,
                                             const ChannelPool& pool);

// Columns: step, then <name>_mean_gain_db, <name>_p_loss_3db, <name>_p_misalign per variant.
void write_comparison_csv(std::ostream& os, const std::vector<Variant>& variants,
                          const std::vector<CampaignResult>& results);

// Applies a named preset to cfg: alg1, alg2, hoo, flat, no-refine, refine-all,
// refine-after-reward, refine-after-n. Throws on an unknown name.
void apply_preset(ExperimentConfig& cfg, const std::string& name);

// Fraction of pool entries `entries` where the best pair of `subset` loses more than
// threshold against the exhaustive best.
double subset_power_loss_probability(const ChannelPool& pool, const std::vector<std::size_t>& entries,
                                     const std::vector<PairIndex>& subset, double threshold);

// Winner frequency per pair over pool entries `entries`, indexed by pair.
std::vector<double> brute_force_p_opt(const ChannelPool& pool, const std::vector<std::size_t>& entries);

// Single-pair refinement on a static single-path channel: HOO against the flat leaf
// bandit, each run offsetting the path by offset_fraction of the beamwidth along a
// random coordinate on each side.
struct RefinementTrialConfig {
  ArrayGeometry tx_array;
  ArrayGeometry rx_array;
  std::size_t beam = 1;
  double offset_fraction = 0.25;
  RefinementConfig refinement;
  std::uint64_t horizon = 1000;
  std::size_t n_runs = 20;
  std::size_t grid_points = 41;  // per coordinate of the optimum search
  std::uint64_t master_seed = 1;
  unsigned threads = 0;
};

struct RefinementTrialResult {
  std::vector<double> hoo_gain_db;   // mean per step, relative to the codebook pair
  std::vector<double> flat_gain_db;
  double hoo_final_gain_db = 0.0;    // mean over runs of the last step
  double grid_optimum_db = 0.0;      // mean over runs
};

RefinementTrialResult run_refinement_trial(const RefinementTrialConfig& cfg);

// Lemma check on the broadside pattern g(deviation) of one array: for phi* = 0, phi0
// on a grid over +-beamwidth/2 and delta in {bw/8, bw/4, bw/2}, slack =
// g(phi* - phi0) / g(delta) - g(0) wherever |phi* - phi0| <= delta.
struct LemmaPoint {
  double phi0_deg = 0.0;
  double delta_deg = 0.0;
  double slack = 0.0;
  bool in_domain = false;
};

std::vector<LemmaPoint> lemma_sweep(const ArrayGeometry& geom, std::size_t grid_points = 81);
void write_lemma_csv(std::ostream& os, const std::vector<LemmaPoint>& points);

}  // namespace beamlearn

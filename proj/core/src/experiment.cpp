#include "beamlearn/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <optional>
#include <ostream>
#include <random>
#include <stdexcept>

#include <json.hpp>

#include "beamlearn/config_file.hpp"
#include "beamlearn/offline_db.hpp"
#include "beamlearn/parallel.hpp"
#include "beamlearn/seeding.hpp"

namespace beamlearn {

namespace {

const double kLoss3dB = from_db(3.0);

double gain_db(double served, double best) {
  if (best <= 0.0) return 0.0;
  if (served <= 0.0) return kGainFloorDb;
  return std::max(to_db(served / best), kGainFloorDb);
}

std::size_t pool_entries(const ExperimentConfig& cfg) {
  return cfg.channel == ChannelSource::static_single_path ? 1 : cfg.pool_size;
}

bool same_channels(const ExperimentConfig& a, const ExperimentConfig& b) {
  const ScenarioConfig& s = a.scenario;
  const ScenarioConfig& t = b.scenario;
  const bool scenario_equal =
      s.bin_center_m == t.bin_center_m && s.bin_half_width_m == t.bin_half_width_m &&
      s.carrier_ghz == t.carrier_ghz && s.bandwidth_ghz == t.bandwidth_ghz &&
      s.bs_height_m == t.bs_height_m && s.mu_height_m == t.mu_height_m &&
      s.mu_lane_y_m == t.mu_lane_y_m && s.near_wall_y_m == t.near_wall_y_m &&
      s.far_wall_y_m == t.far_wall_y_m && s.reflection_loss_db == t.reflection_loss_db &&
      s.blockers_enabled == t.blockers_enabled && s.truck_lane_y_m == t.truck_lane_y_m &&
      s.truck_length_m == t.truck_length_m && s.truck_width_m == t.truck_width_m &&
      s.truck_height_m == t.truck_height_m && s.blocker_gap_shape == t.blocker_gap_shape &&
      s.blocker_gap_scale_m == t.blocker_gap_scale_m && s.blockage_loss_db == t.blockage_loss_db;
  return scenario_equal && a.tx_array == b.tx_array && a.rx_array == b.rx_array &&
         a.channel == b.channel && pool_entries(a) == pool_entries(b) &&
         a.static_beam == b.static_beam && a.static_offset_fraction == b.static_offset_fraction &&
         a.master_seed == b.master_seed;
}

void write_number(std::ostream& os, double v) {
  if (std::isnan(v)) {
    os << "nan";
  } else {
    os << v;
  }
}

}  // namespace

void ExperimentConfig::validate() const {
  scenario.validate();
  tx_array.validate();
  rx_array.validate();
  if (horizon < 1) throw std::invalid_argument("horizon must be at least 1");
  if (n_runs < 1) throw std::invalid_argument("n_runs must be at least 1");
  if (window < 1) throw std::invalid_argument("window must be at least 1");
  if (offline_n < 1) throw std::invalid_argument("offline_n must be at least 1");
  if (screen_c < 1) throw std::invalid_argument("screen_c must be at least 1");
  if (channel == ChannelSource::scenario && pool_size <= offline_n) {
    throw std::invalid_argument("pool_size must exceed offline_n");
  }
  if (!(static_offset_fraction >= 0.0 && static_offset_fraction <= 0.5)) {
    throw std::invalid_argument("static_offset_fraction must lie in [0, 0.5]");
  }
  learner.refinement.validate();
  if (learner.selection.training_budget < 1) {
    throw std::invalid_argument("training budget must be at least 1");
  }
}

ChannelRealization static_single_path(const Codebook& tx, const Codebook& rx, std::size_t beam,
                                      double offset_fraction) {
  if (beam >= tx.size() || beam >= rx.size()) throw std::invalid_argument("static beam out of range");
  const Beam& bt = tx[beam];
  const Beam& br = rx[beam];
  PathComponent p;
  p.gain = {1e-3, 0.0};
  p.delay_s = 0.0;
  p.aod = perturb(bt.direction, 2, 0.0, offset_fraction * bt.el_beamwidth_deg);
  p.aoa = perturb(br.direction, 2, 0.0, offset_fraction * br.el_beamwidth_deg);
  ChannelRealization ch;
  ch.paths.push_back(p);
  return ch;
}

ChannelPool build_pool(const ExperimentConfig& cfg) {
  cfg.validate();
  Codebook tx = generate_codebook(cfg.tx_array);
  Codebook rx = cfg.rx_array == cfg.tx_array ? tx : generate_codebook(cfg.rx_array);
  return build_pool(cfg, std::move(tx), std::move(rx));
}

ChannelPool build_pool(const ExperimentConfig& cfg, Codebook tx, Codebook rx) {
  cfg.validate();
  if (!(tx.geometry == cfg.tx_array) || !(rx.geometry == cfg.rx_array)) {
    throw std::invalid_argument("codebook geometry does not match the configured arrays");
  }
  ChannelPool pool;
  pool.tx = std::move(tx);
  pool.rx = std::move(rx);
  ScenarioConfig sc = cfg.scenario;
  sc.rng_seed = derive_seed(cfg.master_seed, SeedStream::scenario, 0);
  pool.scenario_seed = sc.rng_seed;
  const double period = sc.symbol_period_s();

  if (cfg.channel == ChannelSource::static_single_path) {
    ChannelModel model(static_single_path(pool.tx, pool.rx, cfg.static_beam, cfg.static_offset_fraction),
                       cfg.tx_array, cfg.rx_array, period);
    pool.best.push_back(model.exhaustive_best(pool.tx, pool.rx));
    pool.models.push_back(std::move(model));
    return pool;
  }

  const ScenarioGenerator gen(sc);
  const std::size_t n = cfg.pool_size;
  std::vector<std::optional<ChannelModel>> models(n);
  pool.best.resize(n);
  parallel_for(n, cfg.threads, [&](std::size_t i) {
    models[i].emplace(gen.draw(i), cfg.tx_array, cfg.rx_array, period);
    pool.best[i] = models[i]->exhaustive_best(pool.tx, pool.rx);
  });
  pool.models.reserve(n);
  for (auto& m : models) pool.models.push_back(std::move(*m));
  return pool;
}

std::vector<std::size_t> run_permutation(const ExperimentConfig& cfg, std::size_t pool_size,
                                         std::size_t run) {
  std::vector<std::size_t> perm(pool_size);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::mt19937_64 rng(derive_seed(cfg.master_seed, SeedStream::permutation, run));
  for (std::size_t i = pool_size; i > 1; --i) {
    std::uniform_int_distribution<std::size_t> pick(0, i - 1);
    std::swap(perm[i - 1], perm[pick(rng)]);
  }
  return perm;
}

RunTrace simulate_run(const ExperimentConfig& cfg, const ChannelPool& pool, std::size_t run) {
  if (pool.size() == 0) throw std::invalid_argument("empty channel pool");
  const auto perm = run_permutation(cfg, pool.size(), run);
  auto entry = [&](std::size_t k) { return perm[k % perm.size()]; };

  std::vector<std::vector<double>> measurements;
  measurements.reserve(cfg.offline_n);
  for (std::size_t k = 0; k < cfg.offline_n; ++k) {
    measurements.push_back(pool.models[entry(k)].all_pair_strengths(pool.tx, pool.rx));
  }
  const OfflineDatabase db = build_database(measurements);
  const auto candidates = screen_candidates(db, std::min(cfg.screen_c, db.universe_size()));

  RunTrace trace;
  trace.candidates = candidates.size();
  BinLearner learner(init_state(candidates, db), pool.tx, pool.rx, cfg.learner);
  std::mt19937_64 rng(derive_seed(cfg.master_seed, SeedStream::selection, run));

  trace.gain_db.resize(cfg.horizon);
  trace.loss_3db.resize(cfg.horizon);
  trace.misaligned.resize(cfg.horizon);
  for (std::uint64_t t = 0; t < cfg.horizon; ++t) {
    const std::size_t e = entry(cfg.offline_n + t);
    const StepRecord rec = alignment_step(learner, pool.models[e], pool.best[e], t + 1, rng);
    const double xi = rec.xi();
    trace.gain_db[t] = gain_db(rec.gamma_selected, rec.gamma_best);
    trace.loss_3db[t] = xi > kLoss3dB;
    trace.misaligned[t] = xi > 1.0;
  }
  trace.final_state = learner.selection();
  return trace;
}

CampaignResult run_campaign(const ExperimentConfig& cfg, const ChannelPool& pool) {
  cfg.validate();
  std::vector<RunTrace> runs(cfg.n_runs);
  parallel_for(cfg.n_runs, cfg.threads, [&](std::size_t r) { runs[r] = simulate_run(cfg, pool, r); });

  const std::size_t h = cfg.horizon;
  CampaignResult out;
  out.raw_gain_db.assign(h, 0.0);
  out.raw_loss_3db.assign(h, 0.0);
  out.raw_misalign.assign(h, 0.0);
  for (const auto& r : runs) {
    for (std::size_t t = 0; t < h; ++t) {
      out.raw_gain_db[t] += r.gain_db[t];
      out.raw_loss_3db[t] += r.loss_3db[t];
      out.raw_misalign[t] += r.misaligned[t];
    }
    out.candidate_counts.push_back(r.candidates);
  }
  const double inv = 1.0 / static_cast<double>(cfg.n_runs);
  for (std::size_t t = 0; t < h; ++t) {
    out.raw_gain_db[t] *= inv;
    out.raw_loss_3db[t] *= inv;
    out.raw_misalign[t] *= inv;
  }
  out.gain_db = moving_average(out.raw_gain_db, cfg.window);
  out.loss_3db = moving_average(out.raw_loss_3db, cfg.window);
  out.misalign = moving_average(out.raw_misalign, cfg.window);
  out.cumulative_misalign.resize(h);
  double acc = 0.0;
  for (std::size_t t = 0; t < h; ++t) {
    acc += out.raw_misalign[t];
    out.cumulative_misalign[t] = acc;
  }
  return out;
}

void write_campaign_csv(std::ostream& os, const CampaignResult& r) {
  const auto old_precision = os.precision(12);
  os << "step,mean_gain_db,p_loss_3db,p_misalign,cum_misalign,raw_gain_db,raw_p_loss_3db,"
        "raw_p_misalign\n";
  for (std::size_t t = 0; t < r.gain_db.size(); ++t) {
    os << (t + 1);
    for (double v : {r.gain_db[t], r.loss_3db[t], r.misalign[t], r.cumulative_misalign[t],
                     r.raw_gain_db[t], r.raw_loss_3db[t], r.raw_misalign[t]}) {
      os << ',';
      write_number(os, v);
    }
    os << '\n';
  }
  os.precision(old_precision);
}

void write_manifest(std::ostream& os, const ExperimentConfig& cfg, const ChannelPool& pool,
                    const CampaignResult& result) {
  nlohmann::json j;
  j["config"] = nlohmann::json::parse(config_to_json(cfg));
  j["seeds"]["master"] = cfg.master_seed;
  j["seeds"]["scenario"] = pool.scenario_seed;
  j["seeds"]["rule"] = "derive_seed(parent, stream, index) = splitmix64(parent ^ "
                       "splitmix64(stream * 0x100000001b3 + index))";
  nlohmann::json runs = nlohmann::json::array();
  for (std::size_t r = 0; r < cfg.n_runs; ++r) {
    runs.push_back({{"run", r},
                    {"permutation_seed", derive_seed(cfg.master_seed, SeedStream::permutation, r)},
                    {"selection_seed", derive_seed(cfg.master_seed, SeedStream::selection, r)},
                    {"candidates", r < result.candidate_counts.size() ? result.candidate_counts[r] : 0}});
  }
  j["runs"] = runs;
  j["pool"] = {{"entries", pool.size()}, {"tx_codebook", pool.tx.size()}, {"rx_codebook", pool.rx.size()}};
  j["columns"] = {"step", "mean_gain_db", "p_loss_3db", "p_misalign", "cum_misalign",
                  "raw_gain_db", "raw_p_loss_3db", "raw_p_misalign"};
  j["gain_floor_db"] = kGainFloorDb;
  os << j.dump(2) << '\n';
}

CampaignResult run_campaign_to_files(const ExperimentConfig& cfg) {
  cfg.validate();
  std::ofstream csv(cfg.out_csv);
  if (!csv) throw std::runtime_error("cannot open " + cfg.out_csv + " for writing");
  std::ofstream manifest(cfg.out_manifest);
  if (!manifest) throw std::runtime_error("cannot open " + cfg.out_manifest + " for writing");
  const ChannelPool pool = build_pool(cfg);
  const CampaignResult result = run_campaign(cfg, pool);
  write_campaign_csv(csv, result);
  write_manifest(manifest, cfg, pool, result);
  if (!csv || !manifest) throw std::runtime_error("failed writing campaign output");
  return result;
}

std::vector<CampaignResult> compare_variants(const std::vector<Variant>& variants) {
  if (variants.empty()) throw std::invalid_argument("no variants to compare");
  const ChannelPool pool = build_pool(variants.front().config);
  return compare_variants(variants, pool);
}

std::vector<CampaignResult> compare_variants(const std::vector<Variant>& variants,
                                             const ChannelPool& pool) {
  if (variants.empty()) throw std::invalid_argument("no variants to compare");
  const ExperimentConfig& first = variants.front().config;
  for (const auto& v : variants) {
    if (v.config.horizon != first.horizon) throw std::invalid_argument("variant horizons differ");
    if (!same_channels(v.config, first)) {
      throw std::invalid_argument("variants must share scenario, arrays and seed");
    }
  }
  std::vector<CampaignResult> out;
  out.reserve(variants.size());
  for (const auto& v : variants) out.push_back(run_campaign(v.config, pool));
  return out;
}

void write_comparison_csv(std::ostream& os, const std::vector<Variant>& variants,
                          const std::vector<CampaignResult>& results) {
  if (variants.size() != results.size()) throw std::invalid_argument("variant/result count mismatch");
  const auto old_precision = os.precision(12);
  os << "step";
  for (const auto& v : variants) {
    os << ',' << v.name << "_mean_gain_db," << v.name << "_p_loss_3db," << v.name << "_p_misalign";
  }
  os << '\n';
  const std::size_t h = results.empty() ? 0 : results.front().gain_db.size();
  for (std::size_t t = 0; t < h; ++t) {
    os << (t + 1);
    for (const auto& r : results) {
      for (double v : {r.gain_db[t], r.loss_3db[t], r.misalign[t]}) {
        os << ',';
        write_number(os, v);
      }
    }
    os << '\n';
  }
  os.precision(old_precision);
}

void apply_preset(ExperimentConfig& cfg, const std::string& name) {
  LearnerConfig& l = cfg.learner;
  if (name == "alg1") {
    l.selection.risk_aware = false;
  } else if (name == "alg2") {
    l.selection.risk_aware = true;
  } else if (name == "hoo") {
    l.refine_enabled = true;
    l.refiner = RefinerKind::hoo;
  } else if (name == "flat") {
    l.refine_enabled = true;
    l.refiner = RefinerKind::flat_leaf;
  } else if (name == "no-refine") {
    l.refine_enabled = false;
  } else if (name == "refine-all") {
    l.refine_enabled = true;
    l.policy = RefinePolicy::all;
  } else if (name == "refine-after-reward") {
    l.refine_enabled = true;
    l.policy = RefinePolicy::after_reward;
  } else if (name == "refine-after-n") {
    l.refine_enabled = true;
    l.policy = RefinePolicy::after_n;
  } else {
    throw std::invalid_argument("unknown variant preset: " + name);
  }
}

double subset_power_loss_probability(const ChannelPool& pool, const std::vector<std::size_t>& entries,
                                     const std::vector<PairIndex>& subset, double threshold) {
  if (entries.empty()) return 0.0;
  const std::size_t nr = pool.rx.size();
  std::size_t losses = 0;
  for (std::size_t e : entries) {
    const ChannelModel& m = pool.models[e];
    double served = 0.0;
    for (PairIndex p : subset) {
      served = std::max(served, m.strength(pool.tx[p / nr].direction, pool.rx[p % nr].direction));
    }
    if (power_loss(pool.best[e].strength, served) > threshold) ++losses;
  }
  return static_cast<double>(losses) / static_cast<double>(entries.size());
}

std::vector<double> brute_force_p_opt(const ChannelPool& pool, const std::vector<std::size_t>& entries) {
  std::vector<double> p(pool.tx.size() * pool.rx.size(), 0.0);
  if (entries.empty()) return p;
  for (std::size_t e : entries) p[pool.best[e].pair] += 1.0;
  for (double& v : p) v /= static_cast<double>(entries.size());
  return p;
}

namespace {

struct SideGrid {
  PointingDirection best;
  double gain = -1.0;
};

// Largest pattern gain toward `target` over the box root +- beamwidth/2.
SideGrid grid_search_side(const ArrayGeometry& geom, const Beam& beam, const PointingDirection& target,
                          std::size_t points) {
  SideGrid out;
  const double step_az = beam.az_beamwidth_deg / static_cast<double>(points - 1);
  const double step_el = beam.el_beamwidth_deg / static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) {
    for (std::size_t j = 0; j < points; ++j) {
      const PointingDirection d =
          normalized({beam.direction.azimuth_deg - 0.5 * beam.az_beamwidth_deg + step_az * i,
                      beam.direction.elevation_deg - 0.5 * beam.el_beamwidth_deg + step_el * j});
      const double g = beam_power_gain(geom, d, target);
      if (g > out.gain) out = {d, g};
    }
  }
  return out;
}

}  // namespace

RefinementTrialResult run_refinement_trial(const RefinementTrialConfig& cfg) {
  cfg.refinement.validate();
  if (cfg.horizon < 1 || cfg.n_runs < 1) throw std::invalid_argument("horizon and n_runs must be positive");
  if (cfg.grid_points < 2) throw std::invalid_argument("grid needs at least two points per axis");
  const Codebook tx = generate_codebook(cfg.tx_array);
  const Codebook rx = cfg.rx_array == cfg.tx_array ? tx : generate_codebook(cfg.rx_array);
  if (cfg.beam >= tx.size() || cfg.beam >= rx.size()) throw std::invalid_argument("beam out of range");
  const Beam& bt = tx[cfg.beam];
  const Beam& br = rx[cfg.beam];
  const BeamPairDirections root{bt.direction, br.direction};
  const PairBeamwidths bw{bt.az_beamwidth_deg, bt.el_beamwidth_deg, br.az_beamwidth_deg, br.el_beamwidth_deg};
  const auto nu = smoothness_coefficients(cfg.tx_array, cfg.rx_array, cfg.refinement);
  const double period = ScenarioConfig{}.symbol_period_s();
  const std::size_t h = cfg.horizon;

  struct PerRun {
    std::vector<double> hoo, flat;
    double optimum = 0.0;
  };
  std::vector<PerRun> runs(cfg.n_runs);
  parallel_for(cfg.n_runs, cfg.threads, [&](std::size_t r) {
    std::mt19937_64 rng(derive_seed(cfg.master_seed, SeedStream::run, r));
    std::uniform_int_distribution<int> option(0, 3);
    const int tx_opt = option(rng);
    const int rx_opt = option(rng);
    PathComponent p;
    p.gain = {1e-3, 0.0};
    p.aod = perturb(bt.direction, tx_opt, cfg.offset_fraction * bw.tx_az, cfg.offset_fraction * bw.tx_el);
    p.aoa = perturb(br.direction, rx_opt, cfg.offset_fraction * bw.rx_az, cfg.offset_fraction * bw.rx_el);
    ChannelRealization ch;
    ch.paths.push_back(p);
    const ChannelModel model(ch, cfg.tx_array, cfg.rx_array, period);
    const double ref = model.strength(root.tx, root.rx);

    PerRun& out = runs[r];
    out.hoo.resize(h);
    out.flat.resize(h);
    RefinementTree tree(root, bw, cfg.refinement.max_depth);
    FlatLeafBandit flat(root, bw, cfg.refinement);
    for (std::size_t t = 0; t < h; ++t) {
      const auto path = select_node(tree);
      const BeamPairDirections d = tree.node(path.back()).dirs;
      const double g = model.strength(d.tx, d.rx);
      update_after_sample(tree, path, g, cfg.refinement, nu);
      out.hoo[t] = gain_db(g, ref);

      const std::size_t leaf = flat.select();
      const BeamPairDirections fd = flat.arm(leaf);
      const double fg = model.strength(fd.tx, fd.rx);
      flat.update(leaf, fg);
      out.flat[t] = gain_db(fg, ref);
    }
    const SideGrid gt = grid_search_side(cfg.tx_array, bt, p.aod, cfg.grid_points);
    const SideGrid gr = grid_search_side(cfg.rx_array, br, p.aoa, cfg.grid_points);
    out.optimum = gain_db(model.strength(gt.best, gr.best), ref);
  });

  RefinementTrialResult res;
  res.hoo_gain_db.assign(h, 0.0);
  res.flat_gain_db.assign(h, 0.0);
  const double inv = 1.0 / static_cast<double>(cfg.n_runs);
  for (const auto& r : runs) {
    for (std::size_t t = 0; t < h; ++t) {
      res.hoo_gain_db[t] += r.hoo[t] * inv;
      res.flat_gain_db[t] += r.flat[t] * inv;
    }
    res.grid_optimum_db += r.optimum * inv;
  }
  res.hoo_final_gain_db = res.hoo_gain_db.back();
  return res;
}

std::vector<LemmaPoint> lemma_sweep(const ArrayGeometry& geom, std::size_t grid_points) {
  geom.validate();
  if (grid_points < 2) throw std::invalid_argument("grid needs at least two points");
  const PointingDirection boresight{0.0, 0.0};
  const double bw = half_power_beamwidth(geom, boresight, CutAxis::elevation);
  const double n = geom.element_count();
  auto g = [&](double deviation) {
    return beam_power_gain(geom, boresight, along_cut(boresight, CutAxis::elevation, deviation)) / n;
  };
  const double peak = g(0.0);
  std::vector<LemmaPoint> out;
  for (double frac : {0.125, 0.25, 0.5}) {
    const double delta = frac * bw;
    const double denom = g(delta);
    for (std::size_t i = 0; i < grid_points; ++i) {
      const double phi0 = -0.5 * bw + bw * static_cast<double>(i) / static_cast<double>(grid_points - 1);
      LemmaPoint p;
      p.phi0_deg = phi0;
      p.delta_deg = delta;
      p.in_domain = std::abs(phi0) <= delta * (1.0 + 1e-12);
      p.slack = g(-phi0) / denom - peak;
      out.push_back(p);
    }
  }
  return out;
}

void write_lemma_csv(std::ostream& os, const std::vector<LemmaPoint>& points) {
  const auto old_precision = os.precision(12);
  os << "phi0_deg,delta_deg,in_domain,slack\n";
  for (const auto& p : points) {
    os << p.phi0_deg << ',' << p.delta_deg << ',' << (p.in_domain ? 1 : 0) << ',' << p.slack << '\n';
  }
  os.precision(old_precision);
}

}  // namespace beamlearn

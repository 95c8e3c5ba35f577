// beamlearn: command-line driver for codebook generation, campaigns and bound checks.
#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "beamlearn/array_codebook.hpp"
#include "beamlearn/config_file.hpp"
#include "beamlearn/experiment.hpp"
#include "beamlearn/regret_verify.hpp"

namespace bl = beamlearn;

namespace {

struct CampaignFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> runs;
  std::optional<std::uint64_t> horizon;
  std::optional<std::size_t> pool_size;
  std::optional<unsigned> threads;
  std::optional<std::size_t> budget;
  std::optional<double> risk_threshold_db;
  std::optional<std::string> policy;
  bool no_refine = false;
  std::vector<std::string> settings;
  std::string out;
};

void add_campaign_flags(CLI::App* cmd, CampaignFlags& f) {
  cmd->add_option("--config", f.config_path, "key = value configuration file")->check(CLI::ExistingFile);
  cmd->add_option("--seed", f.seed, "master seed");
  cmd->add_option("--runs", f.runs, "number of independent runs");
  cmd->add_option("--horizon", f.horizon, "online steps per run");
  cmd->add_option("--pool-size", f.pool_size, "channel realizations in the shared pool");
  cmd->add_option("--threads", f.threads, "worker threads, 0 = all cores");
  cmd->add_option("--budget", f.budget, "beam pairs trained per step");
  cmd->add_option("--risk-threshold-db", f.risk_threshold_db, "risk signal threshold in dB");
  cmd->add_option("--policy", f.policy, "refinement start policy")
      ->check(CLI::IsMember({"all", "after_reward", "after_n"}));
  cmd->add_flag("--no-refine", f.no_refine, "disable beam refinement");
  cmd->add_option("--set", f.settings, "extra key=value override, repeatable");
}

bl::ExperimentConfig resolve(const CampaignFlags& f) {
  bl::ExperimentConfig cfg;
  if (!f.config_path.empty()) bl::load_config_file(f.config_path, cfg);
  for (const auto& kv : f.settings) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw bl::ConfigError("--set expects key=value, got '" + kv + "'");
    bl::apply_setting(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (f.seed) cfg.master_seed = *f.seed;
  if (f.runs) cfg.n_runs = *f.runs;
  if (f.horizon) cfg.horizon = *f.horizon;
  if (f.pool_size) cfg.pool_size = *f.pool_size;
  if (f.threads) cfg.threads = *f.threads;
  if (f.budget) cfg.learner.selection.training_budget = *f.budget;
  if (f.risk_threshold_db) cfg.learner.selection.risk_threshold_db = *f.risk_threshold_db;
  if (f.policy) cfg.learner.policy = bl::parse_policy(*f.policy);
  if (f.no_refine) cfg.learner.refine_enabled = false;
  cfg.validate();
  return cfg;
}

std::string manifest_path_for(const std::string& csv) {
  const auto dot = csv.rfind('.');
  const auto slash = csv.find_last_of("/\\");
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return csv + ".json";
  return csv.substr(0, dot) + ".json";
}

// Writes through `write` to `path`, or to stdout when path is empty or "-".
template <typename F>
void emit(const std::string& path, F&& write) {
  if (path.empty() || path == "-") {
    write(std::cout);
    return;
  }
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  write(os);
  if (!os) throw std::runtime_error("failed writing " + path);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-layer mmWave beam alignment simulator"};
  app.require_subcommand(1);

  // codebook
  auto* cb = app.add_subcommand("codebook", "emit the half-power tiled codebook table");
  int cb_nx = 16;
  int cb_ny = 16;
  double cb_spacing = 0.5;
  std::string cb_out;
  cb->add_option("--nx", cb_nx, "elements along x")->check(CLI::PositiveNumber);
  cb->add_option("--ny", cb_ny, "elements along y")->check(CLI::PositiveNumber);
  cb->add_option("--spacing", cb_spacing, "element spacing in wavelengths");
  cb->add_option("--out", cb_out, "output file, default stdout");

  // simulate
  auto* sim = app.add_subcommand("simulate", "run a seeded campaign and write CSV plus manifest");
  CampaignFlags sim_flags;
  add_campaign_flags(sim, sim_flags);
  std::string sim_manifest;
  sim->add_option("--out", sim_flags.out, "per-step CSV (default from config: out_csv)");
  sim->add_option("--manifest", sim_manifest, "JSON manifest (default: CSV path with .json)");
  bool sim_dump_config = false;
  sim->add_flag("--print-config", sim_dump_config, "print the resolved configuration and exit");

  // compare
  auto* cmp = app.add_subcommand("compare", "run several variants on one channel pool");
  CampaignFlags cmp_flags;
  add_campaign_flags(cmp, cmp_flags);
  std::string cmp_variants = "alg2,alg1";
  cmp->add_option("--variants", cmp_variants,
                  "comma-separated presets: alg1, alg2, hoo, flat, no-refine, refine-all, "
                  "refine-after-reward, refine-after-n");
  cmp->add_option("--out", cmp_flags.out, "comparison CSV, default stdout");

  // verify-bounds
  auto* vb = app.add_subcommand("verify-bounds", "synthetic regret against the closed-form bounds");
  std::string vb_alg = "greedy";
  double vb_acceptance = 0.7;
  std::size_t vb_runs = 50;
  std::uint64_t vb_horizon = 10000;
  std::uint64_t vb_seed = 1;
  unsigned vb_threads = 0;
  std::string vb_out;
  vb->add_option("--algorithm", vb_alg, "greedy or risk-aware")->check(CLI::IsMember({"greedy", "risk-aware"}));
  vb->add_option("--acceptance", vb_acceptance, "constant acceptance probability (risk-aware)")
      ->check(CLI::Range(0.0, 1.0));
  vb->add_option("--runs", vb_runs, "independent runs");
  vb->add_option("--horizon", vb_horizon, "steps per run");
  vb->add_option("--seed", vb_seed, "master seed");
  vb->add_option("--threads", vb_threads, "worker threads, 0 = all cores");
  vb->add_option("--out", vb_out, "CSV n,mean_regret,bound_t1,bound_t2; default stdout");

  // check-lemma
  auto* lm = app.add_subcommand("check-lemma", "smoothness inequality sweep on the broadside pattern");
  int lm_nx = 16;
  int lm_ny = 16;
  std::size_t lm_grid = 81;
  std::string lm_out;
  lm->add_option("--nx", lm_nx, "elements along x")->check(CLI::PositiveNumber);
  lm->add_option("--ny", lm_ny, "elements along y")->check(CLI::PositiveNumber);
  lm->add_option("--grid", lm_grid, "grid points over +-beamwidth/2")->check(CLI::Range(2, 100000));
  lm->add_option("--out", lm_out, "CSV output, default stdout");

  CLI11_PARSE(app, argc, argv);

  try {
    if (cb->parsed()) {
      bl::ArrayGeometry g;
      g.n_x = cb_nx;
      g.n_y = cb_ny;
      g.spacing_x = g.spacing_y = cb_spacing;
      const bl::Codebook book = bl::generate_codebook(g);
      emit(cb_out, [&](std::ostream& os) { bl::write_codebook(os, book); });
      std::cerr << book.size() << " beams\n";
      return 0;
    }

    if (sim->parsed()) {
      bl::ExperimentConfig cfg = resolve(sim_flags);
      if (!sim_flags.out.empty()) cfg.out_csv = sim_flags.out;
      cfg.out_manifest = !sim_manifest.empty() ? sim_manifest
                         : !sim_flags.out.empty() ? manifest_path_for(sim_flags.out)
                                                  : cfg.out_manifest;
      if (sim_dump_config) {
        bl::write_config(std::cout, cfg);
        return 0;
      }
      const auto result = bl::run_campaign_to_files(cfg);
      std::cerr << "wrote " << cfg.out_csv << " and " << cfg.out_manifest << "; final smoothed gain "
                << result.gain_db.back() << " dB, 3 dB loss probability " << result.loss_3db.back()
                << '\n';
      return 0;
    }

    if (cmp->parsed()) {
      const bl::ExperimentConfig base = resolve(cmp_flags);
      std::vector<bl::Variant> variants;
      for (const auto& name : split_list(cmp_variants)) {
        bl::Variant v{name, base};
        bl::apply_preset(v.config, name);
        variants.push_back(std::move(v));
      }
      if (variants.empty()) throw std::invalid_argument("no variants given");
      const auto results = bl::compare_variants(variants);
      emit(cmp_flags.out, [&](std::ostream& os) { bl::write_comparison_csv(os, variants, results); });
      return 0;
    }

    if (vb->parsed()) {
      const bool risk = vb_alg == "risk-aware";
      bl::SyntheticBanditSpec spec = bl::reference_synthetic_spec(risk ? vb_acceptance : 0.0);
      spec.horizon = vb_horizon;
      const auto trace = bl::run_bound_check(
          spec, risk ? bl::SyntheticAlgorithm::risk_aware_fixed : bl::SyntheticAlgorithm::greedy_ucb,
          vb_runs, vb_seed, vb_threads);
      emit(vb_out, [&](std::ostream& os) { bl::write_bound_csv(os, trace); });
      const auto& bound = risk ? trace.bound_t2 : trace.bound_t1;
      double worst = -bl::kInfinity;
      for (std::size_t i = 0; i < trace.mean_regret.size(); ++i) {
        worst = std::max(worst, trace.mean_regret[i] - bound[i]);
      }
      std::cerr << "max(regret - bound) = " << worst << (worst <= 0.0 ? " (bound holds)\n" : " (VIOLATED)\n");
      return worst <= 0.0 ? 0 : 3;
    }

    if (lm->parsed()) {
      bl::ArrayGeometry g;
      g.n_x = lm_nx;
      g.n_y = lm_ny;
      const auto points = bl::lemma_sweep(g, lm_grid);
      emit(lm_out, [&](std::ostream& os) { bl::write_lemma_csv(os, points); });
      double worst = bl::kInfinity;
      for (const auto& p : points) {
        if (p.in_domain) worst = std::min(worst, p.slack);
      }
      std::cerr << "minimum slack " << worst << '\n';
      return worst >= -1e-9 ? 0 : 3;
    }
  } catch (const std::exception& e) {
    std::cerr << "beamlearn: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

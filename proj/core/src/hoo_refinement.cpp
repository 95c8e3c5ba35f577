#include "beamlearn/hoo_refinement.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace beamlearn {

PointingDirection perturb(const PointingDirection& d, int option, double az_step, double el_step) {
  switch (option) {
    case 0:
      return normalized({d.azimuth_deg + az_step, d.elevation_deg});
    case 1:
      return normalized({d.azimuth_deg - az_step, d.elevation_deg});
    case 2:
      return normalized({d.azimuth_deg, d.elevation_deg + el_step});
    default:
      return normalized({d.azimuth_deg, d.elevation_deg - el_step});
  }
}

namespace {

void collect_leaves(const BeamPairDirections& node, int depth, int max_depth,
                    const PairBeamwidths& bw, std::vector<BeamPairDirections>& out) {
  if (depth == max_depth) {
    out.push_back(node);
    return;
  }
  for (const auto& c : children_of(node, depth, bw)) collect_leaves(c, depth + 1, max_depth, bw, out);
}

bool forced_exploration(std::uint64_t visits, std::uint64_t n, const RefinementConfig& cfg) {
  if (visits < cfg.k_min) return true;
  const double need = std::ceil(cfg.alpha_norm * std::log(static_cast<double>(n)));
  return static_cast<double>(visits) < need;
}

nlohmann::json direction_json(const PointingDirection& d) {
  return {d.azimuth_deg, d.elevation_deg};
}

}  // namespace

void RefinementConfig::validate() const {
  if (max_depth < 1) throw std::invalid_argument("refinement depth must be >= 1");
  if (k_min < 1 || k_expand < 1) throw std::invalid_argument("K_min and K_exd must be >= 1");
  if (alpha_norm < 0.0) throw std::invalid_argument("alpha_norm must be non-negative");
  if (smoothness_a < 1.0) throw std::invalid_argument("smoothness correction must be >= 1");
}

std::array<BeamPairDirections, 16> children_of(const BeamPairDirections& node, int depth,
                                               const PairBeamwidths& bw) {
  const double scale = std::ldexp(1.0, -depth);
  std::array<BeamPairDirections, 16> out;
  for (int t = 0; t < 4; ++t) {
    const PointingDirection tx = perturb(node.tx, t, bw.tx_az * scale, bw.tx_el * scale);
    for (int r = 0; r < 4; ++r) {
      out[static_cast<std::size_t>(4 * t + r)] = {tx,
                                                  perturb(node.rx, r, bw.rx_az * scale, bw.rx_el * scale)};
    }
  }
  return out;
}

RefinementTree::RefinementTree(BeamPairDirections root, PairBeamwidths bw, int max_depth,
                               PairIndex pair)
    : bw_(bw), max_depth_(max_depth), pair_(pair), per_depth_count_(static_cast<std::size_t>(max_depth) + 1, 0) {
  if (max_depth < 1) throw std::invalid_argument("refinement depth must be >= 1");
  HooNode r;
  r.depth = 1;
  r.index = 1;
  r.dirs = root;
  nodes_.push_back(r);
  per_depth_count_[1] = 1;
  if (max_depth > 1) expand(0);
}

void RefinementTree::expand(int id) {
  const HooNode& parent = node(id);
  if (parent.depth >= max_depth_) throw std::logic_error("cannot expand a node at maximum depth");
  if (!parent.children.empty()) throw std::logic_error("node already expanded");
  const int depth = parent.depth + 1;
  const auto kids = children_of(parent.dirs, parent.depth, bw_);
  std::vector<int> ids;
  ids.reserve(kids.size());
  for (const auto& k : kids) {
    HooNode c;
    c.depth = depth;
    c.index = ++per_depth_count_[static_cast<std::size_t>(depth)];
    c.parent = id;
    c.dirs = k;
    ids.push_back(static_cast<int>(nodes_.size()));
    nodes_.push_back(c);
  }
  node(id).children = std::move(ids);
}

std::vector<int> select_node(const RefinementTree& tree) {
  std::vector<int> path{0};
  int cur = 0;
  while (!tree.node(cur).children.empty()) {
    int best = -1;
    for (int c : tree.node(cur).children) {
      if (best < 0 || tree.node(c).b > tree.node(best).b) best = c;
    }
    path.push_back(best);
    cur = best;
  }
  return path;
}

double hoo_u_value(const HooNode& node, std::uint64_t n, double nu, const RefinementConfig& cfg) {
  if (node.visits == 0 || forced_exploration(node.visits, n, cfg)) return kInfinity;
  const double t = static_cast<double>(node.visits);
  const double margin = std::sqrt(16.0 * node.variance * std::log(static_cast<double>(n)) / t);
  return (node.mean + margin) * nu;
}

namespace {

double broadside_deviation_gain(const ArrayGeometry& geom, int level) {
  const PointingDirection boresight{0.0, 0.0};
  const double bw = half_power_beamwidth(geom, boresight, CutAxis::elevation);
  const double dev = std::ldexp(bw, -level);
  return beam_power_gain(geom, boresight, along_cut(boresight, CutAxis::elevation, dev)) /
         geom.element_count();
}

}  // namespace

double smoothness_coefficient(int level, const ArrayGeometry& tx, const ArrayGeometry& rx,
                              const RefinementConfig& cfg) {
  if (!cfg.smoothness_enabled) return 1.0;
  return cfg.smoothness_a / (broadside_deviation_gain(tx, level) * broadside_deviation_gain(rx, level));
}

double smoothness_coefficient(int level, const ArrayGeometry& geom, const RefinementConfig& cfg) {
  return smoothness_coefficient(level, geom, geom, cfg);
}

std::vector<double> smoothness_coefficients(const ArrayGeometry& tx, const ArrayGeometry& rx,
                                            const RefinementConfig& cfg) {
  std::vector<double> nu(static_cast<std::size_t>(cfg.max_depth) + 1, 1.0);
  for (int l = 1; l <= cfg.max_depth; ++l) {
    nu[static_cast<std::size_t>(l)] = smoothness_coefficient(l, tx, rx, cfg);
  }
  return nu;
}

void update_after_sample(RefinementTree& tree, std::span<const int> path, double gamma,
                         const RefinementConfig& cfg, std::span<const double> nu) {
  if (path.empty() || path.front() != 0) throw std::invalid_argument("path must start at the root");
  if (nu.size() < static_cast<std::size_t>(tree.max_depth()) + 1) {
    throw std::invalid_argument("smoothness table too short");
  }
  for (std::size_t i = 1; i < path.size(); ++i) {
    if (tree.node(path[i]).parent != path[i - 1]) throw std::invalid_argument("path is not connected");
  }
  for (int id : path) {
    HooNode& nd = tree.node(id);
    ++nd.visits;
    const double t = static_cast<double>(nd.visits);
    nd.mean += (gamma - nd.mean) / t;
    nd.sum_sq += gamma * gamma;
    nd.variance = std::max(0.0, (nd.sum_sq - nd.mean * nd.mean * t) / t);
  }

  const std::uint64_t n = tree.samples();
  for (std::size_t id = 0; id < tree.size(); ++id) {
    HooNode& nd = tree.node(static_cast<int>(id));
    nd.u = hoo_u_value(nd, n, nu[static_cast<std::size_t>(nd.depth)], cfg);
  }

  const int sampled = path.back();
  {
    const HooNode& s = tree.node(sampled);
    if (s.depth < tree.max_depth() && s.visits > cfg.k_expand && s.children.empty()) tree.expand(sampled);
  }

  for (int depth = tree.max_depth(); depth >= 2; --depth) {
    for (std::size_t id = 0; id < tree.size(); ++id) {
      HooNode& nd = tree.node(static_cast<int>(id));
      if (nd.depth != depth) continue;
      double child_max = kInfinity;
      if (!nd.children.empty()) {
        child_max = -kInfinity;
        for (int c : nd.children) child_max = std::max(child_max, tree.node(c).b);
      }
      nd.b = std::min(nd.u, child_max);
    }
  }
}

BeamPairDirections best_arm(const RefinementTree& tree, std::uint64_t k_min) {
  int best = -1;
  for (std::size_t id = 0; id < tree.size(); ++id) {
    const HooNode& nd = tree.node(static_cast<int>(id));
    if (nd.visits < k_min) continue;
    if (best < 0 || nd.mean > tree.node(best).mean) best = static_cast<int>(id);
  }
  return best < 0 ? tree.node(0).dirs : tree.node(best).dirs;
}

std::string to_json(const RefinementTree& tree) {
  nlohmann::json j;
  j["pair"] = tree.pair();
  j["max_depth"] = tree.max_depth();
  const auto& bw = tree.beamwidths();
  j["beamwidths"] = {bw.tx_az, bw.tx_el, bw.rx_az, bw.rx_el};
  auto& rows = j["nodes"] = nlohmann::json::array();
  for (const auto& nd : tree.nodes()) {
    rows.push_back({{"depth", nd.depth},
                    {"index", nd.index},
                    {"parent", nd.parent},
                    {"tx", direction_json(nd.dirs.tx)},
                    {"rx", direction_json(nd.dirs.rx)},
                    {"visits", nd.visits},
                    {"mean", nd.mean},
                    {"sum_sq", nd.sum_sq}});
  }
  return j.dump();
}

FlatLeafBandit::FlatLeafBandit(BeamPairDirections root, PairBeamwidths bw, const RefinementConfig& cfg)
    : cfg_(cfg), root_(root) {
  cfg_.validate();
  collect_leaves(root, 1, cfg_.max_depth, bw, arms_);
  visits_.assign(arms_.size(), 0);
  mean_.assign(arms_.size(), 0.0);
  sum_sq_.assign(arms_.size(), 0.0);
}

std::size_t FlatLeafBandit::select() const {
  const std::uint64_t n = n_ + 1;
  std::size_t best = 0;
  double best_index = -kInfinity;
  for (std::size_t k = 0; k < arms_.size(); ++k) {
    double idx = kInfinity;
    if (!forced_exploration(visits_[k], n, cfg_)) {
      const double t = static_cast<double>(visits_[k]);
      const double var = std::max(0.0, sum_sq_[k] / t - mean_[k] * mean_[k]);
      idx = mean_[k] + std::sqrt(16.0 * var * std::log(static_cast<double>(n)) / t);
    }
    if (idx > best_index) {
      best = k;
      best_index = idx;
    }
  }
  return best;
}

void FlatLeafBandit::update(std::size_t arm, double gamma) {
  ++visits_[arm];
  mean_[arm] += (gamma - mean_[arm]) / static_cast<double>(visits_[arm]);
  sum_sq_[arm] += gamma * gamma;
  ++n_;
}

BeamPairDirections FlatLeafBandit::best_arm() const {
  std::size_t best = arms_.size();
  for (std::size_t k = 0; k < arms_.size(); ++k) {
    if (visits_[k] < cfg_.k_min) continue;
    if (best == arms_.size() || mean_[k] > mean_[best]) best = k;
  }
  return best == arms_.size() ? root_ : arms_[best];
}

}  // namespace beamlearn

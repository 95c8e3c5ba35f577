// Hierarchical optimistic refinement of one beam pair on a finite 16-ary tree, plus
// the flat leaf-bandit baseline used for comparison.
#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "beamlearn/array_codebook.hpp"

namespace beamlearn {

struct BeamPairDirections {
  PointingDirection tx;
  PointingDirection rx;

  friend bool operator==(const BeamPairDirections&, const BeamPairDirections&) = default;
};

struct PairBeamwidths {
  double tx_az = 0.0;
  double tx_el = 0.0;
  double rx_az = 0.0;
  double rx_el = 0.0;
};

struct RefinementConfig {
  int max_depth = 3;
  std::uint64_t k_min = 3;
  std::uint64_t k_expand = 10;
  double alpha_norm = 0.0;
  double smoothness_a = 1.0;
  bool smoothness_enabled = false;

  void validate() const;
};

constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct HooNode {
  int depth = 1;
  int index = 1;    // position within its depth, 1-based in creation order
  int parent = -1;  // node id
  std::vector<int> children;
  BeamPairDirections dirs;
  std::uint64_t visits = 0;
  double mean = 0.0;
  double sum_sq = 0.0;
  double variance = 0.0;
  double u = kInfinity;
  double b = kInfinity;
};

// Moves one coordinate of d: option 0 +az, 1 -az, 2 +el, 3 -el.
PointingDirection perturb(const PointingDirection& d, int option, double az_step, double el_step);

// Perturbation order per side: +az, -az, +el, -el. Child c perturbs tx by option c / 4
// and rx by option c % 4, with offsets beamwidth / 2^depth.
std::array<BeamPairDirections, 16> children_of(const BeamPairDirections& node, int depth,
                                               const PairBeamwidths& bw);

class RefinementTree {
 public:
  RefinementTree(BeamPairDirections root, PairBeamwidths bw, int max_depth, PairIndex pair = 0);

  const HooNode& node(int id) const { return nodes_[static_cast<std::size_t>(id)]; }
  HooNode& node(int id) { return nodes_[static_cast<std::size_t>(id)]; }
  std::size_t size() const { return nodes_.size(); }
  const std::vector<HooNode>& nodes() const { return nodes_; }
  const PairBeamwidths& beamwidths() const { return bw_; }
  int max_depth() const { return max_depth_; }
  PairIndex pair() const { return pair_; }
  std::uint64_t samples() const { return nodes_.front().visits; }

  // Activates the 16 children of a leaf above max_depth.
  void expand(int id);

 private:
  std::vector<HooNode> nodes_;
  PairBeamwidths bw_;
  int max_depth_;
  PairIndex pair_;
  std::vector<int> per_depth_count_;
};

// Root-to-node path following the largest child B value, ties to the lowest child.
std::vector<int> select_node(const RefinementTree& tree);

// U value of a node with the variance-aware margin, infinite while under-sampled.
double hoo_u_value(const HooNode& node, std::uint64_t n, double nu, const RefinementConfig& cfg);

// nu(level) = a / (G_tx(bw/2^level) G_rx(bw/2^level)) with G the normalized broadside
// power pattern at the given deviation; 1 when smoothness is disabled.
double smoothness_coefficient(int level, const ArrayGeometry& tx, const ArrayGeometry& rx,
                              const RefinementConfig& cfg);
double smoothness_coefficient(int level, const ArrayGeometry& geom, const RefinementConfig& cfg);

// nu[depth] for depth 0..max_depth (index 0 unused).
std::vector<double> smoothness_coefficients(const ArrayGeometry& tx, const ArrayGeometry& rx,
                                            const RefinementConfig& cfg);

// Statistics, U values, expansion and B back-propagation after sampling the last node
// of `path`. The U values use n = total samples fed to the tree.
void update_after_sample(RefinementTree& tree, std::span<const int> path, double gamma,
                         const RefinementConfig& cfg, std::span<const double> nu);

// Directions of the node with the largest mean among nodes with at least k_min visits;
// the root when none qualifies.
BeamPairDirections best_arm(const RefinementTree& tree, std::uint64_t k_min);

std::string to_json(const RefinementTree& tree);

// Norm-UCB run directly on the 16^(max_depth-1) leaves of the refinement tree.
class FlatLeafBandit {
 public:
  FlatLeafBandit(BeamPairDirections root, PairBeamwidths bw, const RefinementConfig& cfg);

  std::size_t size() const { return arms_.size(); }
  const BeamPairDirections& arm(std::size_t k) const { return arms_[k]; }
  std::size_t select() const;
  void update(std::size_t arm, double gamma);
  BeamPairDirections best_arm() const;
  std::uint64_t samples() const { return n_; }

 private:
  RefinementConfig cfg_;
  std::vector<BeamPairDirections> arms_;
  std::vector<std::uint64_t> visits_;
  std::vector<double> mean_;
  std::vector<double> sum_sq_;
  BeamPairDirections root_;
  std::uint64_t n_ = 0;
};

}  // namespace beamlearn

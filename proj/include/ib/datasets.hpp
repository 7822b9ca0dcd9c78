#pragma once

#include <filesystem>
#include <string>

#include "ib/types.hpp"

namespace ib {

/// Row weights of the hierarchical 8x8 conditional p(y|x): w_self at y = x,
/// w_pair at the pair sibling, w_macro at each of the two remaining
/// same-macro-group outcomes, w_other at each of the four cross-group
/// outcomes. Graded relevance requires w_self > w_pair > w_macro > w_other
/// >= 0 and w_self + w_pair + 2 w_macro + 4 w_other = 1.
struct HierarchicalParams {
  double w_self = 0.59;
  double w_pair = 0.30;
  double w_macro = 0.051;
  double w_other = 0.002;

  void validate() const;
};

/// Binary symmetric channel: p(y = x | x) = 1 - p_cross.
JointDistribution make_bsc(double p_cross, const Vector& prior);
JointDistribution make_bsc(double p_cross);  // uniform prior

/// The 8x8 instance with pair clusters {0,1},{2,3},{4,5},{6,7} and macro
/// groups {0..3} vs {4..7}.
JointDistribution make_hierarchical_8x8(const HierarchicalParams& params, const Vector& prior);
JointDistribution make_hierarchical_8x8(const HierarchicalParams& params);

// Self-describing text format: header lines `x_size N` / `y_size N` (or
// `z_size` for encoders), then one whitespace-separated row per x.

void save_joint(const JointDistribution& joint, const std::filesystem::path& path);
JointDistribution load_joint(const std::filesystem::path& path);

void save_encoder(const Encoder& enc, const std::filesystem::path& path);
Encoder load_encoder(const std::filesystem::path& path);

}  // namespace ib

#pragma once

#include <cstdint>
#include <vector>

#include "ib/continuation.hpp"

namespace ib {

struct MultiPathResult {
  std::vector<Trajectory> paths;
  std::vector<std::uint64_t> seeds;
  int best_index = -1;
  double selection_metric = 0.0;  // final objective of the winner, nats
  std::vector<std::vector<double>> step_kl;  // per path, when snapshots allow
};

/// Independent continuation runs differing only in the symmetry-breaking
/// seed. The winner has the lowest final objective among completed paths
/// (ties: higher final I(Z;Y), then lower seed).
MultiPathResult run_multipath(const JointDistribution& joint, Index z_size,
                              const ObjectiveSpec& spec_template,
                              const ContinuationConfig& cfg,
                              const std::vector<std::uint64_t>& seeds);

/// KL(q_t || q_{t-1}) averaged over x with weights p(x), one value per
/// consecutive snapshot pair. Throws if any record lacks a snapshot; rerun
/// with snapshot_every = 1.
std::vector<double> step_kl_series(const Trajectory& traj, const Vector& p_x);

/// Minimal total-variation distance between two encoders over all column
/// permutations of z (exhaustive; |Z| <= 8 at desk scale).
double permutation_tv_distance(const Encoder& a, const Encoder& b);

}  // namespace ib

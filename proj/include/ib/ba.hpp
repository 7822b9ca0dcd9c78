#pragma once

#include <cstdint>

#include "ib/trajectory.hpp"
#include "ib/types.hpp"

namespace ib {

struct BaConfig {
  int max_iters = 5000;
  double tol = 1e-10;  // max over rows of TV distance between sweeps
  int n_restarts = 10;
  std::uint64_t seed = 1;
};

struct BaResult {
  Encoder encoder{Matrix()};
  TrajectoryRecord record;
  bool converged = false;
  int iterations = 0;
  int best_restart = 0;
};

/// Self-consistent Blahut-Arimoto iteration at a single beta:
/// p(z|x) proportional to p(z) exp(-beta KL(p(y|x) || p(y|z))), with p(z)
/// and p(y|z) recomputed from the current encoder each sweep. Returns the
/// best (lowest classical objective) converged-or-last iterate over
/// n_restarts Dirichlet(1.0) restarts with counter-derived seeds.
BaResult ba_solve(const JointDistribution& joint, double beta, Index z_size,
                  const BaConfig& cfg);

/// Independent ba_solve per grid point (fresh restarts, no warm start).
std::vector<BaResult> ba_sweep(const JointDistribution& joint,
                               const std::vector<double>& beta_grid, Index z_size,
                               const BaConfig& cfg);

}  // namespace ib

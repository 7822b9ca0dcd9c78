#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ib/objective.hpp"
#include "ib/types.hpp"

namespace ib {

/// Per-beta snapshot of solver state.
struct TrajectoryRecord {
  double beta = 0.0;
  double beta_effective = 0.0;
  double i_xz_bits = 0.0;
  double i_zy_bits = 0.0;
  double h_z_given_x_bits = 0.0;
  double objective_nats = 0.0;
  double lambda_min = 0.0;
  double epsilon_current = 0.0;
  double effective_clusters = 0.0;  // perplexity of p(z)
  int used_clusters = 0;            // count of z with max_x p(z|x) > 0.5
  int corrector_steps_taken = 0;
  bool converged = true;
  std::optional<Encoder> encoder_snapshot;
};

enum class TrajectoryStatus { Completed, Aborted };

struct Trajectory {
  std::vector<TrajectoryRecord> records;
  std::string dataset_id;
  std::string spec_summary;
  TrajectoryStatus status = TrajectoryStatus::Completed;
  std::string abort_reason;
  int nonconverged_steps = 0;
  int branch_escapes = 0;
  double dataset_i_xy_bits = 0.0;
};

/// Fills the information metrics of a record from an encoder (lambda_min and
/// corrector bookkeeping are the caller's).
TrajectoryRecord make_record(const Encoder& enc, const JointDistribution& joint,
                             const ObjectiveSpec& spec);

/// exp(H(p_z)): soft count of bottleneck states in use.
double effective_cluster_count(const Encoder& enc, const Vector& p_x);

/// Number of z columns that some x maps to with probability > 0.5.
int used_cluster_count(const Encoder& enc);

}  // namespace ib

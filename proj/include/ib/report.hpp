#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ib/ba.hpp"
#include "ib/continuation.hpp"
#include "ib/trajectory.hpp"

namespace ib {

/// One CSV row per record with the fixed column order
/// beta, beta_eff, i_xz_bits, i_zy_bits, h_zx_bits, objective_nats,
/// lambda_min, epsilon, eff_clusters, used_clusters, corrector_steps,
/// converged. Written atomically (temp file + rename). `solver`, when given,
/// is appended as an extra trailing column.
void write_trajectory_csv(const std::vector<TrajectoryRecord>& records,
                          const std::filesystem::path& path,
                          const std::string& solver = "");

std::string csv_header(bool with_solver = false);
std::string csv_row(const TrajectoryRecord& r, const std::string& solver = "");

struct JumpEvent {
  double beta_from = 0.0;
  double beta_to = 0.0;
  double delta_i_zy_bits = 0.0;
};

/// Steps with |delta I(Z;Y)| above the threshold between consecutive records.
std::vector<JumpEvent> detect_jumps(const std::vector<TrajectoryRecord>& records,
                                    double threshold_bits);

double max_step_i_zy(const std::vector<TrajectoryRecord>& records);

/// Smallest eigenvalue of the standard-objective Hessian at the exact
/// uniform trivial encoder, per grid beta, plus the smallest eigenvalue
/// outside the numerically-flat band (|lambda| <= band). The trivial branch
/// carries exact flat modes, so the crossing eigenvalue is the smallest one
/// above the band.
struct StabilityPoint {
  double beta = 0.0;
  double lambda_min = 0.0;
  double lambda_min_above_band = 0.0;
};

std::vector<StabilityPoint> trivial_branch_stability(const JointDistribution& joint,
                                                     Index z_size,
                                                     const std::vector<double>& beta_grid,
                                                     double band = 1e-8);

/// First sign change located by linear interpolation between grid points;
/// the previous point uses the above-band eigenvalue when its raw lambda_min
/// sits inside the flat band. Empty when no crossing occurs.
std::optional<double> lambda_zero_crossing(const std::vector<StabilityPoint>& series,
                                           double band = 1e-8);

/// First grid beta with lambda_min < delta (raw), if any.
std::optional<double> first_below_threshold(const std::vector<StabilityPoint>& series,
                                            double delta);

struct SolverReport {
  std::string name;
  double max_step_i_zy_bits = 0.0;
  std::vector<JumpEvent> jumps;
  bool aborted = false;
  int nonconverged_points = 0;
};

struct CompareReport {
  std::vector<SolverReport> solvers;  // standard, convex, entreg
  std::optional<double> lambda_zero_crossing_beta;
  std::optional<double> lambda_below_delta_beta;
};

struct CompareConfig {
  double grid_start = 0.0;
  double grid_stop = 3.0;
  double grid_step = 0.05;
  int substeps = 5;  // continuation delta_beta = grid_step / substeps
  double jump_threshold_bits = 0.05;
  ObjectiveSpec convex_spec{0.0, 0.0, PenaltyFunction::square()};
  ObjectiveSpec entreg_spec{0.0, 0.1, PenaltyFunction::identity()};
  BaConfig ba;
  ContinuationConfig continuation;
};

struct CompareResult {
  CompareReport report;
  std::vector<TrajectoryRecord> standard_records;  // at grid points
  Trajectory convex;
  Trajectory entreg;
  std::vector<TrajectoryRecord> convex_at_grid;
  std::vector<TrajectoryRecord> entreg_at_grid;
  std::vector<StabilityPoint> stability;
};

/// Three-way comparison on a shared beta grid: independent BA per grid
/// point, convexified continuation, entropy-regularized continuation, and
/// the trivial-branch stability series of the standard objective.
CompareResult run_compare(const JointDistribution& joint, Index z_size,
                          const CompareConfig& cfg);

}  // namespace ib

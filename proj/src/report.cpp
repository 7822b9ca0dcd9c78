#include "ib/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace ib {

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::vector<TrajectoryRecord> records_at_grid(const Trajectory& traj,
                                              const std::vector<double>& grid) {
  std::vector<TrajectoryRecord> out;
  std::size_t j = 0;
  for (double beta : grid) {
    while (j < traj.records.size() && traj.records[j].beta < beta - 1e-9) ++j;
    if (j < traj.records.size() && std::abs(traj.records[j].beta - beta) <= 1e-9) {
      out.push_back(traj.records[j]);
    }
  }
  return out;
}

}  // namespace

std::string csv_header(bool with_solver) {
  std::string h =
      "beta,beta_eff,i_xz_bits,i_zy_bits,h_zx_bits,objective_nats,lambda_min,"
      "epsilon,eff_clusters,used_clusters,corrector_steps,converged";
  if (with_solver) h += ",solver";
  return h;
}

std::string csv_row(const TrajectoryRecord& r, const std::string& solver) {
  std::string row = fmt(r.beta) + "," + fmt(r.beta_effective) + "," + fmt(r.i_xz_bits) + "," +
                    fmt(r.i_zy_bits) + "," + fmt(r.h_z_given_x_bits) + "," +
                    fmt(r.objective_nats) + "," + fmt(r.lambda_min) + "," +
                    fmt(r.epsilon_current) + "," + fmt(r.effective_clusters) + "," +
                    std::to_string(r.used_clusters) + "," +
                    std::to_string(r.corrector_steps_taken) + "," + (r.converged ? "1" : "0");
  if (!solver.empty()) row += "," + solver;
  return row;
}

void write_trajectory_csv(const std::vector<TrajectoryRecord>& records,
                          const std::filesystem::path& path, const std::string& solver) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp);
    require(out.good(), "cannot write " + tmp.string());
    out << csv_header(!solver.empty()) << '\n';
    for (const TrajectoryRecord& r : records) out << csv_row(r, solver) << '\n';
  }
  std::filesystem::rename(tmp, path);
}

std::vector<JumpEvent> detect_jumps(const std::vector<TrajectoryRecord>& records,
                                    double threshold_bits) {
  std::vector<JumpEvent> out;
  for (std::size_t i = 1; i < records.size(); ++i) {
    const double d = records[i].i_zy_bits - records[i - 1].i_zy_bits;
    if (std::abs(d) > threshold_bits) {
      out.push_back({records[i - 1].beta, records[i].beta, d});
    }
  }
  return out;
}

double max_step_i_zy(const std::vector<TrajectoryRecord>& records) {
  double mx = 0.0;
  for (std::size_t i = 1; i < records.size(); ++i) {
    mx = std::max(mx, std::abs(records[i].i_zy_bits - records[i - 1].i_zy_bits));
  }
  return mx;
}

std::vector<StabilityPoint> trivial_branch_stability(const JointDistribution& joint,
                                                     Index z_size,
                                                     const std::vector<double>& beta_grid,
                                                     double band) {
  const Encoder trivial = Encoder::unchecked(
      Matrix::Constant(joint.x_size(), z_size, 1.0 / static_cast<double>(z_size)));
  std::vector<StabilityPoint> out;
  out.reserve(beta_grid.size());
  for (double beta : beta_grid) {
    const ObjectiveSpec spec{beta, 0.0, PenaltyFunction::identity()};
    const Vector evals = symmetric_eigenvalues(objective_hessian(trivial, joint, spec));
    StabilityPoint p;
    p.beta = beta;
    p.lambda_min = evals[0];
    p.lambda_min_above_band = evals[evals.size() - 1];
    for (Index i = 0; i < evals.size(); ++i) {
      if (evals[i] > band) {
        p.lambda_min_above_band = evals[i];
        break;
      }
    }
    out.push_back(p);
  }
  return out;
}

std::optional<double> lambda_zero_crossing(const std::vector<StabilityPoint>& series,
                                           double band) {
  for (std::size_t i = 1; i < series.size(); ++i) {
    if (series[i].lambda_min >= -band) continue;
    // first firmly negative point; interpolate from the previous one using
    // the eigenvalue that actually crossed (flat modes sit inside the band)
    const StabilityPoint& prev = series[i - 1];
    const double prev_lambda =
        prev.lambda_min > band ? prev.lambda_min : prev.lambda_min_above_band;
    const double next_lambda = series[i].lambda_min;
    double t = prev_lambda / (prev_lambda - next_lambda);
    t = std::clamp(t, 0.0, 1.0);
    return prev.beta + t * (series[i].beta - prev.beta);
  }
  return std::nullopt;
}

std::optional<double> first_below_threshold(const std::vector<StabilityPoint>& series,
                                            double delta) {
  for (const StabilityPoint& p : series) {
    if (p.lambda_min < delta) return p.beta;
  }
  return std::nullopt;
}

CompareResult run_compare(const JointDistribution& joint, Index z_size,
                          const CompareConfig& cfg) {
  require(cfg.grid_step > 0.0 && cfg.grid_stop > cfg.grid_start, "invalid compare grid");
  require(cfg.substeps >= 1, "substeps must be >= 1");

  std::vector<double> grid;
  const long n = std::lround((cfg.grid_stop - cfg.grid_start) / cfg.grid_step);
  for (long i = 0; i <= n; ++i) grid.push_back(cfg.grid_start + static_cast<double>(i) * cfg.grid_step);

  CompareResult res;

  std::vector<BaResult> ba = ba_sweep(joint, grid, z_size, cfg.ba);
  for (const BaResult& r : ba) res.standard_records.push_back(r.record);

  ContinuationConfig ccfg = cfg.continuation;
  ccfg.beta_max = grid.back();
  ccfg.delta_beta = cfg.grid_step / cfg.substeps;

  ContinuationConfig cvx_cfg = ccfg;
  cvx_cfg.epsilon_base = cfg.convex_spec.epsilon;
  res.convex = run_continuation(joint, z_size, cfg.convex_spec, cvx_cfg);

  ContinuationConfig ent_cfg = ccfg;
  ent_cfg.epsilon_base = cfg.entreg_spec.epsilon;
  res.entreg = run_continuation(joint, z_size, cfg.entreg_spec, ent_cfg);

  res.convex_at_grid = records_at_grid(res.convex, grid);
  res.entreg_at_grid = records_at_grid(res.entreg, grid);

  res.stability = trivial_branch_stability(joint, z_size, grid);
  res.report.lambda_zero_crossing_beta = lambda_zero_crossing(res.stability);
  res.report.lambda_below_delta_beta =
      first_below_threshold(res.stability, cfg.continuation.lambda_threshold);

  auto solver_report = [&](const std::string& name, const std::vector<TrajectoryRecord>& recs,
                           bool aborted) {
    SolverReport sr;
    sr.name = name;
    sr.max_step_i_zy_bits = max_step_i_zy(recs);
    sr.jumps = detect_jumps(recs, cfg.jump_threshold_bits);
    sr.aborted = aborted;
    for (const TrajectoryRecord& r : recs) {
      if (!r.converged) ++sr.nonconverged_points;
    }
    return sr;
  };
  res.report.solvers.push_back(solver_report("standard", res.standard_records, false));
  res.report.solvers.push_back(solver_report(
      "convex", res.convex.records, res.convex.status == TrajectoryStatus::Aborted));
  res.report.solvers.push_back(solver_report(
      "entreg", res.entreg.records, res.entreg.status == TrajectoryStatus::Aborted));
  return res;
}

}  // namespace ib

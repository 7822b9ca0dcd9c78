#include "ib/multipath.hpp"

#include <algorithm>
#include <numeric>

namespace ib {

MultiPathResult run_multipath(const JointDistribution& joint, Index z_size,
                              const ObjectiveSpec& spec_template,
                              const ContinuationConfig& cfg,
                              const std::vector<std::uint64_t>& seeds) {
  require(!seeds.empty(), "run_multipath needs at least one seed");
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    for (std::size_t j = i + 1; j < seeds.size(); ++j) {
      require(seeds[i] != seeds[j], "run_multipath needs distinct seeds");
    }
  }

  MultiPathResult out;
  out.seeds = seeds;
  for (std::uint64_t seed : seeds) {
    ContinuationConfig path_cfg = cfg;
    path_cfg.seed = seed;
    out.paths.push_back(run_continuation(joint, z_size, spec_template, path_cfg));
    const Trajectory& t = out.paths.back();
    if (cfg.snapshot_every == 1 && t.records.size() >= 2) {
      out.step_kl.push_back(step_kl_series(t, joint.p_x));
    } else {
      out.step_kl.emplace_back();
    }
  }

  for (std::size_t i = 0; i < out.paths.size(); ++i) {
    const Trajectory& t = out.paths[i];
    if (t.status != TrajectoryStatus::Completed || t.records.empty()) continue;
    const TrajectoryRecord& last = t.records.back();
    const bool better =
        out.best_index < 0 || last.objective_nats < out.selection_metric ||
        (last.objective_nats == out.selection_metric &&
         (last.i_zy_bits > out.paths[out.best_index].records.back().i_zy_bits ||
          (last.i_zy_bits == out.paths[out.best_index].records.back().i_zy_bits &&
           seeds[i] < seeds[out.best_index])));
    if (better) {
      out.best_index = static_cast<int>(i);
      out.selection_metric = last.objective_nats;
    }
  }
  require(out.best_index >= 0, "all multipath runs aborted");
  return out;
}

std::vector<double> step_kl_series(const Trajectory& traj, const Vector& p_x) {
  std::vector<double> out;
  out.reserve(traj.records.size() > 0 ? traj.records.size() - 1 : 0);
  for (std::size_t i = 1; i < traj.records.size(); ++i) {
    const auto& prev = traj.records[i - 1].encoder_snapshot;
    const auto& cur = traj.records[i].encoder_snapshot;
    require(prev.has_value() && cur.has_value(),
            "step_kl_series needs per-step snapshots; rerun with snapshot_every=1");
    const Matrix& a = cur->p_z_given_x;
    const Matrix& b = prev->p_z_given_x;
    double kl = 0.0;
    for (Index x = 0; x < a.rows(); ++x) {
      double row = 0.0;
      for (Index z = 0; z < a.cols(); ++z) {
        if (a(x, z) > 0.0) row += a(x, z) * (clog(a(x, z)) - clog(b(x, z)));
      }
      kl += p_x[x] * std::max(row, 0.0);
    }
    out.push_back(kl);
  }
  return out;
}

double permutation_tv_distance(const Encoder& a, const Encoder& b) {
  require(a.x_size() == b.x_size() && a.z_size() == b.z_size(),
          "permutation_tv_distance dimension mismatch");
  const Index Z = a.z_size();
  std::vector<Index> perm(Z);
  std::iota(perm.begin(), perm.end(), Index{0});
  double best = std::numeric_limits<double>::infinity();
  do {
    double tv = 0.0;
    for (Index x = 0; x < a.x_size() && tv < best; ++x) {
      double row = 0.0;
      for (Index z = 0; z < Z; ++z) {
        row += std::abs(a.p_z_given_x(x, z) - b.p_z_given_x(x, perm[z]));
      }
      tv = std::max(tv, 0.5 * row);
    }
    best = std::min(best, tv);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace ib

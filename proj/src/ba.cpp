#include "ib/ba.hpp"

#include "ib/continuation.hpp"
#include "ib/rng.hpp"

namespace ib {

namespace {

struct RestartOutcome {
  Matrix q;
  double objective = 0.0;
  double i_zy = 0.0;
  bool converged = false;
  int iterations = 0;
};

RestartOutcome run_restart(const JointDistribution& joint, double beta, Index z_size,
                           const BaConfig& cfg, std::uint64_t restart_seed) {
  const Index X = joint.x_size();
  const Index Y = joint.y_size();
  std::mt19937_64 rng(restart_seed);

  Matrix q(X, z_size);
  for (Index x = 0; x < X; ++x) q.row(x) = dirichlet_row(rng, z_size).transpose();

  // p(y|x), fixed
  Matrix pyx(X, Y);
  for (Index x = 0; x < X; ++x) {
    pyx.row(x) = joint.p_xy.row(x) / std::max(joint.p_x[x], kLogFloor);
  }

  RestartOutcome out;
  Matrix logits(X, z_size);
  for (int it = 0; it < cfg.max_iters; ++it) {
    const Vector pz = q.transpose() * joint.p_x;
    const Matrix p_zy = q.transpose() * joint.p_xy;
    // KL(p(y|x) || p(y|z)) for every (x,z), same probability floor as info_core
    for (Index x = 0; x < X; ++x) {
      for (Index z = 0; z < z_size; ++z) {
        double kl = 0.0;
        for (Index y = 0; y < Y; ++y) {
          const double a = pyx(x, y);
          if (a > 0.0) kl += a * (clog(a) - (clog(p_zy(z, y)) - clog(pz[z])));
        }
        logits(x, z) = clog(pz[z]) - beta * kl;
      }
    }
    double max_tv = 0.0;
    for (Index x = 0; x < X; ++x) {
      const double m = logits.row(x).maxCoeff();
      Vector row = (logits.row(x).array() - m).exp();
      row /= row.sum();
      max_tv = std::max(max_tv, 0.5 * (row.transpose() - q.row(x)).cwiseAbs().sum());
      q.row(x) = row.transpose();
    }
    out.iterations = it + 1;
    if (max_tv < cfg.tol) {
      out.converged = true;
      break;
    }
  }

  Encoder enc = Encoder::unchecked(q);
  const double ixz = mutual_info_xz(enc, joint.p_x);
  out.i_zy = mutual_info_zy(enc, joint);
  out.objective = ixz - beta * out.i_zy;
  out.q = std::move(q);
  return out;
}

}  // namespace

BaResult ba_solve(const JointDistribution& joint, double beta, Index z_size,
                  const BaConfig& cfg) {
  require(beta >= 0.0, "ba_solve needs beta >= 0");
  require(z_size >= 1, "ba_solve needs |Z| >= 1");
  require(cfg.max_iters >= 1 && cfg.tol > 0.0 && cfg.n_restarts >= 1, "invalid BaConfig");

  RestartOutcome best;
  int best_restart = 0;
  for (int r = 0; r < cfg.n_restarts; ++r) {
    RestartOutcome o = run_restart(joint, beta, z_size, cfg, mix_seed(cfg.seed, r));
    const bool better = (r == 0) || o.objective < best.objective ||
                        (o.objective == best.objective && o.i_zy > best.i_zy);
    if (better) {
      best = std::move(o);
      best_restart = r;
    }
  }

  BaResult res;
  res.encoder = Encoder::unchecked(best.q);
  res.converged = best.converged;
  res.iterations = best.iterations;
  res.best_restart = best_restart;

  const ObjectiveSpec spec{beta, 0.0, PenaltyFunction::identity()};
  res.record = make_record(res.encoder, joint, spec);
  res.record.converged = best.converged;
  res.record.corrector_steps_taken = best.iterations;
  // Stability of the classical objective at the solution; re-projected so the
  // gradient floor holds at near-deterministic solutions.
  const Encoder interior = project_simplex_rows(res.encoder.p_z_given_x);
  res.record.lambda_min = min_eigenvalue(objective_hessian(interior, joint, spec));
  return res;
}

std::vector<BaResult> ba_sweep(const JointDistribution& joint,
                               const std::vector<double>& beta_grid, Index z_size,
                               const BaConfig& cfg) {
  require(!beta_grid.empty(), "empty beta grid");
  for (std::size_t i = 0; i < beta_grid.size(); ++i) {
    require(beta_grid[i] >= 0.0, "beta grid entries must be >= 0");
    if (i > 0) require(beta_grid[i] > beta_grid[i - 1], "beta grid must be ascending");
  }
  std::vector<BaResult> out;
  out.reserve(beta_grid.size());
  for (double beta : beta_grid) {
    out.push_back(ba_solve(joint, beta, z_size, cfg));
  }
  return out;
}

}  // namespace ib

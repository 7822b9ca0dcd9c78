#include "ib/continuation.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <sstream>

#include "ib/log.hpp"
#include "ib/rng.hpp"

namespace ib {

namespace {

// A predictor move larger than this (per coordinate, after scaling by
// delta_beta) means the linearization is meaningless; near beta=0 the path
// has a vertical tangent and dq/dbeta legitimately blows up.
constexpr double kMaxPredictorMove = 0.5;

}  // namespace

void ContinuationConfig::validate() const {
  require(delta_beta > 0.0, "delta_beta must be > 0");
  require(beta_max >= 0.0, "beta_max must be >= 0");
  require(eta > 0.0, "eta must be > 0");
  require(corrector_tol > 0.0, "corrector_tol must be > 0");
  require(corrector_max_steps >= 1, "corrector_max_steps must be >= 1");
  require(epsilon_multiplier >= 1.0, "epsilon_multiplier must be >= 1");
  require(epsilon_decay > 0.0 && epsilon_decay <= 1.0, "epsilon_decay must be in (0,1]");
  require(epsilon_base >= 0.0, "epsilon_base must be >= 0");
  require(init_perturbation >= 0.0, "init_perturbation must be >= 0");
  require(guard_cooldown >= 0, "guard_cooldown must be >= 0");
}

Encoder init_trivial(const JointDistribution& joint, Index z_size,
                     double perturbation, std::uint64_t seed) {
  require(z_size >= 2, "init_trivial needs |Z| >= 2");
  const Index X = joint.x_size();
  Matrix q = Matrix::Constant(X, z_size, 1.0 / static_cast<double>(z_size));
  if (perturbation > 0.0) {
    std::mt19937_64 rng(seed);
    for (Index x = 0; x < X; ++x) {
      for (Index z = 0; z < z_size; ++z) {
        q(x, z) += perturbation * (2.0 * uniform01(rng) - 1.0);
      }
    }
    return project_simplex_rows(q);
  }
  return Encoder::unchecked(std::move(q));
}

Encoder project_simplex_rows(const Matrix& enc_raw) {
  require(enc_raw.allFinite(), "projection input has non-finite entries");
  Matrix q = enc_raw;
  const Index Z = q.cols();
  for (Index x = 0; x < q.rows(); ++x) {
    for (Index z = 0; z < Z; ++z) {
      if (q(x, z) < 0.0) q(x, z) = 0.0;
    }
    double s = q.row(x).sum();
    if (s <= 0.0) {
      q.row(x).setConstant(1.0 / static_cast<double>(Z));
    } else {
      q.row(x) /= s;
    }
    bool floored = false;
    for (Index z = 0; z < Z; ++z) {
      if (q(x, z) < kEncoderFloor) {
        q(x, z) = kEncoderFloor;
        floored = true;
      }
    }
    if (floored) q.row(x) /= q.row(x).sum();
  }
  return Encoder::unchecked(std::move(q));
}

PredictorResult predictor_step(const Encoder& enc, const JointDistribution& joint,
                               const ObjectiveSpec&, double delta_beta,
                               const Matrix& hessian) {
  PredictorResult out;
  if (delta_beta == 0.0) {
    out.encoder = project_simplex_rows(enc.p_z_given_x);
    return out;
  }

  const Vector g = reduce_gradient(grad_mutual_info_zy_unchecked(enc, joint));
  Eigen::SelfAdjointEigenSolver<Matrix> es(hessian);
  if (es.info() != Eigen::Success) {
    out.declined = true;
    out.encoder = project_simplex_rows(enc.p_z_given_x);
    return out;
  }
  const Vector& evals = es.eigenvalues();
  const double cutoff = 1e-10 * std::max(1.0, evals.cwiseAbs().maxCoeff());

  // dq = H^{-1} g restricted to the eigenspace with lambda above the cutoff.
  // Flat gauge modes (duplicate clusters, trivial family) carry no
  // information about the path, and negative modes point off the optimum
  // manifold where the implicit ODE is not valid; both are dropped.
  Vector dq = Vector::Zero(g.size());
  int used = 0;
  for (Index i = 0; i < evals.size(); ++i) {
    if (evals[i] <= cutoff) continue;
    const Vector v = es.eigenvectors().col(i);
    dq += (v.dot(g) / evals[i]) * v;
    ++used;
  }
  if (used == 0 || !dq.allFinite() ||
      dq.cwiseAbs().maxCoeff() * delta_beta > kMaxPredictorMove) {
    out.declined = true;
    out.encoder = project_simplex_rows(enc.p_z_given_x);
    return out;
  }

  ReducedCoordinates rc = to_reduced(enc);
  rc.values += dq * delta_beta;
  out.encoder = project_simplex_rows(expand_unchecked(rc).p_z_given_x);
  return out;
}

PredictorResult predictor_step(const Encoder& enc, const JointDistribution& joint,
                               const ObjectiveSpec& spec, double delta_beta) {
  return predictor_step(enc, joint, spec, delta_beta,
                        objective_hessian(project_simplex_rows(enc.p_z_given_x), joint, spec));
}

CorrectorResult corrector(const Encoder& enc_pred, const JointDistribution& joint,
                          const ObjectiveSpec& spec, const ContinuationConfig& cfg) {
  CorrectorResult out;
  Encoder q = project_simplex_rows(enc_pred.p_z_given_x);
  double obj = objective_value(q, joint, spec);

  double eta = cfg.eta;
  Vector g_prev;
  int oscillations = 0;

  for (int step = 0; step < cfg.corrector_max_steps; ++step) {
    const Vector g = objective_gradient(q, joint, spec);
    if (eta * g.norm() < cfg.corrector_tol) {
      // even a full step would move less than the tolerance
      out.converged = true;
      break;
    }
    // Anti-parallel consecutive gradients mean the stiffest mode sits at the
    // edge of stability for the current step size; halve before it stalls.
    if (g_prev.size() == g.size() &&
        g.dot(g_prev) < -0.9 * g.norm() * g_prev.norm()) {
      if (++oscillations >= 3) {
        eta *= 0.5;
        oscillations = 0;
      }
    } else {
      oscillations = 0;
    }
    g_prev = g;

    ReducedCoordinates rc = to_reduced(q);
    // Active set: a step component that pushes a floor-pinned coordinate
    // further down only churns the projection, so it is masked out.
    Vector step_dir = g;
    const Index zr = rc.z_size - 1;
    for (Index j = 0; j < step_dir.size(); ++j) {
      if (step_dir[j] > 0.0 && rc.values[j] <= kEncoderFloor * 1.01) step_dir[j] = 0.0;
    }
    for (Index x = 0; x < rc.x_size; ++x) {
      // the implied last column: a pinned one must not be pushed down either
      if (q.p_z_given_x(x, rc.z_size - 1) > kEncoderFloor * 1.01) continue;
      double inflow = 0.0;
      for (Index z = 0; z < zr; ++z) inflow += step_dir[x * zr + z];
      if (inflow >= 0.0) continue;  // step raises the last column
      for (Index z = 0; z < zr; ++z) {
        if (step_dir[x * zr + z] < 0.0) step_dir[x * zr + z] = 0.0;
      }
    }
    if (eta * step_dir.norm() < cfg.corrector_tol) {
      out.converged = true;
      break;
    }

    Encoder q_next{Matrix()};
    double obj_next = 0.0;
    bool accepted = false;
    for (int halving = 0; halving <= 20; ++halving) {
      ReducedCoordinates trial = rc;
      trial.values -= eta * step_dir;
      q_next = project_simplex_rows(expand_unchecked(trial).p_z_given_x);
      obj_next = objective_value(q_next, joint, spec);
      if (obj_next <= obj) {
        accepted = true;
        break;
      }
      eta *= 0.5;
    }
    if (!accepted) {
      // at the smallest step the achievable decrease is below rounding;
      // a sub-tolerance residual move means we are at the optimum
      if (eta * step_dir.norm() < cfg.corrector_tol) {
        out.converged = true;
      } else {
        out.backtracking_failed = true;
      }
      break;
    }

    const double move = (to_reduced(q_next).values - rc.values).norm();
    q = std::move(q_next);
    obj = obj_next;
    out.steps = step + 1;
    out.final_move = move;
    if (move < cfg.corrector_tol) {
      out.converged = true;
      break;
    }
  }

  out.encoder = std::move(q);
  return out;
}

GuardAction eigenvalue_guard(double lambda_min, const ContinuationConfig& cfg,
                             GuardState& state) {
  if (lambda_min < cfg.lambda_threshold) {
    if (state.steps_since_raise >= cfg.guard_cooldown) {
      state.epsilon *= cfg.epsilon_multiplier;
      state.steps_since_raise = 0;
      return GuardAction::Raised;
    }
    return GuardAction::None;
  }
  if (lambda_min > 2.0 * cfg.lambda_threshold && state.epsilon > cfg.epsilon_base) {
    state.epsilon = std::max(cfg.epsilon_base, state.epsilon * cfg.epsilon_decay);
    return GuardAction::Decayed;
  }
  return GuardAction::None;
}


Trajectory run_continuation(const JointDistribution& joint, Index z_size,
                            const ObjectiveSpec& spec_template,
                            const ContinuationConfig& cfg) {
  cfg.validate();

  Trajectory traj;
  traj.dataset_i_xy_bits = nats_to_bits(mutual_info_xy(joint));
  {
    std::ostringstream ss;
    ss << "penalty=" << spec_template.penalty.name() << " eps_base=" << cfg.epsilon_base;
    traj.spec_summary = ss.str();
  }

  GuardState guard{cfg.epsilon_base};
  ObjectiveSpec spec = spec_template;
  spec.beta = 0.0;
  spec.epsilon = guard.epsilon;

  Encoder q = init_trivial(joint, z_size, cfg.init_perturbation, cfg.seed);
  Matrix hessian;  // of the current spec at the last logged point
  int failure_streak = 0;
  const long n_steps = std::lround(cfg.beta_max / cfg.delta_beta);

  // A converged corrector point with firmly negative curvature is a
  // symmetric saddle: the noise that selects a branch was contracted away
  // while the trivial solution was still optimal. Break the symmetry again
  // and re-converge (once per step); accepted only if the objective does not
  // get worse.
  auto escape_saddle = [&](CorrectorResult& corr, double& lambda, long step_index) {
    if (!corr.converged || cfg.init_perturbation <= 0.0) return false;
    if (lambda >= -cfg.lambda_threshold) return false;
    std::mt19937_64 rng(mix_seed(cfg.seed ^ 0x5add1eull, static_cast<std::uint64_t>(step_index)));
    Matrix noisy = corr.encoder.p_z_given_x;
    for (Index x = 0; x < noisy.rows(); ++x) {
      for (Index z = 0; z < noisy.cols(); ++z) {
        noisy(x, z) += cfg.init_perturbation * (2.0 * uniform01(rng) - 1.0);
      }
    }
    CorrectorResult redo = corrector(project_simplex_rows(noisy), joint, spec, cfg);
    if (objective_value(redo.encoder, joint, spec) >
        objective_value(corr.encoder, joint, spec)) {
      return false;
    }
    IB_LOG_INFO("branch escape at beta=" << spec.beta);
    redo.steps += corr.steps;
    corr = std::move(redo);
    q = corr.encoder;
    hessian = objective_hessian(corr.encoder, joint, spec);
    lambda = min_eigenvalue(hessian);
    ++traj.branch_escapes;
    return true;
  };

  auto process_step = [&](CorrectorResult corr, long step_index) {
    hessian = objective_hessian(corr.encoder, joint, spec);
    double lambda = min_eigenvalue(hessian);
    const bool escaped = escape_saddle(corr, lambda, step_index);

    TrajectoryRecord rec = make_record(corr.encoder, joint, spec);
    rec.lambda_min = lambda;
    rec.corrector_steps_taken = corr.steps;
    rec.converged = corr.converged;
    if (!corr.converged) ++traj.nonconverged_steps;

    GuardAction action = GuardAction::None;
    if (escaped) {
      // the alarm is explained and handled; only relaxation may proceed
      if (lambda > 2.0 * cfg.lambda_threshold && guard.epsilon > cfg.epsilon_base) {
        guard.epsilon = std::max(cfg.epsilon_base, guard.epsilon * cfg.epsilon_decay);
        action = GuardAction::Decayed;
      }
      ++guard.steps_since_raise;
    } else {
      action = eigenvalue_guard(lambda, cfg, guard);
      ++guard.steps_since_raise;
    }
    if (action != GuardAction::None) {
      IB_LOG_INFO("guard: " << (action == GuardAction::Raised ? "raised" : "decayed")
                            << " epsilon to " << guard.epsilon << " at beta=" << rec.beta
                            << " (lambda_min=" << lambda << ")");
    }

    const bool snapshot = (cfg.snapshot_every > 0 && step_index % cfg.snapshot_every == 0) ||
                          action != GuardAction::None || escaped || step_index == n_steps;
    if (snapshot) rec.encoder_snapshot = corr.encoder;
    traj.records.push_back(std::move(rec));

    if (spec.epsilon != guard.epsilon) {
      spec.epsilon = guard.epsilon;
      // the spec changed, so the stored Hessian no longer matches it
      hessian = objective_hessian(q, joint, spec);
    }
    return corr.converged;
  };

  // Converge and log the beta = 0 starting point.
  CorrectorResult corr = corrector(q, joint, spec, cfg);
  q = corr.encoder;
  failure_streak = process_step(corr, 0) ? 0 : 1;

  for (long i = 1; i <= n_steps; ++i) {
    PredictorResult pred = predictor_step(q, joint, spec, cfg.delta_beta, hessian);
    if (pred.declined) {
      IB_LOG_DEBUG("predictor declined at beta=" << spec.beta);
      GuardAction action = eigenvalue_guard(0.0, cfg, guard);
      if (action == GuardAction::Raised) spec.epsilon = guard.epsilon;
    }

    spec.beta = static_cast<double>(i) * cfg.delta_beta;
    corr = corrector(pred.encoder, joint, spec, cfg);
    q = corr.encoder;

    // A capped corrector whose final move sits near the tolerance is still
    // tracking (slow drift along nearly flat directions); only hard failures
    // count toward the abort streak.
    const bool ok = process_step(corr, i) ||
                    (!corr.backtracking_failed &&
                     corr.final_move <= 100.0 * cfg.corrector_tol);
    if (ok) {
      failure_streak = 0;
    } else if (++failure_streak > 5) {
      traj.status = TrajectoryStatus::Aborted;
      std::ostringstream ss;
      ss << "corrector failed to converge for " << failure_streak
         << " consecutive steps (last beta=" << spec.beta << ")";
      traj.abort_reason = ss.str();
      return traj;
    }
  }
  return traj;
}

}  // namespace ib

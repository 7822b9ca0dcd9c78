#pragma once

#include <cstdint>

#include "ib/trajectory.hpp"
#include "ib/types.hpp"

namespace ib {

struct ContinuationConfig {
  double beta_max = 3.0;
  double delta_beta = 0.01;
  double eta = 0.5;                 // corrector step size
  double corrector_tol = 1e-9;      // on ||q - q_old|| over reduced coordinates
  int corrector_max_steps = 500;
  double lambda_threshold = 1e-3;   // delta: eigenvalue alarm level
  double epsilon_multiplier = 2.0;  // alpha
  double epsilon_base = 0.0;
  double epsilon_decay = 0.9;       // per-step relaxation factor toward epsilon_base
  int guard_cooldown = 10;          // steps between consecutive epsilon raises
  double init_perturbation = 1e-3;
  std::uint64_t seed = 1;
  int snapshot_every = 10;          // 0 disables periodic snapshots

  void validate() const;
};

/// Uniform rows plus additive symmetry-breaking noise of the given scale,
/// re-projected. A fixed seed gives a deterministic branch choice.
Encoder init_trivial(const JointDistribution& joint, Index z_size,
                     double perturbation, std::uint64_t seed);

/// Per row: clamp negatives to 0 and renormalize; a zero row resets to
/// uniform; entries are then raised to kEncoderFloor and renormalized, so the
/// result is always a valid gradient argument.
Encoder project_simplex_rows(const Matrix& enc_raw);

struct PredictorResult {
  Encoder encoder{Matrix()};
  bool declined = false;  // singular Hessian or clamped step; caller keeps q
};

/// One step of the implicit ODE dq/dbeta = +H^{-1} grad I(Z;Y) in reduced
/// coordinates (the sign follows from d/dbeta grad L = -grad I(Z;Y)), solved
/// on the well-conditioned eigenspace of H. The move is projected back to
/// the simplex.
PredictorResult predictor_step(const Encoder& enc, const JointDistribution& joint,
                               const ObjectiveSpec& spec, double delta_beta,
                               const Matrix& hessian);

/// Convenience overload that computes the Hessian itself.
PredictorResult predictor_step(const Encoder& enc, const JointDistribution& joint,
                               const ObjectiveSpec& spec, double delta_beta);

struct CorrectorResult {
  Encoder encoder{Matrix()};
  int steps = 0;
  bool converged = false;
  bool backtracking_failed = false;
  double final_move = 0.0;  // last accepted step length in reduced coordinates
};

/// Projected gradient descent on the objective at fixed spec, with step
/// halving on objective increase (at most 20 halvings). The returned
/// objective never exceeds the entry value.
CorrectorResult corrector(const Encoder& enc_pred, const JointDistribution& joint,
                          const ObjectiveSpec& spec, const ContinuationConfig& cfg);

enum class GuardAction { None, Raised, Decayed };

struct GuardState {
  double epsilon = 0.0;
  int steps_since_raise = 1 << 20;
};

/// If lambda_min < delta and epsilon was not raised within the cooldown,
/// multiply epsilon by alpha; once lambda_min > 2 delta, decay epsilon
/// geometrically toward epsilon_base.
GuardAction eigenvalue_guard(double lambda_min, const ContinuationConfig& cfg,
                             GuardState& state);

/// Full predictor-corrector continuation from the trivial encoder at beta=0
/// up to beta_max. Aborts (with partial trajectory) after more than 5
/// consecutive corrector failures.
Trajectory run_continuation(const JointDistribution& joint, Index z_size,
                            const ObjectiveSpec& spec_template,
                            const ContinuationConfig& cfg);

}  // namespace ib

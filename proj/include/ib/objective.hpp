#pragma once

#include <functional>

#include "ib/info.hpp"
#include "ib/types.hpp"

namespace ib {

/// Penalty u(.) applied to the compression term. u is monotonically
/// increasing on [0, inf); for kinds other than identity it is strictly
/// convex.
struct PenaltyFunction {
  enum class Kind { Identity, Square, Power };

  Kind kind = Kind::Identity;
  double exponent = 1.0;  // only used by Kind::Power

  static PenaltyFunction identity() { return {Kind::Identity, 1.0}; }
  static PenaltyFunction square() { return {Kind::Square, 2.0}; }
  static PenaltyFunction power(double p);

  double u(double t) const;
  double du(double t) const;

  std::string name() const;
};

/// The assembled Lagrangian u(I(X;Z)) - beta I(Z;Y) - epsilon H(Z|X).
/// identity penalty with epsilon == 0 reproduces the classical objective.
struct ObjectiveSpec {
  double beta = 0.0;
  double epsilon = 0.0;
  PenaltyFunction penalty = PenaltyFunction::identity();

  ObjectiveSpec with_beta(double b) const {
    ObjectiveSpec s = *this;
    s.beta = b;
    return s;
  }
  ObjectiveSpec with_epsilon(double e) const {
    ObjectiveSpec s = *this;
    s.epsilon = e;
    return s;
  }
};

/// Objective value in nats.
double objective_value(const Encoder& enc, const JointDistribution& joint,
                       const ObjectiveSpec& spec);

/// Reduced-coordinate gradient:
/// u'(I(X;Z)) grad I(X;Z) - beta grad I(Z;Y) - epsilon grad H(Z|X).
Vector objective_gradient(const Encoder& enc, const JointDistribution& joint,
                          const ObjectiveSpec& spec);

/// As above but without the interior-floor precondition (logs clamped);
/// used by finite-difference probes.
Vector objective_gradient_unchecked(const Encoder& enc, const JointDistribution& joint,
                                    const ObjectiveSpec& spec);

/// Symmetric Hessian of the objective in reduced coordinates, computed by
/// central finite differences of the analytic reduced gradient with a
/// safeguarded relative step, then symmetrized by averaging.
Matrix objective_hessian(const Encoder& enc, const JointDistribution& joint,
                         const ObjectiveSpec& spec);

/// Central finite differences of an arbitrary reduced-gradient map; the
/// machinery behind objective_hessian, exposed so tests can feed it exactly
/// known gradients (e.g. of a quadratic).
Matrix fd_hessian(const std::function<Vector(const Vector&)>& reduced_gradient,
                  const Vector& q0, double step_scale = 1e-5);

/// As above with an explicit per-coordinate step.
Matrix fd_hessian_steps(const std::function<Vector(const Vector&)>& reduced_gradient,
                        const Vector& q0, const Vector& steps);

/// Smallest eigenvalue of a finite symmetric matrix.
double min_eigenvalue(const Matrix& H);

/// All eigenvalues, ascending; used by stability reporting.
Vector symmetric_eigenvalues(const Matrix& H);

/// beta / u'(i_xz): the standard-IB multiplier whose optimality condition a
/// convexified optimum satisfies. Throws if u'(i_xz) == 0.
double beta_effective(const ObjectiveSpec& spec, double i_xz);

/// Record-friendly variant: returns 0 when beta == 0 and u' == 0, +inf when
/// beta > 0 and u' == 0.
double beta_effective_guarded(const ObjectiveSpec& spec, double i_xz);

}  // namespace ib

#include "ib/objective.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>

namespace ib {

PenaltyFunction PenaltyFunction::power(double p) {
  require(p > 1.0, "power penalty needs exponent > 1");
  return {Kind::Power, p};
}

double PenaltyFunction::u(double t) const {
  switch (kind) {
    case Kind::Identity: return t;
    case Kind::Square: return t * t;
    case Kind::Power: return std::pow(t, exponent);
  }
  return t;
}

double PenaltyFunction::du(double t) const {
  switch (kind) {
    case Kind::Identity: return 1.0;
    case Kind::Square: return 2.0 * t;
    case Kind::Power: return exponent * std::pow(t, exponent - 1.0);
  }
  return 1.0;
}

std::string PenaltyFunction::name() const {
  switch (kind) {
    case Kind::Identity: return "identity";
    case Kind::Square: return "square";
    case Kind::Power: return "power:" + std::to_string(exponent);
  }
  return "identity";
}

double objective_value(const Encoder& enc, const JointDistribution& joint,
                       const ObjectiveSpec& spec) {
  const double ixz = mutual_info_xz(enc, joint.p_x);
  const double izy = mutual_info_zy(enc, joint);
  const double hzx = cond_entropy_z_given_x(enc, joint.p_x);
  return spec.penalty.u(ixz) - spec.beta * izy - spec.epsilon * hzx;
}

namespace {

Vector assemble_gradient(const Encoder& enc, const JointDistribution& joint,
                         const ObjectiveSpec& spec, bool checked) {
  const double ixz = mutual_info_xz(enc, joint.p_x);
  const Matrix g_ixz = checked ? grad_mutual_info_xz(enc, joint.p_x)
                               : grad_mutual_info_xz_unchecked(enc, joint.p_x);
  const Matrix g_izy = checked ? grad_mutual_info_zy(enc, joint)
                               : grad_mutual_info_zy_unchecked(enc, joint);
  const Matrix g_hzx = checked ? grad_cond_entropy(enc, joint.p_x)
                               : grad_cond_entropy_unchecked(enc, joint.p_x);
  const Matrix full = spec.penalty.du(ixz) * g_ixz - spec.beta * g_izy - spec.epsilon * g_hzx;
  return reduce_gradient(full);
}

}  // namespace

Vector objective_gradient(const Encoder& enc, const JointDistribution& joint,
                          const ObjectiveSpec& spec) {
  return assemble_gradient(enc, joint, spec, true);
}

Vector objective_gradient_unchecked(const Encoder& enc, const JointDistribution& joint,
                                    const ObjectiveSpec& spec) {
  return assemble_gradient(enc, joint, spec, false);
}

Matrix fd_hessian_steps(const std::function<Vector(const Vector&)>& reduced_gradient,
                        const Vector& q0, const Vector& steps) {
  const Index n = q0.size();
  Matrix H(n, n);
  Vector probe = q0;
  for (Index j = 0; j < n; ++j) {
    const double h = steps[j];
    probe[j] = q0[j] + h;
    const Vector gp = reduced_gradient(probe);
    probe[j] = q0[j] - h;
    const Vector gm = reduced_gradient(probe);
    probe[j] = q0[j];
    H.col(j) = (gp - gm) / (2.0 * h);
  }
  return 0.5 * (H + H.transpose());
}

Matrix fd_hessian(const std::function<Vector(const Vector&)>& reduced_gradient,
                  const Vector& q0, double step_scale) {
  Vector steps(q0.size());
  for (Index j = 0; j < q0.size(); ++j) {
    steps[j] = step_scale * std::max(1.0, std::abs(q0[j]));
  }
  return fd_hessian_steps(reduced_gradient, q0, steps);
}

Matrix objective_hessian(const Encoder& enc, const JointDistribution& joint,
                         const ObjectiveSpec& spec) {
  if (enc.p_z_given_x.minCoeff() < kEncoderFloor * (1.0 - 1e-6)) {
    throw std::domain_error("encoder entry below gradient floor; re-project first");
  }
  ReducedCoordinates rc = to_reduced(enc);
  auto grad_at = [&](const Vector& v) {
    ReducedCoordinates probe{v, rc.x_size, rc.z_size};
    return objective_gradient_unchecked(expand_unchecked(probe), joint, spec);
  };
  // The step must keep probes away from the log clamp: near-floor entries
  // (including the implied last column) get a step proportional to their
  // distance from it, so the gradient stays smooth across the probe.
  const Index zr = rc.z_size - 1;
  Vector steps(rc.values.size());
  for (Index j = 0; j < rc.values.size(); ++j) {
    const double q_j = rc.values[j];
    const double q_last = enc.p_z_given_x(j / zr, rc.z_size - 1);
    double h = 1e-5 * std::max(1.0, std::abs(q_j));
    h = std::min(h, 0.45 * std::max(q_j - kLogFloor, kLogFloor));
    h = std::min(h, 0.45 * std::max(q_last - kLogFloor, kLogFloor));
    steps[j] = h;
  }
  Matrix H = fd_hessian_steps(grad_at, rc.values, steps);
  require(H.allFinite(), "objective Hessian has non-finite entries");
  return H;
}

namespace {

void check_symmetric(const Matrix& H) {
  require(H.rows() == H.cols(), "eigenvalue input is not square");
  require(H.allFinite(), "eigenvalue input has non-finite entries");
  const double scale = std::max(1.0, H.cwiseAbs().maxCoeff());
  require((H - H.transpose()).cwiseAbs().maxCoeff() <= 1e-8 * scale,
          "eigenvalue input is not symmetric");
}

}  // namespace

double min_eigenvalue(const Matrix& H) {
  check_symmetric(H);
  Eigen::SelfAdjointEigenSolver<Matrix> es(H, Eigen::EigenvaluesOnly);
  require(es.info() == Eigen::Success, "eigenvalue solver failed");
  return es.eigenvalues()[0];
}

Vector symmetric_eigenvalues(const Matrix& H) {
  check_symmetric(H);
  Eigen::SelfAdjointEigenSolver<Matrix> es(H, Eigen::EigenvaluesOnly);
  require(es.info() == Eigen::Success, "eigenvalue solver failed");
  return es.eigenvalues();
}

double beta_effective(const ObjectiveSpec& spec, double i_xz) {
  require(i_xz >= 0.0, "beta_effective needs i_xz >= 0");
  const double slope = spec.penalty.du(i_xz);
  require(slope > 0.0, "beta_effective undefined where u'(i_xz) == 0");
  return spec.beta / slope;
}

double beta_effective_guarded(const ObjectiveSpec& spec, double i_xz) {
  const double slope = spec.penalty.du(std::max(i_xz, 0.0));
  if (slope > 0.0) return spec.beta / slope;
  return spec.beta == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
}

}  // namespace ib

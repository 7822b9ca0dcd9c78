#pragma once

#include "ib/types.hpp"

namespace ib {

// Exact information-theoretic quantities for discrete distributions.
// Internal unit is nats; use nats_to_bits() for reporting.

/// Cluster marginal p(z) = sum_x p(x) p(z|x).
Vector cluster_marginal(const Encoder& enc, const Vector& p_x);

/// I(X;Z) = sum_{x,z} p(x) p(z|x) log( p(z|x) / p(z) ).
double mutual_info_xz(const Encoder& enc, const Vector& p_x);

/// I(Z;Y) from p(z,y) = sum_x p(x,y) p(z|x).
double mutual_info_zy(const Encoder& enc, const JointDistribution& joint);

/// I(X;Y) of the problem instance itself.
double mutual_info_xy(const JointDistribution& joint);

/// H(Z|X) = -sum_x p(x) sum_z p(z|x) log p(z|x).
double cond_entropy_z_given_x(const Encoder& enc, const Vector& p_x);

// Analytic gradients in full (x,z) coordinates. The public versions require
// every encoder entry >= kEncoderFloor and throw std::domain_error otherwise;
// callers re-project first. The *_unchecked versions clamp logs and never
// reject, for use inside finite-difference machinery that probes slightly
// outside the simplex.

/// d I(X;Z) / d p(z|x) = p(x) log( p(z|x) / p(z) ).
Matrix grad_mutual_info_xz(const Encoder& enc, const Vector& p_x);
Matrix grad_mutual_info_xz_unchecked(const Encoder& enc, const Vector& p_x);

/// Entry (x,z) = p(x) sum_y p(y|x) log( p(y|z) / p(y) ); equal to the
/// unconstrained derivative up to a row constant, which cancels in reduced
/// coordinates.
Matrix grad_mutual_info_zy(const Encoder& enc, const JointDistribution& joint);
Matrix grad_mutual_info_zy_unchecked(const Encoder& enc, const JointDistribution& joint);

/// d H(Z|X) / d p(z|x) = -p(x) (log p(z|x) + 1).
Matrix grad_cond_entropy(const Encoder& enc, const Vector& p_x);
Matrix grad_cond_entropy_unchecked(const Encoder& enc, const Vector& p_x);

// Reduced coordinates: for each x the last z-column is dependent, so the
// reduced gradient entry is full(x,z) - full(x,z_last).

Vector reduce_gradient(const Matrix& full_gradient);
ReducedCoordinates to_reduced(const Encoder& enc);

/// Reconstructs the dependent column as 1 minus the stored row sum.
/// Throws if a stored row sum exceeds 1 + 1e-10 or an entry is outside [0,1].
Encoder expand(const ReducedCoordinates& reduced);

/// expand() without range validation, for finite-difference probes.
Encoder expand_unchecked(const ReducedCoordinates& reduced);

}  // namespace ib

#include "ib/info.hpp"

namespace ib {

namespace {

void check_dims(const Encoder& enc, const Vector& p_x) {
  require(enc.x_size() == p_x.size(), "encoder / marginal dimension mismatch");
}

void check_dims(const Encoder& enc, const JointDistribution& joint) {
  require(enc.x_size() == joint.x_size(), "encoder / joint dimension mismatch");
}

void check_interior(const Matrix& q) {
  // slack: the projection renormalizes after flooring, which can leave
  // floored entries a relative epsilon under the floor
  if (q.minCoeff() < kEncoderFloor * (1.0 - 1e-6)) {
    throw std::domain_error("encoder entry below gradient floor; re-project first");
  }
}

double clamp_mi(double v) {
  // Exact-zero cases can come out as -1e-17 through rounding.
  return (v < 0.0 && v > -1e-9) ? 0.0 : v;
}

}  // namespace

Vector cluster_marginal(const Encoder& enc, const Vector& p_x) {
  return enc.p_z_given_x.transpose() * p_x;
}

double mutual_info_xz(const Encoder& enc, const Vector& p_x) {
  check_dims(enc, p_x);
  const Matrix& q = enc.p_z_given_x;
  const Vector pz = cluster_marginal(enc, p_x);
  double s = 0.0;
  for (Index x = 0; x < q.rows(); ++x) {
    for (Index z = 0; z < q.cols(); ++z) {
      const double joint = p_x[x] * q(x, z);
      if (joint > 0.0 && pz[z] > 0.0) s += joint * clog(q(x, z) / pz[z]);
    }
  }
  return clamp_mi(s);
}

double mutual_info_zy(const Encoder& enc, const JointDistribution& joint) {
  check_dims(enc, joint);
  const Matrix p_zy = enc.p_z_given_x.transpose() * joint.p_xy;
  const Vector pz = p_zy.rowwise().sum();
  double s = 0.0;
  for (Index z = 0; z < p_zy.rows(); ++z) {
    for (Index y = 0; y < p_zy.cols(); ++y) {
      const double p = p_zy(z, y);
      const double indep = pz[z] * joint.p_y[y];
      if (p > 0.0 && indep > 0.0) s += p * clog(p / indep);
    }
  }
  return clamp_mi(s);
}

double mutual_info_xy(const JointDistribution& joint) {
  double s = 0.0;
  for (Index x = 0; x < joint.x_size(); ++x) {
    for (Index y = 0; y < joint.y_size(); ++y) {
      const double p = joint.p_xy(x, y);
      const double indep = joint.p_x[x] * joint.p_y[y];
      if (p > 0.0 && indep > 0.0) s += p * clog(p / indep);
    }
  }
  return clamp_mi(s);
}

double cond_entropy_z_given_x(const Encoder& enc, const Vector& p_x) {
  check_dims(enc, p_x);
  const Matrix& q = enc.p_z_given_x;
  double s = 0.0;
  for (Index x = 0; x < q.rows(); ++x) {
    for (Index z = 0; z < q.cols(); ++z) {
      if (q(x, z) > 0.0) s -= p_x[x] * q(x, z) * clog(q(x, z));
    }
  }
  return s < 0.0 ? 0.0 : s;
}

Matrix grad_mutual_info_xz_unchecked(const Encoder& enc, const Vector& p_x) {
  const Matrix& q = enc.p_z_given_x;
  const Vector pz = cluster_marginal(enc, p_x);
  Matrix g(q.rows(), q.cols());
  for (Index x = 0; x < q.rows(); ++x) {
    for (Index z = 0; z < q.cols(); ++z) {
      g(x, z) = pz[z] > 0.0 ? p_x[x] * clog(q(x, z) / pz[z]) : 0.0;
    }
  }
  return g;
}

Matrix grad_mutual_info_xz(const Encoder& enc, const Vector& p_x) {
  check_dims(enc, p_x);
  check_interior(enc.p_z_given_x);
  return grad_mutual_info_xz_unchecked(enc, p_x);
}

Matrix grad_mutual_info_zy_unchecked(const Encoder& enc, const JointDistribution& joint) {
  const Matrix p_zy = enc.p_z_given_x.transpose() * joint.p_xy;  // |Z| x |Y|
  const Vector pz = p_zy.rowwise().sum();
  // log( p(y|z) / p(y) ) evaluated as a ratio so that a small cluster mass
  // cancels instead of hitting the log floor on both sides
  Matrix log_ratio(p_zy.rows(), p_zy.cols());
  for (Index z = 0; z < p_zy.rows(); ++z) {
    for (Index y = 0; y < p_zy.cols(); ++y) {
      const double indep = pz[z] * joint.p_y[y];
      log_ratio(z, y) = indep > 0.0 ? clog(p_zy(z, y) / indep) : 0.0;
    }
  }
  // entry (x,z) = sum_y p(x,y) log( p(y|z) / p(y) )
  return joint.p_xy * log_ratio.transpose();
}

Matrix grad_mutual_info_zy(const Encoder& enc, const JointDistribution& joint) {
  check_dims(enc, joint);
  check_interior(enc.p_z_given_x);
  return grad_mutual_info_zy_unchecked(enc, joint);
}

Matrix grad_cond_entropy_unchecked(const Encoder& enc, const Vector& p_x) {
  const Matrix& q = enc.p_z_given_x;
  Matrix g(q.rows(), q.cols());
  for (Index x = 0; x < q.rows(); ++x) {
    for (Index z = 0; z < q.cols(); ++z) {
      g(x, z) = -p_x[x] * (clog(q(x, z)) + 1.0);
    }
  }
  return g;
}

Matrix grad_cond_entropy(const Encoder& enc, const Vector& p_x) {
  check_dims(enc, p_x);
  check_interior(enc.p_z_given_x);
  return grad_cond_entropy_unchecked(enc, p_x);
}

Vector reduce_gradient(const Matrix& full_gradient) {
  const Index X = full_gradient.rows();
  const Index Z = full_gradient.cols();
  require(Z >= 2, "reduce_gradient needs |Z| >= 2");
  Vector r(X * (Z - 1));
  for (Index x = 0; x < X; ++x) {
    for (Index z = 0; z + 1 < Z; ++z) {
      r[x * (Z - 1) + z] = full_gradient(x, z) - full_gradient(x, Z - 1);
    }
  }
  return r;
}

ReducedCoordinates to_reduced(const Encoder& enc) {
  const Index X = enc.x_size();
  const Index Z = enc.z_size();
  require(Z >= 2, "to_reduced needs |Z| >= 2");
  ReducedCoordinates rc;
  rc.x_size = X;
  rc.z_size = Z;
  rc.values.resize(X * (Z - 1));
  for (Index x = 0; x < X; ++x) {
    for (Index z = 0; z + 1 < Z; ++z) {
      rc.values[x * (Z - 1) + z] = enc.p_z_given_x(x, z);
    }
  }
  return rc;
}

Encoder expand_unchecked(const ReducedCoordinates& reduced) {
  const Index X = reduced.x_size;
  const Index Z = reduced.z_size;
  Matrix q(X, Z);
  for (Index x = 0; x < X; ++x) {
    double row_sum = 0.0;
    for (Index z = 0; z + 1 < Z; ++z) {
      const double v = reduced.values[x * (Z - 1) + z];
      q(x, z) = v;
      row_sum += v;
    }
    q(x, Z - 1) = 1.0 - row_sum;
  }
  return Encoder::unchecked(std::move(q));
}

Encoder expand(const ReducedCoordinates& reduced) {
  require(reduced.values.size() == reduced.dim(), "reduced coordinate size mismatch");
  for (Index x = 0; x < reduced.x_size; ++x) {
    double row_sum = 0.0;
    for (Index z = 0; z + 1 < reduced.z_size; ++z) {
      const double v = reduced.values[x * (reduced.z_size - 1) + z];
      require(v >= 0.0 && v <= 1.0, "reduced coordinate outside [0,1]");
      row_sum += v;
    }
    require(row_sum <= 1.0 + 1e-10, "reduced coordinate row sum exceeds 1");
  }
  return expand_unchecked(reduced);
}

}  // namespace ib

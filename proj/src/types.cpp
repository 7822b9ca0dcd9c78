#include "ib/types.hpp"

namespace ib {

JointDistribution JointDistribution::from_joint(const Matrix& p) {
  require(p.rows() >= 2 && p.cols() >= 2, "joint distribution needs |X| >= 2 and |Y| >= 2");
  require(p.allFinite(), "joint distribution has non-finite entries");
  require(p.minCoeff() >= 0.0, "joint distribution has negative entries");
  require(std::abs(p.sum() - 1.0) <= 1e-12, "joint distribution mass is not 1");
  JointDistribution j;
  j.p_xy = p;
  j.p_x = p.rowwise().sum();
  j.p_y = p.colwise().sum();
  return j;
}

Encoder Encoder::from_matrix(const Matrix& q) {
  require(q.cols() >= 1, "encoder needs |Z| >= 1");
  require(q.allFinite(), "encoder has non-finite entries");
  require(q.minCoeff() >= 0.0, "encoder has negative entries");
  for (Index x = 0; x < q.rows(); ++x) {
    require(std::abs(q.row(x).sum() - 1.0) <= 1e-10, "encoder row does not sum to 1");
  }
  return Encoder{q};
}

}  // namespace ib

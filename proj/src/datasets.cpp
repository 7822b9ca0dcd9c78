#include "ib/datasets.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace ib {

namespace {

Vector uniform_prior(Index n) { return Vector::Constant(n, 1.0 / static_cast<double>(n)); }

void check_prior(const Vector& prior, Index n) {
  require(prior.size() == n, "prior has wrong length");
  require(prior.minCoeff() >= 0.0, "prior has negative entries");
  require(std::abs(prior.sum() - 1.0) <= 1e-12, "prior does not sum to 1");
}

std::string format_row(const Eigen::RowVectorXd& row) {
  std::ostringstream ss;
  char buf[64];
  for (Index i = 0; i < row.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", row[i]);
    if (i) ss << ' ';
    ss << buf;
  }
  return ss.str();
}

Matrix read_matrix(const std::filesystem::path& path, const char* size_key_rows,
                   const char* size_key_cols) {
  std::ifstream in(path);
  require(in.good(), "cannot open " + path.string());
  Index rows = -1, cols = -1;
  std::string key;
  for (int i = 0; i < 2; ++i) {
    std::string k;
    long long v;
    if (!(in >> k >> v)) throw std::invalid_argument("malformed header in " + path.string());
    if (k == size_key_rows) rows = v;
    else if (k == size_key_cols) cols = v;
    else throw std::invalid_argument("unexpected header key '" + k + "' in " + path.string());
  }
  require(rows >= 1 && cols >= 1, "missing size header in " + path.string());
  Matrix m(rows, cols);
  for (Index x = 0; x < rows; ++x) {
    for (Index y = 0; y < cols; ++y) {
      if (!(in >> m(x, y))) throw std::invalid_argument("truncated matrix in " + path.string());
    }
  }
  return m;
}

void write_matrix(const Matrix& m, const std::filesystem::path& path,
                  const char* size_key_rows, const char* size_key_cols) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp);
    require(out.good(), "cannot write " + tmp.string());
    out << size_key_rows << ' ' << m.rows() << '\n';
    out << size_key_cols << ' ' << m.cols() << '\n';
    for (Index x = 0; x < m.rows(); ++x) out << format_row(m.row(x)) << '\n';
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace

void HierarchicalParams::validate() const {
  require(w_other >= 0.0, "w_other must be >= 0");
  require(w_self > w_pair && w_pair > w_macro && w_macro > w_other,
          "hierarchical weights must satisfy w_self > w_pair > w_macro > w_other");
  require(std::abs(w_self + w_pair + 2.0 * w_macro + 4.0 * w_other - 1.0) <= 1e-12,
          "hierarchical weights must satisfy w_self + w_pair + 2 w_macro + 4 w_other = 1");
}

JointDistribution make_bsc(double p_cross, const Vector& prior) {
  require(p_cross >= 0.0 && p_cross <= 0.5, "p_cross must be in [0, 0.5]");
  check_prior(prior, 2);
  Matrix p(2, 2);
  p << prior[0] * (1.0 - p_cross), prior[0] * p_cross,
       prior[1] * p_cross, prior[1] * (1.0 - p_cross);
  return JointDistribution::from_joint(p);
}

JointDistribution make_bsc(double p_cross) { return make_bsc(p_cross, uniform_prior(2)); }

JointDistribution make_hierarchical_8x8(const HierarchicalParams& params, const Vector& prior) {
  params.validate();
  check_prior(prior, 8);
  Matrix p(8, 8);
  for (Index x = 0; x < 8; ++x) {
    const Index pair = x ^ 1;
    const Index macro = x / 4;
    for (Index y = 0; y < 8; ++y) {
      double w;
      if (y == x) w = params.w_self;
      else if (y == pair) w = params.w_pair;
      else if (y / 4 == macro) w = params.w_macro;
      else w = params.w_other;
      p(x, y) = prior[x] * w;
    }
  }
  return JointDistribution::from_joint(p);
}

JointDistribution make_hierarchical_8x8(const HierarchicalParams& params) {
  return make_hierarchical_8x8(params, uniform_prior(8));
}

void save_joint(const JointDistribution& joint, const std::filesystem::path& path) {
  write_matrix(joint.p_xy, path, "x_size", "y_size");
}

JointDistribution load_joint(const std::filesystem::path& path) {
  Matrix m = read_matrix(path, "x_size", "y_size");
  require(m.allFinite(), "joint file has non-finite entries");
  require(m.minCoeff() >= 0.0, "joint file has negative entries");
  const double mass = m.sum();
  require(std::abs(mass - 1.0) <= 1e-9, "joint file mass differs from 1 by more than 1e-9");
  return JointDistribution::from_joint(m / mass);
}

void save_encoder(const Encoder& enc, const std::filesystem::path& path) {
  write_matrix(enc.p_z_given_x, path, "x_size", "z_size");
}

Encoder load_encoder(const std::filesystem::path& path) {
  return Encoder::from_matrix(read_matrix(path, "x_size", "z_size"));
}

}  // namespace ib

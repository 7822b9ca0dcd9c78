#include "ib/trajectory.hpp"

namespace ib {

double effective_cluster_count(const Encoder& enc, const Vector& p_x) {
  const Vector pz = cluster_marginal(enc, p_x);
  double h = 0.0;
  for (Index z = 0; z < pz.size(); ++z) {
    if (pz[z] > 0.0) h -= pz[z] * clog(pz[z]);
  }
  return std::exp(h);
}

int used_cluster_count(const Encoder& enc) {
  int n = 0;
  for (Index z = 0; z < enc.z_size(); ++z) {
    if (enc.p_z_given_x.col(z).maxCoeff() > 0.5) ++n;
  }
  return n;
}

TrajectoryRecord make_record(const Encoder& enc, const JointDistribution& joint,
                             const ObjectiveSpec& spec) {
  TrajectoryRecord r;
  const double ixz = mutual_info_xz(enc, joint.p_x);
  r.beta = spec.beta;
  r.beta_effective = beta_effective_guarded(spec, ixz);
  r.i_xz_bits = nats_to_bits(ixz);
  r.i_zy_bits = nats_to_bits(mutual_info_zy(enc, joint));
  r.h_z_given_x_bits = nats_to_bits(cond_entropy_z_given_x(enc, joint.p_x));
  r.objective_nats = spec.penalty.u(ixz) - spec.beta * bits_to_nats(r.i_zy_bits) -
                     spec.epsilon * bits_to_nats(r.h_z_given_x_bits);
  r.epsilon_current = spec.epsilon;
  r.effective_clusters = effective_cluster_count(enc, joint.p_x);
  r.used_clusters = used_cluster_count(enc);
  return r;
}

}  // namespace ib

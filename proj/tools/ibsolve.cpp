// ibsolve: dataset generation, solver runs, and three-way comparison for the
// discrete information bottleneck toolkit. Emits plot-ready CSV trajectories,
// encoder snapshots, and a JSON manifest per run.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <fstream>
#include <iostream>

#include "ib/ba.hpp"
#include "ib/continuation.hpp"
#include "ib/datasets.hpp"
#include "ib/log.hpp"
#include "ib/multipath.hpp"
#include "ib/report.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";

constexpr int kExitConfigError = 2;
constexpr int kExitDatasetError = 3;
constexpr int kExitSolverAbort = 4;

using nlohmann::json;

struct SpecFlags {
  std::string penalty = "identity";
  double epsilon = 0.0;

  ib::PenaltyFunction parse_penalty() const {
    if (penalty == "identity") return ib::PenaltyFunction::identity();
    if (penalty == "square") return ib::PenaltyFunction::square();
    if (penalty.rfind("power:", 0) == 0) {
      return ib::PenaltyFunction::power(std::stod(penalty.substr(6)));
    }
    throw CLI::ValidationError("--penalty must be identity, square, or power:<p>");
  }
};

struct CommonFlags {
  std::string dataset_path;
  std::string out_dir = ".";
  int z_size = 0;  // 0: default to |X|
  std::uint64_t seed = 1;
};

json spec_json(const ib::ObjectiveSpec& spec) {
  return {{"penalty", spec.penalty.name()}, {"epsilon", spec.epsilon}};
}

json config_json(const ib::ContinuationConfig& c) {
  return {{"beta_max", c.beta_max},
          {"delta_beta", c.delta_beta},
          {"eta", c.eta},
          {"corrector_tol", c.corrector_tol},
          {"corrector_max_steps", c.corrector_max_steps},
          {"lambda_threshold", c.lambda_threshold},
          {"epsilon_multiplier", c.epsilon_multiplier},
          {"epsilon_base", c.epsilon_base},
          {"epsilon_decay", c.epsilon_decay},
          {"guard_cooldown", c.guard_cooldown},
          {"init_perturbation", c.init_perturbation},
          {"seed", c.seed},
          {"snapshot_every", c.snapshot_every},
          {"guard_hessian", "full_current_spec"}};
}

void write_json_atomic(const json& j, const std::filesystem::path& path) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp);
    out << j.dump(2) << '\n';
  }
  std::filesystem::rename(tmp, path);
}

class ManifestWriter {
 public:
  ManifestWriter(std::string command, const std::filesystem::path& out_dir)
      : start_(std::chrono::steady_clock::now()), out_dir_(out_dir) {
    std::filesystem::create_directories(out_dir);
    manifest_["command"] = std::move(command);
    manifest_["tool_version"] = kVersion;
    manifest_["status"] = "ok";
  }

  json& data() { return manifest_; }

  void add_output(const std::filesystem::path& p) {
    manifest_["outputs"].push_back(p.string());
  }

  void finish(const std::string& status, const std::string& reason = "") {
    manifest_["status"] = status;
    if (!reason.empty()) manifest_["abort_reason"] = reason;
    manifest_["duration_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    write_json_atomic(manifest_, out_dir_ / "manifest.json");
  }

 private:
  std::chrono::steady_clock::time_point start_;
  std::filesystem::path out_dir_;
  json manifest_;
};

ib::JointDistribution load_dataset(const CommonFlags& flags, json& manifest) {
  ib::JointDistribution joint = ib::load_joint(flags.dataset_path);
  manifest["dataset"] = {{"path", flags.dataset_path},
                         {"x_size", joint.x_size()},
                         {"y_size", joint.y_size()},
                         {"i_xy_bits", ib::nats_to_bits(ib::mutual_info_xy(joint))}};
  return joint;
}

ib::Index effective_z(const CommonFlags& flags, const ib::JointDistribution& joint) {
  return flags.z_size > 0 ? flags.z_size : joint.x_size();
}

void dump_snapshots(const ib::Trajectory& traj, const std::filesystem::path& out_dir,
                    const std::string& prefix, ManifestWriter& mw) {
  for (const ib::TrajectoryRecord& rec : traj.records) {
    if (!rec.encoder_snapshot) continue;
    char name[128];
    std::snprintf(name, sizeof(name), "%s_encoder_beta_%.6f.txt", prefix.c_str(), rec.beta);
    const auto path = out_dir / name;
    ib::save_encoder(*rec.encoder_snapshot, path);
    mw.add_output(path);
  }
}

int finish_trajectory_command(const ib::Trajectory& traj, ManifestWriter& mw) {
  if (traj.status == ib::TrajectoryStatus::Aborted) {
    mw.finish("aborted", traj.abort_reason);
    std::cerr << "solver aborted: " << traj.abort_reason << "\n";
    return kExitSolverAbort;
  }
  mw.finish("ok");
  return 0;
}

// ---- subcommands ----

int cmd_dataset(const std::string& kind, double p_cross, const ib::HierarchicalParams& hp,
                const std::string& out_path) {
  ib::JointDistribution joint =
      kind == "bsc" ? ib::make_bsc(p_cross) : ib::make_hierarchical_8x8(hp);
  ib::save_joint(joint, out_path);

  const double ixy_bits = ib::nats_to_bits(ib::mutual_info_xy(joint));
  std::cout << "wrote " << out_path << "\n";
  std::cout << "x_size " << joint.x_size() << " y_size " << joint.y_size() << "\n";
  std::cout << "i_xy_bits " << ixy_bits << "\n";
  std::cout << "p_x";
  for (ib::Index x = 0; x < joint.x_size(); ++x) std::cout << ' ' << joint.p_x[x];
  std::cout << "\np_y";
  for (ib::Index y = 0; y < joint.y_size(); ++y) std::cout << ' ' << joint.p_y[y];
  std::cout << "\n";

  if (kind == "hier8") {
    // graded structure: mutual information of the pair- and macro-coarsened tables
    auto coarsen = [&](const std::vector<std::vector<ib::Index>>& groups) {
      ib::Matrix g(static_cast<ib::Index>(groups.size()), joint.y_size());
      g.setZero();
      for (std::size_t i = 0; i < groups.size(); ++i) {
        for (ib::Index x : groups[i]) g.row(static_cast<ib::Index>(i)) += joint.p_xy.row(x);
      }
      return ib::nats_to_bits(ib::mutual_info_xy(ib::JointDistribution::from_joint(g)));
    };
    std::cout << "i_macro2_bits " << coarsen({{0, 1, 2, 3}, {4, 5, 6, 7}}) << "\n";
    std::cout << "i_pairs4_bits " << coarsen({{0, 1}, {2, 3}, {4, 5}, {6, 7}}) << "\n";
  }
  return 0;
}

int cmd_sweep(const CommonFlags& flags, double grid_start, double grid_stop, double grid_step,
              const ib::BaConfig& ba_cfg) {
  ManifestWriter mw("sweep", flags.out_dir);
  ib::JointDistribution joint = load_dataset(flags, mw.data());
  const ib::Index Z = effective_z(flags, joint);

  std::vector<double> grid;
  const long n = std::lround((grid_stop - grid_start) / grid_step);
  for (long i = 0; i <= n; ++i) grid.push_back(grid_start + static_cast<double>(i) * grid_step);

  mw.data()["config"] = {{"grid_start", grid_start}, {"grid_stop", grid_stop},
                         {"grid_step", grid_step},   {"z_size", Z},
                         {"max_iters", ba_cfg.max_iters}, {"tol", ba_cfg.tol},
                         {"n_restarts", ba_cfg.n_restarts}};
  mw.data()["seed"] = ba_cfg.seed;

  std::vector<ib::BaResult> results = ib::ba_sweep(joint, grid, Z, ba_cfg);
  std::vector<ib::TrajectoryRecord> records;
  for (const ib::BaResult& r : results) records.push_back(r.record);

  const auto csv = std::filesystem::path(flags.out_dir) / "trajectory.csv";
  ib::write_trajectory_csv(records, csv);
  mw.add_output(csv);
  mw.finish("ok");
  return 0;
}

int cmd_continue(const CommonFlags& flags, const SpecFlags& spec_flags,
                 ib::ContinuationConfig cfg) {
  ManifestWriter mw("continue", flags.out_dir);
  ib::JointDistribution joint = load_dataset(flags, mw.data());
  const ib::Index Z = effective_z(flags, joint);

  ib::ObjectiveSpec spec{0.0, spec_flags.epsilon, spec_flags.parse_penalty()};
  cfg.epsilon_base = spec_flags.epsilon;
  cfg.seed = flags.seed;
  mw.data()["spec"] = spec_json(spec);
  mw.data()["config"] = config_json(cfg);
  mw.data()["config"]["z_size"] = Z;
  mw.data()["seed"] = flags.seed;

  ib::Trajectory traj = ib::run_continuation(joint, Z, spec, cfg);

  const auto csv = std::filesystem::path(flags.out_dir) / "trajectory.csv";
  ib::write_trajectory_csv(traj.records, csv);
  mw.add_output(csv);
  dump_snapshots(traj, flags.out_dir, "continue", mw);
  mw.data()["nonconverged_steps"] = traj.nonconverged_steps;
  return finish_trajectory_command(traj, mw);
}

int cmd_multipath(const CommonFlags& flags, const SpecFlags& spec_flags,
                  ib::ContinuationConfig cfg, int n_paths) {
  ManifestWriter mw("multipath", flags.out_dir);
  ib::JointDistribution joint = load_dataset(flags, mw.data());
  const ib::Index Z = effective_z(flags, joint);

  ib::ObjectiveSpec spec{0.0, spec_flags.epsilon, spec_flags.parse_penalty()};
  cfg.epsilon_base = spec_flags.epsilon;
  std::vector<std::uint64_t> seeds;
  for (int i = 0; i < n_paths; ++i) seeds.push_back(flags.seed + static_cast<std::uint64_t>(i));

  mw.data()["spec"] = spec_json(spec);
  mw.data()["config"] = config_json(cfg);
  mw.data()["config"]["z_size"] = Z;
  mw.data()["config"]["n_paths"] = n_paths;
  mw.data()["seed"] = flags.seed;

  ib::MultiPathResult res = ib::run_multipath(joint, Z, spec, cfg, seeds);

  json summary;
  summary["best_index"] = res.best_index;
  summary["selection_metric_nats"] = res.selection_metric;
  for (std::size_t i = 0; i < res.paths.size(); ++i) {
    const ib::Trajectory& t = res.paths[i];
    char name[64];
    std::snprintf(name, sizeof(name), "path%zu.csv", i);
    const auto csv = std::filesystem::path(flags.out_dir) / name;
    ib::write_trajectory_csv(t.records, csv);
    mw.add_output(csv);

    json pj;
    pj["seed"] = res.seeds[i];
    pj["status"] = t.status == ib::TrajectoryStatus::Completed ? "completed" : "aborted";
    if (!t.records.empty()) {
      pj["final_objective_nats"] = t.records.back().objective_nats;
      pj["final_i_xz_bits"] = t.records.back().i_xz_bits;
      pj["final_i_zy_bits"] = t.records.back().i_zy_bits;
    }
    if (!res.step_kl[i].empty()) {
      pj["step_kl_tail"] = res.step_kl[i].back();
      const auto klpath = std::filesystem::path(flags.out_dir) /
                          ("path" + std::to_string(i) + "_step_kl.csv");
      std::ofstream out(klpath);
      out << "step,kl_nats\n";
      for (std::size_t k = 0; k < res.step_kl[i].size(); ++k) {
        out << (k + 1) << ',' << res.step_kl[i][k] << '\n';
      }
      mw.add_output(klpath);
    }
    summary["paths"].push_back(pj);
  }
  const ib::Trajectory& best = res.paths[res.best_index];
  if (!best.records.empty() && best.records.back().encoder_snapshot) {
    const auto enc_path = std::filesystem::path(flags.out_dir) / "best_encoder.txt";
    ib::save_encoder(*best.records.back().encoder_snapshot, enc_path);
    mw.add_output(enc_path);
  }
  const auto sum_path = std::filesystem::path(flags.out_dir) / "multipath.json";
  write_json_atomic(summary, sum_path);
  mw.add_output(sum_path);
  mw.finish("ok");
  return 0;
}

int cmd_compare(const CommonFlags& flags, ib::CompareConfig cfg) {
  ManifestWriter mw("compare", flags.out_dir);
  ib::JointDistribution joint = load_dataset(flags, mw.data());
  const ib::Index Z = effective_z(flags, joint);

  cfg.ba.seed = flags.seed;
  cfg.continuation.seed = flags.seed;
  mw.data()["config"] = {{"grid_start", cfg.grid_start},
                         {"grid_stop", cfg.grid_stop},
                         {"grid_step", cfg.grid_step},
                         {"substeps", cfg.substeps},
                         {"jump_threshold_bits", cfg.jump_threshold_bits},
                         {"z_size", Z},
                         {"epsilon_entreg", cfg.entreg_spec.epsilon}};
  mw.data()["seed"] = flags.seed;

  ib::CompareResult res = ib::run_compare(joint, Z, cfg);

  const std::filesystem::path dir(flags.out_dir);
  ib::write_trajectory_csv(res.standard_records, dir / "standard.csv");
  ib::write_trajectory_csv(res.convex.records, dir / "convex.csv");
  ib::write_trajectory_csv(res.entreg.records, dir / "entreg.csv");
  mw.add_output(dir / "standard.csv");
  mw.add_output(dir / "convex.csv");
  mw.add_output(dir / "entreg.csv");

  // combined, aligned at grid points; solver appended as a trailing column
  {
    const auto tmp = dir / "combined.csv.tmp";
    std::ofstream out(tmp);
    out << ib::csv_header(true) << '\n';
    for (const auto& r : res.standard_records) out << ib::csv_row(r, "standard") << '\n';
    for (const auto& r : res.convex_at_grid) out << ib::csv_row(r, "convex") << '\n';
    for (const auto& r : res.entreg_at_grid) out << ib::csv_row(r, "entreg") << '\n';
    out.close();
    std::filesystem::rename(tmp, dir / "combined.csv");
    mw.add_output(dir / "combined.csv");
  }

  json report;
  for (const ib::SolverReport& sr : res.report.solvers) {
    json sj{{"name", sr.name},
            {"max_step_i_zy_bits", sr.max_step_i_zy_bits},
            {"nonconverged_points", sr.nonconverged_points},
            {"aborted", sr.aborted}};
    for (const ib::JumpEvent& j : sr.jumps) {
      sj["jumps"].push_back(
          {{"beta_from", j.beta_from}, {"beta_to", j.beta_to}, {"delta_i_zy_bits", j.delta_i_zy_bits}});
    }
    report["solvers"].push_back(sj);
  }
  if (res.report.lambda_zero_crossing_beta) {
    report["lambda_zero_crossing_beta"] = *res.report.lambda_zero_crossing_beta;
  }
  if (res.report.lambda_below_delta_beta) {
    report["lambda_below_delta_beta"] = *res.report.lambda_below_delta_beta;
  }
  {
    json st = json::array();
    for (const auto& p : res.stability) {
      st.push_back({{"beta", p.beta},
                    {"lambda_min", p.lambda_min},
                    {"lambda_min_above_band", p.lambda_min_above_band}});
    }
    report["trivial_branch_stability"] = st;
  }
  write_json_atomic(report, dir / "report.json");
  mw.add_output(dir / "report.json");

  const bool aborted = res.convex.status == ib::TrajectoryStatus::Aborted ||
                       res.entreg.status == ib::TrajectoryStatus::Aborted;
  if (aborted) {
    mw.finish("aborted", "a continuation solver aborted");
    return kExitSolverAbort;
  }
  mw.finish("ok");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"discrete information bottleneck solver toolkit"};
  app.require_subcommand(1);

  // dataset
  auto* dataset = app.add_subcommand("dataset", "generate a problem instance file");
  std::string ds_kind;
  double p_cross = 0.1;
  ib::HierarchicalParams hp;
  std::string ds_out = "joint.txt";
  dataset->add_option("kind", ds_kind, "bsc or hier8")->required()
      ->check(CLI::IsMember({"bsc", "hier8"}));
  dataset->add_option("--p-cross", p_cross, "BSC crossover probability");
  dataset->add_option("--w-self", hp.w_self, "hier8 weight at y = x");
  dataset->add_option("--w-pair", hp.w_pair, "hier8 weight at the pair sibling");
  dataset->add_option("--w-macro", hp.w_macro, "hier8 weight at same-macro outcomes");
  dataset->add_option("--w-other", hp.w_other, "hier8 weight at cross-group outcomes");
  dataset->add_option("--out", ds_out, "output path");

  CommonFlags flags;
  ib::ContinuationConfig ccfg;
  SpecFlags spec_flags;
  ib::BaConfig ba_cfg;
  double grid_start = 0.0, grid_stop = 3.0, grid_step = 0.05;
  int n_paths = 3;
  ib::CompareConfig cmp_cfg;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--dataset", flags.dataset_path, "joint distribution file")->required();
    cmd->add_option("--out", flags.out_dir, "output directory");
    cmd->add_option("--z-size", flags.z_size, "bottleneck cardinality (default |X|)");
    cmd->add_option("--seed", flags.seed, "RNG seed");
  };
  auto add_continuation_flags = [&](CLI::App* cmd) {
    cmd->add_option("--beta-max", ccfg.beta_max, "end of the beta sweep");
    cmd->add_option("--dbeta", ccfg.delta_beta, "continuation step");
    cmd->add_option("--eta", ccfg.eta, "corrector step size");
    cmd->add_option("--corrector-tol", ccfg.corrector_tol, "corrector stop threshold");
    cmd->add_option("--corrector-max-steps", ccfg.corrector_max_steps, "corrector cap");
    cmd->add_option("--delta", ccfg.lambda_threshold, "eigenvalue alarm threshold");
    cmd->add_option("--alpha", ccfg.epsilon_multiplier, "epsilon escalation factor");
    cmd->add_option("--epsilon-decay", ccfg.epsilon_decay, "epsilon relaxation factor");
    cmd->add_option("--perturbation", ccfg.init_perturbation, "init symmetry-breaking scale");
    cmd->add_option("--snapshot-every", ccfg.snapshot_every, "encoder snapshot period");
    cmd->add_option("--penalty", spec_flags.penalty, "identity, square, or power:<p>");
    cmd->add_option("--epsilon", spec_flags.epsilon, "entropy regularization weight");
  };

  auto* sweep = app.add_subcommand("sweep", "independent Blahut-Arimoto per grid point");
  add_common(sweep);
  sweep->add_option("--beta-start", grid_start, "grid start");
  sweep->add_option("--beta-max", grid_stop, "grid stop");
  sweep->add_option("--dbeta", grid_step, "grid step")->check(CLI::PositiveNumber);
  sweep->add_option("--max-iters", ba_cfg.max_iters, "BA iteration cap");
  sweep->add_option("--tol", ba_cfg.tol, "BA total-variation tolerance");
  sweep->add_option("--restarts", ba_cfg.n_restarts, "random restarts per grid point");

  auto* cont = app.add_subcommand("continue", "predictor-corrector continuation");
  add_common(cont);
  add_continuation_flags(cont);

  auto* multi = app.add_subcommand("multipath", "several continuation paths, best-of");
  add_common(multi);
  add_continuation_flags(multi);
  multi->add_option("--paths", n_paths, "number of paths")->check(CLI::PositiveNumber);

  auto* cmp = app.add_subcommand("compare", "three-way solver comparison on a shared grid");
  add_common(cmp);
  cmp->add_option("--beta-start", cmp_cfg.grid_start, "grid start");
  cmp->add_option("--beta-max", cmp_cfg.grid_stop, "grid stop");
  cmp->add_option("--dbeta", cmp_cfg.grid_step, "grid step")->check(CLI::PositiveNumber);
  cmp->add_option("--substeps", cmp_cfg.substeps, "continuation substeps per grid step");
  cmp->add_option("--jump-threshold", cmp_cfg.jump_threshold_bits, "jump threshold in bits");
  cmp->add_option("--epsilon", cmp_cfg.entreg_spec.epsilon, "entropy weight of the entreg solver");
  cmp->add_option("--restarts", cmp_cfg.ba.n_restarts, "BA restarts per grid point");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfigError;
  }

  try {
    if (dataset->parsed()) return cmd_dataset(ds_kind, p_cross, hp, ds_out);
    if (sweep->parsed()) {
      ba_cfg.seed = flags.seed;
      return cmd_sweep(flags, grid_start, grid_stop, grid_step, ba_cfg);
    }
    if (cont->parsed()) return cmd_continue(flags, spec_flags, ccfg);
    if (multi->parsed()) return cmd_multipath(flags, spec_flags, ccfg, n_paths);
    if (cmp->parsed()) return cmd_compare(flags, cmp_cfg);
  } catch (const std::invalid_argument& e) {
    // validation problems: configs and datasets
    const std::string msg = e.what();
    std::cerr << "error: " << msg << "\n";
    const bool dataset_problem = msg.find("joint") != std::string::npos ||
                                 msg.find("file") != std::string::npos ||
                                 msg.find(".txt") != std::string::npos ||
                                 msg.find("prior") != std::string::npos ||
                                 msg.find("p_cross") != std::string::npos ||
                                 msg.find("weights") != std::string::npos;
    return dataset_problem ? kExitDatasetError : kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

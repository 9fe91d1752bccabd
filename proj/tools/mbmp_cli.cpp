// Command-line front end: solve, certify, design-d, experiment, gen-dictionary.
#include "mbmp/error.hpp"
#include "mbmp/experiment.hpp"
#include "mbmp/guarantees.hpp"
#include "mbmp/matrix_io.hpp"
#include "mbmp/pursuit.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace mbmp;

namespace {

struct SolveOptions {
  std::string matrix;
  std::string observations;
  std::string branch_vector;
  bool no_dict_refine = false;
  bool no_subspace_refine = false;
  std::string output;
};

struct CertifyOptions {
  std::string matrix;
  std::string condition;
  Index K = 0;
  Index d = 1;
  double oir = 0.0;
  std::uint64_t budget = kDefaultSupportBudget;
};

struct DesignOptions {
  std::string matrix;
  Index K = 0;
  std::string strategy = "level1";
  std::string method = "mip";
};

struct GenerateOptions {
  std::string kind = "mimo";
  Index M = 0;
  Index N = 0;
  double Z = 0.0;
  Index m = 0;
  Index n = 0;
  Seed seed = 0;
  std::string output;
};

void emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + path);
  out << text;
}

int run_solve(const SolveOptions& o) {
  const Dictionary A = make_dictionary(io::read_matrix(o.matrix));
  const ComplexMatrix Y = io::read_matrix(o.observations);
  const BranchVector d = BranchVector::parse(o.branch_vector);
  PursuitConfig cfg;
  cfg.dictionary_refinement = !o.no_dict_refine;
  cfg.subspace_refinement = !o.no_subspace_refine;

  const auto start = std::chrono::steady_clock::now();
  const RecoveryResult r = mbmp::mbmp(Y, A, d, cfg);
  const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();

  std::string support;
  for (std::size_t i = 0; i < r.support.size(); ++i) {
    if (i) support += ',';
    support += std::to_string(r.support[i]);
  }
  char buf[128];
  std::snprintf(buf, sizeof buf, ";%.17g;%llu;%.4f\n", r.residual_norm,
                static_cast<unsigned long long>(r.nodes_expanded), ms);
  emit("support_indices;residual_norm;nodes_expanded;wall_time_ms\n" + support + buf, o.output);
  return 0;
}

int run_certify(const CertifyOptions& o) {
  const Dictionary A = make_dictionary(io::read_matrix(o.matrix));
  CertificateReport report;
  if (o.condition == "coherence") {
    report = coherence_condition(A, o.K);
  } else if (o.condition == "babel") {
    report = cumulative_coherence_condition(A, o.K);
  } else if (o.condition == "neuman") {
    report = neuman_erc(A, o.K, o.oir, o.budget);
  } else {
    report = mb_coherence(A, {}, o.K, o.d, OirValue::assumed(o.oir), o.budget);
  }
  std::printf("kind;lhs;threshold;holds\n%s;%.17g;%.17g;%s\n", std::string(to_string(report.kind)).c_str(),
              report.lhs, report.threshold, report.holds ? "true" : "false");
  return 0;
}

int run_design(const DesignOptions& o) {
  const Dictionary A = make_dictionary(io::read_matrix(o.matrix));
  const DesignStrategy strategy = o.strategy == "per-node" ? DesignStrategy::PerNode : DesignStrategy::Level1Uniform;
  const DesignMethod method = o.method == "bruteforce" ? DesignMethod::BruteForce : DesignMethod::Mip;
  std::cout << design_branch_vector(A, o.K, strategy, method).to_string() << '\n';
  return 0;
}

int run_generate(const GenerateOptions& o) {
  Dictionary A;
  if (o.kind == "mimo") {
    A = mimo_radar_dictionary(random_geometry(o.M, o.N, o.Z, o.seed));
  } else {
    A = gaussian_dictionary(o.m, o.n, o.seed);
  }
  std::ostringstream out;
  io::write_matrix(out, A.matrix);
  emit(out.str(), o.output);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-branch matching pursuit toolkit"};
  app.require_subcommand(1);

  SolveOptions solve;
  auto* solve_cmd = app.add_subcommand("solve", "Recover a K-sparse support");
  solve_cmd->add_option("--matrix", solve.matrix, "Dictionary matrix file")->required();
  solve_cmd->add_option("--observations", solve.observations, "Observation matrix file (m x l)")->required();
  solve_cmd->add_option("--branch-vector", solve.branch_vector, "Branch counts, e.g. 2,2,2,2,1")->required();
  solve_cmd->add_flag("--no-dict-refine", solve.no_dict_refine, "Disable dictionary refinement");
  solve_cmd->add_flag("--no-subspace-refine", solve.no_subspace_refine, "Disable subspace refinement");
  solve_cmd->add_option("--output", solve.output, "CSV output path (default stdout)");

  CertifyOptions certify;
  auto* certify_cmd = app.add_subcommand("certify", "Evaluate a recovery condition");
  certify_cmd->add_option("--matrix", certify.matrix, "Dictionary matrix file")->required();
  certify_cmd->add_option("--condition", certify.condition)
      ->required()
      ->check(CLI::IsMember({"coherence", "babel", "neuman", "mb-coherence"}));
  certify_cmd->add_option("--K", certify.K, "Sparsity")->required();
  certify_cmd->add_option("--d", certify.d, "Branch count (mb-coherence)");
  certify_cmd->add_option("--oir", certify.oir, "Assumed OIR (noise-to-signal ratio for neuman)");
  certify_cmd->add_option("--budget", certify.budget, "Support enumeration budget");

  DesignOptions design;
  auto* design_cmd = app.add_subcommand("design-d", "Design a branch vector");
  design_cmd->add_option("--matrix", design.matrix, "Dictionary matrix file")->required();
  design_cmd->add_option("--K", design.K, "Sparsity")->required();
  design_cmd->add_option("--strategy", design.strategy)->check(CLI::IsMember({"level1", "per-node"}));
  design_cmd->add_option("--method", design.method)->check(CLI::IsMember({"bruteforce", "mip"}));

  std::string config_path;
  auto* experiment_cmd = app.add_subcommand("experiment", "Run a Monte Carlo sweep");
  experiment_cmd->add_option("--config", config_path, "Key=value config file")->required();

  GenerateOptions gen;
  auto* gen_cmd = app.add_subcommand("gen-dictionary", "Write a random dictionary");
  gen_cmd->add_option("--kind", gen.kind)->check(CLI::IsMember({"mimo", "gaussian"}));
  gen_cmd->add_option("--M", gen.M, "Transmitters");
  gen_cmd->add_option("--N", gen.N, "Receivers");
  gen_cmd->add_option("--Z", gen.Z, "Aperture in wavelengths");
  gen_cmd->add_option("--m", gen.m, "Rows (gaussian)");
  gen_cmd->add_option("--n", gen.n, "Atoms (gaussian)");
  gen_cmd->add_option("--seed", gen.seed);
  gen_cmd->add_option("--output", gen.output);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*solve_cmd) return run_solve(solve);
    if (*certify_cmd) return run_certify(certify);
    if (*design_cmd) return run_design(design);
    if (*gen_cmd) return run_generate(gen);
    if (*experiment_cmd) {
      const ExperimentConfig cfg = parse_experiment_config(std::filesystem::path(config_path));
      emit(run_experiment(cfg), cfg.out);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

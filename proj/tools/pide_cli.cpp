// Command-line front end: single solves, convergence studies, weight dumps
// and mesh diagnostics.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "pide/harness.hpp"

namespace {

struct Options {
  std::vector<double> alphas{0.5};
  std::string gamma = "1";
  int N = 8;
  int J = 1024;
  double T = 1.0;
  double L = 1.0;
  int example = 1;
  std::string f_mode;
  double eps = 1e-6;
  int max_steps = 300;
  int levels = 4;
  std::string out;
  std::string config;
  bool trajectory = false;
  bool parallel = false;
};

void add_common(CLI::App* cmd, Options& o, bool study) {
  if (study) {
    cmd->add_option("--alpha", o.alphas, "Fractional order(s) in (0,1), comma separated")
        ->delimiter(',');
  } else {
    cmd->add_option("--alpha", o.alphas, "Fractional order in (0,1)")->expected(1);
  }
  cmd->add_option("--gamma", o.gamma,
                  "Grading exponent: number, auto-sigma, 2/(alpha+1) or 2/(alpha+2)");
  cmd->add_option("--N", o.N, "Number of time steps (base level for studies)");
  cmd->add_option("--J", o.J, "Number of spatial intervals (base level for studies)");
  cmd->add_option("--T", o.T, "Final time");
  cmd->add_option("--L", o.L, "Domain length");
  cmd->add_option("--example", o.example, "Manufactured problem (1 or 2)")
      ->check(CLI::IsMember({1, 2}));
  cmd->add_option("--f-mode", o.f_mode, "midpoint, endpoint-average or interval-average")
      ->check(CLI::IsMember({"midpoint", "endpoint-average", "interval-average"}));
  cmd->add_option("--eps", o.eps, "Fixed-point stopping tolerance");
  cmd->add_option("--max-steps", o.max_steps, "Fixed-point iteration cap");
  cmd->add_option("--out", o.out, "Output path");
  cmd->add_option("--config", o.config, "key=value file; command-line flags take precedence");
}

std::string problem_name(const Options& o) { return o.example == 1 ? "example1" : "example2"; }

pide::ForcingMode forcing_mode(const Options& o) {
  if (!o.f_mode.empty()) return pide::parse_forcing_mode(o.f_mode);
  // Example 2's forcing is singular at t = 0, so only the interval average is usable.
  return o.example == 2 ? pide::ForcingMode::interval_average
                        : pide::ForcingMode::endpoint_average;
}

double resolve_gamma(const Options& o, double alpha) {
  const auto problem = pide::make_problem(problem_name(o), alpha);
  return pide::GammaRule::parse(o.gamma).resolve(problem, forcing_mode(o));
}

int cmd_solve(const Options& o) {
  const double alpha = o.alphas.front();
  const auto problem = pide::make_problem(problem_name(o), alpha);
  const double g = resolve_gamma(o, alpha);
  auto grid = std::make_shared<const pide::SpatialGrid>(o.L, o.J);
  const auto mesh = pide::TemporalMesh::graded(o.T, o.N, g);
  pide::SchemeConfig config;
  config.eps = o.eps;
  config.max_steps = o.max_steps;
  config.f_mode = forcing_mode(o);
  config.keep_trajectory = o.trajectory;
  const auto result = pide::solve(problem, mesh, grid, alpha, config);
  const double err = pide::error_at_final_time(result.final_solution, problem, o.T);
  std::printf("problem=%s alpha=%g gamma=%g N=%d J=%d f_mode=%s\n", problem.name.c_str(), alpha,
              g, o.N, o.J, pide::to_string(config.f_mode).c_str());
  std::printf("error_l2=%.6e max_fp_iters=%d stable=%s\n", err, result.max_iterations(),
              result.all_stable() ? "yes" : "no");
  if (o.trajectory) {
    if (o.out.empty()) throw std::runtime_error("--trajectory needs --out");
    pide::write_trajectory_csv(result.trajectory, mesh, o.out);
    std::printf("trajectory written to %s\n", o.out.c_str());
  }
  return 0;
}

int cmd_study(const Options& o, pide::RefinementAxis axis) {
  pide::StudyPlan plan;
  plan.problem = problem_name(o);
  plan.alphas = o.alphas;
  plan.gamma_rule = pide::GammaRule::parse(o.gamma);
  plan.axis = axis;
  plan.base_N = o.N;
  plan.base_J = o.J;
  plan.levels = o.levels;
  plan.f_mode = forcing_mode(o);
  plan.eps = o.eps;
  plan.max_steps = o.max_steps;
  plan.T = o.T;
  plan.L = o.L;
  plan.output_path = o.out;
  plan.parallel = o.parallel;
  const auto rows = pide::run_study(plan);
  if (o.out.empty()) {
    std::cout << pide::format_csv(rows);
  } else {
    pide::emit_csv(rows, o.out);
    std::printf("%zu rows written to %s\n", rows.size(), o.out.c_str());
  }
  return 0;
}

int cmd_weights(const Options& o) {
  const double alpha = o.alphas.front();
  const auto mesh = pide::TemporalMesh::graded(o.T, o.N, resolve_gamma(o, alpha));
  const pide::PIWeights weights(mesh, alpha);
  if (o.out.empty()) {
    pide::write_weights_csv(weights, std::cout);
  } else {
    std::ofstream out(o.out);
    if (!out) throw std::runtime_error("cannot open '" + o.out + "' for writing");
    pide::write_weights_csv(weights, out);
  }
  return 0;
}

int cmd_check_mesh(const Options& o) {
  const auto mesh = pide::TemporalMesh::graded(o.T, o.N, resolve_gamma(o, o.alphas.front()));
  const auto h = pide::check_mesh_hypotheses(mesh);
  std::printf("gamma=%g N=%d k=%g\n", mesh.grading(), mesh.steps(), mesh.k_base());
  std::printf("step_bound=%s C=%g\n", h.step_bound ? "true" : "false", h.step_bound_constant);
  std::printf("start_and_ratio=%s c=%g C=%g\n", h.start_and_ratio ? "true" : "false",
              h.start_constant, h.ratio_constant);
  std::printf("step_increment=%s C=%g\n", h.step_increment ? "true" : "false",
              h.increment_constant);
  return h.all() ? 0 : 1;
}

/// Turns `key=value` lines into `--key=value` tokens. Blank lines and `#`
/// comments are skipped.
std::vector<std::string> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
  std::vector<std::string> args;
  std::string line;
  while (std::getline(in, line)) {
    line.erase(0, line.find_first_not_of(" \t"));
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw std::runtime_error("config line without '=': " + line);
    auto trim = [](std::string s) {
      s.erase(0, s.find_first_not_of(" \t"));
      s.erase(s.find_last_not_of(" \t\r") + 1);
      return s;
    };
    std::string key = trim(line.substr(0, eq));
    if (key.rfind("--", 0) != 0) key = "--" + key;
    args.push_back(key + "=" + trim(line.substr(eq + 1)));
  }
  return args;
}

/// Splices config-file tokens in right after the subcommand name. Keys that
/// also appear on the command line are dropped from the file.
std::vector<std::string> expand_config(std::vector<std::string> args,
                                       const std::vector<std::string>& commands) {
  std::string path;
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty()) return args;
  auto sub = std::find_first_of(args.begin() + 1, args.end(), commands.begin(), commands.end());
  if (sub == args.end()) return args;
  auto key_of = [](const std::string& token) { return token.substr(0, token.find('=')); };
  std::vector<std::string> given;
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (args[i].rfind("--", 0) == 0) given.push_back(key_of(args[i]));
  }
  std::vector<std::string> extra;
  for (auto& token : read_config(path)) {
    if (std::find(given.begin(), given.end(), key_of(token)) == given.end()) {
      extra.push_back(std::move(token));
    }
  }
  args.insert(sub + 1, extra.begin(), extra.end());
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Graded-mesh Crank-Nicolson solver for u_t + u u_x - I^(alpha) u_xx = f"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  Options o;
  auto* solve = app.add_subcommand("solve", "Run one solve and report the L2 error at T");
  add_common(solve, o, false);
  solve->add_flag("--trajectory", o.trajectory, "Dump every time level to --out as CSV");

  auto* study_time = app.add_subcommand("study-time", "Temporal convergence: double N per level");
  add_common(study_time, o, true);
  study_time->add_option("--levels", o.levels, "Number of refinement levels")
      ->check(CLI::Range(2, 20));
  study_time->add_flag("--parallel", o.parallel, "Solve levels concurrently");

  auto* study_space = app.add_subcommand("study-space", "Spatial convergence: double J per level");
  add_common(study_space, o, true);
  study_space->add_option("--levels", o.levels, "Number of refinement levels")
      ->check(CLI::Range(2, 20));
  study_space->add_flag("--parallel", o.parallel, "Solve levels concurrently");

  auto* weights = app.add_subcommand("weights-dump", "Write the PI weight matrix as CSV (n,s,weight)");
  add_common(weights, o, false);

  auto* check = app.add_subcommand("check-mesh", "Check the graded-mesh hypotheses");
  add_common(check, o, false);

  // Alpha lists need the vector policy; all others keep their last value.
  for (auto* cmd : {study_time, study_space}) {
    cmd->get_option("--alpha")->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  }

  std::vector<std::string> args(argv, argv + argc);
  try {
    args = expand_config(std::move(args),
                         {"solve", "study-time", "study-space", "weights-dump", "check-mesh"});
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  std::vector<const char*> cargs;
  for (const auto& a : args) cargs.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(cargs.size()), cargs.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*solve) return cmd_solve(o);
    if (*study_time) return cmd_study(o, pide::RefinementAxis::time);
    if (*study_space) return cmd_study(o, pide::RefinementAxis::space);
    if (*weights) return cmd_weights(o);
    if (*check) return cmd_check_mesh(o);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}

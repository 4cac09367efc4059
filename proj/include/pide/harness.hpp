#pragma once

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "pide/errors.hpp"
#include "pide/grid_function.hpp"
#include "pide/mesh.hpp"
#include "pide/problems.hpp"
#include "pide/scheme.hpp"

namespace pide {

/// One refinement level of a convergence study.
struct ConvergenceRow {
  double alpha = 0.0;
  double gamma = 1.0;
  int N = 0;
  int J = 0;
  ForcingMode f_mode = ForcingMode::endpoint_average;
  double error_l2 = 0.0;
  std::optional<double> rate;  // against the previous (coarser) row
  double wall_time_seconds = 0.0;
  int max_fp_iters = 0;
};

/// L2 distance between U^N and the exact solution sampled at time T.
inline double error_at_final_time(const GridFunction& U_N, const ManufacturedProblem& problem,
                                  double T) {
  return norm_l2(U_N - problem.exact_at(U_N.grid_ptr(), T));
}

/// log2(coarse / fine).
inline double observed_rate(double error_coarse, double error_fine) {
  if (!(error_coarse > 0.0) || !(error_fine > 0.0)) {
    throw DomainError("observed_rate needs positive errors");
  }
  return std::log2(error_coarse / error_fine);
}

enum class RateRegime {
  graded_below_threshold,  // gamma < 2/sigma: order gamma*sigma
  threshold_log,           // gamma = 2/sigma: k^2 log(t_N/t_1)
  second_order,            // gamma > 2/sigma
};

struct ExpectedOrder {
  double order;
  RateRegime regime;
  bool log_factor;
};

/// Temporal order predicted from the grading exponent and the regularity
/// index sigma. `rel_tol` decides when gamma counts as sitting on 2/sigma.
inline ExpectedOrder expected_temporal_order(double gamma, double sigma,
                                             double rel_tol = 1e-9) {
  if (!(gamma >= 1.0) || !(sigma > 0.0)) {
    throw DomainError("expected_temporal_order needs gamma >= 1 and sigma > 0");
  }
  const double threshold = 2.0 / sigma;
  if (std::abs(gamma - threshold) <= rel_tol * threshold) {
    return {2.0, RateRegime::threshold_log, true};
  }
  if (gamma < threshold) return {gamma * sigma, RateRegime::graded_below_threshold, false};
  return {2.0, RateRegime::second_order, false};
}

/// How the grading exponent is chosen for each alpha.
struct GammaRule {
  enum class Kind { fixed, two_over_alpha_plus_1, two_over_alpha_plus_2, auto_sigma };
  Kind kind = Kind::fixed;
  double value = 1.0;

  static GammaRule fixed(double g) { return {Kind::fixed, g}; }

  static GammaRule parse(const std::string& s) {
    if (s == "auto-sigma") return {Kind::auto_sigma, 0.0};
    if (s == "2/(alpha+1)") return {Kind::two_over_alpha_plus_1, 0.0};
    if (s == "2/(alpha+2)") return {Kind::two_over_alpha_plus_2, 0.0};
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
      throw DomainError("gamma must be a number, 'auto-sigma', '2/(alpha+1)' or "
                        "'2/(alpha+2)', got '" + s + "'");
    }
    return fixed(v);
  }

  /// The grading never drops below 1 (uniform).
  double resolve(const ManufacturedProblem& problem, ForcingMode mode) const {
    double g = value;
    switch (kind) {
      case Kind::fixed: break;
      case Kind::two_over_alpha_plus_1: g = 2.0 / (problem.alpha + 1.0); break;
      case Kind::two_over_alpha_plus_2: g = 2.0 / (problem.alpha + 2.0); break;
      case Kind::auto_sigma: g = 2.0 / problem.sigma(mode); break;
    }
    return kind == Kind::fixed ? g : std::max(1.0, g);
  }
};

enum class RefinementAxis { time, space };

struct StudyPlan {
  std::string problem = "example1";
  std::vector<double> alphas{0.5};
  GammaRule gamma_rule;
  RefinementAxis axis = RefinementAxis::time;
  int base_N = 8;
  int base_J = 1024;
  int levels = 4;
  ForcingMode f_mode = ForcingMode::endpoint_average;
  double eps = 1e-6;
  int max_steps = 300;
  double T = 1.0;
  double L = 1.0;
  std::string output_path;
  /// Solve the rows on separate threads; output order is unaffected.
  bool parallel = false;

  void validate() const {
    if (levels < 2) throw DomainError("a study needs at least two levels");
    if (alphas.empty()) throw DomainError("a study needs at least one alpha");
    if (base_N < 1 || base_J < 2) throw DomainError("invalid base resolution");
  }
};

/// Solver failure inside a study, tagged with the row that failed.
class StudyError : public std::runtime_error {
 public:
  StudyError(const ConvergenceRow& row, const std::string& what)
      : std::runtime_error("study row alpha=" + std::to_string(row.alpha) +
                           " N=" + std::to_string(row.N) + " J=" + std::to_string(row.J) +
                           ": " + what),
        row_(row) {}
  const ConvergenceRow& row() const noexcept { return row_; }

 private:
  ConvergenceRow row_;
};

/// Solves one configuration and measures its error at T.
inline ConvergenceRow run_row(const ManufacturedProblem& problem, double gamma, int N, int J,
                              const StudyPlan& plan) {
  ConvergenceRow row;
  row.alpha = problem.alpha;
  row.gamma = gamma;
  row.N = N;
  row.J = J;
  row.f_mode = plan.f_mode;
  try {
    const auto start = std::chrono::steady_clock::now();
    auto grid = std::make_shared<const SpatialGrid>(plan.L, J);
    SchemeConfig config;
    config.eps = plan.eps;
    config.max_steps = plan.max_steps;
    config.f_mode = plan.f_mode;
    const SolveResult result =
        solve(problem, TemporalMesh::graded(plan.T, N, gamma), grid, problem.alpha, config);
    row.error_l2 = error_at_final_time(result.final_solution, problem, plan.T);
    row.max_fp_iters = result.max_iterations();
    row.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  } catch (const std::exception& e) {
    throw StudyError(row, e.what());
  }
  return row;
}

inline std::vector<ConvergenceRow> run_study(const StudyPlan& plan) {
  plan.validate();
  struct Job {
    ManufacturedProblem problem;
    double gamma;
    int N;
    int J;
  };
  std::vector<Job> jobs;
  for (double alpha : plan.alphas) {
    const ManufacturedProblem problem = make_problem(plan.problem, alpha);
    const double g = plan.gamma_rule.resolve(problem, plan.f_mode);
    for (int level = 0; level < plan.levels; ++level) {
      const int scale = 1 << level;
      const int N = plan.axis == RefinementAxis::time ? plan.base_N * scale : plan.base_N;
      const int J = plan.axis == RefinementAxis::space ? plan.base_J * scale : plan.base_J;
      jobs.push_back({problem, g, N, J});
    }
  }

  std::vector<ConvergenceRow> rows;
  rows.reserve(jobs.size());
  if (plan.parallel) {
    std::vector<std::future<ConvergenceRow>> pending;
    for (const Job& job : jobs) {
      pending.push_back(std::async(std::launch::async, [&plan, &job] {
        return run_row(job.problem, job.gamma, job.N, job.J, plan);
      }));
    }
    for (auto& f : pending) rows.push_back(f.get());
  } else {
    for (const Job& job : jobs) rows.push_back(run_row(job.problem, job.gamma, job.N, job.J, plan));
  }

  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i % static_cast<std::size_t>(plan.levels) == 0) continue;
    const double coarse = rows[i - 1].error_l2;
    const double fine = rows[i].error_l2;
    if (coarse > 0.0 && fine > 0.0) rows[i].rate = observed_rate(coarse, fine);
  }
  return rows;
}

namespace detail {

inline std::string shortest(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

inline double parse_double(const std::string& s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw DomainError("not a number: '" + s + "'");
  }
  return v;
}

}  // namespace detail

inline constexpr const char* kCsvHeader =
    "alpha,gamma,N,J,f_mode,error_l2,rate,wall_time_seconds,max_fp_iters";

inline std::string format_csv(const std::vector<ConvergenceRow>& rows) {
  using detail::shortest;
  std::string out = kCsvHeader;
  out += '\n';
  for (const auto& r : rows) {
    out += shortest(r.alpha) + ',' + shortest(r.gamma) + ',' + std::to_string(r.N) + ',' +
           std::to_string(r.J) + ',' + to_string(r.f_mode) + ',' + shortest(r.error_l2) + ',' +
           (r.rate ? shortest(*r.rate) : std::string()) + ',' +
           shortest(r.wall_time_seconds) + ',' + std::to_string(r.max_fp_iters) + '\n';
  }
  return out;
}

inline void emit_csv(const std::vector<ConvergenceRow>& rows, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out << format_csv(rows);
  out.flush();
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

inline std::vector<ConvergenceRow> parse_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) {
    throw DomainError("convergence CSV: missing or unexpected header");
  }
  std::vector<ConvergenceRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (line.back() == ',') cells.emplace_back();
    if (cells.size() != 9) throw DomainError("convergence CSV: expected 9 columns: " + line);
    ConvergenceRow r;
    r.alpha = detail::parse_double(cells[0]);
    r.gamma = detail::parse_double(cells[1]);
    r.N = std::stoi(cells[2]);
    r.J = std::stoi(cells[3]);
    r.f_mode = parse_forcing_mode(cells[4]);
    r.error_l2 = detail::parse_double(cells[5]);
    if (!cells[6].empty()) r.rate = detail::parse_double(cells[6]);
    r.wall_time_seconds = detail::parse_double(cells[7]);
    r.max_fp_iters = std::stoi(cells[8]);
    rows.push_back(r);
  }
  return rows;
}

inline std::vector<ConvergenceRow> read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "' for reading");
  return parse_csv(in);
}

/// Trajectory dump: n, t_n, then U at every node.
inline void write_trajectory_csv(const std::vector<GridFunction>& levels,
                                 const TemporalMesh& mesh, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out << "n,t_n";
  if (!levels.empty()) {
    for (std::size_t j = 0; j < levels.front().size(); ++j) out << ",U_" << j;
  }
  out << '\n';
  for (std::size_t n = 0; n < levels.size(); ++n) {
    out << n << ',' << detail::shortest(mesh.time(static_cast<int>(n)));
    for (double v : levels[n].values()) out << ',' << detail::shortest(v);
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

/// Weight dump in long form: n, s, w(n, s).
inline void write_weights_csv(const PIWeights& weights, std::ostream& out) {
  out << "n,s,weight\n";
  for (int n = 1; n <= weights.steps(); ++n) {
    for (int s = 1; s <= n; ++s) {
      out << n << ',' << s << ',' << detail::shortest(weights(n, s)) << '\n';
    }
  }
}

}  // namespace pide

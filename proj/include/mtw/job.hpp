#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "mtw/curvature.hpp"
#include "mtw/potentials.hpp"
#include "mtw/sampling.hpp"

namespace mtw {

/// Batch job description, read from a JSON file. Schema (see README):
///
///   command       cost | curvature | scan | conjugate | perturb-check |
///                 radial-check | harmonic-verify | eps-sweep
///   potential     {kind, dim, A, f, eps, of, fd_step}
///   domain        {shape: product, dim, x_radius, x_inner_radius, v_radius}
///                 or {shape: sum, dim, radius}
///   n_samples, seed, orthogonal_only, margin, method, workers
///   fd            {h_s, h_t, richardson_levels}
///   integrator    {steps, method, energy_tol}
///   T, conj_tol, C_required, t_nodes, eps, x, y, u, v, w
///   output        {csv, summary}
struct JobConfig {
  std::string command;
  std::optional<PotentialSpec> potential;
  std::optional<PhaseDomain> domain;
  int n_samples = 200;
  std::optional<std::uint64_t> seed;
  bool orthogonal_only = false;
  double margin = 1e-6;
  CurvatureMethod method = CurvatureMethod::Jacobi;
  std::optional<FDScheme> fd;
  CurvatureConfig curvature;
  double C_required = 0.0;
  int t_nodes = 64;
  std::vector<double> eps;
  Vec x, y, u, v, w;
  int workers = 0;
  std::string csv_path;
  std::string summary_path;
  /// Compact dump of the source document, echoed into the CSV header.
  std::string echo;
};

/// A problem with one config field: "<field> <reason>".
struct Diagnostic {
  std::string field;
  std::string reason;
  std::string message() const;
};

PotentialSpec potential_from_json(const nlohmann::json& j);
/// Throws InputError for BlackBox specs, which carry no serializable data.
nlohmann::json potential_to_json(const PotentialSpec& spec);

nlohmann::json load_config(const std::string& path);

/// Empty iff the document describes a runnable job.
std::vector<Diagnostic> validate(const nlohmann::json& config);

/// Throws InputError listing every diagnostic when validation fails.
JobConfig parse_job(const nlohmann::json& config);

/// Runs the job, writes its CSV and summary, and echoes the summary to `out`.
/// Returns 0 when complete, 2 when some verdict is inconclusive, 1 on error
/// (the diagnostic goes to `err`).
int run(const nlohmann::json& config, std::ostream& out, std::ostream& err);

}  // namespace mtw

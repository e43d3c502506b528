#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mtw/dynamics.hpp"
#include "mtw/potentials.hpp"
#include "mtw/sampling.hpp"
#include "mtw/shooting.hpp"
#include "mtw/types.hpp"

namespace mtw {

enum class CurvatureMethod { Jacobi, Direct };
std::string to_string(CurvatureMethod m);
CurvatureMethod curvature_method_from_string(const std::string& tag);

/// Finite-difference steps for the cross-curvature estimators. Each
/// Richardson level halves both steps.
struct FDScheme {
  double h_s = 1e-2;
  double h_t = 1e-2;
  int richardson_levels = 2;

  /// h_s = h (1+|v|)/(1+|w|), h_t = h, two levels, with h = 1e-2 for the
  /// Jacobi route and 4e-2 for the direct route, whose fourth differences of
  /// shot costs sit on a ~1e-14 relative noise floor.
  static FDScheme defaults(const Vec& v, const Vec& w,
                           CurvatureMethod method = CurvatureMethod::Jacobi);
  void validate() const;
};

struct CurvatureConfig {
  IntegratorConfig integrator;
  ShootOptions shoot;
  double conj_tol = 1e-8;
  /// Time horizon of the cost c_T; the curvature theory uses T = 1.
  double T = 1.0;
  /// Multistart shoot back from exp^c(x, v) to confirm v is the unique
  /// least-action covector.
  bool check_regularity = true;
  /// Run the full multistart at every stencil pair of the direct method
  /// instead of a warm-started single Newton solve.
  bool stencil_multistart = false;
};

struct CurvatureResult {
  double value = 0.0;
  /// |difference| between the last two Richardson levels.
  double error_estimate = 0.0;
  /// Condition number of N(T) at the central covector.
  double condition_number = 0.0;
};

/// C(u,v,w) = 3/2 d^2/ds^2 <u, J^c(exp^c(v+sw), u)> at s = 0, by central
/// differences in s of the Jacobi map.
/// Throws ConjugatePointError or DomainError off the admissible set.
CurvatureResult cross_curvature_jacobi(const PotentialSpec& spec, const Vec& x, const Vec& u,
                                       const Vec& v, const Vec& w, const FDScheme& fd,
                                       const CurvatureConfig& cfg = {});

/// C(u,v,w) = -3/2 d^2/ds^2 d^2/dt^2 c(x + t u, exp^c(x, v + s w)) at t = s = 0,
/// by a mixed central-difference stencil over shot costs.
CurvatureResult cross_curvature_direct(const PotentialSpec& spec, const Vec& x, const Vec& u,
                                       const Vec& v, const Vec& w, const FDScheme& fd,
                                       const CurvatureConfig& cfg = {});

CurvatureResult cross_curvature(CurvatureMethod method, const PotentialSpec& spec, const Vec& x,
                                const Vec& u, const Vec& v, const Vec& w, const FDScheme& fd,
                                const CurvatureConfig& cfg = {});

struct CurvatureSample {
  int index = 0;
  Vec x, u, v, w;
  double value = 0.0;
  double error_estimate = 0.0;
  CurvatureMethod method = CurvatureMethod::Jacobi;
  bool orthogonal = false;
  double condition_number = 0.0;
  bool excluded = false;
  std::string reason;
};

struct Verdict {
  enum class Status { Holds, Fails, Inconclusive };
  Status status = Status::Inconclusive;
  double margin = 0.0;
  /// Minimum the verdict was decided on (NaN when no samples qualified).
  double statistic = 0.0;
};
std::string to_string(Verdict::Status s);

struct ScanOptions {
  int n_samples = 200;
  bool orthogonal_only = false;
  double margin = 1e-6;
  std::uint64_t seed = 0;
  CurvatureMethod method = CurvatureMethod::Jacobi;
  /// Per-sample FDScheme::defaults when unset.
  std::optional<FDScheme> fd;
  CurvatureConfig cfg;
  /// 0 means hardware concurrency.
  int workers = 0;
};

struct ScanReport {
  PhaseDomain domain;
  ScanOptions options;
  int n_samples = 0;
  int n_excluded = 0;
  int n_orthogonal = 0;
  double min_mtw = 0.0;
  double min_cross = 0.0;
  double max_abs = 0.0;
  int argmin_mtw = -1;
  int argmin_cross = -1;
  Verdict a3w, a3s, b3w, b3s;
  /// More than 10% of samples excluded; every verdict is inconclusive.
  bool exclusion_stamp = false;
  std::vector<CurvatureSample> samples;

  /// B3 verdicts are ignored for orthogonal-only scans, which cannot decide them.
  bool any_inconclusive() const;
};

/// Samples (x, v) from the domain and unit u, w from the sphere. With
/// orthogonal_only every w is orthogonalised against u; otherwise odd-indexed
/// samples are, so the MTW subset is drawn alongside unconstrained samples.
/// Samples raising conjugate/domain/shooting errors are excluded with a reason.
/// Throws EmptyScanError when nothing survives.
ScanReport mtw_scan(const PotentialSpec& spec, const PhaseDomain& domain, const ScanOptions& opts);

/// Verdict rules shared by every scan: weak holds iff min >= -margin. Strong
/// holds iff min >= margin, fails iff min <= -margin or every |value| is
/// below margin, otherwise inconclusive.
Verdict weak_verdict(double min_value, double margin, bool have_samples);
Verdict strong_verdict(double min_value, double max_abs, double margin, bool have_samples);

}  // namespace mtw

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mtw/curvature.hpp"
#include "mtw/potentials.hpp"
#include "mtw/sampling.hpp"
#include "mtw/types.hpp"

namespace mtw {

/// Nodes per axis of the nested Simpson rule.
inline constexpr int kPerturbationNodes = 129;

/// First-order response X'(0) of the Jacobi map to a gentle potential:
///   int_0^1 int_0^tau (1-t) Hess V(x + t v) u  dt dtau
/// (inner variable t). Throws AccuracyError if the Richardson error estimate
/// from the 129- and 65-node rules exceeds 1e-8.
Vec perturb_response(const PotentialSpec& spec, const Vec& x, const Vec& v, const Vec& u);

/// int_0^1 int_0^tau <u, (1-t) d^2/ds^2 Hess V(x + t(v + s w)) u> dt dtau.
double perturbation_integral(const PotentialSpec& spec, const Vec& x, const Vec& v, const Vec& u,
                             const Vec& w);

/// Closed-form <u, d^2/ds^2 Hess V(x+t(v+sw)) u> for V = f(|x|^2/2), valid for
/// orthonormal u, w. Throws InputError otherwise.
double radial_integrand(std::span<const double> f_coeffs, const Vec& x, const Vec& v,
                        const Vec& u, const Vec& w, double t);

struct PerturbationSample {
  int index = 0;
  Vec x, v, u, w;
  double integral = 0.0;
  bool orthogonal = false;
};

struct PerturbationCheck {
  PhaseDomain domain;
  double C_required = 0.0;
  double min_integral = 0.0;
  int argmin = -1;
  bool holds = false;
  /// min_integral - C_required.
  double margin = 0.0;
  bool orthogonal_only = true;
  std::uint64_t seed = 0;
  std::vector<PerturbationSample> samples;
};

PerturbationCheck perturbation_check(const PotentialSpec& spec, const PhaseDomain& domain,
                                     double C_required, int n_samples, bool orthogonal_only,
                                     std::uint64_t seed, int workers = 0);

struct RadialCheck {
  std::vector<double> f_coeffs;
  PhaseDomain domain;
  double C_required = 0.0;
  double min_f2 = 0.0;
  double min_f3 = 0.0;
  double min_f4 = 0.0;
  bool holds = false;
  int n_samples = 0;
  int t_nodes = 0;
  std::uint64_t seed = 0;
};

/// Minima of f'', f''', f'''' at |x + t v|^2/2 over a t-grid on [0,1] and
/// seeded (x, v). Holds iff min f'' >= C and min f''', f'''' >= -1e-12.
RadialCheck radial_condition_check(std::span<const double> f_coeffs, const PhaseDomain& domain,
                                   double C_required, int n_samples, std::uint64_t seed,
                                   int t_nodes = 64);

struct EpsRow {
  double eps = 0.0;
  double curvature = 0.0;
  /// curvature / eps.
  double ratio = 0.0;
  /// |ratio - limit| / |limit|.
  double relative_gap = 0.0;
};

struct EpsTable {
  std::vector<EpsRow> rows;
  /// 3/2 d^2/ds^2 <u, perturb_response(x, v + s w, u)>.
  double limit = 0.0;
  /// Linear extrapolation of ratio(eps) to eps = 0 from the two smallest eps.
  double extrapolated_limit = 0.0;
};

/// Compares C_eps / eps, computed by the Jacobi-map curvature on eps*V, with
/// the first-order limit from the perturbation integrals.
EpsTable small_eps_oracle(const PotentialSpec& base, std::span<const double> eps_list,
                          const Vec& x, const Vec& u, const Vec& v, const Vec& w,
                          const FDScheme& fd, const CurvatureConfig& cfg = {});

}  // namespace mtw

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "mtw/dynamics.hpp"
#include "mtw/jacobi.hpp"
#include "mtw/potentials.hpp"
#include "mtw/types.hpp"

namespace mtw {

struct ShootOptions {
  /// Success when |Phi_T(x, v0) - y| <= tol_scale * (1 + |y|).
  double tol_scale = 1e-10;
  int max_iters = 50;
  /// Seeded random starts added to the explicit (or straight-line) start.
  int random_starts = 8;
  /// Perturbation radius relative to max(|v_guess|, 1/T).
  double start_spread = 0.5;
  std::uint64_t seed = 0;
  /// Converged starts farther apart than ambiguity_tol * (1 + |v0|) are distinct.
  double ambiguity_tol = 1e-6;
  /// Undamped Newton steps taken after reaching tolerance while the residual
  /// keeps decreasing; the cost is first-order in the endpoint error.
  int polish_iters = 3;
};

struct ShootResult {
  Vec v0;
  double residual = 0.0;
  int newton_iters = 0;
  int converged_starts = 0;
  int total_starts = 0;
  /// True when every converged start reached the same v0.
  bool multistart_agreement = true;
};

/// Solves Phi_T(x, v0) = y by damped Newton on the exact variational Jacobian
/// N(T). With empty `starts` the straight-line guess (y - x)/T is used; random
/// perturbations are added per `opts`.
/// Throws NoSolutionError or AmbiguityError.
ShootResult shoot(const PotentialSpec& spec, const Vec& x, const Vec& y, double T = 1.0,
                  const IntegratorConfig& cfg = {}, const ShootOptions& opts = {},
                  std::span<const Vec> starts = {});

/// c_T(x, y): action of the shot trajectory.
double cost(const PotentialSpec& spec, const Vec& x, const Vec& y, double T = 1.0,
            const IntegratorConfig& cfg = {}, const ShootOptions& opts = {});

/// exp^c(x, v) = Phi_T(x, v).
Vec c_exponential(const PotentialSpec& spec, const Vec& x, const Vec& v, double T = 1.0,
                  const IntegratorConfig& cfg = {});

struct ConjugateScan {
  std::optional<double> first_conjugate_time;
  std::vector<double> times;
  /// scaled_min_singular(M(t), N(t)) per grid node (node 0 is 0 by construction).
  std::vector<double> min_singular_value_curve;
};

/// Locates the first time in (0, T] where the endpoint map loses rank. Local
/// minima of the singular-value curve are refined by golden-section search
/// with exact sub-steps of the coupled system.
ConjugateScan conjugate_scan(const PotentialSpec& spec, const Vec& x, const Vec& v, double T,
                             const IntegratorConfig& cfg = {}, double conj_tol = 1e-8);

/// Same search on an already integrated variational flow.
ConjugateScan conjugate_scan(const PotentialSpec& spec, const VariationalFlow& vf,
                             double conj_tol = 1e-8);

}  // namespace mtw

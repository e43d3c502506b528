#pragma once

#include <iosfwd>
#include <vector>

#include "mtw/potentials.hpp"
#include "mtw/types.hpp"

namespace mtw {

/// (x, v) with tangent and cotangent vectors identified by the Euclidean metric.
struct PhasePoint {
  Vec x;
  Vec v;
};

enum class IntegratorMethod { RK4, Leapfrog };

struct IntegratorConfig {
  /// Fixed number of steps K over [0, T].
  int steps = 256;
  IntegratorMethod method = IntegratorMethod::RK4;
  /// Relative energy tolerance; the enforced bound is energy_tol * (1 + |E0|).
  double energy_tol = 1e-7;

  /// Default K = 256 per unit time.
  static IntegratorConfig for_duration(double T);
  void validate() const;
};

/// Uniform time grid with phase states and energies E = 1/2|v|^2 + V(x).
struct Trajectory {
  std::vector<double> times;
  std::vector<PhasePoint> states;
  std::vector<double> energies;
  IntegratorMethod method = IntegratorMethod::RK4;

  int dim() const { return static_cast<int>(states.front().x.size()); }
  int steps() const { return static_cast<int>(times.size()) - 1; }
  double duration() const { return times.back(); }
  const PhasePoint& initial() const { return states.front(); }
  const PhasePoint& final() const { return states.back(); }
};

/// Integrates x'' = -grad V(x) from p0 over [0, T].
/// Throws IntegrationError when the energy drift exceeds tolerance.
Trajectory flow(const PotentialSpec& spec, const PhasePoint& p0, double T,
                const IntegratorConfig& cfg = {});

/// Action integral of L = 1/2|v|^2 - V along the trajectory (composite Simpson).
double action(const PotentialSpec& spec, const Trajectory& traj);

/// max_k |E_k - E_0|.
double energy_drift(const Trajectory& traj);

/// CSV columns t, x_1..x_n, v_1..v_n, E.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);

/// Composite Simpson over uniformly spaced samples; an odd interval count
/// closes with the 3/8 rule on the last three intervals.
double simpson_uniform(const std::vector<double>& values, double h);

}  // namespace mtw

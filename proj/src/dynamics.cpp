#include "mtw/dynamics.hpp"

#include <cmath>
#include <ostream>
#include <sstream>

#include "mtw/error.hpp"
#include "stepper.hpp"

namespace mtw {

IntegratorConfig IntegratorConfig::for_duration(double T) {
  IntegratorConfig cfg;
  cfg.steps = std::max(16, static_cast<int>(std::ceil(256.0 * std::abs(T))));
  return cfg;
}

void IntegratorConfig::validate() const {
  if (steps < 16) throw InputError("integrator needs at least 16 steps");
  if (!(energy_tol > 0.0) || !std::isfinite(energy_tol)) {
    throw InputError("energy_tol must be positive");
  }
}

namespace detail {

void check_start(const PotentialSpec& spec, const PhasePoint& p0, double T) {
  if (!(T > 0.0) || !std::isfinite(T)) throw InputError("duration T must be positive");
  if (p0.x.size() != spec.dim() || p0.v.size() != spec.dim()) {
    throw InputError("phase point dimension does not match the potential");
  }
  if (!p0.x.allFinite() || !p0.v.allFinite()) throw InputError("phase point is not finite");
}

double energy(const PotentialSpec& spec, const Vec& x, const Vec& v) {
  return 0.5 * v.squaredNorm() + eval_potential(spec, x);
}

void check_energy(const Trajectory& traj, double energy_tol) {
  const double drift = energy_drift(traj);
  const double bound = energy_tol * (1.0 + std::abs(traj.energies.front()));
  if (!(drift <= bound)) {
    std::ostringstream os;
    os << "energy drift " << drift << " exceeds tolerance " << bound
       << " (increase steps or reduce stiffness)";
    throw IntegrationError(os.str());
  }
}

}  // namespace detail

Trajectory flow(const PotentialSpec& spec, const PhasePoint& p0, double T,
                const IntegratorConfig& cfg) {
  cfg.validate();
  detail::check_start(spec, p0, T);
  const int K = cfg.steps;
  const double dt = T / K;

  Trajectory traj;
  traj.method = cfg.method;
  traj.times.resize(K + 1);
  traj.states.resize(K + 1);
  traj.energies.resize(K + 1);

  detail::VariationalState s;
  s.x = p0.x;
  s.v = p0.v;
  traj.times[0] = 0.0;
  traj.states[0] = p0;
  traj.energies[0] = detail::energy(spec, s.x, s.v);
  for (int k = 1; k <= K; ++k) {
    detail::step<false>(spec, s, dt, cfg.method);
    if (!s.x.allFinite() || !s.v.allFinite()) {
      throw IntegrationError("trajectory left the finite range at step " + std::to_string(k));
    }
    traj.times[k] = (k == K) ? T : k * dt;
    traj.states[k] = {s.x, s.v};
    traj.energies[k] = detail::energy(spec, s.x, s.v);
  }
  detail::check_energy(traj, cfg.energy_tol);
  return traj;
}

double simpson_uniform(const std::vector<double>& values, double h) {
  const int K = static_cast<int>(values.size()) - 1;
  if (K < 2) throw InputError("Simpson rule needs at least two intervals");
  long double acc = 0.0L;
  const int simpson_end = (K % 2 == 0) ? K : K - 3;
  for (int k = 0; k + 2 <= simpson_end; k += 2) {
    acc += (static_cast<long double>(values[k]) + 4.0L * values[k + 1] + values[k + 2]) / 3.0L;
  }
  if (simpson_end != K) {
    const int k = simpson_end;
    acc += 3.0L / 8.0L *
           (static_cast<long double>(values[k]) + 3.0L * values[k + 1] + 3.0L * values[k + 2] +
            values[k + 3]);
  }
  return static_cast<double>(acc * h);
}

double action(const PotentialSpec& spec, const Trajectory& traj) {
  if (traj.times.size() < 3) throw InputError("trajectory too short for quadrature");
  std::vector<double> lagrangian(traj.states.size());
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    const PhasePoint& p = traj.states[k];
    lagrangian[k] = 0.5 * p.v.squaredNorm() - eval_potential(spec, p.x);
  }
  const double h = traj.duration() / traj.steps();
  return simpson_uniform(lagrangian, h);
}

double energy_drift(const Trajectory& traj) {
  double drift = 0.0;
  const double e0 = traj.energies.front();
  for (double e : traj.energies) drift = std::max(drift, std::abs(e - e0));
  return drift;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  const int n = traj.dim();
  out << "t";
  for (int i = 1; i <= n; ++i) out << ",x_" << i;
  for (int i = 1; i <= n; ++i) out << ",v_" << i;
  out << ",E\n";
  const auto old_precision = out.precision(17);
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    out << traj.times[k];
    for (int i = 0; i < n; ++i) out << ',' << traj.states[k].x[i];
    for (int i = 0; i < n; ++i) out << ',' << traj.states[k].v[i];
    out << ',' << traj.energies[k] << '\n';
  }
  out.precision(old_precision);
}

}  // namespace mtw

#pragma once

// Fixed-step integrators for x'' = -grad V(x), optionally coupled with the
// matrix variational system Y'' = -Hess V(x) Y for Y in {M, N}. The state
// part is the same arithmetic with or without the variational part, so a
// plain flow and a variational flow from the same start agree bit for bit.

#include "mtw/dynamics.hpp"
#include "mtw/jacobi.hpp"
#include "mtw/potentials.hpp"

namespace mtw::detail {

void check_start(const PotentialSpec& spec, const PhasePoint& p0, double T);
double energy(const PotentialSpec& spec, const Vec& x, const Vec& v);
/// Throws IntegrationError when the drift exceeds energy_tol * (1 + |E0|).
void check_energy(const Trajectory& traj, double energy_tol);

template <bool WithVariations>
void rk4_step(const PotentialSpec& spec, VariationalState& s, double dt) {
  const double half = 0.5 * dt;

  const Vec k1x = s.v;
  const Vec k1v = -grad(spec, s.x);
  Mat H1, k1M, k1N, k1Md, k1Nd;
  if constexpr (WithVariations) {
    H1 = hess(spec, s.x);
    k1M = s.Mdot;
    k1N = s.Ndot;
    k1Md.noalias() = -H1 * s.M;
    k1Nd.noalias() = -H1 * s.N;
  }

  const Vec x2 = s.x + half * k1x;
  const Vec k2x = s.v + half * k1v;
  const Vec k2v = -grad(spec, x2);
  Mat H2, k2M, k2N, k2Md, k2Nd;
  if constexpr (WithVariations) {
    H2 = hess(spec, x2);
    k2M = s.Mdot + half * k1Md;
    k2N = s.Ndot + half * k1Nd;
    k2Md.noalias() = -H2 * (s.M + half * k1M);
    k2Nd.noalias() = -H2 * (s.N + half * k1N);
  }

  const Vec x3 = s.x + half * k2x;
  const Vec k3x = s.v + half * k2v;
  const Vec k3v = -grad(spec, x3);
  Mat H3, k3M, k3N, k3Md, k3Nd;
  if constexpr (WithVariations) {
    H3 = hess(spec, x3);
    k3M = s.Mdot + half * k2Md;
    k3N = s.Ndot + half * k2Nd;
    k3Md.noalias() = -H3 * (s.M + half * k2M);
    k3Nd.noalias() = -H3 * (s.N + half * k2N);
  }

  const Vec x4 = s.x + dt * k3x;
  const Vec k4x = s.v + dt * k3v;
  const Vec k4v = -grad(spec, x4);
  Mat H4, k4M, k4N, k4Md, k4Nd;
  if constexpr (WithVariations) {
    H4 = hess(spec, x4);
    k4M = s.Mdot + dt * k3Md;
    k4N = s.Ndot + dt * k3Nd;
    k4Md.noalias() = -H4 * (s.M + dt * k3M);
    k4Nd.noalias() = -H4 * (s.N + dt * k3N);
  }

  const double w = dt / 6.0;
  s.x += w * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
  s.v += w * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
  if constexpr (WithVariations) {
    s.M += w * (k1M + 2.0 * k2M + 2.0 * k3M + k4M);
    s.N += w * (k1N + 2.0 * k2N + 2.0 * k3N + k4N);
    s.Mdot += w * (k1Md + 2.0 * k2Md + 2.0 * k3Md + k4Md);
    s.Ndot += w * (k1Nd + 2.0 * k2Nd + 2.0 * k3Nd + k4Nd);
  }
}

// Velocity Verlet (kick-drift-kick).
template <bool WithVariations>
void leapfrog_step(const PotentialSpec& spec, VariationalState& s, double dt) {
  const double half = 0.5 * dt;
  const Vec vh = s.v - half * grad(spec, s.x);
  Mat Mh, Nh;
  if constexpr (WithVariations) {
    const Mat H0 = hess(spec, s.x);
    Mh = s.Mdot - half * (H0 * s.M);
    Nh = s.Ndot - half * (H0 * s.N);
  }
  s.x += dt * vh;
  s.v = vh - half * grad(spec, s.x);
  if constexpr (WithVariations) {
    s.M += dt * Mh;
    s.N += dt * Nh;
    const Mat H1 = hess(spec, s.x);
    s.Mdot = Mh - half * (H1 * s.M);
    s.Ndot = Nh - half * (H1 * s.N);
  }
}

template <bool WithVariations>
void step(const PotentialSpec& spec, VariationalState& s, double dt, IntegratorMethod method) {
  if (method == IntegratorMethod::RK4) {
    rk4_step<WithVariations>(spec, s, dt);
  } else {
    leapfrog_step<WithVariations>(spec, s, dt);
  }
}

}  // namespace mtw::detail

#pragma once

#include <vector>

#include "mtw/dynamics.hpp"
#include "mtw/potentials.hpp"
#include "mtw/types.hpp"

namespace mtw {

/// Fundamental matrix solution of Y'' + Hess V(gamma(t)) Y = 0 along a
/// trajectory: M(0)=I, M'(0)=0 and N(0)=0, N'(0)=I. Every Jacobi field is
/// J(t) = M(t) J(0) + N(t) J'(0); N(T) is the derivative of the endpoint
/// map v -> Phi_T(x, v).
struct FundamentalSolution {
  std::vector<double> times;
  std::vector<Mat> M;
  std::vector<Mat> N;
  std::vector<Mat> Mdot;
  std::vector<Mat> Ndot;
};

/// Trajectory and fundamental solution integrated as one coupled system so
/// the Hessian is sampled at the integrator stage points.
struct VariationalFlow {
  Trajectory trajectory;
  FundamentalSolution fundamental;
};

VariationalFlow flow_with_variations(const PotentialSpec& spec, const PhasePoint& p0, double T,
                                     const IntegratorConfig& cfg = {});

/// Re-integrates the coupled system on the trajectory's own grid and method.
/// Throws IntegrationError if the symplectic identity fails beyond 1e-6.
FundamentalSolution propagate_fundamental(const PotentialSpec& spec, const Trajectory& traj);

/// max over nodes of |M^T N' - M'^T N - I|_inf.
double symplectic_defect(const FundamentalSolution& fs);

/// sigma_min(N) / max(1, |M|_2, |N|_2). Dimensionless rank indicator for the
/// endpoint map; the normalisation keeps it meaningful when N is a multiple
/// of the identity.
double scaled_min_singular(const Mat& M, const Mat& N);

struct JacobiMapResult {
  Vec value;
  /// sigma_max / sigma_min of N(T).
  double condition_number = 0.0;
};

/// J'(0) for the Jacobi field with J(0) = u, J(T) = 0, i.e. the solution of
/// N(T) p = -M(T) u. Throws ConjugatePointError when N(T) is singular.
JacobiMapResult jacobi_map(const FundamentalSolution& fs, const Vec& u, double conj_tol = 1e-8);

JacobiMapResult jacobi_map(const PotentialSpec& spec, const Vec& x, const Vec& v, const Vec& u,
                           double T = 1.0, const IntegratorConfig& cfg = {},
                           double conj_tol = 1e-8);

namespace detail {

/// Full coupled state at one grid node.
struct VariationalState {
  Vec x, v;
  Mat M, N, Mdot, Ndot;
};

VariationalState node_state(const VariationalFlow& vf, int k);

/// One step of size dt of the coupled system with the given method.
VariationalState advance(const PotentialSpec& spec, const VariationalState& s, double dt,
                         IntegratorMethod method);

}  // namespace detail

}  // namespace mtw

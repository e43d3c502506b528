#pragma once

#include <vector>

#include "mtw/dynamics.hpp"
#include "mtw/potentials.hpp"
#include "mtw/types.hpp"

namespace mtw {

/// Closed-form harmonic oscillator V(x) = 1/2 x.Ax with A <= 0.
///
/// In the eigenbasis xi = basis * x the matrix is diag(-lambda_i^2), so each
/// coordinate obeys xi'' = lambda_i^2 xi.
struct HarmonicSpec {
  Vec lambdas;
  /// Orthogonal; rows are the eigenvectors of A.
  Mat basis;

  static HarmonicSpec diagonal(const Vec& lambdas);
  /// Eigen-decomposes a symmetric A <= 0 (eigenvalues above 1e-12 rejected).
  static HarmonicSpec from_matrix(const Mat& A);

  int dim() const { return static_cast<int>(lambdas.size()); }
  Mat matrix() const;
  PotentialSpec potential() const;
  void validate() const;
};

/// Below this value of lambda*T the free-particle formulas are used.
inline constexpr double kHarmonicFreeThreshold = 1e-6;

PhasePoint ho_flow(const HarmonicSpec& h, double t, const Vec& x, const Vec& v);
double ho_cost(const HarmonicSpec& h, double T, const Vec& x, const Vec& y);
Vec ho_shoot(const HarmonicSpec& h, const Vec& x, const Vec& y, double T);

}  // namespace mtw

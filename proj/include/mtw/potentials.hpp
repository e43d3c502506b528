#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "mtw/types.hpp"

namespace mtw {

enum class PotentialKind { Zero, Quadratic, Radial, BlackBox };

std::string to_string(PotentialKind kind);
PotentialKind potential_kind_from_string(const std::string& tag);

/// Declarative description of a potential V on R^n.
///
///   Zero       V = 0
///   Quadratic  V(x) = 1/2 x.Ax, A symmetric
///   Radial     V(x) = f(|x|^2/2), f a polynomial (coefficients constant term first)
///   BlackBox   V given as a callable; derivatives by Richardson-extrapolated
///              central differences with base step fd_step*(1+|x|)
///
/// Specs are immutable values; copying a BlackBox spec shares the callable.
class PotentialSpec {
 public:
  using Function = std::function<double(const Vec&)>;

  static PotentialSpec zero(int dim);
  static PotentialSpec quadratic(const Mat& A);
  static PotentialSpec radial(int dim, std::vector<double> f_coeffs);
  static PotentialSpec black_box(int dim, Function eval, double fd_step = 1e-3);

  /// BlackBox view of an analytic spec: same V, finite-difference derivatives.
  static PotentialSpec black_box_of(const PotentialSpec& analytic, double fd_step = 1e-3);

  PotentialKind kind() const { return kind_; }
  int dim() const { return dim_; }
  const Mat& matrix() const { return A_; }
  const std::vector<double>& f_coeffs() const { return f_coeffs_; }
  double fd_step() const { return fd_step_; }
  const Function& function() const { return eval_; }

  /// True when derivatives are exact (everything but BlackBox).
  bool has_exact_derivatives() const { return kind_ != PotentialKind::BlackBox; }

 private:
  PotentialSpec() = default;

  PotentialKind kind_ = PotentialKind::Zero;
  int dim_ = 0;
  Mat A_;
  std::vector<double> f_coeffs_;
  Function eval_;
  double fd_step_ = 1e-3;
};

/// eps * V. Quadratic and Radial specs are rescaled in their data, BlackBox
/// specs by wrapping the callable, so every module sees the scaled potential.
PotentialSpec scaled(const PotentialSpec& spec, double eps);

double eval_potential(const PotentialSpec& spec, const Vec& x);
Vec grad(const PotentialSpec& spec, const Vec& x);
Mat hess(const PotentialSpec& spec, const Vec& x);

/// d^2/ds^2 Hess V(x + s w) at s = 0.
Mat hess_second_directional(const PotentialSpec& spec, const Vec& x, const Vec& w);

/// Polynomial helpers for radial profiles (coefficients constant term first).
double poly_eval(std::span<const double> coeffs, double z);
std::vector<double> poly_derivative(std::span<const double> coeffs);

/// f, f', f'', f''', f'''' at z.
struct RadialDerivatives {
  double f0, f1, f2, f3, f4;
};
RadialDerivatives radial_derivatives(std::span<const double> coeffs, double z);

struct FdPointReport {
  Vec x;
  double grad_deviation = 0.0;
  double hess_deviation = 0.0;
  bool finite = true;
};

struct FdConsistencyReport {
  std::vector<FdPointReport> points;
  double max_grad_deviation = 0.0;
  double max_hess_deviation = 0.0;
};

/// Compares the exact derivatives of an analytic spec with the finite-difference
/// path applied to the same V. Max-norm deviations per point.
FdConsistencyReport fd_consistency_report(const PotentialSpec& spec,
                                          std::span<const Vec> sample_points,
                                          double fd_step = 1e-3);

/// Seeded points uniform in the ball of the given radius.
std::vector<Vec> random_points(int dim, int count, double radius, std::uint64_t seed);

}  // namespace mtw

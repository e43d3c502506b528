#include "mtw/potentials.hpp"

#include <cmath>
#include <utility>

#include "mtw/error.hpp"
#include "mtw/sampling.hpp"

namespace mtw {

namespace {

void check_dim(int dim) {
  if (dim < 1 || dim > kMaxDim) {
    throw InputError("potential dimension must be in [1, " + std::to_string(kMaxDim) +
                     "], got " + std::to_string(dim));
  }
}

void check_point(const PotentialSpec& spec, const Vec& x) {
  if (x.size() != spec.dim()) {
    throw InputError("point has dimension " + std::to_string(x.size()) + ", potential expects " +
                     std::to_string(spec.dim()));
  }
  if (!x.allFinite()) throw InputError("point has non-finite entries");
}

double checked_eval(const PotentialSpec& spec, const Vec& x) {
  const double value = spec.function()(x);
  if (!std::isfinite(value)) throw EvaluationError("potential is not finite near the point");
  return value;
}

double base_step(const PotentialSpec& spec, const Vec& x) { return spec.fd_step() * (1.0 + x.norm()); }

// Central differences at step h, one Richardson level (h, h/2).
Vec fd_grad(const PotentialSpec& spec, const Vec& x) {
  const int n = spec.dim();
  const double h = base_step(spec, x);
  Vec g(n);
  Vec xp = x;
  for (int i = 0; i < n; ++i) {
    auto central = [&](double step) {
      xp[i] = x[i] + step;
      const double fp = checked_eval(spec, xp);
      xp[i] = x[i] - step;
      const double fm = checked_eval(spec, xp);
      xp[i] = x[i];
      return (fp - fm) / (2.0 * step);
    };
    const double coarse = central(h);
    const double fine = central(0.5 * h);
    g[i] = (4.0 * fine - coarse) / 3.0;
  }
  return g;
}

Mat fd_hess_at_step(const PotentialSpec& spec, const Vec& x, double h) {
  const int n = spec.dim();
  const double f0 = checked_eval(spec, x);
  Mat H(n, n);
  Vec xp = x;
  for (int i = 0; i < n; ++i) {
    xp[i] = x[i] + h;
    const double fp = checked_eval(spec, xp);
    xp[i] = x[i] - h;
    const double fm = checked_eval(spec, xp);
    xp[i] = x[i];
    H(i, i) = (fp - 2.0 * f0 + fm) / (h * h);
    for (int j = i + 1; j < n; ++j) {
      auto corner = [&](double si, double sj) {
        xp[i] = x[i] + si * h;
        xp[j] = x[j] + sj * h;
        const double value = checked_eval(spec, xp);
        xp[i] = x[i];
        xp[j] = x[j];
        return value;
      };
      const double d = (corner(1, 1) - corner(1, -1) - corner(-1, 1) + corner(-1, -1)) / (4.0 * h * h);
      H(i, j) = d;
      H(j, i) = d;
    }
  }
  return H;
}

Mat fd_hess_richardson(const PotentialSpec& spec, const Vec& x, double h) {
  const Mat coarse = fd_hess_at_step(spec, x, h);
  const Mat fine = fd_hess_at_step(spec, x, 0.5 * h);
  return (4.0 * fine - coarse) / 3.0;
}

// Outer and inner differences share one step so the inner roundoff is not
// amplified by a much smaller outer denominator.
Mat fd_hess_second_directional(const PotentialSpec& spec, const Vec& x, const Vec& w) {
  const int n = spec.dim();
  const double wn = w.norm();
  if (wn == 0.0) return Mat::Zero(n, n);
  const double h = 20.0 * base_step(spec, x);
  const Mat center = fd_hess_richardson(spec, x, h);
  auto second = [&](double step) {
    const Vec dx = (step / wn) * w;
    const Mat plus = fd_hess_richardson(spec, x + dx, h);
    const Mat minus = fd_hess_richardson(spec, x - dx, h);
    return Mat(((plus + minus) - 2.0 * center) / ((step / wn) * (step / wn)));
  };
  const Mat coarse = second(h);
  const Mat fine = second(0.5 * h);
  Mat out = (4.0 * fine - coarse) / 3.0;
  return 0.5 * (out + out.transpose());
}

}  // namespace

std::string to_string(PotentialKind kind) {
  switch (kind) {
    case PotentialKind::Zero: return "zero";
    case PotentialKind::Quadratic: return "quadratic";
    case PotentialKind::Radial: return "radial";
    case PotentialKind::BlackBox: return "black_box";
  }
  return "unknown";
}

PotentialKind potential_kind_from_string(const std::string& tag) {
  if (tag == "zero") return PotentialKind::Zero;
  if (tag == "quadratic") return PotentialKind::Quadratic;
  if (tag == "radial") return PotentialKind::Radial;
  if (tag == "black_box") return PotentialKind::BlackBox;
  throw InputError("unknown potential kind '" + tag + "'");
}

PotentialSpec PotentialSpec::zero(int dim) {
  check_dim(dim);
  PotentialSpec s;
  s.kind_ = PotentialKind::Zero;
  s.dim_ = dim;
  return s;
}

PotentialSpec PotentialSpec::quadratic(const Mat& A) {
  if (A.rows() != A.cols()) throw InputError("quadratic potential needs a square matrix");
  check_dim(static_cast<int>(A.rows()));
  if (!A.allFinite()) throw InputError("quadratic potential matrix has non-finite entries");
  if ((A - A.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
    throw InputError("quadratic potential matrix is not symmetric");
  }
  PotentialSpec s;
  s.kind_ = PotentialKind::Quadratic;
  s.dim_ = static_cast<int>(A.rows());
  s.A_ = 0.5 * (A + A.transpose());
  return s;
}

PotentialSpec PotentialSpec::radial(int dim, std::vector<double> f_coeffs) {
  check_dim(dim);
  if (f_coeffs.empty()) throw InputError("radial potential needs at least one coefficient");
  for (double c : f_coeffs) {
    if (!std::isfinite(c)) throw InputError("radial coefficients must be finite");
  }
  PotentialSpec s;
  s.kind_ = PotentialKind::Radial;
  s.dim_ = dim;
  s.f_coeffs_ = std::move(f_coeffs);
  return s;
}

PotentialSpec PotentialSpec::black_box(int dim, Function eval, double fd_step) {
  check_dim(dim);
  if (!eval) throw InputError("black-box potential needs a callable");
  if (!(fd_step > 0.0) || !std::isfinite(fd_step)) throw InputError("fd_step must be positive");
  PotentialSpec s;
  s.kind_ = PotentialKind::BlackBox;
  s.dim_ = dim;
  s.eval_ = std::move(eval);
  s.fd_step_ = fd_step;
  return s;
}

PotentialSpec PotentialSpec::black_box_of(const PotentialSpec& analytic, double fd_step) {
  PotentialSpec copy = analytic;
  return black_box(analytic.dim(), [copy](const Vec& x) { return eval_potential(copy, x); }, fd_step);
}

PotentialSpec scaled(const PotentialSpec& spec, double eps) {
  if (!std::isfinite(eps)) throw InputError("scale factor must be finite");
  switch (spec.kind()) {
    case PotentialKind::Zero: return spec;
    case PotentialKind::Quadratic: return PotentialSpec::quadratic(eps * spec.matrix());
    case PotentialKind::Radial: {
      std::vector<double> c = spec.f_coeffs();
      for (double& ci : c) ci *= eps;
      return PotentialSpec::radial(spec.dim(), std::move(c));
    }
    case PotentialKind::BlackBox: {
      PotentialSpec::Function inner = spec.function();
      return PotentialSpec::black_box(
          spec.dim(), [inner, eps](const Vec& x) { return eps * inner(x); }, spec.fd_step());
    }
  }
  return spec;
}

double poly_eval(std::span<const double> coeffs, double z) {
  double acc = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * z + *it;
  return acc;
}

std::vector<double> poly_derivative(std::span<const double> coeffs) {
  if (coeffs.size() <= 1) return {0.0};
  std::vector<double> d(coeffs.size() - 1);
  for (std::size_t k = 1; k < coeffs.size(); ++k) d[k - 1] = static_cast<double>(k) * coeffs[k];
  return d;
}

RadialDerivatives radial_derivatives(std::span<const double> coeffs, double z) {
  // Horner per derivative order with falling-factorial weights k!/(k-m)!.
  double acc[5] = {0.0, 0.0, 0.0, 0.0, 0.0};
  for (std::size_t idx = coeffs.size(); idx-- > 0;) {
    const double k = static_cast<double>(idx);
    double weight = 1.0;
    for (int m = 0; m < 5; ++m) {
      if (static_cast<std::size_t>(m) <= idx) acc[m] = acc[m] * z + coeffs[idx] * weight;
      weight *= (k - m);
    }
  }
  return {acc[0], acc[1], acc[2], acc[3], acc[4]};
}

double eval_potential(const PotentialSpec& spec, const Vec& x) {
  check_point(spec, x);
  switch (spec.kind()) {
    case PotentialKind::Zero: return 0.0;
    case PotentialKind::Quadratic: return 0.5 * x.dot(spec.matrix() * x);
    case PotentialKind::Radial: return poly_eval(spec.f_coeffs(), 0.5 * x.squaredNorm());
    case PotentialKind::BlackBox: return checked_eval(spec, x);
  }
  return 0.0;
}

Vec grad(const PotentialSpec& spec, const Vec& x) {
  check_point(spec, x);
  switch (spec.kind()) {
    case PotentialKind::Zero: return Vec::Zero(spec.dim());
    case PotentialKind::Quadratic: return spec.matrix() * x;
    case PotentialKind::Radial: {
      return radial_derivatives(spec.f_coeffs(), 0.5 * x.squaredNorm()).f1 * x;
    }
    case PotentialKind::BlackBox: return fd_grad(spec, x);
  }
  return Vec::Zero(spec.dim());
}

Mat hess(const PotentialSpec& spec, const Vec& x) {
  check_point(spec, x);
  const int n = spec.dim();
  switch (spec.kind()) {
    case PotentialKind::Zero: return Mat::Zero(n, n);
    case PotentialKind::Quadratic: return spec.matrix();
    case PotentialKind::Radial: {
      const RadialDerivatives d = radial_derivatives(spec.f_coeffs(), 0.5 * x.squaredNorm());
      Mat H = d.f2 * (x * x.transpose());
      H.diagonal().array() += d.f1;
      return H;
    }
    case PotentialKind::BlackBox: return fd_hess_richardson(spec, x, base_step(spec, x));
  }
  return Mat::Zero(n, n);
}

Mat hess_second_directional(const PotentialSpec& spec, const Vec& x, const Vec& w) {
  check_point(spec, x);
  if (w.size() != spec.dim() || !w.allFinite()) throw InputError("direction w is malformed");
  const int n = spec.dim();
  switch (spec.kind()) {
    case PotentialKind::Zero:
    case PotentialKind::Quadratic: return Mat::Zero(n, n);
    case PotentialKind::Radial: {
      const RadialDerivatives d = radial_derivatives(spec.f_coeffs(), 0.5 * x.squaredNorm());
      const double a = x.dot(w);
      const double b = w.squaredNorm();
      const Mat xx = x * x.transpose();
      const Mat wx = w * x.transpose();
      Mat H = (d.f4 * a * a + d.f3 * b) * xx + 2.0 * d.f3 * a * (wx + wx.transpose()) +
              2.0 * d.f2 * (w * w.transpose());
      H.diagonal().array() += d.f3 * a * a + d.f2 * b;
      return H;
    }
    case PotentialKind::BlackBox: return fd_hess_second_directional(spec, x, w);
  }
  return Mat::Zero(n, n);
}

FdConsistencyReport fd_consistency_report(const PotentialSpec& spec,
                                          std::span<const Vec> sample_points, double fd_step) {
  if (!spec.has_exact_derivatives()) {
    throw InputError("fd_consistency_report needs a spec with exact derivatives");
  }
  const PotentialSpec fd = PotentialSpec::black_box_of(spec, fd_step);
  FdConsistencyReport report;
  for (const Vec& x : sample_points) {
    FdPointReport p;
    p.x = x;
    try {
      p.grad_deviation = (grad(spec, x) - grad(fd, x)).cwiseAbs().maxCoeff();
      p.hess_deviation = (hess(spec, x) - hess(fd, x)).cwiseAbs().maxCoeff();
    } catch (const EvaluationError&) {
      p.finite = false;
    }
    if (p.finite) {
      report.max_grad_deviation = std::max(report.max_grad_deviation, p.grad_deviation);
      report.max_hess_deviation = std::max(report.max_hess_deviation, p.hess_deviation);
    }
    report.points.push_back(std::move(p));
  }
  return report;
}

std::vector<Vec> random_points(int dim, int count, double radius, std::uint64_t seed) {
  std::vector<Vec> pts;
  pts.reserve(count);
  for (int i = 0; i < count; ++i) {
    auto rng = sample_rng(seed, static_cast<std::uint64_t>(i));
    pts.push_back(random_in_ball(dim, radius, rng));
  }
  return pts;
}

}  // namespace mtw

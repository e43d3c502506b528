#include "mtw/harmonic.hpp"

#include <cmath>

#include "mtw/error.hpp"

namespace mtw {

HarmonicSpec HarmonicSpec::diagonal(const Vec& lambdas) {
  HarmonicSpec h{lambdas, Mat::Identity(lambdas.size(), lambdas.size())};
  h.validate();
  return h;
}

HarmonicSpec HarmonicSpec::from_matrix(const Mat& A) {
  if (A.rows() != A.cols() || A.rows() < 1 || A.rows() > kMaxDim) {
    throw InputError("harmonic matrix must be square with dimension in [1, kMaxDim]");
  }
  if ((A - A.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
    throw InputError("harmonic matrix must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Mat> eig(A);
  const auto& mu = eig.eigenvalues();
  if (mu.maxCoeff() > 1e-12) throw InputError("harmonic matrix must satisfy A <= 0");
  Vec lambdas(A.rows());
  for (int i = 0; i < A.rows(); ++i) lambdas[i] = std::sqrt(std::max(0.0, -mu[i]));
  HarmonicSpec h{lambdas, eig.eigenvectors().transpose()};
  h.validate();
  return h;
}

Mat HarmonicSpec::matrix() const {
  const Vec d = -lambdas.cwiseProduct(lambdas);
  return basis.transpose() * d.asDiagonal() * basis;
}

PotentialSpec HarmonicSpec::potential() const {
  const Mat A = matrix();
  return PotentialSpec::quadratic(0.5 * (A + A.transpose()));
}

void HarmonicSpec::validate() const {
  const int n = dim();
  if (n < 1 || n > kMaxDim) throw InputError("harmonic spec dimension out of range");
  if (basis.rows() != n || basis.cols() != n) throw InputError("harmonic basis has wrong shape");
  if ((basis * basis.transpose() - Mat::Identity(n, n)).cwiseAbs().maxCoeff() > 1e-12) {
    throw InputError("harmonic basis is not orthogonal");
  }
  for (int i = 0; i < n; ++i) {
    if (!(lambdas[i] >= 0.0) || !std::isfinite(lambdas[i])) {
      throw InputError("harmonic frequencies must be finite and non-negative");
    }
  }
}

PhasePoint ho_flow(const HarmonicSpec& h, double t, const Vec& x, const Vec& v) {
  const Vec xi = h.basis * x;
  const Vec eta = h.basis * v;
  Vec xt(h.dim()), vt(h.dim());
  for (int i = 0; i < h.dim(); ++i) {
    const double lam = h.lambdas[i];
    if (lam * std::abs(t) < kHarmonicFreeThreshold) {
      xt[i] = xi[i] + t * eta[i];
      vt[i] = eta[i];
    } else {
      const double c = std::cosh(lam * t);
      const double s = std::sinh(lam * t);
      xt[i] = xi[i] * c + eta[i] / lam * s;
      vt[i] = xi[i] * lam * s + eta[i] * c;
    }
  }
  return {h.basis.transpose() * xt, h.basis.transpose() * vt};
}

double ho_cost(const HarmonicSpec& h, double T, const Vec& x, const Vec& y) {
  if (!(T > 0.0)) throw InputError("duration T must be positive");
  const Vec xi = h.basis * x;
  const Vec zeta = h.basis * y;
  double total = 0.0;
  for (int i = 0; i < h.dim(); ++i) {
    const double lam = h.lambdas[i];
    if (lam * T < kHarmonicFreeThreshold) {
      const double d = xi[i] - zeta[i];
      total += d * d / (2.0 * T);
    } else {
      total += lam / (2.0 * std::sinh(lam * T)) *
               ((xi[i] * xi[i] + zeta[i] * zeta[i]) * std::cosh(lam * T) - 2.0 * xi[i] * zeta[i]);
    }
  }
  return total;
}

Vec ho_shoot(const HarmonicSpec& h, const Vec& x, const Vec& y, double T) {
  if (!(T > 0.0)) throw InputError("duration T must be positive");
  const Vec xi = h.basis * x;
  const Vec zeta = h.basis * y;
  Vec eta(h.dim());
  for (int i = 0; i < h.dim(); ++i) {
    const double lam = h.lambdas[i];
    if (lam * T < kHarmonicFreeThreshold) {
      eta[i] = (zeta[i] - xi[i]) / T;
    } else {
      eta[i] = lam * (zeta[i] - xi[i] * std::cosh(lam * T)) / std::sinh(lam * T);
    }
  }
  return h.basis.transpose() * eta;
}

}  // namespace mtw

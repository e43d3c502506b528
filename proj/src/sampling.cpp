#include "mtw/sampling.hpp"

#include <cmath>
#include <sstream>

#include "mtw/error.hpp"

namespace mtw {

PhaseDomain PhaseDomain::product(int dim, double x_radius, double v_radius) {
  PhaseDomain d;
  d.shape = Shape::Product;
  d.dim = dim;
  d.x_radius = x_radius;
  d.v_radius = v_radius;
  d.validate();
  return d;
}

PhaseDomain PhaseDomain::sum(int dim, double radius) {
  PhaseDomain d;
  d.shape = Shape::Sum;
  d.dim = dim;
  d.sum_radius = radius;
  d.validate();
  return d;
}

void PhaseDomain::validate() const {
  if (dim < 1 || dim > kMaxDim) throw InputError("domain dimension out of range");
  if (shape == Shape::Product) {
    if (!(x_radius >= 0.0) || !(v_radius >= 0.0) || !std::isfinite(x_radius) ||
        !std::isfinite(v_radius)) {
      throw InputError("domain radii must be finite and non-negative");
    }
    if (!(x_inner_radius >= 0.0) || x_inner_radius > x_radius) {
      throw InputError("domain inner radius must lie in [0, x_radius]");
    }
  } else if (!(sum_radius > 0.0) || !std::isfinite(sum_radius)) {
    throw InputError("domain sum radius must be finite and positive");
  }
}

bool PhaseDomain::contains(const Vec& x, const Vec& v) const {
  if (shape == Shape::Sum) return x.norm() + v.norm() <= sum_radius;
  const double r = x.norm();
  return r <= x_radius && r >= x_inner_radius && v.norm() <= v_radius;
}

std::string PhaseDomain::describe() const {
  std::ostringstream os;
  if (shape == Shape::Sum) {
    os << "|x|+|v| <= " << sum_radius << " in R^" << dim;
  } else {
    os << x_inner_radius << " <= |x| <= " << x_radius << ", |v| <= " << v_radius << " in R^" << dim;
  }
  return os.str();
}

std::mt19937_64 sample_rng(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                    0x6d74777bU};
  return std::mt19937_64(seq);
}

Vec random_unit_vector(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vec g(dim);
  double n = 0.0;
  do {
    for (int i = 0; i < dim; ++i) g[i] = gauss(rng);
    n = g.norm();
  } while (n < 1e-12);
  return g / n;
}

Vec random_in_ball(int dim, double radius, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const Vec dir = random_unit_vector(dim, rng);
  const double r = radius * std::pow(uni(rng), 1.0 / dim);
  return r * dir;
}

void sample_phase_point(const PhaseDomain& domain, std::mt19937_64& rng, Vec& x, Vec& v) {
  const int n = domain.dim;
  if (domain.shape == PhaseDomain::Shape::Sum) {
    do {
      x = random_in_ball(n, domain.sum_radius, rng);
      v = random_in_ball(n, domain.sum_radius, rng);
    } while (x.norm() + v.norm() > domain.sum_radius);
    return;
  }
  // Radius by inverse CDF on the shell r_in <= r <= r_out.
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const Vec dir = random_unit_vector(n, rng);
  const double lo = std::pow(domain.x_inner_radius, n);
  const double hi = std::pow(domain.x_radius, n);
  x = std::pow(lo + uni(rng) * (hi - lo), 1.0 / n) * dir;
  v = random_in_ball(n, domain.v_radius, rng);
}

Vec orthogonalize(const Vec& w, const Vec& u) {
  Vec out = w;
  for (int pass = 0; pass < 2; ++pass) out -= out.dot(u) * u;
  const double n = out.norm();
  if (n < 1e-12) throw InputError("cannot orthogonalize a vector parallel to u");
  return out / n;
}

}  // namespace mtw

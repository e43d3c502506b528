#pragma once

#include <cstdint>
#include <random>
#include <string>

#include "mtw/types.hpp"

namespace mtw {

/// Bounded region of phase space (x, v) used by every scan.
///
///   Product  r_in <= |x| <= x_radius  and  |v| <= v_radius
///   Sum      |x| + |v| <= sum_radius
struct PhaseDomain {
  enum class Shape { Product, Sum };

  Shape shape = Shape::Product;
  int dim = 2;
  double x_radius = 1.0;
  double x_inner_radius = 0.0;
  double v_radius = 1.0;
  double sum_radius = 1.0;

  static PhaseDomain product(int dim, double x_radius, double v_radius);
  static PhaseDomain sum(int dim, double radius);

  bool contains(const Vec& x, const Vec& v) const;
  std::string describe() const;
  void validate() const;
};

/// Deterministic generator for sample `index` of a scan seeded with `seed`,
/// independent of evaluation order.
std::mt19937_64 sample_rng(std::uint64_t seed, std::uint64_t index);

Vec random_unit_vector(int dim, std::mt19937_64& rng);
Vec random_in_ball(int dim, double radius, std::mt19937_64& rng);

/// Draws (x, v) uniformly from the domain (rejection for Sum and shells).
void sample_phase_point(const PhaseDomain& domain, std::mt19937_64& rng, Vec& x, Vec& v);

/// w minus its component along unit u, renormalised (two Gram-Schmidt passes).
Vec orthogonalize(const Vec& w, const Vec& u);

}  // namespace mtw

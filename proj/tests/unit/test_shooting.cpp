#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "mtw/error.hpp"
#include "mtw/harmonic.hpp"
#include "mtw/sampling.hpp"
#include "mtw/shooting.hpp"

using namespace mtw;

namespace {

Vec vec(std::initializer_list<double> xs) {
  Vec v(static_cast<int>(xs.size()));
  int i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

PotentialSpec quadratic1(double a) { return PotentialSpec::quadratic(Mat::Constant(1, 1, a)); }

}  // namespace

TEST(Shooting, FreeParticle) {
  const ShootResult r = shoot(PotentialSpec::zero(2), vec({0, 0}), vec({1, 0}));
  EXPECT_LE((r.v0 - vec({1, 0})).norm(), 1e-15);
  EXPECT_EQ(r.residual, 0.0);
  EXPECT_TRUE(r.multistart_agreement);
  EXPECT_EQ(r.total_starts, 9);
}

TEST(Shooting, RepulsiveOscillatorVelocities) {
  EXPECT_NEAR(shoot(quadratic1(-1.0), vec({0}), vec({1})).v0[0], 1.0 / std::sinh(1.0), 1e-8);
  EXPECT_NEAR(shoot(quadratic1(-1.0), vec({1}), vec({0})).v0[0], -std::cosh(1.0) / std::sinh(1.0),
              1e-8);
}

TEST(Shooting, CostExamples) {
  const auto zero = PotentialSpec::zero(3);
  const Vec x = vec({0.1, -0.5, 2.0}), y = vec({1.0, 0.3, -0.4});
  for (double T : {0.5, 1.0, 2.0}) {
    EXPECT_NEAR(cost(zero, x, y, T, IntegratorConfig::for_duration(T)),
                (x - y).squaredNorm() / (2.0 * T), 1e-10);
  }
  const double harmonic = std::cosh(1.0) / (2.0 * std::sinh(1.0));
  EXPECT_NEAR(cost(quadratic1(-1.0), vec({1}), vec({0})), harmonic, 1e-7);
  Mat A = Mat::Zero(2, 2);
  A(0, 0) = -1.0;
  EXPECT_NEAR(cost(PotentialSpec::quadratic(A), vec({1, 1}), vec({0, 0})), harmonic + 0.5, 1e-7);
}

TEST(Shooting, CExponential) {
  const Vec x = vec({0.2, 0.7}), v = vec({-1.0, 0.4});
  EXPECT_LE((c_exponential(PotentialSpec::zero(2), x, v) - (x + v)).norm(), 1e-13);
  EXPECT_NEAR(c_exponential(quadratic1(-1.0), vec({0}), vec({1}))[0], std::sinh(1.0), 1e-10);
}

TEST(Shooting, RoundTripsOnHarmonicAndQuartic) {
  Mat A(2, 2);
  A << -1.0, 0.3, 0.3, -0.5;
  const std::vector<PotentialSpec> specs = {
      PotentialSpec::quadratic(A),
      PotentialSpec::black_box_of(PotentialSpec::radial(2, {0.0, 0.0, 1e-2}))};
  const ShootOptions opts;
  for (const auto& spec : specs) {
    for (int i = 0; i < 50; ++i) {
      auto rng = sample_rng(0, i);
      const Vec x = random_in_ball(2, 1.0, rng), y = random_in_ball(2, 1.0, rng);
      const double tol = opts.tol_scale * (1.0 + y.norm());
      const ShootResult r = shoot(spec, x, y);
      EXPECT_LE((c_exponential(spec, x, r.v0) - y).norm(), 10 * tol);
      const Vec v = random_in_ball(2, 1.0, rng);
      const Vec y2 = c_exponential(spec, x, v);
      EXPECT_LE((shoot(spec, x, y2).v0 - v).norm(), 10 * opts.tol_scale * (1.0 + y2.norm()));
    }
  }
}

TEST(Shooting, CostSymmetricUnderReflection) {
  Mat A(2, 2);
  A << -1.0, 0.3, 0.3, -0.5;
  const auto spec = PotentialSpec::quadratic(A);
  std::mt19937_64 rng(2);
  for (int i = 0; i < 10; ++i) {
    const Vec x = random_in_ball(2, 1.0, rng), y = random_in_ball(2, 1.0, rng);
    EXPECT_NEAR(cost(spec, x, y), cost(spec, y, x), 1e-9);
    EXPECT_NEAR(cost(spec, x, y), cost(spec, Vec(-x), Vec(-y)), 1e-9);
  }
}

PotentialSpec pendulum() {
  return PotentialSpec::black_box(1, [](const Vec& x) { return 1.0 - std::cos(x[0]); });
}

TEST(Shooting, PendulumOverLongHorizonIsAmbiguous) {
  // Over T = 10 the pendulum reaches y by several swing counts.
  const double T = 10.0;
  ShootOptions opts;
  opts.random_starts = 16;
  opts.start_spread = 4.0;
  EXPECT_THROW(shoot(pendulum(), vec({0.0}), vec({0.5}), T, IntegratorConfig::for_duration(T), opts),
               AmbiguityError);
}

TEST(Shooting, NoSolutionWhenNewtonBudgetIsExhausted) {
  const double T = 10.0;
  ShootOptions opts;
  opts.random_starts = 0;
  opts.max_iters = 1;
  EXPECT_THROW(shoot(pendulum(), vec({0.0}), vec({2.5}), T, IntegratorConfig::for_duration(T), opts),
               NoSolutionError);
}

TEST(Shooting, ConjugateScanExamples) {
  const auto attractive = PotentialSpec::quadratic(Mat::Identity(2, 2));
  const ConjugateScan a = conjugate_scan(attractive, vec({0.3, 0.1}), vec({0.2, 1.0}), 4.0,
                                         IntegratorConfig::for_duration(4.0), 1e-8);
  ASSERT_TRUE(a.first_conjugate_time.has_value());
  EXPECT_NEAR(*a.first_conjugate_time, std::numbers::pi, 1e-6);

  const auto repulsive = PotentialSpec::quadratic(-Mat::Identity(2, 2));
  const ConjugateScan r = conjugate_scan(repulsive, vec({0.3, 0.1}), vec({0.2, 1.0}), 10.0,
                                         IntegratorConfig::for_duration(10.0), 1e-8);
  EXPECT_FALSE(r.first_conjugate_time.has_value());

  const ConjugateScan z = conjugate_scan(PotentialSpec::zero(2), vec({0, 0}), vec({1, 1}), 5.0,
                                         IntegratorConfig::for_duration(5.0), 1e-8);
  EXPECT_FALSE(z.first_conjugate_time.has_value());
  EXPECT_EQ(z.min_singular_value_curve.size(), z.times.size());
}

TEST(Shooting, InputValidation) {
  const auto zero = PotentialSpec::zero(2);
  EXPECT_THROW(shoot(zero, vec({0}), vec({1, 0})), InputError);
  EXPECT_THROW(shoot(zero, vec({0, 0}), vec({1, 0}), 0.0), InputError);
  EXPECT_THROW(shoot(zero, vec({0, NAN}), vec({1, 0})), InputError);
}

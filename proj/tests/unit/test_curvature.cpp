#include <gtest/gtest.h>

#include <cmath>

#include "mtw/curvature.hpp"
#include "mtw/error.hpp"

using namespace mtw;

namespace {

Vec vec(std::initializer_list<double> xs) {
  Vec v(static_cast<int>(xs.size()));
  int i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

Vec e(int n, int i) {
  Vec v = Vec::Zero(n);
  v[i] = 1.0;
  return v;
}

struct Sample {
  Vec x, u, v, w;
};

Sample draw(int n, std::uint64_t seed, int i, bool orthogonal) {
  auto rng = sample_rng(seed, i);
  Sample s;
  sample_phase_point(PhaseDomain::product(n, 1.0, 1.0), rng, s.x, s.v);
  s.u = random_unit_vector(n, rng);
  s.w = random_unit_vector(n, rng);
  if (orthogonal) s.w = orthogonalize(s.w, s.u);
  return s;
}

PotentialSpec quartic(int n, double eps) { return PotentialSpec::radial(n, {0.0, 0.0, eps}); }

CurvatureResult jac(const PotentialSpec& p, const Sample& s) {
  return cross_curvature_jacobi(p, s.x, s.u, s.v, s.w, FDScheme::defaults(s.v, s.w));
}

CurvatureResult dir(const PotentialSpec& p, const Sample& s) {
  return cross_curvature_direct(p, s.x, s.u, s.v, s.w,
                                FDScheme::defaults(s.v, s.w, CurvatureMethod::Direct));
}

}  // namespace

TEST(Curvature, ZeroPotentialVanishes) {
  const auto zero = PotentialSpec::zero(3);
  for (int i = 0; i < 5; ++i) {
    const Sample s = draw(3, 1, i, false);
    EXPECT_LE(std::abs(jac(zero, s).value), 1e-8);
    EXPECT_LE(std::abs(dir(zero, s).value), 1e-5);
  }
}

TEST(Curvature, RepulsiveOscillatorVanishes) {
  const auto spec = PotentialSpec::quadratic(-Mat::Identity(2, 2));
  for (int i = 0; i < 10; ++i) {
    const Sample s = draw(2, 0, i, false);
    EXPECT_LE(std::abs(jac(spec, s).value), 1e-6);
    EXPECT_LE(std::abs(dir(spec, s).value), 1e-4);
  }
}

TEST(Curvature, GentleQuarticMatchesHandValue) {
  // For V = eps |x|^4/4 at x = 0, v = e1, u = e2: <u, X'(0)>(s) = eps (1+s^2)/30
  // along v + s e3, so the first-order curvature is 3/2 * eps/15 = eps/10.
  const double eps = 1e-3;
  const auto bb = PotentialSpec::black_box_of(quartic(3, eps));
  const Sample s{Vec::Zero(3), e(3, 1), e(3, 0), e(3, 2)};
  const double j = jac(bb, s).value;
  EXPECT_GT(j, 0.0);
  EXPECT_NEAR(j, eps / 10.0, 0.15 * eps / 10.0);
  const double d = dir(bb, s).value;
  EXPECT_LE(std::abs(d - j), std::max(1e-5, 0.1 * std::abs(j)));
}

TEST(Curvature, MethodsAgree) {
  const std::vector<PotentialSpec> specs = {PotentialSpec::zero(2),
                                            PotentialSpec::quadratic(-Mat::Identity(2, 2)),
                                            quartic(2, 1e-3)};
  for (const auto& spec : specs) {
    for (int i = 0; i < 6; ++i) {
      const Sample s = draw(2, 3, i, i % 2 == 1);
      const double j = jac(spec, s).value, d = dir(spec, s).value;
      EXPECT_LE(std::abs(j - d), std::max(1e-4, 0.1 * std::abs(j)));
    }
  }
}

TEST(Curvature, HomogeneousOfDegreeTwoInEachSlot) {
  const auto spec = quartic(3, 0.1);
  const Sample s = draw(3, 5, 0, false);
  const double base = jac(spec, s).value;
  for (auto [a, b] : {std::pair{2.0, 0.5}, std::pair{-0.7, 3.0}, std::pair{1.5, -1.0}}) {
    const double scaled_value =
        cross_curvature_jacobi(spec, s.x, Vec(a * s.u), s.v, Vec(b * s.w),
                               FDScheme::defaults(s.v, Vec(b * s.w)))
            .value;
    EXPECT_NEAR(scaled_value, a * a * b * b * base, 1e-6 * std::abs(a * a * b * b * base));
  }
}

TEST(Curvature, ConjugateCentreRaises) {
  // Hess V = pi^2 I puts the first conjugate point exactly at T = 1.
  const auto spec = PotentialSpec::quadratic(M_PI * M_PI * Mat::Identity(2, 2));
  const Sample s = draw(2, 0, 0, false);
  EXPECT_THROW(jac(spec, s), ConjugatePointError);
  EXPECT_THROW(dir(spec, s), ConjugatePointError);
}

TEST(Curvature, InputValidation) {
  const auto zero = PotentialSpec::zero(2);
  const Sample s = draw(2, 0, 0, false);
  FDScheme fd;
  fd.richardson_levels = 4;
  EXPECT_THROW(cross_curvature_jacobi(zero, s.x, s.u, s.v, s.w, fd), InputError);
  fd = FDScheme{};
  fd.h_s = 0.0;
  EXPECT_THROW(cross_curvature_jacobi(zero, s.x, s.u, s.v, s.w, fd), InputError);
  EXPECT_THROW(cross_curvature_jacobi(zero, vec({0, 0, 0}), s.u, s.v, s.w, FDScheme{}), InputError);
  EXPECT_EQ(curvature_method_from_string("direct"), CurvatureMethod::Direct);
  EXPECT_THROW(curvature_method_from_string("fourier"), InputError);
}

TEST(Verdicts, Rules) {
  using S = Verdict::Status;
  EXPECT_EQ(weak_verdict(-0.5e-6, 1e-6, true).status, S::Holds);
  EXPECT_EQ(weak_verdict(-2e-6, 1e-6, true).status, S::Fails);
  EXPECT_EQ(strong_verdict(2e-6, 1.0, 1e-6, true).status, S::Holds);
  EXPECT_EQ(strong_verdict(-2e-6, 1.0, 1e-6, true).status, S::Fails);
  EXPECT_EQ(strong_verdict(0.5e-6, 1.0, 1e-6, true).status, S::Inconclusive);
  EXPECT_EQ(strong_verdict(0.0, 0.5e-6, 1e-6, true).status, S::Fails);
  EXPECT_EQ(weak_verdict(0.0, 1e-6, false).status, S::Inconclusive);
  EXPECT_TRUE(std::isnan(strong_verdict(0.0, 0.0, 1e-6, false).statistic));
}

TEST(Scan, HarmonicVerdicts) {
  ScanOptions opts;
  opts.margin = 1e-4;
  opts.seed = 0;
  const PhaseDomain box = PhaseDomain::product(2, 1.0, 1.0);
  const ScanReport h = mtw_scan(PotentialSpec::quadratic(-Mat::Identity(2, 2)), box, opts);
  const ScanReport z = mtw_scan(PotentialSpec::zero(2), box, opts);
  for (const ScanReport* r : {&h, &z}) {
    EXPECT_EQ(r->n_samples, 200);
    EXPECT_EQ(r->n_excluded, 0);
    EXPECT_EQ(r->n_orthogonal, 100);
    EXPECT_EQ(r->b3w.status, Verdict::Status::Holds);
    EXPECT_EQ(r->b3s.status, Verdict::Status::Fails);
    EXPECT_EQ(r->a3w.status, Verdict::Status::Holds);
    EXPECT_LE(r->max_abs, 1e-6);
    EXPECT_GE(r->min_mtw, r->min_cross - 1e-12);
  }
}

TEST(Scan, SampleFlagsAndOrthogonality) {
  ScanOptions opts;
  opts.n_samples = 20;
  opts.seed = 7;
  const ScanReport r = mtw_scan(quartic(3, 1e-3), PhaseDomain::sum(3, 0.5), opts);
  for (const CurvatureSample& s : r.samples) {
    if (s.orthogonal) EXPECT_LE(std::abs(s.u.dot(s.w)), 1e-12);
    EXPECT_NEAR(s.u.norm(), 1.0, 1e-14);
    EXPECT_NEAR(s.w.norm(), 1.0, 1e-14);
  }
  EXPECT_GE(r.min_mtw, r.min_cross - 1e-12);
}

TEST(Scan, OrderIndependentOfWorkerCount) {
  ScanOptions opts;
  opts.n_samples = 24;
  opts.seed = 3;
  opts.workers = 1;
  const auto spec = quartic(2, 1e-2);
  const PhaseDomain box = PhaseDomain::product(2, 1.0, 1.0);
  const ScanReport a = mtw_scan(spec, box, opts);
  opts.workers = 4;
  const ScanReport b = mtw_scan(spec, box, opts);
  for (int i = 0; i < opts.n_samples; ++i) EXPECT_EQ(a.samples[i].value, b.samples[i].value);
}

TEST(Scan, ExclusionsAreCountedAndStamped) {
  // Strong attraction far from the origin puts conjugate points before T = 1.
  ScanOptions opts;
  opts.n_samples = 40;
  opts.seed = 0;
  PhaseDomain box = PhaseDomain::product(2, 2.0, 1.0);
  const ScanReport r = mtw_scan(PotentialSpec::radial(2, {0.0, 0.0, 3.0}), box, opts);
  EXPECT_GT(r.n_excluded, 0);
  for (const CurvatureSample& s : r.samples) {
    if (s.excluded) EXPECT_FALSE(s.reason.empty());
  }
  if (r.n_excluded * 10 > r.n_samples) {
    EXPECT_TRUE(r.exclusion_stamp);
    EXPECT_EQ(r.a3w.status, Verdict::Status::Inconclusive);
    EXPECT_EQ(r.b3s.status, Verdict::Status::Inconclusive);
  }
}

TEST(Scan, AllExcludedRaises) {
  ScanOptions opts;
  opts.n_samples = 5;
  const auto spec = PotentialSpec::quadratic(16.0 * Mat::Identity(2, 2));
  EXPECT_THROW(mtw_scan(spec, PhaseDomain::product(2, 1.0, 1.0), opts), EmptyScanError);
}

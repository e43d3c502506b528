#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "mtw/curvature.hpp"
#include "mtw/dynamics.hpp"
#include "mtw/harmonic.hpp"
#include "mtw/jacobi.hpp"
#include "mtw/perturbation.hpp"
#include "mtw/report.hpp"
#include "mtw/shooting.hpp"

using namespace mtw;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "[violated] ";
    }
    detail << what << "; ";
  }
};

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

Vec e(int n, int i) {
  Vec v = Vec::Zero(n);
  v[i] = 1.0;
  return v;
}

Vec vec1(double a) { return Vec::Constant(1, a); }

PotentialSpec quartic(int n, double eps) { return PotentialSpec::radial(n, {0.0, 0.0, eps}); }

Mat random_negative_definite(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Mat B(n, n);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) B(r, c) = g(rng);
  }
  return -(B * B.transpose() / n + 0.1 * Mat::Identity(n, n));
}

ScanOptions scan_opts(CurvatureMethod method, int n, std::uint64_t seed) {
  ScanOptions o;
  o.n_samples = n;
  o.seed = seed;
  o.method = method;
  return o;
}

void harmonic_vanishing(Outcome& o) {
  const auto start = std::chrono::steady_clock::now();
  Mat d = Mat::Zero(2, 2);
  d(0, 0) = -1.0;
  d(1, 1) = -4.0;
  const std::vector<std::pair<std::string, PotentialSpec>> cases = {
      {"A=0", PotentialSpec::zero(2)},
      {"A=-I2", PotentialSpec::quadratic(-Mat::Identity(2, 2))},
      {"A=diag(-1,-4)", PotentialSpec::quadratic(d)},
      {"A=random 3x3", PotentialSpec::quadratic(random_negative_definite(3, 0))}};
  for (const auto& [name, spec] : cases) {
    const PhaseDomain box = PhaseDomain::product(spec.dim(), 1.0, 1.0);
    const ScanReport j = mtw_scan(spec, box, scan_opts(CurvatureMethod::Jacobi, 200, 0));
    const ScanReport r = mtw_scan(spec, box, scan_opts(CurvatureMethod::Direct, 200, 0));
    o.require(j.n_excluded == 0 && r.n_excluded == 0, name + " no exclusions");
    o.require(j.max_abs <= 1e-6, name + " jacobi max " + num(j.max_abs) + " <= 1e-6");
    o.require(r.max_abs <= 1e-4, name + " direct max " + num(r.max_abs) + " <= 1e-4");
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  o.require(secs <= 60.0, "runtime " + num(secs) + " s <= 60 s");
}

void methods_agree(Outcome& o) {
  const std::vector<std::pair<std::string, PotentialSpec>> cases = {
      {"zero", PotentialSpec::zero(2)},
      {"harmonic", PotentialSpec::quadratic(-Mat::Identity(2, 2))},
      {"quartic", quartic(2, 1e-3)}};
  for (const auto& [name, spec] : cases) {
    const PhaseDomain box = PhaseDomain::product(2, 1.0, 1.0);
    const ScanReport j = mtw_scan(spec, box, scan_opts(CurvatureMethod::Jacobi, 50, 1));
    const ScanReport r = mtw_scan(spec, box, scan_opts(CurvatureMethod::Direct, 50, 1));
    double worst = 0.0;
    int compared = 0;
    for (int i = 0; i < 50; ++i) {
      if (j.samples[i].excluded || r.samples[i].excluded) continue;
      ++compared;
      const double a = j.samples[i].value, b = r.samples[i].value;
      worst = std::max(worst, std::abs(a - b) / std::max(1e-4, 0.1 * std::abs(a)));
    }
    o.require(compared == 50, name + " " + std::to_string(compared) + "/50 compared");
    o.require(worst <= 1.0, name + " worst gap / max(1e-4, 10% rel) = " + num(worst));
  }
}

void closed_forms(Outcome& o) {
  const auto spec = PotentialSpec::quadratic(Mat::Constant(1, 1, -1.0));
  const HarmonicSpec h = HarmonicSpec::diagonal(vec1(1.0));
  const double c = cost(spec, vec1(1.0), vec1(0.0));
  const double exact = ho_cost(h, 1.0, vec1(1.0), vec1(0.0));
  o.require(std::abs(c - exact) <= 1e-7, "cost gap " + num(std::abs(c - exact)) + " <= 1e-7");
  o.require(std::abs(exact - std::cosh(1.0) / (2.0 * std::sinh(1.0))) <= 1e-15,
            "ho_cost matches cosh(1)/(2 sinh(1))");
  const double v0 = shoot(spec, vec1(0.0), vec1(1.0)).v0[0];
  const double gap = std::abs(v0 - 1.0 / std::sinh(1.0));
  o.require(gap <= 1e-8, "shoot gap " + num(gap) + " <= 1e-8");
}

void conjugate_points(Outcome& o) {
  Vec x(2), v(2);
  x << 0.3, -0.2;
  v << 0.5, 1.0;
  const ConjugateScan att = conjugate_scan(PotentialSpec::quadratic(Mat::Identity(2, 2)), x, v,
                                           4.0, IntegratorConfig::for_duration(4.0), 1e-8);
  o.require(att.first_conjugate_time.has_value(), "A=+I conjugate point found");
  if (att.first_conjugate_time) {
    const double gap = std::abs(*att.first_conjugate_time - std::numbers::pi);
    o.require(gap <= 1e-6, "A=+I |t* - pi| = " + num(gap) + " <= 1e-6");
  }
  const ConjugateScan rep = conjugate_scan(PotentialSpec::quadratic(-Mat::Identity(2, 2)), x, v,
                                           10.0, IntegratorConfig::for_duration(10.0), 1e-8);
  o.require(!rep.first_conjugate_time, "A=-I none on [0, 10]");
}

void perturbation_positivity(Outcome& o) {
  const Vec x = Vec::Zero(3), v = e(3, 0), u = e(3, 1), w = e(3, 2);
  // int_0^1 int_0^tau 2 t^2 (1 - t) dt dtau = int_0^1 2 t^2 (1 - t)^2 dt = 1/15.
  const double value = perturbation_integral(quartic(3, 1.0), x, v, u, w);
  o.require(std::abs(value - 1.0 / 15.0) <= 1e-8,
            "integral gap " + num(std::abs(value - 1.0 / 15.0)) + " <= 1e-8");
  const PerturbationCheck check =
      perturbation_check(quartic(3, 1.0), PhaseDomain::sum(3, 0.5), 1e-3, 200, true, 0);
  o.require(check.holds, "check holds, min " + num(check.min_integral) + " >= 1e-3");
}

void radial_criteria(Outcome& o) {
  const PhaseDomain box = PhaseDomain::sum(2, 1.0);
  const std::vector<double> square = {0.0, 0.0, 1.0}, linear = {0.0, 1.0};
  const RadialCheck sq = radial_condition_check(square, box, 1.9, 200, 0);
  const RadialCheck lin = radial_condition_check(linear, box, 1.9, 200, 0);
  o.require(sq.holds, "z^2 holds (min f'' = " + num(sq.min_f2) + ")");
  o.require(!lin.holds, "z fails (min f'' = " + num(lin.min_f2) + ")");
}

void small_eps_law(Outcome& o) {
  const Vec x = Vec::Zero(3), v = e(3, 0), u = e(3, 1), w = e(3, 2);
  const std::vector<double> eps = {1e-2, 1e-3, 1e-4};
  const EpsTable t = small_eps_oracle(quartic(3, 1.0), eps, x, u, v, w, FDScheme::defaults(v, w));
  const double g0 = t.rows[0].relative_gap, g1 = t.rows[1].relative_gap,
               g2 = t.rows[2].relative_gap;
  o.require(g0 > g1 && g1 > g2,
            "gaps shrink " + num(g0) + " > " + num(g1) + " > " + num(g2));
  o.require(g2 <= 0.15, "gap at 1e-4 " + num(g2) + " <= 0.15");
  ScanOptions opts = scan_opts(CurvatureMethod::Jacobi, 200, 0);
  opts.orthogonal_only = true;
  opts.margin = 1e-8;
  const ScanReport r = mtw_scan(quartic(3, 1e-3), PhaseDomain::sum(3, 0.5), opts);
  o.require(r.min_mtw > 0.0, "min MTW " + num(r.min_mtw) + " > 0");
  o.require(r.a3s.status == Verdict::Status::Holds, "A3s " + to_string(r.a3s.status));
}

std::string scan_csv(int workers) {
  ScanOptions opts = scan_opts(CurvatureMethod::Jacobi, 40, 9);
  opts.workers = workers;
  std::ostringstream os;
  write_scan_csv(os, mtw_scan(quartic(2, 1e-2), PhaseDomain::product(2, 1.0, 1.0), opts));
  return os.str();
}

void invariants(Outcome& o) {
  const auto spec = PotentialSpec::radial(3, {0.0, 0.1, 0.5, 0.2});
  std::mt19937_64 rng(0);
  std::uniform_real_distribution<double> coef(-2.0, 2.0);
  double lin = 0.0, symp = 0.0, drift_excess = 0.0;
  for (int k = 0; k < 20; ++k) {
    Vec x, v;
    sample_phase_point(PhaseDomain::product(3, 1.0, 1.0), rng, x, v);
    const IntegratorConfig cfg;
    const VariationalFlow vf = flow_with_variations(spec, {x, v}, 1.0, cfg);
    const FundamentalSolution& fs = vf.fundamental;
    for (std::size_t n = 0; n < fs.M.size(); ++n) {
      const Mat W = fs.M[n].transpose() * fs.Ndot[n] - fs.Mdot[n].transpose() * fs.N[n];
      symp = std::max(symp, (W - Mat::Identity(3, 3)).cwiseAbs().maxCoeff());
    }
    const Vec u1 = random_unit_vector(3, rng), u2 = random_unit_vector(3, rng);
    const double a = coef(rng), b = coef(rng);
    const Vec lhs = jacobi_map(fs, Vec(a * u1 + b * u2)).value;
    const Vec rhs = a * jacobi_map(fs, u1).value + b * jacobi_map(fs, u2).value;
    lin = std::max(lin, (lhs - rhs).norm());
    const Trajectory traj = flow(spec, {x, v}, 1.0, cfg);
    drift_excess = std::max(drift_excess, energy_drift(traj) - cfg.energy_tol);
  }
  o.require(lin <= 1e-9, "linearity " + num(lin) + " <= 1e-9");
  o.require(symp <= 1e-8, "symplectic " + num(symp) + " <= 1e-8");
  o.require(drift_excess <= 0.0, "energy drift within energy_tol");

  double homog = 0.0;
  for (int k = 0; k < 5; ++k) {
    auto r = sample_rng(4, k);
    Vec x, v;
    sample_phase_point(PhaseDomain::product(3, 1.0, 1.0), r, x, v);
    const Vec u = random_unit_vector(3, r), w = random_unit_vector(3, r);
    const double base = cross_curvature_jacobi(spec, x, u, v, w, FDScheme::defaults(v, w)).value;
    const double a = 1.7, b = -0.6;
    const Vec bw = b * w;
    const double scaled_value =
        cross_curvature_jacobi(spec, x, Vec(a * u), v, bw, FDScheme::defaults(v, bw)).value;
    const double expect = a * a * b * b * base;
    homog = std::max(homog, std::abs(scaled_value - expect) / std::abs(expect));
  }
  o.require(homog <= 1e-6, "homogeneity " + num(homog) + " <= 1e-6 relative");

  // x'' = x from (1, 0.5): x(1) = cosh(1) + 0.5 sinh(1).
  const auto rep = PotentialSpec::quadratic(-Mat::Identity(1, 1));
  const double exact = std::cosh(1.0) + 0.5 * std::sinh(1.0);
  auto err = [&](int steps) {
    IntegratorConfig cfg;
    cfg.steps = steps;
    return std::abs(flow(rep, {vec1(1.0), vec1(0.5)}, 1.0, cfg).final().x[0] - exact);
  };
  const double ratio = err(16) / err(32);
  o.require(ratio >= 8.0 && ratio <= 32.0, "RK4 ratio " + num(ratio) + " in [8, 32]");

  const std::string a = scan_csv(1), b = scan_csv(1), c = scan_csv(4);
  o.require(a == b && a == c, "CSV byte-identical across runs and worker counts");
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria = {
      {"harmonic vanishing", harmonic_vanishing},
      {"curvature methods agree", methods_agree},
      {"closed-form cost and shooting", closed_forms},
      {"conjugate-point detection", conjugate_points},
      {"perturbation positivity", perturbation_positivity},
      {"radial criteria", radial_criteria},
      {"small-eps law", small_eps_law},
      {"invariant suites", invariants}};
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      criteria[i].second(o);
    } catch (const std::exception& ex) {
      o.pass = false;
      o.detail << "threw: " << ex.what();
    }
    if (!o.pass) ++failed;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << i + 1 << " (" << criteria[i].first
              << "): " << o.detail.str() << std::endl;
  }
  return failed == 0 ? 0 : 1;
}

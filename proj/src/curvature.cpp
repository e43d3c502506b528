#include "mtw/curvature.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "mtw/error.hpp"
#include "mtw/jacobi.hpp"
#include "mtw/parallel.hpp"

namespace mtw {

namespace {

void check_inputs(const PotentialSpec& spec, const Vec& x, const Vec& u, const Vec& v,
                  const Vec& w, const FDScheme& fd, const CurvatureConfig& cfg) {
  const int n = spec.dim();
  if (x.size() != n || u.size() != n || v.size() != n || w.size() != n) {
    throw InputError("curvature inputs do not match the potential dimension");
  }
  if (!x.allFinite() || !u.allFinite() || !v.allFinite() || !w.allFinite()) {
    throw InputError("curvature inputs must be finite");
  }
  fd.validate();
  cfg.integrator.validate();
  if (!(cfg.T > 0.0)) throw InputError("curvature horizon T must be positive");
}

// Richardson table over step halvings for an O(h^2) even-error estimator.
CurvatureResult richardson(const std::vector<double>& estimates) {
  const int L = static_cast<int>(estimates.size());
  std::vector<std::vector<double>> R(L);
  for (int k = 0; k < L; ++k) {
    R[k].resize(k + 1);
    R[k][0] = estimates[k];
    double factor = 1.0;
    for (int j = 1; j <= k; ++j) {
      factor *= 4.0;
      R[k][j] = R[k][j - 1] + (R[k][j - 1] - R[k - 1][j - 1]) / (factor - 1.0);
    }
  }
  CurvatureResult out;
  out.value = R[L - 1][L - 1];
  out.error_estimate = (L >= 2) ? std::abs(R[L - 1][L - 1] - R[L - 2][L - 2]) : 0.0;
  return out;
}

void require_conjugate_free(const PotentialSpec& spec, const VariationalFlow& vf,
                            const CurvatureConfig& cfg, const char* where) {
  const ConjugateScan scan = conjugate_scan(spec, vf, cfg.conj_tol);
  if (scan.first_conjugate_time) {
    std::ostringstream os;
    os << "conjugate point at t = " << *scan.first_conjugate_time << " on the " << where
       << " trajectory; cross-curvature undefined";
    throw ConjugatePointError(os.str());
  }
}

void require_regular(const PotentialSpec& spec, const Vec& x, const Vec& v, const Vec& y,
                     const CurvatureConfig& cfg) {
  const std::array<Vec, 2> starts{v, Vec((y - x) / cfg.T)};
  ShootResult r;
  try {
    r = shoot(spec, x, y, cfg.T, cfg.integrator, cfg.shoot, starts);
  } catch (const AmbiguityError& e) {
    throw DomainError(std::string("covector is not shooting-regular: ") + e.what());
  } catch (const NoSolutionError& e) {
    throw DomainError(std::string("cannot shoot back to exp^c(x, v): ") + e.what());
  }
  if ((r.v0 - v).norm() > cfg.shoot.ambiguity_tol * (1.0 + v.norm())) {
    throw DomainError("shooting back from exp^c(x, v) does not return v");
  }
}

double condition_of(const VariationalFlow& vf) {
  Eigen::JacobiSVD<Mat> svd(vf.fundamental.N.back());
  const auto sv = svd.singularValues();
  return sv(0) / sv(sv.size() - 1);
}

}  // namespace

FDScheme FDScheme::defaults(const Vec& v, const Vec& w, CurvatureMethod method) {
  const double h = method == CurvatureMethod::Jacobi ? 1e-2 : 4e-2;
  FDScheme fd;
  fd.h_s = h * (1.0 + v.norm()) / (1.0 + w.norm());
  fd.h_t = h;
  fd.richardson_levels = 2;
  return fd;
}

void FDScheme::validate() const {
  if (!(h_s > 0.0) || !(h_t > 0.0) || !std::isfinite(h_s) || !std::isfinite(h_t)) {
    throw InputError("finite-difference steps must be positive");
  }
  if (richardson_levels < 1 || richardson_levels > 3) {
    throw InputError("richardson_levels must be 1, 2 or 3");
  }
}

std::string to_string(CurvatureMethod m) { return m == CurvatureMethod::Jacobi ? "jacobi" : "direct"; }

CurvatureMethod curvature_method_from_string(const std::string& tag) {
  if (tag == "jacobi") return CurvatureMethod::Jacobi;
  if (tag == "direct") return CurvatureMethod::Direct;
  throw InputError("unknown curvature method '" + tag + "'");
}

std::string to_string(Verdict::Status s) {
  switch (s) {
    case Verdict::Status::Holds: return "holds";
    case Verdict::Status::Fails: return "fails";
    case Verdict::Status::Inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

CurvatureResult cross_curvature_jacobi(const PotentialSpec& spec, const Vec& x, const Vec& u,
                                       const Vec& v, const Vec& w, const FDScheme& fd,
                                       const CurvatureConfig& cfg) {
  check_inputs(spec, x, u, v, w, fd, cfg);

  // <u, J^c(exp^c(v + s w), u)> along the flow with initial velocity v + s w.
  auto pairing = [&](double s, VariationalFlow* keep) {
    VariationalFlow vf = flow_with_variations(spec, {x, Vec(v + s * w)}, cfg.T, cfg.integrator);
    require_conjugate_free(spec, vf, cfg, "stencil");
    const double value = u.dot(jacobi_map(vf.fundamental, u, cfg.conj_tol).value);
    if (keep) *keep = std::move(vf);
    return value;
  };

  VariationalFlow center;
  const double g0 = pairing(0.0, &center);
  if (cfg.check_regularity) require_regular(spec, x, v, center.trajectory.final().x, cfg);

  std::vector<double> estimates;
  double h = fd.h_s;
  for (int level = 0; level < fd.richardson_levels; ++level, h *= 0.5) {
    const double gp = pairing(h, nullptr);
    const double gm = pairing(-h, nullptr);
    estimates.push_back(((gp + gm) - 2.0 * g0) / (h * h));
  }
  CurvatureResult out = richardson(estimates);
  out.value *= 1.5;
  out.error_estimate *= 1.5;
  out.condition_number = condition_of(center);
  return out;
}

CurvatureResult cross_curvature_direct(const PotentialSpec& spec, const Vec& x, const Vec& u,
                                       const Vec& v, const Vec& w, const FDScheme& fd,
                                       const CurvatureConfig& cfg) {
  check_inputs(spec, x, u, v, w, fd, cfg);
  const double T = cfg.T;

  const VariationalFlow center =
      flow_with_variations(spec, {x, v}, T, cfg.integrator);
  require_conjugate_free(spec, center, cfg, "central");
  if (cfg.check_regularity) require_regular(spec, x, v, center.trajectory.final().x, cfg);

  ShootOptions stencil_opts = cfg.shoot;
  if (!cfg.stencil_multistart) stencil_opts.random_starts = 0;

  // c(x + t u, exp^c(x, v + s w)), warm-started from the free-particle guess.
  auto stencil_cost = [&](double t, double s, const Vec& target) {
    const Vec xt = x + t * u;
    const std::array<Vec, 1> start{Vec(v + s * w - (t / T) * u)};
    ShootResult r;
    try {
      r = shoot(spec, xt, target, T, cfg.integrator, stencil_opts, start);
    } catch (const AmbiguityError& e) {
      throw DomainError(std::string("stencil pair is not shooting-regular: ") + e.what());
    } catch (const NoSolutionError& e) {
      throw DomainError(std::string("stencil pair cannot be shot: ") + e.what());
    }
    const Trajectory traj = flow(spec, {xt, r.v0}, T, cfg.integrator);
    // dc/dy = v(T): removes the first-order effect of the shooting residual.
    return action(spec, traj) + traj.final().v.dot(target - traj.final().x);
  };

  const Vec y0 = center.trajectory.final().x;
  const double c00 = stencil_cost(0.0, 0.0, y0);

  std::vector<double> estimates;
  double ht = fd.h_t;
  double hs = fd.h_s;
  for (int level = 0; level < fd.richardson_levels; ++level, ht *= 0.5, hs *= 0.5) {
    const Vec yp = c_exponential(spec, x, v + hs * w, T, cfg.integrator);
    const Vec ym = c_exponential(spec, x, v - hs * w, T, cfg.integrator);
    // Second t-difference along each target, then second s-difference.
    auto t_diff = [&](double s, const Vec& target, double c_mid) {
      return (stencil_cost(ht, s, target) + stencil_cost(-ht, s, target)) - 2.0 * c_mid;
    };
    const double d_plus = t_diff(hs, yp, stencil_cost(0.0, hs, yp));
    const double d_minus = t_diff(-hs, ym, stencil_cost(0.0, -hs, ym));
    const double d_zero = t_diff(0.0, y0, c00);
    estimates.push_back(((d_plus + d_minus) - 2.0 * d_zero) / (ht * ht * hs * hs));
  }
  CurvatureResult out = richardson(estimates);
  out.value *= -1.5;
  out.error_estimate *= 1.5;
  out.condition_number = condition_of(center);
  return out;
}

CurvatureResult cross_curvature(CurvatureMethod method, const PotentialSpec& spec, const Vec& x,
                                const Vec& u, const Vec& v, const Vec& w, const FDScheme& fd,
                                const CurvatureConfig& cfg) {
  return method == CurvatureMethod::Jacobi ? cross_curvature_jacobi(spec, x, u, v, w, fd, cfg)
                                           : cross_curvature_direct(spec, x, u, v, w, fd, cfg);
}

Verdict weak_verdict(double min_value, double margin, bool have_samples) {
  Verdict v;
  v.margin = margin;
  if (!have_samples) {
    v.statistic = std::numeric_limits<double>::quiet_NaN();
    return v;
  }
  v.statistic = min_value;
  v.status = (min_value >= -margin) ? Verdict::Status::Holds : Verdict::Status::Fails;
  return v;
}

Verdict strong_verdict(double min_value, double max_abs, double margin, bool have_samples) {
  Verdict v;
  v.margin = margin;
  if (!have_samples) {
    v.statistic = std::numeric_limits<double>::quiet_NaN();
    return v;
  }
  v.statistic = min_value;
  if (min_value >= margin) {
    v.status = Verdict::Status::Holds;
  } else if (min_value <= -margin || max_abs < margin) {
    v.status = Verdict::Status::Fails;
  } else {
    v.status = Verdict::Status::Inconclusive;
  }
  return v;
}

bool ScanReport::any_inconclusive() const {
  const auto inc = [](const Verdict& v) { return v.status == Verdict::Status::Inconclusive; };
  if (inc(a3w) || inc(a3s)) return true;
  return !options.orthogonal_only && (inc(b3w) || inc(b3s));
}

ScanReport mtw_scan(const PotentialSpec& spec, const PhaseDomain& domain, const ScanOptions& opts) {
  domain.validate();
  if (domain.dim != spec.dim()) throw InputError("scan domain dimension does not match the potential");
  if (opts.n_samples < 1) throw InputError("scan needs at least one sample");
  if (!(opts.margin >= 0.0)) throw InputError("verdict margin must be non-negative");
  if (opts.fd) opts.fd->validate();
  opts.cfg.integrator.validate();

  const int n = spec.dim();
  ScanReport report;
  report.domain = domain;
  report.options = opts;
  report.n_samples = opts.n_samples;
  report.samples.resize(opts.n_samples);

  parallel_for(opts.n_samples, opts.workers, [&](int i) {
    CurvatureSample& s = report.samples[i];
    s.index = i;
    s.method = opts.method;
    auto rng = sample_rng(opts.seed, static_cast<std::uint64_t>(i));
    sample_phase_point(domain, rng, s.x, s.v);
    s.u = random_unit_vector(n, rng);
    s.w = random_unit_vector(n, rng);
    s.orthogonal = opts.orthogonal_only || (i % 2 == 1);
    if (s.orthogonal) s.w = orthogonalize(s.w, s.u);
    const FDScheme fd = opts.fd ? *opts.fd : FDScheme::defaults(s.v, s.w, opts.method);
    try {
      const CurvatureResult r = cross_curvature(opts.method, spec, s.x, s.u, s.v, s.w, fd, opts.cfg);
      s.value = r.value;
      s.error_estimate = r.error_estimate;
      s.condition_number = r.condition_number;
    } catch (const ConjugatePointError& e) {
      s.excluded = true;
      s.reason = std::string("conjugate: ") + e.what();
    } catch (const DomainError& e) {
      s.excluded = true;
      s.reason = std::string("domain: ") + e.what();
    } catch (const IntegrationError& e) {
      s.excluded = true;
      s.reason = std::string("integration: ") + e.what();
    } catch (const EvaluationError& e) {
      s.excluded = true;
      s.reason = std::string("evaluation: ") + e.what();
    } catch (const Error& e) {
      throw Error("sample " + std::to_string(i) + ": " + e.what());
    }
  });

  const double inf = std::numeric_limits<double>::infinity();
  double min_mtw = inf, min_cross = inf, max_abs = 0.0, max_abs_orth = 0.0;
  int n_orth_ok = 0, n_ok = 0;
  for (const CurvatureSample& s : report.samples) {
    if (s.orthogonal) ++report.n_orthogonal;
    if (s.excluded) {
      ++report.n_excluded;
      continue;
    }
    ++n_ok;
    max_abs = std::max(max_abs, std::abs(s.value));
    if (s.value < min_cross) {
      min_cross = s.value;
      report.argmin_cross = s.index;
    }
    if (s.orthogonal) {
      ++n_orth_ok;
      max_abs_orth = std::max(max_abs_orth, std::abs(s.value));
      if (s.value < min_mtw) {
        min_mtw = s.value;
        report.argmin_mtw = s.index;
      }
    }
  }
  if (n_ok == 0) {
    throw EmptyScanError("every scan sample was excluded (first reason: " +
                         report.samples.front().reason + ")");
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  report.min_mtw = n_orth_ok > 0 ? min_mtw : nan;
  report.min_cross = min_cross;
  report.max_abs = max_abs;

  report.a3w = weak_verdict(min_mtw, opts.margin, n_orth_ok > 0);
  report.a3s = strong_verdict(min_mtw, max_abs_orth, opts.margin, n_orth_ok > 0);
  report.b3w = weak_verdict(min_cross, opts.margin, true);
  report.b3s = strong_verdict(min_cross, max_abs, opts.margin, true);
  if (opts.orthogonal_only) {
    // Orthogonal triples can refute B3 but never establish it.
    for (Verdict* v : {&report.b3w, &report.b3s}) {
      if (v->status == Verdict::Status::Holds) v->status = Verdict::Status::Inconclusive;
    }
  }
  if (report.n_excluded * 10 > report.n_samples) {
    report.exclusion_stamp = true;
    for (Verdict* v : {&report.a3w, &report.a3s, &report.b3w, &report.b3s}) {
      v->status = Verdict::Status::Inconclusive;
    }
  }
  return report;
}

}  // namespace mtw

#include "mtw/shooting.hpp"

#include <cmath>
#include <optional>
#include <sstream>

#include "mtw/error.hpp"
#include "mtw/sampling.hpp"

namespace mtw {

namespace {

struct Evaluation {
  VariationalFlow vf;
  Vec residual;
  double norm = 0.0;
};

std::optional<Evaluation> evaluate(const PotentialSpec& spec, const Vec& x, const Vec& v,
                                   const Vec& y, double T, const IntegratorConfig& cfg) {
  try {
    Evaluation e{flow_with_variations(spec, {x, v}, T, cfg), Vec(), 0.0};
    e.residual = e.vf.trajectory.final().x - y;
    e.norm = e.residual.norm();
    if (!std::isfinite(e.norm)) return std::nullopt;
    return e;
  } catch (const IntegrationError&) {
    return std::nullopt;
  } catch (const EvaluationError&) {
    return std::nullopt;
  }
}

std::optional<Vec> newton_step(const Evaluation& e) {
  const Mat& N = e.vf.fundamental.N.back();
  Eigen::JacobiSVD<Mat> svd(N, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto sv = svd.singularValues();
  if (!(sv(sv.size() - 1) > 1e-14 * sv(0))) return std::nullopt;
  return Vec(svd.solve(Vec(-e.residual)));
}

struct Attempt {
  Vec v;
  double residual = 0.0;
  int iters = 0;
};

std::optional<Attempt> newton(const PotentialSpec& spec, const Vec& x, const Vec& y, double T,
                              const IntegratorConfig& cfg, const ShootOptions& opts,
                              const Vec& start, double tol) {
  Vec v = start;
  auto current = evaluate(spec, x, v, y, T, cfg);
  if (!current) return std::nullopt;
  int iters = 0;
  while (current->norm > tol) {
    if (iters >= opts.max_iters) return std::nullopt;
    const auto dv = newton_step(*current);
    if (!dv) return std::nullopt;
    bool accepted = false;
    for (double lambda = 1.0; lambda >= 1.0 / 1024.0; lambda *= 0.5) {
      const Vec trial_v = v + lambda * *dv;
      auto trial = evaluate(spec, x, trial_v, y, T, cfg);
      if (trial && trial->norm < current->norm) {
        v = trial_v;
        current = std::move(trial);
        accepted = true;
        break;
      }
    }
    if (!accepted) return std::nullopt;
    ++iters;
  }
  for (int p = 0; p < opts.polish_iters && current->norm > 0.0; ++p) {
    const auto dv = newton_step(*current);
    if (!dv) break;
    const Vec trial_v = v + *dv;
    auto trial = evaluate(spec, x, trial_v, y, T, cfg);
    if (!trial || !(trial->norm < current->norm)) break;
    v = trial_v;
    current = std::move(trial);
  }
  return Attempt{v, current->norm, iters};
}

}  // namespace

ShootResult shoot(const PotentialSpec& spec, const Vec& x, const Vec& y, double T,
                  const IntegratorConfig& cfg, const ShootOptions& opts,
                  std::span<const Vec> starts) {
  cfg.validate();
  if (x.size() != spec.dim() || y.size() != spec.dim()) {
    throw InputError("shooting endpoints do not match the potential dimension");
  }
  if (!x.allFinite() || !y.allFinite()) throw InputError("shooting endpoints must be finite");
  if (!(T > 0.0)) throw InputError("duration T must be positive");
  if (opts.max_iters < 1 || opts.random_starts < 0 || !(opts.tol_scale > 0.0)) {
    throw InputError("invalid shooting options");
  }

  std::vector<Vec> all_starts;
  if (starts.empty()) {
    all_starts.push_back((y - x) / T);
  } else {
    for (const Vec& s : starts) {
      if (s.size() != spec.dim()) throw InputError("shooting start has the wrong dimension");
      all_starts.push_back(s);
    }
  }
  const Vec guess = all_starts.front();
  const double radius = opts.start_spread * std::max(guess.norm(), 1.0 / T);
  std::mt19937_64 rng(opts.seed);
  for (int i = 0; i < opts.random_starts; ++i) {
    all_starts.push_back(guess + random_in_ball(spec.dim(), radius, rng));
  }

  const double tol = opts.tol_scale * (1.0 + y.norm());
  std::optional<Attempt> chosen;
  int converged = 0;
  for (const Vec& start : all_starts) {
    auto attempt = newton(spec, x, y, T, cfg, opts, start, tol);
    if (!attempt) continue;
    ++converged;
    if (!chosen) {
      chosen = std::move(attempt);
      continue;
    }
    const double gap = (attempt->v - chosen->v).norm();
    if (gap > opts.ambiguity_tol * (1.0 + chosen->v.norm())) {
      std::ostringstream os;
      os << "shooting starts converged to distinct initial velocities ("
         << chosen->v.transpose() << ") and (" << attempt->v.transpose()
         << "); the pair is not shooting-regular";
      throw AmbiguityError(os.str());
    }
  }
  if (!chosen) {
    throw NoSolutionError("no shooting start converged within " + std::to_string(opts.max_iters) +
                          " Newton iterations");
  }
  ShootResult result;
  result.v0 = chosen->v;
  result.residual = chosen->residual;
  result.newton_iters = chosen->iters;
  result.converged_starts = converged;
  result.total_starts = static_cast<int>(all_starts.size());
  result.multistart_agreement = true;
  return result;
}

double cost(const PotentialSpec& spec, const Vec& x, const Vec& y, double T,
            const IntegratorConfig& cfg, const ShootOptions& opts) {
  const ShootResult r = shoot(spec, x, y, T, cfg, opts);
  return action(spec, flow(spec, {x, r.v0}, T, cfg));
}

Vec c_exponential(const PotentialSpec& spec, const Vec& x, const Vec& v, double T,
                  const IntegratorConfig& cfg) {
  return flow(spec, {x, v}, T, cfg).final().x;
}

ConjugateScan conjugate_scan(const PotentialSpec& spec, const VariationalFlow& vf, double conj_tol) {
  const FundamentalSolution& fs = vf.fundamental;
  const int K = static_cast<int>(fs.times.size()) - 1;
  ConjugateScan scan;
  scan.times = fs.times;
  scan.min_singular_value_curve.assign(K + 1, 0.0);
  for (int k = 1; k <= K; ++k) scan.min_singular_value_curve[k] = scaled_min_singular(fs.M[k], fs.N[k]);
  const auto& curve = scan.min_singular_value_curve;

  constexpr double kBracketCeiling = 0.25;
  const double golden = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int k = 2; k <= K; ++k) {
    const bool local_min = curve[k] < curve[k - 1] && (k == K || curve[k] <= curve[k + 1]);
    if (!local_min || curve[k] >= kBracketCeiling) continue;

    const detail::VariationalState base = detail::node_state(vf, k - 1);
    const double t0 = fs.times[k - 1];
    auto sigma_at = [&](double t) {
      const detail::VariationalState s = detail::advance(spec, base, t - t0, vf.trajectory.method);
      return scaled_min_singular(s.M, s.N);
    };
    double a = t0;
    double b = fs.times[std::min(k + 1, K)];
    double c = b - golden * (b - a);
    double d = a + golden * (b - a);
    double fc = sigma_at(c);
    double fd = sigma_at(d);
    while (b - a > 1e-10) {
      if (fc < fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - golden * (b - a);
        fc = sigma_at(c);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + golden * (b - a);
        fd = sigma_at(d);
      }
    }
    const double t_star = 0.5 * (a + b);
    if (sigma_at(t_star) < conj_tol) {
      scan.first_conjugate_time = t_star;
      return scan;
    }
  }
  return scan;
}

ConjugateScan conjugate_scan(const PotentialSpec& spec, const Vec& x, const Vec& v, double T,
                             const IntegratorConfig& cfg, double conj_tol) {
  return conjugate_scan(spec, flow_with_variations(spec, {x, v}, T, cfg), conj_tol);
}

}  // namespace mtw

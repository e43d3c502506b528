#include "mtw/perturbation.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "mtw/error.hpp"
#include "mtw/parallel.hpp"

namespace mtw {

namespace {

std::vector<double> simpson_weights(int nodes) {
  std::vector<double> w(nodes);
  for (int k = 0; k < nodes; ++k) w[k] = (k == 0 || k == nodes - 1) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
  return w;
}

// int_0^1 int_0^tau F(t) dt dtau by nested composite Simpson with `nodes`
// (odd) nodes on each axis. F returns Vec or double.
template <typename Value, typename F>
Value nested_simpson(F&& integrand, int nodes, Value zero) {
  const std::vector<double> w = simpson_weights(nodes);
  const double h_outer = 1.0 / (nodes - 1);
  Value outer = zero;
  for (int j = 1; j < nodes; ++j) {
    const double tau = j * h_outer;
    const double h_inner = tau / (nodes - 1);
    Value inner = zero;
    for (int k = 0; k < nodes; ++k) inner += w[k] * integrand(k * h_inner);
    outer += (w[j] * h_inner / 3.0) * inner;
  }
  return (h_outer / 3.0) * outer;
}

void check_vectors(const PotentialSpec& spec, std::initializer_list<const Vec*> vs) {
  for (const Vec* v : vs) {
    if (v->size() != spec.dim() || !v->allFinite()) {
      throw InputError("perturbation inputs must be finite and match the potential dimension");
    }
  }
}

// Richardson estimate of the fine rule's error from one halving.
template <typename Value>
void check_agreement(const Value& fine, const Value& coarse, const char* what) {
  double gap;
  if constexpr (std::is_same_v<Value, double>) {
    gap = std::abs(fine - coarse);
  } else {
    gap = (fine - coarse).cwiseAbs().maxCoeff();
  }
  const double estimate = gap / 15.0;
  if (!(estimate <= 1e-8)) {
    std::ostringstream os;
    os << what << ": Simpson error estimate " << estimate << " exceeds 1e-8";
    throw AccuracyError(os.str());
  }
}

}  // namespace

Vec perturb_response(const PotentialSpec& spec, const Vec& x, const Vec& v, const Vec& u) {
  check_vectors(spec, {&x, &v, &u});
  auto integrand = [&](double t) { return Vec((1.0 - t) * (hess(spec, Vec(x + t * v)) * u)); };
  const Vec zero = Vec::Zero(spec.dim());
  const Vec fine = nested_simpson<Vec>(integrand, kPerturbationNodes, zero);
  const Vec coarse = nested_simpson<Vec>(integrand, (kPerturbationNodes + 1) / 2, zero);
  check_agreement(fine, coarse, "perturb_response");
  return fine;
}

double perturbation_integral(const PotentialSpec& spec, const Vec& x, const Vec& v, const Vec& u,
                             const Vec& w) {
  check_vectors(spec, {&x, &v, &u, &w});
  auto integrand = [&](double t) {
    const Mat D = hess_second_directional(spec, Vec(x + t * v), Vec(t * w));
    return (1.0 - t) * u.dot(D * u);
  };
  const double fine = nested_simpson<double>(integrand, kPerturbationNodes, 0.0);
  const double coarse = nested_simpson<double>(integrand, (kPerturbationNodes + 1) / 2, 0.0);
  check_agreement(fine, coarse, "perturbation_integral");
  return fine;
}

double radial_integrand(std::span<const double> f_coeffs, const Vec& x, const Vec& v,
                        const Vec& u, const Vec& w, double t) {
  const auto n = x.size();
  if (v.size() != n || u.size() != n || w.size() != n) {
    throw InputError("radial_integrand inputs have mismatched dimensions");
  }
  if (std::abs(u.norm() - 1.0) > 1e-9 || std::abs(w.norm() - 1.0) > 1e-9) {
    throw InputError("radial_integrand needs unit vectors u and w");
  }
  if (std::abs(u.dot(w)) > 1e-12) throw InputError("radial_integrand needs u orthogonal to w");
  const Vec p = x + t * v;
  const RadialDerivatives d = radial_derivatives(f_coeffs, 0.5 * p.squaredNorm());
  const double pw = t * p.dot(w);
  const double pu = p.dot(u);
  const double ptu = t * pu;
  return t * t * d.f2 + (pw * pw + ptu * ptu) * d.f3 + pw * pw * pu * pu * d.f4;
}

PerturbationCheck perturbation_check(const PotentialSpec& spec, const PhaseDomain& domain,
                                     double C_required, int n_samples, bool orthogonal_only,
                                     std::uint64_t seed, int workers) {
  domain.validate();
  if (domain.dim != spec.dim()) throw InputError("domain dimension does not match the potential");
  if (n_samples < 1) throw InputError("perturbation check needs at least one sample");
  if (!(C_required > 0.0)) throw InputError("C_required must be positive");

  const int n = spec.dim();
  PerturbationCheck check;
  check.domain = domain;
  check.C_required = C_required;
  check.orthogonal_only = orthogonal_only;
  check.seed = seed;
  check.samples.resize(n_samples);
  parallel_for(n_samples, workers, [&](int i) {
    PerturbationSample& s = check.samples[i];
    s.index = i;
    auto rng = sample_rng(seed, static_cast<std::uint64_t>(i));
    sample_phase_point(domain, rng, s.x, s.v);
    s.u = random_unit_vector(n, rng);
    s.w = random_unit_vector(n, rng);
    s.orthogonal = orthogonal_only;
    if (orthogonal_only) s.w = orthogonalize(s.w, s.u);
    try {
      s.integral = perturbation_integral(spec, s.x, s.v, s.u, s.w);
    } catch (const Error& e) {
      throw Error("sample " + std::to_string(i) + ": " + e.what());
    }
  });

  check.min_integral = std::numeric_limits<double>::infinity();
  for (const PerturbationSample& s : check.samples) {
    if (s.integral < check.min_integral) {
      check.min_integral = s.integral;
      check.argmin = s.index;
    }
  }
  check.margin = check.min_integral - C_required;
  check.holds = check.min_integral >= C_required;
  return check;
}

RadialCheck radial_condition_check(std::span<const double> f_coeffs, const PhaseDomain& domain,
                                   double C_required, int n_samples, std::uint64_t seed,
                                   int t_nodes) {
  domain.validate();
  if (f_coeffs.empty()) throw InputError("radial check needs at least one coefficient");
  if (n_samples < 1) throw InputError("radial check needs at least one sample");
  if (!(C_required > 0.0)) throw InputError("C_required must be positive");
  if (t_nodes < 64) throw InputError("radial check needs at least 64 t-nodes");

  RadialCheck check;
  check.f_coeffs.assign(f_coeffs.begin(), f_coeffs.end());
  check.domain = domain;
  check.C_required = C_required;
  check.n_samples = n_samples;
  check.t_nodes = t_nodes;
  check.seed = seed;
  const double inf = std::numeric_limits<double>::infinity();
  check.min_f2 = check.min_f3 = check.min_f4 = inf;
  Vec x, v;
  for (int i = 0; i < n_samples; ++i) {
    auto rng = sample_rng(seed, static_cast<std::uint64_t>(i));
    sample_phase_point(domain, rng, x, v);
    for (int j = 0; j < t_nodes; ++j) {
      const double t = static_cast<double>(j) / (t_nodes - 1);
      const RadialDerivatives d = radial_derivatives(f_coeffs, 0.5 * (x + t * v).squaredNorm());
      check.min_f2 = std::min(check.min_f2, d.f2);
      check.min_f3 = std::min(check.min_f3, d.f3);
      check.min_f4 = std::min(check.min_f4, d.f4);
    }
  }
  check.holds = check.min_f2 >= C_required && check.min_f3 >= -1e-12 && check.min_f4 >= -1e-12;
  return check;
}

EpsTable small_eps_oracle(const PotentialSpec& base, std::span<const double> eps_list,
                          const Vec& x, const Vec& u, const Vec& v, const Vec& w,
                          const FDScheme& fd, const CurvatureConfig& cfg) {
  if (eps_list.empty()) throw InputError("eps list is empty");
  for (std::size_t i = 0; i < eps_list.size(); ++i) {
    if (!(eps_list[i] > 0.0)) throw InputError("eps values must be positive");
    if (i > 0 && !(eps_list[i] < eps_list[i - 1])) throw InputError("eps values must decrease");
  }
  fd.validate();

  EpsTable table;
  // 3/2 d^2/ds^2 <u, X'(0)> along v + s w, central differences with Richardson.
  auto phi = [&](double s) { return u.dot(perturb_response(base, x, Vec(v + s * w), u)); };
  const double phi0 = phi(0.0);
  std::vector<std::vector<double>> R;
  double h = fd.h_s;
  for (int k = 0; k < fd.richardson_levels; ++k, h *= 0.5) {
    R.emplace_back(k + 1);
    R[k][0] = ((phi(h) + phi(-h)) - 2.0 * phi0) / (h * h);
    double factor = 1.0;
    for (int j = 1; j <= k; ++j) {
      factor *= 4.0;
      R[k][j] = R[k][j - 1] + (R[k][j - 1] - R[k - 1][j - 1]) / (factor - 1.0);
    }
  }
  table.limit = 1.5 * R.back().back();

  for (double eps : eps_list) {
    EpsRow row;
    row.eps = eps;
    row.curvature = cross_curvature_jacobi(scaled(base, eps), x, u, v, w, fd, cfg).value;
    row.ratio = row.curvature / eps;
    const double gap = std::abs(row.ratio - table.limit);
    row.relative_gap = table.limit != 0.0 ? gap / std::abs(table.limit) : gap;
    table.rows.push_back(row);
  }
  if (table.rows.size() >= 2) {
    const EpsRow& a = table.rows[table.rows.size() - 2];
    const EpsRow& b = table.rows.back();
    table.extrapolated_limit = (a.eps * b.ratio - b.eps * a.ratio) / (a.eps - b.eps);
  } else {
    table.extrapolated_limit = table.rows.front().ratio;
  }
  return table;
}

}  // namespace mtw

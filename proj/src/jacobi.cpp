#include "mtw/jacobi.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mtw/error.hpp"
#include "stepper.hpp"

namespace mtw {

namespace {

VariationalFlow integrate_variational(const PotentialSpec& spec, const PhasePoint& p0, double T,
                                      int steps, IntegratorMethod method) {
  detail::check_start(spec, p0, T);
  const int n = spec.dim();
  const double dt = T / steps;

  VariationalFlow out;
  Trajectory& traj = out.trajectory;
  FundamentalSolution& fs = out.fundamental;
  traj.method = method;
  traj.times.resize(steps + 1);
  traj.states.resize(steps + 1);
  traj.energies.resize(steps + 1);
  fs.M.resize(steps + 1);
  fs.N.resize(steps + 1);
  fs.Mdot.resize(steps + 1);
  fs.Ndot.resize(steps + 1);

  detail::VariationalState s;
  s.x = p0.x;
  s.v = p0.v;
  s.M = Mat::Identity(n, n);
  s.N = Mat::Zero(n, n);
  s.Mdot = Mat::Zero(n, n);
  s.Ndot = Mat::Identity(n, n);

  auto record = [&](int k, double t) {
    traj.times[k] = t;
    traj.states[k] = {s.x, s.v};
    traj.energies[k] = detail::energy(spec, s.x, s.v);
    fs.M[k] = s.M;
    fs.N[k] = s.N;
    fs.Mdot[k] = s.Mdot;
    fs.Ndot[k] = s.Ndot;
  };
  record(0, 0.0);
  for (int k = 1; k <= steps; ++k) {
    detail::step<true>(spec, s, dt, method);
    if (!s.x.allFinite() || !s.v.allFinite() || !s.M.allFinite() || !s.N.allFinite()) {
      throw IntegrationError("variational flow left the finite range at step " + std::to_string(k));
    }
    record(k, (k == steps) ? T : k * dt);
  }
  fs.times = traj.times;
  return out;
}

Eigen::JacobiSVD<Mat> singular_values_of(const Mat& A) { return Eigen::JacobiSVD<Mat>(A); }

}  // namespace

VariationalFlow flow_with_variations(const PotentialSpec& spec, const PhasePoint& p0, double T,
                                     const IntegratorConfig& cfg) {
  cfg.validate();
  VariationalFlow vf = integrate_variational(spec, p0, T, cfg.steps, cfg.method);
  detail::check_energy(vf.trajectory, cfg.energy_tol);
  return vf;
}

FundamentalSolution propagate_fundamental(const PotentialSpec& spec, const Trajectory& traj) {
  if (traj.times.size() < 17) throw InputError("trajectory needs at least 16 steps");
  VariationalFlow vf =
      integrate_variational(spec, traj.initial(), traj.duration(), traj.steps(), traj.method);
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    const double scale = 1.0 + traj.states[k].x.norm() + traj.states[k].v.norm();
    const double gap = (vf.trajectory.states[k].x - traj.states[k].x).norm() +
                       (vf.trajectory.states[k].v - traj.states[k].v).norm();
    if (!(gap <= 1e-12 * scale)) {
      throw InputError("trajectory was not produced by this potential on its own grid");
    }
  }
  const double defect = symplectic_defect(vf.fundamental);
  if (!(defect <= 1e-6)) {
    std::ostringstream os;
    os << "fundamental solution violates M^T N' - M'^T N = I by " << defect;
    throw IntegrationError(os.str());
  }
  return std::move(vf.fundamental);
}

double symplectic_defect(const FundamentalSolution& fs) {
  double worst = 0.0;
  for (std::size_t k = 0; k < fs.M.size(); ++k) {
    Mat W = fs.M[k].transpose() * fs.Ndot[k] - fs.Mdot[k].transpose() * fs.N[k];
    W.diagonal().array() -= 1.0;
    worst = std::max(worst, W.cwiseAbs().maxCoeff());
  }
  return worst;
}

double scaled_min_singular(const Mat& M, const Mat& N) {
  const auto sn = singular_values_of(N).singularValues();
  const auto sm = singular_values_of(M).singularValues();
  const double scale = std::max({1.0, sn(0), sm(0)});
  return sn(sn.size() - 1) / scale;
}

JacobiMapResult jacobi_map(const FundamentalSolution& fs, const Vec& u, double conj_tol) {
  const Mat& M = fs.M.back();
  const Mat& N = fs.N.back();
  if (u.size() != N.rows()) throw InputError("u has the wrong dimension");
  if (scaled_min_singular(M, N) <= conj_tol) {
    throw ConjugatePointError("endpoint is conjugate to the start: N(T) is singular");
  }
  Eigen::JacobiSVD<Mat> svd(N, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto sv = svd.singularValues();
  JacobiMapResult out;
  out.value = svd.solve(Vec(-(M * u)));
  out.condition_number = sv(0) / sv(sv.size() - 1);
  return out;
}

JacobiMapResult jacobi_map(const PotentialSpec& spec, const Vec& x, const Vec& v, const Vec& u,
                           double T, const IntegratorConfig& cfg, double conj_tol) {
  const VariationalFlow vf = flow_with_variations(spec, {x, v}, T, cfg);
  return jacobi_map(vf.fundamental, u, conj_tol);
}

namespace detail {

VariationalState node_state(const VariationalFlow& vf, int k) {
  VariationalState s;
  s.x = vf.trajectory.states[k].x;
  s.v = vf.trajectory.states[k].v;
  s.M = vf.fundamental.M[k];
  s.N = vf.fundamental.N[k];
  s.Mdot = vf.fundamental.Mdot[k];
  s.Ndot = vf.fundamental.Ndot[k];
  return s;
}

VariationalState advance(const PotentialSpec& spec, const VariationalState& s, double dt,
                         IntegratorMethod method) {
  VariationalState out = s;
  step<true>(spec, out, dt, method);
  return out;
}

}  // namespace detail

}  // namespace mtw

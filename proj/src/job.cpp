#include "mtw/job.hpp"

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "mtw/error.hpp"
#include "mtw/report.hpp"
#include "mtw/shooting.hpp"

namespace mtw {

using nlohmann::json;

namespace {

const std::set<std::string> kCommands = {"cost",          "curvature",    "scan",
                                         "conjugate",     "perturb-check", "radial-check",
                                         "harmonic-verify", "eps-sweep"};

const std::set<std::string> kKeys = {
    "command", "potential",  "domain", "n_samples", "seed",     "orthogonal_only",
    "margin",  "method",     "fd",     "integrator", "T",       "conj_tol",
    "C_required", "t_nodes", "eps",    "x",         "y",        "u",
    "v",       "w",          "workers", "output",    "stencil_multistart"};

bool is_sampling(const std::string& c) {
  return c == "scan" || c == "perturb-check" || c == "radial-check" || c == "harmonic-verify";
}

Vec vec_from_json(const json& j) {
  if (!j.is_array() || j.empty() || j.size() > static_cast<std::size_t>(kMaxDim)) {
    throw InputError("expected an array of 1 to " + std::to_string(kMaxDim) + " numbers");
  }
  Vec v(static_cast<int>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw InputError("expected numbers");
    v[static_cast<int>(i)] = j[i].get<double>();
  }
  return v;
}

Mat mat_from_json(const json& j) {
  if (!j.is_array() || j.empty() || j.size() > static_cast<std::size_t>(kMaxDim)) {
    throw InputError("A must be a non-empty array of rows");
  }
  const int n = static_cast<int>(j.size());
  Mat A(n, n);
  for (int r = 0; r < n; ++r) {
    const Vec row = vec_from_json(j[r]);
    if (row.size() != n) throw InputError("A must be square");
    A.row(r) = row.transpose();
  }
  return A;
}

json vec_to_json(const Vec& v) {
  json j = json::array();
  for (int i = 0; i < v.size(); ++i) j.push_back(v[i]);
  return j;
}

double number(const json& j, const char* field) {
  if (!j.is_number()) throw InputError(std::string(field) + " must be a number");
  return j.get<double>();
}

// Collects diagnostics while filling a JobConfig.
class Parser {
 public:
  Parser(const json& doc, JobConfig& cfg) : doc_(doc), cfg_(cfg) {}

  std::vector<Diagnostic> run() {
    if (!doc_.is_object()) {
      add("config", "must be a JSON object");
      return diags_;
    }
    for (const auto& [key, value] : doc_.items()) {
      if (!kKeys.count(key)) add(key, "is not a recognised field");
    }
    if (!doc_.contains("command") || !doc_["command"].is_string()) {
      add("command", "required");
      return diags_;
    }
    cfg_.command = doc_["command"].get<std::string>();
    if (!kCommands.count(cfg_.command)) {
      add("command", "must be one of cost, curvature, scan, conjugate, perturb-check, "
                     "radial-check, harmonic-verify, eps-sweep");
      return diags_;
    }
    cfg_.echo = doc_.dump();
    const std::string& c = cfg_.command;

    potential();
    const int dim = cfg_.potential ? cfg_.potential->dim() : 0;

    integer("n_samples", cfg_.n_samples, 1);
    integer("workers", cfg_.workers, 0);
    integer("t_nodes", cfg_.t_nodes, 64);
    boolean("orthogonal_only", cfg_.orthogonal_only, c == "perturb-check");
    boolean("stencil_multistart", cfg_.curvature.stencil_multistart, false);
    positive_or_zero("margin", cfg_.margin);
    positive("T", cfg_.curvature.T);
    positive_or_zero("conj_tol", cfg_.curvature.conj_tol);
    seed(is_sampling(c));
    method();
    fd();
    integrator();
    outputs();

    if (c == "perturb-check" || c == "radial-check") {
      if (!doc_.contains("C_required")) {
        add("C_required", "required");
      } else if (!doc_["C_required"].is_number() || !(doc_["C_required"].get<double>() > 0.0)) {
        add("C_required", "must be a positive number");
      } else {
        cfg_.C_required = doc_["C_required"].get<double>();
      }
    }

    if (c == "cost") {
      vector("x", cfg_.x, dim, true);
      vector("y", cfg_.y, dim, true);
    } else if (c == "conjugate") {
      vector("x", cfg_.x, dim, true);
      vector("v", cfg_.v, dim, true);
    } else if (c == "curvature" || c == "eps-sweep") {
      vector("x", cfg_.x, dim, true);
      vector("u", cfg_.u, dim, true);
      vector("v", cfg_.v, dim, true);
      vector("w", cfg_.w, dim, true);
    }
    if (c == "eps-sweep") eps_list();

    if (is_sampling(c)) domain(dim, c == "harmonic-verify");
    if (c == "radial-check" && cfg_.potential &&
        cfg_.potential->kind() != PotentialKind::Radial) {
      add("potential", "must be radial for radial-check");
    }
    if (c == "harmonic-verify" && cfg_.potential) harmonic_potential();
    return diags_;
  }

 private:
  void add(std::string field, std::string reason) {
    diags_.push_back({std::move(field), std::move(reason)});
  }

  void potential() {
    if (!doc_.contains("potential")) {
      add("potential", "required");
      return;
    }
    try {
      cfg_.potential = potential_from_json(doc_["potential"]);
    } catch (const std::exception& e) {
      add("potential", e.what());
    }
  }

  void integer(const char* key, int& out, int min) {
    if (!doc_.contains(key)) return;
    const json& j = doc_[key];
    if (!j.is_number_integer() || j.get<long long>() < min) {
      add(key, "must be an integer >= " + std::to_string(min));
      return;
    }
    out = j.get<int>();
  }

  void boolean(const char* key, bool& out, bool fallback) {
    out = fallback;
    if (!doc_.contains(key)) return;
    if (!doc_[key].is_boolean()) {
      add(key, "must be true or false");
      return;
    }
    out = doc_[key].get<bool>();
  }

  void positive(const char* key, double& out) {
    if (!doc_.contains(key)) return;
    if (!doc_[key].is_number() || !(doc_[key].get<double>() > 0.0)) {
      add(key, "must be a positive number");
      return;
    }
    out = doc_[key].get<double>();
  }

  void positive_or_zero(const char* key, double& out) {
    if (!doc_.contains(key)) return;
    if (!doc_[key].is_number() || !(doc_[key].get<double>() >= 0.0)) {
      add(key, "must be a non-negative number");
      return;
    }
    out = doc_[key].get<double>();
  }

  void seed(bool required) {
    if (!doc_.contains("seed")) {
      if (required) add("seed", "required");
      return;
    }
    const json& j = doc_["seed"];
    if (!j.is_number_unsigned()) {
      add("seed", "must be a non-negative integer");
      return;
    }
    cfg_.seed = j.get<std::uint64_t>();
  }

  void method() {
    if (!doc_.contains("method")) return;
    try {
      cfg_.method = curvature_method_from_string(doc_["method"].get<std::string>());
    } catch (const std::exception&) {
      add("method", "must be jacobi or direct");
    }
  }

  void fd() {
    if (!doc_.contains("fd")) return;
    const json& j = doc_["fd"];
    try {
      FDScheme s;
      if (!j.is_object()) throw InputError("must be an object");
      if (j.contains("h_s")) s.h_s = number(j["h_s"], "h_s");
      if (j.contains("h_t")) s.h_t = number(j["h_t"], "h_t");
      if (j.contains("richardson_levels")) {
        if (!j["richardson_levels"].is_number_integer()) {
          throw InputError("richardson_levels must be an integer");
        }
        s.richardson_levels = j["richardson_levels"].get<int>();
      }
      s.validate();
      cfg_.fd = s;
    } catch (const std::exception& e) {
      add("fd", e.what());
    }
  }

  void integrator() {
    IntegratorConfig& ic = cfg_.curvature.integrator;
    if (!doc_.contains("integrator")) {
      ic = IntegratorConfig::for_duration(cfg_.curvature.T);
      return;
    }
    const json& j = doc_["integrator"];
    try {
      if (!j.is_object()) throw InputError("must be an object");
      ic = IntegratorConfig::for_duration(cfg_.curvature.T);
      if (j.contains("steps")) {
        if (!j["steps"].is_number_integer()) throw InputError("steps must be an integer");
        ic.steps = j["steps"].get<int>();
      }
      if (j.contains("method")) {
        const std::string m = j["method"].get<std::string>();
        if (m == "rk4") {
          ic.method = IntegratorMethod::RK4;
        } else if (m == "leapfrog") {
          ic.method = IntegratorMethod::Leapfrog;
        } else {
          throw InputError("method must be rk4 or leapfrog");
        }
      }
      if (j.contains("energy_tol")) ic.energy_tol = number(j["energy_tol"], "energy_tol");
      ic.validate();
    } catch (const std::exception& e) {
      add("integrator", e.what());
    }
  }

  void writable(const char* field, const std::string& path) {
    namespace fs = std::filesystem;
    fs::path parent = fs::path(path).parent_path();
    if (parent.empty()) parent = ".";
    std::error_code ec;
    if (!fs::is_directory(parent, ec)) {
      add(field, "directory " + parent.string() + " does not exist");
    } else if (::access(parent.c_str(), W_OK) != 0) {
      add(field, "directory " + parent.string() + " is not writable");
    } else if (fs::exists(path, ec) && ::access(path.c_str(), W_OK) != 0) {
      add(field, path + " is not writable");
    }
  }

  void outputs() {
    if (!doc_.contains("output")) return;
    const json& j = doc_["output"];
    if (!j.is_object()) {
      add("output", "must be an object with csv and summary paths");
      return;
    }
    for (const char* key : {"csv", "summary"}) {
      if (!j.contains(key)) continue;
      const std::string field = std::string("output.") + key;
      if (!j[key].is_string() || j[key].get<std::string>().empty()) {
        add(field, "must be a non-empty path");
        continue;
      }
      const std::string path = j[key].get<std::string>();
      writable(field.c_str(), path);
      (std::string(key) == "csv" ? cfg_.csv_path : cfg_.summary_path) = path;
    }
  }

  void vector(const char* key, Vec& out, int dim, bool required) {
    if (!doc_.contains(key)) {
      if (required) add(key, "required");
      return;
    }
    try {
      out = vec_from_json(doc_[key]);
      if (dim > 0 && out.size() != dim) {
        add(key, "must have " + std::to_string(dim) + " components to match the potential");
      }
    } catch (const std::exception& e) {
      add(key, e.what());
    }
  }

  void eps_list() {
    if (!doc_.contains("eps")) {
      add("eps", "required");
      return;
    }
    const json& j = doc_["eps"];
    if (!j.is_array() || j.empty()) {
      add("eps", "must be a non-empty array");
      return;
    }
    for (std::size_t i = 0; i < j.size(); ++i) {
      if (!j[i].is_number() || !(j[i].get<double>() > 0.0) ||
          (i > 0 && !(j[i].get<double>() < j[i - 1].get<double>()))) {
        add("eps", "must be positive and strictly decreasing");
        return;
      }
      cfg_.eps.push_back(j[i].get<double>());
    }
  }

  void domain(int dim, bool optional) {
    if (!doc_.contains("domain")) {
      if (optional && dim > 0) {
        cfg_.domain = PhaseDomain::product(dim, 1.0, 1.0);
      } else if (!optional) {
        add("domain", "required");
      }
      return;
    }
    const json& j = doc_["domain"];
    try {
      if (!j.is_object()) throw InputError("must be an object");
      const std::string shape = j.value("shape", std::string("product"));
      const int d = j.contains("dim") ? j["dim"].get<int>() : dim;
      PhaseDomain dom;
      if (shape == "product") {
        dom = PhaseDomain::product(d, j.contains("x_radius") ? number(j["x_radius"], "x_radius") : 1.0,
                                   j.contains("v_radius") ? number(j["v_radius"], "v_radius") : 1.0);
        if (j.contains("x_inner_radius")) {
          dom.x_inner_radius = number(j["x_inner_radius"], "x_inner_radius");
        }
      } else if (shape == "sum") {
        if (!j.contains("radius")) throw InputError("radius required for shape sum");
        dom = PhaseDomain::sum(d, number(j["radius"], "radius"));
      } else {
        throw InputError("shape must be product or sum");
      }
      dom.validate();
      if (dim > 0 && dom.dim != dim) throw InputError("dim does not match the potential");
      cfg_.domain = dom;
    } catch (const std::exception& e) {
      add("domain", e.what());
    }
  }

  void harmonic_potential() {
    const PotentialSpec& p = *cfg_.potential;
    if (p.kind() == PotentialKind::Zero) return;
    if (p.kind() != PotentialKind::Quadratic) {
      add("potential", "must be zero or quadratic for harmonic-verify");
      return;
    }
    Eigen::SelfAdjointEigenSolver<Mat> eig(p.matrix());
    if (eig.eigenvalues().maxCoeff() > 1e-12) {
      add("potential", "harmonic-verify needs A <= 0 (repulsive oscillator)");
    }
  }

  const json& doc_;
  JobConfig& cfg_;
  std::vector<Diagnostic> diags_;
};

struct Outcome {
  std::string csv;
  std::string summary;
  int status = 0;
};

std::string vec_text(const Vec& v) {
  std::string s = "(";
  for (int i = 0; i < v.size(); ++i) s += (i ? ", " : "") + format_double(v[i]);
  return s + ")";
}

void csv_header(std::ostringstream& os, const char* tag, const std::string& echo) {
  os << kCsvVersionLine << '\n' << "# " << tag << '\n' << "# config: " << echo << '\n';
}

void columns(std::ostringstream& os, const char* name, int n) {
  for (int i = 1; i <= n; ++i) os << ',' << name << '_' << i;
}

void cells(std::ostringstream& os, const Vec& v) {
  for (int i = 0; i < v.size(); ++i) os << ',' << format_double(v[i]);
}

ScanOptions scan_options(const JobConfig& c) {
  ScanOptions o;
  o.n_samples = c.n_samples;
  o.orthogonal_only = c.orthogonal_only;
  o.margin = c.margin;
  o.seed = *c.seed;
  o.method = c.method;
  o.fd = c.fd;
  o.cfg = c.curvature;
  o.workers = c.workers;
  return o;
}

Outcome run_cost(const JobConfig& c) {
  const PotentialSpec& p = *c.potential;
  const double T = c.curvature.T;
  const ShootResult r = shoot(p, c.x, c.y, T, c.curvature.integrator, c.curvature.shoot);
  const double value = action(p, flow(p, {c.x, r.v0}, T, c.curvature.integrator));
  std::ostringstream csv, sum;
  csv_header(csv, "cost", c.echo);
  const int n = p.dim();
  csv << "T";
  columns(csv, "x", n);
  columns(csv, "y", n);
  columns(csv, "v0", n);
  csv << ",cost,residual\n" << format_double(T);
  cells(csv, c.x);
  cells(csv, c.y);
  cells(csv, r.v0);
  csv << ',' << format_double(value) << ',' << format_double(r.residual) << '\n';
  sum << "cost = " << format_double(value) << '\n'
      << "initial velocity = " << vec_text(r.v0) << ", residual = " << format_double(r.residual)
      << ", " << r.converged_starts << " of " << r.total_starts << " starts converged\n";
  return {csv.str(), sum.str(), 0};
}

Outcome run_curvature(const JobConfig& c) {
  const FDScheme fd = c.fd ? *c.fd : FDScheme::defaults(c.v, c.w, c.method);
  const CurvatureResult r =
      cross_curvature(c.method, *c.potential, c.x, c.u, c.v, c.w, fd, c.curvature);
  std::ostringstream csv, sum;
  csv_header(csv, "curvature", c.echo);
  const int n = c.potential->dim();
  csv << "method";
  columns(csv, "x", n);
  columns(csv, "u", n);
  columns(csv, "v", n);
  columns(csv, "w", n);
  csv << ",value,error_estimate,condition_number\n" << to_string(c.method);
  cells(csv, c.x);
  cells(csv, c.u);
  cells(csv, c.v);
  cells(csv, c.w);
  csv << ',' << format_double(r.value) << ',' << format_double(r.error_estimate) << ','
      << format_double(r.condition_number) << '\n';
  sum << "cross-curvature (" << to_string(c.method) << ") = " << format_double(r.value)
      << ", error estimate = " << format_double(r.error_estimate)
      << ", cond N(T) = " << format_double(r.condition_number) << '\n';
  return {csv.str(), sum.str(), 0};
}

Outcome run_scan(const JobConfig& c) {
  const ScanReport report = mtw_scan(*c.potential, *c.domain, scan_options(c));
  std::ostringstream csv, sum;
  write_scan_csv(csv, report, c.echo);
  write_scan_summary(sum, report);
  return {csv.str(), sum.str(), report.any_inconclusive() ? 2 : 0};
}

Outcome run_harmonic(const JobConfig& c) {
  const ScanReport report = mtw_scan(*c.potential, *c.domain, scan_options(c));
  const bool jacobi = c.method == CurvatureMethod::Jacobi;
  const double bound = jacobi ? 1e-6 : 1e-4;
  const char* bound_text = jacobi ? "1e-6" : "1e-4";
  std::ostringstream csv, sum;
  write_scan_csv(csv, report, c.echo);
  const bool vanishes = report.max_abs <= bound;
  sum << "max |C| = " << format_double(report.max_abs) << (vanishes ? " ≤ " : " > ")
      << bound_text << '\n'
      << "harmonic vanishing: " << (vanishes ? "holds" : "fails") << " over "
      << report.n_samples - report.n_excluded << " samples (" << report.n_excluded
      << " excluded)\n";
  write_scan_summary(sum, report);
  int status = 0;
  if (!vanishes) {
    status = 1;
  } else if (report.exclusion_stamp) {
    status = 2;
  }
  return {csv.str(), sum.str(), status};
}

Outcome run_conjugate(const JobConfig& c) {
  const ConjugateScan scan =
      conjugate_scan(*c.potential, c.x, c.v, c.curvature.T, c.curvature.integrator,
                     c.curvature.conj_tol);
  std::ostringstream csv, sum;
  csv_header(csv, "conjugate", c.echo);
  csv << "t,scaled_min_singular_value\n";
  for (std::size_t k = 0; k < scan.times.size(); ++k) {
    csv << format_double(scan.times[k]) << ',' << format_double(scan.min_singular_value_curve[k])
        << '\n';
  }
  if (scan.first_conjugate_time) {
    sum << "first conjugate time = " << format_double(*scan.first_conjugate_time) << '\n';
  } else {
    sum << "no conjugate point on (0, " << format_double(c.curvature.T) << "]\n";
  }
  return {csv.str(), sum.str(), 0};
}

Outcome run_perturb(const JobConfig& c) {
  const PerturbationCheck check = perturbation_check(
      *c.potential, *c.domain, c.C_required, c.n_samples, c.orthogonal_only, *c.seed, c.workers);
  std::ostringstream csv, sum;
  write_perturbation_csv(csv, check, c.echo);
  write_perturbation_summary(sum, check);
  return {csv.str(), sum.str(), 0};
}

Outcome run_radial(const JobConfig& c) {
  const RadialCheck check = radial_condition_check(c.potential->f_coeffs(), *c.domain,
                                                   c.C_required, c.n_samples, *c.seed, c.t_nodes);
  std::ostringstream csv, sum;
  write_radial_csv(csv, check, c.echo);
  write_radial_summary(sum, check);
  return {csv.str(), sum.str(), 0};
}

Outcome run_eps(const JobConfig& c) {
  const FDScheme fd = c.fd ? *c.fd : FDScheme::defaults(c.v, c.w);
  const EpsTable table =
      small_eps_oracle(*c.potential, c.eps, c.x, c.u, c.v, c.w, fd, c.curvature);
  std::ostringstream csv, sum;
  write_eps_csv(csv, table, c.echo);
  write_eps_summary(sum, table);
  return {csv.str(), sum.str(), 0};
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw InputError("cannot open " + path + " for writing");
  f << text;
  if (!f.flush()) throw InputError("failed writing " + path);
}

}  // namespace

std::string Diagnostic::message() const { return field + " " + reason; }

PotentialSpec potential_from_json(const json& j) {
  if (!j.is_object()) throw InputError("must be an object with a kind tag");
  if (!j.contains("kind") || !j["kind"].is_string()) throw InputError("kind tag required");
  const PotentialKind kind = potential_kind_from_string(j["kind"].get<std::string>());
  auto dim = [&] {
    if (!j.contains("dim") || !j["dim"].is_number_integer()) throw InputError("dim required");
    return j["dim"].get<int>();
  };
  std::optional<PotentialSpec> spec;
  switch (kind) {
    case PotentialKind::Zero:
      spec = PotentialSpec::zero(dim());
      break;
    case PotentialKind::Quadratic:
      if (!j.contains("A")) throw InputError("A required for a quadratic potential");
      spec = PotentialSpec::quadratic(mat_from_json(j["A"]));
      break;
    case PotentialKind::Radial: {
      if (!j.contains("f") || !j["f"].is_array()) throw InputError("f coefficients required");
      std::vector<double> f;
      for (const json& c : j["f"]) f.push_back(number(c, "f"));
      spec = PotentialSpec::radial(dim(), std::move(f));
      break;
    }
    case PotentialKind::BlackBox: {
      if (!j.contains("of")) {
        throw InputError("black_box needs an analytic potential under \"of\" to evaluate");
      }
      const double step = j.contains("fd_step") ? number(j["fd_step"], "fd_step") : 1e-3;
      spec = PotentialSpec::black_box_of(potential_from_json(j["of"]), step);
      break;
    }
  }
  if (j.contains("eps")) spec = scaled(*spec, number(j["eps"], "eps"));
  return *spec;
}

json potential_to_json(const PotentialSpec& spec) {
  json j;
  j["kind"] = to_string(spec.kind());
  j["dim"] = spec.dim();
  switch (spec.kind()) {
    case PotentialKind::Zero:
      break;
    case PotentialKind::Quadratic: {
      json rows = json::array();
      for (int r = 0; r < spec.dim(); ++r) rows.push_back(vec_to_json(spec.matrix().row(r).transpose()));
      j["A"] = rows;
      break;
    }
    case PotentialKind::Radial:
      j["f"] = spec.f_coeffs();
      break;
    case PotentialKind::BlackBox:
      throw InputError("black_box potentials wrap a callable and cannot be serialized");
  }
  return j;
}

json load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw InputError("cannot open config " + path);
  try {
    return json::parse(f);
  } catch (const json::parse_error& e) {
    throw InputError("config " + path + " is not valid JSON: " + e.what());
  }
}

std::vector<Diagnostic> validate(const json& config) {
  JobConfig cfg;
  return Parser(config, cfg).run();
}

JobConfig parse_job(const json& config) {
  JobConfig cfg;
  const std::vector<Diagnostic> diags = Parser(config, cfg).run();
  if (!diags.empty()) {
    std::string msg = "invalid config:";
    for (const Diagnostic& d : diags) msg += "\n  " + d.message();
    throw InputError(msg);
  }
  return cfg;
}

int run(const json& config, std::ostream& out, std::ostream& err) {
  JobConfig cfg;
  try {
    cfg = parse_job(config);
  } catch (const std::exception& e) {
    err << e.what() << '\n';
    return 1;
  }
  Outcome result;
  try {
    const std::string& c = cfg.command;
    if (c == "cost") {
      result = run_cost(cfg);
    } else if (c == "curvature") {
      result = run_curvature(cfg);
    } else if (c == "scan") {
      result = run_scan(cfg);
    } else if (c == "harmonic-verify") {
      result = run_harmonic(cfg);
    } else if (c == "conjugate") {
      result = run_conjugate(cfg);
    } else if (c == "perturb-check") {
      result = run_perturb(cfg);
    } else if (c == "radial-check") {
      result = run_radial(cfg);
    } else {
      result = run_eps(cfg);
    }
    if (!cfg.csv_path.empty()) write_file(cfg.csv_path, result.csv);
    if (!cfg.summary_path.empty()) write_file(cfg.summary_path, result.summary);
  } catch (const std::exception& e) {
    err << cfg.command << " failed: " << e.what() << '\n';
    return 1;
  }
  out << result.summary;
  return result.status;
}

}  // namespace mtw

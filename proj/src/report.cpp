#include "mtw/report.hpp"

#include <charconv>
#include <cmath>
#include <ostream>

namespace mtw {

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += (c == '\n') ? ' ' : c;
  }
  return q + "\"";
}

void preamble(std::ostream& out, const char* tag, const std::string& echo) {
  out << kCsvVersionLine << '\n' << "# " << tag << '\n';
  if (!echo.empty()) {
    std::string flat = echo;
    for (char& c : flat) {
      if (c == '\n' || c == '\r') c = ' ';
    }
    out << "# config: " << flat << '\n';
  }
}

void vector_header(std::ostream& out, const char* name, int n) {
  for (int i = 1; i <= n; ++i) out << ',' << name << '_' << i;
}

void vector_cells(std::ostream& out, const Vec& v) {
  for (int i = 0; i < v.size(); ++i) out << ',' << format_double(v[i]);
}

const char* yes_no(bool b) { return b ? "1" : "0"; }

void verdict_line(std::ostream& out, const char* name, const Verdict& v, int excluded) {
  out << name << ": " << to_string(v.status) << " (margin delta = " << format_double(v.margin)
      << ", statistic = " << format_double(v.statistic) << ", excluded = " << excluded << ")\n";
}

}  // namespace

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

void write_scan_csv(std::ostream& out, const ScanReport& report, const std::string& echo) {
  preamble(out, "mtw-scan", echo);
  const int n = report.domain.dim;
  out << "index,status,method,orthogonal";
  vector_header(out, "x", n);
  vector_header(out, "v", n);
  vector_header(out, "u", n);
  vector_header(out, "w", n);
  out << ",value,error_estimate,condition_number,reason\n";
  for (const CurvatureSample& s : report.samples) {
    out << s.index << ',' << (s.excluded ? "excluded" : "ok") << ',' << to_string(s.method) << ','
        << yes_no(s.orthogonal);
    vector_cells(out, s.x);
    vector_cells(out, s.v);
    vector_cells(out, s.u);
    vector_cells(out, s.w);
    if (s.excluded) {
      out << ",,,";
    } else {
      out << ',' << format_double(s.value) << ',' << format_double(s.error_estimate) << ','
          << format_double(s.condition_number);
    }
    out << ',' << csv_field(s.reason) << '\n';
  }
}

void write_scan_summary(std::ostream& out, const ScanReport& report) {
  out << "mtw scan over " << report.domain.describe() << '\n'
      << "method " << to_string(report.options.method) << ", seed " << report.options.seed << ", "
      << report.n_samples << " samples (" << report.n_orthogonal << " orthogonal), "
      << report.n_excluded << " excluded\n";
  out << "min MTW (orthogonal) = " << format_double(report.min_mtw) << " at sample "
      << report.argmin_mtw << '\n';
  out << "min cross-curvature (all) = " << format_double(report.min_cross) << " at sample "
      << report.argmin_cross << '\n';
  out << "max |C| = " << format_double(report.max_abs) << '\n';
  if (report.exclusion_stamp) {
    out << "more than 10% of samples excluded (" << report.n_excluded << " of "
        << report.n_samples << "); all verdicts inconclusive\n";
  }
  verdict_line(out, "A3w", report.a3w, report.n_excluded);
  verdict_line(out, "A3s", report.a3s, report.n_excluded);
  verdict_line(out, "B3w", report.b3w, report.n_excluded);
  verdict_line(out, "B3s", report.b3s, report.n_excluded);
  for (const CurvatureSample& s : report.samples) {
    if (s.excluded) out << "excluded sample " << s.index << ": " << s.reason << '\n';
  }
}

void write_perturbation_csv(std::ostream& out, const PerturbationCheck& check,
                            const std::string& echo) {
  preamble(out, "perturbation-check", echo);
  const int n = check.domain.dim;
  out << "index,orthogonal";
  vector_header(out, "x", n);
  vector_header(out, "v", n);
  vector_header(out, "u", n);
  vector_header(out, "w", n);
  out << ",integral\n";
  for (const PerturbationSample& s : check.samples) {
    out << s.index << ',' << yes_no(s.orthogonal);
    vector_cells(out, s.x);
    vector_cells(out, s.v);
    vector_cells(out, s.u);
    vector_cells(out, s.w);
    out << ',' << format_double(s.integral) << '\n';
  }
}

void write_perturbation_summary(std::ostream& out, const PerturbationCheck& check) {
  out << "perturbation check over " << check.domain.describe() << '\n'
      << "seed " << check.seed << ", " << check.samples.size() << " samples"
      << (check.orthogonal_only ? " (orthogonal u, w)" : "") << '\n'
      << "min integral = " << format_double(check.min_integral) << " at sample " << check.argmin
      << '\n'
      << "positivity: " << (check.holds ? "holds" : "fails")
      << " (C = " << format_double(check.C_required)
      << ", margin delta = min - C = " << format_double(check.margin) << ", excluded = 0)\n";
}

void write_radial_csv(std::ostream& out, const RadialCheck& check, const std::string& echo) {
  preamble(out, "radial-check", echo);
  out << "quantity,value\n";
  out << "min_f2," << format_double(check.min_f2) << '\n'
      << "min_f3," << format_double(check.min_f3) << '\n'
      << "min_f4," << format_double(check.min_f4) << '\n'
      << "C_required," << format_double(check.C_required) << '\n'
      << "holds," << yes_no(check.holds) << '\n';
}

void write_radial_summary(std::ostream& out, const RadialCheck& check) {
  out << "radial criteria over " << check.domain.describe() << '\n'
      << "f coefficients:";
  for (double c : check.f_coeffs) out << ' ' << format_double(c);
  out << '\n'
      << "seed " << check.seed << ", " << check.n_samples << " samples x " << check.t_nodes
      << " t-nodes\n"
      << "min f'' = " << format_double(check.min_f2) << ", min f''' = "
      << format_double(check.min_f3) << ", min f'''' = " << format_double(check.min_f4) << '\n'
      << "radial criteria: " << (check.holds ? "holds" : "fails")
      << " (C = " << format_double(check.C_required)
      << ", margin delta = min f'' - C = " << format_double(check.min_f2 - check.C_required)
      << ", excluded = 0)\n";
}

void write_eps_csv(std::ostream& out, const EpsTable& table, const std::string& echo) {
  preamble(out, "eps-sweep", echo);
  out << "eps,curvature,ratio,limit,relative_gap\n";
  for (const EpsRow& r : table.rows) {
    out << format_double(r.eps) << ',' << format_double(r.curvature) << ','
        << format_double(r.ratio) << ',' << format_double(table.limit) << ','
        << format_double(r.relative_gap) << '\n';
  }
}

void write_eps_summary(std::ostream& out, const EpsTable& table) {
  out << "small-eps sweep: limit = " << format_double(table.limit)
      << ", extrapolated ratio at eps -> 0 = " << format_double(table.extrapolated_limit) << '\n';
  for (const EpsRow& r : table.rows) {
    out << "eps = " << format_double(r.eps) << ": C/eps = " << format_double(r.ratio)
        << ", gap = " << format_double(r.relative_gap) << '\n';
  }
}

}  // namespace mtw

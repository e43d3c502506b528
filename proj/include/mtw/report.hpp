#pragma once

#include <iosfwd>
#include <string>

#include "mtw/curvature.hpp"
#include "mtw/perturbation.hpp"

namespace mtw {

inline constexpr const char* kCsvVersionLine = "# mtw-kit csv v1";

/// Shortest round-trip decimal form; output is byte-stable for equal doubles.
std::string format_double(double value);

/// Every CSV starts with kCsvVersionLine, then "# <tag>" naming the check and,
/// when non-empty, "# config: <echo>" so the file carries its own provenance.
///
/// One row per sample: index, status, method, orthogonal, x_i, v_i, u_i, w_i,
/// value, error_estimate, condition_number, reason.
void write_scan_csv(std::ostream& out, const ScanReport& report, const std::string& echo = {});
void write_scan_summary(std::ostream& out, const ScanReport& report);

void write_perturbation_csv(std::ostream& out, const PerturbationCheck& check, const std::string& echo = {});
void write_perturbation_summary(std::ostream& out, const PerturbationCheck& check);

void write_radial_csv(std::ostream& out, const RadialCheck& check, const std::string& echo = {});
void write_radial_summary(std::ostream& out, const RadialCheck& check);

void write_eps_csv(std::ostream& out, const EpsTable& table, const std::string& echo = {});
void write_eps_summary(std::ostream& out, const EpsTable& table);

}  // namespace mtw

#pragma once

// Version-tagged JSON documents for algebroid and two-block specs. Indices in
// documents are one-based; omitted entries are zero.
//
//   {"format": "1", "kind": "algebroid", "dims": {"n": 0, "k": 3},
//    "anchor": [{"indices": [alpha, i], "expr": "..."}],
//    "structure": [{"indices": [alpha, beta, gamma], "expr": "..."}]}
//
//   {"format": "1", "kind": "bdcp", "dims": {"n": 0, "p": 2, "q": 1},
//    "anchorA": [...], "anchorB": [...],
//    "phi": [...], "zeta": [...], "rho": [...], "sigma": [...], "psi": [...], "theta": [...],
//    "classification": "BDCP"}
//
// "classification" is written for information and ignored on load.

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "algebroid/algebroid.hpp"
#include "algebroid/bdcp.hpp"
#include "algebroid/dynamics.hpp"
#include "algebroid/verifier.hpp"

namespace algebroid {

using SpecValue = std::variant<AlgebroidSpec, BdcpSpec>;

/// Throws SchemaError (with a field path) or SyntaxError (with the byte
/// offset inside the offending expression).
SpecValue parse_spec_document(std::string_view text);

/// Sorted, byte-stable rendering.
std::string spec_document(const AlgebroidSpec& spec);
std::string spec_document(const BdcpSpec& spec);
std::string spec_document(const SpecValue& spec);

SpecValue load_spec(const std::filesystem::path& path);
void save_spec(const SpecValue& spec, const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

std::string report_json(const ResidualReport& report);

struct MonitorTolerances {
  double energy = 1e-8;
  double dissipation = 1e-9;
  double casimir = 1e-8;
};

/// Energy drift is judged only for reversible kinds, the dissipation law
/// only for dissipative ones.
bool monitor_pass(const MonitorReport& report, const MonitorTolerances& tol);
std::string monitor_json(const MonitorReport& report, const MonitorTolerances& tol);

}  // namespace algebroid

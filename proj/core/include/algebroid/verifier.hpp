#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "algebroid/algebroid.hpp"
#include "algebroid/bdcp.hpp"

namespace algebroid {

/// Base points at which the identities are evaluated.
struct SamplePlan {
  std::vector<std::vector<double>> points;

  /// `count` Halton points in [lo, hi]^n with a seeded Cranley-Patterson
  /// shift. For n = 0 the plan is the single empty point.
  static SamplePlan quasi_random(int n, int count = 32, std::uint64_t seed = 20240601,
                                 double lo = -1.0, double hi = 1.0);
  static SamplePlan explicit_points(std::vector<std::vector<double>> points);
};

struct CheckResult {
  std::string name;           // "skew", "anchor", "jacobi", "leibniz"
  double max_residual = 0.0;
  std::size_t point_index = 0;
  std::vector<double> point;  // arg-max base point
  std::vector<int> indices;   // arg-max index tuple, zero-based
  double tolerance = 0.0;
  bool pass = true;
};

struct ResidualReport {
  std::vector<CheckResult> checks;
  /// Filled by check_bdcp only.
  std::optional<std::vector<TensorBlock>> nonzero_blocks;

  bool pass() const;
  const CheckResult* find(const std::string& name) const;
};

struct VerifyOptions {
  double tolerance = 1e-9;
  /// Worker threads for the scan over sample points; the report does not
  /// depend on this value.
  int workers = 1;
};

ResidualReport check_skew(const AlgebroidSpec& spec, const SamplePlan& plan,
                          const VerifyOptions& opts = {});
ResidualReport check_anchor_morphism(const AlgebroidSpec& spec, const SamplePlan& plan,
                                     const VerifyOptions& opts = {});
ResidualReport check_jacobi(const AlgebroidSpec& spec, const SamplePlan& plan,
                            const VerifyOptions& opts = {});

/// skew, anchor and jacobi in one report.
ResidualReport verify_algebroid(const AlgebroidSpec& spec, const SamplePlan& plan,
                                const VerifyOptions& opts = {});

/// The three checks on assemble_total(b), a Leibniz entry that holds by
/// construction for coefficient data, and the list of nonzero blocks.
ResidualReport check_bdcp(const BdcpSpec& b, const SamplePlan& plan,
                          const VerifyOptions& opts = {});

}  // namespace algebroid

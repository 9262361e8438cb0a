#pragma once

#include <array>
#include <map>
#include <span>
#include <vector>

#include "algebroid/expr.hpp"

namespace algebroid {

/// Row-major dense matrix of doubles; small sizes only.
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0.0) {}

  double& operator()(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
  double operator()(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }
};

/// Dense k x k x k array, entry (a, b, c) is the coefficient of e_c in [e_a, e_b].
struct Tensor3 {
  int k = 0;
  std::vector<double> data;

  Tensor3() = default;
  explicit Tensor3(int rank) : k(rank), data(static_cast<std::size_t>(rank) * rank * rank, 0.0) {}

  double& operator()(int a, int b, int c) {
    return data[(static_cast<std::size_t>(a) * k + b) * k + c];
  }
  double operator()(int a, int b, int c) const {
    return data[(static_cast<std::size_t>(a) * k + b) * k + c];
  }
};

using Index3 = std::array<int, 3>;

/// A rank-k Lie algebroid over an n-dimensional base in a fixed local frame.
///
/// Anchor entries a[alpha][i] and structure coefficients C[alpha][beta][gamma]
/// are expressions in the base coordinates x1..xn. Structure entries are kept
/// sparse. Entries set through set_structure() are stored under alpha < beta
/// and the opposite ordering is implied by antisymmetry; set_structure_raw()
/// stores an ordered entry verbatim (dense imports), in which case lookup
/// prefers the explicit entry.
class AlgebroidSpec {
 public:
  AlgebroidSpec() = default;
  AlgebroidSpec(int base_dim, int rank);

  int base_dim() const { return n_; }
  int rank() const { return k_; }
  bool is_lie_algebra() const { return n_ == 0; }

  void set_anchor(int alpha, int i, Expr e);
  const Expr& anchor(int alpha, int i) const;

  /// Stores C[alpha][beta][gamma] = e and, implicitly, C[beta][alpha][gamma] = -e.
  void set_structure(int alpha, int beta, int gamma, Expr e);
  void set_structure_raw(int alpha, int beta, int gamma, Expr e);

  /// Coefficient of e_gamma in [e_alpha, e_beta], resolving the implied half.
  Expr structure(int alpha, int beta, int gamma) const;

  /// The stored (sparse) entries, keyed by index triple in sorted order.
  const std::map<Index3, Expr>& structure_entries() const { return structure_; }

  Matrix eval_anchor(std::span<const double> x) const;
  Tensor3 eval_structure(std::span<const double> x) const;

  friend bool operator==(const AlgebroidSpec&, const AlgebroidSpec&);

 private:
  void check_index(int alpha, const char* what) const;
  void check_coefficient(const Expr& e, const char* what) const;

  int n_ = 0;
  int k_ = 0;
  std::vector<Expr> anchor_;  // k x n, row-major
  std::map<Index3, Expr> structure_;
};

/// Coefficients of a section in the frame e_1..e_k, as functions of x.
using SectionCoeffs = std::vector<Expr>;

/// Coefficients of [X, Y] at x, including the anchor (Leibniz) terms.
std::vector<double> bracket_sections(const AlgebroidSpec& spec, const SectionCoeffs& X,
                                     const SectionCoeffs& Y, std::span<const double> x);

/// The tangent bundle of R^n: identity anchor, vanishing structure.
AlgebroidSpec tangent_algebroid(int n);

}  // namespace algebroid

#pragma once

// Bicocycle double cross product data: a fiber split into a first block of
// rank p and a second block of rank q, with the six coupling tensors
//
//   phi   (p x p -> p)  [e_alpha, e_beta] component in the first block
//   zeta  (p x p -> q)  [e_alpha, e_beta] component in the second block
//   rho   (q x p -> p)  [e_a, e_alpha] component in the first block
//   sigma (q x p -> q)  [e_a, e_alpha] component in the second block
//   psi   (q x q -> p)  [e_a, e_b] component in the first block
//   theta (q x q -> q)  [e_a, e_b] component in the second block
//
// Greek indices run over the first block, Latin over the second. The mixed
// bracket is read as [e_a, e_alpha] = R^beta_{a alpha} e_beta + S^b_{a alpha} e_b,
// i.e. rho(e_a, e_alpha) = R e_beta and sigma(e_alpha, e_a) = -S e_b.

#include <array>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "algebroid/algebroid.hpp"

namespace algebroid {

/// Sparse rank-3 coefficient array. Antisymmetric arrays store (i, j, l)
/// with i < j only.
class SparseTensor {
 public:
  SparseTensor() = default;
  SparseTensor(std::array<int, 3> dims, bool antisymmetric);

  const std::array<int, 3>& dims() const { return dims_; }
  bool antisymmetric() const { return antisymmetric_; }

  /// Sets entry (i, j, l); folded-zero values erase the entry. For
  /// antisymmetric arrays, (j, i, l) is set to the negation.
  void set(int i, int j, int l, Expr e);
  Expr get(int i, int j, int l) const;

  const std::map<Index3, Expr>& entries() const { return entries_; }

  /// True iff every entry folds to the literal 0.
  bool is_zero() const { return entries_.empty(); }

  friend bool operator==(const SparseTensor&, const SparseTensor&) = default;

 private:
  std::array<int, 3> dims_{0, 0, 0};
  bool antisymmetric_ = false;
  std::map<Index3, Expr> entries_;
};

enum class TensorBlock { phi, zeta, rho, sigma, psi, theta };

inline constexpr std::array<TensorBlock, 6> kAllBlocks{TensorBlock::phi, TensorBlock::zeta,
                                                       TensorBlock::rho, TensorBlock::sigma,
                                                       TensorBlock::psi, TensorBlock::theta};

std::string_view block_name(TensorBlock b);

class BdcpSpec {
 public:
  BdcpSpec() = default;
  /// q may be 0, which wraps a single-block algebroid (everything lives in phi).
  BdcpSpec(int base_dim, int p, int q);

  int base_dim() const { return n_; }
  int p() const { return p_; }
  int q() const { return q_; }
  int total_rank() const { return p_ + q_; }

  void set_anchor_a(int alpha, int i, Expr e);
  void set_anchor_b(int a, int i, Expr e);
  const Expr& anchor_a(int alpha, int i) const;
  const Expr& anchor_b(int a, int i) const;

  SparseTensor& tensor(TensorBlock b);
  const SparseTensor& tensor(TensorBlock b) const;

  SparseTensor& phi() { return tensor(TensorBlock::phi); }
  SparseTensor& zeta() { return tensor(TensorBlock::zeta); }
  SparseTensor& rho() { return tensor(TensorBlock::rho); }
  SparseTensor& sigma() { return tensor(TensorBlock::sigma); }
  SparseTensor& psi() { return tensor(TensorBlock::psi); }
  SparseTensor& theta() { return tensor(TensorBlock::theta); }
  const SparseTensor& phi() const { return tensor(TensorBlock::phi); }
  const SparseTensor& zeta() const { return tensor(TensorBlock::zeta); }
  const SparseTensor& rho() const { return tensor(TensorBlock::rho); }
  const SparseTensor& sigma() const { return tensor(TensorBlock::sigma); }
  const SparseTensor& psi() const { return tensor(TensorBlock::psi); }
  const SparseTensor& theta() const { return tensor(TensorBlock::theta); }

  /// Every block whose stored entries are not all literal zero.
  std::vector<TensorBlock> nonzero_blocks() const;

  friend bool operator==(const BdcpSpec&, const BdcpSpec&) = default;

 private:
  void check_anchor_coefficient(const Expr& e) const;

  int n_ = 0;
  int p_ = 0;
  int q_ = 0;
  std::vector<Expr> anchor_a_;  // p x n
  std::vector<Expr> anchor_b_;  // q x n
  std::array<SparseTensor, 6> tensors_;
};

/// First-block rank of a split of a rank-k total algebroid; requires 1 <= p < k.
struct FiberSplit {
  int p = 0;
};

/// The total algebroid on the Whitney sum: first block first. Performs no
/// compatibility check; see the verifier for that.
AlgebroidSpec assemble_total(const BdcpSpec& b);

/// Reads the six coupling tensors back off a total algebroid.
BdcpSpec decompose(const AlgebroidSpec& total, FiberSplit split);

/// Views a single algebroid as a one-block product (q = 0).
BdcpSpec single_block(const AlgebroidSpec& spec);

enum class HierarchyLevel { direct, semidirect, cocycle_ext, double_cross, unified, bdcp };

std::string_view level_name(HierarchyLevel level);
HierarchyLevel level_from_name(std::string_view name);

/// Returns `parts` unchanged after checking that every tensor the level
/// forbids is zero; throws IllegalTensorForLevel otherwise.
BdcpSpec make_product(HierarchyLevel kind, const BdcpSpec& parts);

/// The most specialised level whose zero pattern `b` matches. Anchors are
/// not inspected.
HierarchyLevel classify(const BdcpSpec& b);

}  // namespace algebroid

#include "algebroid/bdcp.hpp"

#include <string>

namespace algebroid {

SparseTensor::SparseTensor(std::array<int, 3> dims, bool antisymmetric)
    : dims_(dims), antisymmetric_(antisymmetric) {}

void SparseTensor::set(int i, int j, int l, Expr e) {
  if (i < 0 || i >= dims_[0] || j < 0 || j >= dims_[1] || l < 0 || l >= dims_[2]) {
    throw ShapeMismatch("tensor index (" + std::to_string(i + 1) + "," + std::to_string(j + 1) +
                        "," + std::to_string(l + 1) + ") out of range");
  }
  e = fold(e);
  if (antisymmetric_) {
    entries_.erase({j, i, l});
    if (i == j) {
      if (!e.is_zero()) throw ShapeMismatch("antisymmetric tensor has a nonzero diagonal entry");
      return;
    }
    if (i > j) {
      std::swap(i, j);
      e = neg(e);
    }
  }
  if (e.is_zero()) {
    entries_.erase({i, j, l});
  } else {
    entries_[{i, j, l}] = std::move(e);
  }
}

Expr SparseTensor::get(int i, int j, int l) const {
  if (antisymmetric_ && i > j) return neg(get(j, i, l));
  if (auto it = entries_.find({i, j, l}); it != entries_.end()) return it->second;
  return Expr::number(0.0);
}

std::string_view block_name(TensorBlock b) {
  switch (b) {
    case TensorBlock::phi: return "phi";
    case TensorBlock::zeta: return "zeta";
    case TensorBlock::rho: return "rho";
    case TensorBlock::sigma: return "sigma";
    case TensorBlock::psi: return "psi";
    case TensorBlock::theta: return "theta";
  }
  return "?";
}

BdcpSpec::BdcpSpec(int base_dim, int p, int q) : n_(base_dim), p_(p), q_(q) {
  if (base_dim < 0) throw ShapeMismatch("base dimension must be >= 0");
  if (p < 1 || q < 0) throw ShapeMismatch("block ranks must satisfy p >= 1, q >= 0");
  anchor_a_.assign(static_cast<std::size_t>(p) * base_dim, Expr::number(0.0));
  anchor_b_.assign(static_cast<std::size_t>(q) * base_dim, Expr::number(0.0));
  tensor(TensorBlock::phi) = SparseTensor({p, p, p}, true);
  tensor(TensorBlock::zeta) = SparseTensor({p, p, q}, true);
  tensor(TensorBlock::rho) = SparseTensor({q, p, p}, false);
  tensor(TensorBlock::sigma) = SparseTensor({q, p, q}, false);
  tensor(TensorBlock::psi) = SparseTensor({q, q, p}, true);
  tensor(TensorBlock::theta) = SparseTensor({q, q, q}, true);
}

void BdcpSpec::check_anchor_coefficient(const Expr& e) const {
  const VariableUsage u = usage(e);
  if (u.uses_fiber() || u.dissipation || u.base_count > n_) {
    throw ShapeMismatch("anchor entry must depend only on x1..x" + std::to_string(n_));
  }
}

void BdcpSpec::set_anchor_a(int alpha, int i, Expr e) {
  if (alpha < 0 || alpha >= p_ || i < 0 || i >= n_) throw ShapeMismatch("anchorA index out of range");
  check_anchor_coefficient(e);
  anchor_a_[static_cast<std::size_t>(alpha) * n_ + i] = fold(e);
}

void BdcpSpec::set_anchor_b(int a, int i, Expr e) {
  if (a < 0 || a >= q_ || i < 0 || i >= n_) throw ShapeMismatch("anchorB index out of range");
  check_anchor_coefficient(e);
  anchor_b_[static_cast<std::size_t>(a) * n_ + i] = fold(e);
}

const Expr& BdcpSpec::anchor_a(int alpha, int i) const {
  return anchor_a_[static_cast<std::size_t>(alpha) * n_ + i];
}

const Expr& BdcpSpec::anchor_b(int a, int i) const {
  return anchor_b_[static_cast<std::size_t>(a) * n_ + i];
}

SparseTensor& BdcpSpec::tensor(TensorBlock b) { return tensors_[static_cast<std::size_t>(b)]; }

const SparseTensor& BdcpSpec::tensor(TensorBlock b) const {
  return tensors_[static_cast<std::size_t>(b)];
}

std::vector<TensorBlock> BdcpSpec::nonzero_blocks() const {
  std::vector<TensorBlock> out;
  for (TensorBlock b : kAllBlocks) {
    if (!tensor(b).is_zero()) out.push_back(b);
  }
  return out;
}

AlgebroidSpec assemble_total(const BdcpSpec& b) {
  const int n = b.base_dim();
  const int p = b.p();
  AlgebroidSpec total(n, b.total_rank());
  for (int i = 0; i < n; ++i) {
    for (int alpha = 0; alpha < p; ++alpha) total.set_anchor(alpha, i, b.anchor_a(alpha, i));
    for (int a = 0; a < b.q(); ++a) total.set_anchor(p + a, i, b.anchor_b(a, i));
  }

  auto place = [&](TensorBlock block, auto&& map_index) {
    for (const auto& [idx, e] : b.tensor(block).entries()) {
      const auto [i, j, l] = map_index(idx);
      total.set_structure(i, j, l, e);
    }
  };
  place(TensorBlock::phi, [](const Index3& t) { return Index3{t[0], t[1], t[2]}; });
  place(TensorBlock::zeta, [p](const Index3& t) { return Index3{t[0], t[1], p + t[2]}; });
  place(TensorBlock::psi, [p](const Index3& t) { return Index3{p + t[0], p + t[1], t[2]}; });
  place(TensorBlock::theta, [p](const Index3& t) { return Index3{p + t[0], p + t[1], p + t[2]}; });
  // [e_a, e_alpha] = R^beta_{a alpha} e_beta + S^b_{a alpha} e_b
  place(TensorBlock::rho, [p](const Index3& t) { return Index3{p + t[0], t[1], t[2]}; });
  place(TensorBlock::sigma, [p](const Index3& t) { return Index3{p + t[0], t[1], p + t[2]}; });
  return total;
}

BdcpSpec decompose(const AlgebroidSpec& total, FiberSplit split) {
  const int k = total.rank();
  const int p = split.p;
  if (p < 1 || p >= k) {
    throw ShapeMismatch("split p=" + std::to_string(p) + " must satisfy 1 <= p < " +
                        std::to_string(k));
  }
  const int q = k - p;
  const int n = total.base_dim();
  BdcpSpec b(n, p, q);
  for (int i = 0; i < n; ++i) {
    for (int alpha = 0; alpha < p; ++alpha) b.set_anchor_a(alpha, i, total.anchor(alpha, i));
    for (int a = 0; a < q; ++a) b.set_anchor_b(a, i, total.anchor(p + a, i));
  }
  for (int al = 0; al < p; ++al) {
    for (int be = al + 1; be < p; ++be) {
      for (int g = 0; g < p; ++g) b.phi().set(al, be, g, total.structure(al, be, g));
      for (int d = 0; d < q; ++d) b.zeta().set(al, be, d, total.structure(al, be, p + d));
    }
  }
  for (int a = 0; a < q; ++a) {
    for (int c = a + 1; c < q; ++c) {
      for (int g = 0; g < p; ++g) b.psi().set(a, c, g, total.structure(p + a, p + c, g));
      for (int d = 0; d < q; ++d) b.theta().set(a, c, d, total.structure(p + a, p + c, p + d));
    }
  }
  for (int a = 0; a < q; ++a) {
    for (int al = 0; al < p; ++al) {
      for (int be = 0; be < p; ++be) b.rho().set(a, al, be, total.structure(p + a, al, be));
      for (int d = 0; d < q; ++d) b.sigma().set(a, al, d, total.structure(p + a, al, p + d));
    }
  }
  return b;
}

BdcpSpec single_block(const AlgebroidSpec& spec) {
  const int k = spec.rank();
  const int n = spec.base_dim();
  BdcpSpec b(n, k, 0);
  for (int alpha = 0; alpha < k; ++alpha) {
    for (int i = 0; i < n; ++i) b.set_anchor_a(alpha, i, spec.anchor(alpha, i));
  }
  for (int al = 0; al < k; ++al) {
    for (int be = al + 1; be < k; ++be) {
      for (int g = 0; g < k; ++g) b.phi().set(al, be, g, spec.structure(al, be, g));
    }
  }
  return b;
}

namespace {

struct LevelRule {
  HierarchyLevel level;
  std::string_view name;
  std::vector<TensorBlock> forbidden;
};

// Most specialised first; classify() returns the first match.
const std::vector<LevelRule>& level_rules() {
  using B = TensorBlock;
  static const std::vector<LevelRule> rules{
      {HierarchyLevel::direct, "direct", {B::zeta, B::psi, B::rho, B::sigma}},
      {HierarchyLevel::semidirect, "semidirect", {B::zeta, B::psi, B::sigma, B::phi}},
      {HierarchyLevel::cocycle_ext, "cocycle_ext", {B::zeta, B::sigma, B::phi}},
      {HierarchyLevel::double_cross, "double_cross", {B::zeta, B::psi}},
      {HierarchyLevel::unified, "unified", {B::zeta}},
      {HierarchyLevel::bdcp, "BDCP", {}},
  };
  return rules;
}

const LevelRule& rule_for(HierarchyLevel level) {
  for (const auto& r : level_rules()) {
    if (r.level == level) return r;
  }
  return level_rules().back();
}

}  // namespace

std::string_view level_name(HierarchyLevel level) { return rule_for(level).name; }

HierarchyLevel level_from_name(std::string_view name) {
  for (const auto& r : level_rules()) {
    if (r.name == name) return r.level;
  }
  if (name == "bdcp") return HierarchyLevel::bdcp;
  throw Error(ErrorCategory::usage, "unknown hierarchy level '" + std::string(name) + "'");
}

BdcpSpec make_product(HierarchyLevel kind, const BdcpSpec& parts) {
  const LevelRule& rule = rule_for(kind);
  for (TensorBlock b : rule.forbidden) {
    if (!parts.tensor(b).is_zero()) {
      throw IllegalTensorForLevel(std::string(block_name(b)), std::string(rule.name));
    }
  }
  return parts;
}

HierarchyLevel classify(const BdcpSpec& b) {
  for (const auto& r : level_rules()) {
    bool match = true;
    for (TensorBlock t : r.forbidden) match = match && b.tensor(t).is_zero();
    if (match) return r.level;
  }
  return HierarchyLevel::bdcp;
}

}  // namespace algebroid

#include "algebroid/algebroid.hpp"

#include <string>

namespace algebroid {

AlgebroidSpec::AlgebroidSpec(int base_dim, int rank) : n_(base_dim), k_(rank) {
  if (base_dim < 0) throw ShapeMismatch("base dimension must be >= 0");
  if (rank < 1) throw ShapeMismatch("fiber rank must be >= 1");
  anchor_.assign(static_cast<std::size_t>(k_) * n_, Expr::number(0.0));
}

void AlgebroidSpec::check_index(int alpha, const char* what) const {
  if (alpha < 0 || alpha >= k_) {
    throw ShapeMismatch(std::string(what) + " index " + std::to_string(alpha + 1) +
                        " outside 1.." + std::to_string(k_));
  }
}

void AlgebroidSpec::check_coefficient(const Expr& e, const char* what) const {
  const VariableUsage u = usage(e);
  if (u.uses_fiber() || u.dissipation) {
    throw ShapeMismatch(std::string(what) + " may only depend on base coordinates");
  }
  if (u.base_count > n_) {
    throw ShapeMismatch(std::string(what) + " uses x" + std::to_string(u.base_count) +
                        " but the base has dimension " + std::to_string(n_));
  }
}

void AlgebroidSpec::set_anchor(int alpha, int i, Expr e) {
  check_index(alpha, "anchor row");
  if (i < 0 || i >= n_) {
    throw ShapeMismatch("anchor column " + std::to_string(i + 1) + " outside 1.." +
                        std::to_string(n_));
  }
  check_coefficient(e, "anchor entry");
  anchor_[static_cast<std::size_t>(alpha) * n_ + i] = fold(e);
}

const Expr& AlgebroidSpec::anchor(int alpha, int i) const {
  return anchor_[static_cast<std::size_t>(alpha) * n_ + i];
}

void AlgebroidSpec::set_structure(int alpha, int beta, int gamma, Expr e) {
  check_index(alpha, "structure");
  check_index(beta, "structure");
  check_index(gamma, "structure");
  check_coefficient(e, "structure entry");
  e = fold(e);
  structure_.erase({alpha, beta, gamma});
  structure_.erase({beta, alpha, gamma});
  if (alpha == beta) {
    if (!e.is_zero()) throw ShapeMismatch("diagonal structure entries must vanish");
    return;
  }
  if (e.is_zero()) return;
  if (alpha < beta) {
    structure_[{alpha, beta, gamma}] = std::move(e);
  } else {
    structure_[{beta, alpha, gamma}] = neg(e);
  }
}

void AlgebroidSpec::set_structure_raw(int alpha, int beta, int gamma, Expr e) {
  check_index(alpha, "structure");
  check_index(beta, "structure");
  check_index(gamma, "structure");
  check_coefficient(e, "structure entry");
  structure_[{alpha, beta, gamma}] = std::move(e);
}

Expr AlgebroidSpec::structure(int alpha, int beta, int gamma) const {
  if (auto it = structure_.find({alpha, beta, gamma}); it != structure_.end()) return it->second;
  if (auto it = structure_.find({beta, alpha, gamma}); it != structure_.end()) {
    return neg(it->second);
  }
  return Expr::number(0.0);
}

Matrix AlgebroidSpec::eval_anchor(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != n_) {
    throw ShapeMismatch("base point has " + std::to_string(x.size()) + " coordinates, expected " +
                        std::to_string(n_));
  }
  Matrix a(k_, n_);
  const Env env{x, {}, std::nullopt};
  for (int alpha = 0; alpha < k_; ++alpha) {
    for (int i = 0; i < n_; ++i) {
      try {
        a(alpha, i) = eval(anchor(alpha, i), env);
      } catch (Error& err) {
        err.add_context("anchor[" + std::to_string(alpha + 1) + "][" + std::to_string(i + 1) + "]");
        throw;
      }
    }
  }
  return a;
}

Tensor3 AlgebroidSpec::eval_structure(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != n_) {
    throw ShapeMismatch("base point has " + std::to_string(x.size()) + " coordinates, expected " +
                        std::to_string(n_));
  }
  Tensor3 c(k_);
  const Env env{x, {}, std::nullopt};
  // Implied entries first so that explicit (raw) entries win.
  for (const auto& [idx, e] : structure_) {
    const auto [a, b, g] = idx;
    if (structure_.count({b, a, g})) continue;
    try {
      c(b, a, g) = -eval(e, env);
    } catch (Error& err) {
      err.add_context("structure[" + std::to_string(a + 1) + "][" + std::to_string(b + 1) + "][" +
                      std::to_string(g + 1) + "]");
      throw;
    }
  }
  for (const auto& [idx, e] : structure_) {
    const auto [a, b, g] = idx;
    try {
      c(a, b, g) = eval(e, env);
    } catch (Error& err) {
      err.add_context("structure[" + std::to_string(a + 1) + "][" + std::to_string(b + 1) + "][" +
                      std::to_string(g + 1) + "]");
      throw;
    }
  }
  return c;
}

bool operator==(const AlgebroidSpec& a, const AlgebroidSpec& b) {
  return a.n_ == b.n_ && a.k_ == b.k_ && a.anchor_ == b.anchor_ && a.structure_ == b.structure_;
}

std::vector<double> bracket_sections(const AlgebroidSpec& spec, const SectionCoeffs& X,
                                     const SectionCoeffs& Y, std::span<const double> x) {
  const int k = spec.rank();
  const int n = spec.base_dim();
  if (static_cast<int>(X.size()) != k || static_cast<int>(Y.size()) != k) {
    throw ShapeMismatch("section coefficient count must equal the fiber rank");
  }
  const Env env{x, {}, std::nullopt};
  const Matrix a = spec.eval_anchor(x);
  const Tensor3 c = spec.eval_structure(x);

  std::vector<double> xv(k), yv(k);
  for (int i = 0; i < k; ++i) {
    xv[i] = eval(X[i], env);
    yv[i] = eval(Y[i], env);
  }
  // Lie derivative of f along the anchored section S: sum_alpha S^alpha a^i_alpha d_i f.
  auto lie = [&](const std::vector<double>& s, const Expr& f) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
      double dir = 0.0;
      for (int alpha = 0; alpha < k; ++alpha) dir += s[alpha] * a(alpha, i);
      if (dir != 0.0) acc += dir * eval(diff(f, Variable::x(i)), env);
    }
    return acc;
  };

  std::vector<double> out(k, 0.0);
  for (int g = 0; g < k; ++g) {
    double v = 0.0;
    for (int al = 0; al < k; ++al) {
      for (int be = 0; be < k; ++be) v += xv[al] * yv[be] * c(al, be, g);
    }
    v += lie(xv, Y[g]) - lie(yv, X[g]);
    out[g] = v;
  }
  return out;
}

AlgebroidSpec tangent_algebroid(int n) {
  AlgebroidSpec spec(n, n);
  for (int i = 0; i < n; ++i) spec.set_anchor(i, i, Expr::number(1.0));
  return spec;
}

}  // namespace algebroid

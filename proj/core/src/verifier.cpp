#include "algebroid/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <thread>

namespace algebroid {
namespace {

constexpr int kPrimes[] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29, 31, 37, 41,
                           43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97};

double radical_inverse(std::uint64_t i, int base) {
  double inv = 1.0 / base;
  double f = inv;
  double r = 0.0;
  while (i > 0) {
    r += f * static_cast<double>(i % base);
    i /= base;
    f *= inv;
  }
  return r;
}

// Largest residual found at one sample point.
struct PointMax {
  double value = 0.0;
  std::vector<int> indices;
  bool set = false;

  void offer(double r, std::initializer_list<int> idx) {
    // Indices are visited in lexicographic order, so strict > keeps the first.
    if (!set || r > value) {
      value = r;
      indices.assign(idx);
      set = true;
    }
  }
};

using PointScan = std::function<PointMax(const std::vector<double>&)>;

CheckResult scan(const std::string& name, const SamplePlan& plan, const VerifyOptions& opts,
                 const PointScan& at_point) {
  const std::size_t count = plan.points.size();
  std::vector<PointMax> per_point(count);
  std::vector<std::exception_ptr> errors(count);

  auto work = [&](std::size_t first, std::size_t stride) {
    for (std::size_t p = first; p < count; p += stride) {
      try {
        per_point[p] = at_point(plan.points[p]);
      } catch (Error& err) {
        err.add_context(name + " check at sample point " + std::to_string(p));
        errors[p] = std::current_exception();
      } catch (...) {
        errors[p] = std::current_exception();
      }
    }
  };

  const std::size_t workers =
      std::clamp<std::size_t>(static_cast<std::size_t>(std::max(opts.workers, 1)), 1,
                              std::max<std::size_t>(count, 1));
  if (workers == 1) {
    work(0, 1);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w, workers);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  CheckResult out;
  out.name = name;
  out.tolerance = opts.tolerance;
  bool set = false;
  for (std::size_t p = 0; p < count; ++p) {
    const PointMax& m = per_point[p];
    if (!m.set) continue;
    if (!set || m.value > out.max_residual) {
      out.max_residual = m.value;
      out.point_index = p;
      out.point = plan.points[p];
      out.indices = m.indices;
      set = true;
    }
  }
  if (!set && count > 0) out.point = plan.points[0];
  out.pass = out.max_residual <= opts.tolerance;
  return out;
}

// Symbolic first derivatives of anchor and structure entries, computed once.
struct Derivatives {
  int n = 0;
  int k = 0;
  std::vector<Expr> structure;   // dense k^3, resolved entries
  std::vector<Expr> d_structure;  // k^3 x n
  std::vector<Expr> d_anchor;     // k x n x n: d_i a^j_alpha at [(alpha*n + j)*n + i]

  explicit Derivatives(const AlgebroidSpec& spec, bool need_structure)
      : n(spec.base_dim()), k(spec.rank()) {
    d_anchor.resize(static_cast<std::size_t>(k) * n * n);
    for (int al = 0; al < k; ++al) {
      for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
          d_anchor[(static_cast<std::size_t>(al) * n + j) * n + i] =
              diff(spec.anchor(al, j), Variable::x(i));
        }
      }
    }
    if (!need_structure || n == 0) return;
    structure.resize(static_cast<std::size_t>(k) * k * k);
    d_structure.resize(structure.size() * n);
    for (int a = 0; a < k; ++a) {
      for (int b = 0; b < k; ++b) {
        for (int g = 0; g < k; ++g) {
          const std::size_t s = (static_cast<std::size_t>(a) * k + b) * k + g;
          structure[s] = spec.structure(a, b, g);
          for (int i = 0; i < n; ++i) d_structure[s * n + i] = diff(structure[s], Variable::x(i));
        }
      }
    }
  }
};

}  // namespace

SamplePlan SamplePlan::quasi_random(int n, int count, std::uint64_t seed, double lo, double hi) {
  SamplePlan plan;
  if (n == 0) {
    plan.points.emplace_back();
    return plan;
  }
  if (n > static_cast<int>(std::size(kPrimes))) {
    throw ShapeMismatch("quasi-random plans support at most " +
                        std::to_string(std::size(kPrimes)) + " base dimensions");
  }
  if (count < 1) throw ShapeMismatch("sample plan needs at least one point");
  std::mt19937_64 rng(seed);
  std::vector<double> shift(n);
  for (double& s : shift) s = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  for (int p = 0; p < count; ++p) {
    std::vector<double> x(n);
    for (int d = 0; d < n; ++d) {
      double u = radical_inverse(static_cast<std::uint64_t>(p) + 1, kPrimes[d]) + shift[d];
      if (u >= 1.0) u -= 1.0;
      x[d] = lo + (hi - lo) * u;
    }
    plan.points.push_back(std::move(x));
  }
  return plan;
}

SamplePlan SamplePlan::explicit_points(std::vector<std::vector<double>> points) {
  if (points.empty()) throw ShapeMismatch("sample plan needs at least one point");
  return SamplePlan{std::move(points)};
}

bool ResidualReport::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

const CheckResult* ResidualReport::find(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

ResidualReport check_skew(const AlgebroidSpec& spec, const SamplePlan& plan,
                          const VerifyOptions& opts) {
  const int k = spec.rank();
  ResidualReport report;
  report.checks.push_back(scan("skew", plan, opts, [&](const std::vector<double>& x) {
    const Tensor3 c = spec.eval_structure(x);
    PointMax m;
    for (int a = 0; a < k; ++a) {
      for (int b = a; b < k; ++b) {
        for (int g = 0; g < k; ++g) m.offer(std::abs(c(a, b, g) + c(b, a, g)), {a, b, g});
      }
    }
    return m;
  }));
  return report;
}

ResidualReport check_anchor_morphism(const AlgebroidSpec& spec, const SamplePlan& plan,
                                     const VerifyOptions& opts) {
  const int k = spec.rank();
  const int n = spec.base_dim();
  const Derivatives d(spec, false);
  ResidualReport report;
  report.checks.push_back(scan("anchor", plan, opts, [&](const std::vector<double>& x) {
    PointMax m;
    if (n == 0) return m;
    const Env env{x, {}, std::nullopt};
    const Matrix a = spec.eval_anchor(x);
    const Tensor3 c = spec.eval_structure(x);
    std::vector<double> da(d.d_anchor.size());
    for (std::size_t s = 0; s < da.size(); ++s) da[s] = eval(d.d_anchor[s], env);
    auto dA = [&](int al, int j, int i) {
      return da[(static_cast<std::size_t>(al) * n + j) * n + i];
    };
    for (int al = 0; al < k; ++al) {
      for (int be = 0; be < k; ++be) {
        for (int j = 0; j < n; ++j) {
          double lhs = 0.0;
          for (int g = 0; g < k; ++g) lhs += a(g, j) * c(al, be, g);
          double rhs = 0.0;
          for (int i = 0; i < n; ++i) rhs += a(al, i) * dA(be, j, i) - a(be, i) * dA(al, j, i);
          m.offer(std::abs(lhs - rhs), {al, be, j});
        }
      }
    }
    return m;
  }));
  return report;
}

ResidualReport check_jacobi(const AlgebroidSpec& spec, const SamplePlan& plan,
                            const VerifyOptions& opts) {
  const int k = spec.rank();
  const int n = spec.base_dim();
  const Derivatives d(spec, true);
  ResidualReport report;
  report.checks.push_back(scan("jacobi", plan, opts, [&](const std::vector<double>& x) {
    const Env env{x, {}, std::nullopt};
    const Matrix a = spec.eval_anchor(x);
    const Tensor3 c = spec.eval_structure(x);
    std::vector<double> dc(d.d_structure.size());
    for (std::size_t s = 0; s < dc.size(); ++s) dc[s] = eval(d.d_structure[s], env);

    // a_alpha(C_{beta gamma}^nu) + C_{beta gamma}^mu C_{alpha mu}^nu
    auto term = [&](int al, int be, int ga, int nu) {
      double v = 0.0;
      for (int i = 0; i < n; ++i) {
        v += a(al, i) * dc[((static_cast<std::size_t>(be) * k + ga) * k + nu) * n + i];
      }
      for (int mu = 0; mu < k; ++mu) v += c(be, ga, mu) * c(al, mu, nu);
      return v;
    };

    PointMax m;
    for (int al = 0; al < k; ++al) {
      for (int be = 0; be < k; ++be) {
        for (int ga = 0; ga < k; ++ga) {
          for (int nu = 0; nu < k; ++nu) {
            const double j = term(al, be, ga, nu) + term(be, ga, al, nu) + term(ga, al, be, nu);
            m.offer(std::abs(j), {al, be, ga, nu});
          }
        }
      }
    }
    return m;
  }));
  return report;
}

ResidualReport verify_algebroid(const AlgebroidSpec& spec, const SamplePlan& plan,
                                const VerifyOptions& opts) {
  ResidualReport report;
  for (auto check : {check_skew, check_anchor_morphism, check_jacobi}) {
    ResidualReport r = check(spec, plan, opts);
    report.checks.insert(report.checks.end(), r.checks.begin(), r.checks.end());
  }
  return report;
}

ResidualReport check_bdcp(const BdcpSpec& b, const SamplePlan& plan, const VerifyOptions& opts) {
  ResidualReport report = verify_algebroid(assemble_total(b), plan, opts);
  CheckResult leibniz;
  leibniz.name = "leibniz";
  leibniz.tolerance = opts.tolerance;
  if (!plan.points.empty()) leibniz.point = plan.points.front();
  report.checks.push_back(std::move(leibniz));
  report.nonzero_blocks = b.nonzero_blocks();
  return report;
}

}  // namespace algebroid

#include "algebroid/dynamics.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <thread>

namespace algebroid {
namespace {

void require_z(const DynState& s, bool wanted, const char* who) {
  if (s.z.has_value() != wanted) {
    throw ShapeMismatch(std::string(who) +
                        (wanted ? " needs a state with z" : " takes a state without z"));
  }
}

void check_dims(const AlgebroidSpec& spec, const EnergyLike& f, const DynState& s) {
  const int n = spec.base_dim();
  const int k = spec.rank();
  if (static_cast<int>(s.x.size()) != n || static_cast<int>(s.y.size()) != k) {
    throw ShapeMismatch("state has " + std::to_string(s.x.size()) + " base and " +
                        std::to_string(s.y.size()) + " fiber coordinates, expected " +
                        std::to_string(n) + " and " + std::to_string(k));
  }
  if (f.base_dim() != n || f.rank() != k) {
    throw ArityError("energy declared for n=" + std::to_string(f.base_dim()) +
                     ", k=" + std::to_string(f.rank()) + " but the algebroid has n=" +
                     std::to_string(n) + ", k=" + std::to_string(k));
  }
}

DynState hamilton_impl(const AlgebroidSpec& spec, const EnergyLike& H, const DynState& s,
                       bool dissipative) {
  check_dims(spec, H, s);
  require_z(s, dissipative, dissipative ? "dissipative Hamilton" : "Hamilton");
  const int n = spec.base_dim();
  const int k = spec.rank();
  const Env env = env_of(s);
  const Matrix a = spec.eval_anchor(s.x);
  const Tensor3 c = spec.eval_structure(s.x);

  std::vector<double> hx(n), hy(k);
  for (int i = 0; i < n; ++i) hx[i] = eval(H.dx(i), env);
  for (int al = 0; al < k; ++al) hy[al] = eval(H.dy(al), env);

  DynState d{std::vector<double>(n, 0.0), std::vector<double>(k, 0.0), std::nullopt};
  for (int i = 0; i < n; ++i) {
    for (int al = 0; al < k; ++al) d.x[i] += a(al, i) * hy[al];
  }
  for (int al = 0; al < k; ++al) {
    double v = 0.0;
    for (int be = 0; be < k; ++be) {
      if (hy[be] == 0.0) continue;
      for (int g = 0; g < k; ++g) v -= c(al, be, g) * s.y[g] * hy[be];
    }
    for (int i = 0; i < n; ++i) v -= a(al, i) * hx[i];
    d.y[al] = v;
  }
  if (dissipative) {
    const double hz = eval(H.dz(), env);
    double yhy = 0.0;
    for (int al = 0; al < k; ++al) {
      d.y[al] -= s.y[al] * hz;
      yhy += s.y[al] * hy[al];
    }
    d.z = yhy - eval(H.expr(), env);
  }
  return d;
}

DynState lagrange_impl(const AlgebroidSpec& spec, const EnergyLike& L, const DynState& s,
                       bool dissipative) {
  check_dims(spec, L, s);
  require_z(s, dissipative, dissipative ? "Herglotz" : "Euler-Lagrange");
  const int n = spec.base_dim();
  const int k = spec.rank();
  const Env env = env_of(s);
  const Matrix a = spec.eval_anchor(s.x);
  const Tensor3 c = spec.eval_structure(s.x);

  DynState d{std::vector<double>(n, 0.0), std::vector<double>(k, 0.0), std::nullopt};
  for (int i = 0; i < n; ++i) {
    for (int al = 0; al < k; ++al) d.x[i] += a(al, i) * s.y[al];
  }
  double lz = 0.0;
  if (dissipative) {
    lz = eval(L.dz(), env);
    d.z = eval(L.expr(), env);
  }

  Eigen::MatrixXd W(k, k);
  Eigen::VectorXd rhs(k);
  std::vector<double> ly(k), lx(n);
  for (int al = 0; al < k; ++al) ly[al] = eval(L.dy(al), env);
  for (int i = 0; i < n; ++i) lx[i] = eval(L.dx(i), env);

  for (int al = 0; al < k; ++al) {
    for (int be = 0; be < k; ++be) W(al, be) = eval(L.dyy(al, be), env);
    double r = 0.0;
    for (int i = 0; i < n; ++i) r += a(al, i) * lx[i];
    for (int be = 0; be < k; ++be) {
      if (s.y[be] == 0.0) continue;
      for (int g = 0; g < k; ++g) r -= c(al, be, g) * s.y[be] * ly[g];
    }
    if (dissipative) r += lz * ly[al];
    // Move the x- and z-dependence of d/dt L_y to the right-hand side.
    for (int i = 0; i < n; ++i) {
      if (d.x[i] != 0.0) r -= eval(L.dyx(al, i), env) * d.x[i];
    }
    if (dissipative) r -= eval(L.dyz(al), env) * *d.z;
    rhs(al) = r;
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(W);
  const auto& sv = svd.singularValues();
  const double smax = sv(0);
  const double smin = sv(k - 1);
  const double cond = smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity();
  if (!(cond <= kMaxHessianCondition)) throw SingularLagrangian(cond);

  const Eigen::VectorXd ydot = W.partialPivLu().solve(rhs);
  for (int al = 0; al < k; ++al) d.y[al] = ydot(al);
  return d;
}

std::vector<double> flatten(const DynState& s) {
  std::vector<double> v;
  v.reserve(s.x.size() + s.y.size() + 1);
  v.insert(v.end(), s.x.begin(), s.x.end());
  v.insert(v.end(), s.y.begin(), s.y.end());
  if (s.z) v.push_back(*s.z);
  return v;
}

DynState unflatten(const std::vector<double>& v, const DynState& shape) {
  DynState s;
  const auto n = shape.x.size();
  const auto k = shape.y.size();
  s.x.assign(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(n));
  s.y.assign(v.begin() + static_cast<std::ptrdiff_t>(n), v.begin() + static_cast<std::ptrdiff_t>(n + k));
  if (shape.z) s.z = v[n + k];
  return s;
}

using Vec = std::vector<double>;

Vec axpy(const Vec& y, double h, std::initializer_list<std::pair<double, const Vec*>> terms) {
  Vec out = y;
  for (const auto& [coef, v] : terms) {
    if (coef == 0.0) continue;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += h * coef * (*v)[i];
  }
  return out;
}

class Stepper {
 public:
  Stepper(const System& sys, const DynState& shape) : sys_(sys), shape_(shape) {}

  Vec f(double t, const Vec& v) const {
    try {
      return flatten(sys_.rhs(unflatten(v, shape_)));
    } catch (Error& err) {
      std::ostringstream os;
      os.precision(17);
      os << "at t=" << t;
      err.add_context(os.str());
      throw;
    }
  }

 private:
  const System& sys_;
  const DynState& shape_;
};

void record(Trajectory& traj, const System& sys, double t, DynState s) {
  traj.times.push_back(t);
  traj.energy.push_back(sys.monitored_energy(s));
  const Env env = env_of(s);
  for (std::size_t c = 0; c < sys.casimirs.size(); ++c) {
    traj.casimirs[c].push_back(eval(sys.casimirs[c].expr(), env));
  }
  traj.states.push_back(std::move(s));
}

Trajectory integrate_rk4(const System& sys, const DynState& s0, const IntegrateOptions& o) {
  Trajectory traj;
  traj.casimirs.resize(sys.casimirs.size());
  const Stepper st(sys, s0);
  Vec v = flatten(s0);
  double t = o.t0;
  record(traj, sys, t, s0);
  const auto steps = static_cast<long long>(std::ceil((o.t1 - o.t0) / o.dt - 1e-9));
  for (long long i = 1; i <= steps; ++i) {
    const double t_next = i == steps ? o.t1 : o.t0 + static_cast<double>(i) * o.dt;
    const double h = t_next - t;
    const Vec k1 = st.f(t, v);
    const Vec k2 = st.f(t + h / 2, axpy(v, h, {{0.5, &k1}}));
    const Vec k3 = st.f(t + h / 2, axpy(v, h, {{0.5, &k2}}));
    const Vec k4 = st.f(t + h, axpy(v, h, {{1.0, &k3}}));
    v = axpy(v, h, {{1.0 / 6, &k1}, {1.0 / 3, &k2}, {1.0 / 3, &k3}, {1.0 / 6, &k4}});
    t = t_next;
    record(traj, sys, t, unflatten(v, s0));
  }
  return traj;
}

// Dormand-Prince 5(4) with first-same-as-last and a PI step controller.
Trajectory integrate_rk45(const System& sys, const DynState& s0, const IntegrateOptions& o) {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                          a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                          a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                          e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
  static constexpr double safety = 0.9, fac_min = 0.2, fac_max = 5.0;
  static constexpr double alpha = 0.17, beta = 0.04;

  Trajectory traj;
  traj.casimirs.resize(sys.casimirs.size());
  const Stepper st(sys, s0);
  Vec v = flatten(s0);
  const std::size_t m = v.size();
  double t = o.t0;
  double h = std::min(o.dt, o.t1 - o.t0);
  double err_prev = 1e-4;
  bool rejected = false;
  record(traj, sys, t, s0);
  Vec k1 = st.f(t, v);

  while (t < o.t1) {
    bool last = false;
    if (t + h >= o.t1) {
      h = o.t1 - t;
      last = true;
    }
    if (h < o.dt_min) throw StepUnderflow(t, h);

    const Vec k2 = st.f(t + c2 * h, axpy(v, h, {{a21, &k1}}));
    const Vec k3 = st.f(t + c3 * h, axpy(v, h, {{a31, &k1}, {a32, &k2}}));
    const Vec k4 = st.f(t + c4 * h, axpy(v, h, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
    const Vec k5 =
        st.f(t + c5 * h, axpy(v, h, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
    const Vec k6 = st.f(t + h, axpy(v, h, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4},
                                           {a65, &k5}}));
    const Vec v_new = axpy(v, h, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
    const Vec k7 = st.f(t + h, v_new);

    double err = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double e =
          h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      const double scale = o.atol + o.rtol * std::max(std::abs(v[i]), std::abs(v_new[i]));
      err += (e / scale) * (e / scale);
    }
    err = m > 0 ? std::sqrt(err / static_cast<double>(m)) : 0.0;

    if (err <= 1.0) {
      double fac = err == 0.0 ? fac_max
                              : safety * std::pow(err, -alpha) * std::pow(err_prev, beta);
      fac = std::clamp(fac, fac_min, fac_max);
      if (rejected) fac = std::min(fac, 1.0);
      err_prev = std::max(err, 1e-4);
      t = last ? o.t1 : t + h;
      v = v_new;
      k1 = k7;
      record(traj, sys, t, unflatten(v, s0));
      h *= fac;
      rejected = false;
    } else {
      h *= std::max(fac_min, safety * std::pow(err, -alpha));
      rejected = true;
    }
  }
  return traj;
}

void format_double(std::string& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

}  // namespace

EnergyLike::EnergyLike(Expr value, int n, int k, bool with_z)
    : value_(std::move(value)), n_(n), k_(k), with_z_(with_z) {
  const VariableUsage u = usage(value_);
  if (u.base_count > n) {
    throw ArityError("energy uses x" + std::to_string(u.base_count) + " but the base has " +
                     std::to_string(n) + " coordinates");
  }
  if (u.fiber_count > k) {
    throw ArityError("energy uses y" + std::to_string(u.fiber_count) + " but the fiber has rank " +
                     std::to_string(k));
  }
  if (u.dissipation && !with_z) throw ArityError("energy uses z in a system without z");

  for (int i = 0; i < n; ++i) dx_.push_back(diff(value_, Variable::x(i)));
  for (int a = 0; a < k; ++a) dy_.push_back(diff(value_, Variable::y(a)));
  dz_ = with_z ? diff(value_, Variable::z()) : Expr::number(0.0);
  for (int a = 0; a < k; ++a) {
    for (int b = 0; b < k; ++b) dyy_.push_back(diff(dy_[a], Variable::y(b)));
    for (int i = 0; i < n; ++i) dyx_.push_back(diff(dy_[a], Variable::x(i)));
    dyz_.push_back(with_z ? diff(dy_[a], Variable::z()) : Expr::number(0.0));
  }
}

EnergyLike EnergyLike::parse(std::string_view text, int n, int k, bool with_z) {
  return EnergyLike(algebroid::parse(text), n, k, with_z);
}

Env env_of(const DynState& s) { return Env{s.x, s.y, s.z}; }

std::string_view dynamics_name(DynamicsKind kind) {
  switch (kind) {
    case DynamicsKind::hamilton: return "hamilton";
    case DynamicsKind::dissipative_hamilton: return "dissipative-hamilton";
    case DynamicsKind::euler_lagrange: return "euler-lagrange";
    case DynamicsKind::herglotz: return "herglotz";
  }
  return "?";
}

DynamicsKind dynamics_from_name(std::string_view name) {
  if (name == "hamilton" || name == "lie-poisson") return DynamicsKind::hamilton;
  if (name == "dissipative-hamilton" || name == "contact") return DynamicsKind::dissipative_hamilton;
  if (name == "euler-lagrange" || name == "euler-poincare") return DynamicsKind::euler_lagrange;
  if (name == "herglotz") return DynamicsKind::herglotz;
  throw Error(ErrorCategory::usage, "unknown dynamics '" + std::string(name) + "'");
}

bool is_dissipative(DynamicsKind kind) {
  return kind == DynamicsKind::dissipative_hamilton || kind == DynamicsKind::herglotz;
}

bool is_lagrangian(DynamicsKind kind) {
  return kind == DynamicsKind::euler_lagrange || kind == DynamicsKind::herglotz;
}

DynState hamiltonian_rhs(const AlgebroidSpec& spec, const EnergyLike& H, const DynState& s) {
  return hamilton_impl(spec, H, s, false);
}

DynState dissipative_hamiltonian_rhs(const AlgebroidSpec& spec, const EnergyLike& H,
                                     const DynState& s) {
  return hamilton_impl(spec, H, s, true);
}

DynState euler_lagrange_rhs(const AlgebroidSpec& spec, const EnergyLike& L, const DynState& s) {
  return lagrange_impl(spec, L, s, false);
}

DynState herglotz_rhs(const AlgebroidSpec& spec, const EnergyLike& L, const DynState& s) {
  return lagrange_impl(spec, L, s, true);
}

DynState hamiltonian_rhs(const BdcpSpec& b, const EnergyLike& H, const DynState& s) {
  return hamiltonian_rhs(assemble_total(b), H, s);
}

DynState dissipative_hamiltonian_rhs(const BdcpSpec& b, const EnergyLike& H, const DynState& s) {
  return dissipative_hamiltonian_rhs(assemble_total(b), H, s);
}

DynState euler_lagrange_rhs(const BdcpSpec& b, const EnergyLike& L, const DynState& s) {
  return euler_lagrange_rhs(assemble_total(b), L, s);
}

DynState herglotz_rhs(const BdcpSpec& b, const EnergyLike& L, const DynState& s) {
  return herglotz_rhs(assemble_total(b), L, s);
}

double energy_function(const EnergyLike& L, const DynState& s) {
  const Env env = env_of(s);
  double e = -eval(L.expr(), env);
  for (int a = 0; a < L.rank(); ++a) e += s.y[a] * eval(L.dy(a), env);
  return e;
}

EnergyLike energy_function_expr(const EnergyLike& L) {
  Expr e = neg(L.expr());
  for (int a = 0; a < L.rank(); ++a) e = add(e, mul(Expr::variable(Variable::y(a)), L.dy(a)));
  return EnergyLike(e, L.base_dim(), L.rank(), L.with_z());
}

std::vector<double> legendre_map(const EnergyLike& L, const DynState& s) {
  const Env env = env_of(s);
  std::vector<double> p(L.rank());
  for (int a = 0; a < L.rank(); ++a) p[a] = eval(L.dy(a), env);
  return p;
}

void System::validate() const {
  if (energy.base_dim() != spec.base_dim() || energy.rank() != spec.rank()) {
    throw ArityError("energy arity does not match the algebroid");
  }
  if (energy.with_z() != is_dissipative(kind)) {
    throw ArityError(std::string(dynamics_name(kind)) +
                     (is_dissipative(kind) ? " needs an energy declared with z"
                                           : " needs an energy declared without z"));
  }
  for (const auto& c : casimirs) {
    if (c.base_dim() != spec.base_dim() || c.rank() != spec.rank()) {
      throw ArityError("monitored function arity does not match the algebroid");
    }
  }
}

void System::validate_state(const DynState& s) const {
  if (static_cast<int>(s.x.size()) != spec.base_dim() ||
      static_cast<int>(s.y.size()) != spec.rank() || s.z.has_value() != is_dissipative(kind)) {
    const int expected =
        spec.base_dim() + spec.rank() + (is_dissipative(kind) ? 1 : 0);
    throw ShapeMismatch("state for " + std::string(dynamics_name(kind)) + " needs " +
                        std::to_string(expected) + " coordinates");
  }
}

DynState System::rhs(const DynState& s) const {
  switch (kind) {
    case DynamicsKind::hamilton: return hamiltonian_rhs(spec, energy, s);
    case DynamicsKind::dissipative_hamilton: return dissipative_hamiltonian_rhs(spec, energy, s);
    case DynamicsKind::euler_lagrange: return euler_lagrange_rhs(spec, energy, s);
    case DynamicsKind::herglotz: return herglotz_rhs(spec, energy, s);
  }
  return {};
}

double System::monitored_energy(const DynState& s) const {
  return is_lagrangian(kind) ? energy_function(energy, s) : eval(energy.expr(), env_of(s));
}

std::string_view method_name(Method m) { return m == Method::rk4 ? "rk4" : "rk45"; }

Method method_from_name(std::string_view name) {
  if (name == "rk4") return Method::rk4;
  if (name == "rk45") return Method::rk45;
  throw Error(ErrorCategory::usage, "unknown method '" + std::string(name) + "'");
}

Trajectory integrate(const System& sys, const DynState& s0, const IntegrateOptions& opts) {
  sys.validate();
  sys.validate_state(s0);
  if (!(opts.t1 > opts.t0)) throw Error(ErrorCategory::usage, "t1 must be greater than t0");
  if (!(opts.dt > 0.0)) throw Error(ErrorCategory::usage, "dt must be positive");
  return opts.method == Method::rk4 ? integrate_rk4(sys, s0, opts) : integrate_rk45(sys, s0, opts);
}

std::vector<Trajectory> integrate_batch(const System& sys, const std::vector<DynState>& s0,
                                        const IntegrateOptions& opts, int workers) {
  std::vector<Trajectory> out(s0.size());
  std::vector<std::exception_ptr> errors(s0.size());
  auto work = [&](std::size_t first, std::size_t stride) {
    for (std::size_t i = first; i < s0.size(); i += stride) {
      try {
        out[i] = integrate(sys, s0[i], opts);
      } catch (Error& err) {
        err.add_context("initial state " + std::to_string(i + 1));
        errors[i] = std::current_exception();
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t w =
      std::clamp<std::size_t>(static_cast<std::size_t>(std::max(workers, 1)), 1,
                              std::max<std::size_t>(s0.size(), 1));
  if (w == 1) {
    work(0, 1);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t i = 0; i < w; ++i) pool.emplace_back(work, i, w);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

double time_derivative(const EnergyLike& f, const DynState& s, const DynState& rate) {
  const Env env = env_of(s);
  double v = 0.0;
  for (int i = 0; i < f.base_dim(); ++i) v += eval(f.dx(i), env) * rate.x[i];
  for (int a = 0; a < f.rank(); ++a) v += eval(f.dy(a), env) * rate.y[a];
  if (f.with_z() && rate.z) v += eval(f.dz(), env) * *rate.z;
  return v;
}

MonitorReport monitor_invariants(const Trajectory& traj, const System& sys) {
  sys.validate();
  MonitorReport report;
  report.kind = sys.kind;
  report.samples = traj.states.size();
  report.casimir_drift.assign(sys.casimirs.size(), 0.0);
  if (traj.states.empty()) return report;

  const EnergyLike monitored = is_lagrangian(sys.kind) ? energy_function_expr(sys.energy)
                                                       : sys.energy;
  std::vector<double> casimir0;
  const Env env0 = env_of(traj.states.front());
  for (const auto& c : sys.casimirs) casimir0.push_back(eval(c.expr(), env0));
  const double e0 = eval(monitored.expr(), env0);
  if (is_dissipative(sys.kind)) report.dissipation_residual = 0.0;

  for (std::size_t step = 0; step < traj.states.size(); ++step) {
    const DynState& s = traj.states[step];
    sys.validate_state(s);
    const Env env = env_of(s);
    const double e = eval(monitored.expr(), env);
    report.energy_drift = std::max(report.energy_drift, std::abs(e - e0));
    for (std::size_t c = 0; c < sys.casimirs.size(); ++c) {
      report.casimir_drift[c] = std::max(report.casimir_drift[c],
                                         std::abs(eval(sys.casimirs[c].expr(), env) - casimir0[c]));
    }
    if (is_dissipative(sys.kind)) {
      const DynState rate = sys.rhs(s);
      const double de = time_derivative(monitored, s, rate);
      const double ez = eval(sys.energy.dz(), env);
      // Hamiltonian side: dH/dt = -H_z H. Lagrangian side: dE_L/dt = L_z E_L.
      const double r = sys.kind == DynamicsKind::dissipative_hamilton ? de + ez * e : de - ez * e;
      report.dissipation_residual = std::max(*report.dissipation_residual, std::abs(r));
    }
  }
  return report;
}

std::string trajectory_csv(const Trajectory& traj, const System& sys) {
  const int n = sys.spec.base_dim();
  const int k = sys.spec.rank();
  const bool with_z = is_dissipative(sys.kind);
  std::string out = "t";
  for (int i = 1; i <= n; ++i) out += ",x" + std::to_string(i);
  for (int a = 1; a <= k; ++a) out += ",y" + std::to_string(a);
  if (with_z) out += ",z";
  out += ",H";
  for (std::size_t c = 1; c <= sys.casimirs.size(); ++c) out += ",C" + std::to_string(c);
  out += '\n';
  for (std::size_t step = 0; step < traj.states.size(); ++step) {
    const DynState& s = traj.states[step];
    format_double(out, traj.times[step]);
    for (double v : s.x) { out += ','; format_double(out, v); }
    for (double v : s.y) { out += ','; format_double(out, v); }
    if (with_z) { out += ','; format_double(out, *s.z); }
    out += ',';
    format_double(out, traj.energy[step]);
    for (const auto& col : traj.casimirs) { out += ','; format_double(out, col[step]); }
    out += '\n';
  }
  return out;
}

Trajectory parse_trajectory_csv(std::string_view text, int n, int k, bool with_z) {
  std::vector<std::string> lines;
  {
    std::string line;
    std::istringstream in{std::string(text)};
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) lines.push_back(line);
    }
  }
  if (lines.empty()) throw SchemaError("trajectory", "empty file");

  auto split = [](const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) cells.push_back(cell);
    return cells;
  };

  const auto header = split(lines[0]);
  const std::size_t state_cols = 1 + static_cast<std::size_t>(n + k) + (with_z ? 1 : 0);
  std::vector<std::string> expected{"t"};
  for (int i = 1; i <= n; ++i) expected.push_back("x" + std::to_string(i));
  for (int a = 1; a <= k; ++a) expected.push_back("y" + std::to_string(a));
  if (with_z) expected.emplace_back("z");
  if (header.size() < state_cols + 1 ||
      !std::equal(expected.begin(), expected.end(), header.begin()) ||
      header[state_cols] != "H") {
    throw SchemaError("trajectory header", "expected columns t,x1..x" + std::to_string(n) +
                                               ",y1..y" + std::to_string(k) +
                                               (with_z ? ",z" : "") + ",H");
  }
  const std::size_t casimirs = header.size() - state_cols - 1;

  Trajectory traj;
  traj.casimirs.resize(casimirs);
  for (std::size_t row = 1; row < lines.size(); ++row) {
    const auto cells = split(lines[row]);
    if (cells.size() != header.size()) {
      throw SchemaError("trajectory line " + std::to_string(row + 1),
                        "expected " + std::to_string(header.size()) + " fields");
    }
    std::vector<double> v(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const auto& cell = cells[c];
      const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v[c]);
      if (ec != std::errc() || ptr != cell.data() + cell.size()) {
        throw SchemaError("trajectory line " + std::to_string(row + 1) + " column " + header[c],
                          "not a number: '" + cell + "'");
      }
    }
    DynState s;
    s.x.assign(v.begin() + 1, v.begin() + 1 + n);
    s.y.assign(v.begin() + 1 + n, v.begin() + 1 + n + k);
    if (with_z) s.z = v[state_cols - 1];
    if (!traj.times.empty() && !(v[0] > traj.times.back())) {
      throw SchemaError("trajectory line " + std::to_string(row + 1), "times must increase");
    }
    traj.times.push_back(v[0]);
    traj.energy.push_back(v[state_cols]);
    for (std::size_t c = 0; c < casimirs; ++c) traj.casimirs[c].push_back(v[state_cols + 1 + c]);
    traj.states.push_back(std::move(s));
  }
  return traj;
}

}  // namespace algebroid

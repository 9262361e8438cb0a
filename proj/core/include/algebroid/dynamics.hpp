#pragma once

// Hamiltonian and Lagrangian dynamics on a Lie algebroid and on its dual,
// reversible and dissipative. Every system is written once against the total
// algebroid; the Lie-algebra (n = 0), tangent-bundle and two-block forms are
// the same equations with a particular anchor and structure.
//
// Conventions (C^gamma_{alpha beta} = structure(alpha, beta, gamma)):
//   hamilton             x' = a y_H
//                        y'_alpha = -C^gamma_{alpha beta} y_gamma H_{y_beta} - a^i_alpha H_{x^i}
//   dissipative-hamilton as hamilton, plus y'_alpha -= y_alpha H_z, z' = y H_y - H
//   euler-lagrange       x' = a y
//                        d/dt L_{y^alpha} = a^i_alpha L_{x^i} - C^gamma_{alpha beta} y^beta L_{y^gamma}
//   herglotz             as euler-lagrange, plus L_z L_{y^alpha} on the right, z' = L

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "algebroid/algebroid.hpp"
#include "algebroid/bdcp.hpp"

namespace algebroid {

/// A scalar function of (x, y[, z]) with its symbolic first derivatives and
/// the fiber second derivatives needed by the Lagrangian solvers.
class EnergyLike {
 public:
  EnergyLike() = default;
  /// Throws ArityError if `value` uses x_i with i > n, y_a with a > k, or z
  /// when `with_z` is false.
  EnergyLike(Expr value, int n, int k, bool with_z);
  static EnergyLike parse(std::string_view text, int n, int k, bool with_z);

  const Expr& expr() const { return value_; }
  int base_dim() const { return n_; }
  int rank() const { return k_; }
  bool with_z() const { return with_z_; }

  const Expr& dx(int i) const { return dx_[i]; }
  const Expr& dy(int a) const { return dy_[a]; }
  const Expr& dz() const { return dz_; }
  const Expr& dyy(int a, int b) const { return dyy_[static_cast<std::size_t>(a) * k_ + b]; }
  const Expr& dyx(int a, int i) const { return dyx_[static_cast<std::size_t>(a) * n_ + i]; }
  const Expr& dyz(int a) const { return dyz_[a]; }

 private:
  Expr value_;
  int n_ = 0;
  int k_ = 0;
  bool with_z_ = false;
  std::vector<Expr> dx_, dy_, dyy_, dyx_, dyz_;
  Expr dz_;
};

using CasimirFn = EnergyLike;

struct DynState {
  std::vector<double> x;
  std::vector<double> y;
  std::optional<double> z;

  friend bool operator==(const DynState&, const DynState&) = default;
};

Env env_of(const DynState& s);

enum class DynamicsKind { hamilton, dissipative_hamilton, euler_lagrange, herglotz };

std::string_view dynamics_name(DynamicsKind kind);
/// Accepts the canonical names plus lie-poisson, euler-poincare and contact.
DynamicsKind dynamics_from_name(std::string_view name);
bool is_dissipative(DynamicsKind kind);
bool is_lagrangian(DynamicsKind kind);

DynState hamiltonian_rhs(const AlgebroidSpec& spec, const EnergyLike& H, const DynState& s);
DynState dissipative_hamiltonian_rhs(const AlgebroidSpec& spec, const EnergyLike& H,
                                     const DynState& s);
DynState euler_lagrange_rhs(const AlgebroidSpec& spec, const EnergyLike& L, const DynState& s);
DynState herglotz_rhs(const AlgebroidSpec& spec, const EnergyLike& L, const DynState& s);

// Two-block conveniences; they assemble the total algebroid on every call.
DynState hamiltonian_rhs(const BdcpSpec& b, const EnergyLike& H, const DynState& s);
DynState dissipative_hamiltonian_rhs(const BdcpSpec& b, const EnergyLike& H, const DynState& s);
DynState euler_lagrange_rhs(const BdcpSpec& b, const EnergyLike& L, const DynState& s);
DynState herglotz_rhs(const BdcpSpec& b, const EnergyLike& L, const DynState& s);

/// E_L = y^alpha L_{y^alpha} - L.
double energy_function(const EnergyLike& L, const DynState& s);
/// Symbolic E_L with the same arity as L.
EnergyLike energy_function_expr(const EnergyLike& L);

/// p_alpha = L_{y^alpha}.
std::vector<double> legendre_map(const EnergyLike& L, const DynState& s);

/// Fiber Hessian condition numbers above this are treated as singular.
inline constexpr double kMaxHessianCondition = 1e12;

/// A fully specified vector field plus the functions monitored along it.
struct System {
  AlgebroidSpec spec;
  DynamicsKind kind = DynamicsKind::hamilton;
  EnergyLike energy;
  std::vector<CasimirFn> casimirs;

  /// Throws ShapeMismatch / ArityError when the pieces do not fit together.
  void validate() const;
  void validate_state(const DynState& s) const;

  DynState rhs(const DynState& s) const;
  /// H for Hamiltonian kinds, E_L for Lagrangian kinds.
  double monitored_energy(const DynState& s) const;
};

enum class Method { rk4, rk45 };

std::string_view method_name(Method m);
Method method_from_name(std::string_view name);

struct IntegrateOptions {
  double t0 = 0.0;
  double t1 = 1.0;
  double dt = 1e-2;  // fixed step for rk4, initial step for rk45
  Method method = Method::rk45;
  double rtol = 1e-9;
  double atol = 1e-12;
  double dt_min = 1e-12;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<DynState> states;
  std::vector<double> energy;                 // monitored_energy per state
  std::vector<std::vector<double>> casimirs;  // [casimir][step]
};

/// States at every accepted step, first entry s0 at t0, last at t1.
Trajectory integrate(const System& sys, const DynState& s0, const IntegrateOptions& opts);

/// One trajectory per initial state, in input order; runs on up to `workers`
/// threads and gives the same result for any worker count.
std::vector<Trajectory> integrate_batch(const System& sys, const std::vector<DynState>& s0,
                                        const IntegrateOptions& opts, int workers);

struct MonitorReport {
  DynamicsKind kind = DynamicsKind::hamilton;
  std::size_t samples = 0;
  /// max |E(t) - E(t0)|; only a conservation claim for reversible kinds.
  double energy_drift = 0.0;
  /// Dissipative kinds: max |dH/dt + H_z H| (Hamiltonian side) or
  /// max |dE_L/dt - L_z E_L| (Herglotz), time derivatives taken analytically.
  std::optional<double> dissipation_residual;
  std::vector<double> casimir_drift;
};

MonitorReport monitor_invariants(const Trajectory& traj, const System& sys);

/// Time derivative of f along the system's vector field at s, by the chain rule.
double time_derivative(const EnergyLike& f, const DynState& s, const DynState& rate);

std::string trajectory_csv(const Trajectory& traj, const System& sys);
/// Reads the state columns back; monitor columns are recomputed by the caller.
Trajectory parse_trajectory_csv(std::string_view text, int n, int k, bool with_z);

}  // namespace algebroid

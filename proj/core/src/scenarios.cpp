#include "algebroid/scenarios.hpp"

#include <functional>

namespace algebroid {
namespace {

Expr num(double v) { return Expr::number(v); }

// Structure constants of so(3) in the basis (e1, e2, e3): [e_i, e_j] = eps_ijk e_k.
template <class Set>
void levi_civita(Set&& set) {
  set(0, 1, 2, num(1));
  set(1, 2, 0, num(1));
  set(2, 0, 1, num(1));
}

AlgebroidSpec so3() {
  AlgebroidSpec spec(0, 3);
  levi_civita([&](int a, int b, int c, Expr e) { spec.set_structure(a, b, c, e); });
  return spec;
}

Scenario tangent_r2() {
  Scenario s;
  s.name = "tangent-R2";
  s.summary = "tangent bundle of R^2, classical mechanics";
  s.spec = tangent_algebroid(2);
  s.energies = {
      {"hamiltonian", DynamicsKind::hamilton, "(y1^2+y2^2)/2+(x1^2+x2^2)/2"},
      {"lagrangian", DynamicsKind::euler_lagrange, "(y1^2+y2^2)/2-(x1^2+x2^2)/2"},
  };
  s.expected_level = HierarchyLevel::direct;
  s.default_dynamics = DynamicsKind::hamilton;
  s.default_state = {1.0, 0.0, 0.0, 1.0};
  s.t1 = 2 * 3.141592653589793;
  s.dt = 1e-3;
  s.facts = {
      "identity anchor: Hamilton's equations are x' = p, p' = -x",
      "solution x(t) = x0 cos t + p0 sin t, period 2*pi",
  };
  return s;
}

Scenario so3_rigid_body() {
  Scenario s;
  s.name = "so3-rigid-body";
  s.summary = "free rigid body on so(3)*, inertia (1, 2, 3)";
  s.spec = so3();
  s.energies = {
      {"hamiltonian", DynamicsKind::hamilton, "y1^2/2+y2^2/4+y3^2/6"},
      {"lagrangian", DynamicsKind::euler_lagrange, "y1^2/2+y2^2+3*y3^2/2"},
  };
  s.casimirs = {"y1^2+y2^2+y3^2"};
  s.expected_level = HierarchyLevel::direct;
  s.default_dynamics = DynamicsKind::hamilton;
  s.default_state = {1.0, 0.01, 0.01};
  s.t1 = 100.0;
  s.dt = 1e-2;
  s.facts = {
      "Lie-Poisson equations are Euler's equations y' = y x omega, omega_i = y_i / I_i",
      "y1^2+y2^2+y3^2 is a Casimir; the kinetic energy is conserved",
      "single-block algebra, so it classifies as a direct product with q = 0",
  };
  return s;
}

Scenario se3_heavy_top() {
  Scenario s;
  s.name = "se3-heavy-top";
  s.summary = "heavy top on se(3)* = (R^3 x| so(3))*, first block R^3";
  BdcpSpec b(0, 3, 3);
  levi_civita([&](int a, int c, int d, Expr e) { b.theta().set(a, c, d, e); });
  // [e_a, e_alpha] = eps_{a alpha beta} e_beta: rotations acting on translations.
  for (int a = 0; a < 3; ++a) {
    for (int al = 0; al < 3; ++al) {
      for (int be = 0; be < 3; ++be) {
        if (a == al || al == be || a == be) continue;
        const bool even = (al - a + 3) % 3 == 1;
        b.rho().set(a, al, be, num(even ? 1.0 : -1.0));
      }
    }
  }
  s.spec = b;
  s.energies = {
      {"hamiltonian", DynamicsKind::hamilton, "y4^2/2+y5^2/4+y6^2/6+y3"},
      {"lagrangian", DynamicsKind::euler_lagrange,
       "y4^2/2+y5^2+3*y6^2/2+(y1^2+y2^2+y3^2)/2"},
  };
  s.casimirs = {"y1^2+y2^2+y3^2", "y1*y4+y2*y5+y3*y6"};
  s.expected_level = HierarchyLevel::semidirect;
  s.default_dynamics = DynamicsKind::hamilton;
  s.default_state = {0.0, 0.6, 0.8, 0.3, 0.1, 0.5};
  s.t1 = 20.0;
  s.facts = {
      "total algebra is se(3): [r_i, r_j] = eps_ijk r_k, [r_i, t_j] = eps_ijk t_k, [t_i, t_j] = 0",
      "|Gamma|^2 and Gamma.Pi are Casimirs (Gamma = y1..y3, Pi = y4..y6)",
  };
  return s;
}

Scenario heisenberg_cocycle() {
  Scenario s;
  s.name = "heisenberg-cocycle";
  s.summary = "Heisenberg algebra as a 2-cocycle extension of R^2 by R";
  BdcpSpec b(0, 1, 2);
  b.psi().set(0, 1, 0, num(1));  // [X, Y] = Z
  s.spec = b;
  s.energies = {
      {"hamiltonian", DynamicsKind::hamilton, "(y1^2+y2^2+y3^2)/2"},
      {"lagrangian", DynamicsKind::euler_lagrange, "(y1^2+y2^2+y3^2)/2"},
  };
  s.casimirs = {"y1"};
  s.expected_level = HierarchyLevel::cocycle_ext;
  s.default_dynamics = DynamicsKind::hamilton;
  s.default_state = {0.5, 1.0, 0.0};
  s.facts = {
      "basis (Z, X, Y) with [X, Y] = Z, Z central",
      "y1 is a Casimir; (y2, y3) rotates with angular speed y1",
  };
  return s;
}

Scenario sl2_zeta_split() {
  Scenario s;
  s.name = "sl2-zeta-split";
  s.summary = "sl(2,R) split as span{E,F} + span{H}";
  BdcpSpec b(0, 2, 1);
  b.zeta().set(0, 1, 0, num(1));   // [E, F] = H
  b.rho().set(0, 0, 0, num(2));    // [H, E] = 2E
  b.rho().set(0, 1, 1, num(-2));   // [H, F] = -2F
  s.spec = b;
  s.energies = {
      {"hamiltonian", DynamicsKind::hamilton, "(y1^2+y2^2+y3^2)/2"},
      {"lagrangian", DynamicsKind::euler_lagrange, "(y1^2+y2^2+y3^2)/2"},
  };
  s.casimirs = {"y3^2+4*y1*y2"};
  s.expected_level = HierarchyLevel::bdcp;
  s.default_dynamics = DynamicsKind::hamilton;
  s.default_state = {0.3, -0.2, 0.5};
  s.facts = {
      "basis (E, F, H) with [H, E] = 2E, [H, F] = -2F, [E, F] = H",
      "span{E, F} is not closed under the bracket, so zeta is nonzero",
      "y3^2 + 4 y1 y2 is the Killing-form Casimir",
  };
  return s;
}

Scenario so3xso3_bicocycle() {
  Scenario s;
  s.name = "so3xso3-bicocycle";
  s.summary = "so(3) + so(3) split as span{a1,a2,b3} + span{a3,b1,b2}";
  BdcpSpec b(0, 3, 3);
  b.zeta().set(0, 1, 0, num(1));    // [a1, a2] = a3
  b.psi().set(1, 2, 2, num(1));     // [b1, b2] = b3
  b.rho().set(0, 0, 1, num(1));     // [a3, a1] = a2
  b.rho().set(0, 1, 0, num(-1));    // [a3, a2] = -a1
  b.sigma().set(1, 2, 2, num(-1));  // [b1, b3] = -b2
  b.sigma().set(2, 2, 1, num(1));   // [b2, b3] = b1
  s.spec = b;
  s.energies = {
      {"hamiltonian", DynamicsKind::hamilton, "y1^2/2+y2^2/4+y4^2/6+y5^2/2+y6^2/4+y3^2/6"},
      {"lagrangian", DynamicsKind::euler_lagrange, "y1^2/2+y2^2+3*y4^2/2+y5^2/2+y6^2+3*y3^2/2"},
  };
  s.casimirs = {"y1^2+y2^2+y4^2", "y5^2+y6^2+y3^2"};
  s.expected_level = HierarchyLevel::bdcp;
  s.default_dynamics = DynamicsKind::hamilton;
  s.default_state = {1.0, 0.01, 0.2, 0.01, 0.5, 0.3};
  s.t1 = 20.0;
  s.facts = {
      "total algebra is the direct sum of two copies of so(3)",
      "both blocks fail to close: zeta and psi are nonzero",
      "the two rigid-body Casimirs y1^2+y2^2+y4^2 and y5^2+y6^2+y3^2 are conserved",
  };
  return s;
}

Scenario contact_damped_oscillator() {
  Scenario s;
  s.name = "contact-damped-oscillator";
  s.summary = "tangent bundle of R with linear damping through z";
  s.spec = tangent_algebroid(1);
  s.energies = {
      {"contact-hamiltonian", DynamicsKind::dissipative_hamilton, "y1^2/2+x1^2/2+0.1*z"},
      {"herglotz-lagrangian", DynamicsKind::herglotz, "y1^2/2-x1^2/2-0.1*z"},
      {"hamiltonian", DynamicsKind::hamilton, "y1^2/2+x1^2/2"},
      {"lagrangian", DynamicsKind::euler_lagrange, "y1^2/2-x1^2/2"},
  };
  s.expected_level = HierarchyLevel::direct;
  s.default_dynamics = DynamicsKind::dissipative_hamilton;
  s.default_state = {1.0, 0.0, 0.0};
  s.t1 = 20.0;
  s.facts = {
      "both dissipative presets give x'' + 0.1 x' + x = 0",
      "x(t) = exp(-0.05 t) (cos(w t) + 0.05/w sin(w t)), w = sqrt(1 - 0.0025), from x=1, x'=0",
      "dH/dt = -0.1 H along the contact flow",
  };
  return s;
}

Scenario so3_ep_herglotz() {
  Scenario s;
  s.name = "so3-ep-herglotz";
  s.summary = "Euler-Poincare-Herglotz on so(3) with identity inertia";
  s.spec = so3();
  s.energies = {
      {"herglotz-lagrangian", DynamicsKind::herglotz, "(y1^2+y2^2+y3^2)/2-0.1*z"},
      {"dissipative-hamiltonian", DynamicsKind::dissipative_hamilton,
       "(y1^2+y2^2+y3^2)/2+0.1*z"},
      {"lagrangian", DynamicsKind::euler_lagrange, "(y1^2+y2^2+y3^2)/2"},
      {"hamiltonian", DynamicsKind::hamilton, "(y1^2+y2^2+y3^2)/2"},
  };
  s.casimirs = {"y1^2+y2^2+y3^2"};
  s.expected_level = HierarchyLevel::direct;
  s.default_dynamics = DynamicsKind::herglotz;
  s.default_state = {1.0, 0.5, -0.3, 0.0};
  s.t1 = 10.0;
  s.facts = {
      "structure terms vanish for identity inertia, so y' = -0.1 y",
      "y(t) = y(0) exp(-0.1 t)",
  };
  return s;
}

const std::vector<std::function<Scenario()>>& registry() {
  static const std::vector<std::function<Scenario()>> r{
      tangent_r2,        so3_rigid_body,     se3_heavy_top,
      heisenberg_cocycle, sl2_zeta_split,    so3xso3_bicocycle,
      contact_damped_oscillator, so3_ep_herglotz,
  };
  return r;
}

}  // namespace

AlgebroidSpec Scenario::total() const {
  if (const auto* a = std::get_if<AlgebroidSpec>(&spec)) return *a;
  return assemble_total(std::get<BdcpSpec>(spec));
}

BdcpSpec Scenario::as_bdcp() const {
  if (const auto* b = std::get_if<BdcpSpec>(&spec)) return *b;
  return single_block(std::get<AlgebroidSpec>(spec));
}

const EnergyPreset* Scenario::energy_for(DynamicsKind kind) const {
  for (const auto& e : energies) {
    if (e.kind == kind) return &e;
  }
  return nullptr;
}

const EnergyPreset* Scenario::find_energy(const std::string& preset) const {
  for (const auto& e : energies) {
    if (e.name == preset) return &e;
  }
  return nullptr;
}

System Scenario::system(DynamicsKind kind) const {
  const EnergyPreset* preset = energy_for(kind);
  if (!preset) {
    throw Error(ErrorCategory::usage, "scenario '" + name + "' has no " +
                                          std::string(dynamics_name(kind)) + " energy");
  }
  System sys;
  sys.spec = total();
  sys.kind = kind;
  const int n = sys.spec.base_dim();
  const int k = sys.spec.rank();
  sys.energy = EnergyLike::parse(preset->expr, n, k, is_dissipative(kind));
  if (kind == DynamicsKind::hamilton) {
    for (const auto& c : casimirs) sys.casimirs.push_back(EnergyLike::parse(c, n, k, false));
  }
  return sys;
}

Scenario get_scenario(const std::string& name) {
  for (const auto& make : registry()) {
    Scenario s = make();
    if (s.name == name) return s;
  }
  throw UnknownScenario(name);
}

std::vector<std::pair<std::string, std::string>> list_scenarios() {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& make : registry()) {
    const Scenario s = make();
    out.emplace_back(s.name, std::string(level_name(s.level())));
  }
  return out;
}

}  // namespace algebroid

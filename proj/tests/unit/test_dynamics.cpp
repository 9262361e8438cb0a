#include <cmath>
#include <numbers>
#include <random>

#include "algebroid/dynamics.hpp"
#include "algebroid/scenarios.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace algebroid;
using testing_support::max_abs_diff;
using testing_support::random_state;
using testing_support::spec_from;

namespace {

EnergyLike energy(const std::string& text, int n, int k, bool with_z = false) {
  return EnergyLike::parse(text, n, k, with_z);
}

DynState st(std::vector<double> x, std::vector<double> y, std::optional<double> z = std::nullopt) {
  return DynState{std::move(x), std::move(y), z};
}

const char* kRigidH = "y1^2/2 + y2^2/4 + y3^2/6";

// Random polynomial energies in the fiber, optionally touching x and z.
std::string random_energy(std::mt19937_64& rng, int n, int k, bool with_z) {
  std::uniform_int_distribution<int> coef(1, 5);
  std::string out;
  for (int a = 1; a <= k; ++a) {
    out += std::to_string(coef(rng)) + "*y" + std::to_string(a) + "^2/4 + ";
    if (a > 1) out += "0.3*y" + std::to_string(a) + "*y" + std::to_string(a - 1) + " + ";
  }
  for (int i = 1; i <= n; ++i) out += "sin(x" + std::to_string(i) + ")*y1 + x" + std::to_string(i) + "^2 + ";
  if (with_z) out += "0.2*z*y1 + 0.1*z^2 + ";
  return out + "0";
}

}  // namespace

TEST_CASE("canonical Hamilton equations on the tangent line") {
  const auto d = hamiltonian_rhs(tangent_algebroid(1), energy("(y1^2 + x1^2)/2", 1, 1),
                                 st({1.0}, {0.5}));
  CHECK(d.x == std::vector<double>{0.5});
  CHECK(d.y == std::vector<double>{-1.0});
  CHECK_FALSE(d.z.has_value());
}

TEST_CASE("rigid body Lie-Poisson equations are y x grad H") {
  const std::vector<double> y{1, 2, 3};
  const auto d = hamiltonian_rhs(spec_from(oracle::so3()), energy(kRigidH, 0, 3), st({}, y));
  const auto expected = oracle::cross(y, {1.0, 1.0, 1.0});
  CHECK(max_abs_diff(d.y, expected) < 1e-15);
}

TEST_CASE("constant Hamiltonian gives no motion") {
  const auto d = hamiltonian_rhs(spec_from(oracle::so3()), energy("4.5", 0, 3), st({}, {1, 2, 3}));
  CHECK(d.y == std::vector<double>{0, 0, 0});
}

TEST_CASE("contact Hamilton equations") {
  const AlgebroidSpec line = tangent_algebroid(1);
  const auto d = dissipative_hamiltonian_rhs(line, energy("y1^2/2 + x1^2/2 + 0.1*z", 1, 1, true),
                                             st({1.0}, {1.0}, 0.0));
  CHECK(d.x[0] == 1.0);
  CHECK(d.y[0] == doctest::Approx(-1.1).epsilon(1e-15));
  CHECK(*d.z == 0.0);  // y H_y - H = 1 - 1

  const auto decay = dissipative_hamiltonian_rhs(line, energy("z", 1, 1, true), st({0.4}, {2.0}, 3.0));
  CHECK(decay.x[0] == 0.0);
  CHECK(decay.y[0] == -2.0);
  CHECK(*decay.z == -3.0);

  const auto still = dissipative_hamiltonian_rhs(line, energy("0", 1, 1, true), st({0.4}, {2.0}, 3.0));
  CHECK(still.x[0] == 0.0);
  CHECK(still.y[0] == 0.0);
  CHECK(*still.z == 0.0);
}

TEST_CASE("Euler-Lagrange equations") {
  const auto newton = euler_lagrange_rhs(tangent_algebroid(1), energy("y1^2/2 - x1^2/2", 1, 1),
                                         st({1.0}, {0.0}));
  CHECK(newton.x[0] == 0.0);
  CHECK(newton.y[0] == -1.0);

  std::mt19937_64 rng(1);
  const AlgebroidSpec so3 = spec_from(oracle::so3());
  const AlgebroidSpec abelian(0, 3);
  for (int trial = 0; trial < 20; ++trial) {
    const DynState s = random_state(rng, 0, 3, false);
    const auto round = euler_lagrange_rhs(so3, energy("(y1^2 + y2^2 + y3^2)/2", 0, 3), s);
    CHECK(max_abs_diff(round.y, {0, 0, 0}) < 1e-15);
    const auto flat = euler_lagrange_rhs(abelian, energy("y1^2 + y1*y2 + 2*y2^2 + 3*y3^2", 0, 3), s);
    CHECK(max_abs_diff(flat.y, {0, 0, 0}) == 0.0);
  }
}

TEST_CASE("Herglotz equations") {
  const AlgebroidSpec line = tangent_algebroid(1);
  const auto damped = herglotz_rhs(line, energy("y1^2/2 - x1^2/2 - 0.1*z", 1, 1, true),
                                   st({0.8}, {-0.6}, 0.3));
  CHECK(damped.x[0] == -0.6);
  CHECK(damped.y[0] == doctest::Approx(-0.8 - 0.1 * -0.6).epsilon(1e-15));

  std::mt19937_64 rng(2);
  const EnergyLike no_z = energy("y1^2/2 + x1*y1 - x1^4", 1, 1, true);
  const EnergyLike plain = energy("y1^2/2 + x1*y1 - x1^4", 1, 1, false);
  for (int trial = 0; trial < 20; ++trial) {
    DynState s = random_state(rng, 1, 1, true);
    const auto h = herglotz_rhs(line, no_z, s);
    s.z.reset();
    const auto el = euler_lagrange_rhs(line, plain, s);
    CHECK(h.x == el.x);
    CHECK(h.y == el.y);
    CHECK(*h.z == doctest::Approx(eval(plain.expr(), env_of(s))).epsilon(1e-15));
  }

  const DynState s = st({}, {1.0, -2.0, 0.5}, 0.25);
  const EnergyLike L = energy("(y1^2 + y2^2 + y3^2)/2 - 0.1*z", 0, 3, true);
  const auto d = herglotz_rhs(spec_from(oracle::so3()), L, s);
  CHECK(max_abs_diff(d.y, {-0.1, 0.2, -0.05}) < 1e-15);
  CHECK(*d.z == doctest::Approx(2.625 - 0.025).epsilon(1e-15));
}

TEST_CASE("singular Lagrangians are rejected") {
  CHECK_THROWS_AS(euler_lagrange_rhs(tangent_algebroid(1), energy("3*y1 + x1^2", 1, 1), st({1}, {1})),
                  SingularLagrangian);
  CHECK_THROWS_AS(euler_lagrange_rhs(AlgebroidSpec(0, 2), energy("(y1 + y2)^2", 0, 2), st({}, {1, 2})),
                  SingularLagrangian);
  CHECK_THROWS_AS(herglotz_rhs(AlgebroidSpec(0, 2), energy("(y1 + y2)^2 + z", 0, 2, true),
                               st({}, {1, 2}, 0.0)),
                  SingularLagrangian);
}

TEST_CASE("energy function and Legendre map") {
  const EnergyLike round = energy("(y1^2 + y2^2 + y3^2)/2", 0, 3);
  const DynState s = st({}, {0.5, -1.0, 2.0});
  CHECK(energy_function(round, s) == doctest::Approx(2.625).epsilon(1e-15));
  CHECK(legendre_map(round, s) == s.y);

  CHECK(energy_function(energy("y1^2/2 - x1^2/2", 1, 1), st({1.0}, {2.0})) == 2.5);
  CHECK(energy_function(energy("2*y1 + x1^2", 1, 1), st({3.0}, {-7.0})) == -9.0);

  const auto p = legendre_map(energy("y1^2/2 + y2^2/4 + y3^2/6", 0, 3), st({}, {1.0, 1.0, 3.0}));
  CHECK(max_abs_diff(p, {1.0, 0.5, 1.0}) < 1e-15);

  const EnergyLike linear = energy("3*y1", 1, 1);
  CHECK(legendre_map(linear, st({0.0}, {5.0})) == std::vector<double>{3.0});

  const EnergyLike e = energy_function_expr(energy("y1^2/2 - x1^2/2 + 0.1*z*y1", 1, 1, true));
  CHECK(eval(e.expr(), Env{std::vector<double>{1.0}, std::vector<double>{2.0}, 0.5}) ==
        doctest::Approx(2.5).epsilon(1e-15));
}

TEST_CASE("arity is checked against the algebroid") {
  CHECK_THROWS_AS(energy("x2 + y1", 1, 1), ArityError);
  CHECK_THROWS_AS(energy("y3", 0, 2), ArityError);
  CHECK_THROWS_AS(energy("y1 + z", 0, 2, false), ArityError);
  System sys{tangent_algebroid(1), DynamicsKind::hamilton, energy("y1^2", 1, 1), {}};
  CHECK_NOTHROW(sys.validate());
  sys.kind = DynamicsKind::dissipative_hamilton;
  CHECK_THROWS_AS(sys.validate(), Error);
  CHECK_THROWS_AS(sys.validate_state(st({}, {1.0})), Error);
}

TEST_CASE("two-block Hamilton equations agree with the block form") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 40; ++trial) {
    const BdcpSpec b = oracle::random_bdcp(rng);
    const int n = b.base_dim(), k = b.total_rank();
    for (bool dissipative : {false, true}) {
      const EnergyLike H = energy(random_energy(rng, n, k, dissipative), n, k, dissipative);
      const DynState s = random_state(rng, n, k, dissipative, -0.9, 0.9);
      const DynState generic = dissipative ? dissipative_hamiltonian_rhs(b, H, s) : hamiltonian_rhs(b, H, s);
      const DynState block = oracle::block_hamilton(b, H, s, dissipative);
      CHECK(max_abs_diff(generic, block) < 1e-12);
    }
  }
}

TEST_CASE("two-block Lagrange equations agree with the block form") {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 40; ++trial) {
    const BdcpSpec b = oracle::random_bdcp(rng);
    const int n = b.base_dim(), k = b.total_rank();
    for (bool dissipative : {false, true}) {
      const EnergyLike L = energy(random_energy(rng, n, k, dissipative), n, k, dissipative);
      const DynState s = random_state(rng, n, k, dissipative, -0.9, 0.9);
      const DynState rate = dissipative ? herglotz_rhs(b, L, s) : euler_lagrange_rhs(b, L, s);
      const auto lhs = oracle::momentum_rate(L, s, rate);
      const auto rhs = oracle::block_lagrange_forces(b, L, s, -1.0, dissipative);
      CHECK(max_abs_diff(lhs, rhs) < 1e-10);
    }
  }
}

TEST_CASE("energy balance at random states") {
  std::mt19937_64 rng(23);
  for (const char* name : {"so3xso3-bicocycle", "sl2-zeta-split", "se3-heavy-top", "heisenberg-cocycle"}) {
    const AlgebroidSpec spec = get_scenario(name).total();
    const int k = spec.rank();
    for (int trial = 0; trial < 50; ++trial) {
      const EnergyLike H = energy(random_energy(rng, 0, k, false), 0, k);
      const DynState s = random_state(rng, 0, k, false);
      CHECK(std::abs(time_derivative(H, s, hamiltonian_rhs(spec, H, s))) < 1e-12);

      const EnergyLike Hz = energy(random_energy(rng, 0, k, true), 0, k, true);
      const DynState sz = random_state(rng, 0, k, true);
      const double dH = time_derivative(Hz, sz, dissipative_hamiltonian_rhs(spec, Hz, sz));
      const Env env = env_of(sz);
      CHECK(std::abs(dH + eval(Hz.dz(), env) * eval(Hz.expr(), env)) < 1e-12);
    }
  }
}

TEST_CASE("integration") {
  System osc{tangent_algebroid(1), DynamicsKind::hamilton, energy("(y1^2 + x1^2)/2", 1, 1), {}};
  IntegrateOptions o;
  o.t1 = 2 * std::numbers::pi;
  o.dt = 1e-3;
  o.method = Method::rk4;
  const Trajectory tr = integrate(osc, st({1.0}, {0.0}), o);
  CHECK(tr.times.front() == 0.0);
  CHECK(tr.times.back() == o.t1);
  CHECK(max_abs_diff(tr.states.back(), st({1.0}, {0.0})) < 1e-7);

  System zero{AlgebroidSpec(0, 2), DynamicsKind::hamilton, energy("1", 0, 2), {}};
  o.method = Method::rk45;
  o.t1 = 3.0;
  const Trajectory flat = integrate(zero, st({}, {0.25, -2.0}), o);
  for (const auto& s : flat.states) CHECK(s.y == std::vector<double>{0.25, -2.0});
  const MonitorReport m = monitor_invariants(flat, zero);
  CHECK(m.energy_drift == 0.0);
  CHECK(m.casimir_drift.empty());

  System body = get_scenario("so3-rigid-body").system(DynamicsKind::hamilton);
  IntegrateOptions ro;
  ro.t1 = 100.0;
  ro.dt = 1e-2;
  const Trajectory rb = integrate(body, st({}, {1.0, 0.01, 0.01}), ro);
  const MonitorReport rm = monitor_invariants(rb, body);
  CHECK(rm.energy_drift < 1e-8);
  REQUIRE(rm.casimir_drift.size() == 1);
  CHECK(rm.casimir_drift[0] < 1e-8);
}

TEST_CASE("rk45 is deterministic and batch results match single runs") {
  const Scenario sc = get_scenario("se3-heavy-top");
  const System sys = sc.system(DynamicsKind::hamilton);
  IntegrateOptions o;
  o.t1 = 2.0;
  std::vector<DynState> starts;
  std::mt19937_64 rng(4);
  for (int i = 0; i < 5; ++i) starts.push_back(random_state(rng, 0, 6, false));
  const auto serial = integrate_batch(sys, starts, o, 1);
  const auto parallel = integrate_batch(sys, starts, o, 4);
  REQUIRE(serial.size() == 5);
  for (std::size_t i = 0; i < starts.size(); ++i) {
    const Trajectory single = integrate(sys, starts[i], o);
    CHECK(serial[i].times == single.times);
    CHECK(serial[i].states == single.states);
    CHECK(parallel[i].states == single.states);
  }
}

TEST_CASE("integration errors") {
  System blowup{tangent_algebroid(1), DynamicsKind::hamilton, energy("y1^2/2 - x1^4", 1, 1), {}};
  IntegrateOptions o;
  o.t1 = 10.0;
  CHECK_THROWS_AS(integrate(blowup, st({1.0}, {1.0}), o), StepUnderflow);

  System wall{tangent_algebroid(1), DynamicsKind::hamilton, energy("y1 + sqrt(1 - x1)", 1, 1), {}};
  o.method = Method::rk4;
  o.dt = 0.01;
  try {
    integrate(wall, st({0.0}, {0.0}), o);
    FAIL("expected a domain error");
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("t=") != std::string::npos);
  }
}

TEST_CASE("dissipation monitors") {
  for (const char* name : {"contact-damped-oscillator", "so3-ep-herglotz"}) {
    const Scenario sc = get_scenario(name);
    for (DynamicsKind kind : {DynamicsKind::dissipative_hamilton, DynamicsKind::herglotz}) {
      const System sys = sc.system(kind);
      DynState s0 = st({}, {}, 0.0);
      const int n = sys.spec.base_dim();
      s0.x.assign(sc.default_state.begin(), sc.default_state.begin() + n);
      s0.y.assign(sc.default_state.begin() + n, sc.default_state.begin() + n + sys.spec.rank());
      IntegrateOptions o;
      o.t1 = 5.0;
      const MonitorReport m = monitor_invariants(integrate(sys, s0, o), sys);
      REQUIRE(m.dissipation_residual.has_value());
      CHECK(*m.dissipation_residual < 1e-9);
    }
  }
}

TEST_CASE("trajectory CSV round trip") {
  const Scenario sc = get_scenario("contact-damped-oscillator");
  const System sys = sc.system(DynamicsKind::dissipative_hamilton);
  IntegrateOptions o;
  o.t1 = 1.0;
  const Trajectory tr = integrate(sys, st({1.0}, {0.0}, 0.0), o);
  const std::string csv = trajectory_csv(tr, sys);
  CHECK(csv.rfind("t,x1,y1,z,H\n", 0) == 0);
  const Trajectory back = parse_trajectory_csv(csv, 1, 1, true);
  CHECK(back.times == tr.times);
  CHECK(back.states == tr.states);
  CHECK_THROWS_AS(parse_trajectory_csv(csv, 1, 1, false), Error);
  CHECK_THROWS_AS(parse_trajectory_csv("t,x1,y1,z,H\n1,0,0,0,0\n0,0,0,0,0\n", 1, 1, true), Error);
}

TEST_CASE("dynamics names") {
  CHECK(dynamics_from_name("lie-poisson") == DynamicsKind::hamilton);
  CHECK(dynamics_from_name("contact") == DynamicsKind::dissipative_hamilton);
  CHECK(dynamics_from_name("euler-poincare") == DynamicsKind::euler_lagrange);
  CHECK(dynamics_from_name("herglotz") == DynamicsKind::herglotz);
  CHECK_THROWS_AS(dynamics_from_name("newton"), Error);
  CHECK(method_from_name("rk4") == Method::rk4);
}

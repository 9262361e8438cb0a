#include "algebroid/scenarios.hpp"
#include "algebroid/verifier.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace algebroid;
using testing_support::table_distance;

TEST_CASE("registry contents") {
  const auto list = list_scenarios();
  std::vector<std::string> names;
  for (const auto& [name, label] : list) names.push_back(name);
  CHECK(names == std::vector<std::string>{"tangent-R2", "so3-rigid-body", "se3-heavy-top",
                                          "heisenberg-cocycle", "sl2-zeta-split",
                                          "so3xso3-bicocycle", "contact-damped-oscillator",
                                          "so3-ep-herglotz"});
  CHECK_THROWS_AS(get_scenario("nope"), UnknownScenario);
}

TEST_CASE("scenario tables match hand-written commutators") {
  CHECK(table_distance(get_scenario("so3-rigid-body").total(), oracle::so3()) == 0.0);
  CHECK(table_distance(get_scenario("se3-heavy-top").total(), oracle::se3()) == 0.0);
  CHECK(table_distance(get_scenario("heisenberg-cocycle").total(), oracle::heisenberg()) == 0.0);
  CHECK(table_distance(get_scenario("sl2-zeta-split").total(), oracle::sl2()) == 0.0);
  CHECK(table_distance(get_scenario("so3xso3-bicocycle").total(), oracle::so3xso3_split()) == 0.0);
  CHECK(table_distance(get_scenario("so3-ep-herglotz").total(), oracle::so3()) == 0.0);
}

TEST_CASE("every scenario is valid and carries its expected label") {
  for (const auto& [name, label] : list_scenarios()) {
    CAPTURE(name);
    const Scenario s = get_scenario(name);
    const BdcpSpec b = s.as_bdcp();
    CHECK(check_bdcp(b, SamplePlan::quasi_random(b.base_dim())).pass());
    CHECK(s.level() == s.expected_level);
    CHECK(label == level_name(s.level()));
    for (const auto& preset : s.energies) {
      CHECK_NOTHROW(s.system(preset.kind).validate());
    }
    const System sys = s.system(s.default_dynamics);
    DynState s0;
    const int n = sys.spec.base_dim(), k = sys.spec.rank();
    REQUIRE(s.default_state.size() == static_cast<std::size_t>(n + k + (is_dissipative(sys.kind) ? 1 : 0)));
    s0.x.assign(s.default_state.begin(), s.default_state.begin() + n);
    s0.y.assign(s.default_state.begin() + n, s.default_state.begin() + n + k);
    if (is_dissipative(sys.kind)) s0.z = s.default_state.back();
    CHECK_NOTHROW(sys.validate_state(s0));
  }
  CHECK(get_scenario("so3-rigid-body").level() == HierarchyLevel::direct);
  CHECK(get_scenario("se3-heavy-top").level() == HierarchyLevel::semidirect);
  CHECK(get_scenario("heisenberg-cocycle").level() == HierarchyLevel::cocycle_ext);
  CHECK(get_scenario("sl2-zeta-split").level() == HierarchyLevel::bdcp);
}

TEST_CASE("Casimirs are annihilated by the Lie-Poisson flow") {
  for (const char* name : {"so3-rigid-body", "se3-heavy-top", "heisenberg-cocycle", "sl2-zeta-split",
                           "so3xso3-bicocycle"}) {
    CAPTURE(name);
    const Scenario s = get_scenario(name);
    const AlgebroidSpec spec = s.total();
    const int k = spec.rank();
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 20; ++trial) {
      // Any Hamiltonian will do, Casimirs commute with everything.
      std::string h = "0";
      for (int a = 1; a <= k; ++a) h += " + " + std::to_string(trial % 3 + a) + "*y" + std::to_string(a) + "^2";
      h += " + y1*y" + std::to_string(k);
      const EnergyLike H = EnergyLike::parse(h, 0, k, false);
      const DynState st = testing_support::random_state(rng, 0, k, false);
      const DynState rate = hamiltonian_rhs(spec, H, st);
      for (const auto& c : s.casimirs) {
        CHECK(std::abs(time_derivative(EnergyLike::parse(c, 0, k, false), st, rate)) < 1e-12);
      }
    }
  }
}

TEST_CASE("scenarios are handed out as copies") {
  Scenario s = get_scenario("so3-rigid-body");
  std::get<AlgebroidSpec>(s.spec).set_structure(0, 1, 2, Expr::number(5));
  s.casimirs.clear();
  const Scenario fresh = get_scenario("so3-rigid-body");
  CHECK(fresh.total().structure(0, 1, 2).is_number(1));
  CHECK(fresh.casimirs.size() == 1);
}

TEST_CASE("presets") {
  const Scenario s = get_scenario("contact-damped-oscillator");
  REQUIRE(s.find_energy("contact-hamiltonian") != nullptr);
  CHECK(s.find_energy("contact-hamiltonian")->kind == DynamicsKind::dissipative_hamilton);
  CHECK(s.energy_for(DynamicsKind::herglotz) != nullptr);
  CHECK(get_scenario("heisenberg-cocycle").energy_for(DynamicsKind::herglotz) == nullptr);
  CHECK(s.find_energy("missing") == nullptr);
}

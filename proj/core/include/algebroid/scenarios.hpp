#pragma once

#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "algebroid/algebroid.hpp"
#include "algebroid/bdcp.hpp"
#include "algebroid/dynamics.hpp"

namespace algebroid {

/// A named energy function for one dynamics family.
struct EnergyPreset {
  std::string name;
  DynamicsKind kind;
  std::string expr;
};

struct Scenario {
  std::string name;
  std::string summary;
  std::variant<AlgebroidSpec, BdcpSpec> spec;
  std::vector<EnergyPreset> energies;
  /// Functions conserved by the reversible Hamiltonian flow.
  std::vector<std::string> casimirs;
  HierarchyLevel expected_level = HierarchyLevel::direct;
  DynamicsKind default_dynamics = DynamicsKind::hamilton;
  std::vector<double> default_state;  // x, y[, z]
  double t0 = 0.0;
  double t1 = 10.0;
  double dt = 1e-2;
  /// Closed forms and conserved quantities the scenario is known to satisfy.
  std::vector<std::string> facts;

  AlgebroidSpec total() const;
  /// Two-block specs as stored; single-block specs wrapped with q = 0.
  BdcpSpec as_bdcp() const;
  HierarchyLevel level() const { return classify(as_bdcp()); }

  /// First preset for `kind`; nullptr if none.
  const EnergyPreset* energy_for(DynamicsKind kind) const;
  const EnergyPreset* find_energy(const std::string& preset) const;

  /// Builds a System from the preset for `kind`, monitoring the Casimirs for
  /// the reversible Hamiltonian kind.
  System system(DynamicsKind kind) const;
};

/// Throws UnknownScenario.
Scenario get_scenario(const std::string& name);

/// Registered names with their hierarchy labels, in registry order.
std::vector<std::pair<std::string, std::string>> list_scenarios();

}  // namespace algebroid

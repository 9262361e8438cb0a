#include "algebroid_cli/cli.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "algebroid/dynamics.hpp"
#include "algebroid/scenarios.hpp"
#include "algebroid/spec_io.hpp"
#include "algebroid/verifier.hpp"

namespace algebroid::cli {
namespace {

Error usage_error(const std::string& what) { return Error(ErrorCategory::usage, what); }

std::vector<double> parse_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::string cell;
  std::istringstream in(text);
  while (std::getline(in, cell, ',')) {
    cell.erase(0, cell.find_first_not_of(" \t"));
    cell.erase(cell.find_last_not_of(" \t\r") + 1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size()) {
      throw usage_error(what + ": '" + cell + "' is not a number");
    }
    out.push_back(v);
  }
  return out;
}

DynState split_state(const std::vector<double>& v, const System& sys) {
  const int n = sys.spec.base_dim();
  const int k = sys.spec.rank();
  const bool with_z = is_dissipative(sys.kind);
  const std::size_t expected = static_cast<std::size_t>(n + k) + (with_z ? 1 : 0);
  if (v.size() != expected) {
    throw usage_error("state needs " + std::to_string(expected) + " values (x1..x" +
                      std::to_string(n) + ", y1..y" + std::to_string(k) +
                      (with_z ? ", z" : "") + "), got " + std::to_string(v.size()));
  }
  DynState s;
  s.x.assign(v.begin(), v.begin() + n);
  s.y.assign(v.begin() + n, v.begin() + n + k);
  if (with_z) s.z = v.back();
  return s;
}

bool is_tangent_bundle(const AlgebroidSpec& spec) {
  if (spec.base_dim() != spec.rank() || !spec.structure_entries().empty()) return false;
  for (int a = 0; a < spec.rank(); ++a) {
    for (int i = 0; i < spec.base_dim(); ++i) {
      if (!spec.anchor(a, i).is_number(a == i ? 1.0 : 0.0)) return false;
    }
  }
  return true;
}

// Checks the restrictions implied by the dynamics aliases.
void check_dynamics_alias(const std::string& name, const AlgebroidSpec& spec) {
  if ((name == "lie-poisson" || name == "euler-poincare") && spec.base_dim() != 0) {
    throw usage_error(name + " needs a Lie algebra (base dimension 0)");
  }
  if (name == "contact" && !is_tangent_bundle(spec)) {
    throw usage_error("contact dynamics needs a tangent-bundle algebroid");
  }
}

struct SystemRequest {
  std::string scenario;
  std::string spec_path;
  std::string dynamics;
  std::string energy;
  std::vector<std::string> casimirs;
};

struct BuiltSystem {
  System system;
  std::optional<Scenario> scenario;
};

BuiltSystem build_system(const SystemRequest& req) {
  BuiltSystem built;
  if (!req.scenario.empty()) {
    built.scenario = get_scenario(req.scenario);
    built.system.spec = built.scenario->total();
  } else if (!req.spec_path.empty()) {
    const SpecValue v = load_spec(req.spec_path);
    built.system.spec = std::holds_alternative<AlgebroidSpec>(v)
                            ? std::get<AlgebroidSpec>(v)
                            : assemble_total(std::get<BdcpSpec>(v));
  } else {
    throw usage_error("give a spec file or a scenario");
  }
  System& sys = built.system;
  const std::string dyn_name =
      !req.dynamics.empty()
          ? req.dynamics
          : built.scenario ? std::string(dynamics_name(built.scenario->default_dynamics)) : "";
  if (dyn_name.empty()) throw usage_error("--dynamics is required with a spec file");
  sys.kind = dynamics_from_name(dyn_name);
  check_dynamics_alias(dyn_name, sys.spec);

  const int n = sys.spec.base_dim();
  const int k = sys.spec.rank();
  const bool with_z = is_dissipative(sys.kind);
  std::string energy_text = req.energy;
  if (built.scenario) {
    if (energy_text.empty()) {
      const EnergyPreset* p = built.scenario->energy_for(sys.kind);
      if (!p) {
        throw usage_error("scenario '" + built.scenario->name + "' has no " + dyn_name +
                          " energy; pass --energy");
      }
      energy_text = p->expr;
    } else if (const EnergyPreset* p = built.scenario->find_energy(energy_text)) {
      energy_text = p->expr;
    }
    if (sys.kind == DynamicsKind::hamilton) {
      for (const auto& c : built.scenario->casimirs) {
        sys.casimirs.push_back(EnergyLike::parse(c, n, k, false));
      }
    }
  }
  if (energy_text.empty()) throw usage_error("--energy is required with a spec file");
  try {
    sys.energy = EnergyLike::parse(energy_text, n, k, with_z);
  } catch (Error& e) {
    e.add_context("energy");
    throw;
  }
  for (const auto& c : req.casimirs) sys.casimirs.push_back(EnergyLike::parse(c, n, k, with_z));
  sys.validate();
  return built;
}

// "scenario=NAME;dynamics=KIND[;energy=EXPR]" or "spec=PATH;dynamics=KIND;energy=EXPR".
SystemRequest parse_descriptor(const std::string& text) {
  SystemRequest req;
  std::string field;
  std::istringstream in(text);
  while (std::getline(in, field, ';')) {
    if (field.empty()) continue;
    const auto eq = field.find('=');
    if (eq == std::string::npos) throw usage_error("system descriptor field '" + field + "' lacks '='");
    const std::string key = field.substr(0, eq);
    const std::string value = field.substr(eq + 1);
    if (key == "scenario") {
      req.scenario = value;
    } else if (key == "spec") {
      req.spec_path = value;
    } else if (key == "dynamics") {
      req.dynamics = value;
    } else if (key == "energy") {
      req.energy = value;
    } else {
      throw usage_error("unknown system descriptor key '" + key + "'");
    }
  }
  if (!req.scenario.empty() && !req.spec_path.empty()) {
    throw usage_error("system descriptor names both a scenario and a spec file");
  }
  return req;
}

std::string format_g(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << v;
  return os.str();
}

void print_report(const ResidualReport& report, std::ostream& out) {
  for (const auto& c : report.checks) {
    out << std::left << std::setw(8) << c.name << ' ' << (c.pass ? "pass" : "FAIL")
        << "  max residual " << format_g(c.max_residual) << " (tol " << format_g(c.tolerance)
        << ")";
    if (c.max_residual > 0.0 && !c.indices.empty()) {
      out << " at point " << c.point_index << ", indices (";
      for (std::size_t i = 0; i < c.indices.size(); ++i) out << (i ? "," : "") << c.indices[i] + 1;
      out << ")";
    }
    out << '\n';
  }
  if (report.nonzero_blocks) {
    out << "nonzero blocks:";
    if (report.nonzero_blocks->empty()) out << " none";
    for (TensorBlock b : *report.nonzero_blocks) out << ' ' << block_name(b);
    out << '\n';
  }
  out << (report.pass() ? "PASS" : "FAIL") << '\n';
}

std::filesystem::path indexed_path(const std::filesystem::path& base, std::size_t i) {
  std::filesystem::path p = base;
  p.replace_filename(base.stem().string() + "_" + std::to_string(i) + base.extension().string());
  return p;
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Lie algebroid and two-block product toolkit", "algebroid"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  // verify
  std::string verify_path;
  int points = 32;
  std::uint64_t seed = 20240601;
  double tol = 1e-9;
  int workers = 1;
  bool verify_json = false;
  std::string verify_report;
  auto* verify = app.add_subcommand("verify", "Check skew-symmetry, anchor and Jacobi identities");
  verify->add_option("spec", verify_path, "Spec document")->required();
  verify->add_option("--points", points, "Quasi-random sample count")->check(CLI::PositiveNumber);
  verify->add_option("--seed", seed, "Sample seed");
  verify->add_option("--tol", tol, "Absolute tolerance")->check(CLI::NonNegativeNumber);
  verify->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);
  verify->add_flag("--json", verify_json, "Print the report as JSON only");
  verify->add_option("--report", verify_report, "Also write the JSON report to this file");

  // product
  std::string product_path, product_out, product_level;
  auto* product = app.add_subcommand("product", "Assemble the total algebroid of a two-block spec");
  product->add_option("spec", product_path, "Two-block spec document")->required();
  product->add_option("--out", product_out, "Output spec document")->required();
  product->add_option("--level", product_level,
                      "Require the data to fit this level (direct, semidirect, cocycle_ext, "
                      "double_cross, unified, BDCP)");

  // decompose
  std::string decompose_path, decompose_out;
  int split = 0;
  auto* decompose_cmd = app.add_subcommand("decompose", "Split an algebroid into two blocks");
  decompose_cmd->add_option("spec", decompose_path, "Algebroid spec document")->required();
  decompose_cmd->add_option("--split", split, "Rank of the first block")->required();
  decompose_cmd->add_option("--out", decompose_out, "Output two-block spec document")->required();

  // simulate
  SystemRequest sim;
  std::string state_text, states_file, sim_out, method_text = "rk45";
  std::optional<double> t0, t1, dt;
  double rtol = 1e-9, atol = 1e-12;
  int sim_workers = 1;
  auto* simulate = app.add_subcommand("simulate", "Integrate a dynamical system");
  simulate->add_option("spec", sim.spec_path, "Spec document");
  simulate->add_option("--scenario", sim.scenario, "Built-in scenario");
  simulate->add_option("--dynamics", sim.dynamics,
                       "hamilton, lie-poisson, euler-lagrange, euler-poincare, herglotz, contact "
                       "or dissipative-hamilton");
  simulate->add_option("--energy", sim.energy, "Energy expression or scenario preset name");
  simulate->add_option("--casimir", sim.casimirs, "Extra monitored function (repeatable)");
  simulate->add_option("--state", state_text, "Initial state x..., y...[, z]");
  simulate->add_option("--states-file", states_file, "One initial state per line");
  simulate->add_option("--t0", t0, "Start time");
  simulate->add_option("--t1", t1, "End time");
  simulate->add_option("--dt", dt, "Step (rk4) or initial step (rk45)");
  simulate->add_option("--method", method_text, "rk4 or rk45");
  simulate->add_option("--rtol", rtol, "rk45 relative tolerance");
  simulate->add_option("--atol", atol, "rk45 absolute tolerance");
  simulate->add_option("--workers", sim_workers, "Threads for --states-file")
      ->check(CLI::PositiveNumber);
  simulate->add_option("--out", sim_out, "Trajectory CSV")->required();

  // invariants
  std::string traj_path, descriptor;
  std::vector<std::string> inv_casimirs;
  MonitorTolerances mtol;
  bool inv_json = false;
  auto* invariants = app.add_subcommand("invariants", "Monitor conserved and dissipated quantities");
  invariants->add_option("trajectory", traj_path, "Trajectory CSV")->required();
  invariants->add_option("--system", descriptor,
                         "scenario=NAME;dynamics=KIND[;energy=EXPR] or "
                         "spec=PATH;dynamics=KIND;energy=EXPR")
      ->required();
  invariants->add_option("--casimir", inv_casimirs, "Extra monitored function (repeatable)");
  invariants->add_option("--tol-energy", mtol.energy, "Energy drift tolerance");
  invariants->add_option("--tol-dissipation", mtol.dissipation, "Dissipation-law tolerance");
  invariants->add_option("--tol-casimir", mtol.casimir, "Casimir drift tolerance");
  invariants->add_flag("--json", inv_json, "Print the report as JSON only");

  // scenarios, export
  auto* scenarios = app.add_subcommand("scenarios", "List built-in scenarios");
  std::string export_name, export_out;
  auto* export_cmd = app.add_subcommand("export", "Write a built-in scenario as a spec document");
  export_cmd->add_option("name", export_name, "Scenario name")->required();
  export_cmd->add_option("--out", export_out, "Output spec document")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }

  if (verify->parsed()) {
    const SpecValue v = load_spec(verify_path);
    const VerifyOptions opts{tol, workers};
    ResidualReport report;
    if (const auto* b = std::get_if<BdcpSpec>(&v)) {
      report = check_bdcp(*b, SamplePlan::quasi_random(b->base_dim(), points, seed), opts);
    } else {
      const auto& a = std::get<AlgebroidSpec>(v);
      report = verify_algebroid(a, SamplePlan::quasi_random(a.base_dim(), points, seed), opts);
    }
    if (verify_json) {
      out << report_json(report);
    } else {
      print_report(report, out);
    }
    if (!verify_report.empty()) write_text_file(verify_report, report_json(report));
    return report.pass() ? kOk : kVerificationFailed;
  }

  if (product->parsed()) {
    const SpecValue v = load_spec(product_path);
    const auto* b = std::get_if<BdcpSpec>(&v);
    if (!b) throw SchemaError("kind", "product needs a bdcp document");
    const BdcpSpec checked =
        product_level.empty() ? *b : make_product(level_from_name(product_level), *b);
    save_spec(assemble_total(checked), product_out);
    out << "level " << level_name(classify(checked)) << ", total rank " << checked.total_rank()
        << ", wrote " << product_out << '\n';
    return kOk;
  }

  if (decompose_cmd->parsed()) {
    const SpecValue v = load_spec(decompose_path);
    const AlgebroidSpec total = std::holds_alternative<AlgebroidSpec>(v)
                                    ? std::get<AlgebroidSpec>(v)
                                    : assemble_total(std::get<BdcpSpec>(v));
    if (split < 1 || split >= total.rank()) {
      throw usage_error("--split must lie in 1.." + std::to_string(total.rank() - 1));
    }
    const BdcpSpec b = decompose(total, FiberSplit{split});
    save_spec(b, decompose_out);
    out << level_name(classify(b)) << '\n';
    return kOk;
  }

  if (simulate->parsed()) {
    if (!sim.scenario.empty() && !sim.spec_path.empty()) {
      throw usage_error("give either a spec file or --scenario, not both");
    }
    const BuiltSystem built = build_system(sim);
    const System& sys = built.system;
    IntegrateOptions opts;
    opts.method = method_from_name(method_text);
    opts.rtol = rtol;
    opts.atol = atol;
    if (built.scenario) {
      opts.t0 = built.scenario->t0;
      opts.t1 = built.scenario->t1;
      opts.dt = built.scenario->dt;
    }
    if (t0) opts.t0 = *t0;
    if (t1) opts.t1 = *t1;
    if (dt) opts.dt = *dt;
    if (!built.scenario && (!t1 || !dt)) throw usage_error("--t1 and --dt are required with a spec file");

    if (!states_file.empty()) {
      if (!state_text.empty()) throw usage_error("give either --state or --states-file");
      std::vector<DynState> states;
      std::istringstream lines(read_text_file(states_file));
      std::string line;
      while (std::getline(lines, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#') continue;
        states.push_back(split_state(parse_list(line, "states file"), sys));
      }
      if (states.empty()) throw usage_error("states file lists no states");
      const auto trajs = integrate_batch(sys, states, opts, sim_workers);
      for (std::size_t i = 0; i < trajs.size(); ++i) {
        const auto path = indexed_path(sim_out, i);
        write_text_file(path, trajectory_csv(trajs[i], sys));
        out << "wrote " << trajs[i].states.size() << " states to " << path.string() << '\n';
      }
      return kOk;
    }

    std::vector<double> flat;
    if (!state_text.empty()) {
      flat = parse_list(state_text, "--state");
    } else if (built.scenario && built.scenario->default_dynamics == sys.kind) {
      flat = built.scenario->default_state;
    } else {
      throw usage_error("--state is required");
    }
    const Trajectory traj = integrate(sys, split_state(flat, sys), opts);
    write_text_file(sim_out, trajectory_csv(traj, sys));
    out << "wrote " << traj.states.size() << " states to " << sim_out << '\n';
    return kOk;
  }

  if (invariants->parsed()) {
    SystemRequest req = parse_descriptor(descriptor);
    req.casimirs.insert(req.casimirs.end(), inv_casimirs.begin(), inv_casimirs.end());
    const BuiltSystem built = build_system(req);
    const System& sys = built.system;
    Trajectory traj;
    try {
      traj = parse_trajectory_csv(read_text_file(traj_path), sys.spec.base_dim(), sys.spec.rank(),
                                  is_dissipative(sys.kind));
    } catch (Error& e) {
      e.add_context(traj_path);
      throw;
    }
    const MonitorReport report = monitor_invariants(traj, sys);
    const bool pass = monitor_pass(report, mtol);
    if (inv_json) {
      out << monitor_json(report, mtol);
    } else {
      out << "dynamics " << dynamics_name(report.kind) << ", " << report.samples << " samples\n";
      out << "energy drift " << format_g(report.energy_drift);
      if (!is_dissipative(report.kind)) out << " (tol " << format_g(mtol.energy) << ")";
      out << '\n';
      if (report.dissipation_residual) {
        out << "dissipation-law residual " << format_g(*report.dissipation_residual) << " (tol "
            << format_g(mtol.dissipation) << ")\n";
      }
      for (std::size_t c = 0; c < report.casimir_drift.size(); ++c) {
        out << "C" << c + 1 << " drift " << format_g(report.casimir_drift[c]) << " (tol "
            << format_g(mtol.casimir) << ")\n";
      }
      out << (pass ? "PASS" : "FAIL") << '\n';
    }
    return pass ? kOk : kVerificationFailed;
  }

  if (scenarios->parsed()) {
    for (const auto& [name, label] : list_scenarios()) {
      out << std::left << std::setw(28) << name << std::setw(14) << label
          << get_scenario(name).summary << '\n';
    }
    return kOk;
  }

  if (export_cmd->parsed()) {
    const Scenario s = get_scenario(export_name);
    save_spec(std::visit([](const auto& v) { return SpecValue(v); }, s.spec), export_out);
    out << "wrote " << export_out << '\n';
    return kOk;
  }
  return kUsage;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    return dispatch(args, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    switch (e.category()) {
      case ErrorCategory::usage: return kUsage;
      case ErrorCategory::schema: return kSchema;
      case ErrorCategory::verification: return kVerificationFailed;
      case ErrorCategory::numerical: return kNumerical;
    }
    return kSchema;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kSchema;
  }
}

}  // namespace algebroid::cli

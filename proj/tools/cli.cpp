/*
Copyright (c) 2026 The tribell developers.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

  http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

#include "cli.hpp"

#include <complex>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "tribell/bell.hpp"
#include "tribell/bounds.hpp"
#include "tribell/measures.hpp"
#include "tribell/states.hpp"
#include "tribell/sweep.hpp"

namespace tribell::cli {

namespace {

struct StateSpec {
  std::string named;
  std::vector<double> canonical;
  double phi = 0.0;
  std::vector<double> spinor;
  std::vector<double> amplitudes;  // re,im pairs for the 8 basis amplitudes
};

struct ResolvedState {
  PureState3Q<double> state;
  std::optional<CanonicalParams<double>> canonical;
  std::string description;
};

void add_state_options(CLI::App* cmd, StateSpec& spec) {
  auto* named =
      cmd->add_option("--named", spec.named,
                      "Built-in state: ghz, w, product, bellpair-a")
          ->check(CLI::IsMember({"ghz", "w", "product", "bellpair-a"}));
  auto* canonical =
      cmd->add_option("--canonical", spec.canonical,
                      "mu0,mu1,mu2,mu3,mu4 of the canonical family")
          ->delimiter(',')
          ->expected(5);
  cmd->add_option("--phi", spec.phi,
                  "Phase of the canonical family, in [0, pi]")
      ->needs(canonical);
  auto* spinor = cmd->add_option("--spinor", spec.spinor,
                                 "theta1,theta2,theta3 of the three-spinor "
                                 "family")
                     ->delimiter(',')
                     ->expected(3);
  auto* amplitudes =
      cmd->add_option("--amplitudes", spec.amplitudes,
                      "16 comma-separated reals: re,im for each of "
                      "|000>..|111>")
          ->delimiter(',')
          ->expected(16);
  named->excludes(canonical)->excludes(spinor)->excludes(amplitudes);
  canonical->excludes(spinor)->excludes(amplitudes);
  spinor->excludes(amplitudes);
}

ResolvedState resolve_state(const StateSpec& spec) {
  if (!spec.named.empty()) {
    if (spec.named == "ghz") {
      return {PureState3Q<double>::ghz(), std::nullopt, "ghz"};
    }
    if (spec.named == "w") {
      return {PureState3Q<double>::w(), std::nullopt, "w"};
    }
    if (spec.named == "product") {
      return {PureState3Q<double>::basis(0, 0, 0), std::nullopt, "product"};
    }
    return {PureState3Q<double>::bell_pair_a(), std::nullopt, "bellpair-a"};
  }
  if (!spec.canonical.empty()) {
    std::array<double, 5> mu;
    std::copy(spec.canonical.begin(), spec.canonical.end(), mu.begin());
    CanonicalParams<double> p(mu, spec.phi);
    return {canonical_to_state(p), p, "canonical"};
  }
  if (!spec.spinor.empty()) {
    ThreeSpinorParams<double> p(spec.spinor[0], spec.spinor[1],
                                spec.spinor[2]);
    return {three_spinor_to_state(p), std::nullopt, "spinor"};
  }
  if (!spec.amplitudes.empty()) {
    PureState3Q<double>::Vector v;
    for (int i = 0; i < 8; ++i) {
      v[i] = {spec.amplitudes[2 * i], spec.amplitudes[2 * i + 1]};
    }
    return {PureState3Q<double>(v), std::nullopt, "amplitudes"};
  }
  throw std::invalid_argument(
      "specify a state: --named, --canonical, --spinor or --amplitudes");
}

struct OptimizerFlags {
  int restarts = 32;
  int max_evals = 10000;
  double tol = 1e-10;
  std::uint64_t seed = 0;

  OptimizerOptions<double> to_options() const {
    return {restarts, max_evals, tol, seed};
  }
};

void add_optimizer_options(CLI::App* cmd, OptimizerFlags& f) {
  cmd->add_option("--restarts", f.restarts, "Random restarts per maximization")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--max-evals", f.max_evals,
                  "Objective evaluations per restart")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--tol", f.tol, "Convergence tolerance on the objective");
  cmd->add_option("--seed", f.seed, "Seed for the restart starting points");
}

std::string vec3_string(const UnitVector3<double>& v) {
  return "(" + format_double(v[0]) + ", " + format_double(v[1]) + ", " +
         format_double(v[2]) + ")";
}

int run_measure(const StateSpec& spec, bool machine, std::ostream& out) {
  const ResolvedState rs = resolve_state(spec);
  const MeasureSet<double> m = rs.canonical
                                   ? measures_from_canonical(*rs.canonical)
                                   : measures_from_state(rs.state);
  if (machine) {
    out << "tau=" << format_double(m.tau) << '\n'
        << "sigma=" << format_double(m.sigma) << '\n'
        << "c2_a_bc=" << format_double(m.c_sq_one_vs_two[0]) << '\n'
        << "c2_b_ac=" << format_double(m.c_sq_one_vs_two[1]) << '\n'
        << "c2_c_ab=" << format_double(m.c_sq_one_vs_two[2]) << '\n'
        << "c2_ab=" << format_double(m.c_sq_pairwise[0]) << '\n'
        << "c2_ac=" << format_double(m.c_sq_pairwise[1]) << '\n'
        << "c2_bc=" << format_double(m.c_sq_pairwise[2]) << '\n';
    if (m.delta) out << "delta=" << format_double(*m.delta) << '\n';
    return kExitOk;
  }
  out << "state: " << rs.description << '\n'
      << "tau       = " << format_double(m.tau) << '\n'
      << "sigma     = " << format_double(m.sigma) << '\n'
      << "C2[A(BC)] = " << format_double(m.c_sq_one_vs_two[0]) << '\n'
      << "C2[B(AC)] = " << format_double(m.c_sq_one_vs_two[1]) << '\n'
      << "C2[C(AB)] = " << format_double(m.c_sq_one_vs_two[2]) << '\n'
      << "C2[AB]    = " << format_double(m.c_sq_pairwise[0]) << '\n'
      << "C2[AC]    = " << format_double(m.c_sq_pairwise[1]) << '\n'
      << "C2[BC]    = " << format_double(m.c_sq_pairwise[2]) << '\n';
  if (m.delta) out << "delta     = " << format_double(*m.delta) << '\n';
  return kExitOk;
}

int run_bell(const StateSpec& spec, const std::string& mode_name,
             const OptimizerFlags& flags, bool machine, std::ostream& out) {
  const ResolvedState rs = resolve_state(spec);
  const BellMode mode =
      mode_name == "mermin" ? BellMode::Mermin : BellMode::Svetlichny;
  const auto result = maximize(rs.state, mode, flags.to_options());
  const double threshold = bell_classical_bound<double>(mode);
  const bool violated = result.value > threshold;

  if (machine) {
    out << "mode=" << mode_name << '\n'
        << "m=" << format_double(result.value) << '\n'
        << "threshold=" << format_double(threshold) << '\n'
        << "violated=" << int(violated) << '\n'
        << "restarts=" << result.restarts_used << '\n'
        << "converged=" << int(result.converged) << '\n';
    return kExitOk;
  }
  out << "state: " << rs.description << '\n'
      << "mode: " << mode_name << '\n'
      << "M = " << format_double(result.value) << '\n'
      << "threshold = " << format_double(threshold)
      << (mode == BellMode::Mermin ? " (local realism)"
                                   : " (hybrid nonlocality)")
      << '\n'
      << "verdict: " << (violated ? "violated" : "not violated") << '\n'
      << "restarts: " << result.restarts_used
      << ", converged: " << (result.converged ? "yes" : "no") << '\n'
      << "settings:\n"
      << "  a  = " << vec3_string(result.settings.a) << '\n'
      << "  a' = " << vec3_string(result.settings.a_prime) << '\n'
      << "  b  = " << vec3_string(result.settings.b) << '\n'
      << "  b' = " << vec3_string(result.settings.b_prime) << '\n'
      << "  c  = " << vec3_string(result.settings.c) << '\n'
      << "  c' = " << vec3_string(result.settings.c_prime) << '\n';
  return kExitOk;
}

void print_report(const BoundsReport& rep, std::ostream& out) {
  auto worst = [&](double w) {
    return rep.n_records == 0 ? std::string("n/a") : format_double(w);
  };
  out << "records: " << rep.n_records << '\n'
      << "slack: " << format_double(rep.slack) << '\n'
      << "tau   vs mermin:     fails=" << rep.fail_tau_mermin
      << " worst_margin=" << worst(rep.worst_tau_mermin) << '\n'
      << "sigma vs mermin:     fails=" << rep.fail_sigma_mermin
      << " worst_margin=" << worst(rep.worst_sigma_mermin) << '\n'
      << "tau   vs svetlichny: fails=" << rep.fail_tau_svet
      << " worst_margin=" << worst(rep.worst_tau_svet) << '\n'
      << "sigma vs svetlichny: fails=" << rep.fail_sigma_svet
      << " worst_margin=" << worst(rep.worst_sigma_svet) << '\n'
      << "svetlichny lower bound stricter on " << rep.svet_lower_stricter
      << "/" << rep.n_records << " records\n";
  out << "suspects (re-run candidates): ";
  if (rep.suspects.empty()) {
    out << "none\n";
  } else {
    const std::size_t shown = std::min<std::size_t>(rep.suspects.size(), 20);
    for (std::size_t i = 0; i < shown; ++i) {
      out << rep.suspects[i] << (i + 1 < shown ? ' ' : '\n');
    }
    if (rep.suspects.size() > shown) {
      out << "  (+" << rep.suspects.size() - shown << " more)\n";
    }
  }
}

int run_sweep_cmd(const SweepConfig& config, const std::string& out_path,
                  std::ostream& out) {
  SweepStats stats;
  const auto records = run_sweep(config, &stats);
  std::ofstream file(out_path);
  if (!file) {
    throw std::runtime_error("cannot write " + out_path);
  }
  write_sweep_csv(file, records);
  out << "wrote " << records.size() << " records to " << out_path << '\n'
      << "escalated: " << stats.escalated << '\n';
  print_report(check_sweep(records, config.slack, true, true), out);
  return kExitOk;
}

int run_bounds_check(const std::string& csv_path, double slack,
                     const std::string& measures, std::ostream& out) {
  std::ifstream file(csv_path);
  if (!file) {
    throw std::runtime_error("cannot read " + csv_path);
  }
  const auto records = read_sweep_csv(file, slack);
  const bool enforce_tau = measures != "sigma";
  const bool enforce_sigma = measures != "tau";
  const auto rep = check_sweep(records, slack, enforce_tau, enforce_sigma);
  out << "checking: " << measures << '\n';
  print_report(rep, out);
  const std::size_t failures = rep.failure_count();
  out << (failures == 0 ? "PASS" : "FAIL") << ": " << failures
      << " confirmed violation(s)\n";
  return failures == 0 ? kExitOk : kExitViolation;
}

int run_figure_data(const SweepConfig& config, const std::string& out_dir,
                    std::ostream& out) {
  auto records = run_sweep(config);
  const auto anchors = anchor_records(config.family, config.optimizer,
                                      config.slack, records.size());
  records.insert(records.end(), anchors.begin(), anchors.end());
  std::filesystem::create_directories(out_dir);
  write_figure_data(out_dir, records);
  out << "wrote " << records.size() << " points (" << anchors.size()
      << " reference anchors) to " << out_dir << '\n';
  for (const char* name :
       {"mermin_tau.dat", "mermin_sigma.dat", "svet_tau.dat",
        "svet_sigma.dat", "mermin_lower.dat", "mermin_upper.dat",
        "svet_lower.dat", "svet_upper.dat"}) {
    out << "  " << out_dir << '/' << name << '\n';
  }
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out,
        std::ostream& err) {
  CLI::App app{
      "Three-qubit entanglement measures (tangle, sigma) and maximal "
      "Mermin/Svetlichny violations"};
  app.require_subcommand(1);

  // measure
  auto* measure = app.add_subcommand(
      "measure", "Entanglement measures of a single state");
  StateSpec measure_spec;
  bool measure_machine = false;
  add_state_options(measure, measure_spec);
  measure->add_flag("--machine", measure_machine, "key=value output");

  // bell
  auto* bell = app.add_subcommand(
      "bell", "Maximize a Bell combination over measurement settings");
  StateSpec bell_spec;
  OptimizerFlags bell_flags;
  std::string bell_mode = "mermin";
  bool bell_machine = false;
  add_state_options(bell, bell_spec);
  add_optimizer_options(bell, bell_flags);
  bell->add_option("--mode", bell_mode, "mermin or svetlichny")
      ->check(CLI::IsMember({"mermin", "svetlichny"}));
  bell->add_flag("--machine", bell_machine, "key=value output");

  // shared sweep-style options; --seed (from the optimizer block) seeds the
  // sampling as well
  struct SweepFlags {
    std::string family = "spinor3";
    std::size_t samples = 10000;
    OptimizerFlags optimizer;
    double slack = 1e-4;
    int jobs = 0;
    std::string out_path;
  };
  auto add_sweep_options = [](CLI::App* cmd, SweepFlags& f,
                              const char* out_help) {
    cmd->add_option("--family", f.family, "canonical5 or spinor3")
        ->check(CLI::IsMember({"canonical5", "spinor3"}));
    cmd->add_option("--samples", f.samples, "Number of sampled states")
        ->check(CLI::PositiveNumber);
    add_optimizer_options(cmd, f.optimizer);
    cmd->add_option("--slack", f.slack, "Bound-check slack");
    cmd->add_option("--jobs", f.jobs, "Worker threads (0 = all cores)");
    cmd->add_option("--out", f.out_path, out_help)->required();
  };

  auto* sweep = app.add_subcommand(
      "sweep", "Sample a family and emit per-state records as CSV");
  SweepFlags sweep_flags;
  add_sweep_options(sweep, sweep_flags, "Output CSV path");

  // bounds-check
  auto* bounds = app.add_subcommand(
      "bounds-check", "Check a sweep CSV against the bound envelopes");
  std::string bounds_csv;
  double bounds_slack = 1e-4;
  std::string bounds_measures = "both";
  bounds->add_option("csv", bounds_csv, "Sweep CSV file")->required();
  bounds->add_option("--slack", bounds_slack, "Bound-check slack");
  bounds
      ->add_option("--measures", bounds_measures,
                   "Which measures to enforce: both, tau, sigma")
      ->check(CLI::IsMember({"both", "tau", "sigma"}));

  // figure-data
  auto* figure = app.add_subcommand(
      "figure-data", "Emit scatter and bound-curve files for plotting");
  SweepFlags figure_flags;
  add_sweep_options(figure, figure_flags, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  auto to_config = [](const SweepFlags& f) {
    SweepConfig config;
    config.family = *family_from_name(f.family);
    config.n_samples = f.samples;
    config.seed = f.optimizer.seed;
    config.optimizer = f.optimizer.to_options();
    config.slack = f.slack;
    config.jobs = f.jobs;
    return config;
  };

  try {
    if (measure->parsed()) {
      return run_measure(measure_spec, measure_machine, out);
    }
    if (bell->parsed()) {
      return run_bell(bell_spec, bell_mode, bell_flags, bell_machine, out);
    }
    if (sweep->parsed()) {
      return run_sweep_cmd(to_config(sweep_flags), sweep_flags.out_path, out);
    }
    if (bounds->parsed()) {
      return run_bounds_check(bounds_csv, bounds_slack, bounds_measures, out);
    }
    if (figure->parsed()) {
      return run_figure_data(to_config(figure_flags), figure_flags.out_path,
                             out);
    }
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::runtime_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitInternal;
}

}  // namespace tribell::cli

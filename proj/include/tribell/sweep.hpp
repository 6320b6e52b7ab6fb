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

#ifndef TRIBELL_SWEEP_HPP
#define TRIBELL_SWEEP_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tribell/bell.hpp"
#include "tribell/bounds.hpp"

namespace tribell {

enum class Family { Canonical5, Spinor3 };

const char* family_name(Family f);
std::optional<Family> family_from_name(std::string_view name);

/// One sampled state: its parameters, measures, maximal violations, and
/// bound verdicts. Canonical records use params = (mu0..mu4, phi);
/// three-spinor records use params = (theta1..theta3).
struct SweepRecord {
  std::size_t state_id = 0;
  Family family = Family::Spinor3;
  std::array<double, 6> params{};
  int n_params = 0;
  double tau = 0;
  double sigma = 0;
  double m_mermin = 0;
  double m_svet = 0;
  BoundCheck<double> check{};
};

struct SweepConfig {
  Family family = Family::Spinor3;
  std::size_t n_samples = 10000;
  std::uint64_t seed = 0;
  OptimizerOptions<double> optimizer{};
  double slack = 1e-4;
  int jobs = 0;  // 0 = all hardware threads
};

struct SweepStats {
  std::size_t escalated = 0;  // records re-run with 4x restarts
};

/// Samples the family, computes measures and both maximal violations per
/// record, and checks the bound envelopes. Records whose failures could
/// stem from optimizer undershoot are re-run once with 4x restarts before
/// their flags are final. Deterministic for a fixed (seed, n_samples,
/// optimizer) regardless of the number of worker threads.
std::vector<SweepRecord> run_sweep(const SweepConfig& config,
                                   SweepStats* stats = nullptr);

/// Exact reference states expressible in the family, used to pin the
/// corners of figure data: GHZ for both families, a local-unitary image of
/// W for the canonical family only.
std::vector<SweepRecord> anchor_records(Family family,
                                        const OptimizerOptions<double>& opts,
                                        double slack,
                                        std::size_t first_id);

/// CSV schema (one header row, then one row per record):
/// state_id,family,p1..p6,tau,sigma,m_mermin,m_svet,
/// tau_ok_mermin,sigma_ok_mermin,tau_ok_svet,sigma_ok_svet
/// Unused parameter columns are empty; flags are 0/1; numbers use 9
/// significant digits with '.' decimal separator.
void write_sweep_csv(std::ostream& os, const std::vector<SweepRecord>& records);

/// Parses the schema above. Bound flags are recomputed from the stored
/// numbers at the given slack rather than trusted. Throws
/// std::runtime_error on malformed input.
std::vector<SweepRecord> read_sweep_csv(std::istream& is, double slack = 1e-4);

struct BoundsReport {
  std::size_t n_records = 0;
  bool enforce_tau = true;
  bool enforce_sigma = true;
  double slack = 1e-4;
  // Failure counts per (measure, inequality).
  std::size_t fail_tau_mermin = 0;
  std::size_t fail_sigma_mermin = 0;
  std::size_t fail_tau_svet = 0;
  std::size_t fail_sigma_svet = 0;
  // Worst signed margin (positive = outside the envelope) per check.
  double worst_tau_mermin = 0;
  double worst_sigma_mermin = 0;
  double worst_tau_svet = 0;
  double worst_sigma_svet = 0;
  // Records whose Svetlichny lower bound is at least the Mermin one.
  // Reported, never asserted: the comparison direction varies per state.
  std::size_t svet_lower_stricter = 0;
  // state_ids of records failing any enforced check.
  std::vector<std::size_t> suspects;

  std::size_t failure_count() const;
};

/// Re-checks records against the envelopes at the given slack.
BoundsReport check_sweep(const std::vector<SweepRecord>& records, double slack,
                         bool enforce_tau, bool enforce_sigma);

/// Emits two-column whitespace-separated scatter files
/// (mermin_tau.dat, mermin_sigma.dat, svet_tau.dat, svet_sigma.dat) and
/// sampled envelope curves (mermin_lower.dat, mermin_upper.dat,
/// svet_lower.dat, svet_upper.dat) into an existing directory.
void write_figure_data(const std::string& dir,
                       const std::vector<SweepRecord>& records);

/// 9 significant digits, locale-independent, '.' decimal separator.
std::string format_double(double v);

}  // namespace tribell

#endif  // TRIBELL_SWEEP_HPP

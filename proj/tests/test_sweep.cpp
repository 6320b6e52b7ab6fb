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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "tribell/sweep.hpp"

using namespace tribell;

namespace {

SweepConfig small_config(Family family, std::size_t n, int jobs = 0) {
  SweepConfig config;
  config.family = family;
  config.n_samples = n;
  config.seed = 11;
  config.optimizer.restarts = 8;
  config.jobs = jobs;
  return config;
}

std::string to_csv(const std::vector<SweepRecord>& records) {
  std::ostringstream os;
  write_sweep_csv(os, records);
  return os.str();
}

}  // namespace

TEST_CASE("number formatting") {
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1.0 / 3.0) == "0.333333333");
  CHECK(format_double(4.0 * std::numbers::sqrt2) == "5.65685425");
  CHECK(format_double(-0.25) == "-0.25");
}

TEST_CASE("sweep determinism and schema") {
  const auto config = small_config(Family::Spinor3, 10);
  const auto records = run_sweep(config);
  REQUIRE(records.size() == 10);

  SUBCASE("identical reruns produce byte-identical CSV") {
    CHECK(to_csv(records) == to_csv(run_sweep(config)));
  }

  SUBCASE("worker count does not change the records") {
    CHECK(to_csv(records) ==
          to_csv(run_sweep(small_config(Family::Spinor3, 10, 1))));
    CHECK(to_csv(records) ==
          to_csv(run_sweep(small_config(Family::Spinor3, 10, 2))));
  }

  SUBCASE("records are ordered and carry the family parameters") {
    for (std::size_t i = 0; i < records.size(); ++i) {
      CHECK(records[i].state_id == i);
      CHECK(records[i].family == Family::Spinor3);
      CHECK(records[i].n_params == 3);
      CHECK(records[i].tau <= records[i].sigma + 1e-10);
      CHECK(records[i].m_mermin >= 0.0);
      CHECK(records[i].m_svet >= 0.0);
    }
  }

  SUBCASE("the CSV header is stable") {
    const std::string csv = to_csv(records);
    CHECK(csv.substr(0, csv.find('\n')) ==
          "state_id,family,p1,p2,p3,p4,p5,p6,tau,sigma,m_mermin,m_svet,"
          "tau_ok_mermin,sigma_ok_mermin,tau_ok_svet,sigma_ok_svet");
  }

  SUBCASE("round-trip through the CSV reader") {
    std::istringstream is(to_csv(records));
    const auto back = read_sweep_csv(is);
    REQUIRE(back.size() == records.size());
    for (std::size_t i = 0; i < back.size(); ++i) {
      CHECK(back[i].state_id == records[i].state_id);
      CHECK(back[i].n_params == records[i].n_params);
      CHECK(back[i].tau == doctest::Approx(records[i].tau).epsilon(1e-8));
      CHECK(back[i].m_svet ==
            doctest::Approx(records[i].m_svet).epsilon(1e-8));
    }
  }
}

TEST_CASE("small sweeps respect the envelopes") {
  SUBCASE("three-spinor family: both measures inside") {
    auto config = small_config(Family::Spinor3, 24);
    config.optimizer.restarts = 16;
    const auto records = run_sweep(config);
    const auto rep = check_sweep(records, config.slack, true, true);
    CHECK(rep.failure_count() == 0);
  }

  SUBCASE("canonical family: sigma inside") {
    auto config = small_config(Family::Canonical5, 16);
    config.optimizer.restarts = 16;
    const auto records = run_sweep(config);
    const auto rep = check_sweep(records, config.slack, false, true);
    CHECK(rep.failure_count() == 0);
  }
}

TEST_CASE("CSV reader rejects malformed input") {
  SUBCASE("wrong header") {
    std::istringstream is("id,family\n");
    CHECK_THROWS_AS(read_sweep_csv(is), std::runtime_error);
  }

  SUBCASE("wrong field count") {
    std::istringstream is(
        "state_id,family,p1,p2,p3,p4,p5,p6,tau,sigma,m_mermin,m_svet,"
        "tau_ok_mermin,sigma_ok_mermin,tau_ok_svet,sigma_ok_svet\n"
        "0,spinor3,1,2\n");
    CHECK_THROWS_AS(read_sweep_csv(is), std::runtime_error);
  }

  SUBCASE("unparseable number") {
    std::istringstream is(
        "state_id,family,p1,p2,p3,p4,p5,p6,tau,sigma,m_mermin,m_svet,"
        "tau_ok_mermin,sigma_ok_mermin,tau_ok_svet,sigma_ok_svet\n"
        "0,spinor3,1,1,1,,,,abc,0.5,3,4,1,1,1,1\n");
    CHECK_THROWS_AS(read_sweep_csv(is), std::runtime_error);
  }

  SUBCASE("header only is valid and empty") {
    std::istringstream is(
        "state_id,family,p1,p2,p3,p4,p5,p6,tau,sigma,m_mermin,m_svet,"
        "tau_ok_mermin,sigma_ok_mermin,tau_ok_svet,sigma_ok_svet\n");
    CHECK(read_sweep_csv(is).empty());
  }
}

TEST_CASE("bounds report flags planted violations") {
  SweepRecord fake;
  fake.state_id = 7;
  fake.family = Family::Spinor3;
  fake.n_params = 3;
  fake.tau = 0.9;  // far above the Mermin upper bound 0.25 at m = 2
  fake.sigma = 0.9;
  fake.m_mermin = 2.0;
  fake.m_svet = 4.0;
  const auto rep = check_sweep({fake}, 1e-4, true, true);
  CHECK(rep.fail_tau_mermin == 1);
  CHECK(rep.fail_sigma_mermin == 1);
  CHECK(rep.worst_tau_mermin == doctest::Approx(0.65));
  // Both lower bounds are 0 at (m_m, m_s) = (2, 4), so Svetlichny ties.
  CHECK(rep.svet_lower_stricter == 1);
  REQUIRE(rep.suspects.size() == 1);
  CHECK(rep.suspects[0] == 7);
  CHECK(rep.failure_count() > 0);

  SUBCASE("enforcement masks select the measure") {
    fake.sigma = 0.2;  // inside
    const auto sigma_only = check_sweep({fake}, 1e-4, false, true);
    CHECK(sigma_only.failure_count() == 0);
    CHECK(sigma_only.fail_tau_mermin == 1);  // still counted, not enforced
    CHECK(sigma_only.suspects.empty());
  }

  SUBCASE("empty input yields zero counts") {
    const auto empty = check_sweep({}, 1e-4, true, true);
    CHECK(empty.n_records == 0);
    CHECK(empty.failure_count() == 0);
  }
}

TEST_CASE("reference anchors") {
  OptimizerOptions<double> opts;
  opts.restarts = 16;

  SUBCASE("three-spinor family pins GHZ") {
    const auto anchors = anchor_records(Family::Spinor3, opts, 1e-4, 100);
    REQUIRE(anchors.size() == 1);
    CHECK(anchors[0].state_id == 100);
    CHECK(anchors[0].tau == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(anchors[0].m_mermin == doctest::Approx(4.0).epsilon(1e-6));
  }

  SUBCASE("canonical family pins GHZ and the W image") {
    const auto anchors = anchor_records(Family::Canonical5, opts, 1e-4, 0);
    REQUIRE(anchors.size() == 2);
    CHECK(anchors[0].tau == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(anchors[1].tau <= 1e-10);
    CHECK(anchors[1].sigma == doctest::Approx(4.0 / 9.0).epsilon(1e-9));
    CHECK(anchors[1].m_mermin == doctest::Approx(3.05).epsilon(0.004));
    CHECK(anchors[1].m_svet == doctest::Approx(4.35).epsilon(0.004));
  }
}

TEST_CASE("figure data files") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "tribell_figure_test";
  fs::create_directories(dir);

  auto config = small_config(Family::Spinor3, 6);
  auto records = run_sweep(config);
  auto anchors = anchor_records(Family::Spinor3, config.optimizer,
                                config.slack, records.size());
  records.insert(records.end(), anchors.begin(), anchors.end());
  write_figure_data(dir.string(), records);

  SUBCASE("scatter files have one line per record") {
    std::ifstream is(dir / "mermin_tau.dat");
    REQUIRE(is.good());
    std::size_t lines = 0;
    double m = 0, tau = 0, last_m = 0, last_tau = 0;
    while (is >> m >> tau) {
      ++lines;
      last_m = m;
      last_tau = tau;
    }
    CHECK(lines == records.size());
    // The GHZ anchor is the last point: (4, 1).
    CHECK(last_m == doctest::Approx(4.0).epsilon(1e-6));
    CHECK(last_tau == doctest::Approx(1.0).epsilon(1e-9));
  }

  SUBCASE("the Svetlichny curves pass through (4*sqrt(2), 1)") {
    for (const char* name : {"svet_lower.dat", "svet_upper.dat"}) {
      std::ifstream is(dir / name);
      REQUIRE(is.good());
      double m = 0, v = 0, last_m = 0, last_v = 0;
      while (is >> m >> v) {
        last_m = m;
        last_v = v;
      }
      CHECK(last_m == doctest::Approx(4.0 * std::numbers::sqrt2));
      CHECK(last_v == doctest::Approx(1.0));
    }
  }

  SUBCASE("scatter points lie between the emitted curves") {
    for (const auto& r : records) {
      const auto b = mermin_bounds(r.m_mermin);
      CHECK(r.tau >= b.lower - 1e-4);
      CHECK(r.tau <= b.upper + 1e-4);
      CHECK(r.sigma >= b.lower - 1e-4);
      CHECK(r.sigma <= b.upper + 1e-4);
    }
  }

  fs::remove_all(dir);
}

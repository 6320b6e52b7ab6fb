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

#include <cmath>
#include <numbers>

#include "doctest.h"
#include "test_util.hpp"
#include "tribell/measures.hpp"

using namespace tribell;

namespace {
constexpr double pi = std::numbers::pi;

DensityMatrix<double> maximally_mixed_pair() {
  DensityMatrix<double>::Matrix m =
      DensityMatrix<double>::Matrix::Identity(4, 4) * 0.25;
  return {m, {Qubit::A, Qubit::B}};
}

DensityMatrix<double> bell_projector() {
  Eigen::Vector4cd v;
  v << 1.0 / std::sqrt(2.0), 0, 0, 1.0 / std::sqrt(2.0);
  DensityMatrix<double>::Matrix m = v * v.adjoint();
  return {m, {Qubit::A, Qubit::B}};
}
}  // namespace

TEST_CASE("Wootters concurrence") {
  SUBCASE("maximally mixed pair is separable") {
    CHECK(wootters_concurrence(maximally_mixed_pair()) == 0.0);
  }

  SUBCASE("Bell projector is maximally entangled") {
    CHECK(std::abs(wootters_concurrence(bell_projector()) - 1.0) < 1e-12);
  }

  SUBCASE("W pair reduction has concurrence 2/3") {
    const auto rho = reduce(PureState3Q<double>::w(), {Qubit::A, Qubit::B});
    CHECK(std::abs(wootters_concurrence(rho) - 2.0 / 3.0) < 1e-12);
  }

  SUBCASE("single-qubit input is rejected") {
    const auto rho = reduce(PureState3Q<double>::ghz(), {Qubit::A});
    CHECK_THROWS_AS(wootters_concurrence(rho), std::invalid_argument);
  }

  SUBCASE("spectral route agrees with the eigenvalue-product route") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 100; ++trial) {
      const auto rho =
          reduce(test::random_state(rng), {Qubit::A, Qubit::C});
      CHECK(std::abs(wootters_concurrence(rho) -
                     wootters_concurrence_direct(rho)) < 1e-7);
    }
  }
}

TEST_CASE("one-vs-two squared concurrence") {
  SUBCASE("GHZ is maximal for every split") {
    const auto ghz = PureState3Q<double>::ghz();
    for (Qubit q : all_qubits) {
      CHECK(std::abs(one_vs_two_concurrence_sq(ghz, q) - 1.0) < 1e-14);
    }
  }

  SUBCASE("product state has no entanglement across any split") {
    const auto s = PureState3Q<double>::basis(0, 0, 0);
    for (Qubit q : all_qubits) {
      CHECK(one_vs_two_concurrence_sq(s, q) == 0.0);
    }
  }

  SUBCASE("W gives 8/9 for every split") {
    const auto w = PureState3Q<double>::w();
    for (Qubit q : all_qubits) {
      CHECK(std::abs(one_vs_two_concurrence_sq(w, q) - 8.0 / 9.0) < 1e-14);
    }
  }
}

TEST_CASE("reference measures") {
  SUBCASE("GHZ: tau = sigma = 1") {
    const auto m = measures_from_state(PureState3Q<double>::ghz());
    CHECK(std::abs(m.tau - 1.0) < 1e-12);
    CHECK(std::abs(m.sigma - 1.0) < 1e-12);
    CHECK(!m.delta.has_value());
  }

  SUBCASE("W: tau = 0, sigma = 4/9") {
    const auto m = measures_from_state(PureState3Q<double>::w());
    CHECK(m.tau <= 1e-12);
    CHECK(std::abs(m.sigma - 4.0 / 9.0) < 1e-12);
    for (double c2 : m.c_sq_pairwise) {
      CHECK(std::abs(c2 - 4.0 / 9.0) < 1e-12);
    }
  }

  SUBCASE("a separable qubit forces tau = sigma = 0") {
    const auto m = measures_from_state(PureState3Q<double>::bell_pair_a());
    CHECK(m.tau <= 1e-12);
    CHECK(m.sigma <= 1e-12);
  }
}

TEST_CASE("closed forms on canonical coordinates") {
  SUBCASE("GHZ coordinates") {
    const auto m =
        measures_from_canonical(CanonicalParams<double>({0.5, 0, 0, 0, 0.5}, 0));
    CHECK(std::abs(m.tau - 1.0) < 1e-15);
    CHECK(std::abs(m.sigma - 1.0) < 1e-15);
    REQUIRE(m.delta.has_value());
    CHECK(*m.delta == 0.0);
    for (double c2 : m.c_sq_one_vs_two) CHECK(std::abs(c2 - 1.0) < 1e-15);
  }

  SUBCASE("flat coordinates with phi = pi/2") {
    const auto m = measures_from_canonical(
        CanonicalParams<double>({0.2, 0.2, 0.2, 0.2, 0.2}, pi / 2));
    CHECK(std::abs(*m.delta - 0.08) < 1e-15);
    CHECK(std::abs(m.tau - 0.16) < 1e-15);
  }

  SUBCASE("mu0 = 0 kills the tangle and the A split") {
    const auto m = measures_from_canonical(
        CanonicalParams<double>({0, 0.4, 0.3, 0.2, 0.1}, 0.3));
    CHECK(m.tau == 0.0);
    CHECK(m.c_sq_one_vs_two[0] == 0.0);
  }

  SUBCASE("the local-unitary image of W") {
    // sigma_x on qubit A maps this coordinate tuple's state to W.
    const auto m = measures_from_canonical(
        CanonicalParams<double>({1.0 / 3, 0, 1.0 / 3, 1.0 / 3, 0}, 0));
    CHECK(m.tau <= 1e-15);
    CHECK(std::abs(m.sigma - 4.0 / 9.0) < 1e-12);
    CHECK(std::abs(*m.delta - 1.0 / 9.0) < 1e-15);
    for (double c2 : m.c_sq_one_vs_two) {
      CHECK(std::abs(c2 - 8.0 / 9.0) < 1e-12);
    }
  }

  SUBCASE("closed forms match the state path") {
    for (const auto& p : sample_canonical(314, 200)) {
      const auto closed = measures_from_canonical(p);
      const auto general = measures_from_state(canonical_to_state(p));
      CHECK(std::abs(closed.tau - general.tau) < 1e-8);
      CHECK(std::abs(closed.sigma - general.sigma) < 1e-8);
      for (int i = 0; i < 3; ++i) {
        CHECK(std::abs(closed.c_sq_one_vs_two[i] -
                       general.c_sq_one_vs_two[i]) < 1e-8);
      }
    }
  }
}

TEST_CASE("sigma rewritings agree") {
  SUBCASE("GHZ and W endpoints") {
    const auto ghz = sigma_alternative(PureState3Q<double>::ghz());
    CHECK(std::abs(ghz.half_tau_plus_min_split - 1.0) < 1e-12);
    CHECK(std::abs(ghz.tau_plus_half_min_pair - 1.0) < 1e-12);
    const auto w = sigma_alternative(PureState3Q<double>::w());
    CHECK(std::abs(w.half_tau_plus_min_split - 4.0 / 9.0) < 1e-12);
    CHECK(std::abs(w.tau_plus_half_min_pair - 4.0 / 9.0) < 1e-12);
  }

  SUBCASE("all three routes agree on random canonical states") {
    for (const auto& p : sample_canonical(2718, 200)) {
      const auto s = canonical_to_state(p);
      const double sigma = measures_from_state(s).sigma;
      const auto forms = sigma_alternative(s);
      CHECK(std::abs(forms.half_tau_plus_min_split - sigma) < 1e-8);
      CHECK(std::abs(forms.tau_plus_half_min_pair - sigma) < 1e-8);
    }
  }
}

TEST_CASE("concurrence identity residual") {
  SUBCASE("GHZ, every relabeling") {
    const auto ghz = PureState3Q<double>::ghz();
    for (const auto& perm : Permutation::all()) {
      CHECK(sudbery_identity_residual(ghz, perm) < 1e-10);
    }
  }

  SUBCASE("W, every relabeling") {
    const auto w = PureState3Q<double>::w();
    for (const auto& perm : Permutation::all()) {
      CHECK(sudbery_identity_residual(w, perm) < 1e-8);
    }
  }

  SUBCASE("random canonical states, every relabeling") {
    for (const auto& p : sample_canonical(161803, 100)) {
      const auto s = canonical_to_state(p);
      for (const auto& perm : Permutation::all()) {
        CHECK(sudbery_identity_residual(s, perm) < 1e-8);
      }
    }
  }
}

TEST_CASE("measure properties on random states") {
  std::mt19937_64 rng(4242);

  SUBCASE("tau is permutation invariant") {
    for (int trial = 0; trial < 30; ++trial) {
      const auto s = test::random_state(rng);
      const double tau = measures_from_state(s).tau;
      for (const auto& perm : Permutation::all()) {
        CHECK(std::abs(measures_from_state(permute_qubits(s, perm)).tau -
                       tau) < 1e-8);
      }
    }
  }

  SUBCASE("0 <= tau <= sigma <= 1") {
    for (int trial = 0; trial < 200; ++trial) {
      const auto m = measures_from_state(test::random_state(rng));
      CHECK(m.tau >= 0.0);
      CHECK(m.tau <= m.sigma + 1e-10);
      CHECK(m.sigma <= 1.0);
    }
  }

  SUBCASE("sigma vanishes exactly on 2-1 separable states") {
    for (int trial = 0; trial < 60; ++trial) {
      const Qubit alone = all_qubits[trial % 3];
      const auto s = test::random_separable(rng, alone);
      const auto m = measures_from_state(s);
      CHECK(m.sigma <= 1e-8);
      // Converse diagnostic: some split concurrence must vanish too.
      const double min_split = *std::min_element(
          m.c_sq_one_vs_two.begin(), m.c_sq_one_vs_two.end());
      CHECK(min_split <= 1e-8);
    }
  }

  SUBCASE("interior canonical states have strictly positive sigma") {
    int found = 0;
    for (const auto& p : sample_canonical(55, 2000)) {
      if (std::all_of(p.mu.begin(), p.mu.end(),
                      [](double m) { return m >= 0.05; })) {
        ++found;
        CHECK(measures_from_canonical(p).sigma > 1e-6);
      }
    }
    CHECK(found > 10);
  }
}

TEST_CASE("three-spinor tangle closed form") {
  // The family is the canonical form with phi = 0 and
  // mu0 = cos^2 t1, mu4 = sin^2 t1 sin^2 t2 sin^2 t3, so
  // tau = sin^2(2 t1) sin^2 t2 sin^2 t3.
  for (const auto& p : sample_three_spinor(606, 100)) {
    const auto s = three_spinor_to_state(p);
    const double expected = std::pow(std::sin(2 * p.theta1), 2) *
                            std::pow(std::sin(p.theta2), 2) *
                            std::pow(std::sin(p.theta3), 2);
    CHECK(std::abs(measures_from_state(s).tau - expected) < 1e-8);
  }
}

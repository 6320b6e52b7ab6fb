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

#ifndef TRIBELL_MEASURES_HPP
#define TRIBELL_MEASURES_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "tribell/states.hpp"

namespace tribell {

/// All entanglement quantities of one state. c_sq_one_vs_two is indexed by
/// the split qubit (A(BC), B(AC), C(AB)); c_sq_pairwise by the pair
/// (AB, AC, BC). delta is set only when computed from canonical
/// coordinates.
template <typename Scalar = double>
struct MeasureSet {
  Scalar tau;
  Scalar sigma;
  std::array<Scalar, 3> c_sq_one_vs_two;
  std::array<Scalar, 3> c_sq_pairwise;
  std::optional<Scalar> delta;
};

/// Index into c_sq_pairwise for an unordered pair of distinct qubits.
constexpr int pair_index(Qubit a, Qubit b) {
  return static_cast<int>(a) + static_cast<int>(b) - 1;
}

namespace detail {

// Tiny negative undershoot from subtracting near-equal quantities is
// rounding; anything larger is a bug upstream.
template <typename Scalar>
Scalar clamp_unit(Scalar v, const char* what) {
  constexpr Scalar tol = Scalar(1e-10);
  if (!(v >= -tol && v <= Scalar(1) + tol)) {
    throw std::domain_error(std::string(what) + " outside [0,1]");
  }
  return std::clamp(v, Scalar(0), Scalar(1));
}

// sigma_y (x) sigma_y, the two-qubit spin-flip kernel. Real symmetric.
template <typename Scalar>
Eigen::Matrix<std::complex<Scalar>, 4, 4> spin_flip_matrix() {
  Eigen::Matrix<std::complex<Scalar>, 4, 4> y;
  y.setZero();
  y(0, 3) = Scalar(-1);
  y(1, 2) = Scalar(1);
  y(2, 1) = Scalar(1);
  y(3, 0) = Scalar(-1);
  return y;
}

}  // namespace detail

/// Wootters concurrence of a two-qubit mixed state.
///
/// The spin-flip eigenvalues lambda_i are computed as the singular values
/// of the complex symmetric matrix V^T (sy(x)sy) V, where V packs the
/// sqrt(p)-scaled eigenvectors of rho. This is algebraically identical to
/// the square roots of the eigenvalues of rho*flip(rho) but does not square
/// the matrix first, so zero eigenvalues stay at machine precision instead
/// of sqrt(machine precision).
template <typename Scalar>
Scalar wootters_concurrence(const DensityMatrix<Scalar>& rho) {
  using Matrix4 = Eigen::Matrix<std::complex<Scalar>, 4, 4>;
  if (rho.dim() != 4) {
    throw std::invalid_argument("wootters_concurrence: need a 4x4 state");
  }
  Matrix4 m = rho.matrix();
  Eigen::SelfAdjointEigenSolver<Matrix4> es(m);
  Matrix4 v = es.eigenvectors();
  for (int i = 0; i < 4; ++i) {
    v.col(i) *= std::sqrt(std::max(es.eigenvalues()[i], Scalar(0)));
  }
  const Matrix4 a =
      v.transpose() * detail::spin_flip_matrix<Scalar>() * v;
  Eigen::JacobiSVD<Matrix4> svd(a);
  const auto& lam = svd.singularValues();  // descending
  return std::max(Scalar(0), lam[0] - lam[1] - lam[2] - lam[3]);
}

/// Same quantity through the textbook route: general eigenvalues of the
/// non-Hermitian product rho*flip(rho). Kept as an independent cross-check;
/// near-zero spin-flip eigenvalues come out with ~sqrt(eps) noise here, so
/// agreement with wootters_concurrence is only expected to ~1e-7.
template <typename Scalar>
Scalar wootters_concurrence_direct(const DensityMatrix<Scalar>& rho) {
  using Matrix4 = Eigen::Matrix<std::complex<Scalar>, 4, 4>;
  if (rho.dim() != 4) {
    throw std::invalid_argument("wootters_concurrence: need a 4x4 state");
  }
  const Matrix4 y = detail::spin_flip_matrix<Scalar>();
  const Matrix4 m = rho.matrix();
  const Matrix4 r = m * y * m.conjugate() * y;
  Eigen::ComplexEigenSolver<Matrix4> es(r, /*computeEigenvectors=*/false);
  std::array<Scalar, 4> lam;
  for (int i = 0; i < 4; ++i) {
    const auto ev = es.eigenvalues()[i];
    // The product is similar to a positive matrix; imaginary residue
    // beyond tolerance signals a defect.
    if (std::abs(ev.imag()) > Scalar(1e-8)) {
      throw std::domain_error(
          "wootters_concurrence_direct: complex eigenvalue");
    }
    lam[i] = std::sqrt(std::max(ev.real(), Scalar(0)));
  }
  std::sort(lam.begin(), lam.end(), std::greater<>());
  return std::max(Scalar(0), lam[0] - lam[1] - lam[2] - lam[3]);
}

/// Squared concurrence of qubit x against the remaining pair,
/// 4*det(rho_x).
template <typename Scalar>
Scalar one_vs_two_concurrence_sq(const PureState3Q<Scalar>& s, Qubit x) {
  const auto rho = reduce(s, {x});
  const auto& m = rho.matrix();
  const std::complex<Scalar> det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  return detail::clamp_unit(Scalar(4) * det.real(), "C^2 one-vs-two");
}

namespace detail {

template <typename Scalar>
std::array<Scalar, 3> pairwise_c_sq(const PureState3Q<Scalar>& s) {
  std::array<Scalar, 3> c2;
  c2[pair_index(Qubit::A, Qubit::B)] =
      wootters_concurrence(reduce(s, {Qubit::A, Qubit::B}));
  c2[pair_index(Qubit::A, Qubit::C)] =
      wootters_concurrence(reduce(s, {Qubit::A, Qubit::C}));
  c2[pair_index(Qubit::B, Qubit::C)] =
      wootters_concurrence(reduce(s, {Qubit::B, Qubit::C}));
  for (Scalar& c : c2) c = clamp_unit(c * c, "C^2 pairwise");
  return c2;
}

// sigma is the minimum over qubit pairs {X,Y} of
// (C^2_{X(YZ)} + C^2_{Y(XZ)})/2 - C^2_{XY}.
template <typename Scalar>
Scalar sigma_from_parts(const std::array<Scalar, 3>& c2_one,
                        const std::array<Scalar, 3>& c2_pair) {
  Scalar best = std::numeric_limits<Scalar>::infinity();
  for (Qubit x : all_qubits) {
    for (Qubit y : all_qubits) {
      if (x >= y) continue;
      const Scalar cand = (c2_one[static_cast<int>(x)] +
                           c2_one[static_cast<int>(y)]) /
                              Scalar(2) -
                          c2_pair[pair_index(x, y)];
      best = std::min(best, cand);
    }
  }
  return best;
}

template <typename Scalar>
void check_ordering(const MeasureSet<Scalar>& m) {
  if (m.tau > m.sigma + Scalar(1e-10)) {
    throw std::domain_error("MeasureSet: tau > sigma beyond tolerance");
  }
}

}  // namespace detail

/// Tangle and sigma from the amplitudes alone. The tangle uses the A(BC)
/// split; permutation invariance is a test, not an average.
template <typename Scalar>
MeasureSet<Scalar> measures_from_state(const PureState3Q<Scalar>& s) {
  MeasureSet<Scalar> m;
  for (Qubit q : all_qubits) {
    m.c_sq_one_vs_two[static_cast<int>(q)] = one_vs_two_concurrence_sq(s, q);
  }
  m.c_sq_pairwise = detail::pairwise_c_sq(s);
  m.tau = detail::clamp_unit(
      m.c_sq_one_vs_two[0] - m.c_sq_pairwise[pair_index(Qubit::A, Qubit::B)] -
          m.c_sq_pairwise[pair_index(Qubit::A, Qubit::C)],
      "tau");
  m.sigma = detail::clamp_unit(
      detail::sigma_from_parts(m.c_sq_one_vs_two, m.c_sq_pairwise), "sigma");
  m.delta = std::nullopt;
  detail::check_ordering(m);
  return m;
}

/// Closed forms on canonical coordinates:
///   tau = 4 mu0 mu4
///   C^2_{A(BC)} = 4 mu0 (mu2+mu3+mu4)
///   C^2_{B(AC)} = 4 mu0 (mu3+mu4) + 4 Delta
///   C^2_{C(AB)} = 4 mu0 (mu2+mu4) + 4 Delta
///   Delta = mu1 mu4 + mu2 mu3 - 2 sqrt(mu1 mu2 mu3 mu4) cos(phi)
///   sigma = (tau + min_Z C^2_{Z(XY)}) / 2
/// Pairwise C^2 still go through the constructed state.
template <typename Scalar>
MeasureSet<Scalar> measures_from_canonical(const CanonicalParams<Scalar>& p) {
  const Scalar mu0 = p.mu[0], mu1 = p.mu[1], mu2 = p.mu[2], mu3 = p.mu[3],
               mu4 = p.mu[4];
  const Scalar delta = mu1 * mu4 + mu2 * mu3 -
                       Scalar(2) * std::sqrt(mu1 * mu2 * mu3 * mu4) *
                           std::cos(p.phi);
  MeasureSet<Scalar> m;
  m.tau = detail::clamp_unit(Scalar(4) * mu0 * mu4, "tau");
  m.c_sq_one_vs_two[0] =
      detail::clamp_unit(Scalar(4) * mu0 * (mu2 + mu3 + mu4), "C^2 A(BC)");
  m.c_sq_one_vs_two[1] = detail::clamp_unit(
      Scalar(4) * mu0 * (mu3 + mu4) + Scalar(4) * delta, "C^2 B(AC)");
  m.c_sq_one_vs_two[2] = detail::clamp_unit(
      Scalar(4) * mu0 * (mu2 + mu4) + Scalar(4) * delta, "C^2 C(AB)");
  m.c_sq_pairwise = detail::pairwise_c_sq(canonical_to_state(p));
  const Scalar min_c2 = *std::min_element(m.c_sq_one_vs_two.begin(),
                                          m.c_sq_one_vs_two.end());
  m.sigma = detail::clamp_unit((m.tau + min_c2) / Scalar(2), "sigma");
  m.delta = delta;
  detail::check_ordering(m);
  return m;
}

/// The two equivalent rewritings of sigma. Both must agree with the
/// pair-minimization definition to ~1e-8 on any state.
template <typename Scalar>
struct SigmaForms {
  Scalar half_tau_plus_min_split;   // (tau + min_Z C^2_{Z(XY)}) / 2
  Scalar tau_plus_half_min_pair;    // tau + min_Z (C^2_{XZ} + C^2_{YZ}) / 2
};

template <typename Scalar>
SigmaForms<Scalar> sigma_alternative(const PureState3Q<Scalar>& s) {
  const MeasureSet<Scalar> m = measures_from_state(s);
  const Scalar min_split = *std::min_element(m.c_sq_one_vs_two.begin(),
                                             m.c_sq_one_vs_two.end());
  Scalar min_pair_sum = std::numeric_limits<Scalar>::infinity();
  for (Qubit z : all_qubits) {
    Scalar sum = 0;
    for (Qubit other : all_qubits) {
      if (other != z) sum += m.c_sq_pairwise[pair_index(z, other)];
    }
    min_pair_sum = std::min(min_pair_sum, sum);
  }
  return {(m.tau + min_split) / Scalar(2),
          m.tau + min_pair_sum / Scalar(2)};
}

/// | tau - (C^2_{X(YZ)} + C^2_{Y(XZ)} - C^2_{Z(XY)} - 2 C^2_{XY}) | for one
/// relabeling. A self-test quantity; expected <= 1e-8 on valid states.
template <typename Scalar>
Scalar sudbery_identity_residual(const PureState3Q<Scalar>& s,
                                 const Permutation& perm) {
  if (!perm.valid()) {
    throw std::invalid_argument("sudbery_identity_residual: bad permutation");
  }
  const Scalar tau = measures_from_state(s).tau;
  const Scalar c2x = one_vs_two_concurrence_sq(s, perm.x);
  const Scalar c2y = one_vs_two_concurrence_sq(s, perm.y);
  const Scalar c2z = one_vs_two_concurrence_sq(s, perm.z);
  const Scalar cxy = wootters_concurrence(reduce(s, {perm.x, perm.y}));
  return std::abs(tau - (c2x + c2y - c2z - Scalar(2) * cxy * cxy));
}

}  // namespace tribell

#endif  // TRIBELL_MEASURES_HPP

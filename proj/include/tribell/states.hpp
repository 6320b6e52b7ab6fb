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

#ifndef TRIBELL_STATES_HPP
#define TRIBELL_STATES_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace tribell {

/// Labels of the three qubits. The basis index of an amplitude is
/// b = 4*q_A + 2*q_B + q_C, i.e. qubit A is the leftmost label in
/// |q_A q_B q_C>.
enum class Qubit : int { A = 0, B = 1, C = 2 };

inline constexpr std::array<Qubit, 3> all_qubits{Qubit::A, Qubit::B, Qubit::C};

/// Bit position of a qubit inside the 3-bit basis index.
constexpr int qubit_shift(Qubit q) { return 2 - static_cast<int>(q); }

constexpr const char* qubit_name(Qubit q) {
  switch (q) {
    case Qubit::A: return "A";
    case Qubit::B: return "B";
    case Qubit::C: return "C";
  }
  return "?";
}

/// An ordered relabeling (X,Y,Z) of the qubits (A,B,C).
struct Permutation {
  Qubit x;
  Qubit y;
  Qubit z;

  constexpr bool valid() const {
    return x != y && y != z && x != z;
  }

  static constexpr Permutation identity() {
    return {Qubit::A, Qubit::B, Qubit::C};
  }

  /// All six relabelings, identity first.
  static const std::array<Permutation, 6>& all() {
    static const std::array<Permutation, 6> perms = {{
        {Qubit::A, Qubit::B, Qubit::C},
        {Qubit::A, Qubit::C, Qubit::B},
        {Qubit::B, Qubit::A, Qubit::C},
        {Qubit::B, Qubit::C, Qubit::A},
        {Qubit::C, Qubit::A, Qubit::B},
        {Qubit::C, Qubit::B, Qubit::A},
    }};
    return perms;
  }
};

namespace detail {

// Construction tolerances: 1e-12 (norm, Hermiticity, trace) and 1e-10
// (positivity) at double precision, scaled by epsilon for other scalars.
template <typename Scalar>
inline constexpr Scalar norm_tol =
    Scalar(4096) * std::numeric_limits<Scalar>::epsilon();
template <>
inline constexpr double norm_tol<double> = 1e-12;

template <typename Scalar>
inline constexpr Scalar psd_tol = Scalar(100) * norm_tol<Scalar>;

// Uniform double in [0,1) from the top 53 bits of a 64-bit draw. Avoids
// std::uniform_real_distribution so that sampled sequences are identical
// across standard library implementations.
inline double uniform_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Applies a 2x2 operator to one qubit of an 8-component amplitude vector.
template <typename Scalar>
Eigen::Matrix<std::complex<Scalar>, 8, 1> apply_one_qubit_raw(
    const Eigen::Matrix<std::complex<Scalar>, 8, 1>& amps, Qubit q,
    const Eigen::Matrix<std::complex<Scalar>, 2, 2>& op) {
  Eigen::Matrix<std::complex<Scalar>, 8, 1> out;
  const int shift = qubit_shift(q);
  const int mask = 1 << shift;
  for (int b = 0; b < 8; ++b) {
    const int bit = (b >> shift) & 1;
    const int partner = b ^ mask;
    out[b] = op(bit, bit) * amps[b] + op(bit, 1 - bit) * amps[partner];
  }
  return out;
}

}  // namespace detail

/// A normalized pure state of three qubits, stored as the 8 amplitudes
/// <q_A q_B q_C|psi>.
template <typename Scalar = double>
class PureState3Q {
 public:
  using Complex = std::complex<Scalar>;
  using Vector = Eigen::Matrix<Complex, 8, 1>;

  /// Rejects amplitude vectors whose squared norm deviates from 1 by more
  /// than 1e-12. Inputs farther off are caller bugs, not rounding.
  explicit PureState3Q(const Vector& amplitudes) : amps_(amplitudes) {
    const Scalar n2 = amps_.squaredNorm();
    if (!std::isfinite(n2) ||
        std::abs(n2 - Scalar(1)) > detail::norm_tol<Scalar>) {
      throw std::invalid_argument("PureState3Q: amplitudes not normalized");
    }
  }

  const Vector& amplitudes() const { return amps_; }

  Complex amplitude(int q_a, int q_b, int q_c) const {
    return amps_[4 * q_a + 2 * q_b + q_c];
  }

  /// (|000> + |111>)/sqrt(2).
  static PureState3Q ghz() {
    Vector v = Vector::Zero();
    const Scalar r = Scalar(1) / std::sqrt(Scalar(2));
    v[0] = r;
    v[7] = r;
    return PureState3Q(v);
  }

  /// (|001> + |010> + |100>)/sqrt(3).
  static PureState3Q w() {
    Vector v = Vector::Zero();
    const Scalar r = Scalar(1) / std::sqrt(Scalar(3));
    v[1] = r;
    v[2] = r;
    v[4] = r;
    return PureState3Q(v);
  }

  /// Computational basis state |q_A q_B q_C>.
  static PureState3Q basis(int q_a, int q_b, int q_c) {
    Vector v = Vector::Zero();
    v[4 * q_a + 2 * q_b + q_c] = Scalar(1);
    return PureState3Q(v);
  }

  /// |0> on qubit A times the Bell pair (|00> + |11>)/sqrt(2) on B,C.
  static PureState3Q bell_pair_a() {
    Vector v = Vector::Zero();
    const Scalar r = Scalar(1) / std::sqrt(Scalar(2));
    v[0] = r;  // |000>
    v[3] = r;  // |011>
    return PureState3Q(v);
  }

 private:
  Vector amps_;
};

/// Coordinates (mu_0..mu_4, phi) of the five-parameter canonical family:
/// sqrt(mu_0)|000> + sqrt(mu_1)e^{i phi}|100> + sqrt(mu_2)|101>
/// + sqrt(mu_3)|110> + sqrt(mu_4)|111>.
template <typename Scalar = double>
struct CanonicalParams {
  std::array<Scalar, 5> mu;
  Scalar phi;

  CanonicalParams(const std::array<Scalar, 5>& mu_in, Scalar phi_in)
      : mu(mu_in), phi(phi_in) {
    Scalar sum = 0;
    for (Scalar m : mu) {
      if (!(m >= Scalar(0))) {
        throw std::invalid_argument("CanonicalParams: negative mu");
      }
      sum += m;
    }
    if (std::abs(sum - Scalar(1)) > detail::norm_tol<Scalar>) {
      throw std::invalid_argument("CanonicalParams: mu must sum to 1");
    }
    if (!(phi >= Scalar(0) && phi <= std::numbers::pi_v<Scalar>)) {
      throw std::invalid_argument("CanonicalParams: phi outside [0, pi]");
    }
  }
};

/// Angles of the three-spinor subfamily
/// cos(t1)|000> + sin(t1)|1>(cos(t2)|0>+sin(t2)|1>)(cos(t3)|0>+sin(t3)|1>).
template <typename Scalar = double>
struct ThreeSpinorParams {
  Scalar theta1;
  Scalar theta2;
  Scalar theta3;

  ThreeSpinorParams(Scalar t1, Scalar t2, Scalar t3)
      : theta1(t1), theta2(t2), theta3(t3) {
    if (!(std::isfinite(t1) && std::isfinite(t2) && std::isfinite(t3))) {
      throw std::invalid_argument("ThreeSpinorParams: non-finite angle");
    }
  }
};

/// Reduced density matrix of one or two qubits, with the labels of the
/// subsystem it describes. Hermiticity, unit trace and positivity (to
/// -1e-10) are enforced on construction.
template <typename Scalar = double>
class DensityMatrix {
 public:
  using Complex = std::complex<Scalar>;
  // 2x2 or 4x4; fixed max size keeps these off the heap.
  using Matrix =
      Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, 0, 4, 4>;

  DensityMatrix(Matrix m, std::vector<Qubit> qubits)
      : m_(std::move(m)), qubits_(std::move(qubits)) {
    const auto d = m_.rows();
    if (m_.cols() != d || (d != 2 && d != 4) ||
        d != Eigen::Index(1) << qubits_.size()) {
      throw std::invalid_argument("DensityMatrix: bad dimensions");
    }
    if ((m_ - m_.adjoint()).cwiseAbs().maxCoeff() > detail::norm_tol<Scalar>) {
      throw std::invalid_argument("DensityMatrix: not Hermitian");
    }
    if (std::abs(m_.trace() - Complex(1)) > detail::norm_tol<Scalar>) {
      throw std::invalid_argument("DensityMatrix: trace != 1");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(m_,
                                             Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -detail::psd_tol<Scalar>) {
      throw std::invalid_argument("DensityMatrix: negative eigenvalue");
    }
  }

  const Matrix& matrix() const { return m_; }
  std::span<const Qubit> qubits() const { return qubits_; }
  Eigen::Index dim() const { return m_.rows(); }

 private:
  Matrix m_;
  std::vector<Qubit> qubits_;
};

/// Builds the canonical-family state for the given coordinates.
template <typename Scalar>
PureState3Q<Scalar> canonical_to_state(const CanonicalParams<Scalar>& p) {
  typename PureState3Q<Scalar>::Vector v =
      PureState3Q<Scalar>::Vector::Zero();
  v[0] = std::sqrt(p.mu[0]);                                        // |000>
  v[4] = std::polar(std::sqrt(p.mu[1]), p.phi);                     // |100>
  v[5] = std::sqrt(p.mu[2]);                                        // |101>
  v[6] = std::sqrt(p.mu[3]);                                        // |110>
  v[7] = std::sqrt(p.mu[4]);                                        // |111>
  // sum(mu) = 1 within tolerance, but sqrt rounding can push the squared
  // norm just past the construction tolerance; renormalize the rounding.
  v /= std::sqrt(v.squaredNorm());
  return PureState3Q<Scalar>(v);
}

/// Builds the three-spinor-family state for the given angles.
template <typename Scalar>
PureState3Q<Scalar> three_spinor_to_state(const ThreeSpinorParams<Scalar>& p) {
  typename PureState3Q<Scalar>::Vector v =
      PureState3Q<Scalar>::Vector::Zero();
  const Scalar c1 = std::cos(p.theta1), s1 = std::sin(p.theta1);
  const Scalar c2 = std::cos(p.theta2), s2 = std::sin(p.theta2);
  const Scalar c3 = std::cos(p.theta3), s3 = std::sin(p.theta3);
  v[0] = c1;           // |000>
  v[4] = s1 * c2 * c3; // |100>
  v[5] = s1 * c2 * s3; // |101>
  v[6] = s1 * s2 * c3; // |110>
  v[7] = s1 * s2 * s3; // |111>
  v /= std::sqrt(v.squaredNorm());
  return PureState3Q<Scalar>(v);
}

/// Partial trace of |psi><psi| onto the listed qubits (1 or 2 of them).
/// Row/column bits follow the kept qubits in A,B,C order.
template <typename Scalar>
DensityMatrix<Scalar> reduce(const PureState3Q<Scalar>& s,
                             std::vector<Qubit> keep) {
  std::sort(keep.begin(), keep.end());
  if (std::adjacent_find(keep.begin(), keep.end()) != keep.end()) {
    throw std::invalid_argument("reduce: duplicate qubit label");
  }
  if (keep.empty() || keep.size() > 2) {
    throw std::invalid_argument("reduce: keep 1 or 2 qubits");
  }

  std::vector<Qubit> traced;
  for (Qubit q : all_qubits) {
    if (std::find(keep.begin(), keep.end(), q) == keep.end()) {
      traced.push_back(q);
    }
  }

  const int kd = 1 << keep.size();
  const int td = 1 << traced.size();
  auto index = [&](int kept_bits, int traced_bits) {
    int b = 0;
    for (size_t i = 0; i < keep.size(); ++i) {
      b |= ((kept_bits >> (keep.size() - 1 - i)) & 1)
           << qubit_shift(keep[i]);
    }
    for (size_t i = 0; i < traced.size(); ++i) {
      b |= ((traced_bits >> (traced.size() - 1 - i)) & 1)
           << qubit_shift(traced[i]);
    }
    return b;
  };

  typename DensityMatrix<Scalar>::Matrix rho(kd, kd);
  const auto& a = s.amplitudes();
  for (int r = 0; r < kd; ++r) {
    for (int c = 0; c < kd; ++c) {
      std::complex<Scalar> acc = 0;
      for (int t = 0; t < td; ++t) {
        acc += a[index(r, t)] * std::conj(a[index(c, t)]);
      }
      rho(r, c) = acc;
    }
  }
  return DensityMatrix<Scalar>(std::move(rho), std::move(keep));
}

template <typename Scalar>
DensityMatrix<Scalar> reduce(const PureState3Q<Scalar>& s,
                             std::initializer_list<Qubit> keep) {
  return reduce(s, std::vector<Qubit>(keep));
}

/// Applies a single-qubit unitary to one qubit. Non-unitary operators are
/// rejected through the normalization check of the result.
template <typename Scalar>
PureState3Q<Scalar> apply_one_qubit(
    const PureState3Q<Scalar>& s, Qubit q,
    const Eigen::Matrix<std::complex<Scalar>, 2, 2>& u) {
  return PureState3Q<Scalar>(
      detail::apply_one_qubit_raw<Scalar>(s.amplitudes(), q, u));
}

/// Relabels the qubits: qubit A of the result is qubit perm.x of the input,
/// B is perm.y, C is perm.z.
template <typename Scalar>
PureState3Q<Scalar> permute_qubits(const PureState3Q<Scalar>& s,
                                   const Permutation& perm) {
  if (!perm.valid()) {
    throw std::invalid_argument("permute_qubits: not a permutation");
  }
  typename PureState3Q<Scalar>::Vector v;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      for (int c = 0; c < 2; ++c) {
        const int src = (a << qubit_shift(perm.x)) |
                        (b << qubit_shift(perm.y)) |
                        (c << qubit_shift(perm.z));
        v[4 * a + 2 * b + c] = s.amplitudes()[src];
      }
    }
  }
  return PureState3Q<Scalar>(v);
}

/// Product of a single-qubit state on `alone` with a two-qubit state on the
/// remaining pair (pair bits ordered by label). Both factors must be
/// normalized.
template <typename Scalar>
PureState3Q<Scalar> separable_state(
    Qubit alone, const Eigen::Matrix<std::complex<Scalar>, 2, 1>& single,
    const Eigen::Matrix<std::complex<Scalar>, 4, 1>& pair) {
  std::vector<Qubit> rest;
  for (Qubit q : all_qubits) {
    if (q != alone) rest.push_back(q);
  }
  typename PureState3Q<Scalar>::Vector v;
  for (int b = 0; b < 8; ++b) {
    const int s_bit = (b >> qubit_shift(alone)) & 1;
    const int p_hi = (b >> qubit_shift(rest[0])) & 1;
    const int p_lo = (b >> qubit_shift(rest[1])) & 1;
    v[b] = single[s_bit] * pair[2 * p_hi + p_lo];
  }
  return PureState3Q<Scalar>(v);
}

/// Draws n coordinate tuples with mu uniform on the 4-simplex (sorted
/// uniform spacings) and phi uniform on [0, pi]. The sequence depends only
/// on (seed, n prefix).
template <typename Scalar = double>
std::vector<CanonicalParams<Scalar>> sample_canonical(std::uint64_t seed,
                                                      std::size_t n) {
  if (n < 1) throw std::invalid_argument("sample_canonical: n >= 1");
  std::mt19937_64 rng(seed);
  std::vector<CanonicalParams<Scalar>> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::array<double, 4> cuts;
    for (double& c : cuts) c = detail::uniform_unit(rng);
    std::sort(cuts.begin(), cuts.end());
    std::array<Scalar, 5> mu{
        Scalar(cuts[0]), Scalar(cuts[1] - cuts[0]), Scalar(cuts[2] - cuts[1]),
        Scalar(cuts[3] - cuts[2]), Scalar(1.0 - cuts[3])};
    const Scalar phi =
        Scalar(detail::uniform_unit(rng)) * std::numbers::pi_v<Scalar>;
    out.emplace_back(mu, phi);
  }
  return out;
}

/// Draws n angle triples with theta1 uniform on [0, pi/2] and theta2,
/// theta3 uniform on [0, pi]. Deterministic for a fixed seed.
template <typename Scalar = double>
std::vector<ThreeSpinorParams<Scalar>> sample_three_spinor(std::uint64_t seed,
                                                           std::size_t n) {
  if (n < 1) throw std::invalid_argument("sample_three_spinor: n >= 1");
  std::mt19937_64 rng(seed);
  const Scalar pi = std::numbers::pi_v<Scalar>;
  std::vector<ThreeSpinorParams<Scalar>> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Scalar t1 = Scalar(detail::uniform_unit(rng)) * pi / Scalar(2);
    const Scalar t2 = Scalar(detail::uniform_unit(rng)) * pi;
    const Scalar t3 = Scalar(detail::uniform_unit(rng)) * pi;
    out.emplace_back(t1, t2, t3);
  }
  return out;
}

}  // namespace tribell

#endif  // TRIBELL_STATES_HPP

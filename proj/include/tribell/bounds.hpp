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

#ifndef TRIBELL_BOUNDS_HPP
#define TRIBELL_BOUNDS_HPP

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace tribell {

template <typename Scalar = double>
struct BoundInterval {
  Scalar lower;
  Scalar upper;
};

/// Empirical envelope of (tau, sigma) for a given maximal Mermin value m:
/// max(1 - m^2/4, 0, m^2/8 - 1) <= tau, sigma <= m^2/16.
template <typename Scalar>
BoundInterval<Scalar> mermin_bounds(Scalar m) {
  if (!(m >= Scalar(0) && m <= Scalar(4) + Scalar(1e-6))) {
    throw std::invalid_argument("mermin_bounds: m outside [0, 4]");
  }
  const Scalar m2 = m * m;
  const Scalar lower =
      std::max({Scalar(1) - m2 / Scalar(4), Scalar(0), m2 / Scalar(8) - Scalar(1)});
  return {lower, m2 / Scalar(16)};
}

/// Empirical envelope for a given maximal Svetlichny value m:
/// |m^2/16 - 1| <= tau, sigma <= m^2/32.
template <typename Scalar>
BoundInterval<Scalar> svetlichny_bounds(Scalar m) {
  if (!(m >= Scalar(0) &&
        m <= Scalar(4) * std::numbers::sqrt2_v<Scalar> + Scalar(1e-6))) {
    throw std::invalid_argument("svetlichny_bounds: m outside [0, 4*sqrt(2)]");
  }
  const Scalar m2 = m * m;
  return {std::abs(m2 / Scalar(16) - Scalar(1)), m2 / Scalar(32)};
}

/// Scarani-Gisin approximation for the one-parameter GHZ-like family:
/// M_M ~= max(4 sqrt(tau), 2 sqrt(1 - tau)).
template <typename Scalar>
Scalar scarani_gisin(Scalar tau) {
  if (!(tau >= Scalar(0) && tau <= Scalar(1))) {
    throw std::invalid_argument("scarani_gisin: tau outside [0, 1]");
  }
  return std::max(Scalar(4) * std::sqrt(tau),
                  Scalar(2) * std::sqrt(Scalar(1) - tau));
}

/// Verdict of one record against both envelopes. A measure passes when it
/// lies in [lower - slack, upper + slack]. The slack absorbs optimizer
/// shortfall in the numerically maximized m values; see check_record.
template <typename Scalar = double>
struct BoundCheck {
  Scalar mermin_lower, mermin_upper;
  Scalar svet_lower, svet_upper;
  bool tau_ok_mermin, sigma_ok_mermin;
  bool tau_ok_svet, sigma_ok_svet;
  Scalar slack;

  bool all_ok() const {
    return tau_ok_mermin && sigma_ok_mermin && tau_ok_svet && sigma_ok_svet;
  }
};

/// Checks tau and sigma of one record against both envelopes at the given
/// slack. The default slack 1e-4 is dominated by the allowance for the
/// numerical maximization undershooting the true m (which shrinks the
/// upper bound); the measure values themselves are accurate to ~1e-10.
template <typename Scalar>
BoundCheck<Scalar> check_record(Scalar tau, Scalar sigma, Scalar m_m,
                                Scalar m_s, Scalar slack = Scalar(1e-4)) {
  const auto mer = mermin_bounds(m_m);
  const auto sve = svetlichny_bounds(m_s);
  auto inside = [&](Scalar v, const BoundInterval<Scalar>& b) {
    return v >= b.lower - slack && v <= b.upper + slack;
  };
  return {mer.lower,         mer.upper,
          sve.lower,         sve.upper,
          inside(tau, mer),  inside(sigma, mer),
          inside(tau, sve),  inside(sigma, sve),
          slack};
}

}  // namespace tribell

#endif  // TRIBELL_BOUNDS_HPP

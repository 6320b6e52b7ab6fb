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

#ifndef TRIBELL_NELDER_MEAD_HPP
#define TRIBELL_NELDER_MEAD_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include <Eigen/Dense>

namespace tribell {

template <typename Scalar, int N>
struct NelderMeadResult {
  Eigen::Matrix<Scalar, N, 1> x;
  Scalar value;
  int evaluations;
  bool converged;
};

/// Classic Nelder-Mead simplex descent with the standard coefficients
/// (reflection 1, expansion 2, contraction 1/2, shrink 1/2).
///
/// Stops when the spread of objective values over the simplex drops below
/// tol, or after max_evals objective evaluations. The initial simplex is
/// x0 plus `step` along each coordinate axis.
template <typename Scalar, int N, typename F>
NelderMeadResult<Scalar, N> nelder_mead_minimize(
    F&& f, const Eigen::Matrix<Scalar, N, 1>& x0, Scalar step, Scalar tol,
    int max_evals) {
  using Vec = Eigen::Matrix<Scalar, N, 1>;

  std::array<Vec, N + 1> xs;
  std::array<Scalar, N + 1> fs;
  int evals = 0;
  auto eval = [&](const Vec& x) {
    ++evals;
    return f(x);
  };

  xs[0] = x0;
  fs[0] = eval(xs[0]);
  for (int i = 0; i < N; ++i) {
    xs[i + 1] = x0;
    xs[i + 1][i] += step;
    fs[i + 1] = eval(xs[i + 1]);
  }

  std::array<int, N + 1> order;
  std::iota(order.begin(), order.end(), 0);
  auto sort_simplex = [&] {
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return fs[a] < fs[b]; });
  };

  bool converged = false;
  while (evals < max_evals) {
    sort_simplex();
    const int best = order[0];
    const int worst = order[N];
    const int second_worst = order[N - 1];

    if (fs[worst] - fs[best] <= tol) {
      converged = true;
      break;
    }

    Vec centroid = Vec::Zero();
    for (int i = 0; i <= N; ++i) {
      if (i != worst) centroid += xs[i];
    }
    centroid /= Scalar(N);

    const Vec reflected = centroid + (centroid - xs[worst]);
    const Scalar f_ref = eval(reflected);

    if (f_ref < fs[best]) {
      const Vec expanded = centroid + Scalar(2) * (centroid - xs[worst]);
      const Scalar f_exp = eval(expanded);
      if (f_exp < f_ref) {
        xs[worst] = expanded;
        fs[worst] = f_exp;
      } else {
        xs[worst] = reflected;
        fs[worst] = f_ref;
      }
    } else if (f_ref < fs[second_worst]) {
      xs[worst] = reflected;
      fs[worst] = f_ref;
    } else {
      // Contract toward the better of (worst, reflected).
      const bool outside = f_ref < fs[worst];
      const Vec& toward = outside ? reflected : xs[worst];
      const Vec contracted = centroid + Scalar(0.5) * (toward - centroid);
      const Scalar f_con = eval(contracted);
      if (f_con < (outside ? f_ref : fs[worst])) {
        xs[worst] = contracted;
        fs[worst] = f_con;
      } else {
        // Shrink everything toward the best vertex.
        for (int i = 1; i <= N; ++i) {
          const int k = order[i];
          xs[k] = xs[best] + Scalar(0.5) * (xs[k] - xs[best]);
          fs[k] = eval(xs[k]);
          if (evals >= max_evals) break;
        }
      }
    }
  }

  sort_simplex();
  return {xs[order[0]], fs[order[0]], evals, converged};
}

}  // namespace tribell

#endif  // TRIBELL_NELDER_MEAD_HPP

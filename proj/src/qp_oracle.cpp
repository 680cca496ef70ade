// Copyright 2026 The etcml Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "etcml/qp_oracle.hpp"

#include <cmath>
#include <limits>

#include "etcml/error.hpp"

namespace etcml {

namespace {

constexpr double kFeasTol = 1e-9;
constexpr double kKktTol = 1e-7;

// Gaussian elimination with partial pivoting. Consistent singular systems
// get a basic solution (pivotless unknowns set to 0); inconsistent ones
// return false.
bool solve_linear(std::vector<double> a, std::vector<double> b,
                  std::vector<double>& out) {
  const std::size_t n = b.size();
  std::vector<std::size_t> col_of_row(n, n);
  std::size_t row = 0;
  for (std::size_t col = 0; col < n && row < n; ++col) {
    std::size_t pivot = row;
    for (std::size_t r = row + 1; r < n; ++r)
      if (std::fabs(a[r * n + col]) > std::fabs(a[pivot * n + col])) pivot = r;
    if (std::fabs(a[pivot * n + col]) < 1e-10) continue;
    if (pivot != row) {
      for (std::size_t k = 0; k < n; ++k) std::swap(a[pivot * n + k], a[row * n + k]);
      std::swap(b[pivot], b[row]);
    }
    for (std::size_t r = row + 1; r < n; ++r) {
      const double factor = a[r * n + col] / a[row * n + col];
      if (factor == 0.0) continue;
      for (std::size_t k = col; k < n; ++k) a[r * n + k] -= factor * a[row * n + k];
      b[r] -= factor * b[row];
    }
    col_of_row[row] = col;
    ++row;
  }
  for (std::size_t r = row; r < n; ++r)
    if (std::fabs(b[r]) > 1e-8) return false;  // 0 = nonzero: inconsistent

  out.assign(n, 0.0);
  for (std::size_t r = row; r-- > 0;) {
    const std::size_t col = col_of_row[r];
    double acc = b[r];
    for (std::size_t k = col + 1; k < n; ++k) acc -= a[r * n + k] * out[k];
    out[col] = acc / a[r * n + col];
  }
  return true;
}

}  // namespace

QpSolution qp_oracle(const FeatureMatrix& x, const std::vector<int>& y, double c,
                     const KernelSpec& spec) {
  const std::size_t n = x.rows;
  if (n == 0 || n > 6)
    fail(ErrorCode::kInvalidArgument, "qp_oracle handles 1..6 samples");
  if (y.size() != n) fail(ErrorCode::kDimensionMismatch, "label count mismatch");
  if (c <= 0.0) fail(ErrorCode::kInvalidArgument, "C must be positive");

  const std::vector<double> k = gram(spec, x, x);
  const auto q = [&](std::size_t i, std::size_t j) {
    return static_cast<double>(y[i] * y[j]) * k[i * n + j];
  };

  std::size_t assignments = 1;
  for (std::size_t i = 0; i < n; ++i) assignments *= 3;

  QpSolution best;
  bool found = false;

  for (std::size_t code = 0; code < assignments; ++code) {
    // Decode each position to 0 (at zero), 1 (at C), 2 (free).
    std::vector<int> state(n);
    std::size_t rest = code;
    for (std::size_t i = 0; i < n; ++i) {
      state[i] = static_cast<int>(rest % 3);
      rest /= 3;
    }

    std::vector<std::size_t> free_set;
    std::vector<double> alpha(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      if (state[i] == 1) alpha[i] = c;
      else if (state[i] == 2) free_set.push_back(i);
    }

    if (free_set.empty()) {
      double balance = 0.0;
      for (std::size_t i = 0; i < n; ++i) balance += y[i] * alpha[i];
      if (std::fabs(balance) > kFeasTol) continue;
    } else {
      // Stationarity on the free set plus the equality constraint:
      //   sum_{j in F} Q_ij a_j + y_i * lambda = 1 - sum_{j at C} Q_ij * C
      //   sum_{i in F} y_i a_i = -sum_{i at C} y_i * C
      const std::size_t m = free_set.size() + 1;
      std::vector<double> mat(m * m, 0.0);
      std::vector<double> rhs(m, 0.0);
      for (std::size_t r = 0; r < free_set.size(); ++r) {
        const std::size_t i = free_set[r];
        for (std::size_t s = 0; s < free_set.size(); ++s)
          mat[r * m + s] = q(i, free_set[s]);
        mat[r * m + free_set.size()] = static_cast<double>(y[i]);
        double fixed = 0.0;
        for (std::size_t j = 0; j < n; ++j)
          if (state[j] == 1) fixed += q(i, j) * c;
        rhs[r] = 1.0 - fixed;
      }
      for (std::size_t s = 0; s < free_set.size(); ++s)
        mat[free_set.size() * m + s] = static_cast<double>(y[free_set[s]]);
      double fixed_balance = 0.0;
      for (std::size_t j = 0; j < n; ++j)
        if (state[j] == 1) fixed_balance += y[j] * c;
      rhs[free_set.size()] = -fixed_balance;

      std::vector<double> solution;
      if (!solve_linear(std::move(mat), std::move(rhs), solution)) continue;
      bool feasible = true;
      for (std::size_t r = 0; r < free_set.size(); ++r) {
        if (solution[r] < -kFeasTol || solution[r] > c + kFeasTol) {
          feasible = false;
          break;
        }
        alpha[free_set[r]] = std::min(c, std::max(0.0, solution[r]));
      }
      if (!feasible) continue;
    }

    // KKT: some bias must satisfy every complementarity condition.
    std::vector<double> f_nob(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        f_nob[i] += alpha[j] * y[j] * k[i * n + j];
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      const double yi = y[i];
      // y_i (f_nob_i + b) >= 1 when alpha can grow, <= 1 when it can shrink.
      const bool at_zero = alpha[i] <= kFeasTol;
      const bool at_c = alpha[i] >= c - kFeasTol;
      if (at_zero) {
        // y_i(f+b) >= 1  =>  b >= y_i - f  (y=+1)  or  b <= y_i - f (y=-1)
        const double bound = yi - f_nob[i];
        if (yi > 0) lo = std::max(lo, bound - kKktTol);
        else hi = std::min(hi, bound + kKktTol);
      }
      if (at_c) {
        const double bound = yi - f_nob[i];
        if (yi > 0) hi = std::min(hi, bound + kKktTol);
        else lo = std::max(lo, bound - kKktTol);
      }
      if (!at_zero && !at_c) {
        const double bound = yi - f_nob[i];
        lo = std::max(lo, bound - kKktTol);
        hi = std::min(hi, bound + kKktTol);
      }
    }
    if (lo > hi) continue;

    double objective = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      objective += alpha[i];
      for (std::size_t j = 0; j < n; ++j)
        objective -= 0.5 * alpha[i] * alpha[j] * q(i, j);
    }
    if (!found || objective > best.objective) {
      best.alpha = alpha;
      best.objective = objective;
      best.bias = std::isfinite(lo) && std::isfinite(hi) ? (lo + hi) / 2.0
                  : std::isfinite(lo)                    ? lo
                  : std::isfinite(hi)                    ? hi
                                                         : 0.0;
      found = true;
    }
  }

  if (!found)
    fail(ErrorCode::kInternal, "qp_oracle found no KKT point (solver bug)");
  return best;
}

}  // namespace etcml

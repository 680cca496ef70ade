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

#ifndef ETCML_QP_ORACLE_HPP
#define ETCML_QP_ORACLE_HPP

#include <vector>

#include "etcml/kernel.hpp"

namespace etcml {

struct QpSolution {
  std::vector<double> alpha;
  double objective = 0.0;  // dual objective sum(a) - 1/2 a'Qa
  double bias = 0.0;
};

// Exhaustive reference solver for the soft-margin SVM dual on tiny
// instances (rows <= 6). Enumerates every assignment of each alpha to
// {0, C, free}, solves the equality-constrained stationarity system on the
// free set, keeps box-feasible candidates admitting a consistent bias, and
// returns the one with the largest dual objective. Independent of the SMO
// path by construction.
QpSolution qp_oracle(const FeatureMatrix& x, const std::vector<int>& y, double c,
                     const KernelSpec& spec);

}  // namespace etcml

#endif  // ETCML_QP_ORACLE_HPP

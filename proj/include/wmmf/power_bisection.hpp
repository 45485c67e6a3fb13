// Copyright 2026 The wmmf Authors
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

#pragma once

#include <vector>

#include <Eigen/Dense>

namespace wmmf {

/// (gram + mu I) X = rhs with gram Hermitian positive semi-definite.
struct RegularizedSystem {
  Eigen::MatrixXcd gram;
  Eigen::MatrixXcd rhs;
};

struct BisectionOptions {
  double tolerance = 1e-8;  // relative, on the power budget
  double mu_min = 1e-9;
};

struct BisectionResult {
  double mu = 0.0;
  std::vector<Eigen::MatrixXcd> solutions;
  double power = 0.0;
  int iterations = 0;
};

/// Solution of one system through a Cholesky factorization of gram + mu I.
Eigen::MatrixXcd solve_regularized(const RegularizedSystem& system, double mu);

/// Finds the power multiplier shared by all systems such that the summed
/// squared norm of the solutions meets `budget`.
///
/// The bracket is [mu_min, hi] with hi found by doubling from 1; it is
/// halved in log-space.
/// Power evaluations use one eigendecomposition per system; the returned
/// solutions come from solve_regularized at the final mu. The result
/// satisfies |power - budget| <= tolerance * budget, or mu == mu_min with
/// power below the budget. Throws NumericalFailure if no bracket exists
/// within 128 doublings.
BisectionResult bisect_power(const std::vector<RegularizedSystem>& systems, double budget,
                             const BisectionOptions& options);

}  // namespace wmmf

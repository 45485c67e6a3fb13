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

#include "wmmf/power_bisection.hpp"

#include <cmath>

#include "wmmf/errors.hpp"

namespace wmmf {

namespace {

struct Spectral {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd rhs_energy;  // |Q^H rhs|^2, one column per right-hand side
};

double spectral_power(const std::vector<Spectral>& spectra, double mu) {
  double power = 0.0;
  for (const auto& s : spectra) {
    const Eigen::ArrayXd denom = (s.eigenvalues.array() + mu).square();
    power += (s.rhs_energy.array().colwise() / denom).sum();
  }
  return power;
}

}  // namespace

Eigen::MatrixXcd solve_regularized(const RegularizedSystem& system, double mu) {
  Eigen::MatrixXcd regularized = system.gram;
  regularized.diagonal().array() += mu;
  const Eigen::LLT<Eigen::MatrixXcd> llt(regularized);
  if (llt.info() != Eigen::Success)
    throw NumericalFailure("regularized system is not positive definite (mu=" +
                           std::to_string(mu) + ")");
  return llt.solve(system.rhs);
}

BisectionResult bisect_power(const std::vector<RegularizedSystem>& systems, double budget,
                             const BisectionOptions& options) {
  std::vector<Spectral> spectra;
  spectra.reserve(systems.size());
  for (const auto& sys : systems) {
    if (!sys.gram.allFinite() || !sys.rhs.allFinite())
      throw NumericalFailure("non-finite input to power bisection");
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(sys.gram);
    Spectral s;
    s.eigenvalues = eig.eigenvalues().cwiseMax(0.0);
    s.rhs_energy = (eig.eigenvectors().adjoint() * sys.rhs).cwiseAbs2();
    spectra.push_back(std::move(s));
  }

  BisectionResult result;
  auto finish = [&](double mu) {
    result.mu = mu;
    result.solutions.clear();
    result.power = 0.0;
    for (const auto& sys : systems) {
      result.solutions.push_back(solve_regularized(sys, mu));
      result.power += result.solutions.back().squaredNorm();
    }
    return result;
  };

  const double tol = options.tolerance * budget;
  double lo = options.mu_min;
  if (spectral_power(spectra, lo) <= budget) return finish(lo);

  double hi = 1.0;
  int doublings = 0;
  while (spectral_power(spectra, hi) > budget) {
    if (++doublings > 128) throw NumericalFailure("power bisection: no upper bracket for mu");
    lo = hi;
    hi *= 2.0;
  }
  if (hi <= lo) hi = 2.0 * lo;

  double mu = hi;
  for (int it = 0; it < 400; ++it) {
    ++result.iterations;
    const double mid = std::sqrt(lo * hi);
    const double p = spectral_power(spectra, mid);
    if (std::abs(p - budget) <= tol) {
      mu = mid;
      break;
    }
    if (p > budget) {
      lo = mid;
    } else {
      hi = mid;
    }
    mu = hi;
    if (hi / lo - 1.0 < 1e-15) break;
  }
  return finish(mu);
}

}  // namespace wmmf

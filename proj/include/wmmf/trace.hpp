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

#include <string>
#include <vector>

#include "wmmf/errors.hpp"

namespace wmmf {

/// One inner (dual) iteration.
struct InnerRecord {
  int outer = 0;
  int inner = 0;
  double common_rate = 0.0;          // bits/use; min SINR in linear units for the SISO solver
  std::vector<double> group_rates;   // alpha_g * sum_l r_{g,l}
  double power = 0.0;
  double mu = 0.0;
  double stationarity = 0.0;         // relative residual of the beamformer equation
  double constraint_violation = 0.0;
  double achieved = 0.0;             // true objective of this iterate
  bool degenerate = false;           // an update kept its previous value
};

/// One outer iteration (receiver or linearization update).
struct OuterRecord {
  int outer = 0;
  int inner_iterations = 0;
  double achieved = 0.0;
  double best_achieved = 0.0;
  double min_stream_rate = 0.0;      // min over (k, l) of log2(1 + sinr)
};

struct SolveTrace {
  std::vector<InnerRecord> inner;
  std::vector<OuterRecord> outer;

  /// CSV with one row per inner iteration, outer-level columns repeated.
  std::string to_csv() const;
};

/// Non-finite value inside a solver; carries the trace up to the failure.
class SolveFailure : public NumericalFailure {
 public:
  SolveFailure(const std::string& what, SolveTrace trace)
      : NumericalFailure(what), trace_(std::move(trace)) {}

  const SolveTrace& trace() const noexcept { return trace_; }

 private:
  SolveTrace trace_;
};

}  // namespace wmmf

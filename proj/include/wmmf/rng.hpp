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

#include <complex>
#include <cstdint>
#include <random>

namespace wmmf {

// Deterministic random streams.
//
// Every stream is a std::mt19937_64 whose seed is derived from the scenario
// seed and a stream identifier through one SplitMix64 step. Gaussian deviates
// use the Box-Muller transform over 53-bit uniforms (u1 in (0,1], u2 in
// [0,1)). std::normal_distribution is not used.
enum class RngStream : std::uint64_t {
  kChannels = 0x43484e4cULL,
  kInitialBeamformers = 0x42464d52ULL,
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

class GaussianSource {
 public:
  GaussianSource(std::uint64_t seed, RngStream stream);

  /// One real N(0, 1) deviate.
  double normal();

  /// Circularly-symmetric CN(0, 1): real and imaginary parts each N(0, 1/2).
  std::complex<double> complex_normal();

 private:
  double uniform_open_closed();
  double uniform_closed_open();

  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace wmmf

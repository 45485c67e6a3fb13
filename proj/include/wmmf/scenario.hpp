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

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

namespace wmmf {

/// Shape of a multi-group multicast downlink. Users are numbered group by
/// group: the first users_per_group[0] users belong to group 0, and so on.
struct Dimensions {
  int num_tx_antennas = 0;
  int num_groups = 0;
  std::vector<int> users_per_group;
  std::vector<int> rx_antennas_per_user;
  std::vector<int> streams_per_group;

  int num_users() const;
  int group_of(int user) const;
  int first_user(int group) const;
  int max_streams() const;
  int total_streams() const;

  /// Throws ValidationError naming the violated invariant.
  void validate() const;

  /// More streams than transmit antennas; valid, but the solvers may drive
  /// some stream rates towards zero.
  bool interference_limited() const { return total_streams() > num_tx_antennas; }

  /// Fills streams_per_group with min over each group's users of N_k.
  void set_default_streams();

  bool operator==(const Dimensions&) const = default;
};

/// Immutable problem instance. All quantities are in linear units.
struct Scenario {
  Dimensions dims;
  std::vector<Eigen::MatrixXcd> channels;  // H_k, N_k x N_T
  std::vector<double> noise_power;         // sigma_k^2
  std::vector<double> weights;             // alpha_g
  double power_budget = 0.0;               // P_T
  std::uint64_t seed = 0;

  void validate() const;

  bool operator==(const Scenario& other) const;
};

double db_to_linear(double db);

/// Draws i.i.d. CN(0, 1) channels from the seed's channel stream.
/// `sigma2` is the common linear noise power; `weights` may be empty for
/// uniform priorities.
Scenario generate_scenario(Dimensions dims, double p_t_db, double sigma2,
                           std::vector<double> weights, std::uint64_t seed);

// JSON mapping. A config object may omit "channels", in which case they are
// generated from "seed". See README for the schema.
Scenario scenario_from_json(const nlohmann::json& config);
nlohmann::json scenario_to_json(const Scenario& scenario);

nlohmann::json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

Scenario load_scenario(const std::filesystem::path& path);
void save_scenario(const Scenario& scenario, const std::filesystem::path& path);

}  // namespace wmmf

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

#include "wmmf/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <optional>
#include <sstream>

#include "wmmf/errors.hpp"
#include "wmmf/rng.hpp"

namespace wmmf {

using nlohmann::json;

int Dimensions::num_users() const {
  return std::accumulate(users_per_group.begin(), users_per_group.end(), 0);
}

int Dimensions::group_of(int user) const {
  int end = 0;
  for (int g = 0; g < num_groups; ++g) {
    end += users_per_group[g];
    if (user < end) return g;
  }
  throw ValidationError("user index " + std::to_string(user) + " out of range");
}

int Dimensions::first_user(int group) const {
  return std::accumulate(users_per_group.begin(), users_per_group.begin() + group, 0);
}

int Dimensions::max_streams() const {
  return streams_per_group.empty()
             ? 0
             : *std::max_element(streams_per_group.begin(), streams_per_group.end());
}

int Dimensions::total_streams() const {
  return std::accumulate(streams_per_group.begin(), streams_per_group.end(), 0);
}

void Dimensions::set_default_streams() {
  streams_per_group.assign(num_groups, 0);
  int k = 0;
  for (int g = 0; g < num_groups; ++g) {
    int streams = 0;
    for (int i = 0; i < users_per_group[g]; ++i, ++k) {
      const int n_rx = rx_antennas_per_user.at(k);
      streams = i == 0 ? n_rx : std::min(streams, n_rx);
    }
    streams_per_group[g] = streams;
  }
}

void Dimensions::validate() const {
  if (num_tx_antennas < 1) throw ValidationError("num_tx_antennas must be positive");
  if (num_groups < 1) throw ValidationError("num_groups must be positive");
  if (static_cast<int>(users_per_group.size()) != num_groups)
    throw ValidationError("users_per_group must have one entry per group (K_g list length != G)");
  if (static_cast<int>(streams_per_group.size()) != num_groups)
    throw ValidationError("streams_per_group must have one entry per group (L_g list length != G)");
  for (int g = 0; g < num_groups; ++g) {
    if (users_per_group[g] < 1)
      throw ValidationError("group " + std::to_string(g) + " has no users (K_g must be positive)");
  }
  if (static_cast<int>(rx_antennas_per_user.size()) != num_users())
    throw ValidationError("rx_antennas_per_user must have K = sum of K_g entries");
  for (int k = 0; k < num_users(); ++k) {
    if (rx_antennas_per_user[k] < 1)
      throw ValidationError("user " + std::to_string(k) + " has no receive antennas");
  }
  int k = 0;
  for (int g = 0; g < num_groups; ++g) {
    const int streams = streams_per_group[g];
    if (streams < 1)
      throw ValidationError("group " + std::to_string(g) + " needs at least one stream");
    for (int i = 0; i < users_per_group[g]; ++i, ++k) {
      if (streams > rx_antennas_per_user[k])
        throw ValidationError("group " + std::to_string(g) + " has L_g=" +
                              std::to_string(streams) + " streams but user " +
                              std::to_string(k) + " has only " +
                              std::to_string(rx_antennas_per_user[k]) +
                              " receive antennas (L_g <= min N_k)");
    }
  }
}

void Scenario::validate() const {
  dims.validate();
  const int num_users = dims.num_users();
  if (static_cast<int>(channels.size()) != num_users)
    throw ValidationError("expected one channel matrix per user");
  for (int k = 0; k < num_users; ++k) {
    const auto& h = channels[k];
    if (h.rows() != dims.rx_antennas_per_user[k] || h.cols() != dims.num_tx_antennas)
      throw ValidationError("channel of user " + std::to_string(k) + " must be N_k x N_T");
    if (!h.allFinite())
      throw ValidationError("channel of user " + std::to_string(k) + " has non-finite entries");
  }
  if (static_cast<int>(noise_power.size()) != num_users)
    throw ValidationError("expected one noise power per user");
  for (int k = 0; k < num_users; ++k) {
    if (!(noise_power[k] > 0.0) || !std::isfinite(noise_power[k]))
      throw ValidationError("noise power of user " + std::to_string(k) + " must be positive");
  }
  if (static_cast<int>(weights.size()) != dims.num_groups)
    throw ValidationError("expected one weight per group");
  for (int g = 0; g < dims.num_groups; ++g) {
    if (!(weights[g] > 0.0) || !std::isfinite(weights[g]))
      throw ValidationError("weight of group " + std::to_string(g) + " must be positive");
  }
  if (!(power_budget > 0.0) || !std::isfinite(power_budget))
    throw ValidationError("power budget P_T must be positive");
}

bool Scenario::operator==(const Scenario& other) const {
  if (!(dims == other.dims) || noise_power != other.noise_power || weights != other.weights ||
      power_budget != other.power_budget || seed != other.seed ||
      channels.size() != other.channels.size()) {
    return false;
  }
  for (std::size_t k = 0; k < channels.size(); ++k) {
    if (channels[k].rows() != other.channels[k].rows() ||
        channels[k].cols() != other.channels[k].cols() || channels[k] != other.channels[k]) {
      return false;
    }
  }
  return true;
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

namespace {

std::vector<Eigen::MatrixXcd> draw_channels(const Dimensions& dims, std::uint64_t seed) {
  GaussianSource source(seed, RngStream::kChannels);
  std::vector<Eigen::MatrixXcd> channels;
  channels.reserve(dims.num_users());
  for (int k = 0; k < dims.num_users(); ++k) {
    Eigen::MatrixXcd h(dims.rx_antennas_per_user[k], dims.num_tx_antennas);
    // Row-major draw order.
    for (Eigen::Index r = 0; r < h.rows(); ++r)
      for (Eigen::Index c = 0; c < h.cols(); ++c) h(r, c) = source.complex_normal();
    channels.push_back(std::move(h));
  }
  return channels;
}

// Field access with a JSON-pointer-like path in error messages.
const json& field(const json& obj, const std::string& name, const std::string& path) {
  if (!obj.is_object()) throw ParseError(path + ": expected an object");
  auto it = obj.find(name);
  if (it == obj.end()) throw ParseError(path + "/" + name + ": missing required field");
  return *it;
}

double as_number(const json& value, const std::string& path) {
  if (!value.is_number()) throw ParseError(path + ": expected a number");
  return value.get<double>();
}

long long as_integer(const json& value, const std::string& path) {
  if (!value.is_number_integer()) throw ParseError(path + ": expected an integer");
  return value.get<long long>();
}

std::uint64_t as_seed(const json& value, const std::string& path) {
  if (value.is_number_unsigned()) return value.get<std::uint64_t>();
  if (value.is_number_integer() && value.get<long long>() >= 0)
    return static_cast<std::uint64_t>(value.get<long long>());
  throw ParseError(path + ": expected a non-negative integer");
}

Eigen::MatrixXcd parse_matrix(const json& value, const std::string& path) {
  if (!value.is_array()) throw ParseError(path + ": expected an array of rows");
  const auto rows = static_cast<Eigen::Index>(value.size());
  Eigen::Index cols = -1;
  Eigen::MatrixXcd m;
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& row = value[r];
    const std::string row_path = path + "/" + std::to_string(r);
    if (!row.is_array()) throw ParseError(row_path + ": expected an array of [re, im] pairs");
    if (cols < 0) {
      cols = static_cast<Eigen::Index>(row.size());
      m.resize(rows, cols);
    } else if (static_cast<Eigen::Index>(row.size()) != cols) {
      throw ParseError(row_path + ": ragged matrix row");
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      const auto& entry = row[c];
      const std::string entry_path = row_path + "/" + std::to_string(c);
      if (!entry.is_array() || entry.size() != 2)
        throw ParseError(entry_path + ": expected [re, im]");
      m(r, c) = {as_number(entry[0], entry_path + "/0"), as_number(entry[1], entry_path + "/1")};
    }
  }
  return m;
}

json matrix_to_json(const Eigen::MatrixXcd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

Scenario generate_scenario(Dimensions dims, double p_t_db, double sigma2,
                           std::vector<double> weights, std::uint64_t seed) {
  if (dims.streams_per_group.empty() && !dims.rx_antennas_per_user.empty() &&
      static_cast<int>(dims.users_per_group.size()) == dims.num_groups) {
    dims.set_default_streams();
  }
  dims.validate();
  if (weights.empty()) weights.assign(dims.num_groups, 1.0);
  Scenario s;
  s.channels = draw_channels(dims, seed);
  s.noise_power.assign(dims.num_users(), sigma2);
  s.weights = std::move(weights);
  s.power_budget = db_to_linear(p_t_db);
  s.seed = seed;
  s.dims = std::move(dims);
  s.validate();
  return s;
}

Scenario scenario_from_json(const json& config) {
  const std::string root;
  Scenario s;
  s.seed = config.contains("seed") ? as_seed(config["seed"], "/seed") : 0;

  Dimensions& dims = s.dims;
  dims.num_tx_antennas = static_cast<int>(as_integer(field(config, "n_tx", root), "/n_tx"));
  const json& groups = field(config, "groups", root);
  if (!groups.is_array()) throw ParseError("/groups: expected an array");
  dims.num_groups = static_cast<int>(groups.size());

  std::optional<double> common_sigma2;
  if (config.contains("sigma2")) {
    common_sigma2 = as_number(config["sigma2"], "/sigma2");
  } else if (config.contains("sigma2_db")) {
    common_sigma2 = db_to_linear(as_number(config["sigma2_db"], "/sigma2_db"));
  }

  for (std::size_t g = 0; g < groups.size(); ++g) {
    const std::string gpath = "/groups/" + std::to_string(g);
    const json& group = groups[g];
    const json& users = field(group, "users", gpath);
    if (!users.is_array()) throw ParseError(gpath + "/users: expected an array");
    dims.users_per_group.push_back(static_cast<int>(users.size()));
    s.weights.push_back(group.contains("weight") ? as_number(group["weight"], gpath + "/weight")
                                                 : 1.0);
    for (std::size_t i = 0; i < users.size(); ++i) {
      const std::string upath = gpath + "/users/" + std::to_string(i);
      const json& user = users[i];
      dims.rx_antennas_per_user.push_back(
          static_cast<int>(as_integer(field(user, "n_rx", upath), upath + "/n_rx")));
      if (user.contains("sigma2")) {
        s.noise_power.push_back(as_number(user["sigma2"], upath + "/sigma2"));
      } else if (common_sigma2) {
        s.noise_power.push_back(*common_sigma2);
      } else {
        throw ParseError(upath + ": no noise power (set sigma2, sigma2_db or a per-user sigma2)");
      }
    }
  }
  if (config.contains("users_per_group")) {
    // Redundant consistency field written by some tools.
    const json& declared = config["users_per_group"];
    if (!declared.is_array() || declared.size() != groups.size())
      throw ValidationError("/users_per_group: K_g list does not match groups");
    for (std::size_t g = 0; g < groups.size(); ++g) {
      if (as_integer(declared[g], "/users_per_group/" + std::to_string(g)) !=
          dims.users_per_group[g]) {
        throw ValidationError("/users_per_group/" + std::to_string(g) +
                              ": K_g mismatch with the group's user list");
      }
    }
  }

  if (config.contains("streams_per_group") && !config["streams_per_group"].is_null()) {
    const json& streams = config["streams_per_group"];
    if (!streams.is_array()) throw ParseError("/streams_per_group: expected an array");
    for (std::size_t g = 0; g < streams.size(); ++g)
      dims.streams_per_group.push_back(
          static_cast<int>(as_integer(streams[g], "/streams_per_group/" + std::to_string(g))));
  } else {
    if (dims.rx_antennas_per_user.empty()) throw ValidationError("scenario has no users");
    dims.set_default_streams();
  }

  if (config.contains("power_budget")) {
    s.power_budget = as_number(config["power_budget"], "/power_budget");
  } else {
    s.power_budget = db_to_linear(as_number(field(config, "p_t_db", root), "/p_t_db"));
  }

  dims.validate();
  if (config.contains("channels")) {
    const json& channels = config["channels"];
    if (!channels.is_array()) throw ParseError("/channels: expected an array");
    for (std::size_t k = 0; k < channels.size(); ++k)
      s.channels.push_back(parse_matrix(channels[k], "/channels/" + std::to_string(k)));
  } else {
    s.channels = draw_channels(dims, s.seed);
  }
  s.validate();
  return s;
}

json scenario_to_json(const Scenario& s) {
  json out;
  out["seed"] = s.seed;
  out["n_tx"] = s.dims.num_tx_antennas;
  json groups = json::array();
  int k = 0;
  for (int g = 0; g < s.dims.num_groups; ++g) {
    json users = json::array();
    for (int i = 0; i < s.dims.users_per_group[g]; ++i, ++k)
      users.push_back({{"n_rx", s.dims.rx_antennas_per_user[k]}, {"sigma2", s.noise_power[k]}});
    groups.push_back({{"users", std::move(users)}, {"weight", s.weights[g]}});
  }
  out["groups"] = std::move(groups);
  out["streams_per_group"] = s.dims.streams_per_group;
  out["power_budget"] = s.power_budget;
  json channels = json::array();
  for (const auto& h : s.channels) channels.push_back(matrix_to_json(h));
  out["channels"] = std::move(channels);
  return out;
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    const auto offset = std::min<std::size_t>(e.byte, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + offset, '\n');
    throw ParseError(path.string() + ":" + std::to_string(line) + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

Scenario load_scenario(const std::filesystem::path& path) {
  return scenario_from_json(read_json_file(path));
}

void save_scenario(const Scenario& scenario, const std::filesystem::path& path) {
  write_text_file(path, scenario_to_json(scenario).dump(1) + "\n");
}

}  // namespace wmmf

// Copyright 2026 The deeptherm Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "deeptherm/config.hpp"

#include <charconv>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <json.hpp>

namespace deeptherm {

namespace {

using nlohmann::json;

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

template <class T>
T parse_number(std::string_view s, std::string_view what) {
  T v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::invalid_argument(std::string(what) + ": bad number '" + std::string(s) + "'");
  }
  return v;
}

TimeWindow parse_window(std::string_view text) {
  const std::size_t colon = text.find(':');
  if (colon == std::string_view::npos) {
    throw std::invalid_argument("plateau_window: expected <begin>:<end>");
  }
  return {parse_number<int>(text.substr(0, colon), "plateau_window"),
          parse_number<int>(text.substr(colon + 1), "plateau_window")};
}

std::string window_string(const TimeWindow& w) {
  return std::to_string(w.t_begin) + ":" + std::to_string(w.t_end);
}

json to_json_object(const ExperimentConfig& c) {
  json j;
  j["n"] = c.n;
  j["n_a"] = c.n_a;
  j["k"] = c.k;
  j["initial"] = c.initial.to_string();
  j["basis"] = c.basis.to_string();
  j["target"] = to_string(c.target);
  j["t_max"] = c.t_max ? json(*c.t_max) : json(nullptr);
  j["realizations"] = c.realizations;
  j["seed"] = c.seed ? json(*c.seed) : json(nullptr);
  j["plateau_window"] = c.plateau_window ? json(window_string(*c.plateau_window)) : json(nullptr);
  j["mc_samples"] = c.mc_samples;
  j["moment_cap"] = c.moment_cap;
  j["workers"] = c.workers;
  return j;
}

// Applies one key; `value` is the textual form for strings and the JSON
// value otherwise.
void apply_key(ExperimentConfig& c, const std::string& key, const json& v) {
  auto as_string = [&]() -> std::string {
    if (!v.is_string()) throw std::invalid_argument("config key '" + key + "' must be a string");
    return v.get<std::string>();
  };
  auto as_int = [&]() -> long long {
    if (!v.is_number_integer()) throw std::invalid_argument("config key '" + key + "' must be an integer");
    return v.get<long long>();
  };
  auto as_size = [&]() -> std::size_t {
    const long long x = as_int();
    if (x < 0) throw std::invalid_argument("config key '" + key + "' must be non-negative");
    return static_cast<std::size_t>(x);
  };
  if (key == "n") c.n = static_cast<int>(as_int());
  else if (key == "n_a") c.n_a = static_cast<int>(as_int());
  else if (key == "k") c.k = static_cast<int>(as_int());
  else if (key == "initial") c.initial = InitialState::parse(as_string());
  else if (key == "basis") c.basis = MeasurementBasis::parse(as_string());
  else if (key == "target") c.target = parse_target(as_string());
  else if (key == "t_max") c.t_max = v.is_null() ? std::nullopt : std::optional<int>(static_cast<int>(as_int()));
  else if (key == "realizations") c.realizations = static_cast<int>(as_int());
  else if (key == "seed") {
    if (v.is_null()) c.seed.reset();
    else if (v.is_number_unsigned()) c.seed = v.get<std::uint64_t>();
    else c.seed = static_cast<std::uint64_t>(as_size());
  } else if (key == "plateau_window") {
    c.plateau_window = v.is_null() ? std::nullopt : std::optional<TimeWindow>(parse_window(as_string()));
  } else if (key == "mc_samples") c.mc_samples = as_size();
  else if (key == "moment_cap") c.moment_cap = as_size();
  else if (key == "workers") c.workers = static_cast<int>(as_int());
  else throw std::invalid_argument("unknown config key '" + key + "'");
}

}  // namespace

std::string InitialState::to_string() const {
  switch (kind) {
    case Kind::kTheta:
      return "theta:" + format_double(theta);
    case Kind::kPattern:
      return "pattern:" + pattern;
    case Kind::kHaarSector:
      return "haar-sector:" + std::to_string(q0);
  }
  return {};
}

InitialState InitialState::parse(std::string_view text) {
  if (text == "neel") return neel();
  if (text == "plus") return from_theta(kPi / 4);
  if (text.starts_with("theta:")) {
    const std::string num(text.substr(6));
    std::size_t used = 0;
    double t = 0.0;
    try {
      t = std::stod(num, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != num.size()) {
      throw std::invalid_argument("initial state: bad angle '" + num + "'");
    }
    return from_theta(t);
  }
  if (text.starts_with("pattern:")) {
    const std::string unit(text.substr(8));
    if (unit.empty() || unit.find_first_not_of("01") != std::string::npos) {
      throw std::invalid_argument("initial state: pattern must be a non-empty 0/1 string");
    }
    return from_pattern(unit);
  }
  if (text.starts_with("haar-sector:")) {
    return haar_sector(parse_number<int>(text.substr(12), "initial state"));
  }
  throw std::invalid_argument("unknown initial state '" + std::string(text) + "'");
}

StateVector prepare_initial_state(const InitialState& init, int n, Stream& rng) {
  switch (init.kind) {
    case InitialState::Kind::kTheta:
      return prepare_theta_state(n, init.theta);
    case InitialState::Kind::kPattern:
      return prepare_bitstring_state(repeat_pattern(init.pattern, n));
    case InitialState::Kind::kHaarSector:
      return haar_random_sector_state(n, init.q0, rng);
  }
  throw std::logic_error("unreachable");
}

ChargeDistribution initial_charge_distribution(const InitialState& init, int n) {
  switch (init.kind) {
    case InitialState::Kind::kTheta: {
      if (n % 2 != 0) throw std::invalid_argument("theta states need even N");
      const std::vector<double> e = theta_state_excitation_probs(n, init.theta);
      return product_state_charge_distribution(e);
    }
    case InitialState::Kind::kPattern: {
      const std::string bits = repeat_pattern(init.pattern, n);
      int q = 0;
      for (char ch : bits) q += ch == '1';
      return ChargeDistribution::delta(n, q);
    }
    case InitialState::Kind::kHaarSector:
      return ChargeDistribution::delta(n, init.q0);
  }
  throw std::logic_error("unreachable");
}

TimeWindow ExperimentConfig::effective_window() const {
  return plateau_window ? *plateau_window : default_plateau_window(effective_t_max());
}

void ExperimentConfig::validate() const {
  if (n < 2 || n > 30) throw std::invalid_argument("N must be in 2..30");
  if (n_a < 0 || n_a >= n) throw std::invalid_argument("need 0 <= N_A < N");
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  replica_dimension(1 << n_a, k, moment_cap);
  if (realizations < 1) throw std::invalid_argument("realizations must be >= 1");
  if (effective_t_max() < 0) throw std::invalid_argument("t_max must be >= 0");
  if (mc_samples < 1) throw std::invalid_argument("mc_samples must be >= 1");
  if (workers < 1) throw std::invalid_argument("workers must be >= 1");
  if (plateau_window) {
    const TimeWindow& w = *plateau_window;
    if (w.t_begin < 0 || w.t_end > effective_t_max() || w.t_end < w.t_begin) {
      throw std::invalid_argument("plateau window lies outside [0, t_max]");
    }
  }
  if (initial.kind == InitialState::Kind::kHaarSector && (initial.q0 < 0 || initial.q0 > n)) {
    throw std::invalid_argument("haar-sector Q0 out of range");
  }
  const ChargeDistribution p = initial_charge_distribution(initial, n);
  if (basis.kind() == MeasurementBasis::Kind::kPerQubit &&
      static_cast<int>(basis.axes().size()) != n - n_a) {
    throw std::invalid_argument("per-qubit basis needs N - N_A axes");
  }
  auto definite = [&] {
    for (double x : p.probs()) {
      if (x == 1.0) return true;
    }
    return false;
  };
  if (const auto* ds = std::get_if<DirectSumTarget>(&target)) {
    if (ds->q0 ? (*ds->q0 < 0 || *ds->q0 > n) : !definite()) {
      throw std::invalid_argument("direct-sum target needs a valid Q0");
    }
  }
  if (const auto* fs = std::get_if<FiniteNScroogeTarget>(&target)) {
    if (fs->q0 ? (*fs->q0 < 0 || *fs->q0 > n) : !definite()) {
      throw std::invalid_argument("finite-n-scrooge target needs a valid Q0");
    }
  }
  if (const auto* sh = std::get_if<SectorHaarTarget>(&target)) {
    if (sh->q_a < 0 || sh->q_a > n_a) throw std::invalid_argument("sector-haar Q_A out of range");
  }
  if (std::holds_alternative<ScroogeTarget>(target) && std::get<ScroogeTarget>(target).rho) {
    const auto& rho = *std::get<ScroogeTarget>(target).rho;
    if (rho.rows() != (1 << n_a)) throw std::invalid_argument("scrooge density matrix is not d_A x d_A");
  }
}

std::string to_json(const ExperimentConfig& config) { return to_json_object(config).dump(2); }

ExperimentConfig config_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config JSON: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("config JSON must be an object");
  ExperimentConfig c;
  for (const auto& [key, value] : j.items()) apply_key(c, key, value);
  return c;
}

std::string to_toml(const ExperimentConfig& config) {
  std::ostringstream out;
  const json j = to_json_object(config);
  for (const auto& [key, value] : j.items()) {
    if (value.is_null()) continue;
    out << key << " = " << value.dump() << "\n";
  }
  return out.str();
}

ExperimentConfig config_from_toml(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigTOML().from_config(in);
  } catch (const CLI::Error& e) {
    throw std::invalid_argument(std::string("config TOML: ") + e.what());
  }
  ExperimentConfig c;
  for (const CLI::ConfigItem& item : items) {
    if (!item.parents.empty()) throw std::invalid_argument("config TOML: tables are not supported");
    if (item.name == "++" || item.name == "--") continue;
    if (item.inputs.size() != 1) {
      throw std::invalid_argument("config TOML: key '" + item.name + "' needs one value");
    }
    const std::string& raw = item.inputs.front();
    json value;
    try {
      value = json::parse(raw);
    } catch (const json::parse_error&) {
      value = raw;  // CLI11 strips the quotes from strings
    }
    if (value.is_number() || value.is_boolean() || value.is_null()) {
      static const char* const kStringKeys[] = {"initial", "basis", "target", "plateau_window"};
      for (const char* sk : kStringKeys) {
        if (item.name == sk) value = raw;
      }
    }
    apply_key(c, item.name, value);
  }
  return c;
}

std::string fingerprint(const ExperimentConfig& config) {
  const std::string canon = to_json_object(config).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : canon) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(mix64(h)));
  return buf;
}

}  // namespace deeptherm

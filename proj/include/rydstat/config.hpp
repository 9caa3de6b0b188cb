// Copyright 2026 The rydstat Authors
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
#include <functional>
#include <istream>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <type_traits>
#include <variant>

#include "rydstat/clicks.hpp"
#include "rydstat/error.hpp"
#include "rydstat/format.hpp"
#include "rydstat/pipeline.hpp"
#include "rydstat/ratemodel.hpp"

namespace rydstat {

/// Everything a command can be configured with. Loaded from a flat
/// `key = value` file; command-line flags override individual keys.
struct RunConfig {
  PipelineConfig pipeline;
  RateModelParams rate;
  StorageSettings storage;
  WindowSpec windows;
  std::uint64_t seed = 1;
  std::int64_t threads = 1;
  std::int64_t resamples = kDefaultResamples;
  double slow_light_scale = 2.5;
  std::string out_dir = ".";
  /// Keys assigned from a file or flag, as opposed to left at their default.
  std::set<std::string> assigned;

  bool is_set(const std::string& key) const { return assigned.count(key) != 0; }

  void validate() const {
    pipeline.validate();
    rate.validate();
    windows.validate();
    if (threads < 1) throw Error(ErrorCode::kInvalidConfig, "threads must be >= 1");
    if (resamples < 100) throw Error(ErrorCode::kInvalidConfig, "resamples must be >= 100");
    slow_light_config(pipeline.blockade, slow_light_scale);
    if (!(storage.read_factor > 0.0 && storage.read_factor <= 1.0) ||
        !(storage.p_nr >= 0.0 && storage.p_nr <= 1.0)) {
      throw Error(ErrorCode::kInvalidConfig, "storage settings outside [0, 1]");
    }
  }
};

namespace detail {

using Slot = std::variant<double*, std::int64_t*, std::uint64_t*, int*, std::string*>;

inline std::map<std::string, Slot, std::less<>> config_slots(RunConfig& c) {
  auto& p = c.pipeline;
  auto& w = c.windows;
  return {
      {"seed", &c.seed},
      {"threads", &c.threads},
      {"resamples", &c.resamples},
      {"out", &c.out_dir},
      {"n_max", &p.blockade.n_max},
      {"cloud_length", &p.blockade.cloud_length},
      {"blockade_radius", &p.blockade.blockade_radius},
      {"trials_per_fock", &p.blockade.trials_per_fock},
      {"t_losses", &p.t_losses},
      {"eta_compression", &p.eta_compression},
      {"compression_lo", &p.compression_lo},
      {"compression_hi", &p.compression_hi},
      {"eta_eit", &p.eta_eit},
      {"eta_r", &p.eta_r},
      {"t_w", &p.t_w},
      {"slow_light_scale", &c.slow_light_scale},
      {"p", &c.rate.p},
      {"t_r", &c.rate.t_r},
      {"eta_a", &c.rate.eta_a},
      {"p_eg", &c.rate.p_eg},
      {"p_nw", &c.rate.p_nw},
      {"p_nr", &c.rate.p_nr},
      {"storage_read_factor", &c.storage.read_factor},
      {"storage_p_nr", &c.storage.p_nr},
      {"signal_start_ns", &w.signal[0].start_ns},
      {"signal_end_ns", &w.signal[0].end_ns},
      {"noise_start_ns", &w.noise.start_ns},
      {"noise_end_ns", &w.noise.end_ns},
  };
}

}  // namespace detail

/// Assigns one key. `where` prefixes error messages (e.g. "line 4").
inline void set_config_value(RunConfig& c, std::string_view key, std::string_view value,
                             const std::string& where) {
  auto slots = detail::config_slots(c);
  const auto it = slots.find(key);
  if (it == slots.end()) {
    throw Error(ErrorCode::kInvalidConfig, where + ": unknown key '" + std::string(key) + "'");
  }
  auto bad = [&] {
    return Error(ErrorCode::kInvalidConfig, where + ": bad value '" + std::string(value) +
                                                "' for key '" + std::string(key) + "'");
  };
  std::visit(
      [&](auto* slot) {
        using T = std::remove_pointer_t<decltype(slot)>;
        if constexpr (std::is_same_v<T, double>) {
          if (!parse_double(value, *slot)) throw bad();
        } else if constexpr (std::is_same_v<T, std::string>) {
          *slot = std::string(value);
        } else {
          std::int64_t v = 0;
          if (!parse_int(value, v) || (std::is_unsigned_v<T> && v < 0)) throw bad();
          *slot = static_cast<T>(v);
        }
      },
      it->second);
  c.assigned.insert(std::string(key));
  // Signal windows are shared by all detectors.
  if (key == "signal_start_ns" || key == "signal_end_ns") {
    c.windows.signal.fill(c.windows.signal[0]);
  }
  if (key == "seed") c.pipeline.blockade.rng_seed = c.seed;
}

inline bool is_config_key(std::string_view key) {
  RunConfig scratch;
  return detail::config_slots(scratch).count(key) != 0;
}

/// Parses `key = value` lines; `#` starts a comment. Unknown keys and
/// malformed values are errors reported with their line number.
inline void load_config(RunConfig& c, std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view text = line;
    if (const auto hash = text.find('#'); hash != std::string_view::npos) {
      text = text.substr(0, hash);
    }
    text = trim(text);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    const std::string where = "line " + std::to_string(line_no);
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::kInvalidConfig, where + ": expected 'key = value'");
    }
    set_config_value(c, trim(text.substr(0, eq)), trim(text.substr(eq + 1)), where);
  }
  c.validate();
}

}  // namespace rydstat

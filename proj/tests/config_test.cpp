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

#include <gtest/gtest.h>

#include <functional>
#include <sstream>
#include <string>

#include "rydstat/config.hpp"

namespace rydstat {
namespace {

Error error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e;
  }
  ADD_FAILURE() << "no error thrown";
  return Error(ErrorCode::kIoError, "");
}

RunConfig load(const std::string& text) {
  RunConfig c;
  std::istringstream in(text);
  load_config(c, in);
  return c;
}

TEST(Config, DefaultsAreValid) {
  RunConfig c;
  EXPECT_NO_THROW(c.validate());
  EXPECT_TRUE(c.assigned.empty());
}

TEST(Config, ParsesKeysAndComments) {
  const auto c = load(
      "# reference run\n"
      "\n"
      "n_max = 30   # small\n"
      "eta_r=0.5\n"
      "seed = 42\n"
      "out = results\n"
      "signal_start_ns = 10\n"
      "signal_end_ns = 90\n");
  EXPECT_EQ(c.pipeline.blockade.n_max, 30);
  EXPECT_DOUBLE_EQ(c.pipeline.eta_r, 0.5);
  EXPECT_EQ(c.seed, 42u);
  EXPECT_EQ(c.pipeline.blockade.rng_seed, 42u);
  EXPECT_EQ(c.out_dir, "results");
  for (const auto& w : c.windows.signal) {
    EXPECT_DOUBLE_EQ(w.start_ns, 10.0);
    EXPECT_DOUBLE_EQ(w.end_ns, 90.0);
  }
  EXPECT_TRUE(c.is_set("eta_r"));
  EXPECT_FALSE(c.is_set("eta_eit"));
}

TEST(Config, UnknownKeyReportsLine) {
  const auto e = error_of([] { load("n_max = 10\n\nblockade_raduis = 3\n"); });
  EXPECT_EQ(e.code(), ErrorCode::kInvalidConfig);
  EXPECT_NE(e.message().find("line 3"), std::string::npos);
  EXPECT_NE(e.message().find("blockade_raduis"), std::string::npos);
}

TEST(Config, MalformedLinesAreRejected) {
  EXPECT_NE(error_of([] { load("n_max 10\n"); }).message().find("line 1"), std::string::npos);
  EXPECT_EQ(error_of([] { load("n_max = ten\n"); }).code(), ErrorCode::kInvalidConfig);
  EXPECT_EQ(error_of([] { load("eta_r = 0.5x\n"); }).code(), ErrorCode::kInvalidConfig);
  EXPECT_EQ(error_of([] { load("seed = -3\n"); }).code(), ErrorCode::kInvalidConfig);
}

TEST(Config, RangesAreValidated) {
  EXPECT_EQ(error_of([] { load("eta_r = 1.5\n"); }).code(), ErrorCode::kInvalidConfig);
  EXPECT_EQ(error_of([] { load("threads = 0\n"); }).code(), ErrorCode::kInvalidConfig);
  EXPECT_EQ(error_of([] { load("resamples = 10\n"); }).code(), ErrorCode::kInvalidConfig);
  EXPECT_EQ(error_of([] { load("p_eg = 2\n"); }).code(), ErrorCode::kInvalidProbability);
  EXPECT_EQ(error_of([] { load("slow_light_scale = 0.5\n"); }).code(),
            ErrorCode::kScaleOutOfRange);
  EXPECT_EQ(error_of([] { load("signal_start_ns = 50\nsignal_end_ns = 20\n"); }).code(),
            ErrorCode::kOverlappingWindows);
}

TEST(Config, LaterAssignmentsOverride) {
  auto c = load("eta_eit = 0.5\neta_eit = 0.7\n");
  EXPECT_DOUBLE_EQ(c.pipeline.eta_eit, 0.7);
  set_config_value(c, "eta_eit", "0.9", "--set");
  EXPECT_DOUBLE_EQ(c.pipeline.eta_eit, 0.9);
  const auto e = error_of([&] { set_config_value(c, "nope", "1", "--set"); });
  EXPECT_NE(e.message().find("--set"), std::string::npos);
}

TEST(Config, KnownKeys) {
  EXPECT_TRUE(is_config_key("blockade_radius"));
  EXPECT_TRUE(is_config_key("storage_p_nr"));
  EXPECT_FALSE(is_config_key("radius"));
}

}  // namespace
}  // namespace rydstat

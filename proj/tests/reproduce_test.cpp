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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <string>

#include "rydstat/reproduce.hpp"

namespace rydstat {
namespace {

const Pipeline& small_pipeline() {
  static const Pipeline pipe = [] {
    PipelineConfig c;
    c.blockade.n_max = 40;
    c.blockade.trials_per_fock = 20000;
    return Pipeline(c);
  }();
  return pipe;
}

TEST(Reproduce, FigureNames) {
  EXPECT_EQ(parse_figure("fig3"), Figure::kFig3);
  EXPECT_EQ(parse_figure("fig4"), Figure::kFig4);
  EXPECT_EQ(parse_figure("figS3"), Figure::kFigS3);
  EXPECT_EQ(parse_figure("figS5"), Figure::kFigS5);
  try {
    parse_figure("fig9");
    FAIL() << "no error thrown";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnknownFigure);
  }
}

TEST(Reproduce, GridsAreIncreasing) {
  for (const auto& grid : {default_zeta_grid(), default_write_probability_grid()}) {
    ASSERT_GE(grid.size(), 10u);
    for (std::size_t i = 1; i < grid.size(); ++i) EXPECT_GT(grid[i], grid[i - 1]);
  }
  EXPECT_DOUBLE_EQ(default_zeta_grid().back(), 0.5);
}

TEST(Reproduce, InputDistributionTable) {
  const auto cols = input_distributions(small_pipeline(), {0.01, 0.1});
  ASSERT_EQ(cols.size(), 4u);
  for (const auto& c : cols) {
    EXPECT_NEAR(zeta(c.at_cloud), c.zeta, 1e-9);
    const auto p = c.at_cloud.probs();
    EXPECT_NEAR(std::accumulate(p.begin(), p.end(), 0.0), 1.0, 1e-12);
  }
  EXPECT_NEAR(cols[2].g2_in, 1.0, 1e-9);
  std::ostringstream out;
  write_input_distributions_csv(out, cols);
  const std::string text = out.str();
  EXPECT_EQ(text.substr(0, text.find('\n')), "k,dlcz_0.01,dlcz_0.1,wcs_0.01,wcs_0.1");
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 42);
}

TEST(Reproduce, ModelEfficiencyFallsWithWriteProbability) {
  const RateModelParams rate;
  const auto table = model_efficiency_table(small_pipeline(), rate, {0.002, 0.01, 0.03});
  ASSERT_EQ(table.points().size(), 3u);
  EXPECT_GT(table.points()[0].second, table.points()[1].second);
  EXPECT_GT(table.points()[1].second, table.points()[2].second);
  EXPECT_LT(table.points()[0].second, 0.1476);
}

TEST(Reproduce, NoiseFreeCurvesCollapse) {
  const RateModelParams rate;
  const auto rows = cross_correlation_curves(rate, StorageSettings{}, EfficiencyTable::constant(0.1),
                                             default_write_probability_grid());
  for (const auto& r : rows) {
    EXPECT_NEAR(r.g2wr_noise_free, r.g2wr_stored_noise_free, 1e-12 * r.g2wr_noise_free);
    EXPECT_GT(r.g2wr_noise_free, r.g2wr);
    EXPECT_GT(r.g2wr_stored_noise_free, r.g2wr_stored);
  }
  for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_LT(rows[i].g2wr, rows[i - 1].g2wr);
  std::ostringstream out;
  write_cross_correlation_csv(out, rows);
  const std::string csv = out.str();
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), static_cast<long>(rows.size()) + 1);
}

TEST(Reproduce, CurvesShareGrid) {
  const std::vector<double> grid{0.01, 0.1, 0.2};
  const auto curves = zeta_curves(small_pipeline(), grid);
  ASSERT_EQ(curves.wcs.size(), grid.size());
  ASSERT_EQ(curves.dlcz.size(), grid.size());
  EXPECT_LT(curves.dlcz.front().g2_out, curves.wcs.front().g2_out);
}

}  // namespace
}  // namespace rydstat

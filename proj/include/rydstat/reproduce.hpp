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

#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "rydstat/error.hpp"
#include "rydstat/fock.hpp"
#include "rydstat/format.hpp"
#include "rydstat/pipeline.hpp"
#include "rydstat/ratemodel.hpp"
#include "rydstat/source.hpp"

namespace rydstat {

enum class Figure { kFig3, kFig4, kFigS3, kFigS5 };

inline Figure parse_figure(std::string_view name) {
  if (name == "fig3") return Figure::kFig3;
  if (name == "fig4") return Figure::kFig4;
  if (name == "figS3") return Figure::kFigS3;
  if (name == "figS5") return Figure::kFigS5;
  throw Error(ErrorCode::kUnknownFigure,
              "'" + std::string(name) + "' (expected fig3, fig4, figS3 or figS5)");
}

/// Truncation used for figure reproduction; heralded states at zeta = 0.5
/// need p ~ 0.83, whose tail extends past 100 photons.
inline constexpr int kFigureNMax = 160;

inline std::vector<double> default_zeta_grid() {
  return {0.001, 0.0025, 0.005, 0.01, 0.02, 0.03, 0.05, 0.075, 0.1, 0.125, 0.15,
          0.175, 0.2,    0.25,  0.3,  0.35, 0.4,  0.45, 0.5};
}

inline std::vector<double> figS5_zetas() { return {0.01, 0.05, 0.5}; }

inline std::vector<double> default_write_probability_grid() {
  std::vector<double> grid;
  for (int i = 0; i <= 33; ++i) grid.push_back(0.001 + 0.003 * i);
  return grid;
}

struct ZetaCurves {
  std::vector<SweepPoint> wcs;
  std::vector<SweepPoint> dlcz;
};

inline ZetaCurves zeta_curves(const Pipeline& pipe, const std::vector<double>& grid,
                              unsigned threads = 1) {
  return {sweep(pipe, InputKind::kWcs, grid, threads),
          sweep(pipe, InputKind::kDlcz, grid, threads)};
}

/// Efficiency predicted by the storage model for the heralded state implied
/// by each p_w, usable where no measured table is available.
inline EfficiencyTable model_efficiency_table(const Pipeline& pipe, const RateModelParams& rate,
                                              const std::vector<double>& p_w_grid) {
  std::vector<std::pair<double, double>> pts;
  for (double p_w : p_w_grid) {
    const double p = p_from_write_probability(p_w, rate.t_w, rate.p_nw);
    if (p <= 0.0) continue;
    const auto input = pipe.source_distribution(InputKind::kDlcz, p);
    pts.emplace_back(p_w, pipe.efficiency(InputKind::kDlcz, input));
  }
  return EfficiencyTable(std::move(pts));
}

struct CrossCorrelationRow {
  double p_w = 0.0;
  double p = 0.0;
  double eta = 0.0;
  DetectionProbabilities direct;
  DetectionProbabilities stored;
  double g2wr = 0.0;
  double g2wr_stored = 0.0;
  double g2wr_noise_free = 0.0;
  double g2wr_stored_noise_free = 0.0;
};

/// Detection probabilities and write/read cross-correlation versus p_w, with
/// and without storage, plus the variants with read noise switched off.
inline std::vector<CrossCorrelationRow> cross_correlation_curves(
    const RateModelParams& rate, const StorageSettings& storage, const EfficiencyTable& eff,
    const std::vector<double>& p_w_grid) {
  std::vector<CrossCorrelationRow> rows;
  for (double p_w : p_w_grid) {
    CrossCorrelationRow r;
    r.p_w = p_w;
    r.p = p_from_write_probability(p_w, rate.t_w, rate.p_nw);
    r.eta = eff(p_w);
    RateModelParams direct = rate;
    direct.p = r.p;
    const RateModelParams stored = with_storage(direct, eff, p_w, storage);
    r.direct = predict_probabilities(direct);
    r.stored = predict_probabilities(stored);
    r.g2wr = predict_cross_correlation(direct);
    r.g2wr_stored = predict_cross_correlation(stored);
    RateModelParams direct_quiet = direct;
    direct_quiet.p_nr = 0.0;
    RateModelParams stored_quiet = stored;
    stored_quiet.p_nr = 0.0;
    r.g2wr_noise_free = predict_cross_correlation(direct_quiet);
    r.g2wr_stored_noise_free = predict_cross_correlation(stored_quiet);
    rows.push_back(r);
  }
  return rows;
}

inline void write_cross_correlation_csv(std::ostream& out,
                                        const std::vector<CrossCorrelationRow>& rows) {
  out << "p_w,p,eta,p_r,p_r_given_w,g2wr,p_r_stored,p_r_given_w_stored,g2wr_stored,"
         "g2wr_noise_free,g2wr_stored_noise_free\n";
  for (const auto& r : rows) {
    out << format_double(r.p_w) << ',' << format_double(r.p) << ',' << format_double(r.eta)
        << ',' << format_double(r.direct.p_r) << ',' << format_double(r.direct.p_r_given_w)
        << ',' << format_double(r.g2wr) << ',' << format_double(r.stored.p_r) << ','
        << format_double(r.stored.p_r_given_w) << ',' << format_double(r.g2wr_stored) << ','
        << format_double(r.g2wr_noise_free) << ',' << format_double(r.g2wr_stored_noise_free)
        << '\n';
  }
}

struct InputDistributionColumn {
  InputKind kind = InputKind::kDlcz;
  double zeta = 0.0;
  double param = 0.0;
  double g2_in = 0.0;
  FockDistribution at_cloud = vacuum();
};

/// Photon-number distributions at the cloud input (inter-setup loss
/// included for heralded light) for each input kind at the given zetas.
inline std::vector<InputDistributionColumn> input_distributions(
    const Pipeline& pipe, const std::vector<double>& zetas) {
  std::vector<InputDistributionColumn> cols;
  for (InputKind kind : {InputKind::kDlcz, InputKind::kWcs}) {
    for (double z : zetas) {
      InputDistributionColumn c;
      c.kind = kind;
      c.zeta = z;
      c.param = pipe.param_for_zeta(kind, z);
      const auto src = pipe.source_distribution(kind, c.param);
      c.g2_in = g2(src);
      c.at_cloud = pipe.cloud_input(kind, src);
      cols.push_back(c);
    }
  }
  return cols;
}

inline void write_input_distributions_csv(std::ostream& out,
                                          const std::vector<InputDistributionColumn>& cols) {
  out << 'k';
  for (const auto& c : cols) out << ',' << to_string(c.kind) << '_' << format_double(c.zeta);
  out << '\n';
  const std::size_t rows = cols.empty() ? 0 : cols.front().at_cloud.size();
  for (std::size_t k = 0; k < rows; ++k) {
    out << k;
    for (const auto& c : cols) out << ',' << format_double(c.at_cloud[k]);
    out << '\n';
  }
}

}  // namespace rydstat

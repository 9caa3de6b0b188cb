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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/tools/minima.hpp>

#include "rydstat/error.hpp"
#include "rydstat/format.hpp"

namespace rydstat {

/// Parameters of the heralded-source detection model. Defaults are the
/// measured values of the reference setup, with p_eg from the fit.
struct RateModelParams {
  double p = 0.0;       // excitation probability
  double t_w = 0.21;    // write path transmission incl. detection
  double t_r = 0.09;    // read path transmission incl. detection
  double eta_a = 0.32;  // intrinsic read-out efficiency
  double p_eg = 0.20;   // branching ratio |e> -> |g>
  double p_nw = 1e-4;   // write dark-count probability
  double p_nr = 1.5e-3; // read noise probability

  void validate() const {
    const std::pair<const char*, double> fields[] = {
        {"p", p},       {"t_w", t_w},   {"t_r", t_r},   {"eta_a", eta_a},
        {"p_eg", p_eg}, {"p_nw", p_nw}, {"p_nr", p_nr},
    };
    for (const auto& [name, value] : fields) {
      if (!(value >= 0.0 && value <= 1.0)) {
        throw Error(ErrorCode::kInvalidProbability,
                    std::string(name) + " = " + format_double(value) + " outside [0, 1]");
      }
    }
    if (!(p < 1.0)) throw Error(ErrorCode::kInvalidProbability, "p must be < 1");
  }
};

struct DetectionProbabilities {
  double p_w = 0.0;
  double p_r = 0.0;
  double p_wr = 0.0;
  double p_r_given_w = 0.0;
};

inline DetectionProbabilities predict_probabilities(const RateModelParams& m) {
  m.validate();
  DetectionProbabilities out;
  const double spontaneous = m.p * (1.0 - m.eta_a) * m.p_eg * m.t_r;
  out.p_w = m.p * m.t_w + m.p_nw;
  out.p_r = m.p * m.eta_a * m.t_r + spontaneous + m.p_nr;
  out.p_wr = out.p_w * m.eta_a * m.t_r + out.p_w * spontaneous + out.p_w * m.p_nr;
  out.p_r_given_w = out.p_w > 0.0
                        ? out.p_wr / out.p_w
                        : m.eta_a * m.t_r + spontaneous + m.p_nr;
  return out;
}

/// Write/read cross-correlation p_wr / (p_w p_r).
inline double predict_cross_correlation(const RateModelParams& m) {
  const auto probs = predict_probabilities(m);
  if (!(probs.p_w > 0.0) || !(probs.p_r > 0.0)) {
    throw Error(ErrorCode::kDivisionDegenerate, "p_w or p_r vanishes");
  }
  return probs.p_wr / (probs.p_w * probs.p_r);
}

/// Measured storage efficiency as a function of p_w; piecewise linear with
/// the end values held outside the tabulated range.
class EfficiencyTable {
 public:
  EfficiencyTable() = default;

  explicit EfficiencyTable(std::vector<std::pair<double, double>> points)
      : points_(std::move(points)) {
    for (std::size_t i = 0; i < points_.size(); ++i) {
      const auto [p_w, eta] = points_[i];
      if (!(eta >= 0.0 && eta <= 1.0)) {
        throw Error(ErrorCode::kInvalidProbability, "eta = " + format_double(eta));
      }
      if (!std::isfinite(p_w) || (i > 0 && !(p_w > points_[i - 1].first))) {
        throw Error(ErrorCode::kInvalidProbability,
                    "p_w values must be strictly increasing");
      }
    }
  }

  static EfficiencyTable constant(double eta) { return EfficiencyTable({{0.0, eta}}); }

  bool empty() const { return points_.empty(); }
  const std::vector<std::pair<double, double>>& points() const { return points_; }

  double operator()(double p_w) const {
    if (points_.empty()) throw Error(ErrorCode::kEmptyTable, "efficiency table is empty");
    if (p_w <= points_.front().first) return points_.front().second;
    if (p_w >= points_.back().first) return points_.back().second;
    const auto hi = std::upper_bound(
        points_.begin(), points_.end(), p_w,
        [](double x, const std::pair<double, double>& pt) { return x < pt.first; });
    const auto lo = hi - 1;
    const double f = (p_w - lo->first) / (hi->first - lo->first);
    return lo->second + f * (hi->second - lo->second);
  }

 private:
  std::vector<std::pair<double, double>> points_;
};

inline EfficiencyTable read_efficiency_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  bool header = false;
  std::vector<std::pair<double, double>> points;
  while (std::getline(in, line)) {
    ++line_no;
    const auto text = trim(line);
    if (text.empty() || text.front() == '#') continue;
    if (!header) {
      if (text != "p_w,eta") throw parse_error(line_no, "expected header 'p_w,eta'");
      header = true;
      continue;
    }
    const auto fields = split(text, ',');
    double p_w = 0.0;
    double eta = 0.0;
    if (fields.size() != 2 || !parse_double(fields[0], p_w) || !parse_double(fields[1], eta)) {
      throw parse_error(line_no, "expected 'p_w,eta'");
    }
    points.emplace_back(p_w, eta);
  }
  if (points.empty()) throw Error(ErrorCode::kEmptyTable, "no efficiency rows");
  return EfficiencyTable(std::move(points));
}

/// How storage in the Rydberg medium changes the read path: the read
/// transmission becomes eta(p_w) * read_factor and the read noise drops,
/// since noise outside the stored mode is filtered.
struct StorageSettings {
  double read_factor = 0.09;
  double p_nr = 1.3e-4;
};

inline RateModelParams with_storage(RateModelParams params, const EfficiencyTable& eff,
                                    double p_w_point, const StorageSettings& storage = {}) {
  params.t_r = eff(p_w_point) * storage.read_factor;
  params.p_nr = storage.p_nr;
  params.validate();
  return params;
}

struct ConditionalSample {
  double p_w = 0.0;
  double p_r_given_w = 0.0;
};

struct PegFit {
  double p_eg = 0.0;
  double residual_norm = 0.0;
  std::vector<double> residuals;
  bool at_boundary = false;
};

/// Least-squares fit of the branching ratio p_eg in [0, 1] to measured
/// (p_w, p_r|w) pairs, p being recovered from p_w through the write-path
/// model. When `storage` is given, each point uses the stored read path.
inline PegFit fit_peg(const std::vector<ConditionalSample>& data, RateModelParams base,
                      const EfficiencyTable* storage_eff = nullptr,
                      const StorageSettings& storage = {}) {
  if (data.size() < 3) {
    throw Error(ErrorCode::kInsufficientData,
                "need at least 3 rows, got " + std::to_string(data.size()));
  }
  auto model_at = [&](const ConditionalSample& s, double p_eg) {
    RateModelParams m = base;
    m.p = std::max(0.0, (s.p_w - m.p_nw) / m.t_w);
    m.p_eg = p_eg;
    if (storage_eff != nullptr) m = with_storage(m, *storage_eff, s.p_w, storage);
    return predict_probabilities(m).p_r_given_w;
  };
  for (const auto& s : data) model_at(s, base.p_eg);  // validates every row
  auto loss = [&](double p_eg) {
    double sum = 0.0;
    for (const auto& s : data) {
      const double r = model_at(s, p_eg) - s.p_r_given_w;
      sum += r * r;
    }
    return sum;
  };
  std::uintmax_t max_iter = 500;
  const auto [best, best_loss] = boost::math::tools::brent_find_minima(
      loss, 0.0, 1.0, std::numeric_limits<double>::digits, max_iter);
  (void)best_loss;

  PegFit fit;
  fit.p_eg = best;
  double sum = 0.0;
  for (const auto& s : data) {
    const double r = model_at(s, best) - s.p_r_given_w;
    fit.residuals.push_back(r);
    sum += r * r;
  }
  fit.residual_norm = std::sqrt(sum);
  fit.at_boundary = best < 1e-6 || best > 1.0 - 1e-6;
  return fit;
}

/// Reads measured conditional read probabilities; header `p_w,p_r_given_w`.
inline std::vector<ConditionalSample> read_conditional_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  bool header = false;
  std::vector<ConditionalSample> rows;
  while (std::getline(in, line)) {
    ++line_no;
    const auto text = trim(line);
    if (text.empty() || text.front() == '#') continue;
    if (!header) {
      if (text != "p_w,p_r_given_w") {
        throw parse_error(line_no, "expected header 'p_w,p_r_given_w'");
      }
      header = true;
      continue;
    }
    const auto fields = split(text, ',');
    ConditionalSample s;
    if (fields.size() != 2 || !parse_double(fields[0], s.p_w) ||
        !parse_double(fields[1], s.p_r_given_w)) {
      throw parse_error(line_no, "expected 'p_w,p_r_given_w'");
    }
    rows.push_back(s);
  }
  if (!header) throw Error(ErrorCode::kEmptyFile, "no header");
  return rows;
}

}  // namespace rydstat

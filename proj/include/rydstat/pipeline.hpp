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
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "rydstat/blockade.hpp"
#include "rydstat/error.hpp"
#include "rydstat/fock.hpp"
#include "rydstat/format.hpp"
#include "rydstat/parallel.hpp"
#include "rydstat/roots.hpp"
#include "rydstat/source.hpp"
#include "rydstat/transfer.hpp"

namespace rydstat {

enum class InputKind { kDlcz, kWcs };

inline std::string to_string(InputKind kind) {
  return kind == InputKind::kDlcz ? "dlcz" : "wcs";
}

/// Linear stages around the blockade. Storage of an input distribution p
/// proceeds as
///   p' = M_blockade * M_loss(sqrt(eta_eit)) * M_loss(eta_compression) * M_loss(t_losses) * p
/// where the inter-setup loss applies to heralded (DLCZ) inputs only; coherent
/// inputs are specified directly at the cloud. The second half of the EIT
/// loss and the retrieval efficiency act after the blockade and enter only
/// the efficiency.
struct PipelineConfig {
  double t_losses = 0.15;
  double eta_compression = 0.6;
  double eta_eit = 0.6;
  double eta_r = 0.41;
  double compression_lo = 0.45;
  double compression_hi = 0.75;
  double t_w = kDefaultWriteTransmission;
  /// Stretch factor of the cloud; values > 1 model slow-light propagation.
  double medium_scale = 1.0;
  BlockadeConfig blockade;

  void validate() const {
    const std::pair<const char*, double> fields[] = {
        {"t_losses", t_losses},           {"eta_compression", eta_compression},
        {"eta_eit", eta_eit},             {"eta_r", eta_r},
        {"compression_lo", compression_lo}, {"compression_hi", compression_hi},
        {"t_w", t_w},
    };
    for (const auto& [name, value] : fields) {
      if (!(value > 0.0 && value <= 1.0)) {
        throw Error(ErrorCode::kInvalidConfig,
                    std::string(name) + " = " + format_double(value) + " outside (0, 1]");
      }
    }
    blockade.validate();
    slow_light_config(blockade, medium_scale);
  }
};

/// A configured experiment model. The blockade matrix is computed once and
/// shared read-only by every evaluation.
class Pipeline {
 public:
  explicit Pipeline(PipelineConfig cfg, unsigned threads = 1)
      : Pipeline(cfg, blockade_matrix(slow_light_config(cfg.blockade, cfg.medium_scale),
                                      threads)) {}

  Pipeline(PipelineConfig cfg, TransferMatrix blockade)
      : cfg_((cfg.validate(), cfg)),
        n_max_(blockade.n_max()),
        blockade_(std::move(blockade)),
        inter_setup_(loss_matrix(cfg_.t_losses, n_max_)),
        eit_half_(loss_matrix(std::sqrt(cfg_.eta_eit), n_max_)) {}

  const PipelineConfig& config() const { return cfg_; }
  int n_max() const { return n_max_; }
  const TransferMatrix& blockade() const { return blockade_; }

  /// Distribution arriving at the cloud: heralded states pass the
  /// inter-setup loss first.
  FockDistribution cloud_input(InputKind kind, const FockDistribution& input) const {
    return kind == InputKind::kDlcz ? apply(inter_setup_, input) : input;
  }

  /// Linear part in front of the blockade for a given compression.
  FockDistribution pre_blockade(InputKind kind, const FockDistribution& input,
                                double compression) const {
    const auto at_cloud = cloud_input(kind, input);
    return apply(eit_half_, apply(loss_matrix(compression, n_max_), at_cloud));
  }

  FockDistribution post_blockade_distribution(InputKind kind, const FockDistribution& input,
                                              std::optional<double> compression = {}) const {
    return apply(blockade_, pre_blockade(kind, input, compression.value_or(cfg_.eta_compression)));
  }

  double g2_after_storage(InputKind kind, const FockDistribution& input,
                          std::optional<double> compression = {}) const {
    const auto out = post_blockade_distribution(kind, input, compression);
    if (!(mean_photons(out) > 0.0)) {
      throw Error(ErrorCode::kZeroMean, "nothing stored");
    }
    return g2(out);
  }

  /// Storage-and-retrieval efficiency: mean retrieved over mean photon number
  /// at the cloud.
  double efficiency(InputKind kind, const FockDistribution& input,
                    std::optional<double> compression = {}) const {
    const double mu_in = mean_photons(input);
    if (!(mu_in > 0.0)) throw Error(ErrorCode::kZeroMean, "input has no photons");
    const auto stored = post_blockade_distribution(kind, input, compression);
    const double loss_in = kind == InputKind::kDlcz ? cfg_.t_losses : 1.0;
    return cfg_.eta_r * std::sqrt(cfg_.eta_eit) * mean_photons(stored) / (loss_in * mu_in);
  }

  /// Source-side distribution for the input kind with parameter mu (WCS) or
  /// p (DLCZ).
  FockDistribution source_distribution(InputKind kind, double param) const {
    return kind == InputKind::kWcs ? coherent(param, n_max_)
                                   : conditional_read_state({param, cfg_.t_w}, n_max_);
  }

  double zeta_at(InputKind kind, double param) const {
    return zeta(cloud_input(kind, source_distribution(kind, param)));
  }

  /// Parameter range representable at this truncation.
  std::pair<double, double> param_range(InputKind kind) const {
    constexpr double kLow = 1e-12;
    return {kLow, kind == InputKind::kWcs ? max_representable_mu(n_max_)
                                          : max_representable_p(cfg_.t_w, n_max_)};
  }

  /// Solves zeta(cloud input) = target for mu or p by bisection.
  double param_for_zeta(InputKind kind, double target) const {
    const auto [lo, hi] = param_range(kind);
    const double z_lo = zeta_at(kind, lo);
    const double z_hi = zeta_at(kind, hi);
    if (!(target >= z_lo && target <= z_hi)) {
      throw Error(ErrorCode::kZetaUnattainable,
                  "zeta " + format_double(target) + " outside [" + format_double(z_lo) +
                      ", " + format_double(z_hi) + "] for " + to_string(kind) +
                      " at n_max=" + std::to_string(n_max_));
    }
    return bisect_increasing([&](double x) { return zeta_at(kind, x); }, lo, hi, target);
  }

  bool zeta_monotone(InputKind kind, std::size_t points = 64) const {
    const auto [lo, hi] = param_range(kind);
    return increasing_on_grid([&](double x) { return zeta_at(kind, x); }, lo, hi,
                                       points);
  }

 private:
  PipelineConfig cfg_;
  int n_max_;
  TransferMatrix blockade_;
  TransferMatrix inter_setup_;
  TransferMatrix eit_half_;
};

struct SweepPoint {
  double zeta = 0.0;
  double param = 0.0;  // mu for WCS, p for DLCZ
  double g2_in = 0.0;
  double g2_out = 0.0;
  double eta = 0.0;
  double g2_out_lo = 0.0;
  double g2_out_hi = 0.0;
  double eta_lo = 0.0;
  double eta_hi = 0.0;
};

inline SweepPoint evaluate_at_zeta(const Pipeline& pipe, InputKind kind, double target) {
  const auto& cfg = pipe.config();
  SweepPoint pt;
  pt.zeta = target;
  pt.param = pipe.param_for_zeta(kind, target);
  const auto input = pipe.source_distribution(kind, pt.param);
  pt.g2_in = g2(input);
  pt.g2_out = pipe.g2_after_storage(kind, input);
  pt.eta = pipe.efficiency(kind, input);
  const double g_a = pipe.g2_after_storage(kind, input, cfg.compression_lo);
  const double g_b = pipe.g2_after_storage(kind, input, cfg.compression_hi);
  const double e_a = pipe.efficiency(kind, input, cfg.compression_lo);
  const double e_b = pipe.efficiency(kind, input, cfg.compression_hi);
  pt.g2_out_lo = std::min(g_a, g_b);
  pt.g2_out_hi = std::max(g_a, g_b);
  pt.eta_lo = std::min(e_a, e_b);
  pt.eta_hi = std::max(e_a, e_b);
  return pt;
}

/// Evaluates the model on a zeta grid. Points are independent and may run
/// concurrently; output order follows the grid.
inline std::vector<SweepPoint> sweep(const Pipeline& pipe, InputKind kind,
                                     const std::vector<double>& zeta_grid,
                                     unsigned threads = 1) {
  if (!pipe.zeta_monotone(kind)) {
    throw Error(ErrorCode::kNoConvergence,
                "zeta is not monotone in the " + to_string(kind) + " parameter");
  }
  std::vector<SweepPoint> out(zeta_grid.size());
  parallel_for(zeta_grid.size(), threads,
               [&](std::size_t i) { out[i] = evaluate_at_zeta(pipe, kind, zeta_grid[i]); });
  return out;
}

inline void write_sweep_csv(std::ostream& out, const std::vector<SweepPoint>& points) {
  out << "zeta,param,g2_in,g2_out,eta,g2_out_lo,g2_out_hi\n";
  for (const auto& p : points) {
    out << format_double(p.zeta) << ',' << format_double(p.param) << ','
        << format_double(p.g2_in) << ',' << format_double(p.g2_out) << ','
        << format_double(p.eta) << ',' << format_double(p.g2_out_lo) << ','
        << format_double(p.g2_out_hi) << '\n';
  }
}

inline void write_efficiency_csv(std::ostream& out, const std::vector<SweepPoint>& points) {
  out << "zeta,param,eta,eta_lo,eta_hi\n";
  for (const auto& p : points) {
    out << format_double(p.zeta) << ',' << format_double(p.param) << ','
        << format_double(p.eta) << ',' << format_double(p.eta_lo) << ','
        << format_double(p.eta_hi) << '\n';
  }
}

}  // namespace rydstat

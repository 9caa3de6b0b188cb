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

// rydstat: command-line front end.
//
//   rydstat [--config FILE] [--set key=value]... [--seed N] [--threads N]
//           [--out DIR] <command> [options]
//
// Exit codes: 0 success, 1 usage error, 2 data or validation error,
// 3 numerical failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "rydstat/rydstat.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace rydstat::cli {
namespace {

struct GlobalOptions {
  std::string config_path;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> threads;
  std::optional<std::string> out;
};

RunConfig build_config(const GlobalOptions& g,
                       const std::vector<std::pair<std::string, std::string>>& extra = {}) {
  RunConfig c;
  if (!g.config_path.empty()) {
    std::ifstream in(g.config_path);
    if (!in) throw Error(ErrorCode::kIoError, "cannot open config '" + g.config_path + "'");
    try {
      load_config(c, in);
    } catch (const Error& e) {
      throw e.in(g.config_path);
    }
  }
  for (const auto& kv : g.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::kInvalidConfig, "--set expects key=value, got '" + kv + "'");
    }
    set_config_value(c, trim(std::string_view(kv).substr(0, eq)),
                     trim(std::string_view(kv).substr(eq + 1)), "--set");
  }
  if (g.seed) set_config_value(c, "seed", std::to_string(*g.seed), "--seed");
  if (g.threads) set_config_value(c, "threads", std::to_string(*g.threads), "--threads");
  if (g.out) set_config_value(c, "out", *g.out, "--out");
  for (const auto& [k, v] : extra) set_config_value(c, k, v, "--" + k);
  c.validate();
  return c;
}

unsigned threads_of(const RunConfig& c) { return static_cast<unsigned>(c.threads); }

fs::path output_path(const RunConfig& c, const std::string& name) {
  const fs::path dir(c.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIoError, "cannot create '" + c.out_dir + "': " + ec.message());
  return dir / name;
}

void write_file(const RunConfig& c, const std::string& name,
                const std::function<void(std::ostream&)>& body) {
  const auto path = output_path(c, name);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write '" + path.string() + "'");
  body(out);
  out.flush();
  if (!out) throw Error(ErrorCode::kIoError, "write failed for '" + path.string() + "'");
  std::cout << path.string() << '\n';
}

void write_json(const RunConfig& c, const std::string& name, const json& j) {
  write_file(c, name, [&](std::ostream& out) { out << j.dump(2) << '\n'; });
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open '" + path + "'");
  return in;
}

Window parse_window(const std::string& text, const char* flag) {
  const auto sep = text.find_first_of(":,");
  std::int64_t a = 0;
  std::int64_t b = 0;
  if (sep == std::string::npos || !parse_int(std::string_view(text).substr(0, sep), a) ||
      !parse_int(std::string_view(text).substr(sep + 1), b)) {
    throw Error(ErrorCode::kInvalidConfig,
                std::string(flag) + " expects START:END in ns, got '" + text + "'");
  }
  return {a, b};
}

std::vector<double> parse_list(const std::string& text, const char* flag) {
  std::vector<double> out;
  for (auto field : split(text, ',')) {
    double v = 0.0;
    if (!parse_double(field, v)) {
      throw Error(ErrorCode::kInvalidConfig,
                  std::string(flag) + ": bad number '" + std::string(field) + "'");
    }
    out.push_back(v);
  }
  return out;
}

DetectorPair parse_pair(const std::string& name) {
  if (name == "hbt") return DetectorPair::hbt();
  if (name == "herald") return DetectorPair::herald_read();
  throw Error(ErrorCode::kInvalidConfig, "--pair must be 'hbt' or 'herald', got '" + name + "'");
}

int reproduction_n_max(const RunConfig& c) {
  return c.is_set("n_max") ? c.pipeline.blockade.n_max : kFigureNMax;
}

PipelineConfig reproduction_pipeline(const RunConfig& c) {
  PipelineConfig p = c.pipeline;
  p.blockade.n_max = reproduction_n_max(c);
  return p;
}

json windows_json(const WindowSpec& w) {
  json signal = json::object();
  for (int d = 0; d < kNumDetectors; ++d) {
    const auto& s = w.signal_of(static_cast<Detector>(d));
    signal[detector_name(static_cast<Detector>(d))] = {s.start_ns, s.end_ns};
  }
  return {{"signal", signal}, {"noise", {w.noise.start_ns, w.noise.end_ns}}};
}

json nullable(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

// ---------------------------------------------------------------- blockade

struct BlockadeArgs {
  std::optional<int> n;
  std::optional<std::int64_t> trials;
  std::optional<double> rb;
  std::optional<double> length;
};

int cmd_blockade(const GlobalOptions& g, const BlockadeArgs& a) {
  std::vector<std::pair<std::string, std::string>> extra;
  if (a.n) extra.emplace_back("n_max", std::to_string(*a.n));
  if (a.trials) extra.emplace_back("trials_per_fock", std::to_string(*a.trials));
  if (a.rb) extra.emplace_back("blockade_radius", format_double(*a.rb));
  if (a.length) extra.emplace_back("cloud_length", format_double(*a.length));
  const RunConfig c = build_config(g, extra);
  const auto& bc = c.pipeline.blockade;

  const auto cols = simulate_columns(bc, threads_of(c));
  const auto m = matrix_from_survival(cols);
  write_file(c, "blockade.csv", [&](std::ostream& out) { write_csv(out, m); });

  json columns = json::array();
  for (const auto& col : cols) {
    json probs = json::array();
    json errs = json::array();
    for (std::size_t k = 0; k < col.probs.size(); ++k) {
      probs.push_back(col.probs[k]);
      errs.push_back(col.standard_error(static_cast<int>(k)));
    }
    columns.push_back({{"n", col.input_n},
                       {"trials", col.trials},
                       {"analytic", col.input_n <= 1},
                       {"probs", probs},
                       {"standard_errors", errs}});
  }
  json summary = {{"cloud_length", bc.cloud_length},
                  {"blockade_radius", bc.blockade_radius},
                  {"trials_per_fock", bc.trials_per_fock},
                  {"seed", bc.rng_seed},
                  {"n_max", bc.n_max},
                  {"columns", columns}};
  if (bc.n_max >= 2) {
    const double oracle = exact_pair_survival(bc.blockade_radius, bc.cloud_length);
    const double value = cols[2].probs[2];
    const double se = cols[2].standard_error(2);
    const double dev = std::abs(value - oracle);
    summary["pair_check"] = {{"measured", value},
                             {"standard_error", se},
                             {"exact", oracle},
                             {"deviation_sigma", se > 0.0 ? json(dev / se) : json(nullptr)},
                             {"within_3_sigma", se > 0.0 ? dev <= 3.0 * se : dev == 0.0}};
  }
  write_json(c, "blockade_summary.json", summary);
  return 0;
}

// ---------------------------------------------------------------------- g2

struct G2Args {
  std::string clicks;
  std::optional<std::string> window;
  std::optional<std::string> noise_window;
  std::string pair = "hbt";
  std::optional<int> resamples;
};

int cmd_g2(const GlobalOptions& g, const G2Args& a) {
  std::vector<std::pair<std::string, std::string>> extra;
  if (a.window) {
    const auto w = parse_window(*a.window, "--window");
    extra.emplace_back("signal_start_ns", std::to_string(w.start_ns));
    extra.emplace_back("signal_end_ns", std::to_string(w.end_ns));
  }
  if (a.noise_window) {
    const auto w = parse_window(*a.noise_window, "--noise-window");
    extra.emplace_back("noise_start_ns", std::to_string(w.start_ns));
    extra.emplace_back("noise_end_ns", std::to_string(w.end_ns));
  }
  if (a.resamples) extra.emplace_back("resamples", std::to_string(*a.resamples));
  const RunConfig c = build_config(g, extra);
  const DetectorPair pair = parse_pair(a.pair);

  auto in = open_input(a.clicks);
  TrialTable table;
  try {
    table = ingest_trials(in, c.windows, pair);
  } catch (const Error& e) {
    throw e.in(a.clicks);
  }
  const TrialCounts n = counts(table);
  const bool cross = a.pair == "herald";
  const auto raw_kind = cross ? G2Estimator::kCrossCorrelation : G2Estimator::kRaw;

  json warnings = json::array();
  const double raw = estimate(n, raw_kind);
  std::optional<double> corrected;
  try {
    corrected = g2_noise_corrected(n);
  } catch (const Error& e) {
    warnings.push_back(std::string("g2_corrected undefined: ") + e.what());
  }
  const int resamples = static_cast<int>(c.resamples);
  const auto raw_err = bootstrap_error(table, raw_kind, resamples, c.seed, threads_of(c));
  std::optional<double> corr_err;
  if (corrected) {
    corr_err =
        bootstrap_error(table, G2Estimator::kNoiseCorrected, resamples, c.seed, threads_of(c))
            .std_error;
  }
  json report = {{"g2_raw", raw},
                 {"g2_corrected", nullable(corrected)},
                 {"error", nullable(corr_err)},
                 {"error_raw", raw_err.std_error},
                 {"N", n.N},
                 {"n1", n.n1},
                 {"n2", n.n2},
                 {"n12", n.n12},
                 {"nn1", n.nn1},
                 {"nn2", n.nn2},
                 {"windows", windows_json(c.windows)},
                 {"pair", {pair.first.name(), pair.second.name()}},
                 {"resamples", resamples},
                 {"seed", c.seed}};
  if (!warnings.empty()) report["warnings"] = warnings;
  write_json(c, "g2_report.json", report);
  return 0;
}

// --------------------------------------------------------------- reproduce

struct ReproduceArgs {
  std::string figure;
  std::optional<std::string> zeta;
  bool slow_light = false;
  std::optional<std::string> efficiency;
  double pw_min = 0.001;
  double pw_max = 0.1;
  int pw_points = 34;
  bool pw_grid_set = false;
};

std::vector<double> zeta_grid_of(const std::optional<std::string>& text) {
  return text ? parse_list(*text, "--zeta") : default_zeta_grid();
}

std::vector<double> linear_grid(double lo, double hi, int points) {
  if (points < 2 || !(hi > lo)) {
    throw Error(ErrorCode::kInvalidConfig, "p_w grid needs hi > lo and at least 2 points");
  }
  std::vector<double> grid;
  for (int i = 0; i < points; ++i) grid.push_back(lo + (hi - lo) * i / (points - 1));
  return grid;
}

int cmd_reproduce(const GlobalOptions& g, const ReproduceArgs& a) {
  const Figure fig = parse_figure(a.figure);
  const RunConfig c = build_config(g);
  const unsigned threads = threads_of(c);

  switch (fig) {
    case Figure::kFig3:
    case Figure::kFig4: {
      const auto grid = zeta_grid_of(a.zeta);
      const Pipeline pipe(reproduction_pipeline(c), threads);
      const auto curves = zeta_curves(pipe, grid, threads);
      const auto writer = fig == Figure::kFig3 ? write_sweep_csv : write_efficiency_csv;
      const std::string stem = fig == Figure::kFig3 ? "fig3" : "fig4";
      write_file(c, stem + "_wcs.csv", [&](std::ostream& o) { writer(o, curves.wcs); });
      write_file(c, stem + "_dlcz.csv", [&](std::ostream& o) { writer(o, curves.dlcz); });
      if (a.slow_light) {
        // Effective model: a stretched cloud stands in for propagation
        // without storage; not a pulse-propagation simulation.
        PipelineConfig slow = reproduction_pipeline(c);
        slow.medium_scale = c.slow_light_scale;
        const Pipeline slow_pipe(slow, threads);
        const auto sc = zeta_curves(slow_pipe, grid, threads);
        write_file(c, stem + "_wcs_slow_light_effective.csv",
                   [&](std::ostream& o) { writer(o, sc.wcs); });
        write_file(c, stem + "_dlcz_slow_light_effective.csv",
                   [&](std::ostream& o) { writer(o, sc.dlcz); });
      }
      return 0;
    }
    case Figure::kFigS3: {
      const auto grid = a.pw_grid_set ? linear_grid(a.pw_min, a.pw_max, a.pw_points)
                                      : default_write_probability_grid();
      std::optional<EfficiencyTable> eff;
      if (a.efficiency) {
        auto in = open_input(*a.efficiency);
        eff = read_efficiency_csv(in);
      } else {
        const Pipeline pipe(reproduction_pipeline(c), threads);
        eff = model_efficiency_table(pipe, c.rate, grid);
      }
      const auto rows = cross_correlation_curves(c.rate, c.storage, *eff, grid);
      write_file(c, "figS3.csv", [&](std::ostream& o) { write_cross_correlation_csv(o, rows); });
      return 0;
    }
    case Figure::kFigS5: {
      const Pipeline pipe(reproduction_pipeline(c), threads);
      const auto cols = input_distributions(pipe, a.zeta ? parse_list(*a.zeta, "--zeta")
                                                         : figS5_zetas());
      write_file(c, "figS5.csv", [&](std::ostream& o) { write_input_distributions_csv(o, cols); });
      json summary = json::array();
      for (const auto& col : cols) {
        summary.push_back({{"kind", to_string(col.kind)},
                           {"zeta", col.zeta},
                           {"param", col.param},
                           {"g2_in", col.g2_in},
                           {"g2_at_cloud", g2(col.at_cloud)},
                           {"mean_at_cloud", mean_photons(col.at_cloud)}});
      }
      write_json(c, "figS5_summary.json", {{"n_max", pipe.n_max()}, {"columns", summary}});
      return 0;
    }
  }
  return 0;
}

// ----------------------------------------------------------------- fit-peg

struct FitArgs {
  std::string data;
  std::optional<std::string> efficiency;
};

int cmd_fit_peg(const GlobalOptions& g, const FitArgs& a) {
  const RunConfig c = build_config(g);
  auto in = open_input(a.data);
  std::vector<ConditionalSample> rows;
  try {
    rows = read_conditional_csv(in);
  } catch (const Error& e) {
    throw e.in(a.data);
  }
  std::optional<EfficiencyTable> eff;
  if (a.efficiency) {
    auto ein = open_input(*a.efficiency);
    eff = read_efficiency_csv(ein);
  }
  const PegFit fit = fit_peg(rows, c.rate, eff ? &*eff : nullptr, c.storage);
  json report = {{"p_eg", fit.p_eg},
                 {"residual_norm", fit.residual_norm},
                 {"residuals", fit.residuals},
                 {"rows", rows.size()},
                 {"stored", eff.has_value()},
                 {"at_boundary", fit.at_boundary}};
  if (fit.at_boundary) {
    const std::string msg = "p_eg fit reached the boundary of [0, 1]";
    report["warning"] = msg;
    std::cerr << "warning: " << msg << '\n';
  }
  write_json(c, "fit_peg.json", report);
  return 0;
}

// -------------------------------------------------------------- synthesize

struct SynthArgs {
  std::string source = "coherent:0.2";
  std::int64_t trials = 100000;
  std::string noise = "0,0,0";
  double detection_efficiency = 1.0;
  std::string file = "clicks.csv";
};

FockDistribution parse_source(const std::string& spec, const RunConfig& c) {
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  double value = 0.0;
  if (colon == std::string::npos || !parse_double(std::string_view(spec).substr(colon + 1), value)) {
    throw Error(ErrorCode::kInvalidConfig,
                "--source expects fock:N, coherent:MU or dlcz:P, got '" + spec + "'");
  }
  const int n_max = c.pipeline.blockade.n_max;
  if (kind == "fock") return fock_state(static_cast<int>(value), n_max);
  if (kind == "coherent") return coherent(value, n_max);
  if (kind == "dlcz") return conditional_read_state({value, c.pipeline.t_w}, n_max);
  throw Error(ErrorCode::kInvalidConfig, "unknown source kind '" + kind + "'");
}

int cmd_synthesize(const GlobalOptions& g, const SynthArgs& a) {
  const RunConfig c = build_config(g);
  SynthesisModel model;
  model.source = parse_source(a.source, c);
  const auto noise = parse_list(a.noise, "--noise");
  if (noise.size() != kNumDetectors) {
    throw Error(ErrorCode::kInvalidConfig, "--noise expects three comma-separated rates");
  }
  std::copy(noise.begin(), noise.end(), model.noise_per_trial.begin());
  model.detection_efficiency = a.detection_efficiency;
  model.windows = c.windows;
  model.seed = c.seed;
  const auto stream = synthesize(model, a.trials, threads_of(c));
  write_file(c, a.file, [&](std::ostream& o) { write_clicks(o, stream); });
  return 0;
}

// ------------------------------------------------------------------- sweep

struct SweepArgs {
  std::string kind = "dlcz";
  std::optional<std::string> zeta;
};

int cmd_sweep(const GlobalOptions& g, const SweepArgs& a) {
  InputKind kind;
  if (a.kind == "dlcz") {
    kind = InputKind::kDlcz;
  } else if (a.kind == "wcs") {
    kind = InputKind::kWcs;
  } else {
    throw Error(ErrorCode::kInvalidConfig, "--kind must be 'dlcz' or 'wcs'");
  }
  const RunConfig c = build_config(g);
  const Pipeline pipe(reproduction_pipeline(c), threads_of(c));
  const auto points = sweep(pipe, kind, zeta_grid_of(a.zeta), threads_of(c));
  write_file(c, "sweep_" + a.kind + ".csv", [&](std::ostream& o) { write_sweep_csv(o, points); });
  return 0;
}

int exit_code_for(const Error& e) { return is_numerical(e.code()) ? 3 : 2; }

}  // namespace
}  // namespace rydstat::cli

int main(int argc, char** argv) {
  using namespace rydstat::cli;
  CLI::App app{"Photon statistics of light stored in a blockaded Rydberg ensemble"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  app.add_option("--config", g.config_path, "key = value configuration file");
  app.add_option("--set", g.overrides, "override a configuration key (key=value)");
  app.add_option("--seed", g.seed, "random seed");
  app.add_option("--threads", g.threads, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--out", g.out, "output directory");

  BlockadeArgs ba;
  auto* blockade = app.add_subcommand("blockade", "Monte Carlo blockade transfer matrix");
  blockade->add_option("--n", ba.n, "largest input photon number");
  blockade->add_option("--trials", ba.trials, "trials per Fock input");
  blockade->add_option("--rb", ba.rb, "blockade radius in um");
  blockade->add_option("--L", ba.length, "cloud length in um");

  G2Args ga;
  auto* g2cmd = app.add_subcommand("g2", "raw and noise-corrected g2 from a click file");
  g2cmd->add_option("clicks", ga.clicks, "click CSV")->required();
  g2cmd->add_option("--window", ga.window, "signal window START:END in ns");
  g2cmd->add_option("--noise-window", ga.noise_window, "noise window START:END in ns");
  g2cmd->add_option("--pair", ga.pair, "hbt (D2 x D3) or herald (D1 x D2+D3)");
  g2cmd->add_option("--resamples", ga.resamples, "bootstrap resamples");

  ReproduceArgs ra;
  auto* repro = app.add_subcommand("reproduce", "model curves as CSV tables");
  repro->add_option("figure", ra.figure, "fig3, fig4, figS3 or figS5")->required();
  repro->add_option("--zeta", ra.zeta, "comma-separated zeta grid");
  repro->add_flag("--slow-light", ra.slow_light, "also emit the stretched-cloud curves");
  repro->add_option("--efficiency", ra.efficiency, "p_w,eta table for figS3");
  auto* pw_min = repro->add_option("--pw-min", ra.pw_min, "figS3 grid start");
  auto* pw_max = repro->add_option("--pw-max", ra.pw_max, "figS3 grid end");
  auto* pw_points = repro->add_option("--pw-points", ra.pw_points, "figS3 grid points");

  FitArgs fa;
  auto* fit = app.add_subcommand("fit-peg", "fit p_eg to measured conditional read rates");
  fit->add_option("data", fa.data, "CSV with header p_w,p_r_given_w")->required();
  fit->add_option("--efficiency", fa.efficiency, "p_w,eta table; fit the stored read path");

  SynthArgs sa;
  auto* synth = app.add_subcommand("synthesize", "synthetic click stream");
  synth->add_option("--source", sa.source, "fock:N, coherent:MU or dlcz:P");
  synth->add_option("--trials", sa.trials, "number of trials");
  synth->add_option("--noise", sa.noise, "signal-window noise per trial for D1,D2,D3");
  synth->add_option("--detection-efficiency", sa.detection_efficiency, "per-photon efficiency");
  synth->add_option("--file", sa.file, "output file name");

  SweepArgs wa;
  auto* sweep_cmd = app.add_subcommand("sweep", "g2_out and efficiency over a zeta grid");
  sweep_cmd->add_option("--kind", wa.kind, "dlcz or wcs");
  sweep_cmd->add_option("--zeta", wa.zeta, "comma-separated zeta grid");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*blockade) return cmd_blockade(g, ba);
    if (*g2cmd) return cmd_g2(g, ga);
    if (*repro) {
      ra.pw_grid_set = pw_min->count() + pw_max->count() + pw_points->count() > 0;
      return cmd_reproduce(g, ra);
    }
    if (*fit) return cmd_fit_peg(g, fa);
    if (*synth) return cmd_synthesize(g, sa);
    if (*sweep_cmd) return cmd_sweep(g, wa);
  } catch (const rydstat::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}

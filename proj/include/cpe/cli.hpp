// Copyright 2026 The cpestab Authors
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


// Batch orchestration: configs, presets, sweeps and their CSV/JSON outputs.

#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cpe/dynamics.hpp"
#include "cpe/metrics.hpp"
#include "cpe/wigner_analytic.hpp"

namespace cpe::cli {

inline constexpr const char* kCsvColumns =
    "scheme,s,lambda,gamma_over_kappa0,n_th,init_state,fidelity,purity,log_neg,w_min,epr_sum,"
    "trace_residual,error";

// Bath occupations of the two mechanical modes.
using NthPair = std::array<double, 2>;

struct SweepSpec {
  std::string name;
  std::string description;
  std::string plot_metric = "fidelity";  // hint for the plotting side
  bool preset = false;                   // enforces the preset parameter ranges
  Scheme scheme = Scheme::two_dissipator;
  SchemeConfig cfg;
  std::vector<double> gammas;     // gamma / kappa0
  std::vector<NthPair> n_th;      // bath occupations
  std::vector<InitKind> inits{InitKind::vacuum};
  std::optional<NthPair> init_n_th;  // thermal start; defaults to the bath occupations
  MetricsOptions metrics;
  std::string csv = "sweep.csv";
  std::string sidecar = "sweep.json";
  std::string trajectory_csv;  // written when cfg.checkpoints_per_step > 0
  double memory_cap_mb = 4096;
};

struct WignerCutSpec {
  std::string name;
  std::string description;
  bool preset = false;
  AnalyticWignerParams params;
  // u = (q1 - q2)/sqrt2 along rows, v = (p1 + p2)/sqrt2 along columns.
  double u_lo = -3, u_hi = 3, v_lo = -3, v_hi = 3;
  int u_points = 121, v_points = 121;
  double fixed_q = 0;  // q1 + q2
  double fixed_p = 0;  // p1 - p2
  std::string csv = "wigner.csv";
};

using Config = std::variant<SweepSpec, WignerCutSpec>;

// Parse errors carry the line and column, validation errors the field path.
Config parse_config(const std::string& text, const std::string& source = "<config>");
// `name_or_path` is a shipped preset name or a file path.
Config load_config(const std::string& name_or_path);

struct PresetInfo {
  std::string name;
  std::string description;
  const char* text;
};
const std::vector<PresetInfo>& presets();
const PresetInfo* find_preset(const std::string& name);

struct Overrides {
  std::vector<int> dims;  // d1, d2 and optional cavity dimension
  bool full_model = false;
};
void apply_overrides(SweepSpec& spec, const Overrides& o);

struct Estimate {
  long points = 0;
  long steps_per_point = 0;
  double memory_mb_per_point = 0;
  double seconds_per_point = 0;  // rough, from the operation count
};
Estimate estimate(const SweepSpec& spec);

struct ValidationReport {
  bool valid = true;
  std::vector<std::string> errors;
  std::vector<std::string> warnings;
  std::optional<Estimate> estimate;
};
ValidationReport validate_config(const std::string& name_or_path, int threads = 1);

struct SweepPoint {
  InitKind init = InitKind::vacuum;
  NthPair n_th{0, 0};
  double gamma = 0;
};
std::vector<SweepPoint> expand(const SweepSpec& spec);

struct PointResult {
  SweepPoint point;
  MetricsRecord metrics;
  RunDiagnostics diag;
  std::vector<double> times;
  std::vector<double> fidelity_trace;  // at the trajectory checkpoints
  double seconds = 0;
  std::string error;
};

struct SweepResult {
  SweepSpec spec;
  std::vector<PointResult> rows;  // in expand() order
};

SweepResult run_sweep(const SweepSpec& spec, int threads = 1);

std::string format_number(double x);
void write_csv(std::ostream& os, const SweepResult& r, bool timestamp = true);
void write_trajectory_csv(std::ostream& os, const SweepResult& r);
void write_sidecar(std::ostream& os, const SweepResult& r);

struct WignerCut {
  WignerCutSpec spec;
  std::vector<double> u, v;
  Eigen::MatrixXd values;
};
WignerCut emit_wigner_cut(const WignerCutSpec& spec);
void write_wigner_csv(std::ostream& os, const WignerCut& cut);

}  // namespace cpe::cli

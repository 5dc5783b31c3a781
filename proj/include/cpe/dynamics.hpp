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

// Time evolution: the RK4 Lindblad integrator and the stabilisation schemes.
//
// Effective-model times and rates are in units of the engineered rate
// kappa0 = 4 g^2 / kappa. The full model keeps the same unit and derives g and
// kappa from g/kappa.

#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "cpe/lindblad.hpp"
#include "cpe/model.hpp"

namespace cpe {

struct EvolveOptions {
  double dt = 0;           // 0 picks min(dt_cap, stability bound)
  double dt_cap = 0.02;
  int renorm_interval = 100;
  std::vector<double> checkpoints;  // snapped to the step grid
  bool check_positivity = true;
  double negativity_tol = 1e-4;
};

struct EvolveStats {
  double dt = 0;
  long steps = 0;
  double spectral_radius = 0;
  double max_trace_drift = 0;  // before each renormalisation
  double rhs_norm_final = 0;   // Frobenius norm of L(rho) at the end
  double min_eigenvalue = 0;   // of the final state, when checked
};

struct Trajectory {
  DensityMatrix final_state;
  std::vector<double> times;
  std::vector<DensityMatrix> states;
  EvolveStats stats;
};

Trajectory evolve(const DensityMatrix& rho0, const FockOperator& h, const std::vector<Dissipator>& jumps,
                  double t_final, const EvolveOptions& opts = {});

enum class Scheme { switching, two_dissipator, full_switching, full_two_dissipator };
std::string to_string(Scheme s);
Scheme scheme_from_string(const std::string& s);

// Mechanical thermal bath: gamma (n+1) D[b_j] + gamma n D[b_j^dag], gamma in
// units of kappa0.
struct NoiseConfig {
  double gamma = 0;
  std::array<double, 2> n_th{0, 0};
  void validate() const;
};

enum class InitKind { vacuum, thermal, precooled };
std::string to_string(InitKind k);
InitKind init_from_string(const std::string& s);

struct InitialState {
  InitKind kind = InitKind::vacuum;
  std::array<double, 2> n_th{0, 0};  // occupations of the thermal start
};

struct SchemeConfig {
  CpeParams target;
  double kappa0 = 1.0;
  double t_step = 10.0;  // duration of each step in units of 1/kappa0
  double dt = 0;         // fixed step in units of 1/kappa0; 0 = automatic
  double dt_cap = 0.02;
  int renorm_interval = 100;
  int checkpoints_per_step = 0;
  bool check_positivity = true;
  // Full model only.
  double g_over_kappa = 0.05;
  int cavity_dim = 4;

  void validate() const;
};

struct RunDiagnostics {
  std::vector<EvolveStats> stages;
  double discarded_weight = 0;  // thermal start truncated to the mechanical dims
  double max_trace_drift = 0;
  double rhs_norm_final = 0;
  double min_eigenvalue = 0;
};

struct RunResult {
  DensityMatrix final_state;  // mechanical modes only
  std::vector<double> times;  // in units of 1/kappa0 from the start of the scheme
  std::vector<DensityMatrix> trajectory;
  RunDiagnostics diag;
};

std::vector<Dissipator> thermal_dissipators(const ModeLayout& layout, const NoiseConfig& noise, double kappa0);

// Thermal, vacuum or precooled starting state on the mechanical layout.
DensityMatrix initial_state(const SchemeConfig& cfg, const NoiseConfig& noise, const InitialState& init,
                            double* discarded = nullptr);

// kappa0 D[b_1] for t_step, then kappa0 D[b_2] for t_step, with the bath on.
RunResult run_precool(const SchemeConfig& cfg, const NoiseConfig& noise, const DensityMatrix& rho0);

// kappa0 D[f_1] for t_step, then kappa0 D[f_2] for t_step.
RunResult run_switching(const SchemeConfig& cfg, const NoiseConfig& noise, const InitialState& init);
// kappa0 (D[f_1] + D[f_2]) for t_step.
RunResult run_two_dissipator(const SchemeConfig& cfg, const NoiseConfig& noise, const InitialState& init);
// Explicit cavities: H = g (a^dag f + h.c.) and kappa D[a]; the result is reduced
// to the mechanical modes. `scheme` is switching or two_dissipator (either form).
RunResult run_full_model(Scheme scheme, const SchemeConfig& cfg, const NoiseConfig& noise,
                         const InitialState& init);

RunResult run_scheme(Scheme scheme, const SchemeConfig& cfg, const NoiseConfig& noise, const InitialState& init);

}  // namespace cpe

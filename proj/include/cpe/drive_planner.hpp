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

// Classical steady state of the driven optomechanical system and the mapping
// between drive tones and the linearised couplings g[j][k].

#pragma once

#include <complex>
#include <string>
#include <vector>

#include "cpe/model.hpp"

namespace cpe {

struct Cavity {
  double omega_c = 0;
  double kappa = 1;
};

struct Mechanics {
  double omega = 1;
  double gamma = 0;
};

struct Drive {
  int cavity = 0;
  std::complex<double> epsilon;
  double omega = 0;
};

struct PhysicalParams {
  std::vector<Cavity> cavities;
  std::array<Mechanics, 2> mechanics;
  // Indexed [cavity][mode]: rate per unit q and per unit q^2.
  std::vector<std::array<double, 2>> g_lin, g_quad;
  std::vector<Drive> drives;

  void validate() const;
};

struct SteadyState {
  std::array<double, 2> q0{0, 0};
  std::vector<std::complex<double>> alpha;  // one per drive, same order
  int iterations = 0;
  double residual = 0;  // max residual of the fixed-point equations
};

struct SolverOptions {
  double rel_tol = 1e-10;
  int max_iterations = 500;
};

SteadyState classical_steady_state(const PhysicalParams& p, const SolverOptions& opts = {});

// sqrt2 G_L = g_L + 2 g_Q Q0 and G_Q = g_Q / 2, indexed [cavity][mode].
std::vector<std::array<double, 2>> linear_gain(const PhysicalParams& p, const SteadyState& s);
std::vector<std::array<double, 2>> quadratic_gain(const PhysicalParams& p);

// Detuning of process slot k for mode j: -Omega, +Omega, -2 Omega, +2 Omega, 0.
double slot_detuning(const PhysicalParams& p, int mode, int slot);

// One table per cavity.
std::vector<CouplingTable> effective_couplings(const PhysicalParams& p, const SteadyState& s,
                                               double slot_rel_tol = 1e-6);

// Drive tones (replacing p.drives) whose steady state reproduces `target`.
std::vector<Drive> invert_for_drives(const PhysicalParams& p, const std::vector<CouplingTable>& target,
                                     const SolverOptions& opts = {});

enum class Verdict { pass, warn, fail };
std::string to_string(Verdict v);

struct WeakCouplingReport {
  double max_ratio = 0;
  Verdict verdict = Verdict::pass;
  int cavity = -1, mode = -1, drive_a = -1, drive_b = -1;  // worst pair
};

// max |g alpha_k alpha_k'| / Omega_j over distinct tones on the same cavity.
WeakCouplingReport weak_coupling_check(const PhysicalParams& p, const SteadyState& s, double warn_at = 0.01,
                                       double fail_at = 0.1);

// Cavity modes first, then the two mechanical modes.
FockOperator linearized_hamiltonian(const std::vector<CouplingTable>& tables, const ModeLayout& layout);

}  // namespace cpe

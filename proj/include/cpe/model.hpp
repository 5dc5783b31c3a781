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

// Gates, the target CPE state, engineered Bogoliubov-cubic modes and the
// reservoir-engineering Hamiltonians.

#pragma once

#include <array>
#include <complex>
#include <vector>

#include "cpe/fock.hpp"

namespace cpe {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr int kDefaultPad = 10;
// The truncated cubic gate converges slowly in the cutoff.
inline constexpr int kCubicPad = 60;

// Target-state parameters: s1 = s, s2 = 1/s, cubicity lambda on mode 1 and
// beam-splitter angle theta.
struct CpeParams {
  double s = 1.26;
  double lambda = 0.175;
  double theta = kPi / 4;
  std::array<int, 2> dims{40, 40};
  int pad_gate = kDefaultPad;
  int pad_cubic = kCubicPad;
  double leak_tol = 1e-6;

  void validate() const;
  ModeLayout layout() const { return ModeLayout::mechanical(dims[0], dims[1]); }
};

// Squeezing in dB: s = 10^{dB/20}.
inline double squeezing_from_db(double db) { return std::pow(10.0, db / 20.0); }
inline double squeezing_to_db(double s) { return 20.0 * std::log10(s); }

// s_pm = (s +- 1/s) / (2 sqrt2)
inline double s_plus(double s) { return (s + 1.0 / s) / (2.0 * std::sqrt(2.0)); }
inline double s_minus(double s) { return (s - 1.0 / s) / (2.0 * std::sqrt(2.0)); }

// Single-mode and two-mode gate matrices on exactly the given dimensions.
CMatrix<double> squeeze_matrix(int d, double s);
CMatrix<double> cubic_matrix(int d, double lambda);
CMatrix<double> beamsplitter_matrix(int da, int db, double theta);

// Gates built on the layout padded by `pad` levels per mode and projected back.
// S(s) = exp((ln s / 2)(b^dag^2 - b^2)).
FockOperator squeeze_gate(const ModeLayout& layout, int mode, double s, int pad = kDefaultPad);
// B(theta) = exp(theta (b_a b_b^dag - b_a^dag b_b)).
FockOperator beamsplitter_gate(const ModeLayout& layout, int mode_a, int mode_b, double theta,
                               int pad = kDefaultPad);
// Lambda(lambda) = exp(i lambda q^3).
FockOperator cubic_gate(const ModeLayout& layout, int mode, double lambda, int pad = kCubicPad);

struct PreparedState {
  StateVector state;
  double leak = 0;  // population that sat on the padded levels
};

// Lambda_1 B S_1(s) S_2(1/s) |00>, built on dims + pad_gate and projected.
PreparedState prepare_cpe(const CpeParams& p);
StateVector cpe_state(const CpeParams& p);

// f_j, j in {1, 2}, on the two mechanical modes of `layout`.
FockOperator engineered_mode(const CpeParams& p, int j, const ModeLayout& layout);
FockOperator engineered_mode(const CpeParams& p, int j, const ModeLayout& layout, int mode1, int mode2);

// Couplings of one cavity to both mechanical modes. g[j][k] multiplies
// a^dag O_k(b_j) with O = (b, b^dag, b^2, b^dag^2, {b, b^dag}).
struct CouplingTable {
  std::array<std::array<std::complex<double>, 5>, 2> g{};
};

// Coefficients of f_j in the O_k basis, scaled by g.
CouplingTable switching_couplings(const CpeParams& p, int j, double g);

// Single-mode process operator O_k on a d-level mode (exact matrix elements).
CMatrix<double> process_matrix(int d, int k);

// sum_l a_l^dag X_l + h.c. with X_l = sum_{j,k} g_l[j][k] O_k(b_j). Cavities are
// the cavity-kind modes of `layout` in order, mechanical modes follow.
FockOperator scheme_hamiltonian(const std::vector<CouplingTable>& tables, const ModeLayout& layout);

// sum_{j,k} c[j][k] O_k(b_j) on the mechanical modes of `layout`.
FockOperator mode_from_couplings(const CouplingTable& c, const ModeLayout& layout);

}  // namespace cpe

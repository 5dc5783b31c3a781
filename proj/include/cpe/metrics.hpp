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

// Figures of merit for two-mode mechanical states.
//
// Phase-space convention: q = (b + b^dag)/sqrt2, alpha = (q + i p)/sqrt2, and
// W(q1,p1,q2,p2) = pi^-2 Tr[rho P(alpha1) (x) P(alpha2)] with the displaced
// parity P(alpha) = D(alpha) Pi D(alpha)^dag. The vacuum gives pi^-2 at the
// origin.

#pragma once

#include <complex>
#include <limits>
#include <string>
#include <vector>

#include "cpe/fock.hpp"

namespace cpe {

// sqrt(<psi|rho|psi>).
double fidelity(const DensityMatrix& rho, const StateVector& target);
// Tr sqrt(sqrt(sigma) rho sqrt(sigma)).
double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma);

double purity(const DensityMatrix& rho);

double trace_distance(const DensityMatrix& a, const DensityMatrix& b);

struct Negativity {
  double log_neg = 0;  // floored at 0
  double raw = 0;      // log2 of the trace norm, unfloored
};

// Partial transpose on mode `mode_a` of a two-mode layout.
Negativity negativity(const DensityMatrix& rho, int mode_a = 0);
double log_negativity(const DensityMatrix& rho, int mode_a = 0);
// Pure two-mode state: 2 log2 of the sum of Schmidt coefficients.
double log_negativity(const StateVector& psi);

// <m| D(beta) |n> on the d-level block, exact (no truncation of D itself).
CMatrix<double> displacement_block(int d, std::complex<double> beta);
// <m| D(alpha) Pi D(alpha)^dag |n>.
CMatrix<double> displaced_parity(int d, std::complex<double> alpha);

struct PhasePoint {
  double q1 = 0, p1 = 0, q2 = 0, p2 = 0;
};

double wigner_numeric(const DensityMatrix& rho, const PhasePoint& x);
std::vector<double> wigner_numeric(const DensityMatrix& rho, const std::vector<PhasePoint>& xs);

// False once |alpha_k|^2 exceeds d_k / 4 for either mode.
bool wigner_reliable(const ModeLayout& layout, const PhasePoint& x);

struct WminOptions {
  double lo = -6, hi = 6;
  int points = 481;
  double tol = 1e-7;
};

struct WminResult {
  double value = 0;
  double p1 = 0;  // argmin on the p1 axis
  WminOptions grid;
  int refine_iterations = 0;
};

// min over p1 of W(0, p1, 0, 0).
WminResult w_min(const DensityMatrix& rho, const WminOptions& opts = {});

// Variances of the squeezed pair (q1 - q2)/sqrt2 and (p1 + p2)/sqrt2 of the
// CPE construction. The vacuum sum is 1.
struct WminFullOptions {
  double lo = -4, hi = 4;
  int points = 33;
  int refine_sweeps = 2;
  double tol = 1e-6;
};

struct WminFullResult {
  double value = 0;
  PhasePoint at;
};

// Slow check of the axis search: grid over all four coordinates, then
// coordinate-wise refinement.
WminFullResult w_min_full(const DensityMatrix& rho, const WminFullOptions& opts = {});

struct EprVariances {
  double q = 0, p = 0, sum = 0;
};
EprVariances epr_variances(const DensityMatrix& rho);

struct TrendFit {
  double A = 0, B = 0, C = 0;
  double residual = 0;  // Euclidean norm of the fit residuals
  bool degenerate = false;
  double operator()(double x) const;
};

// Least squares y = A exp(-B x) + C.
TrendFit fit_trend(const std::vector<double>& xs, const std::vector<double>& ys);

struct MetricsRecord {
  double fidelity = 0;
  double purity = 0;
  double log_neg = 0;
  double log_neg_raw = 0;
  double w_min = 0;
  double w_min_p1 = 0;
  double epr_q = 0, epr_p = 0, epr_sum = 0;
  double w_min_full = std::numeric_limits<double>::quiet_NaN();
  PhasePoint w_min_full_at;
  std::string diagnostic;  // set when a value was clamped
};

struct MetricsOptions {
  bool log_neg = true;
  bool w_min = true;
  WminOptions wmin;
  bool w_min_full = false;
  WminFullOptions wmin_full;
};

MetricsRecord evaluate(const DensityMatrix& rho, const StateVector& target, const MetricsOptions& opts = {});

}  // namespace cpe

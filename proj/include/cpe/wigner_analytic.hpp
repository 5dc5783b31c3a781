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

// Closed-form Wigner function of the ideal CPE state.
//
// The Gaussian part B S1(s1) S2(s2)|00> has a 4x4 covariance; the cubic gate on
// mode 1 convolves its p1 marginal with an Airy kernel, which integrates in
// closed form against the conditional Gaussian.

#pragma once

#include <vector>

#include "cpe/fock.hpp"
#include "cpe/metrics.hpp"
#include "cpe/model.hpp"

namespace cpe {

double airy_ai(double x);
// log Ai(x) for x > 0 where Ai underflows; finite for all x > 0.
double log_airy_ai(double x);

struct AnalyticWignerParams {
  double s1 = 1.26, s2 = 1 / 1.26;
  double lambda = 0.175;
  double theta = kPi / 4;

  static AnalyticWignerParams from(const CpeParams& p) { return {p.s, 1.0 / p.s, p.lambda, p.theta}; }
  double mu() const;
  double nu() const;
  void validate(bool allow_gaussian = false) const;
};

// Phase-space covariance of the Gaussian part, ordered (q1, p1, q2, p2).
Eigen::Matrix4d gaussian_covariance(const AnalyticWignerParams& p);

// Wigner function of the Gaussian part (lambda ignored).
double gaussian_wigner(const AnalyticWignerParams& p, const PhasePoint& x);

// Requires lambda != 0.
double analytic_wigner(const AnalyticWignerParams& p, const PhasePoint& x);

// Cut in the squeezed pair u = (q1 - q2)/sqrt2, v = (p1 + p2)/sqrt2 with the
// conjugate combinations q1 + q2 = fixed_q and p1 - p2 = fixed_p held fixed.
// Rows follow u_grid, columns v_grid.
Eigen::MatrixXd epr_cut(const AnalyticWignerParams& p, const std::vector<double>& u_grid,
                        const std::vector<double>& v_grid, double fixed_q, double fixed_p);
PhasePoint epr_point(double u, double v, double fixed_q, double fixed_p);

}  // namespace cpe

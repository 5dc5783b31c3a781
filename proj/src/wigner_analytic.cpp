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

#include "cpe/wigner_analytic.hpp"

#include <cmath>

#include <Eigen/LU>

namespace cpe {

namespace {

constexpr double kAi0 = 0.355028053887817239;   // Ai(0)
constexpr double kAip0 = 0.258819403792806798;  // -Ai'(0)
constexpr double kSeriesMax = 5.8;
constexpr double kSeriesMin = -7.0;
constexpr double kSqrtPi = 1.7724538509055160273;

double airy_series(double x) {
  const double x3 = x * x * x;
  double f = 1, g = x, tf = 1, tg = x;
  for (int k = 1; k < 200; ++k) {
    tf *= x3 / ((3.0 * k - 1) * (3.0 * k));
    tg *= x3 / ((3.0 * k) * (3.0 * k + 1));
    f += tf;
    g += tg;
    if (std::abs(tf) + std::abs(tg) < 1e-18 * (std::abs(f) + std::abs(g))) break;
  }
  return kAi0 * f - kAip0 * g;
}

// u_k of the Airy asymptotic expansions.
double airy_u(int k) {
  double u = 1;
  for (int j = 1; j <= k; ++j) u *= (6.0 * j - 5) * (6.0 * j - 3) * (6.0 * j - 1) / ((2.0 * j - 1) * 216.0 * j);
  return u;
}

// sum_k (-1)^k u_k / zeta^k, truncated at the smallest term.
double decaying_sum(double zeta) {
  double sum = 1, last = 1;
  for (int k = 1; k < 60; ++k) {
    const double t = airy_u(k) / std::pow(zeta, k);
    if (t > last || t < 1e-17) break;
    sum += (k % 2 ? -t : t);
    last = t;
  }
  return sum;
}

double oscillating(double z) {
  const double zeta = 2.0 / 3.0 * z * std::sqrt(z);
  double p = 0, q = 0, last = 2;
  for (int k = 0; k < 60; ++k) {
    const double t = airy_u(k) / std::pow(zeta, k);
    if (t > last || t < 1e-17) break;
    last = t;
    const int sign = (k / 2) % 2 ? -1 : 1;
    if (k % 2 == 0)
      p += sign * t;
    else
      q += sign * t;
  }
  const double phase = zeta + kPi / 4;
  return (std::sin(phase) * p - std::cos(phase) * q) / (kSqrtPi * std::pow(z, 0.25));
}

}  // namespace

double airy_ai(double x) {
  if (std::isnan(x)) return x;
  if (x > kSeriesMax) return std::exp(log_airy_ai(x));
  if (x >= kSeriesMin) return airy_series(x);
  return oscillating(-x);
}

double log_airy_ai(double x) {
  if (!(x > 0)) throw InvalidArgument("log_airy_ai needs x > 0");
  if (x <= kSeriesMax) return std::log(airy_series(x));
  const double zeta = 2.0 / 3.0 * x * std::sqrt(x);
  return -zeta - std::log(2.0 * kSqrtPi) - 0.25 * std::log(x) + std::log(decaying_sum(zeta));
}

double AnalyticWignerParams::mu() const { return s1 * std::cos(theta); }
double AnalyticWignerParams::nu() const { return -s2 * std::sin(theta); }

void AnalyticWignerParams::validate(bool allow_gaussian) const {
  if (!(s1 > 0) || !(s2 > 0) || !std::isfinite(s1) || !std::isfinite(s2))
    throw InvalidArgument("squeezing factors must be positive");
  if (!std::isfinite(lambda) || !std::isfinite(theta)) throw InvalidArgument("non-finite Wigner parameters");
  if (!allow_gaussian && lambda == 0.0)
    throw InvalidArgument("closed form needs lambda != 0; use gaussian_wigner for lambda = 0");
  if (mu() * mu() + nu() * nu() <= 0) throw InvalidArgument("mu^2 + nu^2 must be positive");
}

Eigen::Matrix4d gaussian_covariance(const AnalyticWignerParams& p) {
  p.validate(true);
  const Eigen::Vector4d v0(p.s1 * p.s1 / 2, 1 / (2 * p.s1 * p.s1), p.s2 * p.s2 / 2, 1 / (2 * p.s2 * p.s2));
  const double c = std::cos(p.theta), s = std::sin(p.theta);
  Eigen::Matrix4d m;
  m << c, 0, -s, 0,  //
      0, c, 0, -s,   //
      s, 0, c, 0,    //
      0, s, 0, c;
  return m * v0.asDiagonal() * m.transpose();
}

double gaussian_wigner(const AnalyticWignerParams& p, const PhasePoint& x) {
  const Eigen::Matrix4d v = gaussian_covariance(p);
  const Eigen::Vector4d r(x.q1, x.p1, x.q2, x.p2);
  return std::exp(-0.5 * r.dot(v.inverse() * r)) / (4 * kPi * kPi * std::sqrt(v.determinant()));
}

double analytic_wigner(const AnalyticWignerParams& p, const PhasePoint& x) {
  p.validate();
  const Eigen::Matrix4d v = gaussian_covariance(p);
  // Condition p1 on y = (q1, q2, p2).
  const int iy[3] = {0, 2, 3};
  Eigen::Matrix3d vyy;
  Eigen::RowVector3d vty;
  for (int a = 0; a < 3; ++a) {
    vty(a) = v(1, iy[a]);
    for (int b = 0; b < 3; ++b) vyy(a, b) = v(iy[a], iy[b]);
  }
  const Eigen::Matrix3d inv = vyy.inverse();
  const Eigen::Vector3d y(x.q1, x.q2, x.p2);
  const double mean = vty * inv * y;
  const double var = v(1, 1) - vty * inv * vty.transpose();
  const double log_marginal = -0.5 * y.dot(inv * y) - 1.5 * std::log(2 * kPi) - 0.5 * std::log(vyy.determinant());

  // Kernel K(u) = c Ai(-sgn(lambda) c u), c = |3 lambda / 4|^(-1/3), u = p1 - 3 lambda q1^2 - p'.
  const double c = std::pow(std::abs(0.75 * p.lambda), -1.0 / 3.0);
  const double sgn = p.lambda > 0 ? 1.0 : -1.0;
  const double z0 = -sgn * c * (x.p1 - 3 * p.lambda * x.q1 * x.q1 - mean);
  const double w = c * c * var;
  const double z = z0 + 0.25 * w * w;
  const double log_scale = log_marginal + std::log(c) + 0.5 * z0 * w + w * w * w / 12.0;
  if (z > kSeriesMax) return std::exp(log_scale + log_airy_ai(z));
  return std::exp(log_scale) * airy_ai(z);
}

PhasePoint epr_point(double u, double v, double fixed_q, double fixed_p) {
  const double r2 = std::sqrt(2.0);
  return {(r2 * u + fixed_q) / 2, (r2 * v + fixed_p) / 2, (fixed_q - r2 * u) / 2, (r2 * v - fixed_p) / 2};
}

Eigen::MatrixXd epr_cut(const AnalyticWignerParams& p, const std::vector<double>& u_grid,
                        const std::vector<double>& v_grid, double fixed_q, double fixed_p) {
  Eigen::MatrixXd out(u_grid.size(), v_grid.size());
  for (size_t i = 0; i < u_grid.size(); ++i)
    for (size_t j = 0; j < v_grid.size(); ++j)
      out(i, j) = analytic_wigner(p, epr_point(u_grid[i], v_grid[j], fixed_q, fixed_p));
  return out;
}

}  // namespace cpe

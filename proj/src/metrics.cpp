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

#include "cpe/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace cpe {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kInvPi2 = 1.0 / (kPi * kPi);
constexpr double kGolden = 0.6180339887498949;

void require_two_modes(const ModeLayout& layout) {
  if (layout.modes() != 2) throw InvalidArgument("expected a two-mode layout, got " + layout.describe());
}

// Tr(A B) without forming the product.
std::complex<double> trace_product(const CMatrix<double>& a, const CMatrix<double>& b) {
  return a.cwiseProduct(b.transpose()).sum();
}

Eigen::VectorXd hermitian_eigenvalues(const CMatrix<double>& m) {
  Eigen::SelfAdjointEigenSolver<CMatrix<double>> es(m, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("eigenvalue solver failed");
  return es.eigenvalues();
}

CMatrix<double> psd_sqrt(const CMatrix<double>& m) {
  Eigen::SelfAdjointEigenSolver<CMatrix<double>> es(m);
  if (es.info() != Eigen::Success) throw NumericalError("eigenvalue solver failed");
  const Eigen::VectorXd root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * root.asDiagonal() * es.eigenvectors().adjoint();
}

// R(m1, n1) = sum_m2 (-1)^m2 rho((m1, m2), (n1, m2)): the state contracted with
// the parity of mode 2 at the origin.
CMatrix<double> parity_reduced(const DensityMatrix& rho) {
  const int d1 = rho.layout.dim(0), d2 = rho.layout.dim(1);
  CMatrix<double> r = CMatrix<double>::Zero(d1, d1);
  for (int m1 = 0; m1 < d1; ++m1)
    for (int n1 = 0; n1 < d1; ++n1) {
      std::complex<double> acc = 0;
      for (int k = 0; k < d2; ++k) acc += (k % 2 ? -1.0 : 1.0) * rho.matrix(m1 * d2 + k, n1 * d2 + k);
      r(m1, n1) = acc;
    }
  return r;
}

// Contraction of rho with the displaced parity of mode 2 (passed transposed).
CMatrix<double> mode2_reduced(const DensityMatrix& rho, const CMatrix<double>& p2t) {
  const int d1 = rho.layout.dim(0), d2 = rho.layout.dim(1);
  CMatrix<double> r(d1, d1);
  for (int m1 = 0; m1 < d1; ++m1)
    for (int n1 = 0; n1 < d1; ++n1) r(m1, n1) = rho.matrix.block(m1 * d2, n1 * d2, d2, d2).cwiseProduct(p2t).sum();
  return r;
}

double axis_wigner(const CMatrix<double>& r, double p1) {
  const CMatrix<double> p = displaced_parity(static_cast<int>(r.rows()), {0.0, p1 / std::sqrt(2.0)});
  return kInvPi2 * trace_product(r, p).real();
}

}  // namespace

double fidelity(const DensityMatrix& rho, const StateVector& target) {
  require_same_layout<double>(rho.layout, target.layout);
  const double n2 = target.amplitudes.squaredNorm();
  if (!(n2 > 0)) throw InvalidArgument("target state has zero norm");
  const double overlap = (target.amplitudes.adjoint() * rho.matrix * target.amplitudes)(0, 0).real() / n2;
  return std::sqrt(std::max(overlap, 0.0));
}

double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
  require_same_layout<double>(rho.layout, sigma.layout);
  const CMatrix<double> root = psd_sqrt(sigma.matrix);
  CMatrix<double> m = root * rho.matrix * root;
  m = 0.5 * (m + m.adjoint()).eval();
  return hermitian_eigenvalues(m).cwiseMax(0.0).cwiseSqrt().sum();
}

double purity(const DensityMatrix& rho) { return rho.matrix.squaredNorm(); }

double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
  require_same_layout<double>(a.layout, b.layout);
  return 0.5 * hermitian_eigenvalues(a.matrix - b.matrix).cwiseAbs().sum();
}

Negativity negativity(const DensityMatrix& rho, int mode_a) {
  require_two_modes(rho.layout);
  if (mode_a != 0 && mode_a != 1) throw InvalidArgument("partition mode must be 0 or 1");
  const int d1 = rho.layout.dim(0), d2 = rho.layout.dim(1);
  const Index D = rho.dim();
  CMatrix<double> pt(D, D);
  for (int m1 = 0; m1 < d1; ++m1)
    for (int m2 = 0; m2 < d2; ++m2)
      for (int n1 = 0; n1 < d1; ++n1)
        for (int n2 = 0; n2 < d2; ++n2) {
          const Index row = m1 * d2 + m2, col = n1 * d2 + n2;
          pt(row, col) = mode_a == 0 ? rho.matrix(n1 * d2 + m2, m1 * d2 + n2) : rho.matrix(m1 * d2 + n2, n1 * d2 + m2);
        }
  Negativity out;
  out.raw = std::log2(hermitian_eigenvalues(pt).cwiseAbs().sum());
  out.log_neg = std::max(out.raw, 0.0);
  return out;
}

double log_negativity(const DensityMatrix& rho, int mode_a) { return negativity(rho, mode_a).log_neg; }

double log_negativity(const StateVector& psi) {
  require_two_modes(psi.layout);
  const int d1 = psi.layout.dim(0), d2 = psi.layout.dim(1);
  CMatrix<double> a(d1, d2);
  for (int m1 = 0; m1 < d1; ++m1)
    for (int m2 = 0; m2 < d2; ++m2) a(m1, m2) = psi.amplitudes(m1 * d2 + m2);
  a /= a.norm();
  const Eigen::JacobiSVD<CMatrix<double>> svd(a);
  return std::max(2.0 * std::log2(svd.singularValues().sum()), 0.0);
}

CMatrix<double> displacement_block(int d, std::complex<double> beta) {
  if (d < 1) throw InvalidArgument("dimension must be >= 1");
  // Normalised associated Laguerre recurrence along each diagonal k = m - n:
  // <n + k|D|n> = u_n e^{i k arg beta}, u_n = sqrt(n!/(n+k)!) x^{k/2} e^{-x/2} L_n^k(x).
  const double x = std::norm(beta), r = std::abs(beta);
  const std::complex<double> phase = r > 0 ? beta / r : 1.0;
  CMatrix<double> out(d, d);
  std::vector<double> u(d);
  std::complex<double> ph = 1.0;
  for (int k = 0; k < d; ++k, ph *= phase) {
    const int len = d - k;
    const double log_u0 = (k && x > 0 ? 0.5 * k * std::log(x) : 0.0) - 0.5 * x - 0.5 * std::lgamma(k + 1.0);
    u[0] = (k && x == 0) ? 0.0 : std::exp(log_u0);
    if (len > 1) u[1] = (1.0 + k - x) * u[0] / std::sqrt(1.0 + k);
    for (int n = 1; n + 1 < len; ++n)
      u[n + 1] = ((2.0 * n + 1 + k - x) * u[n] - std::sqrt(double(n) * (n + k)) * u[n - 1]) /
                 std::sqrt((n + 1.0) * (n + 1.0 + k));
    const std::complex<double> lower = ph, upper = (k % 2 ? -1.0 : 1.0) * std::conj(ph);
    for (int n = 0; n < len; ++n) {
      out(n + k, n) = u[n] * lower;
      if (k) out(n, n + k) = u[n] * upper;
    }
  }
  return out;
}

CMatrix<double> displaced_parity(int d, std::complex<double> alpha) {
  CMatrix<double> p = displacement_block(d, 2.0 * alpha);
  for (int n = 1; n < d; n += 2) p.col(n) = -p.col(n);
  return p;
}

double wigner_numeric(const DensityMatrix& rho, const PhasePoint& x) {
  require_two_modes(rho.layout);
  const int d1 = rho.layout.dim(0), d2 = rho.layout.dim(1);
  const double r2 = 1.0 / std::sqrt(2.0);
  const CMatrix<double> p1 = displaced_parity(d1, {x.q1 * r2, x.p1 * r2});
  const CMatrix<double> p2t = displaced_parity(d2, {x.q2 * r2, x.p2 * r2}).transpose();
  std::complex<double> acc = 0;
  for (int m1 = 0; m1 < d1; ++m1)
    for (int n1 = 0; n1 < d1; ++n1)
      acc += p1(n1, m1) * rho.matrix.block(m1 * d2, n1 * d2, d2, d2).cwiseProduct(p2t).sum();
  return kInvPi2 * acc.real();
}

std::vector<double> wigner_numeric(const DensityMatrix& rho, const std::vector<PhasePoint>& xs) {
  std::vector<double> out;
  out.reserve(xs.size());
  for (const auto& x : xs) out.push_back(wigner_numeric(rho, x));
  return out;
}

bool wigner_reliable(const ModeLayout& layout, const PhasePoint& x) {
  require_two_modes(layout);
  const double a1 = 0.5 * (x.q1 * x.q1 + x.p1 * x.p1), a2 = 0.5 * (x.q2 * x.q2 + x.p2 * x.p2);
  return a1 <= layout.dim(0) / 4.0 && a2 <= layout.dim(1) / 4.0;
}

WminResult w_min(const DensityMatrix& rho, const WminOptions& opts) {
  require_two_modes(rho.layout);
  if (opts.points < 3 || !(opts.hi > opts.lo)) throw InvalidArgument("w_min grid needs >= 3 points and hi > lo");
  const CMatrix<double> r = parity_reduced(rho);
  const double h = (opts.hi - opts.lo) / (opts.points - 1);
  WminResult out;
  out.grid = opts;
  out.value = std::numeric_limits<double>::infinity();
  int best = 0;
  for (int k = 0; k < opts.points; ++k) {
    const double w = axis_wigner(r, opts.lo + k * h);
    if (w < out.value) {
      out.value = w;
      best = k;
    }
  }
  out.p1 = opts.lo + best * h;
  double a = opts.lo + std::max(best - 1, 0) * h, b = opts.lo + std::min(best + 1, opts.points - 1) * h;
  double c = b - kGolden * (b - a), e = a + kGolden * (b - a);
  double fc = axis_wigner(r, c), fe = axis_wigner(r, e);
  while (b - a > opts.tol && out.refine_iterations < 200) {
    ++out.refine_iterations;
    if (fc < fe) {
      b = e;
      e = c;
      fe = fc;
      c = b - kGolden * (b - a);
      fc = axis_wigner(r, c);
    } else {
      a = c;
      c = e;
      fc = fe;
      e = a + kGolden * (b - a);
      fe = axis_wigner(r, e);
    }
  }
  const double mid = 0.5 * (a + b), fm = axis_wigner(r, mid);
  if (fm < out.value) {
    out.value = fm;
    out.p1 = mid;
  }
  return out;
}

WminFullResult w_min_full(const DensityMatrix& rho, const WminFullOptions& opts) {
  require_two_modes(rho.layout);
  if (opts.points < 3 || !(opts.hi > opts.lo)) throw InvalidArgument("w_min grid needs >= 3 points and hi > lo");
  const int d1 = rho.layout.dim(0), d2 = rho.layout.dim(1);
  const double r2 = 1.0 / std::sqrt(2.0);
  const double h = (opts.hi - opts.lo) / (opts.points - 1);
  std::vector<CMatrix<double>> p1;
  for (int a = 0; a < opts.points; ++a)
    for (int b = 0; b < opts.points; ++b)
      p1.push_back(displaced_parity(d1, {(opts.lo + a * h) * r2, (opts.lo + b * h) * r2}));
  WminFullResult out;
  out.value = std::numeric_limits<double>::infinity();
  for (int a = 0; a < opts.points; ++a)
    for (int b = 0; b < opts.points; ++b) {
      const double q2 = opts.lo + a * h, p2 = opts.lo + b * h;
      const CMatrix<double> r =
          mode2_reduced(rho, displaced_parity(d2, {q2 * r2, p2 * r2}).transpose());
      for (size_t k = 0; k < p1.size(); ++k) {
        const double w = kInvPi2 * trace_product(r, p1[k]).real();
        if (w < out.value) {
          out.value = w;
          const int i = static_cast<int>(k) / opts.points, j = static_cast<int>(k) % opts.points;
          out.at = {opts.lo + i * h, opts.lo + j * h, q2, p2};
        }
      }
    }

  // Coordinate-wise golden-section refinement within one grid cell.
  const auto coord = [](PhasePoint& x, int c) -> double& {
    return c == 0 ? x.q1 : c == 1 ? x.p1 : c == 2 ? x.q2 : x.p2;
  };
  for (int sweep = 0; sweep < opts.refine_sweeps; ++sweep)
    for (int c = 0; c < 4; ++c) {
      PhasePoint x = out.at;
      double a = coord(x, c) - h, b = coord(x, c) + h;
      const auto f = [&](double t) {
        coord(x, c) = t;
        return wigner_numeric(rho, x);
      };
      double u = b - kGolden * (b - a), v = a + kGolden * (b - a);
      double fu = f(u), fv = f(v);
      while (b - a > opts.tol) {
        if (fu < fv) {
          b = v;
          v = u;
          fv = fu;
          u = b - kGolden * (b - a);
          fu = f(u);
        } else {
          a = u;
          u = v;
          fu = fv;
          v = a + kGolden * (b - a);
          fv = f(v);
        }
      }
      const double t = 0.5 * (a + b), ft = f(t);
      if (ft < out.value) {
        out.value = ft;
        out.at = x;
      }
    }
  return out;
}

EprVariances epr_variances(const DensityMatrix& rho) {
  require_two_modes(rho.layout);
  const ModeLayout& l = rho.layout;
  const auto var = [&](const FockOperator& x1, const FockOperator& x2, const CMatrix<double>& sq1,
                       const CMatrix<double>& sq2, double sign) {
    const FockOperator x = x1 + sign * x2;
    const FockOperator x_sq = embed<double>(l, 0, sq1) + embed<double>(l, 1, sq2) + (2.0 * sign) * (x1 * x2);
    const double mean = trace_product(rho.matrix, x.matrix).real() / std::sqrt(2.0);
    return 0.5 * trace_product(rho.matrix, x_sq.matrix).real() - mean * mean;
  };
  const int d1 = l.dim(0), d2 = l.dim(1);
  // p^2 = -(b^dag - b)^2 / 2 = (2n + 1 - b^2 - b^dag^2) / 2, exact on the block.
  const auto p_sq = [](int d) {
    const CMatrix<double> a = ladder_matrix<double>(d);
    return CMatrix<double>(0.5 * (2.0 * number_matrix<double>(d) + CMatrix<double>::Identity(d, d) - a * a -
                                  a.adjoint() * a.adjoint()));
  };
  EprVariances out;
  out.q = var(position<double>(l, 0), position<double>(l, 1), position_power_matrix<double>(d1, 2),
              position_power_matrix<double>(d2, 2), -1.0);
  out.p = var(momentum<double>(l, 0), momentum<double>(l, 1), p_sq(d1), p_sq(d2), 1.0);
  out.sum = out.q + out.p;
  return out;
}

double TrendFit::operator()(double x) const { return A * std::exp(-B * x) + C; }

namespace {

struct Projected {
  double a = 0, c = 0, norm = std::numeric_limits<double>::infinity();
};

// Best A, C for fixed B with x measured from x0.
Projected project_fit(const std::vector<double>& xs, const std::vector<double>& ys, double x0, double b) {
  const Index n = static_cast<Index>(xs.size());
  Eigen::MatrixXd m(n, 2);
  Eigen::VectorXd y(n);
  for (Index i = 0; i < n; ++i) {
    m(i, 0) = std::exp(-b * (xs[i] - x0));
    m(i, 1) = 1.0;
    y(i) = ys[i];
  }
  Projected p;
  if (!m.allFinite()) return p;
  const Eigen::Vector2d ac = m.colPivHouseholderQr().solve(y);
  p.a = ac(0);
  p.c = ac(1);
  p.norm = (m * ac - y).norm();
  if (!std::isfinite(p.norm)) p.norm = std::numeric_limits<double>::infinity();
  return p;
}

}  // namespace

TrendFit fit_trend(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size()) throw InvalidArgument("fit_trend: xs and ys differ in length");
  if (xs.size() < 4) throw InvalidArgument("fit_trend: need at least 4 points");
  for (size_t i = 0; i < xs.size(); ++i) {
    if (!std::isfinite(xs[i]) || !std::isfinite(ys[i])) throw InvalidArgument("fit_trend: non-finite data");
    if (i && !(xs[i] > xs[i - 1])) throw InvalidArgument("fit_trend: xs must be strictly increasing");
  }
  TrendFit fit;
  double mean = 0, scale = 0;
  for (double y : ys) {
    mean += y;
    scale = std::max(scale, std::abs(y));
  }
  mean /= ys.size();
  double spread = 0;
  for (double y : ys) spread = std::max(spread, std::abs(y - mean));
  if (spread <= 1e-12 * std::max(1.0, scale)) {
    fit.C = mean;
    fit.degenerate = true;
    return fit;
  }

  const double x0 = xs.front(), span = xs.back() - xs.front();
  std::vector<double> grid;
  for (int k = 120; k >= -120; --k) grid.push_back(-std::pow(10.0, k / 40.0) / span);
  for (int k = -120; k <= 120; ++k) grid.push_back(std::pow(10.0, k / 40.0) / span);
  size_t best = 0;
  double best_norm = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < grid.size(); ++i) {
    const double r = project_fit(xs, ys, x0, grid[i]).norm;
    if (r < best_norm) {
      best_norm = r;
      best = i;
    }
  }
  double a = grid[best ? best - 1 : 0], b = grid[std::min(best + 1, grid.size() - 1)];
  double c = b - kGolden * (b - a), e = a + kGolden * (b - a);
  double fc = project_fit(xs, ys, x0, c).norm, fe = project_fit(xs, ys, x0, e).norm;
  for (int it = 0; it < 300 && std::abs(b - a) > 1e-14 * std::max(std::abs(a), std::abs(b)); ++it) {
    if (fc < fe) {
      b = e;
      e = c;
      fe = fc;
      c = b - kGolden * (b - a);
      fc = project_fit(xs, ys, x0, c).norm;
    } else {
      a = c;
      c = e;
      fc = fe;
      e = a + kGolden * (b - a);
      fe = project_fit(xs, ys, x0, e).norm;
    }
  }
  double bopt = 0.5 * (a + b);
  Projected p = project_fit(xs, ys, x0, bopt);
  if (best_norm < p.norm) {
    bopt = grid[best];
    p = project_fit(xs, ys, x0, bopt);
  }
  fit.B = bopt;
  fit.A = p.a * std::exp(bopt * x0);
  fit.C = p.c;
  fit.residual = p.norm;
  return fit;
}

MetricsRecord evaluate(const DensityMatrix& rho, const StateVector& target, const MetricsOptions& opts) {
  MetricsRecord m;
  std::ostringstream diag;
  const double n2 = target.amplitudes.squaredNorm();
  const double overlap = (target.amplitudes.adjoint() * rho.matrix * target.amplitudes)(0, 0).real() / n2;
  if (overlap < -1e-9 || overlap > 1 + 1e-9) diag << "fidelity overlap " << overlap << " clamped; ";
  m.fidelity = std::sqrt(std::clamp(overlap, 0.0, 1.0));
  m.purity = purity(rho);
  if (m.purity > 1 + 1e-9) diag << "purity " << m.purity << " above 1; ";
  if (opts.log_neg) {
    const Negativity n = negativity(rho);
    m.log_neg = n.log_neg;
    m.log_neg_raw = n.raw;
    if (n.raw < 0) diag << "log-negativity " << n.raw << " floored; ";
  }
  if (opts.w_min) {
    const WminResult w = w_min(rho, opts.wmin);
    m.w_min = w.value;
    m.w_min_p1 = w.p1;
  }
  if (opts.w_min_full) {
    const WminFullResult w = w_min_full(rho, opts.wmin_full);
    m.w_min_full = w.value;
    m.w_min_full_at = w.at;
  }
  const EprVariances e = epr_variances(rho);
  m.epr_q = e.q;
  m.epr_p = e.p;
  m.epr_sum = e.sum;
  m.diagnostic = diag.str();
  if (!m.diagnostic.empty()) m.diagnostic.resize(m.diagnostic.size() - 2);
  return m;
}

}  // namespace cpe

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


#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include <Eigen/QR>

#include "cpe/metrics.hpp"
#include "cpe/model.hpp"
#include "cpe/wigner_analytic.hpp"

using namespace cpe;
using C = std::complex<double>;

namespace {

constexpr double kInvPi2 = 1.0 / (kPi * kPi);

CMatrix<double> random_matrix(Index n, std::mt19937& rng) {
  std::normal_distribution<double> g;
  CMatrix<double> m(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) m(i, j) = C(g(rng), g(rng));
  return m;
}

CMatrix<double> random_unitary(Index n, std::mt19937& rng) {
  return Eigen::HouseholderQR<CMatrix<double>>(random_matrix(n, rng)).householderQ();
}

DensityMatrix random_density(const ModeLayout& l, std::mt19937& rng, Index rank) {
  CMatrix<double> a = random_matrix(l.size(), rng).leftCols(rank);
  CMatrix<double> m = a * a.adjoint();
  m /= m.trace().real();
  return {l, m};
}

CpeParams params(int d, double lambda) {
  CpeParams p;
  p.dims = {d, d};
  p.s = 1.26;
  p.lambda = lambda;
  return p;
}

const StateVector& cpe40() {
  static const StateVector psi = cpe_state(params(40, 0.175));
  return psi;
}

const DensityMatrix& cpe40_density() {
  static const DensityMatrix rho = pure_density(cpe40());
  return rho;
}

}  // namespace

TEST_CASE("fidelity") {
  const ModeLayout l({4});
  const ModeLayout two({4, 4});
  std::mt19937 rng(5);
  const StateVector psi = fock_state(two, {1, 2});
  CHECK(fidelity(pure_density(psi), psi) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(fidelity(pure_density(fock_state(l, {0})), fock_state(l, {1})) == 0.0);
  const DensityMatrix th = thermal_density<double>(ModeLayout({80}), {1.0});
  CHECK(fidelity(th, vacuum(ModeLayout({80}))) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
  for (int k = 0; k < 5; ++k) {
    const DensityMatrix a = random_density(two, rng, 3), b = random_density(two, rng, 5);
    CHECK(std::abs(fidelity(a, b) - fidelity(b, a)) <= 1e-8);
  }
  CHECK(fidelity(pure_density(psi), pure_density(psi)) == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("purity") {
  std::mt19937 rng(9);
  CHECK(purity(pure_density(cpe40())) == doctest::Approx(1.0).epsilon(1e-9));
  const ModeLayout one({120});
  CHECK(purity(thermal_density<double>(one, {1.0})) == doctest::Approx(1.0 / 3).epsilon(1e-12));
  CHECK(purity(thermal_density<double>(ModeLayout({40, 40}), {1.0, 1.0})) == doctest::Approx(1.0 / 9).epsilon(1e-10));
  const DensityMatrix a = random_density(ModeLayout({3}), rng, 2), b = random_density(ModeLayout({4}), rng, 3);
  const DensityMatrix ab{ModeLayout({3, 4}), tensor(FockOperator(a.layout, a.matrix), FockOperator(b.layout, b.matrix)).matrix};
  CHECK(std::abs(purity(ab) - purity(a) * purity(b)) <= 1e-10);
}

TEST_CASE("log-negativity") {
  const ModeLayout l({6, 6});
  CHECK(log_negativity(pure_density(fock_state(l, {1, 3}))) == doctest::Approx(0.0));
  CHECK(log_negativity(thermal_density<double>(l, {0.5, 0.5})) == doctest::Approx(0.0));

  const StateVector tmsv = cpe_state(params(40, 0.0));
  const double want = 2 * std::log2(1.26);
  CHECK(std::abs(log_negativity(tmsv) - want) <= 0.01);
  const double en = log_negativity(pure_density(tmsv));
  CHECK(std::abs(en - want) <= 0.01);
  CHECK(std::abs(log_negativity(cpe40()) - en) <= 0.01);
  CHECK(std::abs(log_negativity(cpe40_density()) - en) <= 0.01);
}

TEST_CASE("log-negativity is invariant under local unitaries") {
  std::mt19937 rng(21);
  CpeParams p = params(12, 0.175);
  p.leak_tol = 1e-2;
  const ModeLayout l = p.layout();
  const DensityMatrix rho = pure_density(cpe_state(p));
  const FockOperator u = tensor(FockOperator(ModeLayout({12}), random_unitary(12, rng)),
                                FockOperator(ModeLayout({12}), random_unitary(12, rng)));
  const DensityMatrix rotated{l, u.matrix * rho.matrix * u.matrix.adjoint()};
  CHECK(std::abs(log_negativity(rotated) - log_negativity(rho)) <= 1e-6);
  CHECK(log_negativity(rho) > 0.1);
}

TEST_CASE("Wigner function of the vacuum") {
  const DensityMatrix v = pure_density(vacuum(ModeLayout({30, 30})));
  CHECK(std::abs(wigner_numeric(v, PhasePoint{}) - kInvPi2) <= 1e-4);
  CHECK(std::abs(wigner_numeric(v, PhasePoint{1, 0, 0, 0}) - kInvPi2 * std::exp(-1.0)) <= 1e-4);
  CHECK(std::abs(wigner_numeric(v, PhasePoint{0.3, -0.7, 1.1, 0.2}) - kInvPi2 * std::exp(-(0.09 + 0.49 + 1.21 + 0.04))) <= 1e-12);
  const WminResult w = w_min(v);
  CHECK(w.value > 0);
  CHECK(std::abs(w.p1) == doctest::Approx(6.0));
  CHECK(w.value == doctest::Approx(kInvPi2 * std::exp(-36.0)).epsilon(1e-6));
}

TEST_CASE("Wigner function of the target matches the closed form") {
  const AnalyticWignerParams a = AnalyticWignerParams::from(params(40, 0.175));
  for (const PhasePoint& x : std::vector<PhasePoint>{{0, 0, 0, 0}, {0, -0.9, 0, 0}, {0.5, 0.4, -0.3, 0.2},
                                                     {-1.0, 1.2, 0.7, -0.5}, {0.2, -1.5, 0.2, 0.6}}) {
    CHECK(wigner_reliable(cpe40_density().layout, x));
    CHECK(std::abs(wigner_numeric(cpe40_density(), x) - analytic_wigner(a, x)) <= 1e-3);
  }
}

TEST_CASE("Wigner function integrates to one") {
  // Midpoint sums over [-6, 6]^4, contracting mode 2 first.
  const DensityMatrix& rho = cpe40_density();
  const int d = 40, n = 25;
  const double h = 12.0 / (n - 1), r2 = 1 / std::sqrt(2.0);
  std::vector<CMatrix<double>> p1;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) p1.push_back(displaced_parity(d, {(-6 + a * h) * r2, (-6 + b * h) * r2}));
  double sum = 0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      const CMatrix<double> p2t = displaced_parity(d, {(-6 + a * h) * r2, (-6 + b * h) * r2}).transpose();
      CMatrix<double> r(d, d);
      for (int m = 0; m < d; ++m)
        for (int k = 0; k < d; ++k) r(m, k) = rho.matrix.block(m * d, k * d, d, d).cwiseProduct(p2t).sum();
      for (const auto& p : p1) sum += kInvPi2 * r.cwiseProduct(p.transpose()).sum().real();
    }
  CHECK(std::abs(sum * std::pow(h, 4) - 1.0) <= 2e-2);
}

TEST_CASE("Wigner negativity of the target") {
  const WminResult w = w_min(cpe40_density());
  CHECK(w.value < 0);
  CHECK(w.refine_iterations > 0);
  CHECK(w.value == doctest::Approx(wigner_numeric(cpe40_density(), PhasePoint{0, w.p1, 0, 0})));

  WminFullOptions o;
  o.points = 17;
  const WminFullResult full = w_min_full(cpe40_density(), o);
  CHECK(full.value <= w.value + 1e-9);
  CHECK(full.value == doctest::Approx(wigner_numeric(cpe40_density(), full.at)));
}

TEST_CASE("two-mode squeezing variances") {
  const EprVariances v = epr_variances(pure_density(vacuum(ModeLayout({8, 8}))));
  CHECK(v.q == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(v.p == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(v.sum == doctest::Approx(1.0).epsilon(1e-14));
  const EprVariances t = epr_variances(pure_density(cpe_state(params(40, 0.0))));
  CHECK(t.sum == doctest::Approx(1 / (1.26 * 1.26)).epsilon(1e-6));
  CHECK(t.q == doctest::Approx(t.p).epsilon(1e-6));
  CHECK(epr_variances(cpe40_density()).sum < 1.0);
}

TEST_CASE("trend fit") {
  std::vector<double> xs, ys, noisy;
  std::mt19937 rng(2);
  std::uniform_real_distribution<double> u(-1e-3, 1e-3);
  for (int k = 0; k < 8; ++k) {
    xs.push_back(0.1 * k);
    ys.push_back(2 * std::exp(-3 * xs.back()) + 0.5);
    noisy.push_back(ys.back() + u(rng));
  }
  const TrendFit f = fit_trend(xs, ys);
  CHECK(f.A == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(f.B == doctest::Approx(3.0).epsilon(1e-6));
  CHECK(f.C == doctest::Approx(0.5).epsilon(1e-6));
  CHECK_FALSE(f.degenerate);
  CHECK(f(0.35) == doctest::Approx(2 * std::exp(-1.05) + 0.5).epsilon(1e-6));

  const TrendFit c = fit_trend(xs, std::vector<double>(8, 0.7));
  CHECK(c.degenerate);
  CHECK(c.A == 0.0);
  CHECK(c.C == doctest::Approx(0.7));

  CHECK(fit_trend(xs, noisy).residual <= 5e-3);
  CHECK_THROWS_AS(fit_trend({0, 1, 2}, {1, 2, 3}), InvalidArgument);
  CHECK_THROWS_AS(fit_trend({0, 2, 1, 3}, {1, 2, 3, 4}), InvalidArgument);
}

TEST_CASE("evaluate bundles the metrics") {
  CpeParams p = params(12, 0.175);
  p.leak_tol = 1e-2;
  const StateVector psi = cpe_state(p);
  const DensityMatrix rho = pure_density(psi);
  MetricsOptions o;
  const MetricsRecord m = evaluate(rho, psi, o);
  CHECK(m.fidelity == doctest::Approx(1.0));
  CHECK(m.purity == doctest::Approx(1.0));
  CHECK(m.log_neg == doctest::Approx(log_negativity(rho)));
  CHECK(m.w_min == doctest::Approx(w_min(rho).value));
  CHECK(m.epr_sum == doctest::Approx(epr_variances(rho).sum));
  CHECK(m.diagnostic.empty());
  CHECK(std::isnan(m.w_min_full));
}

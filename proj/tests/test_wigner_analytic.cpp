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

#include <Eigen/LU>

#include "cpe/wigner_analytic.hpp"

using namespace cpe;

namespace {

AnalyticWignerParams figure_one() { return {2.0, 0.5, 0.3, kPi / 4}; }

std::vector<double> grid(double lo, double hi, int n) {
  std::vector<double> g;
  for (int k = 0; k < n; ++k) g.push_back(lo + (hi - lo) * k / (n - 1));
  return g;
}

}  // namespace

TEST_CASE("Airy function") {
  struct Ref {
    double x, ai;
  };
  for (const Ref& r : std::vector<Ref>{{0, 0.3550280538878172},
                                       {1, 0.13529241631288147},
                                       {-1, 0.5355608832923522},
                                       {2.5, 0.015725923380470484},
                                       {5.8, 1.6301750585877267e-05},
                                       {6, 9.947694360252897e-06},
                                       {-7, 0.1842808352505062},
                                       {-7.5, 0.3217757163806479},
                                       {-10, 0.040241238486441955},
                                       {-30, -0.08796818845684005}})
    CHECK(std::abs(airy_ai(r.x) - r.ai) <= 1e-10);
  CHECK(airy_ai(10) == doctest::Approx(1.1047532552898654e-10).epsilon(1e-9));
  CHECK(airy_ai(40) == doctest::Approx(6.36574265855294e-75).epsilon(1e-9));
  CHECK(log_airy_ai(20) == doctest::Approx(-61.644079608377).epsilon(1e-12));
  CHECK(log_airy_ai(100) == doctest::Approx(-669.08357542531).epsilon(1e-12));
  CHECK(airy_ai(200) == 0.0);
}

TEST_CASE("Gaussian part") {
  const AnalyticWignerParams p{1.26, 1 / 1.26, 0.175, kPi / 4};
  const Eigen::Matrix4d v = gaussian_covariance(p);
  CHECK(v.determinant() == doctest::Approx(1.0 / 16).epsilon(1e-12));
  CHECK((v - v.transpose()).norm() <= 1e-15);
  // Vacuum limit.
  CHECK(gaussian_wigner({1, 1, 0, 0}, PhasePoint{}) == doctest::Approx(1 / (kPi * kPi)).epsilon(1e-14));
  CHECK_THROWS_AS(analytic_wigner({1.26, 1 / 1.26, 0.0, kPi / 4}, PhasePoint{}), InvalidArgument);
  CHECK_THROWS_AS(analytic_wigner({-1, 1, 0.1, 0}, PhasePoint{}), InvalidArgument);
}

TEST_CASE("agreement with the Fock-space state") {
  CpeParams c;
  c.dims = {40, 40};
  c.s = 1.26;
  c.lambda = 0.175;
  const DensityMatrix rho = pure_density(cpe_state(c));
  const AnalyticWignerParams p = AnalyticWignerParams::from(c);
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> u(-3, 3);
  double worst = 0;
  for (int k = 0; k < 20; ++k) {
    const PhasePoint x{u(rng), u(rng), u(rng), u(rng)};
    REQUIRE(wigner_reliable(rho.layout, x));
    worst = std::max(worst, std::abs(wigner_numeric(rho, x) - analytic_wigner(p, x)));
  }
  CHECK(worst <= 1e-3);
}

TEST_CASE("normalisation") {
  const AnalyticWignerParams p{1.26, 1 / 1.26, 0.175, kPi / 4};
  const auto g = grid(-6, 6, 49);
  const double h = g[1] - g[0];
  double sum = 0;
  for (double a : g)
    for (double b : g)
      for (double c : g)
        for (double d : g) sum += analytic_wigner(p, {a, b, c, d});
  CHECK(std::abs(sum * std::pow(h, 4) - 1) <= 2e-2);
}

TEST_CASE("position marginal is nonnegative") {
  const AnalyticWignerParams p = figure_one();
  const auto g = grid(-10, 10, 201);
  const double h = g[1] - g[0];
  for (const auto& q : std::vector<std::array<double, 2>>{{0, 0}, {0.5, -0.5}, {1.2, 0.3}, {-0.8, -1.1}}) {
    double m = 0;
    for (double p1 : g)
      for (double p2 : g) m += analytic_wigner(p, {q[0], p1, q[1], p2});
    CHECK(m * h * h >= -1e-3);
  }
}

TEST_CASE("figure cut with the pair momenta balanced") {
  const auto g = grid(-3, 3, 121);
  const Eigen::MatrixXd cut = epr_cut(figure_one(), g, g, 0.0, 0.0);
  CHECK(cut.minCoeff() < 0);
  // The minimum lies inside the grid, not on its boundary.
  Eigen::Index i, j;
  cut.minCoeff(&i, &j);
  CHECK(i > 0);
  CHECK(i < 120);
  CHECK(j > 0);
  CHECK(j < 120);
}

TEST_CASE("figure cut with displaced pair momenta") {
  const auto g = grid(-3, 3, 121);
  const Eigen::MatrixXd c0 = epr_cut(figure_one(), g, g, 0.0, 0.0);
  const Eigen::MatrixXd c1 = epr_cut(figure_one(), g, g, 0.0, std::sqrt(2.0));
  Eigen::Index i0, j0, i1, j1;
  c0.maxCoeff(&i0, &j0);
  c1.maxCoeff(&i1, &j1);
  CHECK(j1 != j0);
  CHECK(c1.minCoeff() < 0);
}

TEST_CASE("near-Gaussian cut is symmetric") {
  // The cubic shift breaks v -> -v at first order in lambda.
  const auto g = grid(-3, 3, 61);
  const auto asymmetry = [&](double lambda) {
    const Eigen::MatrixXd cut = epr_cut({1.26, 1 / 1.26, lambda, kPi / 4}, g, g, 0.0, 0.0);
    return (cut - cut.rowwise().reverse()).cwiseAbs().maxCoeff();
  };
  const double a2 = asymmetry(1e-2), a3 = asymmetry(1e-3);
  CHECK(a3 <= 1e-3);
  CHECK(a2 / a3 == doctest::Approx(10).epsilon(0.05));
  const Eigen::MatrixXd g0 = epr_cut({1.26, 1 / 1.26, 1e-6, kPi / 4}, g, g, 0.0, 0.0);
  CHECK((g0 - g0.rowwise().reverse()).cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("pair coordinates") {
  const PhasePoint x = epr_point(0.4, -0.3, 1.1, 0.7);
  const double r2 = std::sqrt(2.0);
  CHECK((x.q1 - x.q2) / r2 == doctest::Approx(0.4));
  CHECK((x.p1 + x.p2) / r2 == doctest::Approx(-0.3));
  CHECK(x.q1 + x.q2 == doctest::Approx(1.1));
  CHECK(x.p1 - x.p2 == doctest::Approx(0.7));
}

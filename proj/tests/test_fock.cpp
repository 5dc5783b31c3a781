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

#include "cpe/fock.hpp"

using namespace cpe;
using C = std::complex<double>;

namespace {

double max_abs(const CMatrix<double>& m) { return m.cwiseAbs().maxCoeff(); }

CMatrix<double> interior(const CMatrix<double>& m, int n) { return m.topLeftCorner(n, n); }

}  // namespace

TEST_CASE("layout bookkeeping") {
  const ModeLayout l({3, 4, 2});
  CHECK(l.size() == 24);
  CHECK(l.stride(0) == 8);
  CHECK(l.stride(2) == 1);
  CHECK(l.flatten({2, 1, 1}) == 2 * 8 + 1 * 2 + 1);
  CHECK(l.unflatten(19) == std::vector<int>{2, 1, 1});
  CHECK_THROWS_AS(ModeLayout({3, 0}), InvalidArgument);
  CHECK(annihilation(l, 1).layout == l);
}

TEST_CASE("annihilation matrix elements") {
  const ModeLayout one({3});
  const CMatrix<double> b = annihilation(one, 0).matrix;
  CMatrix<double> want = CMatrix<double>::Zero(3, 3);
  want(0, 1) = 1;
  want(1, 2) = std::sqrt(2.0);
  CHECK(max_abs(b - want) == 0.0);

  const FockOperator b0 = annihilation(ModeLayout({2, 2}), 0);
  CHECK(b0.dim() == 4);
  CHECK((b0.matrix.array() != C(0)).count() == 2);
  CHECK(max_abs(b0.matrix - tensor(annihilation(ModeLayout({2}), 0), identity(ModeLayout({2}))).matrix) == 0.0);
}

TEST_CASE("truncated commutator") {
  const int d = 5;
  const ModeLayout l({d});
  const FockOperator b = annihilation(l, 0);
  const CMatrix<double> c = commutator(b, adjoint(b)).matrix;
  CHECK(max_abs(interior(c, d - 1) - CMatrix<double>::Identity(d - 1, d - 1)) < 1e-14);
  CHECK(c(d - 1, d - 1).real() == doctest::Approx(-(d - 1)));
}

TEST_CASE("adjoint is an involution") {
  const ModeLayout l({3, 3});
  const FockOperator a = annihilation(l, 0) * creation(l, 1) + C(0.3, 0.7) * number(l, 1);
  CHECK(max_abs(adjoint(adjoint(a)).matrix - a.matrix) == 0.0);
}

TEST_CASE("layouts must match") {
  const FockOperator a = annihilation(ModeLayout({3, 3}), 0);
  const FockOperator b = annihilation(ModeLayout({3, 4}), 0);
  CHECK_THROWS_AS(a + b, InvalidArgument);
  CHECK_THROWS_AS(a * b, InvalidArgument);
}

TEST_CASE("quadratures") {
  const int d = 6;
  const ModeLayout l({d});
  const FockOperator q = position(l, 0), p = momentum(l, 0);
  const StateVector vac = vacuum(l);
  CHECK(expectation(q * q, vac).real() == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(std::abs(expectation(q, vac)) < 1e-15);
  const CMatrix<double> c = commutator(q, p).matrix;
  CHECK(max_abs(interior(c, d - 1) - C(0, 1) * CMatrix<double>::Identity(d - 1, d - 1)) < 1e-14);
}

TEST_CASE("matrix exponential") {
  const ModeLayout l({4});
  const FockOperator n = number(l, 0);
  CHECK(max_abs(expm(n, C(0)).matrix - CMatrix<double>::Identity(4, 4)) == 0.0);
  const CMatrix<double> par = expm(n, C(0, 3.14159265358979323846)).matrix;
  CMatrix<double> want = CMatrix<double>::Zero(4, 4);
  want.diagonal() << 1, -1, 1, -1;
  CHECK(max_abs(par - want) < 1e-12);

  // Squeeze exp((ln s/2)(b^dag^2 - b^2)) and its inverse on d = 40.
  const int d = 40;
  const CMatrix<double> b = ladder_matrix<double>(d);
  const CMatrix<double> g = (b.adjoint() * b.adjoint() - b * b).eval();
  const CMatrix<double> s2 = expm<double>(g, C(0.5 * std::log(2.0)));
  const CMatrix<double> s12 = expm<double>(g, C(0.5 * std::log(0.5)));
  CHECK(max_abs((s2 * s12 - CMatrix<double>::Identity(d, d)).topLeftCorner(20, 20)) < 1e-8);
}

TEST_CASE("thermal state") {
  const ModeLayout l({60});
  double lost = 1;
  const DensityMatrix rho = thermal_density<double>(l, {1.0}, &lost);
  CHECK(lost < 1e-17);
  CHECK(rho.matrix.trace().real() == doctest::Approx(1.0));
  CHECK(expectation(number(l, 0), rho).real() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rho.matrix(0, 0).real() == doctest::Approx(0.5));
}

TEST_CASE("partial trace of a product") {
  const ModeLayout a({3}), b({4});
  const DensityMatrix ra = thermal_density<double>(a, {0.4});
  const DensityMatrix rb = pure_density(fock_state(b, {2}));
  const FockOperator prod = tensor(FockOperator(a, ra.matrix), FockOperator(b, rb.matrix));
  const DensityMatrix joint(prod.layout, prod.matrix);
  CHECK(max_abs(partial_trace(joint, {0}).matrix - ra.matrix) < 1e-15);
  CHECK(max_abs(partial_trace(joint, {1}).matrix - rb.matrix) < 1e-15);
}

TEST_CASE("density matrix validation") {
  const ModeLayout l({2});
  CMatrix<double> m = CMatrix<double>::Zero(2, 2);
  m(0, 0) = 0.5;
  CHECK_THROWS_AS(DensityMatrix(l, m), InvalidState);
  m(1, 1) = 0.5;
  m(0, 1) = 0.1;
  CHECK_THROWS_AS(DensityMatrix(l, m), InvalidState);
  m(1, 0) = 0.1;
  CHECK_NOTHROW(DensityMatrix(l, m));
}

TEST_CASE("single precision instantiation") {
  const ModeLayout l({5});
  const BasicFockOperator<float> b = annihilation<float>(l, 0);
  CHECK(std::abs(b(1, 2) - std::complex<float>(std::sqrt(2.0f))) < 1e-6f);
}

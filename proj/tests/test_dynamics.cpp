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

#include "cpe/dynamics.hpp"
#include "cpe/metrics.hpp"

using namespace cpe;
using C = std::complex<double>;

namespace {

double max_abs(const CMatrix<double>& m) { return m.cwiseAbs().maxCoeff(); }

CMatrix<double> random_matrix(Index n, std::mt19937& rng) {
  std::normal_distribution<double> g;
  CMatrix<double> m(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) m(i, j) = C(g(rng), g(rng));
  return m;
}

DensityMatrix random_density(const ModeLayout& l, std::mt19937& rng) {
  const CMatrix<double> a = random_matrix(l.size(), rng);
  CMatrix<double> m = a * a.adjoint();
  m /= m.trace().real();
  return {l, m};
}

FockOperator zero(const ModeLayout& l) { return {l, CMatrix<double>::Zero(l.size(), l.size())}; }

SchemeConfig config(int d, double s, double lambda) {
  SchemeConfig c;
  c.target.dims = {d, d};
  c.target.s = s;
  c.target.lambda = lambda;
  c.target.leak_tol = 1e-2;
  return c;
}

}  // namespace

TEST_CASE("decay law of the dense right-hand side") {
  const ModeLayout l({6});
  const double kappa = 0.7;
  const DensityMatrix rho = pure_density(fock_state(l, {3}));
  const CMatrix<double> rhs = lindblad_rhs(rho.matrix, zero(l), {{annihilation(l, 0), kappa}});
  CHECK((number(l, 0).matrix * rhs).trace().real() == doctest::Approx(-3 * kappa).epsilon(1e-14));
}

TEST_CASE("thermal state is stationary under the thermal bath") {
  const ModeLayout l({25});
  const double n = 0.8, kappa = 1.3;
  const DensityMatrix th = thermal_density<double>(l, {n});
  const std::vector<Dissipator> jumps = {{annihilation(l, 0), kappa * (n + 1)}, {creation(l, 0), kappa * n}};
  CHECK(lindblad_rhs(th.matrix, zero(l), jumps).norm() <= 1e-10);
  const LindbladGenerator gen(zero(l), jumps);
  SplitMatrix out(l.size());
  gen.apply(SplitMatrix(th.matrix), out);
  CHECK(out.to_complex().norm() <= 1e-10);
}

TEST_CASE("trace preservation") {
  std::mt19937 rng(7);
  const ModeLayout l({3, 3});
  const CMatrix<double> a = random_matrix(9, rng);
  const FockOperator h(l, (a + a.adjoint()).eval());
  const std::vector<Dissipator> jumps = {{FockOperator(l, random_matrix(9, rng)), 0.4},
                                         {FockOperator(l, random_matrix(9, rng)), 1.1}};
  const CMatrix<double> rhs = lindblad_rhs(random_density(l, rng).matrix, h, jumps);
  CHECK(std::abs(rhs.trace()) < 1e-12);
}

TEST_CASE("banded generator matches the dense reference") {
  std::mt19937 rng(11);
  const ModeLayout l({3, 5, 4}, {ModeKind::cavity, ModeKind::mechanical, ModeKind::mechanical});
  CpeParams p;
  p.dims = {5, 4};
  const FockOperator h = scheme_hamiltonian({switching_couplings(p, 1, 0.8)}, l);
  const std::vector<Dissipator> jumps = {
      {annihilation(l, 0), 2.0}, {annihilation(l, 1), 0.3}, {creation(l, 2), 0.2}, {engineered_mode(p, 2, l, 1, 2), 0.5}};
  const DensityMatrix rho = random_density(l, rng);
  const CMatrix<double> want = lindblad_rhs(rho.matrix, h, jumps);
  const LindbladGenerator gen(h, jumps);
  SplitMatrix out(l.size());
  gen.apply(SplitMatrix(rho.matrix), out);
  CHECK(max_abs(out.to_complex() - want) <= 1e-12 * max_abs(want));

  BandedOperator b = BandedOperator::from_dense(h.matrix);
  CHECK(max_abs(b.to_dense() - h.matrix) == 0.0);
  CHECK(max_abs(b.adjoint().to_dense() - h.matrix.adjoint()) == 0.0);
  const BandedOperator f = BandedOperator::from_dense(jumps[3].op.matrix);
  CHECK(max_abs(multiply(f.adjoint(), f).to_dense() - jumps[3].op.matrix.adjoint() * jumps[3].op.matrix) < 1e-13);
}

TEST_CASE("exponential decay under evolve") {
  const ModeLayout l({4});
  const Trajectory tr = evolve(pure_density(fock_state(l, {1})), zero(l), {{annihilation(l, 0), 1.0}}, 1.0);
  CHECK(tr.final_state.matrix(1, 1).real() == doctest::Approx(std::exp(-1.0)).epsilon(1e-6));
  CHECK(tr.stats.steps == 50);
}

TEST_CASE("no dynamics leaves the state unchanged") {
  std::mt19937 rng(3);
  const ModeLayout l({3, 2});
  const DensityMatrix rho = random_density(l, rng);
  EvolveOptions o;
  o.checkpoints = {0.25, 0.5};
  const Trajectory tr = evolve(rho, zero(l), {}, 0.5, o);
  CHECK(max_abs(tr.final_state.matrix - rho.matrix) < 1e-15);
  CHECK(tr.times.size() == 2);
}

TEST_CASE("unstable explicit step is rejected") {
  const ModeLayout l({5});
  EvolveOptions o;
  o.dt = 10.0;
  CHECK_THROWS_AS(evolve(pure_density(vacuum(l)), zero(l), {{annihilation(l, 0), 1.0}}, 1.0, o), InvalidArgument);
  CHECK_THROWS_AS(evolve(pure_density(vacuum(l)), zero(l), {}, -1.0), InvalidArgument);
}

TEST_CASE("first switching step empties the engineered mode") {
  const SchemeConfig c = config(16, 1.26, 0.175);
  const ModeLayout l = c.target.layout();
  const FockOperator f1 = engineered_mode(c.target, 1, l);
  const FockOperator n1 = adjoint(f1) * f1;
  const DensityMatrix rho0 = pure_density(vacuum(l));
  const Trajectory tr = evolve(rho0, zero(l), {{f1, 1.0}}, 10.0);
  const double occ0 = expectation(n1, rho0).real();
  const double occ = expectation(n1, tr.final_state).real();
  CHECK(occ0 > 0.05);
  CHECK(occ <= 2e-3);
}

TEST_CASE("switching with a trivial target returns to vacuum") {
  SchemeConfig c = config(6, 1.0, 0.0);
  InitialState init;
  init.kind = InitKind::thermal;
  init.n_th = {0.3, 0.3};
  const RunResult r = run_switching(c, {}, init);
  CHECK(fidelity(r.final_state, vacuum(c.target.layout())) >= 1 - 1e-4);
}

TEST_CASE("mechanical noise lowers the fidelity") {
  const SchemeConfig c = config(12, 1.26, 0.175);
  const StateVector target = cpe_state(c.target);
  NoiseConfig noisy;
  noisy.gamma = 0.01;
  noisy.n_th = {3, 3};
  for (Scheme s : {Scheme::switching, Scheme::two_dissipator}) {
    const double f0 = fidelity(run_scheme(s, c, {}, {}).final_state, target);
    const double f1 = fidelity(run_scheme(s, c, noisy, {}).final_state, target);
    CHECK(f1 < f0);
  }
}

TEST_CASE("precooling") {
  SchemeConfig c = config(16, 1.0, 0.0);
  c.checkpoints_per_step = 1;
  const ModeLayout l = c.target.layout();
  const DensityMatrix th = thermal_density<double>(l, {5.0, 5.0});
  const RunResult r = run_precool(c, {}, th);
  REQUIRE(r.trajectory.size() == 2);
  const double n2_before = expectation(number(l, 1), th).real();
  CHECK(std::abs(expectation(number(l, 1), r.trajectory[0]).real() - n2_before) <= 1e-8);
  CHECK(expectation(number(l, 0) + number(l, 1), r.final_state).real() <= 1e-2);
}

TEST_CASE("explicit-cavity model relaxes to the mechanical vacuum") {
  SchemeConfig c = config(4, 1.0, 0.0);
  c.cavity_dim = 3;
  c.g_over_kappa = 0.05;
  InitialState init;
  init.kind = InitKind::thermal;
  init.n_th = {0.2, 0.2};
  const RunResult r = run_full_model(Scheme::two_dissipator, c, {}, init);
  CHECK(r.final_state.layout == c.target.layout());
  CHECK(fidelity(r.final_state, vacuum(c.target.layout())) >= 0.99);
}

TEST_CASE("configuration checks") {
  NoiseConfig n;
  n.gamma = -1;
  CHECK_THROWS_AS(n.validate(), InvalidArgument);
  n.gamma = 0.1;
  n.n_th = {1, -2};
  CHECK_THROWS_AS(n.validate(), InvalidArgument);
  SchemeConfig c;
  c.t_step = 0;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  for (Scheme s : {Scheme::switching, Scheme::two_dissipator, Scheme::full_switching, Scheme::full_two_dissipator})
    CHECK(scheme_from_string(to_string(s)) == s);
  for (InitKind k : {InitKind::vacuum, InitKind::thermal, InitKind::precooled}) CHECK(init_from_string(to_string(k)) == k);
  CHECK_THROWS_AS(scheme_from_string("three_dissipator"), InvalidArgument);
}

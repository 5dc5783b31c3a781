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

#include "cpe/model.hpp"

#include <cmath>
#include <sstream>

namespace cpe {

namespace {

using C = std::complex<double>;
constexpr C kI(0.0, 1.0);

// Flat indices (na * db + nb) of the block with na + nb = n inside da x db.
std::vector<Index> block_indices(int da, int db, int n) {
  std::vector<Index> idx;
  for (int na = std::max(0, n - db + 1); na <= std::min(n, da - 1); ++na) idx.push_back(Index(na) * db + (n - na));
  return idx;
}

// Beam-splitter block for total excitation n, already exponentiated.
CMatrix<double> beamsplitter_block(int da, int db, int n, double theta) {
  const auto idx = block_indices(da, db, n);
  const Index m = static_cast<Index>(idx.size());
  CMatrix<double> x = CMatrix<double>::Zero(m, m);
  for (Index k = 0; k < m; ++k) {
    const int na = static_cast<int>(idx[k] / db), nb = static_cast<int>(idx[k] % db);
    // b_a b_b^dag |na, nb> and b_a^dag b_b |na, nb>
    for (Index l = 0; l < m; ++l) {
      const int ma = static_cast<int>(idx[l] / db);
      if (ma == na - 1) x(l, k) += std::sqrt(double(na) * (nb + 1));
      if (ma == na + 1) x(l, k) -= std::sqrt(double(na + 1) * nb);
    }
  }
  return expm<double>(x, C(theta));
}

void apply_single(CVector<double>& v, int da, int db, int mode, const CMatrix<double>& u) {
  Eigen::Map<Eigen::Matrix<C, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> m(v.data(), da, db);
  if (mode == 0)
    m = (u * m).eval();
  else
    m = (m * u.transpose()).eval();
}

}  // namespace

void CpeParams::validate() const {
  if (!(s > 0) || !std::isfinite(s)) throw InvalidArgument("squeezing s must be > 0");
  if (!std::isfinite(lambda)) throw InvalidArgument("cubicity must be finite");
  if (!std::isfinite(theta)) throw InvalidArgument("theta must be finite");
  if (dims[0] < 2 || dims[1] < 2) throw InvalidArgument("mechanical dimensions must be >= 2");
  if (pad_gate < 0 || pad_cubic < 0) throw InvalidArgument("gate padding must be >= 0");
  if (!(leak_tol > 0)) throw InvalidArgument("leak tolerance must be > 0");
}

CMatrix<double> squeeze_matrix(int d, double s) {
  if (!(s > 0)) throw InvalidArgument("squeezing s must be > 0");
  const CMatrix<double> b = ladder_matrix<double>(d);
  const CMatrix<double> b2 = b * b;
  return expm<double>((b2.adjoint() - b2).eval(), C(0.5 * std::log(s)));
}

CMatrix<double> cubic_matrix(int d, double lambda) {
  const CMatrix<double> b = ladder_matrix<double>(d);
  const Eigen::MatrixXd q = ((b + b.adjoint()) / std::sqrt(2.0)).real();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(q);
  CVector<double> ph(d);
  for (int k = 0; k < d; ++k) {
    const double x = es.eigenvalues()(k);
    ph(k) = std::exp(kI * (lambda * x * x * x));
  }
  const CMatrix<double> v = es.eigenvectors().cast<C>();
  return v * ph.asDiagonal() * v.adjoint();
}

CMatrix<double> beamsplitter_matrix(int da, int db, double theta) {
  const Index D = Index(da) * db;
  CMatrix<double> u = CMatrix<double>::Zero(D, D);
  for (int n = 0; n <= da + db - 2; ++n) {
    const auto idx = block_indices(da, db, n);
    const CMatrix<double> blk = beamsplitter_block(da, db, n, theta);
    for (size_t r = 0; r < idx.size(); ++r)
      for (size_t c = 0; c < idx.size(); ++c) u(idx[r], idx[c]) = blk(r, c);
  }
  return u;
}

FockOperator squeeze_gate(const ModeLayout& layout, int mode, double s, int pad) {
  const int d = layout.dim(mode);
  const CMatrix<double> u = squeeze_matrix(d + pad, s).topLeftCorner(d, d);
  return embed<double>(layout, mode, u);
}

FockOperator cubic_gate(const ModeLayout& layout, int mode, double lambda, int pad) {
  const int d = layout.dim(mode);
  const CMatrix<double> u = cubic_matrix(d + pad, lambda).topLeftCorner(d, d);
  return embed<double>(layout, mode, u);
}

FockOperator beamsplitter_gate(const ModeLayout& layout, int mode_a, int mode_b, double theta, int pad) {
  if (mode_a == mode_b) throw InvalidArgument("beam splitter needs two distinct modes");
  const bool swapped = mode_a > mode_b;
  const int lo = swapped ? mode_b : mode_a, hi = swapped ? mode_a : mode_b;
  const int dl = layout.dim(lo), dh = layout.dim(hi);
  // Swapping the roles of the modes is theta -> -theta.
  const CMatrix<double> full = beamsplitter_matrix(dl + pad, dh + pad, swapped ? -theta : theta);
  const ModeLayout small({dl, dh}), big({dl + pad, dh + pad});
  const FockOperator proj = project(FockOperator(big, full), small);
  return embed<double>(layout, lo, hi, proj.matrix);
}

PreparedState prepare_cpe(const CpeParams& p) {
  p.validate();
  const int w1 = p.dims[0] + p.pad_gate, w2 = p.dims[1] + p.pad_gate;
  // Single-mode gates get their own padding before projecting to the working size.
  const CMatrix<double> s1 = squeeze_matrix(w1 + p.pad_gate, p.s).topLeftCorner(w1, w1);
  const CMatrix<double> s2 = squeeze_matrix(w2 + p.pad_gate, 1.0 / p.s).topLeftCorner(w2, w2);
  CVector<double> v(Index(w1) * w2);
  for (int a = 0; a < w1; ++a)
    for (int b = 0; b < w2; ++b) v(Index(a) * w2 + b) = s1(a, 0) * s2(b, 0);

  for (int n = 0; n <= w1 + w2 - 2; ++n) {
    const auto idx = block_indices(w1, w2, n);
    const CMatrix<double> blk = beamsplitter_block(w1, w2, n, p.theta);
    CVector<double> seg(idx.size());
    for (size_t k = 0; k < idx.size(); ++k) seg(k) = v(idx[k]);
    seg = (blk * seg).eval();
    for (size_t k = 0; k < idx.size(); ++k) v(idx[k]) = seg(k);
  }

  if (p.lambda != 0.0) apply_single(v, w1, w2, 0, cubic_matrix(w1 + p.pad_cubic, p.lambda).topLeftCorner(w1, w1));

  const StateVector padded(ModeLayout::mechanical(w1, w2), v);
  PreparedState out;
  out.leak = leaked_population(padded, p.layout());
  if (out.leak > p.leak_tol) {
    std::ostringstream os;
    os << "CPE state leaks " << out.leak << " onto padded levels (tolerance " << p.leak_tol
       << "); increase dims beyond " << p.dims[0] << "x" << p.dims[1];
    throw TruncationError(os.str());
  }
  out.state = project(padded, p.layout());
  out.state.amplitudes.normalize();
  return out;
}

StateVector cpe_state(const CpeParams& p) { return prepare_cpe(p).state; }

CMatrix<double> process_matrix(int d, int k) {
  const CMatrix<double> b = ladder_matrix<double>(d);
  switch (k) {
    case 0:
      return b;
    case 1:
      return b.adjoint();
    case 2:
      return b * b;
    case 3:
      return (b * b).adjoint();
    case 4: {
      CMatrix<double> m = CMatrix<double>::Zero(d, d);
      for (int n = 0; n < d; ++n) m(n, n) = 2.0 * n + 1.0;
      return m;
    }
    default:
      throw InvalidArgument("process index must be in 0..4");
  }
}

CouplingTable switching_couplings(const CpeParams& p, int j, double g) {
  if (j != 1 && j != 2) throw InvalidArgument("engineered mode index must be 1 or 2");
  const double sign = (j == 1) ? -1.0 : 1.0;  // (-1)^j
  const double sp = s_plus(p.s), sm = s_minus(p.s);
  const double sj = (j == 1) ? p.s : 1.0 / p.s;  // s^{-(-1)^j}
  const C cubic = -kI * (3.0 * p.lambda * sj / 4.0);
  CouplingTable t;
  t.g[0] = {g * sp, g * sign * sm, g * cubic, g * cubic, g * cubic};
  t.g[1] = {-sign * g * sp, -g * sm, 0.0, 0.0, 0.0};
  return t;
}

FockOperator mode_from_couplings(const CouplingTable& c, const ModeLayout& layout) {
  const auto mech = layout.modes_of(ModeKind::mechanical);
  if (mech.size() != 2) throw InvalidArgument("layout must contain exactly two mechanical modes");
  CMatrix<double> acc = CMatrix<double>::Zero(layout.size(), layout.size());
  for (int j = 0; j < 2; ++j) {
    const int d = layout.dim(mech[j]);
    CMatrix<double> single = CMatrix<double>::Zero(d, d);
    for (int k = 0; k < 5; ++k)
      if (c.g[j][k] != C(0)) single += c.g[j][k] * process_matrix(d, k);
    acc += embed<double>(layout, mech[j], single).matrix;
  }
  return {layout, std::move(acc)};
}

FockOperator engineered_mode(const CpeParams& p, int j, const ModeLayout& layout) {
  return mode_from_couplings(switching_couplings(p, j, 1.0), layout);
}

FockOperator engineered_mode(const CpeParams& p, int j, const ModeLayout& layout, int mode1, int mode2) {
  if (layout.kind(mode1) != ModeKind::mechanical || layout.kind(mode2) != ModeKind::mechanical)
    throw InvalidArgument("engineered modes act on mechanical modes");
  const auto mech = layout.modes_of(ModeKind::mechanical);
  if (mech.size() == 2 && mech[0] == mode1 && mech[1] == mode2) return engineered_mode(p, j, layout);
  // Relabel: treat every other mode as passive.
  std::vector<ModeKind> kinds(layout.modes(), ModeKind::cavity);
  kinds[mode1] = kinds[mode2] = ModeKind::mechanical;
  if (mode1 > mode2) throw InvalidArgument("expected mode1 < mode2");
  const ModeLayout relabeled(layout.dims(), kinds);
  return FockOperator(layout, engineered_mode(p, j, relabeled).matrix);
}

FockOperator scheme_hamiltonian(const std::vector<CouplingTable>& tables, const ModeLayout& layout) {
  const auto cav = layout.modes_of(ModeKind::cavity);
  if (cav.size() != tables.size())
    throw InvalidArgument("one coupling table per cavity mode required");
  CMatrix<double> h = CMatrix<double>::Zero(layout.size(), layout.size());
  for (size_t l = 0; l < cav.size(); ++l) {
    const CMatrix<double> x = mode_from_couplings(tables[l], layout).matrix;
    const CMatrix<double> ad = creation<double>(layout, cav[l]).matrix;
    const CMatrix<double> t = ad * x;
    h += t + t.adjoint();
  }
  return {layout, std::move(h)};
}

}  // namespace cpe

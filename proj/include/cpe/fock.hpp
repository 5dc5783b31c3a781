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

// Truncated Fock spaces, ladder operators and dense operator/state types.
//
// Flat index convention: the first mode is the most significant digit, so a
// two-mode basis state |n1, n2> sits at n1 * d2 + n2 and tensor(A, B) places A
// on the first factor.

#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <complex>
#include <string>
#include <utility>
#include <vector>

#include "cpe/errors.hpp"

namespace cpe {

using Index = Eigen::Index;

template <typename Real>
using CMatrix = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Real>
using CVector = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;

enum class ModeKind { mechanical, cavity };

class ModeLayout {
 public:
  ModeLayout() = default;
  explicit ModeLayout(std::vector<int> dims, std::vector<ModeKind> kinds = {});

  static ModeLayout mechanical(int d1, int d2) { return ModeLayout({d1, d2}); }

  int modes() const { return static_cast<int>(dims_.size()); }
  int dim(int mode) const;
  ModeKind kind(int mode) const;
  const std::vector<int>& dims() const { return dims_; }
  const std::vector<ModeKind>& kinds() const { return kinds_; }

  // Product of all mode dimensions.
  Index size() const;
  // Distance in the flat index between consecutive levels of `mode`.
  Index stride(int mode) const;

  Index flatten(const std::vector<int>& levels) const;
  std::vector<int> unflatten(Index flat) const;

  ModeLayout padded(int pad) const;
  // Indices of modes of the given kind, in layout order.
  std::vector<int> modes_of(ModeKind kind) const;

  bool operator==(const ModeLayout& other) const {
    return dims_ == other.dims_ && kinds_ == other.kinds_;
  }
  bool operator!=(const ModeLayout& other) const { return !(*this == other); }

  std::string describe() const;

 private:
  void check_mode(int mode) const;

  std::vector<int> dims_;
  std::vector<ModeKind> kinds_;
};

// Concatenates layouts; the first argument's modes come first.
ModeLayout join(const ModeLayout& a, const ModeLayout& b);

template <typename Real>
struct BasicFockOperator {
  using Scalar = std::complex<Real>;
  using Matrix = CMatrix<Real>;

  ModeLayout layout;
  Matrix matrix;

  BasicFockOperator() = default;
  BasicFockOperator(ModeLayout l, Matrix m) : layout(std::move(l)), matrix(std::move(m)) {
    if (matrix.rows() != layout.size() || matrix.cols() != layout.size())
      throw InvalidArgument("operator matrix does not match layout " + layout.describe());
  }

  Index dim() const { return matrix.rows(); }
  Scalar operator()(Index r, Index c) const { return matrix(r, c); }
};

template <typename Real>
struct BasicStateVector {
  using Scalar = std::complex<Real>;

  ModeLayout layout;
  CVector<Real> amplitudes;

  BasicStateVector() = default;
  BasicStateVector(ModeLayout l, CVector<Real> a) : layout(std::move(l)), amplitudes(std::move(a)) {
    if (amplitudes.size() != layout.size())
      throw InvalidArgument("state vector does not match layout " + layout.describe());
  }

  Real norm() const { return amplitudes.norm(); }
};

template <typename Real>
struct BasicDensityMatrix {
  using Scalar = std::complex<Real>;
  using Matrix = CMatrix<Real>;

  ModeLayout layout;
  Matrix matrix;

  BasicDensityMatrix() = default;
  // Validates unit trace (1e-9) and hermiticity (1e-10), then re-hermitizes.
  BasicDensityMatrix(ModeLayout l, Matrix m) : layout(std::move(l)), matrix(std::move(m)) {
    if (matrix.rows() != layout.size() || matrix.cols() != layout.size())
      throw InvalidArgument("density matrix does not match layout " + layout.describe());
    const Real tr_err = std::abs(matrix.trace() - Scalar(1));
    if (!(tr_err <= Real(1e-9)))
      throw InvalidState("density matrix trace deviates from 1 by " + std::to_string(double(tr_err)));
    const Real herm_err = (matrix - matrix.adjoint()).cwiseAbs().maxCoeff();
    if (!(herm_err <= Real(1e-10)))
      throw InvalidState("density matrix is not hermitian (max deviation " +
                         std::to_string(double(herm_err)) + ")");
    matrix = Real(0.5) * (matrix + matrix.adjoint()).eval();
  }

  Index dim() const { return matrix.rows(); }
};

using FockOperator = BasicFockOperator<double>;
using StateVector = BasicStateVector<double>;
using DensityMatrix = BasicDensityMatrix<double>;

// ---------------------------------------------------------------------------
// Single-mode matrices.

template <typename Real>
CMatrix<Real> ladder_matrix(int d) {
  if (d < 1) throw InvalidArgument("Fock dimension must be >= 1");
  CMatrix<Real> b = CMatrix<Real>::Zero(d, d);
  for (int n = 1; n < d; ++n) b(n - 1, n) = std::sqrt(Real(n));
  return b;
}

template <typename Real>
CMatrix<Real> number_matrix(int d) {
  CMatrix<Real> n = CMatrix<Real>::Zero(d, d);
  for (int k = 0; k < d; ++k) n(k, k) = Real(k);
  return n;
}

// (b + b^dag)^k / 2^{k/2} projected onto d levels, built on d + k levels so the
// top rows carry exact matrix elements of the untruncated operator.
template <typename Real>
CMatrix<Real> position_power_matrix(int d, int k) {
  const int w = d + k;
  const CMatrix<Real> b = ladder_matrix<Real>(w);
  const CMatrix<Real> q = (b + b.adjoint()) / std::sqrt(Real(2));
  CMatrix<Real> acc = CMatrix<Real>::Identity(w, w);
  for (int i = 0; i < k; ++i) acc = (acc * q).eval();
  return acc.topLeftCorner(d, d);
}

// ---------------------------------------------------------------------------
// Embedding and products.

// Places a single-mode matrix on `mode`, identity elsewhere.
template <typename Real>
BasicFockOperator<Real> embed(const ModeLayout& layout, int mode, const CMatrix<Real>& single) {
  const int dm = layout.dim(mode);
  if (single.rows() != dm || single.cols() != dm)
    throw InvalidArgument("single-mode matrix has wrong dimension for mode " + std::to_string(mode));
  const Index D = layout.size();
  const Index S = layout.stride(mode);
  const Index outer = D / (dm * S);
  CMatrix<Real> m = CMatrix<Real>::Zero(D, D);
  for (Index o = 0; o < outer; ++o) {
    const Index base = o * dm * S;
    for (int a = 0; a < dm; ++a)
      for (int c = 0; c < dm; ++c) {
        const auto v = single(a, c);
        if (v == std::complex<Real>(0)) continue;
        for (Index i = 0; i < S; ++i) m(base + a * S + i, base + c * S + i) = v;
      }
  }
  return {layout, std::move(m)};
}

// Places a two-mode matrix (first factor on mode_a) on modes a < b.
template <typename Real>
BasicFockOperator<Real> embed(const ModeLayout& layout, int mode_a, int mode_b,
                              const CMatrix<Real>& pair) {
  if (!(mode_a < mode_b)) throw InvalidArgument("embed: expected mode_a < mode_b");
  const int da = layout.dim(mode_a), db = layout.dim(mode_b);
  if (pair.rows() != Index(da) * db || pair.cols() != Index(da) * db)
    throw InvalidArgument("two-mode matrix has wrong dimension");
  const Index D = layout.size();
  const Index Sa = layout.stride(mode_a), Sb = layout.stride(mode_b);
  CMatrix<Real> m = CMatrix<Real>::Zero(D, D);
  for (Index row = 0; row < D; ++row) {
    const int na = static_cast<int>((row / Sa) % da);
    const int nb = static_cast<int>((row / Sb) % db);
    const Index rest = row - na * Sa - nb * Sb;
    const Index pr = Index(na) * db + nb;
    for (int ma = 0; ma < da; ++ma)
      for (int mb = 0; mb < db; ++mb) {
        const auto v = pair(pr, Index(ma) * db + mb);
        if (v != std::complex<Real>(0)) m(row, rest + ma * Sa + mb * Sb) = v;
      }
  }
  return {layout, std::move(m)};
}

template <typename Real = double>
BasicFockOperator<Real> identity(const ModeLayout& layout) {
  return {layout, CMatrix<Real>::Identity(layout.size(), layout.size())};
}

template <typename Real = double>
BasicFockOperator<Real> annihilation(const ModeLayout& layout, int mode) {
  return embed<Real>(layout, mode, ladder_matrix<Real>(layout.dim(mode)));
}

template <typename Real = double>
BasicFockOperator<Real> creation(const ModeLayout& layout, int mode) {
  return embed<Real>(layout, mode, ladder_matrix<Real>(layout.dim(mode)).adjoint().eval());
}

template <typename Real = double>
BasicFockOperator<Real> number(const ModeLayout& layout, int mode) {
  return embed<Real>(layout, mode, number_matrix<Real>(layout.dim(mode)));
}

// q = (b + b^dag)/sqrt2
template <typename Real = double>
BasicFockOperator<Real> position(const ModeLayout& layout, int mode) {
  const CMatrix<Real> b = ladder_matrix<Real>(layout.dim(mode));
  return embed<Real>(layout, mode, ((b + b.adjoint()) / std::sqrt(Real(2))).eval());
}

// p = i(b^dag - b)/sqrt2
template <typename Real = double>
BasicFockOperator<Real> momentum(const ModeLayout& layout, int mode) {
  const CMatrix<Real> b = ladder_matrix<Real>(layout.dim(mode));
  const std::complex<Real> i(0, 1);
  return embed<Real>(layout, mode, (i * (b.adjoint() - b) / std::sqrt(Real(2))).eval());
}

template <typename Real>
BasicFockOperator<Real> adjoint(const BasicFockOperator<Real>& a) {
  return {a.layout, a.matrix.adjoint()};
}

template <typename Real>
void require_same_layout(const ModeLayout& a, const ModeLayout& b) {
  if (a != b) throw InvalidArgument("layout mismatch: " + a.describe() + " vs " + b.describe());
}

template <typename Real>
BasicFockOperator<Real> operator+(const BasicFockOperator<Real>& a, const BasicFockOperator<Real>& b) {
  require_same_layout<Real>(a.layout, b.layout);
  return {a.layout, a.matrix + b.matrix};
}

template <typename Real>
BasicFockOperator<Real> operator-(const BasicFockOperator<Real>& a, const BasicFockOperator<Real>& b) {
  require_same_layout<Real>(a.layout, b.layout);
  return {a.layout, a.matrix - b.matrix};
}

template <typename Real>
BasicFockOperator<Real> operator*(const BasicFockOperator<Real>& a, const BasicFockOperator<Real>& b) {
  require_same_layout<Real>(a.layout, b.layout);
  return {a.layout, a.matrix * b.matrix};
}

template <typename Real>
BasicFockOperator<Real> operator*(std::complex<Real> s, const BasicFockOperator<Real>& a) {
  return {a.layout, s * a.matrix};
}

template <typename Real>
BasicFockOperator<Real> operator*(Real s, const BasicFockOperator<Real>& a) {
  return {a.layout, s * a.matrix};
}

template <typename Real>
BasicStateVector<Real> operator*(const BasicFockOperator<Real>& a, const BasicStateVector<Real>& v) {
  require_same_layout<Real>(a.layout, v.layout);
  return {v.layout, a.matrix * v.amplitudes};
}

template <typename Real>
BasicFockOperator<Real> commutator(const BasicFockOperator<Real>& a, const BasicFockOperator<Real>& b) {
  require_same_layout<Real>(a.layout, b.layout);
  return {a.layout, a.matrix * b.matrix - b.matrix * a.matrix};
}

template <typename Real>
BasicFockOperator<Real> tensor(const BasicFockOperator<Real>& a, const BasicFockOperator<Real>& b) {
  const Index da = a.dim(), db = b.dim();
  CMatrix<Real> m(da * db, da * db);
  for (Index i = 0; i < da; ++i)
    for (Index j = 0; j < da; ++j) m.block(i * db, j * db, db, db) = a.matrix(i, j) * b.matrix;
  return {join(a.layout, b.layout), std::move(m)};
}

template <typename Real>
BasicStateVector<Real> tensor(const BasicStateVector<Real>& a, const BasicStateVector<Real>& b) {
  CVector<Real> v(a.amplitudes.size() * b.amplitudes.size());
  for (Index i = 0; i < a.amplitudes.size(); ++i)
    v.segment(i * b.amplitudes.size(), b.amplitudes.size()) = a.amplitudes(i) * b.amplitudes;
  return {join(a.layout, b.layout), std::move(v)};
}

// ---------------------------------------------------------------------------
// Matrix exponential.

// exp(scale * A). Hermitian and anti-Hermitian arguments go through an
// eigendecomposition; anything else falls back to Pade scaling and squaring.
// Anti-Hermitian arguments must produce a unitary to 1e-9.
template <typename Real>
CMatrix<Real> expm(const CMatrix<Real>& a, std::complex<Real> scale) {
  using C = std::complex<Real>;
  const CMatrix<Real> x = scale * a;
  const Real size = std::max<Real>(Real(1), x.cwiseAbs().maxCoeff());
  const Real tol = Real(1e-12) * size;
  const Index n = x.rows();
  if ((x + x.adjoint()).cwiseAbs().maxCoeff() <= tol) {
    const CMatrix<Real> h = C(0, 1) * x;  // x = -i h
    Eigen::SelfAdjointEigenSolver<CMatrix<Real>> es(Real(0.5) * (h + h.adjoint()));
    CVector<Real> ph(n);
    for (Index k = 0; k < n; ++k) ph(k) = std::exp(C(0, -1) * es.eigenvalues()(k));
    CMatrix<Real> u = es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
    const Real err = (u.adjoint() * u - CMatrix<Real>::Identity(n, n)).cwiseAbs().maxCoeff();
    if (!(err <= Real(1e-9)))
      throw NumericalError("matrix exponential of anti-Hermitian generator is not unitary (" +
                           std::to_string(double(err)) + ")");
    return u;
  }
  if ((x - x.adjoint()).cwiseAbs().maxCoeff() <= tol) {
    Eigen::SelfAdjointEigenSolver<CMatrix<Real>> es(Real(0.5) * (x + x.adjoint()));
    CVector<Real> ex(n);
    for (Index k = 0; k < n; ++k) ex(k) = std::exp(es.eigenvalues()(k));
    return es.eigenvectors() * ex.asDiagonal() * es.eigenvectors().adjoint();
  }
  return x.exp();
}

template <typename Real>
BasicFockOperator<Real> expm(const BasicFockOperator<Real>& a, std::complex<Real> scale) {
  return {a.layout, expm<Real>(a.matrix, scale)};
}

// ---------------------------------------------------------------------------
// States.

template <typename Real = double>
BasicStateVector<Real> fock_state(const ModeLayout& layout, const std::vector<int>& levels) {
  CVector<Real> v = CVector<Real>::Zero(layout.size());
  v(layout.flatten(levels)) = 1;
  return {layout, std::move(v)};
}

template <typename Real = double>
BasicStateVector<Real> vacuum(const ModeLayout& layout) {
  return fock_state<Real>(layout, std::vector<int>(layout.modes(), 0));
}

template <typename Real>
BasicDensityMatrix<Real> pure_density(const BasicStateVector<Real>& psi) {
  const Real n2 = psi.amplitudes.squaredNorm();
  if (!(n2 > Real(0))) throw InvalidState("zero state vector");
  const CVector<Real> v = psi.amplitudes / std::sqrt(n2);
  return {psi.layout, v * v.adjoint()};
}

// Thermal populations p_n = n^k/(n+1)^{k+1} truncated to d levels and
// renormalised. Returns the discarded weight through `discarded`.
template <typename Real>
Eigen::Matrix<Real, Eigen::Dynamic, 1> thermal_populations(int d, Real n_th, Real* discarded = nullptr) {
  if (n_th < 0) throw InvalidArgument("thermal occupation must be >= 0");
  Eigen::Matrix<Real, Eigen::Dynamic, 1> p(d);
  const Real x = n_th / (n_th + 1);
  Real xn = 1;
  for (int k = 0; k < d; ++k) {
    p(k) = xn / (n_th + 1);
    xn *= x;
  }
  const Real kept = p.sum();
  if (discarded) *discarded = Real(1) - kept;
  return p / kept;
}

template <typename Real = double>
BasicDensityMatrix<Real> thermal_density(const ModeLayout& layout, const std::vector<Real>& n_th,
                                         Real* discarded = nullptr) {
  if (static_cast<int>(n_th.size()) != layout.modes())
    throw InvalidArgument("one thermal occupation per mode required");
  Eigen::Matrix<Real, Eigen::Dynamic, 1> diag = Eigen::Matrix<Real, Eigen::Dynamic, 1>::Ones(1);
  Real kept = 1;
  for (int m = 0; m < layout.modes(); ++m) {
    Real lost = 0;
    const auto p = thermal_populations<Real>(layout.dim(m), n_th[m], &lost);
    kept *= (Real(1) - lost);
    Eigen::Matrix<Real, Eigen::Dynamic, 1> next(diag.size() * p.size());
    for (Index i = 0; i < diag.size(); ++i) next.segment(i * p.size(), p.size()) = diag(i) * p;
    diag = std::move(next);
  }
  if (discarded) *discarded = Real(1) - kept;
  CMatrix<Real> m = CMatrix<Real>::Zero(layout.size(), layout.size());
  m.diagonal() = diag.template cast<std::complex<Real>>();
  return {layout, std::move(m)};
}

// ---------------------------------------------------------------------------
// Restrictions between layouts with the same number of modes.

// Flat indices of `small` inside `big` (each small dim <= big dim).
std::vector<Index> embedding_indices(const ModeLayout& small, const ModeLayout& big);

template <typename Real>
BasicFockOperator<Real> project(const BasicFockOperator<Real>& op, const ModeLayout& small) {
  const auto idx = embedding_indices(small, op.layout);
  const Index n = static_cast<Index>(idx.size());
  CMatrix<Real> m(n, n);
  for (Index r = 0; r < n; ++r)
    for (Index c = 0; c < n; ++c) m(r, c) = op.matrix(idx[r], idx[c]);
  return {small, std::move(m)};
}

template <typename Real>
BasicStateVector<Real> project(const BasicStateVector<Real>& v, const ModeLayout& small) {
  const auto idx = embedding_indices(small, v.layout);
  CVector<Real> a(idx.size());
  for (size_t k = 0; k < idx.size(); ++k) a(k) = v.amplitudes(idx[k]);
  return {small, std::move(a)};
}

// Population of `v` outside the `small` block.
template <typename Real>
Real leaked_population(const BasicStateVector<Real>& v, const ModeLayout& small) {
  const auto kept = project(v, small).amplitudes.squaredNorm();
  return v.amplitudes.squaredNorm() - kept;
}

// Partial trace keeping the listed modes (in layout order).
template <typename Real>
BasicDensityMatrix<Real> partial_trace(const BasicDensityMatrix<Real>& rho, const std::vector<int>& keep) {
  const ModeLayout& L = rho.layout;
  std::vector<int> kd;
  std::vector<ModeKind> kk;
  std::vector<bool> kept(L.modes(), false);
  for (int m : keep) {
    L.dim(m);
    kept[m] = true;
  }
  for (int m = 0; m < L.modes(); ++m)
    if (kept[m]) {
      kd.push_back(L.dim(m));
      kk.push_back(L.kind(m));
    }
  ModeLayout out(kd, kk);
  const Index D = L.size();
  CMatrix<Real> m = CMatrix<Real>::Zero(out.size(), out.size());
  std::vector<Index> kept_index(D), traced_index(D);
  for (Index i = 0; i < D; ++i) {
    const auto lv = L.unflatten(i);
    Index k = 0, t = 0;
    for (int mm = 0; mm < L.modes(); ++mm) {
      if (kept[mm])
        k = k * L.dim(mm) + lv[mm];
      else
        t = t * L.dim(mm) + lv[mm];
    }
    kept_index[i] = k;
    traced_index[i] = t;
  }
  for (Index i = 0; i < D; ++i)
    for (Index j = 0; j < D; ++j)
      if (traced_index[i] == traced_index[j]) m(kept_index[i], kept_index[j]) += rho.matrix(i, j);
  m /= m.trace();
  return {out, std::move(m)};
}

template <typename Real>
std::complex<Real> expectation(const BasicFockOperator<Real>& op, const BasicDensityMatrix<Real>& rho) {
  require_same_layout<Real>(op.layout, rho.layout);
  return (op.matrix.cwiseProduct(rho.matrix.transpose())).sum();
}

template <typename Real>
std::complex<Real> expectation(const BasicFockOperator<Real>& op, const BasicStateVector<Real>& psi) {
  require_same_layout<Real>(op.layout, psi.layout);
  return psi.amplitudes.dot(op.matrix * psi.amplitudes);
}

template <typename Real>
Real min_eigenvalue(const BasicDensityMatrix<Real>& rho) {
  Eigen::SelfAdjointEigenSolver<CMatrix<Real>> es(rho.matrix, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

}  // namespace cpe

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

// Lindblad generator on banded operators.
//
// L(rho) = G rho + rho G^dag + sum_k c_k rho c_k^dag with G = -iH - 1/2 sum c^dag c.
// All operators in this project are polynomials in ladder operators, so they
// occupy a handful of diagonals of the flat basis; the generator stores those
// diagonals and works on split (real, imag) row-major planes. Only the upper
// triangle of L(rho) is computed; the lower one is mirrored.

#pragma once

#include <span>
#include <vector>

#include "cpe/fock.hpp"

namespace cpe {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct SplitMatrix {
  RowMatrix re, im;

  SplitMatrix() = default;
  explicit SplitMatrix(Index n) : re(RowMatrix::Zero(n, n)), im(RowMatrix::Zero(n, n)) {}
  explicit SplitMatrix(const CMatrix<double>& m) : re(m.real()), im(m.imag()) {}

  Index dim() const { return re.rows(); }
  CMatrix<double> to_complex() const;
  double trace_real() const { return re.trace(); }
};

// Entry (r, r + offsets[k]) is (re(k, r), im(k, r)); out-of-range slots are 0.
struct BandedOperator {
  Index dim = 0;
  std::vector<Index> offsets;
  RowMatrix re, im;

  static BandedOperator from_dense(const CMatrix<double>& m);
  CMatrix<double> to_dense() const;
  BandedOperator adjoint() const;
  Index bandwidth() const;
  Index diagonals() const { return static_cast<Index>(offsets.size()); }
};

BandedOperator multiply(const BandedOperator& a, const BandedOperator& b);
// a + s * b
BandedOperator axpy(const BandedOperator& a, std::complex<double> s, const BandedOperator& b);

struct Dissipator {
  FockOperator op;
  double rate = 0;  // contributes rate * D[op]
};

// D[c] rho = c rho c^dag - 1/2 {c^dag c, rho}
CMatrix<double> dissipator(const CMatrix<double>& c, const CMatrix<double>& rho);

// Dense reference right-hand side.
CMatrix<double> lindblad_rhs(const CMatrix<double>& rho, const FockOperator& h,
                             const std::vector<Dissipator>& jumps);

// Copies the upper triangle onto the lower one, within `width` of the diagonal.
void mirror_band(SplitMatrix& m, Index width);
void mirror_full(SplitMatrix& m);

// dst = src + coef2 * src2 + coef * L(y) on the upper triangle. Sources may be
// null (zero) and may equal dst.
struct StageTarget {
  SplitMatrix* dst = nullptr;
  const SplitMatrix* src = nullptr;
  double coef = 1.0;
  const SplitMatrix* src2 = nullptr;
  double coef2 = 0.0;
};

class LindbladGenerator {
 public:
  LindbladGenerator(const FockOperator& h, const std::vector<Dissipator>& jumps);

  Index dim() const { return dim_; }
  // out = L(rho) for Hermitian rho; out must not alias rho.
  void apply(const SplitMatrix& rho, SplitMatrix& out) const;
  // Fused Runge-Kutta stage. Reads the upper triangle of y plus the lower band
  // of width input_band(); writes only upper triangles of the targets.
  void apply_combine(const SplitMatrix& y, std::span<const StageTarget> targets) const;
  Index input_band() const;
  // Power-iteration estimate of the largest |eigenvalue| of L.
  double spectral_radius(int iterations = 40) const;
  // Multiply-adds per application, for runtime estimates.
  double flops_per_apply() const;

 private:
  // Diagonals indexed by column and zero padded to the row stride, for the
  // right-hand products.
  struct Columns {
    std::vector<Index> offsets;
    std::vector<double> re, im;
  };

  Index dim_ = 0;
  Index stride_ = 0;  // dim rounded up to the vector block
  Index pad_ = 0;     // zero margin of the padded row buffers
  BandedOperator g_;
  std::vector<BandedOperator> jumps_;
  Columns g_cols_;
  std::vector<Columns> jump_cols_;
  mutable std::vector<double> acc_re_, acc_im_;  // dim x stride
  mutable std::vector<double> row_re_, row_im_, tmp_re_, tmp_im_;

  Columns columns(const BandedOperator& op) const;
};

}  // namespace cpe

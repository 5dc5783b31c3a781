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

#include "cpe/lindblad.hpp"

#include <algorithm>
#include <cstring>
#include <map>
#include <random>

#if defined(__SSE__)
#include <xmmintrin.h>
#endif

namespace cpe {

namespace {

using C = std::complex<double>;

BandedOperator from_map(Index dim, const std::map<Index, CVector<double>>& diags) {
  BandedOperator out;
  out.dim = dim;
  std::vector<std::pair<Index, const CVector<double>*>> keep;
  for (const auto& [off, v] : diags)
    if ((v.array() != C(0)).any()) keep.emplace_back(off, &v);
  out.re = RowMatrix::Zero(static_cast<Index>(keep.size()), dim);
  out.im = RowMatrix::Zero(static_cast<Index>(keep.size()), dim);
  for (size_t k = 0; k < keep.size(); ++k) {
    out.offsets.push_back(keep[k].first);
    out.re.row(k) = keep[k].second->real().transpose();
    out.im.row(k) = keep[k].second->imag().transpose();
  }
  return out;
}

}  // namespace

CMatrix<double> SplitMatrix::to_complex() const {
  CMatrix<double> m(re.rows(), re.cols());
  m.real() = re;
  m.imag() = im;
  return m;
}

BandedOperator BandedOperator::from_dense(const CMatrix<double>& m) {
  const Index D = m.rows();
  std::map<Index, CVector<double>> diags;
  for (Index c = 0; c < D; ++c)
    for (Index r = 0; r < D; ++r) {
      const C v = m(r, c);
      if (v == C(0)) continue;
      auto it = diags.find(c - r);
      if (it == diags.end()) it = diags.emplace(c - r, CVector<double>::Zero(D)).first;
      it->second(r) = v;
    }
  return from_map(D, diags);
}

CMatrix<double> BandedOperator::to_dense() const {
  CMatrix<double> m = CMatrix<double>::Zero(dim, dim);
  for (size_t k = 0; k < offsets.size(); ++k)
    for (Index r = 0; r < dim; ++r) {
      const Index c = r + offsets[k];
      if (c >= 0 && c < dim) m(r, c) = C(re(k, r), im(k, r));
    }
  return m;
}

BandedOperator BandedOperator::adjoint() const {
  std::map<Index, CVector<double>> diags;
  for (size_t k = 0; k < offsets.size(); ++k) {
    const Index off = offsets[k];
    CVector<double> v = CVector<double>::Zero(dim);
    for (Index r = 0; r < dim; ++r) {
      const Index row = r - off;  // A^dag[r, r - off] = conj(A[r - off, r])
      if (row >= 0 && row < dim) v(r) = std::conj(C(re(k, row), im(k, row)));
    }
    diags.emplace(-off, std::move(v));
  }
  return from_map(dim, diags);
}

Index BandedOperator::bandwidth() const {
  Index bw = 0;
  for (Index off : offsets) bw = std::max(bw, off < 0 ? -off : off);
  return bw;
}

BandedOperator multiply(const BandedOperator& a, const BandedOperator& b) {
  if (a.dim != b.dim) throw InvalidArgument("banded multiply: dimension mismatch");
  const Index D = a.dim;
  std::map<Index, CVector<double>> diags;
  for (size_t i = 0; i < a.offsets.size(); ++i)
    for (size_t j = 0; j < b.offsets.size(); ++j) {
      const Index oa = a.offsets[i], ob = b.offsets[j];
      auto it = diags.find(oa + ob);
      if (it == diags.end()) it = diags.emplace(oa + ob, CVector<double>::Zero(D)).first;
      for (Index r = 0; r < D; ++r) {
        const Index m = r + oa, c = m + ob;
        if (m < 0 || m >= D || c < 0 || c >= D) continue;
        it->second(r) += C(a.re(i, r), a.im(i, r)) * C(b.re(j, m), b.im(j, m));
      }
    }
  return from_map(D, diags);
}

BandedOperator axpy(const BandedOperator& a, C s, const BandedOperator& b) {
  if (a.dim != b.dim) throw InvalidArgument("banded axpy: dimension mismatch");
  std::map<Index, CVector<double>> diags;
  auto add = [&](const BandedOperator& x, C scale) {
    for (size_t k = 0; k < x.offsets.size(); ++k) {
      auto it = diags.find(x.offsets[k]);
      if (it == diags.end()) it = diags.emplace(x.offsets[k], CVector<double>::Zero(x.dim)).first;
      for (Index r = 0; r < x.dim; ++r) it->second(r) += scale * C(x.re(k, r), x.im(k, r));
    }
  };
  add(a, 1.0);
  add(b, s);
  return from_map(a.dim, diags);
}

CMatrix<double> dissipator(const CMatrix<double>& c, const CMatrix<double>& rho) {
  const CMatrix<double> cdc = c.adjoint() * c;
  return c * rho * c.adjoint() - 0.5 * (cdc * rho + rho * cdc);
}

CMatrix<double> lindblad_rhs(const CMatrix<double>& rho, const FockOperator& h,
                             const std::vector<Dissipator>& jumps) {
  const C i(0, 1);
  CMatrix<double> out = -i * (h.matrix * rho - rho * h.matrix);
  for (const auto& j : jumps)
    if (j.rate != 0.0) out += j.rate * dissipator(j.op.matrix, rho);
  return out;
}

LindbladGenerator::LindbladGenerator(const FockOperator& h, const std::vector<Dissipator>& jumps)
    : dim_(h.dim()) {
  const C i(0, 1);
  g_ = BandedOperator::from_dense((-i * h.matrix).eval());
  for (const auto& j : jumps) {
    if (j.rate < 0) throw InvalidArgument("dissipator rate must be >= 0");
    if (j.rate == 0.0) continue;
    require_same_layout<double>(h.layout, j.op.layout);
    BandedOperator c = BandedOperator::from_dense((std::sqrt(j.rate) * j.op.matrix).eval());
    g_ = axpy(g_, -0.5, multiply(c.adjoint(), c));
    jumps_.push_back(std::move(c));
  }
  stride_ = (dim_ + 15) / 16 * 16;
  Index bw = g_.bandwidth();
  for (const auto& j : jumps_) bw = std::max(bw, j.bandwidth());
  pad_ = (bw + 15) / 16 * 16 + 16;
  g_cols_ = columns(g_);
  for (const auto& j : jumps_) jump_cols_.push_back(columns(j));
}

LindbladGenerator::Columns LindbladGenerator::columns(const BandedOperator& op) const {
  Columns c;
  c.offsets = op.offsets;
  c.re.assign(op.offsets.size() * stride_, 0.0);
  c.im.assign(op.offsets.size() * stride_, 0.0);
  for (size_t k = 0; k < op.offsets.size(); ++k)
    for (Index i = 0; i < dim_; ++i) {
      c.re[k * stride_ + i] = op.re(k, i);
      c.im[k * stride_ + i] = op.im(k, i);
    }
  return c;
}

namespace {

// Denormal intermediates from far Fock tails stall the vector units; they are
// far below any tolerance here.
class FlushDenormals {
 public:
#if defined(__SSE__)
  FlushDenormals() : saved_(_mm_getcsr()) { _mm_setcsr(saved_ | 0x8040); }
  ~FlushDenormals() { _mm_setcsr(saved_); }

 private:
  unsigned saved_;
#endif
};

// Eight doubles; lowered to whatever vector width the target provides.
typedef double Pack __attribute__((vector_size(64)));
constexpr int kPack = 8;
constexpr int kRowBlock = 4;

inline Pack load(const double* p) {
  Pack v;
  std::memcpy(&v, p, sizeof v);
  return v;
}
inline void store(double* p, Pack v) { std::memcpy(p, &v, sizeof v); }

// out[c] = sum_q w_q * src_q[c] for c in [c0, c1).
void left_sum(int n, const double* const* sr, const double* const* si, const double* a, const double* b,
              double* __restrict orr, double* __restrict ori, Index c0, Index c1) {
  Index c = c0;
  for (; c + 2 * kPack <= c1; c += 2 * kPack) {
    Pack xr0{}, xi0{}, xr1{}, xi1{};
    for (int q = 0; q < n; ++q) {
      const Pack u0 = load(sr[q] + c), v0 = load(si[q] + c);
      const Pack u1 = load(sr[q] + c + kPack), v1 = load(si[q] + c + kPack);
      const double p = a[q], m = b[q];
      xr0 += p * u0 - m * v0;
      xi0 += p * v0 + m * u0;
      xr1 += p * u1 - m * v1;
      xi1 += p * v1 + m * u1;
    }
    store(orr + c, xr0);
    store(ori + c, xi0);
    store(orr + c + kPack, xr1);
    store(ori + c + kPack, xi1);
  }
  for (; c < c1; ++c) {
    double xr = 0.0, xi = 0.0;
    for (int q = 0; q < n; ++q) {
      xr += a[q] * sr[q][c] - b[q] * si[q][c];
      xi += a[q] * si[q][c] + b[q] * sr[q][c];
    }
    orr[c] = xr;
    ori[c] = xi;
  }
}

// out_i[c] += sum_k x_i[c + off_k] * conj(w_k[c]) for R rows i and c in
// [c0, c1), both multiples of 2 * kPack. Rows share each weight load. The x
// rows are padded so every offset read stays in bounds; weights vanish
// wherever c + off_k leaves the matrix.
template <int R>
void right_add(const std::vector<Index>& offsets, const double* wre, const double* wim, Index stride,
               const double* const* xr, const double* const* xi, double* const* orr, double* const* ori, Index c0,
               Index c1) {
  const int n = static_cast<int>(offsets.size());
  for (Index c = c0; c < c1; c += 2 * kPack) {
    Pack zr0[R], zi0[R], zr1[R], zi1[R];
    for (int i = 0; i < R; ++i) zr0[i] = zi0[i] = zr1[i] = zi1[i] = Pack{};
    for (int k = 0; k < n; ++k) {
      const Index o = offsets[k] + c;
      const double* wr = wre + k * stride + c;
      const double* wi = wim + k * stride + c;
      const Pack u0 = load(wr), v0 = load(wi), u1 = load(wr + kPack), v1 = load(wi + kPack);
      for (int i = 0; i < R; ++i) {
        const Pack x0 = load(xr[i] + o), y0 = load(xi[i] + o);
        const Pack x1 = load(xr[i] + o + kPack), y1 = load(xi[i] + o + kPack);
        zr0[i] += x0 * u0 + y0 * v0;
        zi0[i] += y0 * u0 - x0 * v0;
        zr1[i] += x1 * u1 + y1 * v1;
        zi1[i] += y1 * u1 - x1 * v1;
      }
    }
    for (int i = 0; i < R; ++i) {
      store(orr[i] + c, load(orr[i] + c) + zr0[i]);
      store(ori[i] + c, load(ori[i] + c) + zi0[i]);
      store(orr[i] + c + kPack, load(orr[i] + c + kPack) + zr1[i]);
      store(ori[i] + c + kPack, load(ori[i] + c + kPack) + zi1[i]);
    }
  }
}

// out[c] += s * y[c + off] * conj(w[c]) for c in [c0, c1): a one-diagonal jump
// c y c^dag with s = c(r, r + off) and y the row r + off.
void stencil_add(std::complex<double> s, Index off, const double* wr, const double* wi, const double* yr,
                 const double* yi, Index D, double* __restrict orr, double* __restrict ori, Index c0, Index c1) {
  c0 = std::max(c0, -off);
  c1 = std::min(c1, D - off);
  const double a = s.real(), b = s.imag();
  Index c = c0;
  for (; c + kPack <= c1; c += kPack) {
    const Pack x = load(yr + c + off), y = load(yi + c + off), u = load(wr + c), v = load(wi + c);
    const Pack tr = a * x - b * y, ti = a * y + b * x;
    store(orr + c, load(orr + c) + tr * u + ti * v);
    store(ori + c, load(ori + c) + ti * u - tr * v);
  }
  for (; c < c1; ++c) {
    const double tr = a * yr[c + off] - b * yi[c + off], ti = a * yi[c + off] + b * yr[c + off];
    orr[c] += tr * wr[c] + ti * wi[c];
    ori[c] += ti * wr[c] - tr * wi[c];
  }
}

// Collects the source rows of a left product for row r.
int gather_rows(const BandedOperator& op, Index r, Index D, const double* xr, const double* xi,
                const double** sr, const double** si, double* a, double* b) {
  int n = 0;
  for (size_t k = 0; k < op.offsets.size(); ++k) {
    const Index s = r + op.offsets[k];
    if (s < 0 || s >= D) continue;
    const double u = op.re(k, r), v = op.im(k, r);
    if (u == 0.0 && v == 0.0) continue;
    sr[n] = xr + s * D;
    si[n] = xi + s * D;
    a[n] = u;
    b[n] = v;
    ++n;
  }
  return n;
}

}  // namespace

Index LindbladGenerator::input_band() const {
  Index w = g_.bandwidth();
  for (const auto& j : jumps_) w = std::max(w, 2 * j.bandwidth());
  return w + 1;
}

void LindbladGenerator::apply(const SplitMatrix& rho, SplitMatrix& out) const {
  StageTarget t{&out, nullptr, 1.0};
  apply_combine(rho, std::span<const StageTarget>(&t, 1));
  mirror_full(out);
}

void LindbladGenerator::apply_combine(const SplitMatrix& y, std::span<const StageTarget> targets) const {
  const Index D = dim_, S = stride_, P = pad_;
  if (y.dim() != D) throw InvalidArgument("generator applied to a state of the wrong dimension");
  for (const auto& t : targets) {
    if (t.dst->dim() != D) *t.dst = SplitMatrix(D);
    if (t.dst == &y) throw InvalidArgument("generator output must not alias its input");
    if (t.src2 && !t.src) throw InvalidArgument("stage target with src2 needs src");
  }
  const FlushDenormals ftz;
  if (static_cast<Index>(acc_re_.size()) != D * S) {
    acc_re_.assign(D * S, 0.0);
    acc_im_.assign(D * S, 0.0);
    row_re_.assign(kRowBlock * (S + 2 * P), 0.0);
    row_im_.assign(kRowBlock * (S + 2 * P), 0.0);
    tmp_re_.assign(kRowBlock * (S + 2 * P), 0.0);
    tmp_im_.assign(kRowBlock * (S + 2 * P), 0.0);
  }
  const double* xr = y.re.data();
  const double* xi = y.im.data();
  double* kr = acc_re_.data();
  double* ki = acc_im_.data();
  size_t nmax = g_.offsets.size();
  for (const auto& j : jumps_) nmax = std::max(nmax, j.offsets.size());
  std::vector<const double*> sr(nmax + 1), si(nmax + 1);
  std::vector<double> a(nmax + 1), b(nmax + 1);
  const auto align = [](Index c) { return c / (2 * kPack) * (2 * kPack); };

  // G y on the upper triangle, in column tiles so the band of source rows stays
  // in cache. Rows start on a vector boundary; the extra entries below the
  // diagonal are never read.
  constexpr Index T = 256;
  for (Index c0 = 0; c0 < D; c0 += T) {
    const Index c1 = std::min(D, c0 + T);
    for (Index r = 0; r < c1; ++r) {
      const Index cb = std::max(align(r), c0);
      const int n = gather_rows(g_, r, D, xr, xi, sr.data(), si.data(), a.data(), b.data());
      left_sum(n, sr.data(), si.data(), a.data(), b.data(), kr + r * S, ki + r * S, cb, c1);
    }
  }

  const Index W = S + 2 * P;
  double* rowr = row_re_.data() + P;
  double* rowi = row_im_.data() + P;
  double* tpr = tmp_re_.data() + P;
  double* tpi = tmp_im_.data() + P;
  for (Index r0 = 0; r0 < D; r0 += kRowBlock) {
    const int nr = static_cast<int>(std::min<Index>(kRowBlock, D - r0));
    const Index cs = align(r0);
    const double* xrp[kRowBlock];
    const double* xip[kRowBlock];
    const double* trp[kRowBlock];
    const double* tip[kRowBlock];
    double* orp[kRowBlock];
    double* oip[kRowBlock];
    for (int i = 0; i < nr; ++i) {
      const Index r = r0 + i;
      orp[i] = kr + r * S;
      oip[i] = ki + r * S;
      for (Index c = D; c < S; ++c) orp[i][c] = oip[i][c] = 0.0;
      // Columns left of cs - P are never read for this block.
      const Index from = std::max<Index>(0, cs - P);
      std::memcpy(rowr + i * W + from, xr + r * D + from, (D - from) * sizeof(double));
      std::memcpy(rowi + i * W + from, xi + r * D + from, (D - from) * sizeof(double));
      xrp[i] = rowr + i * W;
      xip[i] = rowi + i * W;
      trp[i] = tpr + i * W;
      tip[i] = tpi + i * W;
    }
    const auto right = [&](const Columns& w, const double* const* x, const double* const* y) {
      if (nr == kRowBlock)
        right_add<kRowBlock>(w.offsets, w.re.data(), w.im.data(), S, x, y, orp, oip, cs, S);
      else
        for (int i = 0; i < nr; ++i)
          right_add<1>(w.offsets, w.re.data(), w.im.data(), S, x + i, y + i, orp + i, oip + i, cs, S);
    };
    // y G^dag
    right(g_cols_, xrp, xip);
    // c y c^dag
    for (size_t j = 0; j < jumps_.size(); ++j) {
      const BandedOperator& jc = jumps_[j];
      const Columns& cols = jump_cols_[j];
      if (jc.offsets.size() == 1) {
        const Index off = jc.offsets[0];
        for (int i = 0; i < nr; ++i) {
          const Index r = r0 + i, src = r + off;
          if (src < 0 || src >= D) continue;
          stencil_add({jc.re(0, r), jc.im(0, r)}, off, cols.re.data(), cols.im.data(), xr + src * D,
                      xi + src * D, D, orp[i], oip[i], r, D);
        }
        continue;
      }
      const Index lo = align(std::max<Index>(0, r0 - jc.bandwidth()));
      for (int i = 0; i < nr; ++i) {
        const int n = gather_rows(jc, r0 + i, D, xr, xi, sr.data(), si.data(), a.data(), b.data());
        left_sum(n, sr.data(), si.data(), a.data(), b.data(), tpr + i * W, tpi + i * W, lo, D);
      }
      right(cols, trp, tip);
    }
    for (int i = 0; i < nr; ++i) {
      const Index r = r0 + i;
      const double* orr = orp[i];
      const double* ori = oip[i];
      oip[i][r] = 0.0;
      for (const auto& t : targets) {
        double* __restrict dr = t.dst->re.data() + r * D;
        double* __restrict di = t.dst->im.data() + r * D;
        const double w = t.coef;
        if (t.src && t.src2) {
          const double* ar = t.src->re.data() + r * D;
          const double* ai = t.src->im.data() + r * D;
          const double* br = t.src2->re.data() + r * D;
          const double* bi = t.src2->im.data() + r * D;
          const double w2 = t.coef2;
#pragma omp simd
          for (Index c = r; c < D; ++c) {
            dr[c] = ar[c] + w2 * br[c] + w * orr[c];
            di[c] = ai[c] + w2 * bi[c] + w * ori[c];
          }
        } else if (t.src) {
          const double* ar = t.src->re.data() + r * D;
          const double* ai = t.src->im.data() + r * D;
#pragma omp simd
          for (Index c = r; c < D; ++c) {
            dr[c] = ar[c] + w * orr[c];
            di[c] = ai[c] + w * ori[c];
          }
        } else {
#pragma omp simd
          for (Index c = r; c < D; ++c) {
            dr[c] = w * orr[c];
            di[c] = w * ori[c];
          }
        }
      }
    }
  }
}

void mirror_full(SplitMatrix& m) { mirror_band(m, m.dim()); }

void mirror_band(SplitMatrix& m, Index width) {
  const Index D = m.dim();
  double* zr = m.re.data();
  double* zi = m.im.data();
  constexpr Index B = 64;
  for (Index bi = 0; bi < D; bi += B)
    for (Index bj = bi; bj < std::min(D, bi + width + B); bj += B) {
      const Index ie = std::min(D, bi + B), je = std::min(D, bj + B);
      for (Index c = bj; c < je; ++c)
        for (Index r = std::max(bi, c - width); r < std::min(ie, c); ++r) {
          zr[c * D + r] = zr[r * D + c];
          zi[c * D + r] = -zi[r * D + c];
        }
    }
  for (Index r = 0; r < D; ++r) zi[r * D + r] = 0.0;
}

double LindbladGenerator::spectral_radius(int iterations) const {
  const Index D = dim_;
  std::mt19937_64 rng(12345);
  std::normal_distribution<double> nd;
  SplitMatrix x(D), y(D);
  for (Index r = 0; r < D; ++r)
    for (Index c = r; c < D; ++c) {
      x.re(r, c) = x.re(c, r) = nd(rng);
      const double v = (c == r) ? 0.0 : nd(rng);
      x.im(r, c) = v;
      x.im(c, r) = -v;
    }
  auto fro = [](const SplitMatrix& m) { return std::sqrt(m.re.squaredNorm() + m.im.squaredNorm()); };
  double est = 0;
  for (int it = 0; it < iterations; ++it) {
    const double nx = fro(x);
    x.re /= nx;
    x.im /= nx;
    apply(x, y);
    est = fro(y);
    std::swap(x, y);
  }
  return est;
}

double LindbladGenerator::flops_per_apply() const {
  const double D = static_cast<double>(dim_);
  double diags = static_cast<double>(g_.diagonals());
  for (const auto& j : jumps_) diags += static_cast<double>(j.diagonals());
  // Each diagonal is touched by a left and a right pass over half the matrix,
  // four real multiply-adds per complex entry.
  return 8.0 * diags * D * D / 2.0 * 2.0;
}

}  // namespace cpe

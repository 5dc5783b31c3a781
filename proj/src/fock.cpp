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

#include "cpe/fock.hpp"

#include <sstream>

namespace cpe {

ModeLayout::ModeLayout(std::vector<int> dims, std::vector<ModeKind> kinds)
    : dims_(std::move(dims)), kinds_(std::move(kinds)) {
  if (dims_.empty()) throw InvalidArgument("layout needs at least one mode");
  for (int d : dims_)
    if (d < 1) throw InvalidArgument("Fock dimension must be >= 1");
  if (kinds_.empty()) kinds_.assign(dims_.size(), ModeKind::mechanical);
  if (kinds_.size() != dims_.size()) throw InvalidArgument("one mode kind per dimension required");
}

void ModeLayout::check_mode(int mode) const {
  if (mode < 0 || mode >= modes())
    throw InvalidArgument("mode index " + std::to_string(mode) + " out of range for " + describe());
}

int ModeLayout::dim(int mode) const {
  check_mode(mode);
  return dims_[mode];
}

ModeKind ModeLayout::kind(int mode) const {
  check_mode(mode);
  return kinds_[mode];
}

Index ModeLayout::size() const {
  Index n = 1;
  for (int d : dims_) n *= d;
  return dims_.empty() ? 0 : n;
}

Index ModeLayout::stride(int mode) const {
  check_mode(mode);
  Index s = 1;
  for (int m = mode + 1; m < modes(); ++m) s *= dims_[m];
  return s;
}

Index ModeLayout::flatten(const std::vector<int>& levels) const {
  if (static_cast<int>(levels.size()) != modes()) throw InvalidArgument("wrong number of levels");
  Index flat = 0;
  for (int m = 0; m < modes(); ++m) {
    if (levels[m] < 0 || levels[m] >= dims_[m])
      throw InvalidArgument("level " + std::to_string(levels[m]) + " outside mode " + std::to_string(m));
    flat = flat * dims_[m] + levels[m];
  }
  return flat;
}

std::vector<int> ModeLayout::unflatten(Index flat) const {
  std::vector<int> lv(dims_.size());
  for (int m = modes() - 1; m >= 0; --m) {
    lv[m] = static_cast<int>(flat % dims_[m]);
    flat /= dims_[m];
  }
  return lv;
}

ModeLayout ModeLayout::padded(int pad) const {
  std::vector<int> d = dims_;
  for (int& x : d) x += pad;
  return ModeLayout(d, kinds_);
}

std::vector<int> ModeLayout::modes_of(ModeKind kind) const {
  std::vector<int> out;
  for (int m = 0; m < modes(); ++m)
    if (kinds_[m] == kind) out.push_back(m);
  return out;
}

std::string ModeLayout::describe() const {
  std::ostringstream os;
  os << "(";
  for (int m = 0; m < modes(); ++m) {
    if (m) os << ", ";
    os << (kinds_[m] == ModeKind::cavity ? "cav:" : "mech:") << dims_[m];
  }
  os << ")";
  return os.str();
}

ModeLayout join(const ModeLayout& a, const ModeLayout& b) {
  std::vector<int> d = a.dims();
  std::vector<ModeKind> k = a.kinds();
  d.insert(d.end(), b.dims().begin(), b.dims().end());
  k.insert(k.end(), b.kinds().begin(), b.kinds().end());
  return ModeLayout(d, k);
}

std::vector<Index> embedding_indices(const ModeLayout& small, const ModeLayout& big) {
  if (small.modes() != big.modes()) throw InvalidArgument("projection needs equal mode counts");
  for (int m = 0; m < small.modes(); ++m)
    if (small.dim(m) > big.dim(m)) throw InvalidArgument("projection target is larger than source");
  std::vector<Index> idx(small.size());
  for (Index i = 0; i < small.size(); ++i) idx[i] = big.flatten(small.unflatten(i));
  return idx;
}

}  // namespace cpe

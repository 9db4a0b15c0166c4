// Copyright 2026 The clonegame Authors
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

#pragma once

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "clonegame/errors.hpp"

namespace clonegame {

struct Register {
  std::string label;
  std::size_t dim = 2;

  friend bool operator==(const Register &, const Register &) = default;
};

/// Ordered list of labeled registers. Basis indices are big-endian: the first
/// register is the most significant digit.
class RegisterLayout {
 public:
  RegisterLayout() = default;
  RegisterLayout(std::initializer_list<Register> regs) : regs_(regs) { validate(); }
  explicit RegisterLayout(std::vector<Register> regs) : regs_(std::move(regs)) { validate(); }

  /// Layout of qubit registers with the given labels.
  static RegisterLayout qubits(std::span<const std::string> labels) {
    std::vector<Register> regs;
    regs.reserve(labels.size());
    for (const auto &l : labels) regs.push_back({l, 2});
    return RegisterLayout(std::move(regs));
  }
  static RegisterLayout qubits(std::initializer_list<std::string> labels) {
    return qubits(std::span<const std::string>(labels.begin(), labels.size()));
  }

  std::size_t size() const { return regs_.size(); }
  bool empty() const { return regs_.empty(); }
  const Register &operator[](std::size_t i) const { return regs_[i]; }
  auto begin() const { return regs_.begin(); }
  auto end() const { return regs_.end(); }
  const std::vector<Register> &registers() const { return regs_; }

  /// Product of all register dimensions (1 for the empty layout).
  std::size_t dim() const {
    std::size_t d = 1;
    for (const auto &r : regs_) d *= r.dim;
    return d;
  }

  bool contains(const std::string &label) const {
    return std::any_of(regs_.begin(), regs_.end(), [&](const Register &r) { return r.label == label; });
  }

  std::size_t index_of(const std::string &label) const {
    for (std::size_t i = 0; i < regs_.size(); ++i)
      if (regs_[i].label == label) return i;
    throw LayoutError("unknown register label '" + label + "'");
  }

  std::size_t dim_of(const std::string &label) const { return regs_[index_of(label)].dim; }

  std::vector<std::string> labels() const {
    std::vector<std::string> out;
    out.reserve(regs_.size());
    for (const auto &r : regs_) out.push_back(r.label);
    return out;
  }

  /// This layout followed by `other`; labels must be disjoint.
  RegisterLayout concat(const RegisterLayout &other) const {
    std::vector<Register> regs = regs_;
    regs.insert(regs.end(), other.regs_.begin(), other.regs_.end());
    return RegisterLayout(std::move(regs));
  }

  /// The registers named in `labels`, kept in this layout's relative order.
  RegisterLayout subset(std::span<const std::string> labels) const {
    std::unordered_set<std::string> want(labels.begin(), labels.end());
    if (want.size() != labels.size()) throw LayoutError("duplicate label in register selection");
    for (const auto &l : labels) (void)index_of(l);
    std::vector<Register> regs;
    for (const auto &r : regs_)
      if (want.count(r.label) != 0) regs.push_back(r);
    return RegisterLayout(std::move(regs));
  }

  /// The registers not named in `labels`, in this layout's order.
  RegisterLayout without(std::span<const std::string> labels) const {
    std::unordered_set<std::string> drop(labels.begin(), labels.end());
    for (const auto &l : labels) (void)index_of(l);
    std::vector<Register> regs;
    for (const auto &r : regs_)
      if (drop.count(r.label) == 0) regs.push_back(r);
    return RegisterLayout(std::move(regs));
  }

  /// True when both layouts hold the same (label, dim) pairs in any order.
  bool same_registers(const RegisterLayout &other) const {
    if (other.size() != size()) return false;
    for (const auto &r : regs_) {
      if (!other.contains(r.label) || other.dim_of(r.label) != r.dim) return false;
    }
    return true;
  }

  friend bool operator==(const RegisterLayout &, const RegisterLayout &) = default;

 private:
  void validate() const {
    std::unordered_set<std::string> seen;
    for (const auto &r : regs_) {
      if (r.dim < 1) throw LayoutError("register '" + r.label + "' has dimension 0");
      if (!seen.insert(r.label).second) throw LayoutError("register label '" + r.label + "' collides");
    }
  }

  std::vector<Register> regs_;
};

/// For every basis index of a layout: its index inside a selected group of
/// registers (in the order the group was given) and its index inside the
/// remaining registers (in layout order).
struct IndexSplit {
  std::vector<std::size_t> selected;
  std::vector<std::size_t> rest;
  std::size_t selected_dim = 1;
  std::size_t rest_dim = 1;
};

inline IndexSplit split_indices(const RegisterLayout &layout, std::span<const std::string> group) {
  const std::size_t nreg = layout.size();
  std::vector<int> group_pos(nreg, -1);
  for (std::size_t g = 0; g < group.size(); ++g) {
    const std::size_t i = layout.index_of(group[g]);
    if (group_pos[i] >= 0) throw LayoutError("duplicate label '" + group[g] + "' in register group");
    group_pos[i] = static_cast<int>(g);
  }

  // Place value of each register inside its half of the split.
  std::vector<std::size_t> sel_stride(group.size(), 1);
  for (std::size_t g = group.size(); g-- > 1;) sel_stride[g - 1] = sel_stride[g] * layout[layout.index_of(group[g])].dim;
  std::vector<std::size_t> place(nreg, 0);
  std::size_t rest_stride = 1;
  IndexSplit out;
  for (std::size_t i = nreg; i-- > 0;) {
    if (group_pos[i] >= 0) {
      place[i] = sel_stride[static_cast<std::size_t>(group_pos[i])];
      out.selected_dim *= layout[i].dim;
    } else {
      place[i] = rest_stride;
      rest_stride *= layout[i].dim;
    }
  }
  out.rest_dim = rest_stride;

  const std::size_t total = layout.dim();
  out.selected.resize(total);
  out.rest.resize(total);
  std::vector<std::size_t> digits(nreg, 0);
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t s = 0, r = 0;
    for (std::size_t i = 0; i < nreg; ++i) {
      if (group_pos[i] >= 0)
        s += digits[i] * place[i];
      else
        r += digits[i] * place[i];
    }
    out.selected[idx] = s;
    out.rest[idx] = r;
    for (std::size_t i = nreg; i-- > 0;) {  // odometer increment, last register fastest
      if (++digits[i] < layout[i].dim) break;
      digits[i] = 0;
    }
  }
  return out;
}

}  // namespace clonegame

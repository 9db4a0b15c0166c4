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

#include <cstdint>
#include <random>

#include "clonegame/tensor_core.hpp"

namespace clonegame {

using Rng = std::mt19937_64;

inline constexpr std::uint64_t kDefaultSeed = 0xC10FE5EEDULL;

/// splitmix64 finalizer; gives independent streams per (seed, index).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline Rng make_rng(std::uint64_t seed, std::uint64_t index) { return Rng(derive_seed(seed, index)); }

inline Matrix ginibre(std::size_t rows, std::size_t cols, Rng &rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index c = 0; c < m.cols(); ++c)
    for (Eigen::Index r = 0; r < m.rows(); ++r) m(r, c) = cplx(g(rng), g(rng));
  return m;
}

/// Haar-distributed unitary (QR of a Ginibre matrix with the phase fix).
inline Matrix haar_unitary(std::size_t d, Rng &rng) {
  const Matrix z = ginibre(d, d, rng);
  Eigen::HouseholderQR<Matrix> qr(z);
  Matrix q = qr.householderQ() * Matrix::Identity(z.rows(), z.cols());
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index i = 0; i < q.cols(); ++i) {
    const cplx diag = r(i, i);
    const double a = std::abs(diag);
    if (a > 0.0) q.col(i) *= diag / a;
  }
  return q;
}

inline Operator haar_unitary(const RegisterLayout &layout, Rng &rng) {
  return Operator(layout, haar_unitary(layout.dim(), rng));
}

inline StateVector random_state(const RegisterLayout &layout, Rng &rng) {
  return StateVector::normalized(layout, ginibre(layout.dim(), 1, rng).col(0));
}

/// Induced-measure mixed state of the given rank.
inline Operator random_density(const RegisterLayout &layout, std::size_t rank, Rng &rng) {
  const Matrix g = ginibre(layout.dim(), rank, rng);
  Matrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return Operator(layout, (rho + rho.adjoint()) * 0.5);
}

}  // namespace clonegame

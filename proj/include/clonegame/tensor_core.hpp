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

// Dense complex linear algebra over labeled registers.
//
// Every Operator and StateVector carries a RegisterLayout; index arithmetic is
// big-endian (first register = most significant digit). Operations that mix
// two objects match registers by label, never by position.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "clonegame/errors.hpp"
#include "clonegame/registers.hpp"

namespace clonegame {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kStateTol = 1e-10;
inline constexpr double kUnitaryTol = 1e-10;

class StateVector;

/// Dense square matrix acting on a RegisterLayout.
class Operator {
 public:
  Operator() : Operator(RegisterLayout{}, Matrix::Ones(1, 1)) {}

  Operator(RegisterLayout layout, Matrix entries) : layout_(std::move(layout)), m_(std::move(entries)) {
    const std::size_t d = layout_.dim();
    check_dimension(d, "operator");
    if (static_cast<std::size_t>(m_.rows()) != d || static_cast<std::size_t>(m_.cols()) != d) {
      throw LayoutError("operator entries are " + std::to_string(m_.rows()) + "x" + std::to_string(m_.cols()) +
                        " but the layout has dimension " + std::to_string(d));
    }
  }

  static Operator identity(RegisterLayout layout) {
    const auto d = static_cast<Eigen::Index>(layout.dim());
    check_dimension(layout.dim(), "identity");
    return Operator(std::move(layout), Matrix::Identity(d, d));
  }

  static Operator zero(RegisterLayout layout) {
    const auto d = static_cast<Eigen::Index>(layout.dim());
    check_dimension(layout.dim(), "zero operator");
    return Operator(std::move(layout), Matrix::Zero(d, d));
  }

  /// |psi><psi|
  static Operator projector(const StateVector &psi);

  const RegisterLayout &layout() const { return layout_; }
  const Matrix &matrix() const { return m_; }
  std::size_t dim() const { return layout_.dim(); }
  cplx operator()(std::size_t r, std::size_t c) const {
    return m_(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
  }

  cplx trace() const { return m_.trace(); }
  Operator adjoint() const { return Operator(layout_, m_.adjoint()); }

  /// Largest entrywise |M - M^dagger| relative to max(1, max|M|).
  double hermitian_defect() const {
    if (m_.size() == 0) return 0.0;
    const double scale = std::max(1.0, m_.cwiseAbs().maxCoeff());
    return (m_ - m_.adjoint()).cwiseAbs().maxCoeff() / scale;
  }
  bool is_hermitian(double tol = kHermitianTol) const { return hermitian_defect() <= tol; }

  /// Hermitian, PSD (min eigenvalue >= -tol) and unit trace.
  bool is_state(double tol = kStateTol) const {
    if (!is_hermitian(std::max(tol, kHermitianTol))) return false;
    if (std::abs(trace() - cplx(1.0, 0.0)) > tol) return false;
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(), Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff() >= -tol;
  }

  bool is_unitary(double tol = kUnitaryTol) const {
    const auto d = static_cast<Eigen::Index>(dim());
    return ((m_.adjoint() * m_) - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() <= tol;
  }

  /// (M + M^dagger) / 2
  Matrix hermitian_part() const { return (m_ + m_.adjoint()) * 0.5; }

  Operator operator*(const Operator &rhs) const {
    require_same_layout(rhs, "product");
    return Operator(layout_, m_ * rhs.m_);
  }
  Operator operator+(const Operator &rhs) const {
    require_same_layout(rhs, "sum");
    return Operator(layout_, m_ + rhs.m_);
  }
  Operator operator-(const Operator &rhs) const {
    require_same_layout(rhs, "difference");
    return Operator(layout_, m_ - rhs.m_);
  }
  Operator &operator+=(const Operator &rhs) {
    require_same_layout(rhs, "sum");
    m_ += rhs.m_;
    return *this;
  }
  friend Operator operator*(cplx s, const Operator &op) { return Operator(op.layout_, s * op.m_); }
  friend Operator operator*(double s, const Operator &op) { return Operator(op.layout_, s * op.m_); }

 private:
  void require_same_layout(const Operator &rhs, const char *what) const {
    if (layout_ != rhs.layout_) throw LayoutError(std::string("operator ") + what + ": layouts differ");
  }

  RegisterLayout layout_;
  Matrix m_;
};

/// Pure state over a RegisterLayout; squared norm is 1 within kStateTol.
class StateVector {
 public:
  StateVector() : StateVector(RegisterLayout{}, Vector::Ones(1)) {}

  StateVector(RegisterLayout layout, Vector amplitudes) : layout_(std::move(layout)), v_(std::move(amplitudes)) {
    check_dimension(layout_.dim(), "state vector");
    if (static_cast<std::size_t>(v_.size()) != layout_.dim()) {
      throw LayoutError("state has " + std::to_string(v_.size()) + " amplitudes but the layout has dimension " +
                        std::to_string(layout_.dim()));
    }
    if (std::abs(v_.squaredNorm() - 1.0) > kStateTol) {
      throw ContractError("state vector is not normalized (squared norm " + std::to_string(v_.squaredNorm()) + ")");
    }
  }

  /// Scales `amplitudes` to unit norm first.
  static StateVector normalized(RegisterLayout layout, Vector amplitudes) {
    const double n = amplitudes.norm();
    if (n == 0.0) throw ContractError("cannot normalize the zero vector");
    return StateVector(std::move(layout), amplitudes / n);
  }

  static StateVector basis(RegisterLayout layout, std::size_t index) {
    Vector v = Vector::Zero(static_cast<Eigen::Index>(layout.dim()));
    if (index >= layout.dim()) throw ContractError("basis index out of range");
    v(static_cast<Eigen::Index>(index)) = 1.0;
    return StateVector(std::move(layout), std::move(v));
  }

  const RegisterLayout &layout() const { return layout_; }
  const Vector &amplitudes() const { return v_; }
  std::size_t dim() const { return layout_.dim(); }
  cplx operator[](std::size_t i) const { return v_(static_cast<Eigen::Index>(i)); }

  Operator density() const { return Operator::projector(*this); }

 private:
  RegisterLayout layout_;
  Vector v_;
};

inline Operator Operator::projector(const StateVector &psi) {
  return Operator(psi.layout(), psi.amplitudes() * psi.amplitudes().adjoint());
}

// ---------------------------------------------------------------------------
// Structural operations

/// a (x) b with layout a.layout ++ b.layout.
inline Operator kron(const Operator &a, const Operator &b) {
  RegisterLayout layout = a.layout().concat(b.layout());
  check_dimension(layout.dim(), "kron");
  const Matrix &x = a.matrix();
  const Matrix &y = b.matrix();
  Matrix out(x.rows() * y.rows(), x.cols() * y.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = 0; j < x.cols(); ++j) out.block(i * y.rows(), j * y.cols(), y.rows(), y.cols()) = x(i, j) * y;
  return Operator(std::move(layout), std::move(out));
}

inline StateVector kron(const StateVector &a, const StateVector &b) {
  RegisterLayout layout = a.layout().concat(b.layout());
  check_dimension(layout.dim(), "kron");
  const Vector &x = a.amplitudes();
  const Vector &y = b.amplitudes();
  Vector out(x.size() * y.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) out.segment(i * y.size(), y.size()) = x(i) * y;
  return StateVector(std::move(layout), std::move(out));
}

/// Trace out everything except `keep`; the result keeps the original order.
inline Operator partial_trace(const Operator &m, std::span<const std::string> keep) {
  RegisterLayout kept = m.layout().subset(keep);
  const auto labels = kept.labels();
  const IndexSplit split = split_indices(m.layout(), labels);
  std::vector<std::vector<std::size_t>> buckets(split.rest_dim);
  for (std::size_t i = 0; i < split.rest.size(); ++i) buckets[split.rest[i]].push_back(i);

  const auto d = static_cast<Eigen::Index>(split.selected_dim);
  Matrix out = Matrix::Zero(d, d);
  const Matrix &in = m.matrix();
  for (const auto &bucket : buckets)
    for (std::size_t a : bucket)
      for (std::size_t b : bucket)
        out(static_cast<Eigen::Index>(split.selected[a]), static_cast<Eigen::Index>(split.selected[b])) +=
            in(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
  return Operator(std::move(kept), std::move(out));
}

inline Operator partial_trace(const Operator &m, std::initializer_list<std::string> keep) {
  return partial_trace(m, std::span<const std::string>(keep.begin(), keep.size()));
}

/// Pads `m` with identities on the registers of `into` it does not mention and
/// reorders the basis so the result's layout is exactly `into`.
inline Operator embed(const Operator &m, const RegisterLayout &into) {
  for (const auto &r : m.layout()) {
    if (!into.contains(r.label)) throw LayoutError("embed: register '" + r.label + "' is absent from the target layout");
    if (into.dim_of(r.label) != r.dim) throw LayoutError("embed: register '" + r.label + "' changes dimension");
  }
  check_dimension(into.dim(), "embed");
  const IndexSplit split = split_indices(into, m.layout().labels());
  std::vector<std::vector<std::size_t>> buckets(split.rest_dim);
  for (std::size_t i = 0; i < split.rest.size(); ++i) buckets[split.rest[i]].push_back(i);

  const auto d = static_cast<Eigen::Index>(into.dim());
  Matrix out = Matrix::Zero(d, d);
  const Matrix &in = m.matrix();
  for (const auto &bucket : buckets)
    for (std::size_t a : bucket)
      for (std::size_t b : bucket)
        out(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
            in(static_cast<Eigen::Index>(split.selected[a]), static_cast<Eigen::Index>(split.selected[b]));
  return Operator(into, std::move(out));
}

/// Reorders the registers of `psi` to match `into` (same label set).
inline StateVector permute(const StateVector &psi, const RegisterLayout &into) {
  if (!psi.layout().same_registers(into)) throw LayoutError("permute: register sets differ");
  const IndexSplit split = split_indices(into, psi.layout().labels());
  Vector out(static_cast<Eigen::Index>(into.dim()));
  for (std::size_t i = 0; i < split.selected.size(); ++i)
    out(static_cast<Eigen::Index>(i)) = psi[split.selected[i]];
  return StateVector(into, std::move(out));
}

inline Operator permute(const Operator &m, const RegisterLayout &into) {
  if (!m.layout().same_registers(into)) throw LayoutError("permute: register sets differ");
  return embed(m, into);
}

/// Renames registers; labels missing from `names` are kept.
inline RegisterLayout relabel(const RegisterLayout &layout, const std::map<std::string, std::string> &names) {
  std::vector<Register> regs;
  for (const auto &r : layout) {
    auto it = names.find(r.label);
    regs.push_back({it == names.end() ? r.label : it->second, r.dim});
  }
  return RegisterLayout(std::move(regs));
}
inline Operator relabel(const Operator &m, const std::map<std::string, std::string> &names) {
  return Operator(relabel(m.layout(), names), m.matrix());
}
inline StateVector relabel(const StateVector &v, const std::map<std::string, std::string> &names) {
  return StateVector(relabel(v.layout(), names), v.amplitudes());
}

// ---------------------------------------------------------------------------
// Vector views and local action

/// Amplitudes of `psi` arranged as a (group x rest) matrix.
inline Matrix as_bipartite(const Vector &amps, const IndexSplit &split) {
  Matrix out(static_cast<Eigen::Index>(split.selected_dim), static_cast<Eigen::Index>(split.rest_dim));
  for (std::size_t i = 0; i < split.selected.size(); ++i)
    out(static_cast<Eigen::Index>(split.selected[i]), static_cast<Eigen::Index>(split.rest[i])) =
        amps(static_cast<Eigen::Index>(i));
  return out;
}

inline Vector from_bipartite(const Matrix &m, const IndexSplit &split) {
  Vector out(static_cast<Eigen::Index>(split.selected.size()));
  for (std::size_t i = 0; i < split.selected.size(); ++i)
    out(static_cast<Eigen::Index>(i)) =
        m(static_cast<Eigen::Index>(split.selected[i]), static_cast<Eigen::Index>(split.rest[i]));
  return out;
}

/// op|psi> where `op` acts on a subset of psi's registers. Not renormalized.
inline Vector apply_local(const Vector &amps, const RegisterLayout &layout, const Operator &op) {
  for (const auto &r : op.layout())
    if (layout.dim_of(r.label) != r.dim) throw LayoutError("apply: register '" + r.label + "' changes dimension");
  const IndexSplit split = split_indices(layout, op.layout().labels());
  return from_bipartite(op.matrix() * as_bipartite(amps, split), split);
}

/// (op (x) I) * m, column by column, with op on a subset of m's registers.
inline Operator left_multiply(const Operator &op, const Operator &m) {
  for (const auto &r : op.layout())
    if (m.layout().dim_of(r.label) != r.dim) throw LayoutError("apply: register '" + r.label + "' changes dimension");
  const IndexSplit split = split_indices(m.layout(), op.layout().labels());
  const auto sd = static_cast<Eigen::Index>(split.selected_dim);
  const auto rd = static_cast<Eigen::Index>(split.rest_dim);
  const Matrix &in = m.matrix();
  Matrix t(sd, rd * in.cols());
  for (Eigen::Index c = 0; c < in.cols(); ++c)
    for (std::size_t i = 0; i < split.selected.size(); ++i)
      t(static_cast<Eigen::Index>(split.selected[i]), static_cast<Eigen::Index>(split.rest[i]) + rd * c) =
          in(static_cast<Eigen::Index>(i), c);
  t = op.matrix() * t;
  Matrix out(in.rows(), in.cols());
  for (Eigen::Index c = 0; c < in.cols(); ++c)
    for (std::size_t i = 0; i < split.selected.size(); ++i)
      out(static_cast<Eigen::Index>(i), c) =
          t(static_cast<Eigen::Index>(split.selected[i]), static_cast<Eigen::Index>(split.rest[i]) + rd * c);
  return Operator(m.layout(), std::move(out));
}

/// u m u^dagger for u on a subset of m's registers.
inline Operator conjugate(const Operator &m, const Operator &u) {
  return left_multiply(u, left_multiply(u, m).adjoint()).adjoint();
}

/// Tr[a b] without forming the product.
inline cplx trace_product(const Operator &a, const Operator &b) {
  if (a.layout() != b.layout()) throw LayoutError("trace_product: layouts differ");
  return a.matrix().cwiseProduct(b.matrix().transpose()).sum();
}

/// U|psi> for a unitary U on a subset of registers.
inline StateVector apply_unitary(const StateVector &psi, const Operator &u) {
  return StateVector(psi.layout(), apply_local(psi.amplitudes(), psi.layout(), u));
}

/// <psi| op |psi> for `op` on a subset of psi's registers.
inline cplx expectation(const StateVector &psi, const Operator &op) {
  return psi.amplitudes().dot(apply_local(psi.amplitudes(), psi.layout(), op));
}

/// Outcome of a projective measurement of some registers.
struct Measurement {
  std::size_t outcome = 0;
  double probability = 0.0;
  StateVector remainder;  ///< post-measurement state of the unmeasured registers
};

/// Outcome probabilities for measuring `labels` in the orthonormal basis given
/// by the columns of `basis`.
inline std::vector<double> outcome_probabilities(const StateVector &psi, std::span<const std::string> labels,
                                                 const Matrix &basis) {
  const IndexSplit split = split_indices(psi.layout(), labels);
  if (static_cast<std::size_t>(basis.rows()) != split.selected_dim)
    throw LayoutError("measurement basis dimension does not match the measured registers");
  const Matrix coeffs = basis.adjoint() * as_bipartite(psi.amplitudes(), split);
  std::vector<double> p(static_cast<std::size_t>(coeffs.rows()));
  for (Eigen::Index k = 0; k < coeffs.rows(); ++k) p[static_cast<std::size_t>(k)] = coeffs.row(k).squaredNorm();
  return p;
}

/// Samples a projective measurement and discards the measured registers.
template <class Rng>
Measurement measure(const StateVector &psi, std::span<const std::string> labels, const Matrix &basis, Rng &rng) {
  const IndexSplit split = split_indices(psi.layout(), labels);
  if (static_cast<std::size_t>(basis.rows()) != split.selected_dim)
    throw LayoutError("measurement basis dimension does not match the measured registers");
  const Matrix coeffs = basis.adjoint() * as_bipartite(psi.amplitudes(), split);

  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const double u = uni(rng);
  double acc = 0.0;
  Eigen::Index pick = coeffs.rows() - 1;
  for (Eigen::Index k = 0; k < coeffs.rows(); ++k) {
    acc += coeffs.row(k).squaredNorm();
    if (u < acc) {
      pick = k;
      break;
    }
  }
  // Guard against landing on a zero-probability tail from rounding.
  while (pick > 0 && coeffs.row(pick).squaredNorm() == 0.0) --pick;

  Measurement out;
  out.outcome = static_cast<std::size_t>(pick);
  out.probability = coeffs.row(pick).squaredNorm();
  out.remainder = StateVector::normalized(psi.layout().without(labels), coeffs.row(pick).transpose());
  return out;
}

// ---------------------------------------------------------------------------
// Spectra and norms

struct Eigensystem {
  Eigen::VectorXd values;  ///< ascending
  Matrix vectors;          ///< columns, matching `values`
};

inline void require_hermitian(const Operator &m, const char *what) {
  if (!m.is_hermitian())
    throw ContractError(std::string(what) + ": operator is not Hermitian (defect " +
                        std::to_string(m.hermitian_defect()) + ")");
}

inline Eigensystem eigh(const Operator &m) {
  require_hermitian(m, "eigh");
  Eigen::SelfAdjointEigenSolver<Matrix> es(m.hermitian_part());
  if (es.info() != Eigen::Success) throw Error("eigh: eigensolver failed to converge");
  return {es.eigenvalues(), es.eigenvectors()};
}

/// Schatten-infinity norm of a Hermitian operator (largest |eigenvalue|).
inline double op_norm(const Operator &m) {
  require_hermitian(m, "op_norm");
  Eigen::SelfAdjointEigenSolver<Matrix> es(m.hermitian_part(), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw Error("op_norm: eigensolver failed to converge");
  return std::max(std::abs(es.eigenvalues().minCoeff()), std::abs(es.eigenvalues().maxCoeff()));
}

/// ||a b||_inf, via sqrt(op_norm((ab)^dagger (ab))).
inline double prod_norm(const Operator &a, const Operator &b) {
  if (a.layout() != b.layout()) {
    if (a.dim() != b.dim() || !a.layout().same_registers(b.layout()))
      throw LayoutError("prod_norm: operators act on different spaces");
    return prod_norm(a, permute(b, a.layout()));
  }
  const Matrix c = a.matrix() * b.matrix();
  const Operator gram(a.layout(), c.adjoint() * c);
  return std::sqrt(std::max(0.0, op_norm(gram)));
}

// ---------------------------------------------------------------------------
// Common states

/// (|00> + |11>)/sqrt(2) on two qubit registers.
inline StateVector epr_pair(const std::string &first, const std::string &second) {
  Vector v = Vector::Zero(4);
  v(0) = v(3) = 1.0 / std::sqrt(2.0);
  return StateVector(RegisterLayout::qubits({first, second}), std::move(v));
}

/// Columns are |Phi+>, |Phi->, |Psi+>, |Psi-> in the big-endian two-qubit basis.
/// Column index = 2a + b for the outcome pair (a, b); (0, 0) is |Phi+>.
inline Matrix bell_basis() {
  const double s = 1.0 / std::sqrt(2.0);
  Matrix b = Matrix::Zero(4, 4);
  b(0, 0) = s, b(3, 0) = s;    // Phi+
  b(0, 1) = s, b(3, 1) = -s;   // Phi-
  b(1, 2) = s, b(2, 2) = s;    // Psi+
  b(1, 3) = s, b(2, 3) = -s;   // Psi-
  return b;
}

namespace gates {
inline Matrix I2() { return Matrix::Identity(2, 2); }
inline Matrix X() {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 1) = m(1, 0) = 1.0;
  return m;
}
inline Matrix Z() {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = 1.0;
  m(1, 1) = -1.0;
  return m;
}
inline Operator on(const std::string &label, const Matrix &m) {
  return Operator(RegisterLayout{{label, static_cast<std::size_t>(m.rows())}}, m);
}
}  // namespace gates

}  // namespace clonegame

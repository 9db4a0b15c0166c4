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

// Alternating ascent for games of the form
//
//   max over psi, {U^x_i}:  (1/Q) sum_x || Pi_x (U^x_1 (x) ... (x) U^x_p) |psi> ||^2
//
// State step: psi <- top eigenvector of (1/Q) sum_x U^x^dagger Pi_x U^x,
// found with matrix-free Krylov iterations warm-started at the current psi.
// Response step (per question, per party): with phi = Pi_x w / ||Pi_x w||,
// maximize |<phi| U_i |w_{-i}>| = |Tr[U_i K]| over unitaries; the maximizer is
// the polar factor of K^dagger. Neither step can lower the objective.

#pragma once

#include <string>
#include <vector>

#include "clonegame/cloning_game.hpp"
#include "clonegame/random.hpp"
#include "clonegame/tensor_core.hpp"

namespace clonegame {

struct SeesawProblem {
  RegisterLayout layout;
  std::vector<Operator> projectors;               ///< one per question, on a subset of `layout`
  std::vector<std::vector<std::string>> parties;  ///< registers each party acts on
};

struct SeesawResult {
  double value = 0.0;
  std::vector<double> history;  ///< objective after each state step
  int iterations = 0;
  bool converged = false;
  StateVector state;
  std::vector<std::vector<Operator>> responses;  ///< [question][party]
};

/// Unitary U maximizing Re Tr[U K].
inline Matrix polar_maximizer(const Matrix &k) {
  Eigen::JacobiSVD<Matrix> svd(k, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixV() * svd.matrixU().adjoint();
}

namespace detail {

/// Top eigenvector of a PSD operator given only products, by restarted
/// Rayleigh-Ritz on Krylov spaces seeded with `start`. The Ritz value never
/// drops below start's Rayleigh quotient.
template <class MatVec>
Vector krylov_top_eigenvector(const MatVec &w_times, Vector start, int block = 24, int restarts = 60,
                              double residual_tol = 1e-12) {
  const Eigen::Index d = start.size();
  const Eigen::Index m = std::min<Eigen::Index>(block, d);
  start.normalize();
  for (int r = 0; r < restarts; ++r) {
    Matrix q(d, m), wq(d, m);
    Eigen::Index used = 0;
    Vector next = start;
    for (Eigen::Index j = 0; j < m; ++j) {
      for (int pass = 0; pass < 2; ++pass)
        for (Eigen::Index c = 0; c < used; ++c) next -= q.col(c) * q.col(c).dot(next);
      const double nn = next.norm();
      if (nn < 1e-13) break;
      q.col(j) = next / nn;
      wq.col(j) = w_times(Vector(q.col(j)));
      ++used;
      next = wq.col(j);
    }
    const Matrix h = q.leftCols(used).adjoint() * wq.leftCols(used);
    Eigen::SelfAdjointEigenSolver<Matrix> es((h + h.adjoint()) * 0.5);
    const Vector y = es.eigenvectors().col(used - 1);
    start = q.leftCols(used) * y;
    start.normalize();
    const double theta = es.eigenvalues()(used - 1);
    if ((w_times(start) - theta * start).norm() < residual_tol || used < m) break;
  }
  return start;
}

}  // namespace detail

inline SeesawResult seesaw(const SeesawProblem &prob, int max_iters, double tol, Rng &rng) {
  if (max_iters < 1) throw ContractError("see-saw needs at least one iteration");
  if (!(tol > 0.0)) throw ContractError("see-saw tolerance must be positive");
  if (prob.projectors.empty()) throw ContractError("see-saw needs at least one question");
  check_dimension(prob.layout.dim(), "see-saw");
  for (const auto &p : prob.projectors)
    for (const auto &r : p.layout())
      if (!prob.layout.contains(r.label) || prob.layout.dim_of(r.label) != r.dim)
        throw LayoutError("see-saw projector acts on register '" + r.label + "' outside the problem layout");

  const std::size_t nq = prob.projectors.size();
  const std::size_t np = prob.parties.size();
  std::vector<IndexSplit> splits;
  std::vector<RegisterLayout> party_layouts;
  for (const auto &regs : prob.parties) {
    party_layouts.push_back(prob.layout.subset(regs));
    splits.push_back(split_indices(prob.layout, party_layouts.back().labels()));
  }
  std::vector<IndexSplit> proj_splits;
  for (const auto &p : prob.projectors) proj_splits.push_back(split_indices(prob.layout, p.layout().labels()));

  SeesawResult res;
  res.responses.assign(nq, {});
  for (std::size_t x = 0; x < nq; ++x)
    for (std::size_t i = 0; i < np; ++i) res.responses[x].push_back(haar_unitary(party_layouts[i], rng));

  const double weight = 1.0 / static_cast<double>(nq);
  // Splits computed once; every product below is local.
  auto apply = [&](const Vector &v, std::size_t i, const Matrix &u) {
    return from_bipartite(u * as_bipartite(v, splits[i]), splits[i]);
  };
  auto project = [&](const Vector &v, std::size_t x) {
    return from_bipartite(prob.projectors[x].matrix() * as_bipartite(v, proj_splits[x]), proj_splits[x]);
  };
  auto w_times = [&](const Vector &v) {
    Vector acc = Vector::Zero(v.size());
    for (std::size_t x = 0; x < nq; ++x) {
      Vector t = v;
      for (std::size_t i = 0; i < np; ++i) t = apply(t, i, res.responses[x][i].matrix());
      t = project(t, x);
      for (std::size_t i = np; i-- > 0;) t = apply(t, i, res.responses[x][i].matrix().adjoint());
      acc += t;
    }
    return Vector(acc * weight);
  };

  Vector v = random_state(prob.layout, rng).amplitudes();
  double prev = -1.0;
  for (int it = 0; it < max_iters; ++it) {
    v = detail::krylov_top_eigenvector(w_times, v);
    res.state = StateVector::normalized(prob.layout, v);
    res.value = res.state.amplitudes().dot(w_times(res.state.amplitudes())).real();
    res.history.push_back(res.value);
    res.iterations = it + 1;
    if (it > 0 && res.value - prev < tol) {
      res.converged = true;
      break;
    }
    prev = res.value;

    for (std::size_t x = 0; x < nq; ++x) {
      for (std::size_t i = 0; i < np; ++i) {
        // Everyone but party i responds.
        Vector rest = res.state.amplitudes();
        for (std::size_t j = 0; j < np; ++j)
          if (j != i) rest = apply(rest, j, res.responses[x][j].matrix());
        const Vector full = apply(rest, i, res.responses[x][i].matrix());
        Vector phi = project(full, x);
        const double n = phi.norm();
        if (n < 1e-14) continue;
        phi /= n;
        const Matrix k = as_bipartite(rest, splits[i]) * as_bipartite(phi, splits[i]).adjoint();
        res.responses[x][i] = Operator(party_layouts[i], polar_maximizer(k));
      }
    }
  }
  return res;
}

/// See-saw problem for a single-round k-party cloning game with per-party
/// ancillas of the given dimensions.
inline SeesawProblem cloning_seesaw_problem(const GameSpec &spec, std::span<const std::size_t> ancilla_dims) {
  SeesawProblem p;
  p.layout = spec.strategy_layout(ancilla_dims);
  for (int x = 0; x < spec.k(); ++x) p.projectors.push_back(spec.target_projector(x));
  for (int i = 0; i < spec.k(); ++i) p.parties.push_back({party_label(i), ancilla_label(i)});
  return p;
}

}  // namespace clonegame

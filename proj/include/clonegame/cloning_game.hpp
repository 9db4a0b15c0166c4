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

// The k-party cloning game: a referee R announces x in [k] and party P_x must
// end up holding the target state |Psi>_{R P_x} together with the referee.
//
// Layouts used throughout:
//   game      [R, P0, ..., P{k-1}]
//   strategy  [R, P0, E0, ..., P{k-1}, E{k-1}]   (E_i optional ancillas)

#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "clonegame/random.hpp"
#include "clonegame/tensor_core.hpp"

namespace clonegame {

inline std::string party_label(int i) { return "P" + std::to_string(i); }
inline std::string ancilla_label(int i) { return "E" + std::to_string(i); }

/// Which cloning game is being played: k parties, a target state on
/// [referee, party] and the uniform question distribution.
class GameSpec {
 public:
  GameSpec(int k, StateVector target) : k_(k), target_(std::move(target)) {
    if (k_ < 1) throw ContractError("the number of parties k must be at least 1");
    if (target_.layout().size() != 2)
      throw ContractError("the target state must live on exactly two registers [referee, party]");
  }

  /// Only the uniform prior is supported; anything else is rejected.
  GameSpec(int k, StateVector target, std::span<const double> prior) : GameSpec(k, std::move(target)) {
    if (prior.size() != static_cast<std::size_t>(k_)) throw ContractError("question prior must have k entries");
    for (double p : prior)
      if (std::abs(p - 1.0 / k_) > 1e-12) throw ContractError("only the uniform question distribution is supported");
  }

  static GameSpec epr(int k) { return GameSpec(k, epr_pair("R", "P")); }

  int k() const { return k_; }
  const StateVector &target() const { return target_; }
  std::size_t referee_dim() const { return target_.layout()[0].dim; }
  std::size_t party_dim() const { return target_.layout()[1].dim; }

  RegisterLayout game_layout() const {
    std::vector<Register> regs{{"R", referee_dim()}};
    for (int i = 0; i < k_; ++i) regs.push_back({party_label(i), party_dim()});
    return RegisterLayout(std::move(regs));
  }

  /// [R, P0, E0, ...]; an ancilla of dimension 1 is still listed.
  RegisterLayout strategy_layout(std::span<const std::size_t> ancilla_dims) const {
    if (ancilla_dims.size() != static_cast<std::size_t>(k_)) throw ContractError("need one ancilla dimension per party");
    std::vector<Register> regs{{"R", referee_dim()}};
    for (int i = 0; i < k_; ++i) {
      regs.push_back({party_label(i), party_dim()});
      regs.push_back({ancilla_label(i), ancilla_dims[static_cast<std::size_t>(i)]});
    }
    return RegisterLayout(std::move(regs));
  }

  /// |Psi><Psi| on [R, P_x].
  Operator target_projector(int x) const {
    const auto &l = target_.layout();
    return relabel(target_.density(), {{l[0].label, "R"}, {l[1].label, party_label(x)}});
  }

 private:
  int k_;
  StateVector target_;
};

/// Shared state plus, per question x, one local unitary per party acting on
/// that party's registers {P_i, E_i}. A missing question means identity
/// responses.
struct Strategy {
  Operator shared_state;
  std::map<int, std::vector<Operator>> responses;
};

struct GameValueReport {
  double value = 0.0;
  double operator_norm = 0.0;
  std::size_t top_multiplicity = 1;
  StateVector witness;
};

/// |Psi><Psi|_{R P_x} (x) I on the game layout.
inline Operator game_projector(const GameSpec &spec, int x) {
  if (x < 0 || x >= spec.k()) throw ContractError("question x=" + std::to_string(x) + " is out of range");
  return embed(spec.target_projector(x), spec.game_layout());
}

/// Sum over x of the game projectors.
inline Operator game_operator(const GameSpec &spec) {
  Operator sum = Operator::zero(spec.game_layout());
  for (int x = 0; x < spec.k(); ++x) sum += game_projector(spec, x);
  return sum;
}

/// Normalized vector in the top eigenspace of a Hermitian operator. Ties are
/// broken by projecting a fixed pseudo-random vector onto the eigenspace, so
/// the answer does not depend on the solver's choice of degenerate basis.
inline StateVector top_eigenvector(const Operator &m, std::size_t *multiplicity = nullptr) {
  const Eigensystem es = eigh(m);
  const Eigen::Index n = es.values.size();
  const double top = es.values(n - 1);
  const double tol = 1e-9 * std::max(1.0, std::abs(top));
  Eigen::Index first = n - 1;
  while (first > 0 && top - es.values(first - 1) <= tol) --first;
  if (multiplicity != nullptr) *multiplicity = static_cast<std::size_t>(n - first);

  const Matrix span_vecs = es.vectors.rightCols(n - first);
  Rng rng(kDefaultSeed);
  const Vector seed = ginibre(m.dim(), 1, rng).col(0);
  Vector v = span_vecs * (span_vecs.adjoint() * seed);
  if (v.norm() < 1e-8) v = es.vectors.col(n - 1);
  // Fix the global phase: largest-magnitude amplitude made real positive.
  Eigen::Index arg = 0;
  v.cwiseAbs().maxCoeff(&arg);
  v *= std::conj(v(arg)) / std::abs(v(arg));
  return StateVector::normalized(m.layout(), v);
}

/// Optimal value (1/k) || sum_x |Psi><Psi|_{R P_x} (x) I ||.
inline GameValueReport game_value(const GameSpec &spec) {
  check_dimension(spec.game_layout().dim(), "game operator");
  const Operator h = game_operator(spec);
  GameValueReport rep;
  rep.operator_norm = op_norm(h);
  rep.value = rep.operator_norm / spec.k();
  rep.witness = top_eigenvector(h, &rep.top_multiplicity);
  return rep;
}

/// sqrt(2/(k(k+1))) * sum_x |Phi+>_{R P_x} |0...0>_rest.
inline StateVector optimal_state(int k) {
  if (k < 1) throw ContractError("k must be at least 1");
  const RegisterLayout layout = GameSpec::epr(k).game_layout();
  check_dimension(layout.dim(), "optimal state");
  Vector v = Vector::Zero(static_cast<Eigen::Index>(layout.dim()));
  const double norm = std::sqrt(2.0 / (static_cast<double>(k) * (k + 1)));
  const double s = 1.0 / std::sqrt(2.0);
  const std::size_t r_bit = std::size_t{1} << k;
  for (int x = 0; x < k; ++x) {
    const std::size_t px_bit = std::size_t{1} << (k - 1 - x);
    v(0) += norm * s;
    v(static_cast<Eigen::Index>(r_bit | px_bit)) += norm * s;
  }
  return StateVector(layout, std::move(v));
}

enum class NamedState { ghz, w, guess, all_zero, optimal };

inline std::optional<NamedState> parse_named_state(const std::string &name) {
  if (name == "ghz") return NamedState::ghz;
  if (name == "w") return NamedState::w;
  if (name == "guess") return NamedState::guess;
  if (name == "all_zero" || name == "all-zero") return NamedState::all_zero;
  if (name == "optimal") return NamedState::optimal;
  return std::nullopt;
}

/// Reference states on [R, P0, ..., P{k-1}].
inline StateVector named_state(NamedState name, int k) {
  if (k < 1) throw ContractError("k must be at least 1");
  const RegisterLayout layout = GameSpec::epr(k).game_layout();
  check_dimension(layout.dim(), "named state");
  const auto d = static_cast<Eigen::Index>(layout.dim());
  Vector v = Vector::Zero(d);
  switch (name) {
    case NamedState::ghz:
      if (k != 2) throw ContractError("the GHZ reference state is defined for k=2 only");
      v(0) = v(7) = 1.0 / std::sqrt(2.0);
      break;
    case NamedState::w:
      if (k != 2) throw ContractError("the W reference state is defined for k=2 only");
      v(1) = v(2) = v(4) = 1.0 / std::sqrt(3.0);
      break;
    case NamedState::guess: {
      // |Phi+>_{R P0} |0...0>
      v(0) = 1.0 / std::sqrt(2.0);
      v(static_cast<Eigen::Index>((std::size_t{1} << k) | (std::size_t{1} << (k - 1)))) = 1.0 / std::sqrt(2.0);
      break;
    }
    case NamedState::all_zero:
      v(0) = 1.0;
      break;
    case NamedState::optimal:
      return optimal_state(k);
  }
  return StateVector(layout, std::move(v));
}

namespace detail {

/// Registers {P_i[, E_i]} owned by party i inside `layout`.
inline std::vector<std::string> party_registers(const RegisterLayout &layout, int i) {
  std::vector<std::string> regs{party_label(i)};
  if (layout.contains(ancilla_label(i))) regs.push_back(ancilla_label(i));
  return regs;
}

/// Checks the strategy layout against the spec and returns it reordered to
/// [R, P0, (E0), P1, (E1), ...].
inline RegisterLayout canonical_strategy_layout(const GameSpec &spec, const RegisterLayout &given) {
  std::vector<Register> regs{{"R", spec.referee_dim()}};
  for (int i = 0; i < spec.k(); ++i) {
    regs.push_back({party_label(i), spec.party_dim()});
    if (given.contains(ancilla_label(i))) regs.push_back({ancilla_label(i), given.dim_of(ancilla_label(i))});
  }
  RegisterLayout canon(std::move(regs));
  if (!given.same_registers(canon))
    throw LayoutError("strategy layout must consist of R, P_i (dim " + std::to_string(spec.party_dim()) +
                      ") and optional ancillas E_i for i < " + std::to_string(spec.k()));
  return canon;
}

}  // namespace detail

namespace detail {

inline void check_responses(const RegisterLayout &layout, const std::vector<Operator> &per_party,
                            const std::vector<std::vector<std::string>> &owned) {
  if (per_party.size() != owned.size()) throw ContractError("need exactly one response unitary per party");
  for (std::size_t i = 0; i < per_party.size(); ++i) {
    if (!per_party[i].layout().same_registers(layout.subset(owned[i])))
      throw LayoutError("response of party " + std::to_string(i) + " must act on exactly its own registers");
    if (!per_party[i].is_unitary()) throw ContractError("response of party " + std::to_string(i) + " is not unitary");
  }
}

}  // namespace detail

/// Full-space unitary applying each party's response for one question.
inline Operator joint_response(const RegisterLayout &layout, const std::vector<Operator> &per_party,
                               const std::vector<std::vector<std::string>> &owned) {
  detail::check_responses(layout, per_party, owned);
  Operator u = Operator::identity(layout);
  for (const auto &r : per_party) u = left_multiply(r, u);
  return u;
}

/// Winning probability of a strategy:
/// (1/k) sum_x Tr[ |Psi><Psi|_{R P_x} tr_{rest}( U^x rho U^x^dagger ) ].
inline double evaluate_strategy(const GameSpec &spec, const Strategy &s) {
  const RegisterLayout layout = detail::canonical_strategy_layout(spec, s.shared_state.layout());
  const Operator rho = permute(s.shared_state, layout);
  if (!rho.is_state()) throw ContractError("shared state is not a valid density operator");
  for (const auto &[x, resp] : s.responses)
    if (x < 0 || x >= spec.k()) throw ContractError("response keyed by out-of-range question " + std::to_string(x));

  std::vector<std::vector<std::string>> owned;
  for (int i = 0; i < spec.k(); ++i) owned.push_back(detail::party_registers(layout, i));
  for (const auto &[x, resp] : s.responses) detail::check_responses(layout, resp, owned);

  double total = 0.0;
  for (int x = 0; x < spec.k(); ++x) {
    Operator sigma = rho;
    if (auto it = s.responses.find(x); it != s.responses.end())
      for (const auto &r : it->second) sigma = conjugate(sigma, r);
    const std::vector<std::string> keep{"R", party_label(x)};
    const Operator reduced = partial_trace(sigma, keep);
    total += trace_product(spec.target_projector(x), reduced).real();
  }
  return total / spec.k();
}

/// Strategy that prepares `psi` (on the game layout) and never responds.
inline Strategy trivial_strategy(const StateVector &psi) { return Strategy{psi.density(), {}}; }

/// Random shared state (pure when rank is 1) with Haar-random responses for
/// every question. `ancilla_dims` has one entry per party.
inline Strategy random_strategy(const GameSpec &spec, std::span<const std::size_t> ancilla_dims, std::size_t rank,
                                Rng &rng) {
  const RegisterLayout layout = spec.strategy_layout(ancilla_dims);
  Strategy s{random_density(layout, rank, rng), {}};
  for (int x = 0; x < spec.k(); ++x) {
    std::vector<Operator> resp;
    for (int i = 0; i < spec.k(); ++i) resp.push_back(haar_unitary(layout.subset(detail::party_registers(layout, i)), rng));
    s.responses[x] = std::move(resp);
  }
  return s;
}

/// 1/2 + 1/(2k)
inline double epr_closed_form(int k) { return 0.5 + 0.5 / k; }

}  // namespace clonegame

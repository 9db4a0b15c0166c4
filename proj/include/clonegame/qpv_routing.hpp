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

// Routing position verification, n rounds in parallel.
//
// Per round i: V0 sends a BB84 qubit |phi_i> (or, purified, half of an EPR
// pair whose other half R_i it keeps), both verifiers announce x_i, and the
// qubit must come back to V_{x_i}. Timing is three phase tags: t=0 send,
// t=1 route, t=2 measure.
//
// Attacks without pre-shared entanglement are written in encoder form:
// Alice applies one unitary to the intercepted qubits (placed in A_i) and
// fresh ancillas spanning [A.., EA, B.., EB], ships B.., EB to Bob, and
// after x is announced each side applies a local unitary. The qubit for
// round i is returned from A_i when x_i = 0 and from B_i otherwise.

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "clonegame/cloning_game.hpp"
#include "clonegame/interchange.hpp"
#include "clonegame/parallel_repetition.hpp"
#include "clonegame/random.hpp"
#include "clonegame/tensor_core.hpp"

namespace clonegame {

struct RoundConfig {
  int n = 1;
  bool purified = false;
  std::uint64_t seed = kDefaultSeed;

  void validate() const {
    if (n < 1) throw ContractError("RoundConfig.n must be at least 1");
    (void)ParallelSpec(n);
  }
};

/// Encoder-form attack with no pre-shared entanglement.
struct NoPEAttack {
  Operator encoder;                           ///< on [A0.., (EA), B0.., (EB)]
  std::map<BitString, Operator> responses_a;  ///< keyed by full x; missing = identity
  std::map<BitString, Operator> responses_b;
};

enum class AttackKind { none, nope_optimal, custom };

struct AttackModel {
  AttackKind kind = AttackKind::none;
  std::optional<NoPEAttack> custom;

  static AttackModel honest() { return {}; }
  static AttackModel with(NoPEAttack a) { return {AttackKind::custom, std::move(a)}; }
};

inline std::string attack_name(AttackKind k) {
  switch (k) {
    case AttackKind::none:
      return "none";
    case AttackKind::nope_optimal:
      return "nope_optimal";
    case AttackKind::custom:
      return "custom";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// BB84 and the explicit No-PE attack

/// |0>, |1>, |+>, |->.
inline Vector bb84_state(int which) {
  Vector v(2);
  const double s = 1.0 / std::sqrt(2.0);
  switch (which) {
    case 0:
      v << 1.0, 0.0;
      break;
    case 1:
      v << 0.0, 1.0;
      break;
    case 2:
      v << s, s;
      break;
    case 3:
      v << s, -s;
      break;
    default:
      throw ContractError("BB84 index must be 0..3");
  }
  return v;
}

inline std::string bb84_name(int which) {
  static const std::array<const char *, 4> names{"0", "1", "+", "-"};
  return names.at(static_cast<std::size_t>(which));
}

/// Measurement basis whose first column is the sent state.
inline Matrix bb84_check_basis(int which) {
  Matrix b(2, 2);
  b.col(0) = bb84_state(which);
  b.col(1) = bb84_state(which ^ 1);
  return b;
}

/// (1/2) sum_phi |phi phi><phi phi| on (R, Q): accepting a returned Q against
/// the BB84 state selected by measuring R, averaged over the four states.
inline Matrix bb84_accept_operator() {
  Matrix m = Matrix::Zero(4, 4);
  for (int w = 0; w < 4; ++w) {
    Vector v(4);
    const Vector p = bb84_state(w);
    v << p(0) * p(0), p(0) * p(1), p(1) * p(0), p(1) * p(1);
    m += 0.5 * v * v.adjoint();
  }
  return m;
}

/// (1/sqrt3)(|Phi+>_{T A}|0>_B + |Phi+>_{T B}|0>_A) on [T, A, B].
inline StateVector nope_resource_state(const std::string &t, const std::string &a, const std::string &b) {
  const RegisterLayout layout = RegisterLayout::qubits({t, a, b});
  Vector v = Vector::Zero(8);
  const double c = 1.0 / std::sqrt(6.0);
  v(0) += c;      // |000> from the first term
  v(0b110) += c;  // |1>_T |1>_A |0>_B
  v(0) += c;      // |000> from the second term
  v(0b101) += c;  // |1>_T |0>_A |1>_B
  return StateVector(layout, v);
}

/// Teleportation correction for Bell outcome k = 2a + b (columns of
/// bell_basis): Z^b X^a.
inline Matrix teleport_correction(std::size_t k) {
  Matrix c = Matrix::Identity(2, 2);
  if ((k >> 1) & 1U) c = gates::X() * c;
  if (k & 1U) c = gates::Z() * c;
  return c;
}

struct NoPERoundOutcome {
  std::size_t bell_outcome = 0;
  double probability = 0.0;
  StateVector state;  ///< on [R, A, B] (purified) or [A, B]
};

/// Alice Bell-measures the intercepted qubit Q with T and applies the
/// correction to both A and B. `input` is on [R, Q] (purified) or [Q].
inline NoPERoundOutcome nope_round_branch(const StateVector &input, std::size_t k) {
  const StateVector full = kron(input, nope_resource_state("T", "A", "B"));
  const std::vector<std::string> meas{"Q", "T"};
  const IndexSplit split = split_indices(full.layout(), meas);
  const Matrix coeffs = bell_basis().adjoint() * as_bipartite(full.amplitudes(), split);
  NoPERoundOutcome out;
  out.bell_outcome = k;
  out.probability = coeffs.row(static_cast<Eigen::Index>(k)).squaredNorm();
  StateVector post = StateVector::normalized(full.layout().without(meas), coeffs.row(static_cast<Eigen::Index>(k)).transpose());
  const Matrix c = teleport_correction(k);
  post = apply_unitary(apply_unitary(post, gates::on("A", c)), gates::on("B", c));
  out.state = std::move(post);
  return out;
}

/// Mixed state on [R, A, B] left by the attack over all Bell outcomes.
inline Operator nope_round_density() {
  Operator rho = Operator::zero(RegisterLayout::qubits({"R", "A", "B"}));
  const StateVector input = epr_pair("R", "Q");
  for (std::size_t k = 0; k < 4; ++k) {
    const NoPERoundOutcome br = nope_round_branch(input, k);
    rho += br.probability * br.state.density();
  }
  return rho;
}

inline AttackModel nope_attack_strategy() { return {AttackKind::nope_optimal, std::nullopt}; }

// ---------------------------------------------------------------------------
// Reduction to the (parallel) cloning game

namespace detail {

inline RegisterLayout attacker_layout(const ParallelSpec &spec, const RegisterLayout &given) {
  RegisterLayout want = spec.strategy_layout(given.contains("EA") ? given.dim_of("EA") : 0,
                                             given.contains("EB") ? given.dim_of("EB") : 0);
  std::vector<std::string> rs;
  for (int i = 0; i < spec.n(); ++i) rs.push_back(round_label('R', i));
  want = want.without(rs);
  if (!given.same_registers(want))
    throw ContractError(
        "No-PE attack: the encoder must act on exactly A_i, B_i (qubits) and optional EA, EB; any other register "
        "would be a resource shared before the intercepted qubits arrive");
  return want;
}

inline void validate_nope(const ParallelSpec &spec, const NoPEAttack &a) {
  const RegisterLayout layout = attacker_layout(spec, a.encoder.layout());
  if (!a.encoder.is_unitary()) throw ContractError("No-PE attack: encoder is not unitary");
  const auto own_a = spec.alice_registers(layout);
  const auto own_b = spec.bob_registers(layout);
  for (const auto &[x, u] : a.responses_a) check_question(spec, x), check_response(u, layout, own_a, "Alice");
  for (const auto &[x, u] : a.responses_b) check_question(spec, x), check_response(u, layout, own_b, "Bob");
}

inline StateVector epr_inputs(const ParallelSpec &spec) {
  StateVector acc;
  for (int i = 0; i < spec.n(); ++i) acc = kron(acc, epr_pair(round_label('R', i), round_label('A', i)));
  return acc;
}

}  // namespace detail

/// Purified strategy for an attack: shared state on [R.., A.., (EA), B.., (EB)]
/// plus the attackers' responses.
inline ParallelStrategy purified_strategy(const RoundConfig &cfg, const AttackModel &attack) {
  cfg.validate();
  const ParallelSpec spec(cfg.n);
  switch (attack.kind) {
    case AttackKind::none:
      throw ContractError(
          "the honest prover is not an attack: the reduction needs an adversarial Alice/Bob split of the prover");
    case AttackKind::nope_optimal: {
      const Operator one = nope_round_density();
      Operator acc;
      for (int i = 0; i < cfg.n; ++i)
        acc = kron(acc, relabel(one, {{"R", round_label('R', i)}, {"A", round_label('A', i)}, {"B", round_label('B', i)}}));
      return ParallelStrategy{permute(acc, spec.game_layout()), {}, {}};
    }
    case AttackKind::custom: {
      if (!attack.custom) throw ContractError("custom attack without data");
      const NoPEAttack &a = *attack.custom;
      detail::validate_nope(spec, a);
      const RegisterLayout &full = a.encoder.layout();
      const std::size_t ea = full.contains("EA") ? full.dim_of("EA") : 0;
      const std::size_t eb = full.contains("EB") ? full.dim_of("EB") : 0;
      const RegisterLayout layout = spec.strategy_layout(ea, eb);
      check_dimension(layout.dim(), "No-PE strategy");
      // Intercepted qubits arrive entangled with R; ancillas start in |0>.
      StateVector psi = detail::epr_inputs(spec);
      std::vector<Register> rest;
      for (const auto &r : layout)
        if (!psi.layout().contains(r.label)) rest.push_back(r);
      psi = permute(kron(psi, StateVector::basis(RegisterLayout(rest), 0)), layout);
      psi = apply_unitary(psi, a.encoder);
      return ParallelStrategy{psi.density(), a.responses_a, a.responses_b};
    }
  }
  throw ContractError("unknown attack kind");
}

/// 2^-n sum_x Tr[ (x)_i E_{R_i Q_{x_i}} sigma_x ] for a per-round acceptance
/// operator E on two qubits.
inline double round_operator_acceptance(const ParallelSpec &spec, const ParallelStrategy &s, const Matrix &accept) {
  const RegisterLayout layout = detail::canonical_parallel_layout(spec, s.shared_state.layout());
  const Operator rho = permute(s.shared_state, layout);
  const auto game_labels = spec.game_layout().labels();
  double total = 0.0;
  for (BitString x = 0; x < spec.num_questions(); ++x) {
    Operator sigma = rho;
    if (auto it = s.responses_a.find(x); it != s.responses_a.end()) sigma = conjugate(sigma, it->second);
    if (auto it = s.responses_b.find(x); it != s.responses_b.end()) sigma = conjugate(sigma, it->second);
    Operator e;
    for (int i = 0; i < spec.n(); ++i) {
      const char who = bit_at(x, i) == 0 ? 'A' : 'B';
      e = kron(e, Operator(RegisterLayout::qubits({round_label('R', i), round_label(who, i)}), accept));
    }
    const Operator reduced = partial_trace(sigma, game_labels);
    total += trace_product(embed(e, spec.game_layout()), permute(reduced, spec.game_layout())).real();
  }
  return std::ldexp(total, -spec.n());
}

/// Exact acceptance probability of an attack.
///
/// Purified: the attack is a strategy for the n-fold two-party cloning game
/// and is scored by cloning_game (n = 1) or parallel_repetition (n >= 2).
/// Otherwise the verifier checks the returned qubit against the BB84 state it
/// sent, which is the same data scored with bb84_accept_operator().
inline double exact_acceptance(const RoundConfig &cfg, const AttackModel &attack) {
  const ParallelStrategy s = purified_strategy(cfg, attack);
  const ParallelSpec spec(cfg.n);
  if (!cfg.purified) return round_operator_acceptance(spec, s, bb84_accept_operator());
  if (cfg.n == 1) return evaluate_strategy(GameSpec::epr(2), to_cloning_strategy(s));
  return eval_parallel_strategy(spec, s);
}

/// Haar-random encoder and responses.
inline NoPEAttack random_nope_attack(int n, std::size_t ea, std::size_t eb, Rng &rng) {
  const ParallelSpec spec(n);
  const RegisterLayout layout = spec.strategy_layout(ea, eb);
  std::vector<std::string> rs;
  for (int i = 0; i < n; ++i) rs.push_back(round_label('R', i));
  const RegisterLayout attackers = layout.without(rs);
  NoPEAttack a{haar_unitary(attackers, rng), {}, {}};
  const RegisterLayout la = attackers.subset(spec.alice_registers(attackers));
  const RegisterLayout lb = attackers.subset(spec.bob_registers(attackers));
  for (BitString x = 0; x < spec.num_questions(); ++x) {
    a.responses_a.emplace(x, haar_unitary(la, rng));
    a.responses_b.emplace(x, haar_unitary(lb, rng));
  }
  return a;
}

// ---------------------------------------------------------------------------
// Monte-Carlo protocol simulation

struct RoundRecord {
  std::string sent;  ///< "0", "1", "+", "-" or "epr"
  int x = 0;
  int routed_to = 0;          ///< verifier index the qubit reached
  std::size_t outcome = 0;    ///< 0 = the accepting outcome
  int t_sent = 0, t_routed = 1, t_measured = 2;
  bool accepted = false;
};

struct ProtocolRun {
  std::vector<RoundRecord> rounds;
  bool accept = false;
};

namespace detail {

inline bool verdict(std::vector<RoundRecord> &rounds) {
  bool ok = true;
  for (auto &r : rounds) {
    const bool timed = r.t_sent == 0 && r.t_routed == 1 && r.t_measured == 2;
    // Timing and answer failures are one verdict.
    r.accepted = timed && r.routed_to == r.x && r.outcome == 0;
    ok = ok && r.accepted;
  }
  return ok;
}

/// Verifier check for round i on the register `q` of `psi`. Consumes q (and
/// R_i when purified).
inline StateVector verify_round(const StateVector &psi, const std::string &ref, const std::string &q, bool purified,
                                int sent, RoundRecord &rec, Rng &rng) {
  if (purified) {
    const std::vector<std::string> regs{ref, q};
    const Measurement m = measure(psi, regs, bell_basis(), rng);
    rec.outcome = m.outcome;
    return m.remainder;
  }
  const std::vector<std::string> regs{q};
  const Measurement m = measure(psi, regs, bb84_check_basis(sent), rng);
  rec.outcome = m.outcome;
  return m.remainder;
}

}  // namespace detail

/// One honest execution: the prover forwards every qubit to V_{x_i}.
inline ProtocolRun honest_round(const RoundConfig &cfg, std::uint64_t run_index = 0) {
  cfg.validate();
  Rng rng = make_rng(cfg.seed, run_index);
  std::uniform_int_distribution<int> four(0, 3), two(0, 1);
  ProtocolRun run;
  for (int i = 0; i < cfg.n; ++i) {
    RoundRecord rec;
    const int phi = four(rng);
    rec.x = two(rng);
    rec.sent = cfg.purified ? "epr" : bb84_name(phi);
    StateVector psi = cfg.purified ? epr_pair("R", "Q") : StateVector(RegisterLayout::qubits({"Q"}), bb84_state(phi));
    rec.routed_to = rec.x;
    detail::verify_round(psi, "R", "Q", cfg.purified, phi, rec, rng);
    run.rounds.push_back(rec);
  }
  run.accept = detail::verdict(run.rounds);
  return run;
}

/// One execution against an attack, by state-vector simulation.
inline ProtocolRun attack_round(const RoundConfig &cfg, const AttackModel &attack, std::uint64_t run_index) {
  cfg.validate();
  if (attack.kind == AttackKind::none) return honest_round(cfg, run_index);
  const ParallelSpec spec(cfg.n);
  Rng rng = make_rng(cfg.seed, run_index);
  std::uniform_int_distribution<int> four(0, 3), two(0, 1);
  ProtocolRun run;
  std::vector<int> phis;
  BitString x = 0;
  for (int i = 0; i < cfg.n; ++i) {
    RoundRecord rec;
    phis.push_back(four(rng));
    rec.x = two(rng);
    if (rec.x != 0) x |= BitString{1} << i;
    rec.sent = cfg.purified ? "epr" : bb84_name(phis.back());
    rec.routed_to = rec.x;
    run.rounds.push_back(rec);
  }

  if (attack.kind == AttackKind::nope_optimal) {
    // Rounds are independent: one five-qubit circuit each.
    for (int i = 0; i < cfg.n; ++i) {
      RoundRecord &rec = run.rounds[static_cast<std::size_t>(i)];
      const StateVector input =
          cfg.purified ? epr_pair("R", "Q") : StateVector(RegisterLayout::qubits({"Q"}), bb84_state(phis[static_cast<std::size_t>(i)]));
      StateVector psi = kron(input, nope_resource_state("T", "A", "B"));
      const std::vector<std::string> meas{"Q", "T"};
      const Measurement bell = measure(psi, meas, bell_basis(), rng);
      const Matrix c = teleport_correction(bell.outcome);
      psi = apply_unitary(apply_unitary(bell.remainder, gates::on("A", c)), gates::on("B", c));
      detail::verify_round(psi, "R", rec.x == 0 ? "A" : "B", cfg.purified, phis[static_cast<std::size_t>(i)], rec, rng);
    }
    run.accept = detail::verdict(run.rounds);
    return run;
  }

  if (!attack.custom) throw ContractError("custom attack without data");
  const NoPEAttack &a = *attack.custom;
  detail::validate_nope(spec, a);
  const RegisterLayout attackers = a.encoder.layout();
  StateVector psi;
  if (cfg.purified) {
    psi = detail::epr_inputs(spec);
  } else {
    for (int i = 0; i < cfg.n; ++i)
      psi = kron(psi, StateVector(RegisterLayout::qubits({round_label('A', i)}), bb84_state(phis[static_cast<std::size_t>(i)])));
  }
  std::vector<Register> rest;
  for (const auto &r : attackers)
    if (!psi.layout().contains(r.label)) rest.push_back(r);
  psi = kron(psi, StateVector::basis(RegisterLayout(rest), 0));
  check_dimension(psi.dim(), "No-PE simulation");
  psi = apply_unitary(psi, a.encoder);
  if (auto it = a.responses_a.find(x); it != a.responses_a.end()) psi = apply_unitary(psi, it->second);
  if (auto it = a.responses_b.find(x); it != a.responses_b.end()) psi = apply_unitary(psi, it->second);
  for (int i = 0; i < cfg.n; ++i) {
    RoundRecord &rec = run.rounds[static_cast<std::size_t>(i)];
    const std::string q = round_label(rec.x == 0 ? 'A' : 'B', i);
    psi = detail::verify_round(psi, round_label('R', i), q, cfg.purified, phis[static_cast<std::size_t>(i)], rec, rng);
  }
  run.accept = detail::verdict(run.rounds);
  return run;
}

struct WilsonInterval {
  double low = 0.0;
  double high = 1.0;
};

/// 95% Wilson score interval.
inline WilsonInterval wilson95(std::uint64_t successes, std::uint64_t trials) {
  if (trials == 0) return {};
  const double z = 1.959963984540054;
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double denom = 1.0 + z * z / n;
  const double centre = (p + z * z / (2 * n)) / denom;
  const double half = z * std::sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom;
  // The endpoints at 0 and N successes are exact; the formula rounds them.
  return {successes == 0 ? 0.0 : std::max(0.0, centre - half), successes == trials ? 1.0 : std::min(1.0, centre + half)};
}

struct SimulationReport {
  RoundConfig config;
  std::string attack;
  std::uint64_t rounds = 0;
  std::uint64_t accepted = 0;
  double rate = 0.0;
  double std_error = 0.0;  ///< sqrt(p(1-p)/N)
  WilsonInterval ci95;
  std::optional<double> exact;
};

/// Runs `rounds` independent executions, execution r seeded by (seed, r).
/// When `transcript` is set every round is written to it as CSV.
inline SimulationReport simulate(const RoundConfig &cfg, const AttackModel &attack, std::uint64_t rounds,
                                 std::ostream *transcript = nullptr) {
  cfg.validate();
  if (rounds < 1) throw ContractError("simulate needs at least one round");
  SimulationReport rep;
  rep.config = cfg;
  rep.attack = attack_name(attack.kind);
  rep.rounds = rounds;
  if (transcript != nullptr) *transcript << "run,round,sent,x,routed_to,t_sent,t_routed,t_measured,outcome,accepted,verdict\n";
  for (std::uint64_t r = 0; r < rounds; ++r) {
    const ProtocolRun run = attack_round(cfg, attack, r);
    if (run.accept) ++rep.accepted;
    if (transcript != nullptr) {
      for (std::size_t i = 0; i < run.rounds.size(); ++i) {
        const RoundRecord &rec = run.rounds[i];
        *transcript << r << ',' << i << ',' << rec.sent << ',' << rec.x << ',' << rec.routed_to << ',' << rec.t_sent
                    << ',' << rec.t_routed << ',' << rec.t_measured << ',' << rec.outcome << ','
                    << (rec.accepted ? 1 : 0) << ',' << (run.accept ? "accept" : "reject") << '\n';
      }
    }
  }
  rep.rate = static_cast<double>(rep.accepted) / static_cast<double>(rounds);
  rep.std_error = std::sqrt(rep.rate * (1.0 - rep.rate) / static_cast<double>(rounds));
  rep.ci95 = wilson95(rep.accepted, rounds);
  if (attack.kind != AttackKind::none) rep.exact = exact_acceptance(cfg, attack);
  return rep;
}

// ---------------------------------------------------------------------------
// Serialization of custom attacks

inline json to_json(const NoPEAttack &a, int n) {
  json j;
  j["model"] = "no-pe";
  j["n"] = n;
  j["encoder"] = to_json(a.encoder);
  j["responses_a"] = json::object();
  j["responses_b"] = json::object();
  for (const auto &[x, u] : a.responses_a) j["responses_a"][bits_to_string(x, n)] = to_json(u);
  for (const auto &[x, u] : a.responses_b) j["responses_b"][bits_to_string(x, n)] = to_json(u);
  return j;
}

/// Reads {"model":"no-pe","n":N,"encoder":op,"responses_a":{x:op},"responses_b":{x:op}}.
inline std::pair<int, NoPEAttack> nope_attack_from_json(const json &j) {
  if (!j.is_object()) throw ContractError("attack file must be a JSON object");
  if (j.value("model", std::string()) != "no-pe") throw ContractError("attack file must declare \"model\":\"no-pe\"");
  if (j.contains("shared_state"))
    throw ContractError("No-PE attack may not carry a pre-shared state; give an \"encoder\" unitary instead");
  if (!j.contains("encoder")) throw ContractError("No-PE attack needs an \"encoder\"");
  const int n = j.value("n", 1);
  const ParallelSpec spec(n);
  NoPEAttack a{operator_from_json(j.at("encoder")), {}, {}};
  auto read = [&](const char *key, std::map<BitString, Operator> &out) {
    if (!j.contains(key)) return;
    for (const auto &[k, v] : j.at(key).items()) {
      if (k.size() != static_cast<std::size_t>(n)) throw ContractError(std::string(key) + ": key '" + k + "' must have n bits");
      out.emplace(bits_from_string(k), operator_from_json(v));
    }
  };
  read("responses_a", a.responses_a);
  read("responses_b", a.responses_b);
  detail::validate_nope(spec, a);
  return {n, std::move(a)};
}

}  // namespace clonegame

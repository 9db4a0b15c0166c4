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

// Reprogrammable random oracle H: {0,1}^l -> {0,1}^n at desk scale, and a
// harness for (H,n)-routing where the question string is x = H(r0 XOR r1).
//
// Timeline of one run:
//   t=0  V0 sends n EPR halves A_i (keeps R_i) and r0 to Alice; V1 sends r1 to
//        Bob. Each attacker acts once and may hand registers to the other.
//   t=1  r0, r1 and the notes become common knowledge. In game 3 the oracle is
//        reprogrammed at r0 XOR r1 to a fresh x before anyone acts. Each
//        attacker returns registers to V0 or V1.
//   t=2  V_{x_i} Bell-measures (R_i, returned register) and accepts on Phi+.
//
// Adversaries query classically only.

#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "clonegame/parallel_repetition.hpp"
#include "clonegame/qpv_routing.hpp"
#include "clonegame/random.hpp"
#include "clonegame/tensor_core.hpp"

namespace clonegame {

inline constexpr int kMaxClassicalOracleBits = 24;
inline constexpr int kMaxUnitaryOracleBits = 12;

class OracleTable {
 public:
  OracleTable(int ell, int n, std::vector<std::uint64_t> table) : ell_(ell), n_(n), table_(std::move(table)) {
    if (ell_ < 1 || n_ < 1) throw ContractError("oracle needs l >= 1 and n >= 1");
    if (ell_ > kMaxClassicalOracleBits) throw ResourceError("oracle tables are limited to l <= 24 input bits");
    if (n_ > 63) throw ContractError("oracle output is limited to 63 bits");
    if (table_.size() != (std::size_t{1} << ell_)) throw ContractError("oracle table must have 2^l entries");
    for (auto v : table_)
      if ((v >> n_) != 0) throw ContractError("oracle entry has more than n bits");
  }

  int ell() const { return ell_; }
  int n() const { return n_; }
  std::size_t size() const { return table_.size(); }
  std::uint64_t queries() const { return queries_; }
  const std::vector<std::pair<std::uint64_t, std::uint64_t>> &reprogram_log() const { return log_; }

  /// Counted classical query.
  std::uint64_t lookup(std::uint64_t r) {
    check_input(r);
    ++queries_;
    return table_[r];
  }

  /// Uncounted read, for the referee.
  std::uint64_t peek(std::uint64_t r) const {
    check_input(r);
    return table_[r];
  }

  /// H[r -> x]; this table is left alone.
  OracleTable reprogram(std::uint64_t r, std::uint64_t x) const {
    check_input(r);
    if ((x >> n_) != 0) throw ContractError("reprogrammed value has more than n bits");
    OracleTable out = *this;
    out.table_[r] = x;
    out.log_.emplace_back(r, x);
    return out;
  }

  /// Counts one application of U_H.
  void record_unitary_query() { ++queries_; }

  bool same_entries(const OracleTable &o) const { return ell_ == o.ell_ && n_ == o.n_ && table_ == o.table_; }

 private:
  void check_input(std::uint64_t r) const {
    if (r >= table_.size()) throw ContractError("oracle input out of range");
  }

  int ell_;
  int n_;
  std::vector<std::uint64_t> table_;
  std::uint64_t queries_ = 0;
  std::vector<std::pair<std::uint64_t, std::uint64_t>> log_;
};

inline OracleTable sample_oracle(int ell, int n, std::uint64_t seed) {
  if (ell < 1 || n < 1) throw ContractError("oracle needs l >= 1 and n >= 1");
  if (ell > kMaxClassicalOracleBits) throw ResourceError("oracle tables are limited to l <= 24 input bits");
  if (n > 63) throw ContractError("oracle output is limited to 63 bits");
  Rng rng(seed);
  const std::uint64_t mask = (std::uint64_t{1} << n) - 1;
  std::vector<std::uint64_t> t(std::size_t{1} << ell);
  for (auto &v : t) v = rng() & mask;
  return OracleTable(ell, n, std::move(t));
}

/// |r>|b> -> |r>|b XOR H(r)> on registers ("in", 2^l), ("out", 2^n).
inline Operator oracle_unitary(const OracleTable &h) {
  if (h.ell() + h.n() > kMaxUnitaryOracleBits) throw ResourceError("oracle unitary is limited to l + n <= 12");
  const std::size_t din = std::size_t{1} << h.ell();
  const std::size_t dout = std::size_t{1} << h.n();
  const RegisterLayout layout{{"in", din}, {"out", dout}};
  const auto d = static_cast<Eigen::Index>(din * dout);
  Matrix u = Matrix::Zero(d, d);
  for (std::size_t r = 0; r < din; ++r)
    for (std::size_t b = 0; b < dout; ++b)
      u(static_cast<Eigen::Index>(r * dout + (b ^ h.peek(r))), static_cast<Eigen::Index>(r * dout + b)) = 1.0;
  return Operator(layout, std::move(u));
}

/// One counted superposition query on the "in"/"out" registers of psi.
inline StateVector apply_oracle(OracleTable &h, const StateVector &psi) {
  const Operator u = oracle_unitary(h);
  h.record_unitary_query();
  return apply_unitary(psi, u);
}

struct Epsilon {
  double value = 0.0;
  bool vacuous = false;  ///< value > 1
};

/// 2q 2^(-l/2) + (1/2 + 1/(2 sqrt 2))^n
inline Epsilon soundness_epsilon(double q, int ell, int n) {
  if (q < 0) throw ContractError("query count must be nonnegative");
  if (ell < 0 || n < 1) throw ContractError("need l >= 0 and n >= 1");
  Epsilon e;
  e.value = 2.0 * q * std::pow(2.0, -0.5 * ell) + analytic_upper_bound(n).closed_form;
  e.vacuous = e.value > 1.0;
  return e;
}

/// 2q 2^(-l/2)
inline double reprogram_distinguisher_bound(double q, int ell) {
  if (q < 0) throw ContractError("query count must be nonnegative");
  return 2.0 * q * std::pow(2.0, -0.5 * ell);
}

// ---------------------------------------------------------------------------
// Harness

struct HRoutingConfig {
  int ell = 8;
  int n = 1;
  std::uint64_t q_max = 2;
  std::uint64_t seed = kDefaultSeed;

  void validate() const {
    if (ell < 1 || ell > kMaxClassicalOracleBits) throw ContractError("l must be in 1..24");
    (void)ParallelSpec(n);
    if (n > 10) throw ResourceError("routing harness is limited to n <= 10 rounds");
  }
};

enum class GameMode { game1, game3 };

enum class Party { verifier, alice, bob };

inline const char *party_name(Party p) {
  switch (p) {
    case Party::verifier:
      return "verifier";
    case Party::alice:
      return "Alice";
    case Party::bob:
      return "Bob";
  }
  return "?";
}

struct BudgetExceeded : Error {
  BudgetExceeded() : Error("query budget exceeded") {}
};

/// The attackers' view of H: every query counts against one shared budget.
class QueryOracle {
 public:
  QueryOracle(OracleTable table, std::uint64_t budget) : table_(std::move(table)), budget_(budget) {}

  std::uint64_t query(std::uint64_t r) {
    if (table_.queries() >= budget_) {
      over_ = true;
      throw BudgetExceeded();
    }
    return table_.lookup(r);
  }

  int ell() const { return table_.ell(); }
  int n() const { return table_.n(); }
  std::uint64_t queries() const { return table_.queries(); }
  bool over_budget() const { return over_; }
  const OracleTable &table() const { return table_; }
  void replace(OracleTable t) { table_ = std::move(t); }

 private:
  OracleTable table_;
  std::uint64_t budget_;
  bool over_ = false;
};

/// Joint quantum state of verifiers and attackers with register ownership.
class Workspace {
 public:
  explicit Workspace(Rng &rng) : rng_(&rng) {}

  const StateVector &state() const { return state_; }
  Rng &rng() { return *rng_; }
  int phase() const { return phase_; }
  void set_phase(int t) { phase_ = t; }

  Party owner(const std::string &label) const {
    auto it = owner_.find(label);
    if (it == owner_.end()) throw LayoutError("no register '" + label + "' in the workspace");
    return it->second;
  }

  /// Appends a fresh register owned by p, in |0> or in `init`.
  void add(Party p, const StateVector &init) {
    for (const auto &r : init.layout()) owner_.emplace(r.label, p);
    state_ = kron(state_, init);
  }
  void add(Party p, const std::string &label, std::size_t dim) { add(p, StateVector::basis(RegisterLayout{{label, dim}}, 0)); }
  /// Appends `init` with one owner per register.
  void add(const StateVector &init, const std::vector<Party> &owners) {
    if (owners.size() != init.layout().size()) throw ContractError("one owner per register");
    std::size_t k = 0;
    for (const auto &r : init.layout()) owner_.emplace(r.label, owners[k++]);
    state_ = kron(state_, init);
  }

  void apply(Party p, const Operator &u) {
    require_owned(p, u.layout());
    if (!u.is_unitary()) throw ContractError(std::string(party_name(p)) + " applied a non-unitary operation");
    state_ = apply_unitary(state_, u);
  }

  /// Projective measurement of p's registers; they are discarded.
  std::size_t measure(Party p, const std::vector<std::string> &labels, const Matrix &basis) {
    for (const auto &l : labels)
      if (owner(l) != p) throw ContractError(std::string(party_name(p)) + " measured '" + l + "', which it does not hold");
    const Measurement m = clonegame::measure(state_, std::span<const std::string>(labels), basis, *rng_);
    state_ = m.remainder;
    for (const auto &l : labels) owner_.erase(l);
    return m.outcome;
  }

  /// Hands a register to the other attacker. Only at t=0.
  void send(Party from, const std::string &label, Party to) {
    if (phase_ != 0) throw ContractError("registers can only change hands at t=0");
    if (owner(label) != from) throw ContractError(std::string(party_name(from)) + " does not hold '" + label + "'");
    if (to == Party::verifier) throw ContractError("use the t=1 routing to return registers to a verifier");
    owner_[label] = to;
  }

  void require_owned(Party p, const RegisterLayout &regs) const {
    for (const auto &r : regs)
      if (owner(r.label) != p)
        throw ContractError(std::string(party_name(p)) + " acted on '" + r.label + "', which it does not hold");
  }

 private:
  Rng *rng_;
  StateVector state_;
  std::map<std::string, Party> owner_;
  int phase_ = 0;
};

struct PreInput {
  int n = 1;
  std::vector<std::string> qubits;  ///< EPR halves received (Alice only)
  std::uint64_t r = 0;              ///< r0 for Alice, r1 for Bob
};

struct PostInput {
  int n = 1;
  std::uint64_t r0 = 0, r1 = 0;
  std::vector<std::uint64_t> own_note, other_note;
};

/// Registers returned at t=1: (round, label, verifier).
struct Return {
  int round = 0;
  std::string label;
  int verifier = 0;
};

class Adversary {
 public:
  virtual ~Adversary() = default;
  virtual std::string name() const = 0;
  /// Queries made per run (for the bound); numeric_limits::max() if unbounded.
  virtual std::uint64_t declared_queries() const = 0;
  /// t=0. The returned note becomes public at t=1.
  virtual std::vector<std::uint64_t> alice_pre(Workspace &, QueryOracle &, const PreInput &) = 0;
  virtual std::vector<std::uint64_t> bob_pre(Workspace &, QueryOracle &, const PreInput &) = 0;
  /// t=1
  virtual std::vector<Return> alice_post(Workspace &, QueryOracle &, const PostInput &) = 0;
  virtual std::vector<Return> bob_post(Workspace &, QueryOracle &, const PostInput &) = 0;
};

// ---------------------------------------------------------------------------
// Built-in adversaries

namespace adversaries {

/// Alice keeps everything and returns it all to V0; never queries.
class RouteV0 : public Adversary {
 public:
  std::string name() const override { return "route-v0"; }
  std::uint64_t declared_queries() const override { return 0; }
  std::vector<std::uint64_t> alice_pre(Workspace &, QueryOracle &, const PreInput &) override { return {}; }
  std::vector<std::uint64_t> bob_pre(Workspace &, QueryOracle &, const PreInput &) override { return {}; }
  std::vector<Return> alice_post(Workspace &, QueryOracle &, const PostInput &in) override {
    std::vector<Return> out;
    for (int i = 0; i < in.n; ++i) out.push_back({i, round_label('A', i), 0});
    return out;
  }
  std::vector<Return> bob_post(Workspace &, QueryOracle &, const PostInput &) override { return {}; }
};

/// Teleports each qubit into both halves of the three-qubit resource state,
/// gives one half to Bob, then each side looks up x once.
class CloneSplit : public Adversary {
 public:
  std::string name() const override { return "clone-split"; }
  std::uint64_t declared_queries() const override { return 2; }
  std::vector<std::uint64_t> alice_pre(Workspace &ws, QueryOracle &, const PreInput &in) override {
    for (int i = 0; i < in.n; ++i) {
      const std::string t = "T" + std::to_string(i), ca = "CA" + std::to_string(i), cb = "CB" + std::to_string(i);
      ws.add(Party::alice, nope_resource_state(t, ca, cb));
      const std::size_t k = ws.measure(Party::alice, {in.qubits[static_cast<std::size_t>(i)], t}, bell_basis());
      const Matrix c = teleport_correction(k);
      ws.apply(Party::alice, gates::on(ca, c));
      ws.apply(Party::alice, gates::on(cb, c));
      ws.send(Party::alice, cb, Party::bob);
    }
    return {};
  }
  std::vector<std::uint64_t> bob_pre(Workspace &, QueryOracle &, const PreInput &) override { return {}; }
  std::vector<Return> alice_post(Workspace &, QueryOracle &h, const PostInput &in) override {
    const std::uint64_t x = h.query(in.r0 ^ in.r1);
    std::vector<Return> out;
    for (int i = 0; i < in.n; ++i)
      if (bit_at(x, i) == 0) out.push_back({i, "CA" + std::to_string(i), 0});
    return out;
  }
  std::vector<Return> bob_post(Workspace &, QueryOracle &h, const PostInput &in) override {
    const std::uint64_t x = h.query(in.r0 ^ in.r1);
    std::vector<Return> out;
    for (int i = 0; i < in.n; ++i)
      if (bit_at(x, i) == 1) out.push_back({i, "CB" + std::to_string(i), 1});
    return out;
  }
};

/// Alice guesses r1 at t=0, spends her single query on H(r0 XOR guess) and
/// routes by the answer.
class EarlyGuess : public Adversary {
 public:
  std::string name() const override { return "early-guess"; }
  std::uint64_t declared_queries() const override { return 1; }
  std::vector<std::uint64_t> alice_pre(Workspace &ws, QueryOracle &h, const PreInput &in) override {
    std::uniform_int_distribution<std::uint64_t> guess(0, (std::uint64_t{1} << h.ell()) - 1);
    const std::uint64_t xhat = h.query(in.r ^ guess(ws.rng()));
    for (int i = 0; i < in.n; ++i)
      if (bit_at(xhat, i) == 1) ws.send(Party::alice, in.qubits[static_cast<std::size_t>(i)], Party::bob);
    return {xhat};
  }
  std::vector<std::uint64_t> bob_pre(Workspace &, QueryOracle &, const PreInput &) override { return {}; }
  std::vector<Return> alice_post(Workspace &, QueryOracle &, const PostInput &in) override {
    std::vector<Return> out;
    for (int i = 0; i < in.n; ++i)
      if (bit_at(in.own_note.at(0), i) == 0) out.push_back({i, round_label('A', i), 0});
    return out;
  }
  std::vector<Return> bob_post(Workspace &, QueryOracle &, const PostInput &in) override {
    std::vector<Return> out;
    for (int i = 0; i < in.n; ++i)
      if (bit_at(in.other_note.at(0), i) == 1) out.push_back({i, round_label('A', i), 1});
    return out;
  }
};

/// Queries until the budget runs out.
class OverBudget : public Adversary {
 public:
  std::string name() const override { return "over-budget"; }
  std::uint64_t declared_queries() const override { return std::numeric_limits<std::uint64_t>::max(); }
  std::vector<std::uint64_t> alice_pre(Workspace &, QueryOracle &h, const PreInput &in) override {
    for (;;) h.query(in.r);
  }
  std::vector<std::uint64_t> bob_pre(Workspace &, QueryOracle &, const PreInput &) override { return {}; }
  std::vector<Return> alice_post(Workspace &, QueryOracle &, const PostInput &) override { return {}; }
  std::vector<Return> bob_post(Workspace &, QueryOracle &, const PostInput &) override { return {}; }
};

}  // namespace adversaries

inline std::vector<std::string> builtin_adversaries() { return {"route-v0", "clone-split", "early-guess", "over-budget"}; }

inline std::unique_ptr<Adversary> make_adversary(const std::string &name) {
  if (name == "route-v0") return std::make_unique<adversaries::RouteV0>();
  if (name == "clone-split") return std::make_unique<adversaries::CloneSplit>();
  if (name == "early-guess") return std::make_unique<adversaries::EarlyGuess>();
  if (name == "over-budget") return std::make_unique<adversaries::OverBudget>();
  throw ContractError("unknown adversary '" + name + "'");
}

struct GameRun {
  bool accept = false;
  bool budget_exceeded = false;
  std::uint64_t queries = 0;
  std::uint64_t x = 0;
};

namespace detail {

struct AfterT0 {
  Workspace ws;
  std::optional<QueryOracle> oracle;
  std::uint64_t r0 = 0, r1 = 0;
  std::vector<std::uint64_t> note_a, note_b;
};

/// Checks the returns and gives, for each round, the register V_{x_i} got.
inline std::optional<std::vector<std::string>> collect_returns(const Workspace &ws, int n, std::uint64_t x,
                                                               const std::vector<Return> &from_a,
                                                               const std::vector<Return> &from_b) {
  std::vector<std::string> got(static_cast<std::size_t>(n));
  auto take = [&](const std::vector<Return> &rs, Party who) {
    for (const auto &r : rs) {
      if (r.round < 0 || r.round >= n || (r.verifier != 0 && r.verifier != 1))
        throw ContractError("adversary returned a register for an invalid round or verifier");
      if (ws.owner(r.label) != who)
        throw ContractError(std::string(party_name(who)) + " returned '" + r.label + "', which it does not hold");
      if (r.verifier != bit_at(x, r.round)) continue;  // the other verifier ignores it
      auto &slot = got[static_cast<std::size_t>(r.round)];
      if (!slot.empty()) throw ContractError("two registers returned for the same round");
      slot = r.label;
    }
  };
  take(from_a, Party::alice);
  take(from_b, Party::bob);
  for (const auto &s : got)
    if (s.empty()) return std::nullopt;
  return got;
}

/// Probability that every Bell check passes, without sampling.
inline double all_checks_pass(const StateVector &psi, const std::vector<std::string> &returned) {
  Operator proj;
  for (std::size_t i = 0; i < returned.size(); ++i)
    proj = kron(proj, epr_pair(round_label('R', static_cast<int>(i)), returned[i]).density());
  return expectation(psi, proj).real();
}

}  // namespace detail

namespace detail {

inline AfterT0 run_t0(const HRoutingConfig &cfg, Adversary &adv, Rng &rng, std::uint64_t budget) {
  AfterT0 s{Workspace(rng), std::nullopt, 0, 0, {}, {}};
  s.oracle.emplace(sample_oracle(cfg.ell, cfg.n, rng()), budget);
  std::uniform_int_distribution<std::uint64_t> rs(0, (std::uint64_t{1} << cfg.ell) - 1);
  s.r0 = rs(rng);
  s.r1 = rs(rng);
  PreInput a{cfg.n, {}, s.r0}, b{cfg.n, {}, s.r1};
  for (int i = 0; i < cfg.n; ++i) {
    s.ws.add(epr_pair(round_label('R', i), round_label('A', i)), {Party::verifier, Party::alice});
    a.qubits.push_back(round_label('A', i));
  }
  s.note_a = adv.alice_pre(s.ws, *s.oracle, a);
  s.note_b = adv.bob_pre(s.ws, *s.oracle, b);
  s.ws.set_phase(1);
  return s;
}

/// t=1; the register each checking verifier received, or nullopt if one got
/// nothing.
inline std::optional<std::vector<std::string>> run_t1(AfterT0 &s, Adversary &adv, int n, std::uint64_t x) {
  PostInput pa{n, s.r0, s.r1, s.note_a, s.note_b};
  PostInput pb{n, s.r0, s.r1, s.note_b, s.note_a};
  const auto ra = adv.alice_post(s.ws, *s.oracle, pa);
  const auto rb = adv.bob_post(s.ws, *s.oracle, pb);
  return collect_returns(s.ws, n, x, ra, rb);
}

}  // namespace detail

/// One run of game 1 (x = H(r0 XOR r1)) or game 3 (H reprogrammed there to a
/// fresh x at t=1). Over-budget runs reject with the flag set.
inline GameRun game_reduction_run(const HRoutingConfig &cfg, Adversary &adv, GameMode mode, std::uint64_t run_index) {
  cfg.validate();
  Rng rng = make_rng(cfg.seed, run_index);
  GameRun out;
  std::optional<detail::AfterT0> s;
  try {
    s.emplace(detail::run_t0(cfg, adv, rng, cfg.q_max));
    const std::uint64_t r = s->r0 ^ s->r1;
    if (mode == GameMode::game3) {
      std::uniform_int_distribution<std::uint64_t> xs(0, (std::uint64_t{1} << cfg.n) - 1);
      out.x = xs(rng);
      s->oracle->replace(s->oracle->table().reprogram(r, out.x));
    } else {
      out.x = s->oracle->table().peek(r);
    }
    const auto got = detail::run_t1(*s, adv, cfg.n, out.x);
    out.queries = s->oracle->queries();
    if (!got) return out;
    // Verifiers measure each (R_i, returned) pair in the Bell basis.
    StateVector psi = s->ws.state();
    out.accept = true;
    for (int i = 0; i < cfg.n && out.accept; ++i) {
      const Measurement m = measure(psi, std::vector<std::string>{round_label('R', i), (*got)[static_cast<std::size_t>(i)]},
                                    bell_basis(), rng);
      psi = m.remainder;
      out.accept = m.outcome == 0;
    }
  } catch (const BudgetExceeded &) {
    out.accept = false;
    out.budget_exceeded = true;
    out.queries = cfg.q_max;
  }
  return out;
}

struct GameStats {
  std::string adversary;
  GameMode mode = GameMode::game1;
  std::size_t runs = 0;
  std::size_t accepted = 0;
  std::size_t budget_flags = 0;
  std::uint64_t max_queries = 0;
  double rate = 0.0;
  double std_error = 0.0;
  WilsonInterval ci95;
};

inline GameStats run_game(const HRoutingConfig &cfg, Adversary &adv, GameMode mode, std::size_t runs) {
  if (runs == 0) throw ContractError("runs must be positive");
  GameStats st;
  st.adversary = adv.name();
  st.mode = mode;
  st.runs = runs;
  for (std::size_t k = 0; k < runs; ++k) {
    const GameRun g = game_reduction_run(cfg, adv, mode, k);
    st.accepted += g.accept ? 1 : 0;
    st.budget_flags += g.budget_exceeded ? 1 : 0;
    st.max_queries = std::max(st.max_queries, g.queries);
  }
  const double nr = static_cast<double>(runs);
  st.rate = static_cast<double>(st.accepted) / nr;
  st.std_error = std::sqrt(st.rate * (1.0 - st.rate) / nr);
  st.ci95 = wilson95(st.accepted, runs);
  return st;
}

struct Game4Check {
  std::size_t runs = 0;
  double mean = 0.0;       ///< average exact acceptance of the t=1 states
  double std_error = 0.0;
  double bound = 0.0;      ///< (1/2 + 1/(2 sqrt 2))^n
  bool within = false;     ///< mean <= bound + 4 sigma
};

/// The state held at t=1 in game 3, with the adversary's t=1 behaviour as
/// responses, is a parallel cloning-game strategy: x is uniform and unknown
/// until then. Averages its exact acceptance over all x.
inline Game4Check game4_check(const HRoutingConfig &cfg, Adversary &adv, std::size_t runs) {
  cfg.validate();
  if (cfg.n > 2) throw ContractError("game-4 check is limited to n <= 2");
  if (runs < 2) throw ContractError("runs must be at least 2");
  const std::uint64_t nx = std::uint64_t{1} << cfg.n;
  std::vector<double> vals;
  vals.reserve(runs);
  for (std::size_t k = 0; k < runs; ++k) {
    Rng rng = make_rng(cfg.seed, k);
    double acc = 0.0;
    try {
      const detail::AfterT0 base = detail::run_t0(cfg, adv, rng, cfg.q_max);
      const std::uint64_t r = base.r0 ^ base.r1;
      for (std::uint64_t x = 0; x < nx; ++x) {
        detail::AfterT0 s = base;
        s.oracle->replace(s.oracle->table().reprogram(r, x));
        const auto got = detail::run_t1(s, adv, cfg.n, x);
        if (got) acc += detail::all_checks_pass(s.ws.state(), *got);
      }
    } catch (const BudgetExceeded &) {
      acc = 0.0;
    }
    vals.push_back(acc / static_cast<double>(nx));
  }
  Game4Check c;
  c.runs = runs;
  double sum = 0.0;
  for (double v : vals) sum += v;
  c.mean = sum / static_cast<double>(runs);
  double ss = 0.0;
  for (double v : vals) ss += (v - c.mean) * (v - c.mean);
  c.std_error = ss < 1e-24 ? 0.0 : std::sqrt(ss / static_cast<double>(runs - 1) / static_cast<double>(runs));
  c.bound = analytic_upper_bound(cfg.n).closed_form;
  c.within = c.mean <= c.bound + 4.0 * c.std_error + 1e-12;
  return c;
}

}  // namespace clonegame

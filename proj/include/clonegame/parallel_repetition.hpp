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

// n-fold parallel repetition of the two-party EPR cloning game.
//
// Alice and Bob both see the whole question string x in {0,1}^n; round i is
// won when Q_{x_i} (A_i if x_i = 0, else B_i) holds |Phi+> with R_i.
//
// Layouts:
//   game      [R0..R{n-1}, A0..A{n-1}, B0..B{n-1}]
//   strategy  [R0..R{n-1}, A0..A{n-1}, EA, B0..B{n-1}, EB]   (EA, EB optional)
//
// Question strings are std::uint64_t with x_i stored in bit i; the textual
// form lists x_0 first ("01" means x_0 = 0, x_1 = 1).

#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "clonegame/cloning_game.hpp"
#include "clonegame/seesaw.hpp"
#include "clonegame/tensor_core.hpp"

namespace clonegame {

using BitString = std::uint64_t;

inline int bit_at(BitString x, int i) { return static_cast<int>((x >> i) & 1U); }

inline std::string bits_to_string(BitString x, int n) {
  std::string s(static_cast<std::size_t>(n), '0');
  for (int i = 0; i < n; ++i) s[static_cast<std::size_t>(i)] = bit_at(x, i) != 0 ? '1' : '0';
  return s;
}

inline BitString bits_from_string(const std::string &s) {
  if (s.empty() || s.size() > 63) throw ContractError("question string must have 1..63 bits");
  BitString x = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '1')
      x |= BitString{1} << i;
    else if (s[i] != '0')
      throw ContractError("question string '" + s + "' must contain only 0 and 1");
  }
  return x;
}

inline std::string round_label(char who, int i) { return std::string(1, who) + std::to_string(i); }

class ParallelSpec {
 public:
  explicit ParallelSpec(int n) : n_(n) {
    if (n_ < 1) throw ContractError("the number of parallel rounds n must be at least 1");
    if (n_ > 20) throw ResourceError("parallel game with n > 20 rounds is beyond the dense representation");
  }

  int n() const { return n_; }
  BitString num_questions() const { return BitString{1} << n_; }

  RegisterLayout game_layout() const { return strategy_layout(0, 0); }

  /// Ancilla dimension 0 means "no ancilla register".
  RegisterLayout strategy_layout(std::size_t ancilla_a, std::size_t ancilla_b) const {
    std::vector<Register> regs;
    for (int i = 0; i < n_; ++i) regs.push_back({round_label('R', i), 2});
    for (int i = 0; i < n_; ++i) regs.push_back({round_label('A', i), 2});
    if (ancilla_a > 0) regs.push_back({"EA", ancilla_a});
    for (int i = 0; i < n_; ++i) regs.push_back({round_label('B', i), 2});
    if (ancilla_b > 0) regs.push_back({"EB", ancilla_b});
    return RegisterLayout(std::move(regs));
  }

  std::vector<std::string> alice_registers(const RegisterLayout &layout) const { return side_registers(layout, 'A'); }
  std::vector<std::string> bob_registers(const RegisterLayout &layout) const { return side_registers(layout, 'B'); }

 private:
  std::vector<std::string> side_registers(const RegisterLayout &layout, char who) const {
    std::vector<std::string> regs;
    for (int i = 0; i < n_; ++i) regs.push_back(round_label(who, i));
    const std::string anc = std::string("E") + who;
    if (layout.contains(anc)) regs.push_back(anc);
    return regs;
  }

  int n_;
};

inline void check_question(const ParallelSpec &spec, BitString x) {
  if (spec.n() < 64 && (x >> spec.n()) != 0)
    throw ContractError("question string has more than n=" + std::to_string(spec.n()) + " bits");
}

/// (x)_i |Phi+><Phi+|_{R_i Q_{x_i}} (x) I_{Q_{1-x_i}} on the game layout.
inline Operator parallel_projector(const ParallelSpec &spec, BitString x) {
  check_question(spec, x);
  const RegisterLayout layout = spec.game_layout();
  check_dimension(layout.dim(), "parallel projector");
  Operator acc;
  for (int i = 0; i < spec.n(); ++i) {
    const char who = bit_at(x, i) == 0 ? 'A' : 'B';
    acc = kron(acc, epr_pair(round_label('R', i), round_label(who, i)).density());
  }
  return embed(acc, layout);
}

// ---------------------------------------------------------------------------
// Analytic bounds

struct UpperBound {
  double closed_form = 0.0;   ///< (1/2 + 1/(2 sqrt 2))^n
  double binomial_sum = 0.0;  ///< 2^-n sum_t C(n,t) 2^(-t/2)
};

inline UpperBound analytic_upper_bound(int n) {
  if (n < 1) throw ContractError("n must be at least 1");
  UpperBound b;
  b.closed_form = std::pow(0.5 + 0.5 / std::sqrt(2.0), n);
  double binom = 1.0, sum = 0.0;
  for (int t = 0; t <= n; ++t) {
    sum += binom * std::pow(2.0, -0.5 * t);
    binom = binom * (n - t) / (t + 1);
  }
  b.binomial_sum = std::ldexp(sum, -n);
  return b;
}

struct ParallelStrategy {
  Operator shared_state;
  std::map<BitString, Operator> responses_a;  ///< on Alice's registers; missing key = identity
  std::map<BitString, Operator> responses_b;
};

struct LowerBound {
  double value = 0.0;                        ///< (3/4)^n
  std::optional<ParallelStrategy> strategy;  ///< tensored optimal state, for n <= 3
};

/// n copies of the optimal single-round state arranged on the game layout.
inline StateVector tensored_optimal_state(const ParallelSpec &spec) {
  const StateVector one = optimal_state(2);
  StateVector acc;
  for (int i = 0; i < spec.n(); ++i)
    acc = kron(acc, relabel(one, {{"R", round_label('R', i)}, {"P0", round_label('A', i)}, {"P1", round_label('B', i)}}));
  return permute(acc, spec.game_layout());
}

inline LowerBound tensor_lower_bound(int n) {
  const ParallelSpec spec(n);
  LowerBound lb;
  lb.value = std::pow(0.75, n);
  if (n <= 3) lb.strategy = ParallelStrategy{tensored_optimal_state(spec).density(), {}, {}};
  return lb;
}

namespace detail {

inline RegisterLayout canonical_parallel_layout(const ParallelSpec &spec, const RegisterLayout &given) {
  const std::size_t ea = given.contains("EA") ? given.dim_of("EA") : 0;
  const std::size_t eb = given.contains("EB") ? given.dim_of("EB") : 0;
  RegisterLayout canon = spec.strategy_layout(ea, eb);
  if (!given.same_registers(canon))
    throw LayoutError("parallel strategy layout must be R_i, A_i, B_i qubits plus optional EA, EB");
  return canon;
}

inline void check_response(const Operator &u, const RegisterLayout &layout, const std::vector<std::string> &owned,
                           const char *who) {
  if (!u.layout().same_registers(layout.subset(owned)))
    throw LayoutError(std::string(who) + "'s response must act on exactly that party's registers");
  if (!u.is_unitary()) throw ContractError(std::string(who) + "'s response is not unitary");
}

}  // namespace detail

/// 2^-n sum_x Tr[ Pi(x) tr_{EA EB}( (U^x (x) V^x) rho (U^x (x) V^x)^dagger ) ]
inline double eval_parallel_strategy(const ParallelSpec &spec, const Operator &shared_state,
                                     const std::map<BitString, Operator> &responses_a,
                                     const std::map<BitString, Operator> &responses_b) {
  const RegisterLayout layout = detail::canonical_parallel_layout(spec, shared_state.layout());
  const Operator rho = permute(shared_state, layout);
  if (!rho.is_state()) throw ContractError("shared state is not a valid density operator");
  const auto own_a = spec.alice_registers(layout);
  const auto own_b = spec.bob_registers(layout);
  for (const auto &[x, u] : responses_a) check_question(spec, x), detail::check_response(u, layout, own_a, "Alice");
  for (const auto &[x, u] : responses_b) check_question(spec, x), detail::check_response(u, layout, own_b, "Bob");

  const auto game_labels = spec.game_layout().labels();
  double total = 0.0;
  for (BitString x = 0; x < spec.num_questions(); ++x) {
    Operator sigma = rho;
    if (auto it = responses_a.find(x); it != responses_a.end()) sigma = conjugate(sigma, it->second);
    if (auto it = responses_b.find(x); it != responses_b.end()) sigma = conjugate(sigma, it->second);
    const Operator reduced = partial_trace(sigma, game_labels);
    total += trace_product(parallel_projector(spec, x), permute(reduced, spec.game_layout())).real();
  }
  return std::ldexp(total, -spec.n());
}

inline double eval_parallel_strategy(const ParallelSpec &spec, const ParallelStrategy &s) {
  return eval_parallel_strategy(spec, s.shared_state, s.responses_a, s.responses_b);
}

/// Same data as a two-party cloning-game strategy (n = 1 only).
inline Strategy to_cloning_strategy(const ParallelStrategy &s) {
  const std::map<std::string, std::string> names{{"R0", "R"}, {"A0", "P0"}, {"EA", "E0"}, {"B0", "P1"}, {"EB", "E1"}};
  if (s.shared_state.layout().contains("R1")) throw ContractError("only single-round strategies map to the cloning game");
  Strategy out{relabel(s.shared_state, names), {}};
  const RegisterLayout layout = out.shared_state.layout();
  for (int x = 0; x < 2; ++x) {
    const bool has_a = s.responses_a.count(static_cast<BitString>(x)) != 0;
    const bool has_b = s.responses_b.count(static_cast<BitString>(x)) != 0;
    if (!has_a && !has_b) continue;
    auto local = [&](const std::map<BitString, Operator> &m, int party) {
      if (auto it = m.find(static_cast<BitString>(x)); it != m.end()) return relabel(it->second, names);
      return Operator::identity(layout.subset(detail::party_registers(layout, party)));
    };
    out.responses[x] = {local(s.responses_a, 0), local(s.responses_b, 1)};
  }
  return out;
}

/// Random shared state and Haar responses for every question string.
inline ParallelStrategy random_parallel_strategy(const ParallelSpec &spec, std::size_t ancilla_a, std::size_t ancilla_b,
                                                 std::size_t rank, Rng &rng) {
  const RegisterLayout layout = spec.strategy_layout(ancilla_a, ancilla_b);
  ParallelStrategy s{random_density(layout, rank, rng), {}, {}};
  const RegisterLayout la = layout.subset(spec.alice_registers(layout));
  const RegisterLayout lb = layout.subset(spec.bob_registers(layout));
  for (BitString x = 0; x < spec.num_questions(); ++x) {
    s.responses_a.emplace(x, haar_unitary(la, rng));
    s.responses_b.emplace(x, haar_unitary(lb, rng));
  }
  return s;
}

// ---------------------------------------------------------------------------
// Projector-overlap machinery

struct OverlapReport {
  int t = 0;    ///< Hamming distance
  int t_a = 0;  ///< positions with x_i = 0, x'_i = 1
  int t_b = 0;  ///< positions with x_i = 1, x'_i = 0
  double bound = 1.0;                ///< 2^(-t/2)
  double role_bound = 1.0;           ///< 2^(-max(t_a, t_b)) <= bound
  std::optional<double> numeric;     ///< || Pi(x) Pi(x') ||, for n <= 3
};

inline OverlapReport overlap_bound(const ParallelSpec &spec, BitString x, BitString xp) {
  check_question(spec, x);
  check_question(spec, xp);
  OverlapReport r;
  for (int i = 0; i < spec.n(); ++i) {
    if (bit_at(x, i) == 0 && bit_at(xp, i) == 1) ++r.t_a;
    if (bit_at(x, i) == 1 && bit_at(xp, i) == 0) ++r.t_b;
  }
  r.t = r.t_a + r.t_b;
  // Whichever side differs more plays Alice's role; that side has >= t/2.
  const int dominant = std::max(r.t_a, r.t_b);
  r.bound = std::pow(2.0, -0.5 * r.t);
  r.role_bound = std::pow(2.0, -static_cast<double>(dominant));
  if (spec.n() <= 3) r.numeric = prod_norm(parallel_projector(spec, x), parallel_projector(spec, xp));
  return r;
}

inline OverlapReport overlap_bound(const std::string &x, const std::string &xp) {
  if (x.size() != xp.size()) throw ContractError("question strings differ in length");
  return overlap_bound(ParallelSpec(static_cast<int>(x.size())), bits_from_string(x), bits_from_string(xp));
}

/// A list of permutations of {0, ..., m-1}.
struct PermutationFamily {
  std::vector<std::vector<std::size_t>> maps;

  /// pi_key(x) = x XOR key for every key in {0,1}^n.
  static PermutationFamily xor_family(int n) {
    if (n < 0 || n > 16) throw ContractError("XOR family supports 0 <= n <= 16");
    const std::size_t m = std::size_t{1} << n;
    PermutationFamily f;
    for (std::size_t key = 0; key < m; ++key) {
      std::vector<std::size_t> p(m);
      for (std::size_t x = 0; x < m; ++x) p[x] = x ^ key;
      f.maps.push_back(std::move(p));
    }
    return f;
  }

  /// pi_k(i) = i + k mod m.
  static PermutationFamily cyclic_family(std::size_t m) {
    PermutationFamily f;
    for (std::size_t k = 0; k < m; ++k) {
      std::vector<std::size_t> p(m);
      for (std::size_t i = 0; i < m; ++i) p[i] = (i + k) % m;
      f.maps.push_back(std::move(p));
    }
    return f;
  }

  std::size_t size() const { return maps.size(); }

  bool valid() const {
    for (const auto &p : maps) {
      if (p.size() != maps.size()) return false;
      std::vector<bool> hit(p.size(), false);
      for (std::size_t v : p) {
        if (v >= p.size() || hit[v]) return false;
        hit[v] = true;
      }
    }
    return true;
  }

  /// pi(i) != pi'(i) for every i and every distinct pair.
  bool mutually_orthogonal() const {
    for (std::size_t a = 0; a < maps.size(); ++a)
      for (std::size_t b = a + 1; b < maps.size(); ++b)
        for (std::size_t i = 0; i < maps[a].size(); ++i)
          if (maps[a][i] == maps[b][i]) return false;
    return true;
  }
};

inline bool is_projector(const Operator &p, double tol = 1e-8) {
  return p.is_hermitian(tol) && (p.matrix() * p.matrix() - p.matrix()).cwiseAbs().maxCoeff() <= tol;
}

/// sum_k max_i || Pi^i Pi^{pi_k(i)} ||, an upper bound on || sum_i Pi^i ||
/// for mutually orthogonal families.
inline double lemma2_bound(const std::vector<Operator> &projectors, const PermutationFamily &family) {
  if (projectors.empty()) throw ContractError("need at least one projector");
  if (family.size() != projectors.size()) throw ContractError("permutation family size must match the projector count");
  if (!family.valid()) throw ContractError("family contains a map that is not a permutation of the index set");
  for (const auto &p : projectors) {
    if (p.layout() != projectors.front().layout()) throw LayoutError("projectors must share one layout");
    if (!is_projector(p)) throw ContractError("lemma2_bound expects projectors");
  }
  double bound = 0.0;
  for (const auto &perm : family.maps) {
    double worst = 0.0;
    for (std::size_t i = 0; i < projectors.size(); ++i) worst = std::max(worst, prod_norm(projectors[i], projectors[perm[i]]));
    bound += worst;
  }
  return bound;
}

/// sum over keys of 2^(-|key|/2) = (1 + 2^(-1/2))^n; the XOR-family bound with
/// the analytic overlap estimate plugged in. Equals 2^n * upper bound.
inline double xor_family_overlap_sum(int n) {
  double sum = 0.0;
  for (BitString key = 0; key < (BitString{1} << n); ++key) sum += std::pow(2.0, -0.5 * std::popcount(key));
  return sum;
}

// ---------------------------------------------------------------------------
// See-saw

struct SeesawConfig {
  std::size_t ancilla_dim_a = 2;
  std::size_t ancilla_dim_b = 2;
  int max_iters = 500;
  double convergence_tol = 1e-10;
  std::uint64_t seed = kDefaultSeed;
};

struct SeesawReport {
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> history;
};

inline SeesawProblem parallel_seesaw_problem(const ParallelSpec &spec, std::size_t ancilla_a, std::size_t ancilla_b) {
  SeesawProblem p;
  p.layout = spec.strategy_layout(ancilla_a, ancilla_b);
  check_dimension(p.layout.dim(), "see-saw");
  for (BitString x = 0; x < spec.num_questions(); ++x) p.projectors.push_back(parallel_projector(spec, x));
  p.parties = {spec.alice_registers(p.layout), spec.bob_registers(p.layout)};
  return p;
}

/// One see-saw run seeded by (cfg.seed, seed_index). A heuristic lower bound.
inline SeesawReport seesaw_optimize(const ParallelSpec &spec, const SeesawConfig &cfg, std::uint64_t seed_index = 0) {
  if (cfg.ancilla_dim_a < 1 || cfg.ancilla_dim_b < 1) throw ContractError("ancilla dimensions must be >= 1");
  const SeesawProblem p = parallel_seesaw_problem(spec, cfg.ancilla_dim_a, cfg.ancilla_dim_b);
  Rng rng = make_rng(cfg.seed, seed_index);
  const SeesawResult r = seesaw(p, cfg.max_iters, cfg.convergence_tol, rng);
  return {r.value, r.iterations, r.converged, r.history};
}

struct SeesawSweep {
  double best = 0.0;
  std::vector<SeesawReport> runs;
};

inline SeesawSweep seesaw_best(const ParallelSpec &spec, const SeesawConfig &cfg, int seeds) {
  if (seeds < 1) throw ContractError("need at least one see-saw seed");
  SeesawSweep out;
  for (int s = 0; s < seeds; ++s) {
    out.runs.push_back(seesaw_optimize(spec, cfg, static_cast<std::uint64_t>(s)));
    out.best = std::max(out.best, out.runs.back().value);
  }
  return out;
}

}  // namespace clonegame

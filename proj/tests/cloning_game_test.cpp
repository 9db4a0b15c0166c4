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

#include "clonegame/cloning_game.hpp"

#include <gtest/gtest.h>

#include <array>

#include "clonegame/seesaw.hpp"
#include "oracles.hpp"

using namespace clonegame;

namespace {

std::vector<oracle::cplx> to_std(const StateVector &v) {
  std::vector<oracle::cplx> out(v.dim());
  for (std::size_t i = 0; i < v.dim(); ++i) out[i] = v[i];
  return out;
}

// Game operator for the EPR target built by hand from bit patterns:
// <i| Phi+_{R P_x} (x) I |j> = 1/2 if r_i == p_i, r_j == p_j and all other
// bits agree.
Matrix brute_game_operator(int k) {
  const int n = k + 1;
  const std::size_t d = std::size_t{1} << n;
  Matrix h = Matrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (int x = 0; x < k; ++x) {
    const std::size_t mask = (std::size_t{1} << (n - 1)) | (std::size_t{1} << (n - 2 - x));
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) {
        if ((i & ~mask) != (j & ~mask)) continue;
        if (oracle::qubit_bit(i, 0, n) != oracle::qubit_bit(i, x + 1, n)) continue;
        if (oracle::qubit_bit(j, 0, n) != oracle::qubit_bit(j, x + 1, n)) continue;
        h(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) += 0.5;
      }
  }
  return h;
}

double brute_game_value(int k) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(brute_game_operator(k), Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff() / k;
}

std::vector<std::size_t> ancillas(int k, std::size_t d) { return std::vector<std::size_t>(static_cast<std::size_t>(k), d); }

}  // namespace

TEST(GameSpec, Validation) {
  EXPECT_THROW(GameSpec::epr(0), ContractError);
  const std::array<double, 2> skewed{0.7, 0.3};
  EXPECT_THROW(GameSpec(2, epr_pair("R", "P"), skewed), ContractError);
  const std::array<double, 2> uniform{0.5, 0.5};
  EXPECT_NO_THROW(GameSpec(2, epr_pair("R", "P"), uniform));
  EXPECT_THROW(GameSpec(2, StateVector::basis(RegisterLayout::qubits({"R"}), 0)), ContractError);
}

TEST(GameProjector, IsRankHalfProjector) {
  const GameSpec spec = GameSpec::epr(3);
  for (int x = 0; x < 3; ++x) {
    const Operator p = game_projector(spec, x);
    EXPECT_LT((p * p - p).matrix().cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_NEAR(p.trace().real(), 4.0, 1e-12);
  }
  EXPECT_THROW(game_projector(spec, 3), ContractError);
}

TEST(GameOperator, MatchesBitPatternConstruction) {
  for (int k = 1; k <= 4; ++k)
    EXPECT_LT((game_operator(GameSpec::epr(k)).matrix() - brute_game_operator(k)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(GameValue, SingleParty) { EXPECT_NEAR(game_value(GameSpec::epr(1)).value, 1.0, 1e-12); }

TEST(GameValue, TwoParties) { EXPECT_NEAR(game_value(GameSpec::epr(2)).value, 0.75, 1e-12); }

TEST(GameValue, MatchesClosedFormAndBruteForce) {
  for (int k = 1; k <= 6; ++k) {
    const double v = game_value(GameSpec::epr(k)).value;
    EXPECT_NEAR(v, epr_closed_form(k), 1e-10) << "k=" << k;
    EXPECT_NEAR(v, brute_game_value(k), 1e-12) << "k=" << k;
  }
}

TEST(GameValue, TopEigenspaceHasDimensionK) {
  // U (x) conj(U)^{(x) k} on [R, P0..] commutes with the game operator, so the
  // optimum is not unique.
  for (int k = 1; k <= 5; ++k)
    EXPECT_EQ(game_value(GameSpec::epr(k)).top_multiplicity, static_cast<std::size_t>(k)) << "k=" << k;
}

TEST(GameValue, ProductTargetIsClonable) {
  const StateVector zero_zero = StateVector::basis(RegisterLayout::qubits({"R", "P"}), 0);
  for (int k = 1; k <= 4; ++k) EXPECT_NEAR(game_value(GameSpec(k, zero_zero)).value, 1.0, 1e-12);
}

TEST(GameValue, WitnessIsDeterministic) {
  const StateVector a = game_value(GameSpec::epr(3)).witness;
  const StateVector b = game_value(GameSpec::epr(3)).witness;
  EXPECT_EQ((a.amplitudes() - b.amplitudes()).norm(), 0.0);
}

TEST(OptimalState, AmplitudesForTwoParties) {
  // Layout [R, P0, P1]: |000> gets 2/sqrt(6); |110> and |101> get 1/sqrt(6).
  const StateVector psi = optimal_state(2);
  const double s6 = 1.0 / std::sqrt(6.0);
  for (std::size_t i = 0; i < 8; ++i) {
    const double want = i == 0 ? 2 * s6 : (i == 6 || i == 5) ? s6 : 0.0;
    EXPECT_NEAR(std::abs(psi[i] - want), 0.0, 1e-14) << "i=" << i;
  }
}

TEST(OptimalState, AchievesGameValue) {
  for (int k = 1; k <= 6; ++k) {
    const StateVector psi = optimal_state(k);
    EXPECT_NEAR(evaluate_strategy(GameSpec::epr(k), trivial_strategy(psi)), epr_closed_form(k), 1e-10);
    EXPECT_NEAR(oracle::cloning_value(to_std(psi), k), epr_closed_form(k), 1e-12);
  }
}

TEST(OptimalState, LiesInTopEigenspace) {
  for (int k = 2; k <= 4; ++k) {
    const GameSpec spec = GameSpec::epr(k);
    const Operator h = game_operator(spec);
    const StateVector psi = optimal_state(k);
    const Vector hv = h.matrix() * psi.amplitudes();
    EXPECT_LT((hv - k * epr_closed_form(k) * psi.amplitudes()).norm(), 1e-12);
    const StateVector w = game_value(spec).witness;
    EXPECT_NEAR(expectation(w, h).real() / k, epr_closed_form(k), 1e-10);
  }
}

TEST(NamedStates, ReferenceValues) {
  const GameSpec spec = GameSpec::epr(2);
  struct Case {
    NamedState name;
    double want;
  };
  // Frozen from oracle::cloning_value.
  const std::array<Case, 5> cases{{{NamedState::ghz, 0.5},
                                   {NamedState::w, 1.0 / 6.0},
                                   {NamedState::guess, 0.625},
                                   {NamedState::all_zero, 0.5},
                                   {NamedState::optimal, 0.75}}};
  for (const auto &c : cases) {
    const StateVector psi = named_state(c.name, 2);
    EXPECT_NEAR(oracle::cloning_value(to_std(psi), 2), c.want, 1e-14);
    EXPECT_NEAR(evaluate_strategy(spec, trivial_strategy(psi)), c.want, 1e-12);
  }
}

TEST(NamedStates, ParseAndGuards) {
  EXPECT_EQ(parse_named_state("ghz"), NamedState::ghz);
  EXPECT_EQ(parse_named_state("all-zero"), NamedState::all_zero);
  EXPECT_FALSE(parse_named_state("bell").has_value());
  EXPECT_THROW(named_state(NamedState::ghz, 3), ContractError);
  EXPECT_NO_THROW(named_state(NamedState::guess, 5));
}

TEST(EvaluateStrategy, RandomStrategiesNeverBeatTheValue) {
  for (int k = 2; k <= 3; ++k) {
    const GameSpec spec = GameSpec::epr(k);
    const double value = game_value(spec).value;
    Rng rng(derive_seed(kDefaultSeed, static_cast<std::uint64_t>(k)));
    const auto dims = ancillas(k, 2);
    for (int trial = 0; trial < 200; ++trial) {
      const Strategy s = random_strategy(spec, dims, 1 + static_cast<std::size_t>(trial % 3), rng);
      EXPECT_LE(evaluate_strategy(spec, s), value + 1e-10);
    }
  }
}

TEST(EvaluateStrategy, PartySymmetry) {
  // Swapping the labels of two parties permutes questions and leaves the
  // average unchanged.
  const GameSpec spec = GameSpec::epr(3);
  Rng rng(44);
  const Strategy s = random_strategy(spec, ancillas(3, 2), 2, rng);
  const std::map<std::string, std::string> swap{{"P0", "P1"}, {"P1", "P0"}, {"E0", "E1"}, {"E1", "E0"}};
  Strategy t{relabel(s.shared_state, swap), {}};
  for (const auto &[x, resp] : s.responses) {
    const int tx = x == 0 ? 1 : x == 1 ? 0 : x;
    std::vector<Operator> r{relabel(resp[1], swap), relabel(resp[0], swap), resp[2]};
    t.responses[tx] = r;
  }
  EXPECT_NEAR(evaluate_strategy(spec, s), evaluate_strategy(spec, t), 1e-12);
}

TEST(EvaluateStrategy, LocalUnitaryBeforeResponseIsAbsorbed) {
  // Applying V_i to party i's registers in the state and V_i^dagger inside every
  // response changes nothing.
  const GameSpec spec = GameSpec::epr(2);
  Rng rng(45);
  const auto dims = ancillas(2, 2);
  const Strategy s = random_strategy(spec, dims, 1, rng);
  const RegisterLayout layout = s.shared_state.layout();
  const Operator v0 = haar_unitary(layout.subset(std::vector<std::string>{"P0", "E0"}), rng);
  const Operator big = embed(v0, layout);
  Strategy t{big * s.shared_state * big.adjoint(), s.responses};
  for (auto &[x, resp] : t.responses) resp[0] = resp[0] * v0.adjoint();
  EXPECT_NEAR(evaluate_strategy(spec, s), evaluate_strategy(spec, t), 1e-12);
}

TEST(EvaluateStrategy, AncillaFreeLayoutIsAccepted) {
  const StateVector psi = optimal_state(2);
  Strategy s = trivial_strategy(psi);
  s.responses[0] = {Operator::identity({{"P0", 2}}), Operator::identity({{"P1", 2}})};
  EXPECT_NEAR(evaluate_strategy(GameSpec::epr(2), s), 0.75, 1e-12);
}

TEST(EvaluateStrategy, IsDeterministic) {
  const GameSpec spec = GameSpec::epr(2);
  Rng rng(46);
  const Strategy s = random_strategy(spec, ancillas(2, 3), 2, rng);
  EXPECT_EQ(evaluate_strategy(spec, s), evaluate_strategy(spec, s));
}

TEST(EvaluateStrategy, ErrorPaths) {
  const GameSpec spec = GameSpec::epr(2);
  Rng rng(47);
  Strategy s = random_strategy(spec, ancillas(2, 2), 1, rng);

  Strategy bad_state = s;
  bad_state.shared_state = Operator(s.shared_state.layout(), 2.0 * s.shared_state.matrix());
  EXPECT_THROW(evaluate_strategy(spec, bad_state), ContractError);

  Strategy bad_unitary = s;
  bad_unitary.responses[0][0] = Operator(bad_unitary.responses[0][0].layout(), 2.0 * bad_unitary.responses[0][0].matrix());
  EXPECT_THROW(evaluate_strategy(spec, bad_unitary), ContractError);

  Strategy bad_question = s;
  bad_question.responses[5] = s.responses[0];
  EXPECT_THROW(evaluate_strategy(spec, bad_question), ContractError);

  Strategy wrong_registers = s;
  wrong_registers.responses[1][0] = haar_unitary(RegisterLayout{{"P1", 2}, {"E1", 2}}, rng);
  EXPECT_THROW(evaluate_strategy(spec, wrong_registers), LayoutError);

  Strategy stray = s;
  stray.shared_state = kron(s.shared_state, Operator(RegisterLayout{{"Z", 2}}, Matrix::Identity(2, 2) * 0.5));
  EXPECT_THROW(evaluate_strategy(spec, stray), LayoutError);
}

TEST(Seesaw, ReachesTwoPartyValue) {
  const GameSpec spec = GameSpec::epr(2);
  const auto dims = ancillas(2, 2);
  const SeesawProblem prob = cloning_seesaw_problem(spec, dims);
  double best = 0.0;
  for (std::uint64_t i = 0; i < 3; ++i) {
    Rng rng = make_rng(kDefaultSeed, i);
    const SeesawResult r = seesaw(prob, 300, 1e-12, rng);
    for (std::size_t t = 1; t < r.history.size(); ++t) EXPECT_GE(r.history[t], r.history[t - 1] - 1e-12);
    EXPECT_LE(r.value, 0.75 + 1e-10);
    best = std::max(best, r.value);
  }
  EXPECT_NEAR(best, 0.75, 1e-6);
}

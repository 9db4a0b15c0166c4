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

#include "clonegame/tensor_core.hpp"

#include <gtest/gtest.h>

#include <cstdlib>

#include "clonegame/interchange.hpp"
#include "clonegame/random.hpp"
#include "oracles.hpp"

using namespace clonegame;

namespace {

Operator basis_projector(const std::string &label, int b) {
  Matrix m = Matrix::Zero(2, 2);
  m(b, b) = 1.0;
  return gates::on(label, m);
}

Operator random_hermitian(const RegisterLayout &layout, Rng &rng) {
  const Matrix g = ginibre(layout.dim(), layout.dim(), rng);
  return Operator(layout, (g + g.adjoint()) * 0.5);
}

double max_abs_diff(const Matrix &a, const Matrix &b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace

TEST(RegisterLayout, RejectsDuplicateLabelsAndZeroDims) {
  EXPECT_THROW((RegisterLayout{{"A", 2}, {"A", 2}}), LayoutError);
  EXPECT_THROW((RegisterLayout{{"A", 0}}), LayoutError);
  const RegisterLayout l{{"A", 2}, {"B", 3}};
  EXPECT_EQ(l.dim(), 6u);
  EXPECT_THROW(l.index_of("C"), LayoutError);
}

TEST(Kron, IdentityTimesIdentity) {
  const Operator r = kron(Operator::identity({{"A", 2}}), Operator::identity({{"B", 2}}));
  EXPECT_EQ(r.dim(), 4u);
  EXPECT_EQ(max_abs_diff(r.matrix(), Matrix::Identity(4, 4)), 0.0);
}

TEST(Kron, BasisBookkeeping) {
  const Operator r = kron(basis_projector("A", 0), basis_projector("B", 1));
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) EXPECT_EQ(r(i, j), (i == 1 && j == 1) ? cplx(1.0) : cplx(0.0));
}

TEST(Kron, DimensionsMultiply) {
  const Operator r = kron(Operator::identity({{"A", 3}}), Operator::identity({{"B", 5}}));
  EXPECT_EQ(r.dim(), 15u);
  EXPECT_EQ(r.layout().labels(), (std::vector<std::string>{"A", "B"}));
}

TEST(Kron, LabelCollision) {
  EXPECT_THROW(kron(Operator::identity({{"A", 2}}), Operator::identity({{"A", 2}})), LayoutError);
}

TEST(Kron, AssociativeExactly) {
  Rng rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    const Operator a(RegisterLayout{{"A", 2}}, ginibre(2, 2, rng));
    const Operator b(RegisterLayout{{"B", 3}}, ginibre(3, 3, rng));
    const Operator c(RegisterLayout{{"C", 2}}, ginibre(2, 2, rng));
    const Operator left = kron(kron(a, b), c);
    const Operator right = kron(a, kron(b, c));
    EXPECT_EQ(left.layout(), right.layout());
    // Only the order of the scalar products differs.
    EXPECT_LT(max_abs_diff(left.matrix(), right.matrix()), 1e-14);
  }
}

TEST(Kron, MatchesBruteForceRowMajor) {
  Rng rng(3);
  const Matrix a = ginibre(2, 2, rng), b = ginibre(3, 3, rng);
  std::vector<cplx> fa, fb;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) fa.push_back(a(i, j));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) fb.push_back(b(i, j));
  const auto ref = oracle::kron(fa, 2, fb, 3);
  const Operator got = kron(Operator({{"A", 2}}, a), Operator({{"B", 3}}, b));
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) EXPECT_EQ(got(i, j), ref[static_cast<std::size_t>(i * 6 + j)]);
}

TEST(PartialTrace, EprMarginalIsMaximallyMixed) {
  const Operator rho = epr_pair("A", "B").density();
  const Operator r = partial_trace(rho, {"A"});
  EXPECT_EQ(r.layout(), (RegisterLayout{{"A", 2}}));
  EXPECT_LT(max_abs_diff(r.matrix(), Matrix::Identity(2, 2) * 0.5), 1e-15);
}

TEST(PartialTrace, ProductFactorizes) {
  Rng rng(11);
  const Operator a = random_density({{"A", 2}}, 2, rng);
  const Operator b(RegisterLayout{{"B", 3}}, 2.5 * random_density({{"B", 3}}, 3, rng).matrix());
  const Operator r = partial_trace(kron(a, b), {"A"});
  EXPECT_LT(max_abs_diff(r.matrix(), a.matrix() * b.trace()), 1e-14);
}

TEST(PartialTrace, FullTraceOfStateIsOne) {
  Rng rng(5);
  const Operator rho = random_density({{"A", 2}, {"B", 3}, {"C", 2}}, 3, rng);
  const Operator r = partial_trace(rho, std::vector<std::string>{});
  EXPECT_EQ(r.dim(), 1u);
  EXPECT_NEAR(r(0, 0).real(), 1.0, 1e-12);
}

TEST(PartialTrace, KeepsOriginalOrderAndRejectsUnknownLabel) {
  const RegisterLayout l{{"A", 2}, {"B", 3}, {"C", 2}};
  const Operator r = partial_trace(Operator::identity(l), {"C", "A"});
  EXPECT_EQ(r.layout().labels(), (std::vector<std::string>{"A", "C"}));
  EXPECT_THROW(partial_trace(Operator::identity(l), {"D"}), LayoutError);
}

TEST(PartialTrace, PreservesTrace) {
  Rng rng(21);
  const RegisterLayout l{{"A", 2}, {"B", 3}, {"C", 2}, {"D", 2}};
  const std::vector<std::vector<std::string>> keeps{{"A"}, {"B", "D"}, {"A", "B", "C"}, {}, {"D", "C", "B", "A"}};
  for (const auto &keep : keeps) {
    const Operator m(l, ginibre(l.dim(), l.dim(), rng));
    EXPECT_LT(std::abs(partial_trace(m, keep).trace() - m.trace()), 1e-12);
  }
}

TEST(Embed, PadsIdentityOnMissingRegisters) {
  const RegisterLayout into = RegisterLayout::qubits({"R", "P0", "P1"});
  const Operator x = gates::on("P0", gates::X());
  const Operator e = embed(x, into);
  Matrix expect = Matrix::Zero(8, 8);
  for (int r = 0; r < 2; ++r)
    for (int p0 = 0; p0 < 2; ++p0)
      for (int p1 = 0; p1 < 2; ++p1) expect(r * 4 + (1 - p0) * 2 + p1, r * 4 + p0 * 2 + p1) = 1.0;
  EXPECT_EQ(max_abs_diff(e.matrix(), expect), 0.0);
}

TEST(Embed, MatchingLayoutIsUnchanged) {
  Rng rng(2);
  const RegisterLayout l{{"A", 2}, {"B", 3}};
  const Operator m(l, ginibre(6, 6, rng));
  EXPECT_EQ(max_abs_diff(embed(m, l).matrix(), m.matrix()), 0.0);
}

TEST(Embed, EprOnOuterPairThenTraceGivesTwiceProjector) {
  // Reference built with explicit bit arithmetic: M[(r,p0,p1),(r',p0',p1')] =
  // Phi[(r,p1),(r',p1')] * delta(p0,p0'), then trace over P0 by hand.
  const Operator phi = epr_pair("R", "P1").density();
  const Operator e = embed(phi, RegisterLayout::qubits({"R", "P0", "P1"}));
  Matrix ref8 = Matrix::Zero(8, 8);
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) {
      const int r = i >> 2, p0 = (i >> 1) & 1, p1 = i & 1;
      const int rr = j >> 2, pp0 = (j >> 1) & 1, pp1 = j & 1;
      if (p0 == pp0) ref8(i, j) = phi(static_cast<std::size_t>(r * 2 + p1), static_cast<std::size_t>(rr * 2 + pp1));
    }
  EXPECT_EQ(max_abs_diff(e.matrix(), ref8), 0.0);

  const Operator t = partial_trace(e, {"R", "P1"});
  EXPECT_LT(max_abs_diff(t.matrix(), 2.0 * phi.matrix()), 1e-15);
}

TEST(Embed, MissingLabelIsAnError) {
  EXPECT_THROW(embed(gates::on("Q", gates::X()), RegisterLayout::qubits({"R", "P0"})), LayoutError);
}

TEST(Embed, TraceOfEmbeddingScalesByAddedDimension) {
  Rng rng(4);
  const Operator m(RegisterLayout{{"B", 3}, {"A", 2}}, ginibre(6, 6, rng));
  const RegisterLayout into{{"A", 2}, {"X", 3}, {"B", 3}, {"Y", 2}};
  const Operator back = partial_trace(embed(m, into), {"B", "A"});
  // Trace keeps `into` order (A, B); compare after restoring m's order.
  EXPECT_LT(max_abs_diff(permute(back, m.layout()).matrix(), 6.0 * m.matrix()), 1e-12);
}

TEST(OpNorm, IdentityAndRankOneProjector) {
  EXPECT_NEAR(op_norm(Operator::identity({{"A", 5}})), 1.0, 1e-14);
  Rng rng(9);
  const StateVector v = random_state({{"A", 2}, {"B", 3}}, rng);
  EXPECT_NEAR(op_norm(v.density()), 1.0, 1e-12);
}

TEST(OpNorm, TripleProductOfCloningProjectors) {
  // P Q P with P = Phi+_{RA} (x) I_B, Q = Phi+_{RB} (x) I_A has norm ||PQ||^2 = 1/4.
  const RegisterLayout l = RegisterLayout::qubits({"R", "A", "B"});
  const Operator p = embed(epr_pair("R", "A").density(), l);
  const Operator q = embed(epr_pair("R", "B").density(), l);
  const Operator pqp = p * q * p;
  EXPECT_NEAR(op_norm(Operator(l, pqp.hermitian_part())), 0.25, 1e-12);
}

TEST(OpNorm, RejectsNonHermitian) {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 1) = 1.0;
  EXPECT_THROW(op_norm(Operator({{"A", 2}}, m)), ContractError);
}

TEST(OpNorm, UnitaryInvariance) {
  Rng rng(31);
  const RegisterLayout l{{"A", 2}, {"B", 3}};
  for (int trial = 0; trial < 20; ++trial) {
    const Operator h = random_hermitian(l, rng);
    const Operator u = haar_unitary(l, rng);
    const Operator conj(l, (u.adjoint() * h * u).hermitian_part());
    EXPECT_NEAR(op_norm(conj), op_norm(h), 1e-10);
  }
}

TEST(Eigh, TopEigenpairResidual) {
  Rng rng(33);
  const RegisterLayout l{{"A", 4}, {"B", 4}};
  for (int trial = 0; trial < 10; ++trial) {
    const Operator h = random_hermitian(l, rng);
    const Eigensystem es = eigh(h);
    const Eigen::Index top = es.values.size() - 1;
    const Vector v = es.vectors.col(top);
    EXPECT_LE((h.matrix() * v - es.values(top) * v).norm(), 1e-9);
    for (Eigen::Index i = 1; i < es.values.size(); ++i) EXPECT_LE(es.values(i - 1), es.values(i));
  }
}

TEST(ProdNorm, ProjectorWithItself) {
  const Operator p = embed(epr_pair("R", "A").density(), RegisterLayout::qubits({"R", "A", "B"}));
  EXPECT_NEAR(prod_norm(p, p), 1.0, 1e-12);
}

TEST(ProdNorm, OverlappingEprProjectorsGiveOneHalf) {
  const RegisterLayout l = RegisterLayout::qubits({"R", "A", "B"});
  const Operator p = embed(epr_pair("R", "A").density(), l);
  const Operator q = embed(epr_pair("R", "B").density(), l);
  EXPECT_NEAR(prod_norm(p, q), 0.5, 1e-12);
}

TEST(ProdNorm, OrthogonalProjectorsGiveZero) {
  EXPECT_NEAR(prod_norm(basis_projector("A", 0), basis_projector("A", 1)), 0.0, 1e-12);
}

TEST(ProdNorm, DimensionMismatch) {
  EXPECT_THROW(prod_norm(Operator::identity({{"A", 2}}), Operator::identity({{"A", 3}})), LayoutError);
}

TEST(StateVector, RejectsUnnormalized) {
  EXPECT_THROW(StateVector(RegisterLayout{{"A", 2}}, Vector::Ones(2)), ContractError);
  EXPECT_NO_THROW(StateVector::normalized(RegisterLayout{{"A", 2}}, Vector::Ones(2)));
}

TEST(Operator, StateFlag) {
  Rng rng(1);
  EXPECT_TRUE(random_density({{"A", 3}}, 2, rng).is_state());
  EXPECT_FALSE(Operator::identity({{"A", 2}}).is_state());
  Matrix neg = Matrix::Zero(2, 2);
  neg(0, 0) = 1.5;
  neg(1, 1) = -0.5;
  EXPECT_FALSE(Operator({{"A", 2}}, neg).is_state());
}

TEST(Measure, BellMeasurementOfEprAlwaysGivesPhiPlus) {
  Rng rng(77);
  const StateVector psi = kron(epr_pair("A", "B"), StateVector::basis({{"C", 2}}, 1));
  const std::vector<std::string> labels{"A", "B"};
  for (int i = 0; i < 20; ++i) {
    const Measurement m = measure(psi, labels, bell_basis(), rng);
    EXPECT_EQ(m.outcome, 0u);
    EXPECT_NEAR(m.probability, 1.0, 1e-12);
    EXPECT_EQ(m.remainder.layout().labels(), std::vector<std::string>{"C"});
    EXPECT_NEAR(std::abs(m.remainder[1]), 1.0, 1e-12);
  }
}

TEST(Measure, FrequenciesFollowBornRule) {
  Rng rng(5);
  Vector v(2);
  v << std::sqrt(0.2), std::sqrt(0.8);
  const StateVector psi(RegisterLayout{{"A", 2}}, v);
  const std::vector<std::string> labels{"A"};
  int ones = 0;
  const int trials = 20000;
  for (int i = 0; i < trials; ++i) ones += static_cast<int>(measure(psi, labels, Matrix::Identity(2, 2), rng).outcome);
  EXPECT_NEAR(static_cast<double>(ones) / trials, 0.8, 4 * std::sqrt(0.16 / trials));
}

TEST(ApplyLocal, MatchesEmbeddedOperator) {
  Rng rng(8);
  const RegisterLayout l{{"A", 2}, {"B", 3}, {"C", 2}};
  const StateVector psi = random_state(l, rng);
  const Operator u = haar_unitary(RegisterLayout{{"C", 2}, {"A", 2}}, rng);
  const Vector direct = embed(u, l).matrix() * psi.amplitudes();
  EXPECT_LT((apply_unitary(psi, u).amplitudes() - direct).norm(), 1e-13);
}

TEST(LocalAction, ConjugateMatchesEmbeddedProduct) {
  Rng rng(10);
  const RegisterLayout l{{"A", 2}, {"B", 3}, {"C", 2}};
  const Operator m(l, ginibre(12, 12, rng));
  const Operator u(RegisterLayout{{"C", 2}, {"A", 2}}, ginibre(4, 4, rng));
  const Operator big = embed(u, l);
  EXPECT_LT(max_abs_diff(left_multiply(u, m).matrix(), (big * m).matrix()), 1e-13);
  EXPECT_LT(max_abs_diff(conjugate(m, u).matrix(), (big * m * big.adjoint()).matrix()), 1e-12);
  EXPECT_LT(std::abs(trace_product(m, big) - (m * big).trace()), 1e-12);
}

TEST(ResourceGuard, CapAndOverride) {
  EXPECT_THROW(Operator::identity({{"A", kDefaultMaxDimension + 1}}), ResourceError);
  ::setenv("CLONEGAME_MAX_DIM", "8", 1);
  EXPECT_THROW(Operator::identity(RegisterLayout::qubits({"A", "B", "C", "D"})), ResourceError);
  EXPECT_NO_THROW(Operator::identity(RegisterLayout::qubits({"A", "B", "C"})));
  ::unsetenv("CLONEGAME_MAX_DIM");
  EXPECT_NO_THROW(Operator::identity(RegisterLayout::qubits({"A", "B", "C", "D"})));
}

TEST(Interchange, OperatorRoundTripIsLossless) {
  Rng rng(12);
  for (int trial = 0; trial < 5; ++trial) {
    const Operator m(RegisterLayout{{"R", 2}, {"E", 3}}, ginibre(6, 6, rng));
    const Operator back = operator_from_json(json::parse(to_json(m).dump()));
    EXPECT_EQ(back.layout(), m.layout());
    EXPECT_EQ(max_abs_diff(back.matrix(), m.matrix()), 0.0);
  }
}

TEST(Interchange, RowMajorComplexPairs) {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 1) = cplx(0.0, 2.0);
  const json j = to_json(Operator({{"A", 2}}, m));
  EXPECT_EQ(j["layout"], json::parse(R"([["A",2]])"));
  EXPECT_EQ(j["entries"][1], json::parse("[0.0,2.0]"));
  EXPECT_EQ(j["entries"][2], json::parse("[0.0,0.0]"));
  EXPECT_THROW(operator_from_json(json::parse(R"({"layout":[["A",2]],"entries":[[1,0]]})")), ContractError);
}

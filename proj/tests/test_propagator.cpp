#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <thread>

#include "oracle/oracle.hpp"
#include "test_util.hpp"

using namespace matryoshka;
using cplx = std::complex<double>;

namespace {

Propagator n3_propagator() { return Propagator(build_hamiltonian(ChainSpec::matryoshka(3))); }

}  // namespace

TEST(Evolve, ZeroTimeIsIdentity) {
  std::mt19937_64 rng(1);
  const auto v = rnd::random_state(5, rng);
  const Propagator p(build_hamiltonian(ChainSpec::matryoshka(5)));
  EXPECT_EQ((p.evolve(v, 0.0).amplitudes() - v.amplitudes()).norm(), 0.0);
}

TEST(Evolve, ThreeSiteMatryoshkaAtTStar) {
  const auto out = n3_propagator().evolve(StateVector::all_zero(3), t_star(1.0));
  // Exact phase: -i |1>_2 Psi-_13.
  const Eigen::VectorXcd expected = cplx(0.0, -1.0) * oracle::n3_matryoshka_vector();
  EXPECT_LT((out.amplitudes() - expected).norm(), 1e-12);
}

TEST(Evolve, MatchesClosedForm) {
  const auto p = n3_propagator();
  for (double t : {0.1, 0.37, M_PI / 4, 1.0, 2.5, -0.8}) {
    EXPECT_LT((p.unitary(t) - oracle::closed_form_n3_unitary(1.0, t)).cwiseAbs().maxCoeff(), 1e-12) << t;
  }
  // Scales with lambda.
  const Propagator q(build_hamiltonian(ChainSpec::matryoshka(3, 2.5)));
  EXPECT_LT((q.unitary(0.3) - oracle::closed_form_n3_unitary(2.5, 0.3)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Evolve, ForwardThenBackward) {
  std::mt19937_64 rng(2);
  for (int n : {3, 5, 7}) {
    const auto h = rnd::random_chain_hamiltonian(n, rng);
    const Propagator p(h);
    const auto v = rnd::random_state(n, rng);
    EXPECT_LT((p.evolve(p.evolve(v, 0.9), -0.9).amplitudes() - v.amplitudes()).norm(), 1e-10);
  }
}

TEST(Evolve, DimensionMismatch) {
  EXPECT_THROW(n3_propagator().evolve(StateVector::all_zero(5), 1.0), DimensionError);
}

TEST(Evolve, RejectsOversizedDenseChain) {
  EXPECT_THROW(Propagator(build_hamiltonian(ChainSpec::matryoshka(13)), EigenDecomposition{}), DimensionError);
  EXPECT_THROW(Propagator(build_hamiltonian(ChainSpec::matryoshka(21)), KrylovLanczos{}), DimensionError);
}

TEST(Revival, MatryoshkaReturnsToProductState) {
  const auto p = n3_propagator();
  const double ts = t_star(1.0);
  const StateVector mu = p.evolve(StateVector::all_zero(3), ts);
  EXPECT_NEAR(state_fidelity(p.evolve_until_revival(mu, ts), StateVector::all_zero(3)), 1.0, 1e-12);
  const StateVector mu_prime = p.evolve(StateVector::all_one(3), ts);
  EXPECT_NEAR(state_fidelity(p.evolve_until_revival(mu_prime, ts), StateVector::all_one(3)), 1.0, 1e-12);
  // U(t*)^2 = -1
  const auto twice = p.evolve(StateVector::all_zero(3), 2 * ts);
  EXPECT_LT(std::abs(twice[0] + 1.0), 1e-12);
  EXPECT_LT((p.unitary(2 * ts) + Eigen::MatrixXcd::Identity(8, 8)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Heisenberg, ZeroTimeIsOperatorItself) {
  const auto h = build_hamiltonian(ChainSpec::matryoshka(3));
  const auto p = PauliString::from_letters("XIX");
  const auto out = heisenberg_evolve(h, p, 0.0);
  EXPECT_LT((out.matrix - oracle::kron_pauli(p)).cwiseAbs().maxCoeff(), 1e-12);
  ASSERT_EQ(out.decomposition.size(), 1u);
  EXPECT_EQ(out.decomposition[0].string, p);
}

TEST(Heisenberg, ThreeSitePairOperatorsBecomeZStrings) {
  const auto h = build_hamiltonian(ChainSpec::matryoshka(3));
  const double ts = t_star(1.0);
  // X1X3 -> -Z1Z2
  auto out = heisenberg_evolve(h, PauliString::from_letters("XIX"), ts);
  EXPECT_LT((out.matrix - oracle::kron_pauli(PauliString::from_letters("-ZZI"))).cwiseAbs().maxCoeff(), 1e-12);
  ASSERT_EQ(out.decomposition.size(), 1u);
  EXPECT_EQ(out.decomposition[0].string, PauliString::from_letters("ZZI"));
  EXPECT_NEAR(out.decomposition[0].coefficient.real(), -1.0, 1e-12);
  // Y1Y3 -> -Z2Z3
  out = heisenberg_evolve(h, PauliString::from_letters("YIY"), ts);
  EXPECT_LT((out.matrix - oracle::kron_pauli(PauliString::from_letters("-IZZ"))).cwiseAbs().maxCoeff(), 1e-12);
  ASSERT_EQ(out.decomposition.size(), 1u);
  EXPECT_EQ(out.decomposition[0].string, PauliString::from_letters("IZZ"));
}

TEST(Heisenberg, ClosedFormConjugation) {
  const auto h = build_hamiltonian(ChainSpec::matryoshka(3));
  const Eigen::MatrixXcd u = oracle::closed_form_n3_unitary(1.0, 0.4);
  const auto p = PauliString::from_letters("ZXY");
  const Eigen::MatrixXcd expected = u.adjoint() * oracle::kron_pauli(p) * u;
  EXPECT_LT((heisenberg_evolve(h, p, 0.4).matrix - expected).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Heisenberg, CandidateDecompositionAndLimits) {
  const auto h = build_hamiltonian(ChainSpec::matryoshka(7));
  const auto out = heisenberg_evolve(h, PauliString::pair(7, SiteIndex(3), PauliLetter::X, SiteIndex(5), PauliLetter::X),
                                     t_star(1.0), all_z_strings(7));
  EXPECT_EQ(out.decomposition.size(), 128u);
  const auto no_candidates = heisenberg_evolve(h, PauliString(7), 0.1);
  EXPECT_TRUE(no_candidates.decomposition.empty());
  EXPECT_THROW(heisenberg_evolve(build_hamiltonian(ChainSpec::matryoshka(9)), PauliString(9), 0.1), DimensionError);
}

TEST(Heisenberg, ExhaustiveDecompositionMatchesOracle) {
  std::mt19937_64 rng(4);
  const auto h = rnd::random_chain_hamiltonian(3, rng);
  const auto p = rnd::random_pauli(3, rng).letters_only();
  const auto out = heisenberg_evolve(h, p, 0.7);
  const auto ref = oracle::exhaustive_pauli_decompose(out.matrix);
  ASSERT_EQ(out.decomposition.size(), ref.size());
  for (const auto& r : ref) {
    const auto it = std::find_if(out.decomposition.begin(), out.decomposition.end(),
                                 [&](const PauliComponent& c) { return c.string.letters_only() == r.string; });
    ASSERT_NE(it, out.decomposition.end()) << r.string.str();
    EXPECT_LT(std::abs(it->coefficient - r.coefficient), 1e-12);
  }
}

// Properties over random Hermitian chains.

TEST(PropagatorProperties, NormAndEnergyConservation) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 12; ++trial) {
    const int n = 2 + trial % 9;  // up to 10
    const auto h = trial % 2 ? rnd::random_chain_hamiltonian(n, rng) : rnd::random_pauli_hamiltonian(n, 3 * n, rng);
    const Propagator p(h);
    const auto v = rnd::random_state(n, rng);
    const auto w = p.evolve(v, 1.3);
    EXPECT_LT(std::abs(w.norm() - 1.0), 1e-10);
    EXPECT_NEAR(energy(h, w), energy(h, v), 1e-9);
  }
}

TEST(PropagatorProperties, KrylovAgreesWithEigendecomposition) {
  std::mt19937_64 rng(37);
  for (int n : {3, 5, 6, 8, 10}) {
    const auto h = rnd::random_chain_hamiltonian(n, rng);
    const Propagator exact(h, EigenDecomposition{});
    const Propagator krylov(h, KrylovLanczos{});
    const auto v = rnd::random_state(n, rng);
    for (double t : {0.2, 1.7, -2.4}) {
      EXPECT_LT((exact.evolve(v, t).amplitudes() - krylov.evolve(v, t).amplitudes()).norm(), 1e-8) << n << " " << t;
    }
  }
}

TEST(PropagatorProperties, KrylovHandlesLargeChains) {
  const auto spec = ChainSpec::matryoshka(13);
  const Propagator p(build_hamiltonian(spec));
  ASSERT_TRUE(std::holds_alternative<KrylovLanczos>(p.method()));
  const auto mu = p.evolve(StateVector::all_zero(13), t_star(1.0));
  EXPECT_LT(std::abs(mu.norm() - 1.0), 1e-10);
  // Revival after 2t*.
  EXPECT_NEAR(state_fidelity(p.evolve(mu, t_star(1.0)), StateVector::all_zero(13)), 1.0, 1e-8);
}

TEST(PropagatorProperties, KrylovReportsNonConvergence) {
  std::mt19937_64 rng(41);
  const auto h = rnd::random_chain_hamiltonian(6, rng);
  const Propagator p(h, KrylovLanczos{1e-300, 2});
  EXPECT_THROW(p.evolve(rnd::random_state(6, rng), 5.0), ConvergenceError);
  EXPECT_THROW(Propagator(h, KrylovLanczos{1e-10, 1}), ValidationError);
}

TEST(PropagatorProperties, Composition) {
  std::mt19937_64 rng(43);
  for (int n : {3, 6, 9}) {
    const auto h = rnd::random_chain_hamiltonian(n, rng);
    const Propagator p(h);
    const auto v = rnd::random_state(n, rng);
    const auto a = p.evolve(p.evolve(v, 0.4), 1.1);
    const auto b = p.evolve(v, 1.5);
    EXPECT_LT((a.amplitudes() - b.amplitudes()).norm(), 1e-9);
  }
}

TEST(PropagatorProperties, HeisenbergConsistentWithSchrodinger) {
  std::mt19937_64 rng(47);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 2 + trial % 5;
    const auto h = rnd::random_chain_hamiltonian(n, rng);
    const Propagator p(h);
    const auto v = rnd::random_state(n, rng);
    const auto op = rnd::random_pauli(n, rng).letters_only();
    const double t = 0.3 + 0.2 * trial;
    const auto heis = heisenberg_evolve(p, op, t);
    const double lhs = v.amplitudes().dot(heis.matrix * v.amplitudes()).real();
    EXPECT_NEAR(lhs, expectation(p.evolve(v, t), op), 1e-9);
  }
}

TEST(PropagatorProperties, ConcurrentEvolveIsDeterministic) {
  std::mt19937_64 rng(53);
  const Propagator p(rnd::random_chain_hamiltonian(7, rng));
  const auto v = rnd::random_state(7, rng);
  const auto ref = p.evolve(v, 0.77);
  std::vector<Eigen::VectorXcd> out(4);
  std::vector<std::thread> pool;
  for (int k = 0; k < 4; ++k) pool.emplace_back([&, k] { out[k] = p.evolve(v, 0.77).amplitudes(); });
  for (auto& th : pool) th.join();
  for (const auto& o : out) EXPECT_EQ((o - ref.amplitudes()).norm(), 0.0);
}

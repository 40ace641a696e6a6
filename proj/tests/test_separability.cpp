#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <random>

#include "dcn/gates.hpp"
#include "dcn/separability.hpp"
#include "test_support.hpp"

namespace dcn {
namespace {

using testing::amps;
using testing::haar_state;
using testing::pi;
using testing::polar;
using testing::product_for;

std::vector<PartitionSpec> splits(int n) {
  std::vector<PartitionSpec> out;
  for (int high = 1; high < n; ++high) out.push_back(PartitionSpec{std::uint64_t{1} << high, std::uint64_t{1} << (n - high), {}});
  return out;
}

TEST(Separability, PartitionValidation) {
  EXPECT_NO_THROW(validate_partition(PartitionSpec{2, 4, {}}, 3));
  EXPECT_THROW(validate_partition(PartitionSpec{1, 8, {}}, 3), std::invalid_argument);
  EXPECT_THROW(validate_partition(PartitionSpec{3, 4, {}}, 3), std::invalid_argument);
  EXPECT_THROW(validate_partition(PartitionSpec{2, 2, {}}, 3), std::invalid_argument);
  EXPECT_THROW(validate_partition(PartitionSpec{2, 4, {1, 2}}, 3), std::invalid_argument);
  EXPECT_THROW(validate_partition(PartitionSpec{2, 4, {1, 2, 2}}, 3), std::invalid_argument);
  EXPECT_THROW(validate_partition(PartitionSpec{2, 4, {1, 2, 4}}, 3), std::out_of_range);
}

TEST(Separability, PartitionQubitsFollowOrder) {
  const auto [high, low] = partition_qubits(PartitionSpec{2, 4, {3, 1, 2}}, 3);
  EXPECT_EQ(low, (std::vector<int>{3, 1}));
  EXPECT_EQ(high, (std::vector<int>{2}));
  const auto [h2, l2] = partition_qubits(PartitionSpec{4, 2, {}}, 3);
  EXPECT_EQ(l2, (std::vector<int>{1}));
  EXPECT_EQ(h2, (std::vector<int>{2, 3}));
}

TEST(Separability, IsolatePutsQubitsInHighBlock) {
  const std::array<int, 1> q{2};
  const PartitionSpec part = isolate(q, 3);
  EXPECT_EQ(part.p, 2u);
  EXPECT_EQ(part.q, 4u);
  EXPECT_EQ(part.qubit_order, (std::vector<int>{1, 3, 2}));
}

TEST(Separability, ReshapeIsRowMajor) {
  std::mt19937_64 rng(2);
  const StateVector s = haar_state(3, rng);
  const auto gamma = reshape(s, 2, 4);
  for (Eigen::Index k = 0; k < 2; ++k)
    for (Eigen::Index r = 0; r < 4; ++r) EXPECT_EQ(gamma(k, r), s[k * 4 + r]);
}

TEST(Separability, TwoQubitProductExample) {
  const StateVector s = testing::two_qubit_product();
  const auto report = check_two_qubit(s);
  EXPECT_TRUE(report.separable);
  EXPECT_FALSE(report.marginal);
  EXPECT_LT(report.max_violation, 1e-12);
  ASSERT_TRUE(report.factor_p && report.factor_q);
  EXPECT_TRUE(equal_up_to_global_phase(tensor(*report.factor_p, *report.factor_q), s, 1e-10));
  // Qubit #1 factor is proportional to (1/sqrt3, sqrt(2/3) e^{-i pi/4}).
  const std::complex<double> ratio = (*report.factor_q)[1] / (*report.factor_q)[0];
  EXPECT_NEAR(std::abs(ratio - polar(std::sqrt(2.0), -pi / 4)), 0, 1e-12);
  // Qubit #2 ratio |1>:|0> is -1/sqrt3.
  const std::complex<double> high = (*report.factor_p)[1] / (*report.factor_p)[0];
  EXPECT_NEAR(std::abs(high + 1 / std::sqrt(3.0)), 0, 1e-12);
}

TEST(Separability, AmplitudeAndPhaseEntangledExamples) {
  for (const StateVector& s : {testing::amplitude_entangled(), testing::phase_entangled()}) {
    const auto report = check_two_qubit(s);
    EXPECT_FALSE(report.separable);
    EXPECT_FALSE(report.marginal);
    EXPECT_FALSE(report.factor_p.has_value());
    EXPECT_GT(report.max_violation, 1e-3);
  }
}

TEST(Separability, BellStatesEntangledWithUnitConcurrence) {
  for (int b = 0; b < 4; ++b) {
    const StateVector s = testing::bell(b);
    EXPECT_FALSE(check_two_qubit(s).separable);
    EXPECT_NEAR(concurrence(s), 1.0, 1e-12);
  }
}

TEST(Separability, ConcurrenceOfExamples) {
  EXPECT_NEAR(concurrence(testing::two_qubit_product()), 0.0, 1e-12);
  EXPECT_NEAR(concurrence(testing::amplitude_entangled()), std::sqrt(3.0) / 6, 1e-12);
  EXPECT_NEAR(concurrence(testing::pre_measurement()), std::sqrt(3.0) / 2, 1e-12);
}

TEST(Separability, ConcurrenceInvariantUnderLocalUnitaries) {
  std::mt19937_64 rng(12);
  for (int t = 0; t < 200; ++t) {
    const StateVector s = haar_state(2, rng);
    const StateVector u =
        apply_single(apply_single(s, 1, testing::random_unitary(rng)), 2, testing::random_unitary(rng));
    EXPECT_NEAR(concurrence(s), concurrence(u), 1e-9);
  }
}

TEST(Separability, ConstructedProductsAreSeparableForEverySplitAndOrder) {
  std::mt19937_64 rng(100);
  for (int n = 2; n <= 6; ++n) {
    for (PartitionSpec part : splits(n)) {
      for (int t = 0; t < 10; ++t) {
        part.qubit_order = t == 0 ? std::vector<int>{} : testing::random_order(n, rng);
        const StateVector s = product_for(part, n, rng);
        const auto report = check_pq(s, part);
        ASSERT_TRUE(report.separable) << "n=" << n << " p=" << part.p;
        EXPECT_FALSE(report.witness.has_value());
        EXPECT_TRUE(oracle_separable(s, part));
        const StateVector rebuilt = tensor(*report.factor_p, *report.factor_q);
        EXPECT_TRUE(equal_up_to_global_phase(rebuilt, arrange(s, part), 1e-10));
        EXPECT_NEAR(report.factor_p->norm(), 1.0, 1e-12);
        EXPECT_NEAR(report.factor_q->norm(), 1.0, 1e-12);
      }
    }
  }
}

TEST(Separability, SparseProductsWithZeroAnchorsAreSeparable) {
  std::mt19937_64 rng(101);
  for (int n = 2; n <= 6; ++n) {
    for (PartitionSpec part : splits(n)) {
      for (int t = 0; t < 20; ++t) {
        part.qubit_order = testing::random_order(n, rng);
        const StateVector s = product_for(part, n, rng, 0.5);
        const auto report = check_pq(s, part);
        ASSERT_TRUE(report.separable);
        EXPECT_TRUE(equal_up_to_global_phase(tensor(*report.factor_p, *report.factor_q), arrange(s, part), 1e-10));
      }
    }
  }
}

TEST(Separability, HaarStatesAreEntangled) {
  std::mt19937_64 rng(102);
  for (int n = 2; n <= 6; ++n)
    for (const PartitionSpec& part : splits(n))
      for (int t = 0; t < 10; ++t) {
        const StateVector s = haar_state(n, rng);
        const auto report = check_pq(s, part);
        EXPECT_FALSE(report.separable);
        EXPECT_TRUE(report.witness.has_value());
        EXPECT_FALSE(oracle_separable(s, part));
      }
}

TEST(Separability, AgreesWithMinorsOracleOnMixedEnsemble) {
  std::mt19937_64 rng(103);
  int checked = 0;
  for (int t = 0; t < 3000; ++t) {
    const int n = 2 + static_cast<int>(rng() % 5);
    std::vector<PartitionSpec> parts = splits(n);
    PartitionSpec part = parts[rng() % parts.size()];
    part.qubit_order = testing::random_order(n, rng);
    StateVector s = StateVector::basis(n, 0);
    switch (t % 4) {
      case 0: s = haar_state(n, rng); break;
      case 1: s = product_for(part, n, rng); break;
      case 2: s = product_for(part, n, rng, 0.6); break;
      default: s = testing::sparse_state(n, rng, 0.8); break;
    }
    const auto report = check_pq(s, part);
    ASSERT_EQ(report.separable, oracle_separable(s, part)) << "trial " << t;
    ++checked;
  }
  EXPECT_EQ(checked, 3000);
}

TEST(Separability, ColumnZeroCounterexample) {
  const StateVector s = testing::column_zero_state();
  const PartitionSpec part{2, 4, {}};
  // The relation through c1 alone would pass.
  EXPECT_LT(std::abs(s[1] * s[7] - s[3] * s[5]), 1e-12);
  const auto report = check_pq(s, part);
  EXPECT_FALSE(report.separable);
  ASSERT_TRUE(report.ratios);
  EXPECT_EQ(report.ratios->i0, 1);
  EXPECT_EQ(report.ratios->k0, 0);
  EXPECT_EQ(report.ratios->r0, 1);
  ASSERT_TRUE(report.witness);
  EXPECT_EQ(*report.witness, (std::pair<Eigen::Index, Eigen::Index>{1, 0}));
  EXPECT_GT(std::abs(s[4]), 0.1);
  EXPECT_FALSE(oracle_separable(s, part));
}

TEST(Separability, FourFourSplitExample) {
  const StateVector s = testing::four_four_state();
  const auto report = check_pq(s, PartitionSpec{4, 4, {}});
  ASSERT_TRUE(report.separable);
  ASSERT_TRUE(report.ratios);
  EXPECT_EQ(report.ratios->r0, 0);
  EXPECT_NEAR(std::abs(report.ratios->m(1)), 0, 1e-10);
  EXPECT_NEAR(std::abs(report.ratios->m(2) - (-1.0)), 0, 1e-10);
  EXPECT_NEAR(std::abs(report.ratios->m(3) / report.ratios->m(2) - polar(1, pi / 2)), 0, 1e-10);
  for (int q = 1; q <= 4; ++q) {
    const auto r = check_qubit(s, q);
    EXPECT_FALSE(r.separable) << "qubit " << q;
    EXPECT_FALSE(r.marginal);
  }
}

TEST(Separability, PartiallySeparableThreeQubitState) {
  const StateVector s = testing::partially_separable3();
  const auto q1 = check_qubit(s, 1);
  ASSERT_TRUE(q1.separable);
  const std::complex<double> ratio = (*q1.factor_p)[1] / (*q1.factor_p)[0];
  EXPECT_NEAR(std::abs(ratio - polar(1 / std::sqrt(3.0), -pi / 4)), 0, 1e-12);
  EXPECT_FALSE(check_qubit(s, 2).separable);
  EXPECT_FALSE(check_qubit(s, 3).separable);
  EXPECT_TRUE(check_pq(s, PartitionSpec{4, 2, {}}).separable);
}

TEST(Separability, CheckQubitFactorIsThatQubit) {
  std::mt19937_64 rng(104);
  for (int t = 0; t < 50; ++t) {
    const int n = 2 + t % 4;
    const int q = 1 + static_cast<int>(rng() % static_cast<unsigned>(n));
    const StateVector single = haar_state(1, rng);
    const StateVector rest = haar_state(n - 1, rng);
    // Build single (x) rest with the single qubit moved to position q.
    std::vector<int> order;
    for (int k = 1; k <= n; ++k)
      if (k != q) order.push_back(k);
    order.push_back(q);
    const StateVector s = permute_qubits(tensor(single, rest), order);
    const auto report = check_qubit(s, q);
    ASSERT_TRUE(report.separable);
    EXPECT_TRUE(equal_up_to_global_phase(*report.factor_p, single, 1e-10));
  }
}

TEST(Separability, ExtractFactorsMatchesReport) {
  std::mt19937_64 rng(105);
  PartitionSpec part{4, 8, {}};
  part.qubit_order = testing::random_order(5, rng);
  const StateVector s = product_for(part, 5, rng);
  const auto report = check_pq(s, part);
  ASSERT_TRUE(report.separable);
  const auto [fp, fq] = extract_factors(s, part, *report.ratios);
  EXPECT_EQ(fp, *report.factor_p);
  EXPECT_EQ(fq, *report.factor_q);
  const StateVector e = haar_state(5, rng);
  EXPECT_THROW(extract_factors(e, part, *check_pq(e, part).ratios), std::invalid_argument);
}

TEST(Separability, MarginalBandAroundTolerance) {
  const double eps = 3e-8;
  // Product state perturbed on |11> so that |c0 c3 - c1 c2| = eps / 2.
  Amplitudes<double> a(4);
  a << 0.5, 0.5, 0.5, 0.5 + eps;
  const StateVector s = StateVector::from_amplitudes(2, a, NormMode::normalize);
  const auto report = check_two_qubit(s);
  EXPECT_FALSE(report.separable);
  EXPECT_TRUE(report.marginal);
  const auto far = check_two_qubit(testing::bell(0));
  EXPECT_FALSE(far.marginal);
  SeparabilityTolerances loose;
  loose.sep = 1e-6;
  loose.residual = 1e-6;
  EXPECT_TRUE(check_two_qubit(s, loose).separable);
}

TEST(Separability, ZeroStateAnchorRejected) {
  SeparabilityTolerances huge;
  huge.zero = 2.0;
  EXPECT_THROW(check_pq(StateVector::basis(2, 0), PartitionSpec{2, 2, {}}, huge), std::invalid_argument);
}

TEST(Separability, FullDecompositionOfProducts) {
  std::mt19937_64 rng(106);
  for (int n = 1; n <= 6; ++n) {
    const StateVector s = testing::product_state(n, rng);
    const auto blocks = full_decomposition(s);
    ASSERT_EQ(blocks.size(), static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) EXPECT_EQ(blocks[static_cast<std::size_t>(k)].qubits, (std::vector<int>{k + 1}));
    EXPECT_TRUE(equal_up_to_global_phase(recompose(std::span<const Block<double>>(blocks)), s, 1e-10));
  }
}

TEST(Separability, FullDecompositionOfGhzIsOneBlock) {
  Amplitudes<double> a = Amplitudes<double>::Zero(8);
  a[0] = a[7] = 1 / std::sqrt(2.0);
  const StateVector ghz = StateVector::from_amplitudes(3, a);
  const auto blocks = full_decomposition(ghz);
  ASSERT_EQ(blocks.size(), 1u);
  EXPECT_EQ(blocks[0].qubits, (std::vector<int>{1, 2, 3}));
}

TEST(Separability, FullDecompositionMixedBlocks) {
  // Bell pair on qubits {1,3} times a random qubit 2 and a random pair {4,5}.
  std::mt19937_64 rng(107);
  const StateVector bell = testing::bell(0);
  const StateVector q2 = haar_state(1, rng);
  const StateVector pair = haar_state(2, rng);
  // tensor(pair, tensor(q2, bell)) has positions 1,2 = bell, 3 = q2, 4,5 = pair.
  const StateVector arranged = tensor(pair, tensor(q2, bell));
  const std::array<int, 5> order{1, 3, 2, 4, 5};
  const StateVector s = permute_qubits(arranged, order);
  const auto blocks = full_decomposition(s);
  ASSERT_EQ(blocks.size(), 3u);
  EXPECT_EQ(blocks[0].qubits, (std::vector<int>{1, 3}));
  EXPECT_EQ(blocks[1].qubits, (std::vector<int>{2}));
  EXPECT_EQ(blocks[2].qubits, (std::vector<int>{4, 5}));
  EXPECT_TRUE(equal_up_to_global_phase(blocks[1].factor, q2, 1e-10));
  EXPECT_TRUE(equal_up_to_global_phase(recompose(std::span<const Block<double>>(blocks)), s, 1e-10));
}

TEST(Separability, FullDecompositionRecomposesRandomStates) {
  std::mt19937_64 rng(108);
  for (int t = 0; t < 40; ++t) {
    const int n = 2 + t % 5;
    PartitionSpec part = splits(n)[static_cast<std::size_t>(t) % static_cast<std::size_t>(n - 1)];
    part.qubit_order = testing::random_order(n, rng);
    const StateVector s = t % 2 ? product_for(part, n, rng) : haar_state(n, rng);
    const auto blocks = full_decomposition(s);
    EXPECT_TRUE(equal_up_to_global_phase(recompose(std::span<const Block<double>>(blocks)), s, 1e-9));
    if (t % 2) {
      EXPECT_GE(blocks.size(), 2u);
    }
  }
}

TEST(Separability, FloatInstantiation) {
  using FState = BasicState<float>;
  Amplitudes<float> a(4);
  a << 0.5f, 0.5f, 0.5f, 0.5f;
  const FState s = FState::from_amplitudes(2, a, NormMode::validate, 1e-6f);
  SeparabilityTolerances tol;
  tol.sep = 1e-5;
  tol.residual = 1e-5;
  const auto report = check_pq(s, PartitionSpec{2, 2, {}}, tol);
  EXPECT_TRUE(report.separable);
  EXPECT_TRUE(oracle_separable(s, PartitionSpec{2, 2, {}}, tol));
  EXPECT_NEAR(concurrence(s), 0.0f, 1e-6f);
  const auto blocks = full_decomposition(s, tol);
  EXPECT_EQ(blocks.size(), 2u);
}

}  // namespace
}  // namespace dcn

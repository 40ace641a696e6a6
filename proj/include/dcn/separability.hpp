#pragma once

// PQ-separability of pure states in the computational basis.
//
// A state of dimension N = P*Q is viewed as a P x Q matrix gamma(k, r) = c[k*Q + r]; the high-order
// qubits index rows and the low-order qubits index columns. With c[i0] the first nonzero amplitude
// (i0 = k0*Q + r0) the state is PQ-separable iff, for every row k > k0 and every column r,
//
//     c[i0] * c[k*Q + r] == c[k0*Q + r] * c[k*Q + r0].
//
// When it holds, every column is a fixed multiple m_r = gamma(k0, r) / gamma(k0, r0) of column r0,
// which gives the factors directly: alpha_k = gamma(k, r0), beta_r = m_r (beta_r0 = 1, zero left of r0).

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "dcn/qstate.hpp"

namespace dcn {

struct SeparabilityTolerances {
  double zero = 1e-10;      // "first nonzero coefficient" threshold
  double sep = 1e-8;        // bound on |c_i0 c_kr - c_k0r c_kr0|
  double residual = 1e-8;   // bound on ||state - factor_p (x) factor_q||
  double marginal_band = 10.0;
};

/// Bipartition of the register into a P-dimensional high block and a Q-dimensional low block.
///
/// `qubit_order` rearranges the register before splitting: new qubit j is original qubit
/// qubit_order[j-1]. The low block is the first log2(Q) entries, the high block the rest.
/// An empty order means the identity.
struct PartitionSpec {
  std::uint64_t p = 2;
  std::uint64_t q = 2;
  std::vector<int> qubit_order;

  friend bool operator==(const PartitionSpec&, const PartitionSpec&) = default;
};

inline std::vector<int> identity_order(int n) {
  std::vector<int> order(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) order[static_cast<std::size_t>(k)] = k + 1;
  return order;
}

inline std::vector<int> effective_order(const PartitionSpec& part, int n) {
  return part.qubit_order.empty() ? identity_order(n) : part.qubit_order;
}

inline void validate_partition(const PartitionSpec& part, int n) {
  const auto is_pow2_ge2 = [](std::uint64_t v) { return v >= 2 && std::has_single_bit(v); };
  if (!is_pow2_ge2(part.p) || !is_pow2_ge2(part.q))
    throw std::invalid_argument("P and Q must be powers of two >= 2");
  if (part.p * part.q != (std::uint64_t{1} << n))
    throw std::invalid_argument("P*Q = " + std::to_string(part.p * part.q) + " does not match 2^" +
                                std::to_string(n));
  if (!part.qubit_order.empty()) {
    if (static_cast<int>(part.qubit_order.size()) != n)
      throw std::invalid_argument("qubit order must list every qubit once");
    detail::check_qubits(part.qubit_order, n);
  }
}

/// Original qubit numbers in the (high, low) blocks, each ascending by position in the rearranged register.
inline std::pair<std::vector<int>, std::vector<int>> partition_qubits(const PartitionSpec& part, int n) {
  const std::vector<int> order = effective_order(part, n);
  const auto low = static_cast<std::size_t>(std::countr_zero(part.q));
  return {std::vector<int>(order.begin() + static_cast<std::ptrdiff_t>(low), order.end()),
          std::vector<int>(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(low))};
}

/// Partition that isolates `qubits` (in the given order) as the high block against the remaining
/// qubits (ascending) as the low block.
inline PartitionSpec isolate(std::span<const int> qubits, int n) {
  std::vector<int> order;
  for (int k = 1; k <= n; ++k)
    if (std::find(qubits.begin(), qubits.end(), k) == qubits.end()) order.push_back(k);
  order.insert(order.end(), qubits.begin(), qubits.end());
  const int high = static_cast<int>(qubits.size());
  return PartitionSpec{std::uint64_t{1} << high, std::uint64_t{1} << (n - high), std::move(order)};
}

template <typename Scalar>
using ComplexMatrix = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
struct RatioSet {
  Eigen::Index r0 = 0;
  Eigen::Index k0 = 0;
  Eigen::Index i0 = 0;
  std::vector<std::complex<Scalar>> ratios;  // m_r for r = r0+1 .. Q-1

  std::complex<Scalar> m(Eigen::Index r) const { return ratios.at(static_cast<std::size_t>(r - r0 - 1)); }
};

template <typename Scalar>
struct SeparabilityReport {
  bool separable = false;
  bool marginal = false;
  PartitionSpec partition;
  std::optional<RatioSet<Scalar>> ratios;
  std::optional<BasicState<Scalar>> factor_p;
  std::optional<BasicState<Scalar>> factor_q;
  Scalar max_violation = 0;
  std::optional<std::pair<Eigen::Index, Eigen::Index>> witness;  // (k, r)
};

/// gamma(k, r) = amplitude at k*Q + r.
template <typename Scalar>
ComplexMatrix<Scalar> reshape(const BasicState<Scalar>& state, std::uint64_t p, std::uint64_t q) {
  if (p * q != static_cast<std::uint64_t>(state.dim()))
    throw std::invalid_argument("reshape: P*Q must equal the state dimension");
  using RowMajor = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  return Eigen::Map<const RowMajor>(state.amplitudes().data(), static_cast<Eigen::Index>(p),
                                    static_cast<Eigen::Index>(q));
}

template <typename Scalar>
BasicState<Scalar> arrange(const BasicState<Scalar>& state, const PartitionSpec& part) {
  if (part.qubit_order.empty()) return state;
  return permute_qubits(state, std::span<const int>(inverse_permutation(part.qubit_order)));
}

namespace detail {

template <typename Scalar>
std::optional<Eigen::Index> first_nonzero(const ComplexMatrix<Scalar>& gamma, double zero_tol) {
  for (Eigen::Index k = 0; k < gamma.rows(); ++k)
    for (Eigen::Index r = 0; r < gamma.cols(); ++r)
      if (std::abs(gamma(k, r)) > Scalar(zero_tol)) return k * gamma.cols() + r;
  return std::nullopt;
}

template <typename Scalar>
bool within_marginal_band(Scalar violation, const SeparabilityTolerances& tol) {
  return violation >= Scalar(tol.sep / tol.marginal_band) && violation <= Scalar(tol.sep * tol.marginal_band);
}

template <typename Scalar>
std::pair<BasicState<Scalar>, BasicState<Scalar>> factors_from(const ComplexMatrix<Scalar>& gamma,
                                                               const RatioSet<Scalar>& ratios) {
  const Eigen::Index p = gamma.rows();
  const Eigen::Index q = gamma.cols();
  Amplitudes<Scalar> alpha = Amplitudes<Scalar>::Zero(p);
  Amplitudes<Scalar> beta = Amplitudes<Scalar>::Zero(q);
  for (Eigen::Index k = ratios.k0; k < p; ++k) alpha[k] = gamma(k, ratios.r0);
  beta[ratios.r0] = std::complex<Scalar>(1);
  for (Eigen::Index r = ratios.r0 + 1; r < q; ++r) beta[r] = ratios.m(r);
  const int np = std::countr_zero(static_cast<std::uint64_t>(p));
  const int nq = std::countr_zero(static_cast<std::uint64_t>(q));
  return {BasicState<Scalar>::from_amplitudes(np, std::move(alpha), NormMode::normalize),
          BasicState<Scalar>::from_amplitudes(nq, std::move(beta), NormMode::normalize)};
}

}  // namespace detail

/// Builds the factors of a separable state from its ratio set. The global phase lands in factor_p.
template <typename Scalar>
std::pair<BasicState<Scalar>, BasicState<Scalar>> extract_factors(const BasicState<Scalar>& state,
                                                                  const PartitionSpec& part,
                                                                  const RatioSet<Scalar>& ratios,
                                                                  const SeparabilityTolerances& tol = {}) {
  validate_partition(part, state.qubits());
  const BasicState<Scalar> arranged = arrange(state, part);
  auto factors = detail::factors_from(reshape(arranged, part.p, part.q), ratios);
  const Scalar residual = (arranged.amplitudes() - tensor(factors.first, factors.second).amplitudes()).norm();
  if (residual > Scalar(tol.residual))
    throw std::invalid_argument("extract_factors: state is not separable for this partition");
  return factors;
}

template <typename Scalar>
SeparabilityReport<Scalar> check_pq(const BasicState<Scalar>& state, const PartitionSpec& part,
                                    const SeparabilityTolerances& tol = {}) {
  validate_partition(part, state.qubits());
  const BasicState<Scalar> arranged = arrange(state, part);
  const ComplexMatrix<Scalar> gamma = reshape(arranged, part.p, part.q);
  const auto first = detail::first_nonzero(gamma, tol.zero);
  if (!first) throw std::invalid_argument("check_pq: zero state");

  SeparabilityReport<Scalar> report;
  report.partition = part;
  RatioSet<Scalar> ratios;
  ratios.i0 = *first;
  ratios.k0 = *first / gamma.cols();
  ratios.r0 = *first % gamma.cols();
  const std::complex<Scalar> anchor = gamma(ratios.k0, ratios.r0);
  for (Eigen::Index r = ratios.r0 + 1; r < gamma.cols(); ++r) ratios.ratios.push_back(gamma(ratios.k0, r) / anchor);

  // Full column range: for r < r0 the relation reduces to gamma(k, r) == 0.
  for (Eigen::Index k = ratios.k0 + 1; k < gamma.rows(); ++k) {
    for (Eigen::Index r = 0; r < gamma.cols(); ++r) {
      const Scalar v = std::abs(anchor * gamma(k, r) - gamma(ratios.k0, r) * gamma(k, ratios.r0));
      if (v > report.max_violation) {
        report.max_violation = v;
        report.witness = std::pair{k, r};
      }
    }
  }
  report.separable = report.max_violation <= Scalar(tol.sep);
  report.marginal = detail::within_marginal_band(report.max_violation, tol);
  if (report.separable) {
    report.witness.reset();
    auto factors = detail::factors_from(gamma, ratios);
    const Scalar residual =
        (arranged.amplitudes() - tensor(factors.first, factors.second).amplitudes()).norm();
    if (residual <= Scalar(tol.residual)) {
      report.factor_p = std::move(factors.first);
      report.factor_q = std::move(factors.second);
    } else {
      // Relations hold to tolerance but the anchor is too small to reconstruct from.
      report.separable = false;
      report.marginal = true;
    }
  }
  report.ratios = std::move(ratios);
  return report;
}

/// Two-qubit criterion alpha00*alpha11 == alpha01*alpha10.
template <typename Scalar>
SeparabilityReport<Scalar> check_two_qubit(const BasicState<Scalar>& state, const SeparabilityTolerances& tol = {}) {
  if (state.qubits() != 2) throw std::invalid_argument("check_two_qubit needs a 2-qubit state");
  SeparabilityReport<Scalar> report = check_pq(state, PartitionSpec{2, 2, {}}, tol);
  report.max_violation = std::abs(state[0] * state[3] - state[1] * state[2]);
  report.marginal = detail::within_marginal_band(report.max_violation, tol);
  return report;
}

template <typename Scalar>
Scalar concurrence(const BasicState<Scalar>& state) {
  if (state.qubits() != 2) throw std::invalid_argument("concurrence needs a 2-qubit state");
  return Scalar(2) * std::abs(state[3] * state[0] - state[2] * state[1]);
}

/// Is qubit `qubit` separable from the rest? factor_p of the report is that qubit's state.
template <typename Scalar>
SeparabilityReport<Scalar> check_qubit(const BasicState<Scalar>& state, int qubit,
                                       const SeparabilityTolerances& tol = {}) {
  const int selected[] = {qubit};
  detail::check_qubits(selected, state.qubits());
  if (state.qubits() < 2) throw std::invalid_argument("check_qubit needs at least 2 qubits");
  return check_pq(state, isolate(selected, state.qubits()), tol);
}

/// Independent check: every 2x2 minor of the P x Q matrix vanishes (Schmidt rank one).
template <typename Scalar>
bool oracle_separable(const BasicState<Scalar>& state, const PartitionSpec& part,
                      const SeparabilityTolerances& tol = {}) {
  validate_partition(part, state.qubits());
  const ComplexMatrix<Scalar> gamma = reshape(arrange(state, part), part.p, part.q);
  for (Eigen::Index a = 0; a < gamma.rows(); ++a)
    for (Eigen::Index b = a + 1; b < gamma.rows(); ++b)
      for (Eigen::Index c = 0; c < gamma.cols(); ++c)
        for (Eigen::Index d = c + 1; d < gamma.cols(); ++d)
          if (std::abs(gamma(a, c) * gamma(b, d) - gamma(a, d) * gamma(b, c)) > Scalar(tol.sep)) return false;
  return true;
}

template <typename Scalar>
struct Block {
  std::vector<int> qubits;  // ascending; qubits[j] is qubit j+1 of `factor`
  BasicState<Scalar> factor;
};

namespace detail {

template <typename Scalar>
void decompose(const std::vector<int>& qubits, const BasicState<Scalar>& state, const SeparabilityTolerances& tol,
               std::vector<Block<Scalar>>& out) {
  const int m = static_cast<int>(qubits.size());
  // Subsets of the lower m-1 local positions, ascending by bitmask; each bipartition appears once.
  for (std::uint32_t mask = 1; m > 1 && mask < (std::uint32_t{1} << (m - 1)); ++mask) {
    std::vector<int> low_local, high_local;
    for (int j = 1; j <= m; ++j) ((mask >> (j - 1)) & 1u ? low_local : high_local).push_back(j);
    std::vector<int> order = low_local;
    order.insert(order.end(), high_local.begin(), high_local.end());
    const PartitionSpec part{std::uint64_t{1} << high_local.size(), std::uint64_t{1} << low_local.size(),
                             std::move(order)};
    SeparabilityReport<Scalar> report = check_pq(state, part, tol);
    if (!report.separable) continue;
    std::vector<int> low, high;
    for (int j : low_local) low.push_back(qubits[static_cast<std::size_t>(j - 1)]);
    for (int j : high_local) high.push_back(qubits[static_cast<std::size_t>(j - 1)]);
    decompose(low, *report.factor_q, tol, out);
    decompose(high, *report.factor_p, tol, out);
    return;
  }
  out.push_back(Block<Scalar>{qubits, state});
}

}  // namespace detail

/// Finest product decomposition, blocks ordered by their lowest qubit.
template <typename Scalar>
std::vector<Block<Scalar>> full_decomposition(const BasicState<Scalar>& state, const SeparabilityTolerances& tol = {}) {
  std::vector<Block<Scalar>> blocks;
  detail::decompose(identity_order(state.qubits()), state, tol, blocks);
  std::sort(blocks.begin(), blocks.end(),
            [](const Block<Scalar>& a, const Block<Scalar>& b) { return a.qubits.front() < b.qubits.front(); });
  return blocks;
}

/// Tensor of all blocks, relabelled back to the original qubit numbers.
template <typename Scalar>
BasicState<Scalar> recompose(std::span<const Block<Scalar>> blocks) {
  if (blocks.empty()) throw std::invalid_argument("recompose: no blocks");
  BasicState<Scalar> acc = blocks.front().factor;
  std::vector<int> order = blocks.front().qubits;  // order[j] = original qubit of position j+1
  for (std::size_t b = 1; b < blocks.size(); ++b) {
    acc = tensor(blocks[b].factor, acc);
    order.insert(order.end(), blocks[b].qubits.begin(), blocks[b].qubits.end());
  }
  return permute_qubits(acc, std::span<const int>(order));
}

}  // namespace dcn

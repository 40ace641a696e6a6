#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

namespace dcn {

inline constexpr int kMaxQubits = 8;

template <typename Scalar>
using Amplitudes = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>;

/// A requested measurement outcome has (numerically) zero probability.
class ZeroProbabilityError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

enum class NormMode { validate, normalize };

struct StateTolerances {
  double norm = 1e-9;
  double collapse = 1e-12;
};

namespace detail {

inline void check_qubit_count(int n) {
  if (n < 1 || n > kMaxQubits)
    throw std::invalid_argument("qubit count must be in 1.." + std::to_string(kMaxQubits) + ", got " +
                                std::to_string(n));
}

inline std::uint64_t bit_of(int qubit) { return std::uint64_t{1} << (qubit - 1); }

// Qubit numbers are 1-based; qubit #1 is the least significant index bit.
inline void check_qubits(std::span<const int> qubits, int n) {
  std::uint64_t seen = 0;
  for (int q : qubits) {
    if (q < 1 || q > n)
      throw std::out_of_range("qubit " + std::to_string(q) + " out of range 1.." + std::to_string(n));
    if (seen & bit_of(q)) throw std::invalid_argument("qubit " + std::to_string(q) + " listed twice");
    seen |= bit_of(q);
  }
}

inline std::uint64_t mask_of(std::span<const int> qubits) {
  std::uint64_t mask = 0;
  for (int q : qubits) mask |= bit_of(q);
  return mask;
}

inline std::uint64_t pattern_of(std::span<const int> qubits, std::span<const int> bits) {
  if (bits.size() != qubits.size()) throw std::invalid_argument("one bit per measured qubit required");
  std::uint64_t pattern = 0;
  for (std::size_t j = 0; j < qubits.size(); ++j) {
    if (bits[j] != 0 && bits[j] != 1) throw std::invalid_argument("measurement bits must be 0 or 1");
    if (bits[j]) pattern |= bit_of(qubits[j]);
  }
  return pattern;
}

}  // namespace detail

/// Pure state of n qubits: 2^n amplitudes in the computational basis, unit norm.
template <typename Scalar>
class BasicState {
 public:
  using Complex = std::complex<Scalar>;
  using Vector = Amplitudes<Scalar>;

  BasicState() : BasicState(basis(1, 0)) {}

  static BasicState basis(int n, std::uint64_t index) {
    detail::check_qubit_count(n);
    const std::uint64_t dim = std::uint64_t{1} << n;
    if (index >= dim)
      throw std::out_of_range("basis index " + std::to_string(index) + " out of range for " + std::to_string(n) +
                              " qubits");
    Vector amps = Vector::Zero(static_cast<Eigen::Index>(dim));
    amps[static_cast<Eigen::Index>(index)] = Complex(1);
    return BasicState(n, std::move(amps));
  }

  static BasicState from_amplitudes(int n, Vector amps, NormMode mode = NormMode::validate,
                                    Scalar norm_tol = Scalar(1e-9)) {
    check_shape(n, amps);
    const Scalar norm = amps.norm();
    if (!(norm > Scalar(0))) throw std::invalid_argument("zero vector is not a state");
    if (mode == NormMode::normalize) {
      amps /= norm;
    } else if (std::abs(norm * norm - Scalar(1)) > norm_tol) {
      throw std::invalid_argument("amplitudes are not normalized (sum |a|^2 = " + std::to_string(double(norm * norm)) +
                                  ")");
    }
    return BasicState(n, std::move(amps));
  }

  /// Wraps amplitudes the caller already knows to be normalized. Only shape and finiteness are checked.
  static BasicState adopt(int n, Vector amps) {
    check_shape(n, amps);
    return BasicState(n, std::move(amps));
  }

  int qubits() const { return n_; }
  Eigen::Index dim() const { return amps_.size(); }
  const Vector& amplitudes() const { return amps_; }
  Complex operator[](Eigen::Index i) const { return amps_[i]; }
  Scalar norm() const { return amps_.norm(); }

  friend bool operator==(const BasicState& a, const BasicState& b) {
    return a.n_ == b.n_ && a.amps_ == b.amps_;
  }

 private:
  BasicState(int n, Vector amps) : n_(n), amps_(std::move(amps)) {}

  static void check_shape(int n, const Vector& amps) {
    detail::check_qubit_count(n);
    if (amps.size() != (Eigen::Index{1} << n))
      throw std::invalid_argument("expected " + std::to_string(Eigen::Index{1} << n) + " amplitudes, got " +
                                  std::to_string(amps.size()));
    if (!amps.allFinite()) throw std::invalid_argument("amplitudes must be finite");
  }

  int n_;
  Vector amps_;
};

using StateVector = BasicState<double>;

struct MeasurementOutcome {
  std::vector<int> qubits;
  std::vector<int> bits;
  double probability = 0.0;

  friend bool operator==(const MeasurementOutcome&, const MeasurementOutcome&) = default;
};

/// Kronecker product; `b` occupies the low-order qubits: c[k*Q + r] = a[k] * b[r].
template <typename Scalar>
BasicState<Scalar> tensor(const BasicState<Scalar>& a, const BasicState<Scalar>& b) {
  const int n = a.qubits() + b.qubits();
  if (n > kMaxQubits) throw std::length_error("tensor product exceeds " + std::to_string(kMaxQubits) + " qubits");
  Amplitudes<Scalar> c = Eigen::kroneckerProduct(a.amplitudes(), b.amplitudes());
  return BasicState<Scalar>::adopt(n, std::move(c));
}

/// Probability that the listed qubits read the given bits. Empty selection gives the full norm.
template <typename Scalar>
Scalar probability(const BasicState<Scalar>& state, std::span<const int> qubits, std::span<const int> bits) {
  detail::check_qubits(qubits, state.qubits());
  const std::uint64_t mask = detail::mask_of(qubits);
  const std::uint64_t pattern = detail::pattern_of(qubits, bits);
  Scalar p = 0;
  for (Eigen::Index i = 0; i < state.dim(); ++i)
    if ((static_cast<std::uint64_t>(i) & mask) == pattern) p += std::norm(state[i]);
  return p;
}

template <typename Scalar>
BasicState<Scalar> measure_partial(const BasicState<Scalar>& state, std::span<const int> qubits,
                                   std::span<const int> bits, double collapse_tol = 1e-12) {
  const Scalar p = probability(state, qubits, bits);
  if (!(p > Scalar(collapse_tol)))
    throw ZeroProbabilityError("measurement outcome has zero probability");
  const std::uint64_t mask = detail::mask_of(qubits);
  const std::uint64_t pattern = detail::pattern_of(qubits, bits);
  Amplitudes<Scalar> amps = state.amplitudes();
  const Scalar scale = Scalar(1) / std::sqrt(p);
  for (Eigen::Index i = 0; i < amps.size(); ++i)
    amps[i] = (static_cast<std::uint64_t>(i) & mask) == pattern ? amps[i] * scale : std::complex<Scalar>(0);
  return BasicState<Scalar>::adopt(state.qubits(), std::move(amps));
}

/// Uniform double in [0,1) from the top 53 bits of one generator word.
inline double uniform_unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// Draws an outcome for `qubits` from the exact Born distribution and collapses onto it.
/// Consumes exactly one word from `rng`.
template <typename Scalar>
std::pair<MeasurementOutcome, BasicState<Scalar>> sample_measure(const BasicState<Scalar>& state,
                                                                 std::span<const int> qubits,
                                                                 std::mt19937_64& rng) {
  detail::check_qubits(qubits, state.qubits());
  const std::size_t k = qubits.size();
  std::vector<double> weights(std::size_t{1} << k, 0.0);
  for (Eigen::Index i = 0; i < state.dim(); ++i) {
    std::size_t outcome = 0;
    for (std::size_t j = 0; j < k; ++j)
      if (static_cast<std::uint64_t>(i) & detail::bit_of(qubits[j])) outcome |= std::size_t{1} << j;
    weights[outcome] += static_cast<double>(std::norm(state[i]));
  }
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  const double u = uniform_unit(rng) * total;
  std::size_t chosen = weights.size();
  double cumulative = 0.0;
  for (std::size_t o = 0; o < weights.size(); ++o) {
    if (weights[o] <= 0.0) continue;
    cumulative += weights[o];
    chosen = o;
    if (u < cumulative) break;
  }
  MeasurementOutcome out;
  out.qubits.assign(qubits.begin(), qubits.end());
  for (std::size_t j = 0; j < k; ++j) out.bits.push_back(static_cast<int>((chosen >> j) & 1u));
  out.probability = weights[chosen] / total;
  return {out, measure_partial(state, qubits, std::span<const int>(out.bits), 0.0)};
}

template <typename Scalar>
std::pair<MeasurementOutcome, BasicState<Scalar>> sample_measure(const BasicState<Scalar>& state,
                                                                 std::span<const int> qubits, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return sample_measure(state, qubits, rng);
}

/// True iff ||a - e^{i phi} b|| <= tol, with phi taken from b's largest-magnitude amplitude.
template <typename Scalar>
bool equal_up_to_global_phase(const BasicState<Scalar>& a, const BasicState<Scalar>& b, double tol) {
  if (a.qubits() != b.qubits()) throw std::invalid_argument("states have different qubit counts");
  Eigen::Index j = 0;
  b.amplitudes().cwiseAbs2().maxCoeff(&j);
  std::complex<Scalar> phase(1);
  if (std::abs(a[j]) > Scalar(0) && std::abs(b[j]) > Scalar(0)) {
    const std::complex<Scalar> ratio = a[j] / b[j];
    phase = ratio / std::abs(ratio);
  }
  return (a.amplitudes() - phase * b.amplitudes()).norm() <= Scalar(tol);
}

/// Relabels qubits: qubit k of `state` becomes qubit perm[k-1] of the result.
template <typename Scalar>
BasicState<Scalar> permute_qubits(const BasicState<Scalar>& state, std::span<const int> perm) {
  const int n = state.qubits();
  if (static_cast<int>(perm.size()) != n) throw std::invalid_argument("permutation length must equal qubit count");
  detail::check_qubits(perm, n);
  Amplitudes<Scalar> out(state.dim());
  for (Eigen::Index i = 0; i < state.dim(); ++i) {
    std::uint64_t j = 0;
    for (int k = 1; k <= n; ++k)
      if (static_cast<std::uint64_t>(i) & detail::bit_of(k)) j |= detail::bit_of(perm[k - 1]);
    out[static_cast<Eigen::Index>(j)] = state[i];
  }
  return BasicState<Scalar>::adopt(n, std::move(out));
}

inline std::vector<int> inverse_permutation(std::span<const int> perm) {
  std::vector<int> inv(perm.size());
  for (std::size_t k = 0; k < perm.size(); ++k) inv.at(static_cast<std::size_t>(perm[k] - 1)) = static_cast<int>(k + 1);
  return inv;
}

}  // namespace dcn

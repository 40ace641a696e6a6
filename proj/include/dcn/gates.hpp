#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "dcn/qstate.hpp"

namespace dcn {

template <typename Scalar>
using Unitary2 = Eigen::Matrix<std::complex<Scalar>, 2, 2>;

namespace gate {

template <typename Scalar = double>
Unitary2<Scalar> identity() {
  return Unitary2<Scalar>::Identity();
}

template <typename Scalar = double>
Unitary2<Scalar> x() {
  Unitary2<Scalar> u;
  u << 0, 1, 1, 0;
  return u;
}

template <typename Scalar = double>
Unitary2<Scalar> y() {
  using C = std::complex<Scalar>;
  Unitary2<Scalar> u;
  u << C(0), C(0, -1), C(0, 1), C(0);
  return u;
}

template <typename Scalar = double>
Unitary2<Scalar> z() {
  Unitary2<Scalar> u;
  u << 1, 0, 0, -1;
  return u;
}

template <typename Scalar = double>
Unitary2<Scalar> h() {
  const Scalar s = Scalar(1) / std::sqrt(Scalar(2));
  Unitary2<Scalar> u;
  u << s, s, s, -s;
  return u;
}

/// diag(1, e^{i theta})
template <typename Scalar = double>
Unitary2<Scalar> phase(Scalar theta) {
  Unitary2<Scalar> u;
  u << 1, 0, 0, std::polar(Scalar(1), theta);
  return u;
}

template <typename Scalar = double>
Unitary2<Scalar> s() {
  using C = std::complex<Scalar>;
  Unitary2<Scalar> u;
  u << C(1), C(0), C(0), C(0, 1);
  return u;
}

template <typename Scalar = double>
Unitary2<Scalar> t() {
  return phase<Scalar>(std::numbers::pi_v<Scalar> / 4);
}

}  // namespace gate

template <typename Scalar>
bool is_unitary(const Unitary2<Scalar>& u, double tol = 1e-12) {
  const double bound = std::max(tol, 16.0 * std::numeric_limits<Scalar>::epsilon());
  return ((u.adjoint() * u - Unitary2<Scalar>::Identity()).cwiseAbs().maxCoeff()) <= Scalar(bound);
}

namespace detail {

// Applies `u` to every amplitude pair (i, i | target_bit) whose index has all control bits set.
template <typename Scalar>
void apply_along_axis(Amplitudes<Scalar>& amps, std::uint64_t target_bit, std::uint64_t control_mask,
                      const Unitary2<Scalar>& u) {
  const auto dim = static_cast<std::uint64_t>(amps.size());
  for (std::uint64_t i = 0; i < dim; ++i) {
    if ((i & target_bit) || (i & control_mask) != control_mask) continue;
    const auto lo = static_cast<Eigen::Index>(i);
    const auto hi = static_cast<Eigen::Index>(i | target_bit);
    const std::complex<Scalar> a = amps[lo];
    const std::complex<Scalar> b = amps[hi];
    amps[lo] = u(0, 0) * a + u(0, 1) * b;
    amps[hi] = u(1, 0) * a + u(1, 1) * b;
  }
}

template <typename Scalar>
void check_unitary(const Unitary2<Scalar>& u) {
  if (!is_unitary(u)) throw std::invalid_argument("gate matrix is not unitary");
}

}  // namespace detail

template <typename Scalar>
BasicState<Scalar> apply_single(const BasicState<Scalar>& state, int qubit, const Unitary2<Scalar>& u) {
  const int target[] = {qubit};
  detail::check_qubits(target, state.qubits());
  detail::check_unitary(u);
  Amplitudes<Scalar> amps = state.amplitudes();
  detail::apply_along_axis(amps, detail::bit_of(qubit), 0, u);
  return BasicState<Scalar>::adopt(state.qubits(), std::move(amps));
}

/// Applies `u` along the axis of `target`, restricted to indices where every control qubit is 1.
template <typename Scalar>
BasicState<Scalar> apply_controlled(const BasicState<Scalar>& state, std::span<const int> controls, int target,
                                    const Unitary2<Scalar>& u) {
  std::vector<int> all(controls.begin(), controls.end());
  all.push_back(target);
  detail::check_qubits(all, state.qubits());
  detail::check_unitary(u);
  Amplitudes<Scalar> amps = state.amplitudes();
  detail::apply_along_axis(amps, detail::bit_of(target), detail::mask_of(controls), u);
  return BasicState<Scalar>::adopt(state.qubits(), std::move(amps));
}

template <typename Scalar>
BasicState<Scalar> apply_cnot(const BasicState<Scalar>& state, int control, int target) {
  const int controls[] = {control};
  return apply_controlled(state, controls, target, gate::x<Scalar>());
}

template <typename Scalar>
BasicState<Scalar> apply_swap(const BasicState<Scalar>& state, int q1, int q2) {
  const int pair[] = {q1, q2};
  detail::check_qubits(pair, state.qubits());
  const std::uint64_t b1 = detail::bit_of(q1);
  const std::uint64_t b2 = detail::bit_of(q2);
  Amplitudes<Scalar> amps = state.amplitudes();
  for (std::uint64_t i = 0; i < static_cast<std::uint64_t>(amps.size()); ++i)
    if ((i & b1) && !(i & b2))
      std::swap(amps[static_cast<Eigen::Index>(i)], amps[static_cast<Eigen::Index>((i & ~b1) | b2)]);
  return BasicState<Scalar>::adopt(state.qubits(), std::move(amps));
}

}  // namespace dcn

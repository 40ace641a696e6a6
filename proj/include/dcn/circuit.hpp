#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "dcn/gates.hpp"
#include "dcn/qstate.hpp"

namespace dcn {

enum class GateKind { x, y, z, h, s, t, phase, u, swap };

std::string_view mnemonic(GateKind kind);

struct GateOp {
  GateKind kind = GateKind::x;
  std::vector<int> targets;   // one qubit, two for swap
  std::vector<int> controls;  // every control must read 1
  double angle = 0.0;         // phase only
  Unitary2<double> matrix = Unitary2<double>::Identity();  // u only

  friend bool operator==(const GateOp& a, const GateOp& b) {
    return a.kind == b.kind && a.targets == b.targets && a.controls == b.controls && a.angle == b.angle &&
           a.matrix == b.matrix;
  }
};

struct MeasureOp {
  std::vector<int> qubits;
  std::optional<std::vector<int>> forced;  // sampled when absent

  friend bool operator==(const MeasureOp&, const MeasureOp&) = default;
};

struct FrameOp {
  std::string label;

  friend bool operator==(const FrameOp&, const FrameOp&) = default;
};

struct CircuitOp {
  std::variant<GateOp, MeasureOp, FrameOp> body;

  friend bool operator==(const CircuitOp&, const CircuitOp&) = default;
};

namespace op {
CircuitOp gate(GateKind kind, int target, std::vector<int> controls = {});
CircuitOp x(int q);
CircuitOp y(int q);
CircuitOp z(int q);
CircuitOp h(int q);
CircuitOp s(int q);
CircuitOp t(int q);
CircuitOp phase(int q, double theta);
CircuitOp u(int q, const Unitary2<double>& m);
CircuitOp cnot(int control, int target);
CircuitOp ccnot(int c1, int c2, int target);
CircuitOp swap(int a, int b);
CircuitOp measure(std::vector<int> qubits, std::optional<std::vector<int>> forced = std::nullopt);
CircuitOp frame(std::string label);
}  // namespace op

/// Throws std::invalid_argument / std::out_of_range when the op does not fit an n-qubit register.
void validate(const CircuitOp& op, int n);

Unitary2<double> matrix_of(const GateOp& g);

struct InitKet {
  std::string bits;  // |i_n ... i_1>, leftmost character is qubit n

  friend bool operator==(const InitKet&, const InitKet&) = default;
};

struct InitAmps {
  Amplitudes<double> amps;

  friend bool operator==(const InitAmps& a, const InitAmps& b) { return a.amps == b.amps; }
};

using InitSpec = std::variant<InitKet, InitAmps>;

struct Circuit {
  int qubits = 1;
  std::vector<CircuitOp> ops;
  std::string name;
  std::optional<InitSpec> init;  // |0...0> when absent

  /// Structural equality; the name is not part of the structure.
  friend bool operator==(const Circuit& a, const Circuit& b) {
    return a.qubits == b.qubits && a.ops == b.ops && a.init == b.init;
  }
};

void validate(const Circuit& circuit);

StateVector initial_state(const Circuit& circuit, const StateTolerances& tol = {});

/// Forces every measurement of a qubit listed in `outcomes` (qubit -> bit).
void force_measurements(Circuit& circuit, const std::map<int, int>& outcomes);

struct Frame {
  std::string label;
  StateVector state;
  std::optional<MeasurementOutcome> outcome;
};

struct Trace {
  std::vector<Frame> frames;
};

struct StepResult {
  StateVector state;
  std::optional<MeasurementOutcome> outcome;
};

/// One op. Sampled measurements draw one word from `rng`.
StepResult apply_op(const StateVector& state, const CircuitOp& op, std::mt19937_64& rng,
                    const StateTolerances& tol = {});

/// Frame 0 is `initial`; one frame follows per op, labelled with the op's text form
/// (frame ops carry their own label and copy the state).
Trace run_circuit(const StateVector& initial, const Circuit& circuit, std::uint64_t seed,
                  const StateTolerances& tol = {});

inline constexpr std::uint64_t kDefaultSeed = 20240229;

// Built-in circuits reproducing the worked examples.

struct BuiltinInfo {
  std::string name;
  std::vector<std::string> parameters;  // accepted values; first is the default, empty if none
};

const std::vector<BuiltinInfo>& builtin_catalog();

/// `parameter` empty selects the default. Throws std::invalid_argument for unknown names/parameters.
Circuit builtin_circuit(std::string_view name, std::string_view parameter = {});

/// Accepts "name" or "name:parameter".
Circuit builtin_circuit_spec(std::string_view spec);

/// sqrt(2/3)|0> + 1/sqrt(3) e^{-i pi/4}|1>, the single-qubit input used by teleportation and error correction.
StateVector example_qubit_state();

}  // namespace dcn

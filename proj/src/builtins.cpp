#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "dcn/circuit.hpp"

namespace dcn {

namespace {

using std::numbers::pi;

Amplitudes<double> amps_of(const StateVector& s) { return s.amplitudes(); }

StateVector bell_phi_plus() {
  Amplitudes<double> a = Amplitudes<double>::Zero(4);
  a[0] = a[3] = 1.0 / std::sqrt(2.0);
  return StateVector::adopt(2, a);
}

Circuit bell() {
  Circuit c{2, {op::h(2), op::cnot(2, 1)}, "bell", std::nullopt};
  return c;
}

Circuit swap3cnot() {
  Amplitudes<double> a(4);
  a << 0.5, std::polar(1.0 / std::sqrt(2.0), -pi / 4), -1.0 / std::sqrt(12.0), std::polar(1.0 / std::sqrt(6.0), 3 * pi / 4);
  return Circuit{2, {op::cnot(1, 2), op::cnot(2, 1), op::cnot(1, 2)}, "swap3cnot", InitAmps{a}};
}

Circuit phase_kickback() {
  Amplitudes<double> a = Amplitudes<double>::Zero(4);
  a[0] = 1.0 / std::sqrt(2.0);
  a[3] = -1.0 / std::sqrt(2.0);
  return Circuit{2,
                 {op::h(1), op::h(2), op::frame("Hadamard basis"), op::cnot(2, 1), op::h(1), op::h(2)},
                 "phase_kickback",
                 InitAmps{a}};
}

// x is qubit #1, y is qubit #2 (prepared in |1>); U_f: |y>|x> -> |f(x) xor y>|x>.
Circuit deutsch(const std::string& f) {
  Circuit c{2, {op::h(1), op::h(2)}, "deutsch_" + f, InitKet{"10"}};
  if (f == "1") {
    c.ops.push_back(op::x(2));
  } else if (f == "id") {
    c.ops.push_back(op::cnot(1, 2));
  } else if (f == "not") {
    c.ops.push_back(op::cnot(1, 2));
    c.ops.push_back(op::x(2));
  }
  c.ops.push_back(op::frame("oracle f=" + f));
  c.ops.push_back(op::h(1));
  c.ops.push_back(op::measure({1}));
  return c;
}

Circuit teleport() {
  const StateVector input = tensor(bell_phi_plus(), example_qubit_state());
  return Circuit{3,
                 {op::cnot(1, 2), op::h(1), op::measure({1, 2}), op::frame("Alice measured"), op::cnot(2, 3),
                  op::h(3), op::cnot(1, 3), op::h(3), op::frame("Bob corrected")},
                 "teleport",
                 InitAmps{amps_of(input)}};
}

void push_bit_flip(Circuit& c, const std::string& error) {
  if (error == "none") {
    c.ops.push_back(op::frame("no error"));
  } else {
    c.ops.push_back(op::x(error[1] - '0'));
  }
}

Circuit ghz_encode(const std::string& error) {
  const StateVector input = tensor(StateVector::basis(2, 0), example_qubit_state());
  Circuit c{3, {op::cnot(1, 2), op::cnot(1, 3), op::frame("encoded")}, "ghz_encode_" + error, InitAmps{amps_of(input)}};
  push_bit_flip(c, error);
  return c;
}

Circuit err_detect4(const std::string& error) {
  const double s = 1.0 / std::sqrt(2.0);
  Amplitudes<double> plus(2);
  plus << s, s;
  const StateVector input = tensor(tensor(StateVector::adopt(1, plus), StateVector::basis(1, 0)), bell_phi_plus());
  Circuit c{4, {}, "err_detect4_" + error, InitAmps{amps_of(input)}};
  if (error == "none") {
    c.ops.push_back(op::frame("no error"));
  } else {
    const GateKind kind = error == "X" ? GateKind::x : error == "Y" ? GateKind::y : error == "Z" ? GateKind::z : GateKind::h;
    c.ops.push_back(op::gate(kind, 1));
  }
  for (CircuitOp o : {op::cnot(1, 3), op::cnot(2, 3), op::cnot(4, 1), op::cnot(4, 2), op::h(4)}) c.ops.push_back(o);
  return c;
}

Circuit err_correct5(const std::string& error) {
  const StateVector input = tensor(StateVector::basis(4, 0), example_qubit_state());
  Circuit c{5, {op::cnot(1, 2), op::cnot(1, 3), op::frame("encoded")}, "err_correct5_" + error, InitAmps{amps_of(input)}};
  push_bit_flip(c, error);
  for (CircuitOp o : {op::cnot(2, 4), op::cnot(3, 4), op::cnot(3, 5), op::cnot(1, 5), op::frame("syndrome transferred"),
                      op::cnot(5, 1), op::cnot(4, 2), op::ccnot(4, 5, 3), op::ccnot(4, 5, 2), op::ccnot(4, 5, 1),
                      op::frame("corrected")})
    c.ops.push_back(o);
  return c;
}

}  // namespace

StateVector example_qubit_state() {
  Amplitudes<double> a(2);
  a << std::sqrt(2.0 / 3.0), std::polar(1.0 / std::sqrt(3.0), -pi / 4);
  return StateVector::adopt(1, a);
}

const std::vector<BuiltinInfo>& builtin_catalog() {
  static const std::vector<BuiltinInfo> catalog = {
      {"bell", {}},
      {"swap3cnot", {}},
      {"phase_kickback", {}},
      {"deutsch", {"0", "1", "id", "not"}},
      {"teleport", {}},
      {"ghz_encode", {"none", "X1", "X2", "X3"}},
      {"err_detect4", {"H", "none", "X", "Y", "Z"}},
      {"err_correct5", {"none", "X1", "X2", "X3"}},
  };
  return catalog;
}

Circuit builtin_circuit(std::string_view name, std::string_view parameter) {
  const auto& catalog = builtin_catalog();
  const auto it = std::find_if(catalog.begin(), catalog.end(), [&](const BuiltinInfo& b) { return b.name == name; });
  if (it == catalog.end()) throw std::invalid_argument("unknown builtin circuit '" + std::string(name) + "'");
  std::string param(parameter);
  if (it->parameters.empty()) {
    if (!param.empty()) throw std::invalid_argument("builtin '" + it->name + "' takes no parameter");
  } else if (param.empty()) {
    param = it->parameters.front();
  } else if (std::find(it->parameters.begin(), it->parameters.end(), param) == it->parameters.end()) {
    throw std::invalid_argument("invalid parameter '" + param + "' for builtin '" + it->name + "'");
  }

  if (name == "bell") return bell();
  if (name == "swap3cnot") return swap3cnot();
  if (name == "phase_kickback") return phase_kickback();
  if (name == "deutsch") return deutsch(param);
  if (name == "teleport") return teleport();
  if (name == "ghz_encode") return ghz_encode(param);
  if (name == "err_detect4") return err_detect4(param);
  return err_correct5(param);
}

Circuit builtin_circuit_spec(std::string_view spec) {
  const auto colon = spec.find(':');
  if (colon == std::string_view::npos) return builtin_circuit(spec);
  return builtin_circuit(spec.substr(0, colon), spec.substr(colon + 1));
}

}  // namespace dcn

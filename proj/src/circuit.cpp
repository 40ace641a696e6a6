#include "dcn/circuit.hpp"

#include <stdexcept>
#include <utility>

#include "dcn/dsl.hpp"

namespace dcn {

std::string_view mnemonic(GateKind kind) {
  switch (kind) {
    case GateKind::x: return "x";
    case GateKind::y: return "y";
    case GateKind::z: return "z";
    case GateKind::h: return "h";
    case GateKind::s: return "s";
    case GateKind::t: return "t";
    case GateKind::phase: return "phase";
    case GateKind::u: return "u";
    case GateKind::swap: return "swap";
  }
  return "?";
}

namespace op {

CircuitOp gate(GateKind kind, int target, std::vector<int> controls) {
  GateOp g;
  g.kind = kind;
  g.targets = {target};
  g.controls = std::move(controls);
  return CircuitOp{g};
}

CircuitOp x(int q) { return gate(GateKind::x, q); }
CircuitOp y(int q) { return gate(GateKind::y, q); }
CircuitOp z(int q) { return gate(GateKind::z, q); }
CircuitOp h(int q) { return gate(GateKind::h, q); }
CircuitOp s(int q) { return gate(GateKind::s, q); }
CircuitOp t(int q) { return gate(GateKind::t, q); }

CircuitOp phase(int q, double theta) {
  CircuitOp o = gate(GateKind::phase, q);
  std::get<GateOp>(o.body).angle = theta;
  return o;
}

CircuitOp u(int q, const Unitary2<double>& m) {
  CircuitOp o = gate(GateKind::u, q);
  std::get<GateOp>(o.body).matrix = m;
  return o;
}

CircuitOp cnot(int control, int target) { return gate(GateKind::x, target, {control}); }
CircuitOp ccnot(int c1, int c2, int target) { return gate(GateKind::x, target, {c1, c2}); }

CircuitOp swap(int a, int b) {
  GateOp g;
  g.kind = GateKind::swap;
  g.targets = {a, b};
  return CircuitOp{g};
}

CircuitOp measure(std::vector<int> qubits, std::optional<std::vector<int>> forced) {
  return CircuitOp{MeasureOp{std::move(qubits), std::move(forced)}};
}

CircuitOp frame(std::string label) { return CircuitOp{FrameOp{std::move(label)}}; }

}  // namespace op

Unitary2<double> matrix_of(const GateOp& g) {
  switch (g.kind) {
    case GateKind::x: return gate::x();
    case GateKind::y: return gate::y();
    case GateKind::z: return gate::z();
    case GateKind::h: return gate::h();
    case GateKind::s: return gate::s();
    case GateKind::t: return gate::t();
    case GateKind::phase: return gate::phase(g.angle);
    case GateKind::u: return g.matrix;
    case GateKind::swap: break;
  }
  throw std::invalid_argument("swap has no single-qubit matrix");
}

void validate(const CircuitOp& o, int n) {
  if (const auto* g = std::get_if<GateOp>(&o.body)) {
    const std::size_t arity = g->kind == GateKind::swap ? 2 : 1;
    if (g->targets.size() != arity)
      throw std::invalid_argument(std::string(mnemonic(g->kind)) + " takes " + std::to_string(arity) + " target(s)");
    if (g->kind == GateKind::swap && !g->controls.empty())
      throw std::invalid_argument("controlled swap is not supported");
    std::vector<int> all = g->controls;
    all.insert(all.end(), g->targets.begin(), g->targets.end());
    detail::check_qubits(all, n);
    if (g->kind == GateKind::u && !is_unitary(g->matrix)) throw std::invalid_argument("u matrix is not unitary");
    if (g->kind == GateKind::phase && !std::isfinite(g->angle)) throw std::invalid_argument("phase angle not finite");
  } else if (const auto* m = std::get_if<MeasureOp>(&o.body)) {
    if (m->qubits.empty()) throw std::invalid_argument("measure needs at least one qubit");
    detail::check_qubits(m->qubits, n);
    if (m->forced) (void)detail::pattern_of(m->qubits, *m->forced);
  }
}

void validate(const Circuit& circuit) {
  detail::check_qubit_count(circuit.qubits);
  for (const CircuitOp& o : circuit.ops) validate(o, circuit.qubits);
  if (circuit.init) (void)initial_state(circuit);
}

StateVector initial_state(const Circuit& circuit, const StateTolerances& tol) {
  if (!circuit.init) return StateVector::basis(circuit.qubits, 0);
  if (const auto* ket = std::get_if<InitKet>(&*circuit.init)) {
    if (static_cast<int>(ket->bits.size()) != circuit.qubits)
      throw std::invalid_argument("init ket needs exactly " + std::to_string(circuit.qubits) + " bits");
    std::uint64_t index = 0;
    for (char c : ket->bits) {
      if (c != '0' && c != '1') throw std::invalid_argument("init ket bits must be 0 or 1");
      index = (index << 1) | static_cast<std::uint64_t>(c - '0');
    }
    return StateVector::basis(circuit.qubits, index);
  }
  return StateVector::from_amplitudes(circuit.qubits, std::get<InitAmps>(*circuit.init).amps, NormMode::validate,
                                      tol.norm);
}

void force_measurements(Circuit& circuit, const std::map<int, int>& outcomes) {
  for (CircuitOp& o : circuit.ops) {
    auto* m = std::get_if<MeasureOp>(&o.body);
    if (!m) continue;
    std::vector<int> bits;
    for (int q : m->qubits) {
      const auto it = outcomes.find(q);
      if (it == outcomes.end()) break;
      bits.push_back(it->second);
    }
    if (bits.size() == m->qubits.size()) m->forced = std::move(bits);
  }
}

StepResult apply_op(const StateVector& state, const CircuitOp& o, std::mt19937_64& rng, const StateTolerances& tol) {
  validate(o, state.qubits());
  if (const auto* g = std::get_if<GateOp>(&o.body)) {
    if (g->kind == GateKind::swap) return {apply_swap(state, g->targets[0], g->targets[1]), std::nullopt};
    return {apply_controlled(state, std::span<const int>(g->controls), g->targets[0], matrix_of(*g)), std::nullopt};
  }
  if (const auto* m = std::get_if<MeasureOp>(&o.body)) {
    if (m->forced) {
      MeasurementOutcome outcome{m->qubits, *m->forced,
                                 probability(state, std::span<const int>(m->qubits), std::span<const int>(*m->forced))};
      StateVector next = measure_partial(state, std::span<const int>(m->qubits), std::span<const int>(*m->forced),
                                         tol.collapse);
      return {std::move(next), std::move(outcome)};
    }
    auto [outcome, next] = sample_measure(state, std::span<const int>(m->qubits), rng);
    return {std::move(next), std::move(outcome)};
  }
  return {state, std::nullopt};
}

Trace run_circuit(const StateVector& initial, const Circuit& circuit, std::uint64_t seed, const StateTolerances& tol) {
  if (initial.qubits() != circuit.qubits)
    throw std::invalid_argument("initial state has " + std::to_string(initial.qubits()) + " qubits, circuit has " +
                                std::to_string(circuit.qubits));
  std::mt19937_64 rng(seed);
  Trace trace;
  trace.frames.push_back(Frame{"initial", initial, std::nullopt});
  for (const CircuitOp& o : circuit.ops) {
    StepResult step = apply_op(trace.frames.back().state, o, rng, tol);
    std::string label = std::holds_alternative<FrameOp>(o.body) ? std::get<FrameOp>(o.body).label : statement_text(o);
    trace.frames.push_back(Frame{std::move(label), std::move(step.state), std::move(step.outcome)});
  }
  return trace;
}

}  // namespace dcn

#include "dcn/records.hpp"

#include <string>

#include <fmt/format.h>

#include "dcn/dsl.hpp"

namespace dcn {

double rounded(double v) {
  const double r = std::stod(fmt::format("{:.12g}", v));
  return r == 0.0 ? 0.0 : r;
}

Json polar_list(const StateVector& state) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < state.dim(); ++i) out.push_back(format_polar(state[i]));
  return out;
}

Json partition_json(const PartitionSpec& part, int n) {
  const auto [high, low] = partition_qubits(part, n);
  return Json{{"p", part.p}, {"q", part.q}, {"order", effective_order(part, n)}, {"high", high}, {"low", low}};
}

Json report_json(const SeparabilityReport<double>& report, int n) {
  Json out;
  out["separable"] = report.separable;
  out["marginal"] = report.marginal;
  out["partition"] = partition_json(report.partition, n);
  if (report.ratios) {
    out["i0"] = report.ratios->i0;
    out["k0"] = report.ratios->k0;
    out["r0"] = report.ratios->r0;
    Json ratios = Json::array();
    for (std::size_t j = 0; j < report.ratios->ratios.size(); ++j)
      ratios.push_back(Json{{"r", report.ratios->r0 + 1 + static_cast<Eigen::Index>(j)},
                            {"m", format_polar(report.ratios->ratios[j])}});
    out["ratios"] = ratios;
  } else {
    out["i0"] = nullptr;
    out["k0"] = nullptr;
    out["r0"] = nullptr;
    out["ratios"] = Json::array();
  }
  out["witness"] = report.witness ? Json{{"k", report.witness->first}, {"r", report.witness->second}} : Json(nullptr);
  out["max_violation"] = report.max_violation;
  if (report.factor_p && report.factor_q)
    out["factors"] = Json{{"p", polar_list(*report.factor_p)}, {"q", polar_list(*report.factor_q)}};
  else
    out["factors"] = nullptr;
  return out;
}

Json placement_json(const Placement& placement) {
  Json out = Json::array();
  for (std::size_t i = 0; i < placement.positions.size(); ++i)
    out.push_back(Json{{"index", i},
                       {"x", rounded(placement.positions[i].x)},
                       {"y", rounded(placement.positions[i].y)},
                       {"group", placement.groups[i]}});
  return out;
}

Json outcome_json(const MeasurementOutcome& outcome) {
  return Json{{"qubits", outcome.qubits}, {"bits", outcome.bits}, {"probability", rounded(outcome.probability)}};
}

Json decomposition_json(std::span<const Block<double>> blocks) {
  Json out = Json::array();
  for (const Block<double>& b : blocks) out.push_back(Json{{"qubits", b.qubits}, {"amplitudes", polar_list(b.factor)}});
  return out;
}

Json tolerances_json(const SeparabilityTolerances& sep, const StateTolerances& state) {
  return Json{{"zero", sep.zero},
              {"sep", sep.sep},
              {"residual", sep.residual},
              {"marginal_band", sep.marginal_band},
              {"norm", state.norm},
              {"collapse", state.collapse}};
}

std::vector<Verdict> qubit_verdicts(const StateVector& state, const SeparabilityTolerances& tol) {
  if (state.qubits() == 1) return {Verdict::separable};
  std::vector<Verdict> out;
  for (int q = 1; q <= state.qubits(); ++q) out.push_back(verdict_of(check_qubit(state, q, tol)));
  return out;
}

std::vector<double> one_probabilities(const StateVector& state) {
  std::vector<double> out;
  for (int q = 1; q <= state.qubits(); ++q) {
    const int qs[] = {q};
    const int bits[] = {1};
    out.push_back(rounded(probability(state, std::span<const int>(qs), std::span<const int>(bits))));
  }
  return out;
}

Json frame_record(std::size_t index, const Frame& frame, const SeparabilityTolerances& tol) {
  Json out;
  out["frame"] = index;
  out["label"] = frame.label;
  out["amplitudes"] = polar_list(frame.state);
  out["p1"] = one_probabilities(frame.state);
  Json verdicts = Json::array();
  for (Verdict v : qubit_verdicts(frame.state, tol)) verdicts.push_back(verdict_name(v));
  out["verdicts"] = verdicts;
  if (frame.outcome) out["outcome"] = outcome_json(*frame.outcome);
  return out;
}

}  // namespace dcn

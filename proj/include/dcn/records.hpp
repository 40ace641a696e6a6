#pragma once

// Machine-readable records shared by the CLI and the session service.
// Amplitudes are polar strings "r@phi" with 12 significant digits.

#include <cstddef>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "dcn/circuit.hpp"
#include "dcn/layout.hpp"
#include "dcn/separability.hpp"

namespace dcn {

using Json = nlohmann::ordered_json;

Json polar_list(const StateVector& state);
Json partition_json(const PartitionSpec& part, int n);
Json report_json(const SeparabilityReport<double>& report, int n);
Json placement_json(const Placement& placement);
Json outcome_json(const MeasurementOutcome& outcome);
Json decomposition_json(std::span<const Block<double>> blocks);
Json tolerances_json(const SeparabilityTolerances& sep, const StateTolerances& state);

/// Verdict of check_qubit for every qubit, qubit #1 first. A single qubit is trivially separable.
std::vector<Verdict> qubit_verdicts(const StateVector& state, const SeparabilityTolerances& tol = {});

/// P(qubit k = 1) for k = 1..n.
std::vector<double> one_probabilities(const StateVector& state);

/// One trace line: index, label, amplitudes, per-qubit probabilities and verdicts, outcome if any.
Json frame_record(std::size_t index, const Frame& frame, const SeparabilityTolerances& tol = {});

/// Rounds to 12 significant digits so records do not carry roundoff noise.
double rounded(double v);

}  // namespace dcn

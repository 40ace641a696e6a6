#pragma once

// Placement of basis states in the plane. Every qubit drawn as a spatial axis moves a basis state
// by one fixed vector when its bit is set. Screen coordinates are y-down: qubit #1 points right,
// qubit #2 points down, qubit #3 points into the oblique depth direction (cos a, -sin a).

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dcn/qstate.hpp"
#include "dcn/separability.hpp"

namespace dcn {

enum class LayoutKind { row, square, cube, hypercube, modular };

std::string_view layout_name(LayoutKind kind);

struct LayoutSpec {
  LayoutKind kind = LayoutKind::row;
  // square/cube/hypercube: optional permutation assigning qubits to axes 1..n.
  // modular: the qubits spanning cells (at most 3); the rest are drawn inline in each cell.
  std::vector<int> axis_qubits;
  double cell_radius = 1.0;
  double spacing = 5.0;
  double oblique_angle = 0.5235987755982988;  // pi/6
  double depth_scale = 0.5;

  friend bool operator==(const LayoutSpec&, const LayoutSpec&) = default;
};

/// "row", "square", "cube", "hypercube", "modular" or "modular:4,5". Throws std::invalid_argument.
LayoutSpec parse_layout(std::string_view text);
std::string format_layout(const LayoutSpec& spec);

/// Natural layout for n qubits: row, square, cube, hypercube, then modular over the top qubits.
LayoutSpec default_layout(int n);

struct Point {
  double x = 0;
  double y = 0;

  friend bool operator==(const Point&, const Point&) = default;
};

struct Placement {
  int qubits = 0;
  std::vector<Point> positions;  // by basis index
  std::vector<int> groups;       // cube or cell of each basis index
  double cell_radius = 1.0;
};

/// Throws std::invalid_argument when the layout does not fit n qubits.
void validate_layout(const LayoutSpec& spec, int n);

Placement layout(int n, const LayoutSpec& spec);

/// Qubits drawn as spatial axes, in axis order. Empty for row.
std::vector<int> spatial_axes(int n, const LayoutSpec& spec);

enum class Verdict { separable, entangled, marginal };

std::string_view verdict_name(Verdict v);

template <typename Scalar>
Verdict verdict_of(const SeparabilityReport<Scalar>& report) {
  if (report.marginal) return Verdict::marginal;
  return report.separable ? Verdict::separable : Verdict::entangled;
}

struct AxisGeometry {
  std::vector<std::vector<Point>> parts;  // polylines, or polygons when `closed`
  bool closed = false;
};

struct AxisAnnotation {
  int qubit = 0;
  Verdict verdict = Verdict::entangled;
  AxisGeometry geometry;
  std::optional<std::complex<double>> ratio;  // amplitude ratio along the axis, |1> : |0>
};

/// One annotation per spatial axis, each carrying the check_qubit verdict for that qubit.
std::vector<AxisAnnotation> annotate(const StateVector& state, const LayoutSpec& spec,
                                     const SeparabilityTolerances& tol = {});

/// Bisector between the 0-half and the 1-half of a spatial axis qubit: a mid-plane polygon per cube
/// for depth projections, otherwise a segment through the gap between the halves (one per cell pair
/// when the halves overlap).
AxisGeometry axis_geometry(int n, const LayoutSpec& spec, int qubit);

}  // namespace dcn

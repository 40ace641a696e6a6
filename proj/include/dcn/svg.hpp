#pragma once

// Circle-notation glyphs and DCN scenes as SVG 1.1.
//
// Each amplitude is an outer circle of radius R, a filled inner circle of radius R*|a| and a
// radial line at the phase angle, measured from the upward vertical and counter-clockwise positive.
// Output is byte-stable: every coordinate is printed with three decimals.

#include <complex>
#include <string>
#include <utility>
#include <vector>

#include "dcn/circuit.hpp"
#include "dcn/layout.hpp"

namespace dcn {

enum class LabelFormat { ket, decimal };

struct AnnotationColors {
  std::string separable = "#2e7d32";
  std::string entangled = "#c62828";
  std::string marginal = "#f9a825";
};

struct RenderOptions {
  double outer_radius = 30.0;  // pixels
  bool show_phase_line = true;
  bool show_labels = true;
  LabelFormat label_format = LabelFormat::ket;
  AnnotationColors colors;
  std::string background = "#ffffff";
  std::string fill = "#1e88e5";
  int panel_columns = 4;  // trace panels per row before wrapping
};

struct Glyph {
  double magnitude = 0;  // [0, 1]
  double phase = 0;      // (-pi, pi]
};

Glyph glyph_of(std::complex<double> amplitude);

/// SVG fragment for one amplitude centred at (cx, cy).
std::string glyph(std::complex<double> amplitude, const RenderOptions& options, double cx = 0, double cy = 0);

struct Scene {
  Placement placement;
  std::vector<Glyph> glyphs;
  std::vector<AxisAnnotation> annotations;
  std::string caption;
};

Scene make_scene(const StateVector& state, const LayoutSpec& spec, const std::string& caption = {},
                 const SeparabilityTolerances& tol = {});

std::string render_scene(const Scene& scene, const RenderOptions& options = {});

std::string render_frame(const StateVector& state, const LayoutSpec& spec, const RenderOptions& options = {},
                         const std::string& caption = {}, const SeparabilityTolerances& tol = {});

/// All frames as captioned panels, left to right, wrapping after `panel_columns`.
std::string render_trace(const Trace& trace, const LayoutSpec& spec, const RenderOptions& options = {},
                         const SeparabilityTolerances& tol = {});

/// One document per frame, named `<circuit>_<frameindex>_<label>.svg`.
std::vector<std::pair<std::string, std::string>> render_series(const Trace& trace, const std::string& circuit_name,
                                                               const LayoutSpec& spec,
                                                               const RenderOptions& options = {},
                                                               const SeparabilityTolerances& tol = {});

/// Filename-safe form of a label: runs of characters outside [A-Za-z0-9.-] become '_'.
std::string slug(const std::string& label);

}  // namespace dcn

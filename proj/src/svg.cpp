#include "dcn/svg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <fmt/format.h>

namespace dcn {

namespace {

std::string num(double v) {
  std::string s = fmt::format("{:.3f}", v);
  if (s == "-0.000") s = "0.000";
  return s;
}

std::string escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\n': out += ' '; break;
      default: out += c;
    }
  }
  return out;
}

std::string points_attr(const std::vector<Point>& pts, double k, Point origin) {
  std::string out;
  for (std::size_t i = 0; i < pts.size(); ++i)
    out += (i ? " " : "") + num((pts[i].x - origin.x) * k) + "," + num((pts[i].y - origin.y) * k);
  return out;
}

const std::string& color_of(Verdict v, const AnnotationColors& colors) {
  switch (v) {
    case Verdict::separable: return colors.separable;
    case Verdict::marginal: return colors.marginal;
    default: return colors.entangled;
  }
}

std::string basis_label(std::size_t index, int n, LabelFormat format) {
  if (format == LabelFormat::decimal) return std::to_string(index);
  std::string bits;
  for (int q = n; q >= 1; --q) bits += ((index >> (q - 1)) & 1u) ? '1' : '0';
  return "|" + bits + "⟩";
}

std::string glyph_body(const Glyph& g, const RenderOptions& options, double cx, double cy) {
  const double R = options.outer_radius;
  std::string out = "<circle cx=\"" + num(cx) + "\" cy=\"" + num(cy) + "\" r=\"" + num(R) +
                    "\" fill=\"none\" stroke=\"#000000\" stroke-width=\"1.5\"/>\n";
  if (g.magnitude > 0) {
    out += "<circle cx=\"" + num(cx) + "\" cy=\"" + num(cy) + "\" r=\"" + num(R * g.magnitude) + "\" fill=\"" +
           options.fill + "\"/>\n";
    if (options.show_phase_line)
      out += "<line x1=\"" + num(cx) + "\" y1=\"" + num(cy) + "\" x2=\"" + num(cx - R * std::sin(g.phase)) +
             "\" y2=\"" + num(cy - R * std::cos(g.phase)) + "\" stroke=\"#000000\" stroke-width=\"1.5\"/>\n";
  }
  return out;
}

struct Panel {
  double width = 0;
  double height = 0;
  std::string body;
};

Panel render_panel(const Scene& scene, const RenderOptions& options) {
  const double R = options.outer_radius;
  const double r = scene.placement.cell_radius;
  const double k = R / r;
  const double pad = 0.3 * R;

  double x0 = std::numeric_limits<double>::infinity(), y0 = x0;
  double x1 = -std::numeric_limits<double>::infinity(), y1 = x1;
  const auto grow = [&](Point p, double margin_x, double margin_top, double margin_bottom) {
    x0 = std::min(x0, p.x - margin_x);
    x1 = std::max(x1, p.x + margin_x);
    y0 = std::min(y0, p.y - margin_top);
    y1 = std::max(y1, p.y + margin_bottom);
  };
  for (Point p : scene.placement.positions) grow(p, r, r, options.show_labels ? 1.9 * r : r);
  for (const AxisAnnotation& a : scene.annotations)
    for (const auto& part : a.geometry.parts)
      for (Point p : part) grow(p, 0, 0.8 * r, 0);

  const Point origin{x0 - pad / k, y0 - pad / k};
  const auto X = [&](double x) { return (x - origin.x) * k; };
  const auto Y = [&](double y) { return (y - origin.y) * k; };
  const double content_height = (y1 - y0) * k + 2 * pad;
  const double caption_height = scene.caption.empty() ? 0.0 : 0.9 * R;

  Panel panel;
  panel.width = (x1 - x0) * k + 2 * pad;
  panel.height = content_height + caption_height;
  std::string& out = panel.body;

  for (const AxisAnnotation& a : scene.annotations) {
    const std::string& color = color_of(a.verdict, options.colors);
    for (const auto& part : a.geometry.parts) {
      if (a.geometry.closed) {
        out += "<polygon class=\"axis-plane\" data-qubit=\"" + std::to_string(a.qubit) + "\" points=\"" +
               points_attr(part, k, origin) + "\" fill=\"" + color + "\" fill-opacity=\"0.15\" stroke=\"" + color +
               "\" stroke-width=\"2\"/>\n";
      } else {
        out += "<polyline class=\"axis-line\" data-qubit=\"" + std::to_string(a.qubit) + "\" points=\"" +
               points_attr(part, k, origin) + "\" fill=\"none\" stroke=\"" + color +
               "\" stroke-width=\"3\" stroke-dasharray=\"8 4\"/>\n";
      }
    }
  }

  for (const AxisAnnotation& a : scene.annotations) {
    if (a.geometry.parts.empty()) continue;
    const std::vector<Point>& first = a.geometry.parts.front();
    Point anchor = first.front();
    for (Point p : first)
      if (p.y < anchor.y || (p.y == anchor.y && p.x < anchor.x)) anchor = p;
    std::string text = "#" + std::to_string(a.qubit);
    if (a.ratio) text += " " + num(std::abs(*a.ratio)) + "@" + num(std::arg(*a.ratio));
    out += "<text class=\"axis-label\" x=\"" + num(X(anchor.x)) + "\" y=\"" + num(Y(anchor.y) - 0.15 * R) +
           "\" font-family=\"sans-serif\" font-size=\"" + num(0.4 * R) + "\" text-anchor=\"middle\" fill=\"" +
           color_of(a.verdict, options.colors) + "\">" + escape(text) + "</text>\n";
  }

  const int n = scene.placement.qubits;
  for (std::size_t i = 0; i < scene.glyphs.size(); ++i) {
    const Point p = scene.placement.positions[i];
    const Glyph& g = scene.glyphs[i];
    const double cx = X(p.x), cy = Y(p.y);
    out += "<g class=\"glyph\" data-index=\"" + std::to_string(i) + "\">\n";
    out += glyph_body(g, options, cx, cy);
    if (options.show_labels)
      out += "<text x=\"" + num(cx) + "\" y=\"" + num(cy + 1.55 * R) + "\" font-family=\"monospace\" font-size=\"" +
             num(0.4 * R) + "\" text-anchor=\"middle\">" + escape(basis_label(i, n, options.label_format)) +
             "</text>\n";
    out += "</g>\n";
  }

  if (!scene.caption.empty())
    out += "<text class=\"caption\" x=\"" + num(panel.width / 2) + "\" y=\"" + num(content_height + 0.55 * R) +
           "\" font-family=\"sans-serif\" font-size=\"" + num(0.5 * R) + "\" text-anchor=\"middle\">" +
           escape(scene.caption) + "</text>\n";
  return panel;
}

std::string document(double width, double height, const std::string& background, const std::string& body) {
  return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
         "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" +
         num(width) + "\" height=\"" + num(height) + "\" viewBox=\"0 0 " + num(width) + " " + num(height) +
         "\">\n<rect x=\"0\" y=\"0\" width=\"" + num(width) + "\" height=\"" + num(height) + "\" fill=\"" +
         background + "\"/>\n" + body + "</svg>\n";
}

}  // namespace

Glyph glyph_of(std::complex<double> amplitude) {
  Glyph g;
  g.magnitude = std::min(1.0, std::abs(amplitude));
  if (g.magnitude == 0) return g;
  g.phase = std::arg(amplitude);
  if (g.phase <= -std::numbers::pi) g.phase = std::numbers::pi;
  return g;
}

std::string glyph(std::complex<double> amplitude, const RenderOptions& options, double cx, double cy) {
  return glyph_body(glyph_of(amplitude), options, cx, cy);
}

Scene make_scene(const StateVector& state, const LayoutSpec& spec, const std::string& caption,
                 const SeparabilityTolerances& tol) {
  Scene scene;
  scene.placement = layout(state.qubits(), spec);
  for (Eigen::Index i = 0; i < state.dim(); ++i) scene.glyphs.push_back(glyph_of(state[i]));
  scene.annotations = annotate(state, spec, tol);
  scene.caption = caption;
  return scene;
}

std::string render_scene(const Scene& scene, const RenderOptions& options) {
  if (!(options.outer_radius > 0)) throw std::invalid_argument("outer radius must be positive");
  const Panel panel = render_panel(scene, options);
  return document(panel.width, panel.height, options.background, panel.body);
}

std::string render_frame(const StateVector& state, const LayoutSpec& spec, const RenderOptions& options,
                         const std::string& caption, const SeparabilityTolerances& tol) {
  return render_scene(make_scene(state, spec, caption, tol), options);
}

std::string render_trace(const Trace& trace, const LayoutSpec& spec, const RenderOptions& options,
                         const SeparabilityTolerances& tol) {
  if (trace.frames.empty()) throw std::invalid_argument("cannot render an empty trace");
  if (!(options.outer_radius > 0)) throw std::invalid_argument("outer radius must be positive");
  std::vector<Panel> panels;
  for (std::size_t i = 0; i < trace.frames.size(); ++i) {
    const Frame& f = trace.frames[i];
    panels.push_back(
        render_panel(make_scene(f.state, spec, std::to_string(i) + ": " + f.label, tol), options));
  }
  double cell_w = 0, cell_h = 0;
  for (const Panel& p : panels) {
    cell_w = std::max(cell_w, p.width);
    cell_h = std::max(cell_h, p.height);
  }
  const std::size_t columns =
      std::min(panels.size(), static_cast<std::size_t>(std::max(1, options.panel_columns)));
  const std::size_t rows = (panels.size() + columns - 1) / columns;
  std::string body;
  for (std::size_t i = 0; i < panels.size(); ++i) {
    const double tx = static_cast<double>(i % columns) * cell_w;
    const double ty = static_cast<double>(i / columns) * cell_h;
    body += "<g class=\"panel\" data-frame=\"" + std::to_string(i) + "\" transform=\"translate(" + num(tx) + "," +
            num(ty) + ")\">\n" + panels[i].body + "</g>\n";
  }
  return document(cell_w * static_cast<double>(columns), cell_h * static_cast<double>(rows), options.background,
                  body);
}

std::string slug(const std::string& label) {
  std::string out;
  bool gap = false;
  for (char c : label) {
    const bool keep = std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-';
    if (keep) {
      if (gap && !out.empty()) out += '_';
      out += c;
      gap = false;
    } else {
      gap = true;
    }
  }
  return out.empty() ? "frame" : out;
}

std::vector<std::pair<std::string, std::string>> render_series(const Trace& trace, const std::string& circuit_name,
                                                               const LayoutSpec& spec, const RenderOptions& options,
                                                               const SeparabilityTolerances& tol) {
  std::vector<std::pair<std::string, std::string>> out;
  const std::string base = circuit_name.empty() ? "circuit" : slug(circuit_name);
  for (std::size_t i = 0; i < trace.frames.size(); ++i) {
    const Frame& f = trace.frames[i];
    out.emplace_back(base + "_" + std::to_string(i) + "_" + slug(f.label) + ".svg",
                     render_frame(f.state, spec, options, std::to_string(i) + ": " + f.label, tol));
  }
  return out;
}

}  // namespace dcn

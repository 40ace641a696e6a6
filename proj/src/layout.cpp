#include "dcn/layout.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace dcn {

std::string_view layout_name(LayoutKind kind) {
  switch (kind) {
    case LayoutKind::row: return "row";
    case LayoutKind::square: return "square";
    case LayoutKind::cube: return "cube";
    case LayoutKind::hypercube: return "hypercube";
    case LayoutKind::modular: return "modular";
  }
  return "?";
}

std::string_view verdict_name(Verdict v) {
  switch (v) {
    case Verdict::separable: return "separable";
    case Verdict::entangled: return "entangled";
    case Verdict::marginal: return "marginal";
  }
  return "?";
}

LayoutSpec parse_layout(std::string_view text) {
  LayoutSpec spec;
  const auto colon = text.find(':');
  const std::string_view name = text.substr(0, colon);
  bool found = false;
  for (LayoutKind k : {LayoutKind::row, LayoutKind::square, LayoutKind::cube, LayoutKind::hypercube,
                       LayoutKind::modular}) {
    if (layout_name(k) == name) {
      spec.kind = k;
      found = true;
    }
  }
  if (!found) throw std::invalid_argument("unknown layout '" + std::string(name) + "'");
  if (colon == std::string_view::npos) return spec;
  std::string_view rest = text.substr(colon + 1);
  if (rest.empty()) throw std::invalid_argument("empty axis list in '" + std::string(text) + "'");
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const std::string item(rest.substr(0, comma));
    std::size_t used = 0;
    int q = 0;
    try {
      q = std::stoi(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw std::invalid_argument("bad axis qubit '" + item + "'");
    spec.axis_qubits.push_back(q);
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return spec;
}

std::string format_layout(const LayoutSpec& spec) {
  std::string out(layout_name(spec.kind));
  for (std::size_t i = 0; i < spec.axis_qubits.size(); ++i)
    out += (i ? "," : ":") + std::to_string(spec.axis_qubits[i]);
  return out;
}

LayoutSpec default_layout(int n) {
  LayoutSpec spec;
  switch (n) {
    case 1: spec.kind = LayoutKind::row; break;
    case 2: spec.kind = LayoutKind::square; break;
    case 3: spec.kind = LayoutKind::cube; break;
    case 4: spec.kind = LayoutKind::hypercube; break;
    default:
      spec.kind = LayoutKind::modular;
      for (int q = n - std::min(3, n - 3) + 1; q <= n; ++q) spec.axis_qubits.push_back(q);
  }
  return spec;
}

namespace {

int required_qubits(LayoutKind kind) {
  switch (kind) {
    case LayoutKind::square: return 2;
    case LayoutKind::cube: return 3;
    case LayoutKind::hypercube: return 4;
    default: return 0;
  }
}

std::vector<int> axes_of(int n, const LayoutSpec& spec) {
  if (spec.kind == LayoutKind::row) return {};
  if (spec.kind == LayoutKind::modular || !spec.axis_qubits.empty()) return spec.axis_qubits;
  return identity_order(n);
}

Point axis_vector(const LayoutSpec& spec, int axis, double cell_width) {
  const double s = spec.spacing;
  const double depth_x = std::cos(spec.oblique_angle);
  const double depth_y = -std::sin(spec.oblique_angle);
  if (spec.kind == LayoutKind::modular) {
    switch (axis) {
      case 1: return {cell_width + 2 * s, 0};
      case 2: return {0, 2 * s};
      default: return {depth_x * s, depth_y * s};
    }
  }
  switch (axis) {
    case 1: return {s, 0};
    case 2: return {0, s};
    case 3: return {depth_x * s * spec.depth_scale, depth_y * s * spec.depth_scale};
    default: return {s * (2.5 + spec.depth_scale * depth_x), 0};
  }
}

}  // namespace

void validate_layout(const LayoutSpec& spec, int n) {
  detail::check_qubit_count(n);
  if (!(spec.cell_radius > 0) || !(spec.spacing > 2 * spec.cell_radius))
    throw std::invalid_argument("layout spacing must exceed twice the cell radius");
  if (!(spec.depth_scale > 0) || !std::isfinite(spec.oblique_angle) || std::sin(spec.oblique_angle) <= 0 ||
      std::cos(spec.oblique_angle) <= 0)
    throw std::invalid_argument("depth projection must point up and to the right");
  const int need = required_qubits(spec.kind);
  if (need != 0 && need != n)
    throw std::invalid_argument(std::string(layout_name(spec.kind)) + " layout needs " + std::to_string(need) +
                                " qubits, state has " + std::to_string(n));
  if (spec.kind == LayoutKind::row) {
    if (!spec.axis_qubits.empty()) throw std::invalid_argument("row layout takes no axis qubits");
  } else if (spec.kind == LayoutKind::modular) {
    if (spec.axis_qubits.size() > 3) throw std::invalid_argument("modular layout spans at most 3 axes");
    detail::check_qubits(spec.axis_qubits, n);
  } else if (!spec.axis_qubits.empty()) {
    if (static_cast<int>(spec.axis_qubits.size()) != n)
      throw std::invalid_argument("axis assignment must list every qubit once");
    detail::check_qubits(spec.axis_qubits, n);
  }
}

std::vector<int> spatial_axes(int n, const LayoutSpec& spec) {
  validate_layout(spec, n);
  return axes_of(n, spec);
}

Placement layout(int n, const LayoutSpec& spec) {
  validate_layout(spec, n);
  const std::vector<int> axes = axes_of(n, spec);
  std::vector<int> inline_qubits;
  if (spec.kind == LayoutKind::row || spec.kind == LayoutKind::modular)
    for (int q = 1; q <= n; ++q)
      if (std::find(axes.begin(), axes.end(), q) == axes.end()) inline_qubits.push_back(q);

  const double s = spec.spacing;
  const double cell_width = static_cast<double>((std::uint64_t{1} << inline_qubits.size()) - 1) * s;
  std::vector<Point> axis_step;
  for (std::size_t j = 0; j < axes.size(); ++j) axis_step.push_back(axis_vector(spec, static_cast<int>(j + 1), cell_width));

  Placement out;
  out.qubits = n;
  out.cell_radius = spec.cell_radius;
  const std::uint64_t dim = std::uint64_t{1} << n;
  for (std::uint64_t i = 0; i < dim; ++i) {
    Point p;
    int group = 0;
    for (std::size_t k = 0; k < inline_qubits.size(); ++k)
      if (i & detail::bit_of(inline_qubits[k])) p.x += static_cast<double>(std::uint64_t{1} << k) * s;
    for (std::size_t j = 0; j < axes.size(); ++j) {
      if (!(i & detail::bit_of(axes[j]))) continue;
      p.x += axis_step[j].x;
      p.y += axis_step[j].y;
      if (spec.kind == LayoutKind::modular) group |= 1 << j;
      if (spec.kind == LayoutKind::hypercube && j == 3) group = 1;
    }
    out.positions.push_back(p);
    out.groups.push_back(group);
  }
  return out;
}

namespace {

struct Box {
  double x0 = std::numeric_limits<double>::infinity();
  double y0 = std::numeric_limits<double>::infinity();
  double x1 = -std::numeric_limits<double>::infinity();
  double y1 = -std::numeric_limits<double>::infinity();

  void add(Point p, double r) {
    x0 = std::min(x0, p.x - r);
    y0 = std::min(y0, p.y - r);
    x1 = std::max(x1, p.x + r);
    y1 = std::max(y1, p.y + r);
  }
};

Point midpoint(Point a, Point b) { return {(a.x + b.x) / 2, (a.y + b.y) / 2}; }

Point unit(Point v) {
  const double len = std::hypot(v.x, v.y);
  return {v.x / len, v.y / len};
}

}  // namespace

AxisGeometry axis_geometry(int n, const LayoutSpec& spec, int qubit) {
  const Placement placement = layout(n, spec);
  const std::vector<int> axes = axes_of(n, spec);
  const auto it = std::find(axes.begin(), axes.end(), qubit);
  if (it == axes.end()) throw std::invalid_argument("qubit " + std::to_string(qubit) + " is not a spatial axis");
  const int axis = static_cast<int>(it - axes.begin()) + 1;
  const std::uint64_t bit = detail::bit_of(qubit);
  const double r = spec.cell_radius;
  AxisGeometry geometry;

  const bool projected = (spec.kind == LayoutKind::cube || spec.kind == LayoutKind::hypercube) && axis <= 3;
  if (projected) {
    std::vector<int> others;
    for (int a = 1; a <= 3; ++a)
      if (a != axis) others.push_back(a);
    const std::uint64_t e1 = detail::bit_of(axes[static_cast<std::size_t>(others[0] - 1)]);
    const std::uint64_t e2 = detail::bit_of(axes[static_cast<std::size_t>(others[1] - 1)]);
    const Point u1 = unit(axis_vector(spec, others[0], 0));
    const Point u2 = unit(axis_vector(spec, others[1], 0));
    const std::uint64_t cubes = spec.kind == LayoutKind::hypercube ? 2 : 1;
    for (std::uint64_t c = 0; c < cubes; ++c) {
      const std::uint64_t base = c ? detail::bit_of(axes[3]) : 0;
      std::vector<Point> polygon;
      for (const auto& [a, b] : {std::pair{0, 0}, std::pair{1, 0}, std::pair{1, 1}, std::pair{0, 1}}) {
        const std::uint64_t i = base | (a ? e1 : 0) | (b ? e2 : 0);
        Point m = midpoint(placement.positions[i], placement.positions[i | bit]);
        const double s1 = a ? 1.5 * r : -1.5 * r;
        const double s2 = b ? 1.5 * r : -1.5 * r;
        m.x += s1 * u1.x + s2 * u2.x;
        m.y += s1 * u1.y + s2 * u2.y;
        polygon.push_back(m);
      }
      geometry.parts.push_back(std::move(polygon));
    }
    geometry.closed = true;
    return geometry;
  }

  Box zero, one, all;
  for (std::size_t i = 0; i < placement.positions.size(); ++i) {
    const Point p = placement.positions[i];
    ((i & bit) ? one : zero).add(p, r);
    all.add(p, 1.5 * r);
  }
  if (zero.x1 < one.x0 || one.x1 < zero.x0) {
    const double x = zero.x1 < one.x0 ? (zero.x1 + one.x0) / 2 : (one.x1 + zero.x0) / 2;
    geometry.parts.push_back({{x, all.y0}, {x, all.y1}});
  } else if (zero.y1 < one.y0 || one.y1 < zero.y0) {
    const double y = zero.y1 < one.y0 ? (zero.y1 + one.y0) / 2 : (one.y1 + zero.y0) / 2;
    geometry.parts.push_back({{all.x0, y}, {all.x1, y}});
  } else {
    // No global gap (modular depth axis): one separating segment per pair of cells.
    const int cell_bit = 1 << (axis - 1);
    for (int g = 0; g < 8; ++g) {
      if (g & cell_bit) continue;
      Box z, o, both;
      for (std::size_t i = 0; i < placement.positions.size(); ++i) {
        if (placement.groups[i] != g && placement.groups[i] != (g | cell_bit)) continue;
        const Point p = placement.positions[i];
        ((i & bit) ? o : z).add(p, r);
        both.add(p, 1.5 * r);
      }
      if (!std::isfinite(z.x0)) continue;
      if (z.y1 < o.y0 || o.y1 < z.y0) {
        const double y = z.y1 < o.y0 ? (z.y1 + o.y0) / 2 : (o.y1 + z.y0) / 2;
        geometry.parts.push_back({{both.x0, y}, {both.x1, y}});
      } else {
        const double x = z.x1 < o.x0 ? (z.x1 + o.x0) / 2 : (o.x1 + z.x0) / 2;
        geometry.parts.push_back({{x, both.y0}, {x, both.y1}});
      }
    }
  }
  return geometry;
}

std::vector<AxisAnnotation> annotate(const StateVector& state, const LayoutSpec& spec,
                                     const SeparabilityTolerances& tol) {
  const int n = state.qubits();
  std::vector<AxisAnnotation> out;
  if (n < 2) return out;
  for (int q : spatial_axes(n, spec)) {
    const SeparabilityReport<double> report = check_qubit(state, q, tol);
    AxisAnnotation a;
    a.qubit = q;
    a.verdict = verdict_of(report);
    a.geometry = axis_geometry(n, spec, q);
    if (report.separable && report.factor_p) {
      const auto& f = *report.factor_p;
      if (std::abs(f[0]) > tol.zero) a.ratio = f[1] / f[0];
    }
    out.push_back(std::move(a));
  }
  return out;
}

}  // namespace dcn

#include "dcn/dsl.hpp"

#include <charconv>
#include <cmath>
#include <numbers>
#include <optional>
#include <system_error>
#include <utility>

#include <fmt/format.h>

namespace dcn {

ParseError::ParseError(SourceSpan span, std::string message, std::vector<std::string> expected)
    : std::runtime_error("line " + std::to_string(span.line) + ", column " + std::to_string(span.column) + ": " +
                         message),
      span_(span),
      message_(std::move(message)),
      expected_(std::move(expected)) {}

// ---------------------------------------------------------------------------------------------
// Numbers

namespace {

std::optional<double> to_real(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return std::nullopt;
  double v = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::optional<int> to_int(std::string_view s) {
  int v = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

std::string format_real(double v) { return fmt::format("{}", v); }

}  // namespace

std::complex<double> parse_complex(std::string_view token) {
  const auto bad = [&] { return std::invalid_argument("malformed complex literal '" + std::string(token) + "'"); };
  if (const auto at = token.find('@'); at != std::string_view::npos) {
    const auto r = to_real(token.substr(0, at));
    const auto phi = to_real(token.substr(at + 1));
    if (!r || !phi) throw bad();
    return std::polar(*r, *phi);
  }
  if (token.empty() || token.back() != 'j') {
    const auto re = to_real(token);
    if (!re) throw bad();
    return {*re, 0.0};
  }
  std::string_view body = token.substr(0, token.size() - 1);
  std::size_t split = std::string_view::npos;
  for (std::size_t i = body.size(); i-- > 1;) {
    if ((body[i] == '+' || body[i] == '-') && body[i - 1] != 'e' && body[i - 1] != 'E') {
      split = i;
      break;
    }
  }
  const std::string_view re_text = split == std::string_view::npos ? std::string_view{} : body.substr(0, split);
  std::string_view im_text = split == std::string_view::npos ? body : body.substr(split);
  double re = 0.0;
  if (!re_text.empty()) {
    const auto v = to_real(re_text);
    if (!v) throw bad();
    re = *v;
  }
  double im = 0.0;
  if (im_text.empty() || im_text == "+") {
    im = 1.0;
  } else if (im_text == "-") {
    im = -1.0;
  } else {
    const auto v = to_real(im_text);
    if (!v) throw bad();
    im = *v;
  }
  return {re, im};
}

Amplitudes<double> parse_amplitude_list(std::string_view text) {
  std::vector<std::complex<double>> values;
  std::size_t i = 0;
  bool after_comma = false;
  while (true) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i == text.size()) break;
    std::size_t j = i;
    while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j])) && text[j] != ',') ++j;
    if (j == i) throw std::invalid_argument("empty entry in amplitude list");
    values.push_back(parse_complex(text.substr(i, j - i)));
    i = j;
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    after_comma = i < text.size() && text[i] == ',';
    if (after_comma) ++i;
  }
  if (after_comma) throw std::invalid_argument("trailing comma in amplitude list");
  if (values.empty()) throw std::invalid_argument("empty amplitude list");
  Amplitudes<double> amps(static_cast<Eigen::Index>(values.size()));
  for (std::size_t k = 0; k < values.size(); ++k) amps[static_cast<Eigen::Index>(k)] = values[k];
  return amps;
}

std::string format_complex(std::complex<double> value) {
  if (value.imag() == 0.0 && !std::signbit(value.imag())) return format_real(value.real());
  const bool negative = std::signbit(value.imag());
  return format_real(value.real()) + (negative ? "-" : "+") + format_real(std::abs(value.imag())) + "j";
}

std::string format_polar(std::complex<double> value, int digits) {
  const double r = std::abs(value);
  if (r < 1e-13) return "0@0";
  double phi = std::arg(value);
  if (std::abs(phi) < 1e-12) phi = 0.0;
  if (phi <= -std::numbers::pi + 1e-12) phi = std::numbers::pi;
  return fmt::format("{:.{}g}@{:.{}g}", r, digits, phi, digits);
}

// ---------------------------------------------------------------------------------------------
// Tokens

namespace {

struct Token {
  std::string text;
  std::size_t column = 1;
  std::size_t length = 1;
  bool quoted = false;
};

SourceSpan span_of(const Token& t, std::size_t line) { return {line, t.column, t.length}; }

SourceSpan span_between(const Token& first, const Token& last, std::size_t line) {
  return {line, first.column, last.column + last.length - first.column};
}

std::vector<Token> tokenize(std::string_view line, std::size_t line_no) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    const char c = line[i];
    if (c == ' ' || c == '\t' || c == '\r') {
      ++i;
      continue;
    }
    if (c == '#') break;
    Token tok;
    tok.column = i + 1;
    if (c == '"') {
      tok.quoted = true;
      std::size_t j = i + 1;
      bool closed = false;
      while (j < line.size()) {
        if (line[j] == '\\' && j + 1 < line.size()) {
          const char e = line[j + 1];
          tok.text += e == 'n' ? '\n' : e;
          j += 2;
          continue;
        }
        if (line[j] == '"') {
          closed = true;
          break;
        }
        tok.text += line[j++];
      }
      if (!closed) throw ParseError({line_no, i + 1, line.size() - i}, "unterminated string", {"\""});
      tok.length = j + 1 - i;
      i = j + 1;
    } else if (c == ':' || c == '=') {
      tok.text = std::string(1, c);
      i += 1;
    } else {
      std::size_t j = i;
      while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r' && line[j] != '#' &&
             line[j] != ':' && line[j] != '=' && line[j] != '"')
        ++j;
      tok.text = std::string(line.substr(i, j - i));
      tok.length = j - i;
      i = j;
    }
    tokens.push_back(std::move(tok));
  }
  return tokens;
}

class StatementParser {
 public:
  StatementParser(const std::vector<Token>& tokens, std::size_t line, int n) : tokens_(tokens), line_(line), n_(n) {}

  CircuitOp op(std::size_t start) {
    const Token& head = tokens_[start];
    if (head.text == "measure") return measure(start);
    if (head.text == "frame") return frame(start);
    if (head.text == "ctrl") return controlled(start);
    return gate(start, {}, {});
  }

  int qubit(std::size_t index) {
    const Token& t = tokens_[index];
    const auto v = to_int(t.text);
    if (!v) throw ParseError(span_of(t, line_), "expected a qubit number, got '" + t.text + "'", {"<qubit>"});
    if (*v < 1 || *v > n_)
      throw ParseError(span_of(t, line_),
                       "qubit " + std::to_string(*v) + " out of declared range 1.." + std::to_string(n_), {"<qubit>"});
    return *v;
  }

 private:
  [[noreturn]] void arity(std::size_t start, std::size_t expected_args, const std::string& what) {
    const Token& head = tokens_[start];
    const std::size_t have = tokens_.size() - start - 1;
    if (have > expected_args) {
      const Token& extra = tokens_[start + 1 + expected_args];
      throw ParseError(span_of(extra, line_), "'" + head.text + "' takes " + what + "; unexpected '" + extra.text + "'",
                       {"<end of line>"});
    }
    throw ParseError(span_of(head, line_), "'" + head.text + "' takes " + what, {what});
  }

  void check_distinct(const std::vector<std::pair<int, std::size_t>>& used) {
    for (std::size_t a = 0; a < used.size(); ++a)
      for (std::size_t b = 0; b < a; ++b)
        if (used[a].first == used[b].first)
          throw ParseError(span_of(tokens_[used[a].second], line_),
                           "qubit " + std::to_string(used[a].first) + " used twice (control and target must differ)",
                           {"<distinct qubit>"});
  }

  CircuitOp gate(std::size_t start, std::vector<int> controls, std::vector<std::pair<int, std::size_t>> used) {
    const Token& head = tokens_[start];
    const std::string& m = head.text;
    const std::size_t args = tokens_.size() - start - 1;
    struct Simple {
      const char* name;
      GateKind kind;
    };
    static constexpr Simple simple[] = {{"x", GateKind::x}, {"y", GateKind::y}, {"z", GateKind::z},
                                        {"h", GateKind::h}, {"s", GateKind::s}, {"t", GateKind::t}};
    GateOp g;
    std::vector<std::size_t> qubit_tokens;
    bool known = false;
    for (const Simple& s : simple) {
      if (m != s.name) continue;
      known = true;
      if (args != 1) arity(start, 1, "1 qubit");
      g.kind = s.kind;
      qubit_tokens = {start + 1};
    }
    if (known) {
    } else if (m == "phase") {
      if (args != 2) arity(start, 2, "a qubit and an angle");
      g.kind = GateKind::phase;
      qubit_tokens = {start + 1};
      const auto angle = to_real(tokens_[start + 2].text);
      if (!angle) throw ParseError(span_of(tokens_[start + 2], line_), "expected an angle in radians", {"<angle>"});
      g.angle = *angle;
    } else if (m == "u") {
      if (args != 5) arity(start, 5, "a qubit and 4 matrix entries");
      g.kind = GateKind::u;
      qubit_tokens = {start + 1};
      for (int e = 0; e < 4; ++e) {
        const Token& t = tokens_[start + 2 + static_cast<std::size_t>(e)];
        try {
          g.matrix(e / 2, e % 2) = parse_complex(t.text);
        } catch (const std::invalid_argument& ex) {
          throw ParseError(span_of(t, line_), ex.what(), {"<complex>"});
        }
      }
      if (!is_unitary(g.matrix))
        throw ParseError(span_between(tokens_[start + 2], tokens_.back(), line_), "u matrix is not unitary");
    } else if (m == "cnot") {
      if (args != 2) arity(start, 2, "2 qubits");
      qubit_tokens = {start + 1, start + 2};
      g.kind = GateKind::x;
    } else if (m == "ccnot") {
      if (args != 3) arity(start, 3, "3 qubits");
      qubit_tokens = {start + 1, start + 2, start + 3};
      g.kind = GateKind::x;
    } else if (m == "swap") {
      if (!controls.empty())
        throw ParseError(span_of(head, line_), "swap cannot be controlled", {"x", "y", "z", "h", "s", "t", "phase", "u"});
      if (args != 2) arity(start, 2, "2 qubits");
      qubit_tokens = {start + 1, start + 2};
      g.kind = GateKind::swap;
    } else {
      throw ParseError(span_of(head, line_), "unknown mnemonic '" + m + "'",
                       {"x", "y", "z", "h", "s", "t", "phase", "u", "cnot", "ccnot", "swap", "ctrl", "measure", "frame",
                        "init", "qubits"});
    }
    std::vector<int> qs;
    for (std::size_t idx : qubit_tokens) {
      qs.push_back(qubit(idx));
      used.emplace_back(qs.back(), idx);
    }
    check_distinct(used);
    if (g.kind == GateKind::swap) {
      g.targets = qs;
    } else {
      g.targets = {qs.back()};
      controls.insert(controls.end(), qs.begin(), qs.end() - 1);
    }
    g.controls = std::move(controls);
    return CircuitOp{std::move(g)};
  }

  CircuitOp controlled(std::size_t start) {
    std::vector<int> controls;
    std::vector<std::pair<int, std::size_t>> used;
    std::size_t i = start + 1;
    while (i < tokens_.size() && tokens_[i].text != ":") {
      controls.push_back(qubit(i));
      used.emplace_back(controls.back(), i);
      ++i;
    }
    if (controls.empty() || i + 1 >= tokens_.size())
      throw ParseError(span_of(tokens_[start], line_), "expected 'ctrl <controls...> : <gate>'", {"<qubit>", ":"});
    const std::string& inner = tokens_[i + 1].text;
    if (inner == "ctrl" || inner == "measure" || inner == "frame")
      throw ParseError(span_of(tokens_[i + 1], line_), "'" + inner + "' cannot be controlled", {"<gate>"});
    return gate(i + 1, std::move(controls), std::move(used));
  }

  CircuitOp measure(std::size_t start) {
    MeasureOp m;
    std::vector<std::pair<int, std::size_t>> used;
    std::size_t i = start + 1;
    while (i < tokens_.size() && tokens_[i].text != "=") {
      m.qubits.push_back(qubit(i));
      used.emplace_back(m.qubits.back(), i);
      ++i;
    }
    if (m.qubits.empty()) throw ParseError(span_of(tokens_[start], line_), "'measure' needs a qubit", {"<qubit>"});
    for (std::size_t a = 0; a < used.size(); ++a)
      for (std::size_t b = 0; b < a; ++b)
        if (used[a].first == used[b].first)
          throw ParseError(span_of(tokens_[used[a].second], line_), "qubit measured twice", {"<distinct qubit>"});
    if (i < tokens_.size()) {
      const Token& eq = tokens_[i];
      std::vector<int> bits;
      for (std::size_t j = i + 1; j < tokens_.size(); ++j) {
        const Token& t = tokens_[j];
        if (t.text != "0" && t.text != "1") throw ParseError(span_of(t, line_), "expected 0 or 1", {"0", "1"});
        bits.push_back(t.text == "1" ? 1 : 0);
        if (bits.size() > m.qubits.size())
          throw ParseError(span_of(t, line_), "more outcome bits than measured qubits", {"<end of line>"});
      }
      if (bits.size() != m.qubits.size())
        throw ParseError(span_of(eq, line_), "expected one outcome bit per measured qubit", {"0", "1"});
      m.forced = std::move(bits);
    }
    return CircuitOp{std::move(m)};
  }

  CircuitOp frame(std::size_t start) {
    const std::size_t args = tokens_.size() - start - 1;
    if (args != 1) arity(start, 1, "one quoted label");
    const Token& t = tokens_[start + 1];
    if (!t.quoted) throw ParseError(span_of(t, line_), "frame label must be quoted", {"\"<label>\""});
    return CircuitOp{FrameOp{t.text}};
  }

  const std::vector<Token>& tokens_;
  std::size_t line_;
  int n_;
};

std::string quote(const std::string& label) {
  std::string out = "\"";
  for (char c : label) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  return out + "\"";
}

std::string join_qubits(const std::vector<int>& qs) {
  std::string out;
  for (std::size_t i = 0; i < qs.size(); ++i) out += (i ? " " : "") + std::to_string(qs[i]);
  return out;
}

std::string gate_body(const GateOp& g) {
  const std::string target = std::to_string(g.targets.front());
  switch (g.kind) {
    case GateKind::phase: return "phase " + target + " " + format_real(g.angle);
    case GateKind::u:
      return "u " + target + " " + format_complex(g.matrix(0, 0)) + " " + format_complex(g.matrix(0, 1)) + " " +
             format_complex(g.matrix(1, 0)) + " " + format_complex(g.matrix(1, 1));
    case GateKind::swap: return "swap " + join_qubits(g.targets);
    default: return std::string(mnemonic(g.kind)) + " " + target;
  }
}

}  // namespace

std::string statement_text(const CircuitOp& o) {
  if (const auto* g = std::get_if<GateOp>(&o.body)) {
    if (g->kind == GateKind::x && g->controls.size() == 1)
      return "cnot " + std::to_string(g->controls[0]) + " " + std::to_string(g->targets[0]);
    if (g->kind == GateKind::x && g->controls.size() == 2)
      return "ccnot " + join_qubits(g->controls) + " " + std::to_string(g->targets[0]);
    if (!g->controls.empty()) return "ctrl " + join_qubits(g->controls) + " : " + gate_body(*g);
    return gate_body(*g);
  }
  if (const auto* m = std::get_if<MeasureOp>(&o.body)) {
    std::string out = "measure " + join_qubits(m->qubits);
    if (m->forced) out += " = " + join_qubits(*m->forced);
    return out;
  }
  return "frame " + quote(std::get<FrameOp>(o.body).label);
}

std::string format(const Circuit& circuit) {
  std::string out = "qubits " + std::to_string(circuit.qubits) + "\n";
  if (circuit.init) {
    if (const auto* ket = std::get_if<InitKet>(&*circuit.init)) {
      out += "init ket " + ket->bits + "\n";
    } else {
      out += "init amps";
      for (const auto& a : std::get<InitAmps>(*circuit.init).amps) out += " " + format_complex(a);
      out += "\n";
    }
  }
  for (const CircuitOp& o : circuit.ops) out += statement_text(o) + "\n";
  return out;
}

Circuit parse(std::string_view text, std::string name) {
  Circuit circuit;
  circuit.name = std::move(name);
  bool declared = false;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    const std::string_view line = text.substr(pos, end - pos);
    ++line_no;
    pos = end + 1;
    const std::vector<Token> tokens = tokenize(line, line_no);
    if (tokens.empty()) continue;
    const Token& head = tokens.front();

    if (head.text == "qubits") {
      if (declared) throw ParseError(span_of(head, line_no), "duplicate 'qubits' declaration");
      if (tokens.size() != 2)
        throw ParseError(span_of(tokens.size() > 2 ? tokens[2] : head, line_no), "'qubits' takes one count",
                         {"<count>"});
      const auto n = to_int(tokens[1].text);
      if (!n || *n < 1 || *n > kMaxQubits)
        throw ParseError(span_of(tokens[1], line_no), "qubit count must be an integer in 1.." + std::to_string(kMaxQubits),
                         {"<count>"});
      circuit.qubits = *n;
      declared = true;
      continue;
    }
    if (!declared) throw ParseError(span_of(head, line_no), "expected 'qubits <n>' before any statement", {"qubits"});

    if (head.text == "init") {
      if (circuit.init) throw ParseError(span_of(head, line_no), "duplicate 'init'");
      if (!circuit.ops.empty()) throw ParseError(span_of(head, line_no), "'init' must precede all operations");
      if (tokens.size() < 2 || (tokens[1].text != "ket" && tokens[1].text != "amps"))
        throw ParseError(span_of(tokens.size() > 1 ? tokens[1] : head, line_no), "expected 'ket' or 'amps'",
                         {"ket", "amps"});
      if (tokens[1].text == "ket") {
        if (tokens.size() != 3)
          throw ParseError(span_of(tokens.size() > 3 ? tokens[3] : tokens[1], line_no), "'init ket' takes one bit string",
                           {"<bits>"});
        const Token& bits = tokens[2];
        if (static_cast<int>(bits.text.size()) != circuit.qubits ||
            bits.text.find_first_not_of("01") != std::string::npos)
          throw ParseError(span_of(bits, line_no), "expected " + std::to_string(circuit.qubits) + " bits of 0/1",
                           {"<bits>"});
        circuit.init = InitKet{bits.text};
      } else {
        const std::size_t want = std::size_t{1} << circuit.qubits;
        if (tokens.size() - 2 != want)
          throw ParseError(span_of(tokens.size() - 2 > want ? tokens[2 + want] : tokens[1], line_no),
                           "expected " + std::to_string(want) + " amplitudes", {"<complex>"});
        Amplitudes<double> amps(static_cast<Eigen::Index>(want));
        for (std::size_t k = 0; k < want; ++k) {
          try {
            amps[static_cast<Eigen::Index>(k)] = parse_complex(tokens[2 + k].text);
          } catch (const std::invalid_argument& ex) {
            throw ParseError(span_of(tokens[2 + k], line_no), ex.what(), {"<complex>"});
          }
        }
        try {
          (void)StateVector::from_amplitudes(circuit.qubits, amps);
        } catch (const std::invalid_argument& ex) {
          throw ParseError(span_between(tokens[2], tokens.back(), line_no), ex.what());
        }
        circuit.init = InitAmps{std::move(amps)};
      }
      continue;
    }

    StatementParser parser(tokens, line_no, circuit.qubits);
    circuit.ops.push_back(parser.op(0));
  }
  if (!declared) throw ParseError({1, 1, 1}, "missing 'qubits <n>' declaration", {"qubits"});
  return circuit;
}

CircuitOp parse_statement(std::string_view line, int n) {
  if (line.find('\n') != std::string_view::npos) throw ParseError({1, 1, 1}, "expected a single statement");
  const std::vector<Token> tokens = tokenize(line, 1);
  if (tokens.empty()) throw ParseError({1, 1, 1}, "empty statement", {"<statement>"});
  if (tokens.front().text == "qubits" || tokens.front().text == "init")
    throw ParseError(span_of(tokens.front(), 1), "'" + tokens.front().text + "' is not an operation", {"<gate>"});
  StatementParser parser(tokens, 1, n);
  return parser.op(0);
}

}  // namespace dcn

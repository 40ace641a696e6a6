#pragma once

// Line-oriented circuit files (.dcn).
//
//   qubits <n>
//   init ket <bits>                 leftmost bit is qubit n
//   init amps <c0> <c1> ...         2^n amplitudes, index ascending
//   x|y|z|h|s|t <q>
//   phase <q> <theta_rad>
//   u <q> <u00> <u01> <u10> <u11>
//   cnot <c> <t>
//   ccnot <c1> <c2> <t>
//   swap <a> <b>
//   ctrl <c...> : <gate statement>  any gate except swap under extra controls
//   measure <q...> [= <b...>]
//   frame "<label>"
//
// '#' starts a comment. Complex literals are `re`, `imj`, `re+imj` or polar `r@phase`.

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dcn/circuit.hpp"

namespace dcn {

struct SourceSpan {
  std::size_t line = 1;
  std::size_t column = 1;
  std::size_t length = 1;

  friend bool operator==(const SourceSpan&, const SourceSpan&) = default;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(SourceSpan span, std::string message, std::vector<std::string> expected = {});

  const SourceSpan& span() const { return span_; }
  const std::string& message() const { return message_; }
  const std::vector<std::string>& expected() const { return expected_; }

 private:
  SourceSpan span_;
  std::string message_;
  std::vector<std::string> expected_;
};

/// Parses a whole circuit file. Throws ParseError.
Circuit parse(std::string_view text, std::string name = {});

/// Parses one op statement against an n-qubit register (used by the session service).
CircuitOp parse_statement(std::string_view line, int n);

/// Canonical text; parse(format(c)) == c.
std::string format(const Circuit& circuit);

/// Statement text of one op, without trailing newline.
std::string statement_text(const CircuitOp& op);

/// Throws std::invalid_argument on malformed literals.
std::complex<double> parse_complex(std::string_view token);
Amplitudes<double> parse_amplitude_list(std::string_view text);

/// Shortest text that parses back to exactly the same value.
std::string format_complex(std::complex<double> value);

/// `r@phi` with `digits` significant digits, phi in (-pi, pi]; zero prints as 0@0.
std::string format_polar(std::complex<double> value, int digits = 12);

}  // namespace dcn

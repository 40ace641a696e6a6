#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <regex>
#include <sstream>

#include "dcn/dsl.hpp"
#include "test_support.hpp"

namespace dcn {
namespace {

namespace fs = std::filesystem;

std::string read_file(const fs::path& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ParseError parse_error(std::string_view text) {
  try {
    parse(text);
  } catch (const ParseError& e) {
    return e;
  }
  ADD_FAILURE() << "no parse error for:\n" << text;
  return ParseError({}, "none");
}

TEST(Dsl, ParsesEveryStatementForm) {
  const Circuit c = parse(
      "# header comment\n"
      "qubits 3\n"
      "init ket 001   # trailing comment\n"
      "x 1\ny 2\nz 3\nh 1\ns 2\nt 3\n"
      "phase 1 0.5\n"
      "u 2 0 1 1 0\n"
      "cnot 1 2\n"
      "ccnot 1 2 3\n"
      "swap 1 3\n"
      "ctrl 3 : h 1\n"
      "measure 1 2 = 0 1\n"
      "measure 3\n"
      "frame \"a \\\"quoted\\\" label\"\n");
  EXPECT_EQ(c.qubits, 3);
  ASSERT_TRUE(c.init);
  EXPECT_EQ(std::get<InitKet>(*c.init).bits, "001");
  ASSERT_EQ(c.ops.size(), 15u);
  EXPECT_EQ(c.ops[0], op::x(1));
  EXPECT_EQ(c.ops[6], op::phase(1, 0.5));
  EXPECT_EQ(c.ops[7], op::u(2, gate::x()));
  EXPECT_EQ(c.ops[8], op::cnot(1, 2));
  EXPECT_EQ(c.ops[9], op::ccnot(1, 2, 3));
  EXPECT_EQ(c.ops[10], op::swap(1, 3));
  EXPECT_EQ(c.ops[11], op::gate(GateKind::h, 1, {3}));
  EXPECT_EQ(c.ops[12], op::measure({1, 2}, std::vector<int>{0, 1}));
  EXPECT_EQ(c.ops[13], op::measure({3}));
  EXPECT_EQ(c.ops[14], op::frame("a \"quoted\" label"));
}

TEST(Dsl, ControlListsNest) {
  const Circuit c = parse("qubits 4\nctrl 1 : cnot 2 3\nctrl 1 2 : z 4\n");
  EXPECT_EQ(c.ops[0], op::ccnot(1, 2, 3));
  EXPECT_EQ(c.ops[1], op::gate(GateKind::z, 4, {1, 2}));
  EXPECT_EQ(statement_text(c.ops[1]), "ctrl 1 2 : z 4");
}

TEST(Dsl, InitAmpsAcceptsAllLiteralForms) {
  const Circuit c = parse("qubits 2\ninit amps 0.5 0.5j 0.5@3.141592653589793 -0.5+0j\n");
  const auto& a = std::get<InitAmps>(*c.init).amps;
  EXPECT_EQ(a[0], std::complex<double>(0.5));
  EXPECT_EQ(a[1], std::complex<double>(0, 0.5));
  EXPECT_NEAR(std::abs(a[2] + 0.5), 0, 1e-15);
  EXPECT_EQ(a[3], std::complex<double>(-0.5));
}

TEST(Dsl, ComplexLiterals) {
  EXPECT_EQ(parse_complex("1"), std::complex<double>(1));
  EXPECT_EQ(parse_complex("+2.5"), std::complex<double>(2.5));
  EXPECT_EQ(parse_complex("j"), std::complex<double>(0, 1));
  EXPECT_EQ(parse_complex("-j"), std::complex<double>(0, -1));
  EXPECT_EQ(parse_complex("3-4j"), std::complex<double>(3, -4));
  EXPECT_EQ(parse_complex("1e-3+2E+2j"), std::complex<double>(1e-3, 200));
  EXPECT_EQ(parse_complex("-1.5e-3j"), std::complex<double>(0, -1.5e-3));
  EXPECT_NEAR(std::abs(parse_complex("2@1.5707963267948966") - std::complex<double>(0, 2)), 0, 1e-15);
  for (const char* bad : {"", "abc", "1+", "1@", "@1", "1jj", "nan", "inf", "1+2", "1 2"})
    EXPECT_THROW(parse_complex(bad), std::invalid_argument) << bad;
}

TEST(Dsl, FormatComplexRoundTripsExactly) {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 2000; ++t) {
    const std::complex<double> z = testing::gaussian(rng) * std::pow(10.0, static_cast<double>(rng() % 12) - 6.0);
    EXPECT_EQ(parse_complex(format_complex(z)), z) << format_complex(z);
  }
  EXPECT_EQ(format_complex({0.5, 0}), "0.5");
  EXPECT_EQ(format_complex({0, -1}), "0-1j");
  EXPECT_EQ(format_complex({1, 2}), "1+2j");
  EXPECT_EQ(parse_complex(format_complex({0.0, -0.0})), std::complex<double>(0.0, -0.0));
}

TEST(Dsl, FormatPolar) {
  EXPECT_EQ(format_polar({0, 0}), "0@0");
  EXPECT_EQ(format_polar({1e-14, 0}), "0@0");
  EXPECT_EQ(format_polar({0.5, 0}), "0.5@0");
  EXPECT_EQ(format_polar({-1, 0}), "1@3.14159265359");
  EXPECT_EQ(format_polar({-1, -1e-17}), "1@3.14159265359");
  EXPECT_EQ(format_polar(std::polar(1 / std::sqrt(2.0), -std::numbers::pi / 4)), "0.707106781187@-0.785398163397");
  EXPECT_EQ(format_polar({1, 1e-13}), "1@0");
}

TEST(Dsl, AmplitudeListSeparators) {
  const Amplitudes<double> a = parse_amplitude_list("1, 0  ,0 0");
  ASSERT_EQ(a.size(), 4);
  EXPECT_EQ(a[0], std::complex<double>(1));
  EXPECT_THROW(parse_amplitude_list("1,,0"), std::invalid_argument);
  EXPECT_THROW(parse_amplitude_list(""), std::invalid_argument);
}

TEST(Dsl, BuiltinsRoundTrip) {
  for (const BuiltinInfo& b : builtin_catalog()) {
    std::vector<std::string> params = b.parameters;
    if (params.empty()) params.push_back("");
    for (const std::string& p : params) {
      const Circuit c = builtin_circuit(b.name, p);
      const std::string text = format(c);
      const Circuit back = parse(text, c.name);
      EXPECT_EQ(back, c) << b.name << ":" << p << "\n" << text;
      EXPECT_EQ(format(back), text);
    }
  }
}

CircuitOp random_op(int n, std::mt19937_64& rng) {
  const auto pick = [&](int hi) { return 1 + static_cast<int>(rng() % static_cast<unsigned>(hi)); };
  std::vector<int> qs = testing::random_order(n, rng);
  switch (rng() % 9) {
    case 0: return op::gate(static_cast<GateKind>(rng() % 6), qs[0]);
    case 1: return op::phase(qs[0], std::uniform_real_distribution<double>(-10, 10)(rng));
    case 2: return op::u(qs[0], testing::random_unitary(rng));
    case 3: return n >= 2 ? op::cnot(qs[0], qs[1]) : op::x(qs[0]);
    case 4: return n >= 3 ? op::ccnot(qs[0], qs[1], qs[2]) : op::h(qs[0]);
    case 5: return n >= 2 ? op::swap(qs[0], qs[1]) : op::t(qs[0]);
    case 6: {
      const int k = pick(n);
      std::vector<int> m(qs.begin(), qs.begin() + k);
      if (rng() % 2) return op::measure(m);
      std::vector<int> bits;
      for (int j = 0; j < k; ++j) bits.push_back(static_cast<int>(rng() % 2));
      return op::measure(m, bits);
    }
    case 7: {
      if (n < 2) return op::z(qs[0]);
      const int k = pick(n - 1);
      std::vector<int> controls(qs.begin() + 1, qs.begin() + 1 + k);
      CircuitOp o = rng() % 2 ? op::phase(qs[0], 0.25) : op::gate(static_cast<GateKind>(rng() % 6), qs[0]);
      std::get<GateOp>(o.body).controls = controls;
      return o;
    }
    default: {
      static const char* labels[] = {"step", "with space", "quote \" inside", "back\\slash", "", "multi\nline"};
      return op::frame(labels[rng() % 6]);
    }
  }
}

TEST(Dsl, RandomCircuitsRoundTrip) {
  std::mt19937_64 rng(2718);
  for (int t = 0; t < 1000; ++t) {
    Circuit c;
    c.qubits = 1 + static_cast<int>(rng() % 6);
    if (rng() % 3 == 0) {
      std::string bits;
      for (int k = 0; k < c.qubits; ++k) bits += static_cast<char>('0' + rng() % 2);
      c.init = InitKet{bits};
    } else if (rng() % 3 == 0) {
      c.init = InitAmps{testing::haar_state(c.qubits, rng).amplitudes()};
    }
    const int len = static_cast<int>(rng() % 12);
    for (int k = 0; k < len; ++k) c.ops.push_back(random_op(c.qubits, rng));
    const std::string text = format(c);
    Circuit back;
    ASSERT_NO_THROW(back = parse(text)) << text;
    ASSERT_EQ(back, c) << text;
  }
}

TEST(Dsl, ParseStatement) {
  EXPECT_EQ(parse_statement("cnot 1 2", 2), op::cnot(1, 2));
  EXPECT_EQ(parse_statement("  h 3  # comment", 3), op::h(3));
  EXPECT_THROW(parse_statement("qubits 2", 2), ParseError);
  EXPECT_THROW(parse_statement("init ket 00", 2), ParseError);
  EXPECT_THROW(parse_statement("h 1\nh 2", 2), ParseError);
  EXPECT_THROW(parse_statement("", 2), ParseError);
  EXPECT_THROW(parse_statement("h 3", 2), ParseError);
}

TEST(Dsl, ErrorMessageCarriesPosition) {
  const ParseError e = parse_error("qubits 2\nfoo 1\n");
  EXPECT_EQ(e.span(), (SourceSpan{2, 1, 3}));
  EXPECT_EQ(std::string(e.what()), "line 2, column 1: unknown mnemonic 'foo'");
  EXPECT_FALSE(e.expected().empty());
  EXPECT_EQ(e.expected().front(), "x");
}

TEST(Dsl, MissingDeclarationInEmptyFile) {
  EXPECT_EQ(parse_error("").span(), (SourceSpan{1, 1, 1}));
  EXPECT_EQ(parse_error("# only a comment\n").span(), (SourceSpan{1, 1, 1}));
}

TEST(Dsl, MalformedCorpusReportsExpectedSpans) {
  const fs::path dir = fs::path(DCN_DATA_DIR) / "malformed";
  const std::regex header(R"(^# expect (\d+):(\d+) (.*)$)");
  int files = 0;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() != ".dcn") continue;
    ++files;
    const std::string text = read_file(entry.path());
    const std::string first = text.substr(0, text.find('\n'));
    std::smatch m;
    ASSERT_TRUE(std::regex_match(first, m, header)) << entry.path();
    const ParseError e = parse_error(text);
    EXPECT_EQ(e.span().line, std::stoul(m[1])) << entry.path() << ": " << e.what();
    EXPECT_EQ(e.span().column, std::stoul(m[2])) << entry.path() << ": " << e.what();
    EXPECT_NE(e.message().find(m[3].str()), std::string::npos) << entry.path() << ": " << e.what();
  }
  EXPECT_GE(files, 15);
}

TEST(Dsl, TabsAndCarriageReturnsAreWhitespace) {
  const Circuit c = parse("qubits 2\r\n\tcnot\t1 2\r\n");
  ASSERT_EQ(c.ops.size(), 1u);
  EXPECT_EQ(c.ops[0], op::cnot(1, 2));
}

}  // namespace
}  // namespace dcn

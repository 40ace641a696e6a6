#include <gtest/gtest.h>

#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>
#include <thread>

#include "dcn/dsl.hpp"
#include "dcn/http_service.hpp"
#include "dcn/records.hpp"
#include "golden.hpp"
#include "test_support.hpp"

// After Eigen: <resolv.h> defines _res.
#include <httplib.h>

namespace dcn {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code = -1;
  std::string out;
  std::string err;
};

std::string quote(const std::string& arg) {
  std::string out = "'";
  for (char c : arg) out += c == '\'' ? std::string("'\\''") : std::string(1, c);
  return out + "'";
}

fs::path scratch_dir() {
  const fs::path dir = fs::temp_directory_path() / ("dcn_cli_test_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir;
}

Result run(const std::vector<std::string>& args) {
  const fs::path err_file = scratch_dir() / "stderr.txt";
  std::string cmd = quote(DCN_CLI_PATH);
  for (const std::string& a : args) cmd += " " + quote(a);
  cmd += " 2>" + quote(err_file.string());
  Result r;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf{};
  std::size_t got = 0;
  while ((got = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), got);
  const int status = ::pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.err = testing::read_text(err_file).value_or("");
  return r;
}

fs::path write_circuit(const std::string& name, const std::string& text) {
  const fs::path p = scratch_dir() / name;
  std::ofstream(p) << text;
  return p;
}

std::string amps_arg(const StateVector& s) {
  std::string out;
  for (Eigen::Index i = 0; i < s.dim(); ++i) out += (i ? " " : "") + format_complex(s[i]);
  return out;
}

std::vector<Json> lines_of(const std::string& text) {
  std::vector<Json> out;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) out.push_back(Json::parse(line));
  return out;
}

TEST(Cli, RunBell) {
  const Result r = run({"run", "bell"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto lines = lines_of(r.out);
  ASSERT_EQ(lines.size(), 4u);
  EXPECT_EQ(lines[2]["label"], "cnot 2 1");
  EXPECT_EQ(lines[3]["final"]["verdicts"], (Json{"entangled", "entangled"}));
  EXPECT_EQ(lines[3]["final"]["blocks"].size(), 1u);
}

TEST(Cli, RunTeleportWithForcedOutcomes) {
  const Result r = run({"run", "teleport", "--force-measure", "1=0,2=1"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto lines = lines_of(r.out);
  const Json& final = lines.back()["final"];
  bool measured = false;
  for (const Json& l : lines)
    if (l.contains("outcome")) {
      measured = true;
      EXPECT_EQ(l["outcome"]["probability"], 0.25);
    }
  EXPECT_TRUE(measured);
  ASSERT_EQ(final["blocks"].size(), 3u);
  EXPECT_EQ(final["blocks"][2]["qubits"], (Json{3}));
  EXPECT_EQ(final["blocks"][2]["amplitudes"], polar_list(example_qubit_state()));
}

TEST(Cli, ParseErrorExitsOneWithPosition) {
  const fs::path p = write_circuit("broken.dcn", "qubits 2\nh 1\ncnot 1 1\n");
  const Result r = run({"run", p.string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find(":3:8: "), std::string::npos) << r.err;
  EXPECT_TRUE(r.out.empty());
}

TEST(Cli, UsageErrorsExitOne) {
  EXPECT_EQ(run({}).code, 1);
  EXPECT_EQ(run({"run"}).code, 1);
  EXPECT_EQ(run({"run", "nosuchcircuit"}).code, 1);
  EXPECT_EQ(run({"run", "bell", "--layout", "cube"}).code, 1);
  EXPECT_EQ(run({"run", "bell", "--force-measure", "1"}).code, 1);
  EXPECT_EQ(run({"check-sep", "--ket", "01"}).code, 1);
  EXPECT_EQ(run({"check-sep", "--ket", "01", "--partition", "2", "4"}).code, 1);
  EXPECT_EQ(run({"check-sep", "--amps", "1 1", "--qubit", "1"}).code, 1);
  EXPECT_EQ(run({"check-sep", "--amps", "1 0 0", "--normalize", "--qubit", "1"}).code, 1);
  EXPECT_EQ(run({"run", "bell", "--tol-sep", "0"}).code, 1);
}

TEST(Cli, ImpossibleForcedOutcomeExitsTwo) {
  const fs::path p = write_circuit("impossible.dcn", "qubits 1\nmeasure 1 = 1\n");
  const Result r = run({"run", p.string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("runtime error"), std::string::npos);
}

TEST(Cli, CheckSepColumnZeroState) {
  const Result r = run({"check-sep", "--amps", amps_arg(testing::column_zero_state()), "--partition", "2", "4"});
  EXPECT_EQ(r.code, 3) << r.err;
  const Json j = Json::parse(r.out);
  EXPECT_EQ(j["witness"], (Json{{"k", 1}, {"r", 0}}));
}

TEST(Cli, CheckSepFourFourState) {
  const Result r = run({"check-sep", "--amps", amps_arg(testing::four_four_state()), "--partition", "4", "4"});
  EXPECT_EQ(r.code, 0) << r.err;
  const Json j = Json::parse(r.out);
  EXPECT_EQ(j["ratios"].size(), 3u);
  EXPECT_EQ(j["ratios"][0]["m"], "0@0");
}

TEST(Cli, CheckSepSingleQubit) {
  const Result r = run({"check-sep", "--amps", amps_arg(testing::partially_separable3()), "--qubit", "1"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(run({"check-sep", "--amps", amps_arg(testing::partially_separable3()), "--qubit", "2"}).code, 3);
}

TEST(Cli, CheckSepKetAndCircuit) {
  EXPECT_EQ(run({"check-sep", "--ket", "101", "--partition", "2", "4", "--order", "3,1,2"}).code, 0);
  EXPECT_EQ(run({"check-sep", "bell", "--qubit", "1"}).code, 3);
  EXPECT_EQ(run({"check-sep", "deutsch:id", "--partition", "2", "2"}).code, 0);
}

TEST(Cli, CheckSepMarginal) {
  const Result r = run({"check-sep", "--amps", "0.5 0.5 0.5 0.50000003", "--normalize", "--partition", "2", "2"});
  EXPECT_EQ(r.code, 4) << r.out << r.err;
  EXPECT_EQ(Json::parse(r.out)["marginal"], true);
  EXPECT_EQ(run({"check-sep", "--amps", "0.5 0.5 0.5 0.50000003", "--normalize", "--partition", "2", "2", "--tol-sep",
                 "1e-6", "--tol-res", "1e-6"})
                .code,
            0);
}

TEST(Cli, OutDirectoryArtifacts) {
  const fs::path dir = scratch_dir() / "out";
  fs::remove_all(dir);
  const Result r = run({"run", "bell", "--out", dir.string(), "--layout", "row"});
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* name : {"bell_0_initial.svg", "bell_1_h_2.svg", "bell_2_cnot_2_1.svg", "bell_trace.svg",
                           "bell.jsonl", "bell.dcn"})
    EXPECT_TRUE(fs::exists(dir / name)) << name;
  EXPECT_EQ(testing::read_text(dir / "bell.jsonl").value(), r.out);
  EXPECT_EQ(parse(testing::read_text(dir / "bell.dcn").value()), builtin_circuit("bell"));
}

TEST(Cli, GoldenTranscripts) {
  for (const std::string& spec : testing::builtin_specs()) {
    const Result r = run({"run", spec});
    ASSERT_EQ(r.code, 0) << spec << ": " << r.err;
    const std::string problem = testing::check_golden("cli/" + testing::file_stem(spec) + ".jsonl", r.out);
    EXPECT_TRUE(problem.empty()) << problem;
  }
}

TEST(Cli, SeedChangesSampledOutcomesOnly) {
  EXPECT_EQ(run({"run", "teleport", "--seed", "3"}).out, run({"run", "teleport", "--seed", "3"}).out);
  EXPECT_EQ(run({"run", "bell", "--seed", "3"}).out, run({"run", "bell", "--seed", "4"}).out);
}

TEST(Cli, ServeRefusesBusyPort) {
  HttpService busy;
  const int port = busy.bind("127.0.0.1", 0);
  ASSERT_GT(port, 0);
  std::thread t([&] { busy.listen(); });
  busy.wait_until_ready();
  const Result r = run({"serve", "--port", std::to_string(port)});
  busy.stop();
  t.join();
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("cannot bind"), std::string::npos);
}

TEST(Cli, ServeEchoesTolerances) {
  int out[2];
  ASSERT_EQ(::pipe(out), 0);
  const pid_t pid = ::fork();
  ASSERT_GE(pid, 0);
  if (pid == 0) {
    ::dup2(out[1], STDOUT_FILENO);
    ::close(out[0]);
    ::close(out[1]);
    ::execl(DCN_CLI_PATH, DCN_CLI_PATH, "serve", "--port", "0", "--tol-sep", "1e-6", static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::close(out[1]);
  std::string banner;
  char c = 0;
  while (::read(out[0], &c, 1) == 1 && c != '\n') banner += c;
  ::close(out[0]);
  std::smatch m;
  const bool matched = std::regex_search(banner, m, std::regex(R"(:(\d+)$)"));
  Json config;
  if (matched) {
    httplib::Client client("127.0.0.1", std::stoi(m[1]));
    const auto res = client.Get("/config");
    if (res) config = Json::parse(res->body);
  }
  ::kill(pid, SIGTERM);
  int status = 0;
  ::waitpid(pid, &status, 0);
  ASSERT_TRUE(matched) << banner;
  EXPECT_EQ(config["tolerances"]["sep"], 1e-6);
}

}  // namespace
}  // namespace dcn

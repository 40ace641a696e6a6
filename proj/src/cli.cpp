#include "dcn/cli.hpp"

#include <bit>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dcn/circuit.hpp"
#include "dcn/dsl.hpp"
#include "dcn/http_service.hpp"
#include "dcn/layout.hpp"
#include "dcn/records.hpp"
#include "dcn/separability.hpp"
#include "dcn/svg.hpp"

namespace dcn {

namespace {

namespace fs = std::filesystem;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Tolerances {
  SeparabilityTolerances sep;
};

void add_tolerances(CLI::App& cmd, Tolerances& tol) {
  cmd.add_option("--tol-zero", tol.sep.zero, "first-nonzero threshold")->check(CLI::PositiveNumber);
  cmd.add_option("--tol-sep", tol.sep.sep, "bound on ratio-relation violations")->check(CLI::PositiveNumber);
  cmd.add_option("--tol-res", tol.sep.residual, "bound on factor reconstruction residual")->check(CLI::PositiveNumber);
}

std::map<int, int> parse_forced(const std::string& text) {
  std::map<int, int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw UsageError("--force-measure expects q=b pairs, got '" + item + "'");
    try {
      std::size_t used_q = 0, used_b = 0;
      const int q = std::stoi(item.substr(0, eq), &used_q);
      const int b = std::stoi(item.substr(eq + 1), &used_b);
      if (used_q != eq || used_b != item.size() - eq - 1 || (b != 0 && b != 1)) throw std::invalid_argument(item);
      out[q] = b;
    } catch (const std::exception&) {
      throw UsageError("--force-measure expects q=b pairs, got '" + item + "'");
    }
  }
  return out;
}

std::vector<int> parse_order(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError("--order expects comma-separated qubit numbers, got '" + text + "'");
    }
  }
  return out;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// File path when one exists, otherwise a builtin name.
Circuit load_circuit(const std::string& source) {
  const fs::path path(source);
  if (fs::is_regular_file(path)) {
    try {
      return parse(read_file(path), path.stem().string());
    } catch (ParseError& e) {
      throw ParseError(e.span(), source + ":" + std::to_string(e.span().line) + ":" + std::to_string(e.span().column) +
                                     ": " + e.message(),
                       e.expected());
    }
  }
  try {
    return builtin_circuit_spec(source);
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string(e.what()) + " (and no such file)");
  }
}

void report_parse_error(const ParseError& e, std::ostream& err) {
  err << "parse error: " << e.message();
  if (!e.expected().empty()) {
    err << " (expected";
    for (const std::string& x : e.expected()) err << " " << x;
    err << ")";
  }
  err << "\n";
}

LayoutSpec choose_layout(const std::string& text, int n) {
  try {
    LayoutSpec spec = text.empty() ? default_layout(n) : parse_layout(text);
    validate_layout(spec, n);
    return spec;
  } catch (const std::exception& e) {
    throw UsageError(std::string("layout: ") + e.what());
  }
}

struct RunArgs {
  std::string source;
  std::string layout;
  std::string out_dir;
  std::uint64_t seed = kDefaultSeed;
  std::string force;
  Tolerances tol;
};

int cmd_run(const RunArgs& a, std::ostream& out) {
  Circuit circuit = load_circuit(a.source);
  if (circuit.name.empty()) circuit.name = "circuit";
  if (!a.force.empty()) force_measurements(circuit, parse_forced(a.force));
  const LayoutSpec spec = choose_layout(a.layout, circuit.qubits);

  const StateVector initial = initial_state(circuit);
  const Trace trace = run_circuit(initial, circuit, a.seed);

  std::string lines;
  for (std::size_t i = 0; i < trace.frames.size(); ++i) lines += frame_record(i, trace.frames[i], a.tol.sep).dump() + "\n";
  const auto blocks = full_decomposition(trace.frames.back().state, a.tol.sep);
  Json verdicts = Json::array();
  for (Verdict v : qubit_verdicts(trace.frames.back().state, a.tol.sep)) verdicts.push_back(verdict_name(v));
  lines += Json{{"final", Json{{"circuit", circuit.name},
                               {"frames", trace.frames.size()},
                               {"verdicts", verdicts},
                               {"blocks", decomposition_json(blocks)}}}}
               .dump() +
           "\n";
  out << lines;

  if (!a.out_dir.empty()) {
    const fs::path dir(a.out_dir);
    fs::create_directories(dir);
    const std::string base = slug(circuit.name);
    const auto write = [&](const fs::path& p, const std::string& text) {
      std::ofstream f(p, std::ios::binary);
      if (!f) throw std::runtime_error("cannot write '" + p.string() + "'");
      f << text;
    };
    for (const auto& [name, svg] : render_series(trace, circuit.name, spec, {}, a.tol.sep)) write(dir / name, svg);
    write(dir / (base + "_trace.svg"), render_trace(trace, spec, {}, a.tol.sep));
    write(dir / (base + ".jsonl"), lines);
    write(dir / (base + ".dcn"), format(circuit));
  }
  return exit_code::ok;
}

struct CheckArgs {
  std::string source;
  std::string amps;
  std::string ket;
  bool normalize = false;
  std::vector<std::uint64_t> partition;
  std::string order;
  int qubit = 0;
  std::uint64_t seed = kDefaultSeed;
  Tolerances tol;
};

StateVector load_state(const CheckArgs& a) {
  const int given = !a.source.empty() + !a.amps.empty() + !a.ket.empty();
  if (given != 1) throw UsageError("give exactly one of a circuit source, --amps or --ket");
  if (!a.ket.empty()) {
    if (a.ket.size() > static_cast<std::size_t>(kMaxQubits) || a.ket.find_first_not_of("01") != std::string::npos)
      throw UsageError("--ket expects up to " + std::to_string(kMaxQubits) + " bits of 0/1");
    Circuit c{static_cast<int>(a.ket.size()), {}, {}, InitKet{a.ket}};
    return initial_state(c);
  }
  if (!a.amps.empty()) {
    try {
      const Amplitudes<double> amps = parse_amplitude_list(a.amps);
      const auto size = static_cast<std::uint64_t>(amps.size());
      if (size < 2 || !std::has_single_bit(size)) throw std::invalid_argument("amplitude count must be a power of two >= 2");
      const int n = std::countr_zero(size);
      return StateVector::from_amplitudes(n, amps, a.normalize ? NormMode::normalize : NormMode::validate);
    } catch (const std::invalid_argument& e) {
      throw UsageError(std::string("--amps: ") + e.what());
    }
  }
  const Circuit circuit = load_circuit(a.source);
  return run_circuit(initial_state(circuit), circuit, a.seed).frames.back().state;
}

int cmd_check_sep(const CheckArgs& a, std::ostream& out) {
  const StateVector state = load_state(a);
  const int n = state.qubits();
  SeparabilityReport<double> report;
  try {
    if (a.qubit != 0) {
      if (!a.partition.empty()) throw UsageError("give either --partition or --qubit");
      if (n < 2) throw UsageError("--qubit needs a state of at least 2 qubits");
      report = check_qubit(state, a.qubit, a.tol.sep);
    } else if (!a.partition.empty()) {
      PartitionSpec part{a.partition[0], a.partition[1], a.order.empty() ? std::vector<int>{} : parse_order(a.order)};
      validate_partition(part, n);
      report = check_pq(state, part, a.tol.sep);
    } else {
      throw UsageError("give --partition P Q or --qubit k");
    }
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  } catch (const std::out_of_range& e) {
    throw UsageError(e.what());
  }
  out << report_json(report, n).dump(2) << "\n";
  if (report.marginal) return exit_code::marginal;
  return report.separable ? exit_code::ok : exit_code::entangled;
}

struct ServeArgs {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::uint64_t seed = kDefaultSeed;
  int ttl = 3600;
  std::size_t capacity = 256;
  Tolerances tol;
};

int cmd_serve(const ServeArgs& a, std::ostream& out, std::ostream& err) {
  ServiceConfig config;
  config.sep = a.tol.sep;
  config.seed = a.seed;
  config.ttl = std::chrono::seconds(a.ttl);
  config.capacity = a.capacity;
  HttpService service(config);
  const int port = service.bind(a.host, a.port);
  if (port < 0) {
    err << "error: cannot bind " << a.host << ":" << a.port << "\n";
    return exit_code::runtime;
  }
  out << "listening on http://" << a.host << ":" << port << "\n" << std::flush;
  return service.listen() ? exit_code::ok : exit_code::runtime;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Pure-state simulator and separability analyzer with dimensional circle notation", "dcn"};
  app.require_subcommand(1);

  RunArgs run;
  CLI::App* run_cmd = app.add_subcommand("run", "execute a circuit file or builtin and summarize every frame");
  run_cmd->add_option("source", run.source, "circuit file (.dcn) or builtin name[:param]")->required();
  run_cmd->add_option("--layout", run.layout, "row|square|cube|hypercube|modular:<q,...>");
  run_cmd->add_option("--out", run.out_dir, "directory for SVG series, trace SVG and summary");
  run_cmd->add_option("--seed", run.seed, "seed for sampled measurements");
  run_cmd->add_option("--force-measure", run.force, "forced outcomes q=b[,q=b...]");
  add_tolerances(*run_cmd, run.tol);

  CheckArgs check;
  CLI::App* check_cmd = app.add_subcommand("check-sep", "separability report for a state");
  check_cmd->add_option("source", check.source, "circuit file or builtin; its final state is checked");
  check_cmd->add_option("--amps", check.amps, "amplitude list, index ascending");
  check_cmd->add_option("--ket", check.ket, "basis state bits, qubit n first");
  check_cmd->add_flag("--normalize", check.normalize, "rescale --amps to unit norm");
  check_cmd->add_option("--partition", check.partition, "block dimensions P Q")->expected(2);
  check_cmd->add_option("--order", check.order, "qubit order q,...; the first log2(Q) form the low block");
  check_cmd->add_option("--qubit", check.qubit, "check one qubit against the rest");
  check_cmd->add_option("--seed", check.seed, "seed for sampled measurements");
  add_tolerances(*check_cmd, check.tol);

  ServeArgs serve;
  CLI::App* serve_cmd = app.add_subcommand("serve", "run the session service");
  serve_cmd->add_option("--host", serve.host, "bind address");
  serve_cmd->add_option("--port", serve.port, "port")->check(CLI::Range(0, 65535));
  serve_cmd->add_option("--seed", serve.seed, "base seed for sampled measurements");
  serve_cmd->add_option("--ttl", serve.ttl, "session lifetime in seconds")->check(CLI::PositiveNumber);
  serve_cmd->add_option("--capacity", serve.capacity, "maximum live sessions")->check(CLI::PositiveNumber);
  add_tolerances(*serve_cmd, serve.tol);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return exit_code::parse;
  }

  try {
    if (*run_cmd) return cmd_run(run, out);
    if (*check_cmd) return cmd_check_sep(check, out);
    return cmd_serve(serve, out, err);
  } catch (const ParseError& e) {
    report_parse_error(e, err);
    return exit_code::parse;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return exit_code::parse;
  } catch (const std::exception& e) {
    err << "runtime error: " << e.what() << "\n";
    return exit_code::runtime;
  }
}

}  // namespace dcn

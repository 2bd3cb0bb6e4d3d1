#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "itree/compiler.hpp"
#include "itree/traces.hpp"

namespace itree::cli {
namespace {

// Exit codes. check-equiv uses 0/1/2 for Proven/Refuted/Unknown; the run
// commands report OutOfFuel as 2.
constexpr int kOk = 0;
constexpr int kRefuted = 1;
constexpr int kUnknown = 2;
constexpr int kSyntax = 3;
constexpr int kIO = 4;
constexpr int kOther = 5;

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(Errc::IOError, "cannot read " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f || !(f << text)) throw Error(Errc::IOError, "cannot write " + path);
}

void print_env(std::ostream& out, const char* title, const std::map<std::string, std::uint64_t>& m) {
  out << title << ":\n";
  for (const auto& [k, v] : m) out << "  " << k << "=" << v << "\n";
}

int cmd_run_imp(const std::string& path, std::uint64_t fuel, std::ostream& out) {
  imp::StmtPtr s = imp::parse_imp(read_file(path));
  imp::ImpRun r = imp::run_imp(s, {}, fuel);
  out << "outcome: " << (r.finished ? "finished" : "out-of-fuel") << "\n";
  out << "steps: " << r.steps << "\n";
  if (r.finished) print_env(out, "env", r.env);
  return r.finished ? kOk : kUnknown;
}

int cmd_compile(const std::string& path, const std::string& out_path, std::ostream& out) {
  std::string text = asml::print_asm(compiler::compile(imp::parse_imp(read_file(path))));
  if (out_path.empty() || out_path == "-") {
    out << text;
  } else {
    write_file(out_path, text);
  }
  return kOk;
}

int cmd_run_asm(const std::string& path, std::uint64_t fuel, std::uint64_t entry, std::ostream& out) {
  asml::AsmUnit u = asml::parse_asm(read_file(path));
  if (entry >= u.entries) {
    throw Error(Errc::BoundViolation, "entry " + std::to_string(entry) + " out of bound " + std::to_string(u.entries));
  }
  asml::AsmRun r = asml::run_asm(u, entry, {}, {}, fuel);
  using O = asml::AsmRun::Outcome;
  out << "outcome: " << (r.outcome == O::Finished ? "finished" : r.outcome == O::Halted ? "halted" : "out-of-fuel")
      << "\n";
  if (r.outcome == O::Finished) out << "exit: " << r.exit << "\n";
  out << "steps: " << r.steps << "\n";
  if (r.outcome == O::OutOfFuel) return kUnknown;
  print_env(out, "memory", r.memory);
  out << "registers:\n";
  for (const auto& [k, v] : r.registers) out << "  r" << k << "=" << v << "\n";
  return kOk;
}

int cmd_trace(const std::string& path, std::uint64_t depth, std::uint64_t tau_budget,
              const std::vector<std::uint64_t>& probe, std::ostream& out) {
  imp::StmtPtr s = imp::parse_imp(read_file(path));
  CheckOptions opts;
  opts.nat_probe = probe;
  TraceSet ts = enumerate_traces(imp::denote_imp(s), depth, tau_budget, opts);
  for (const auto& t : ts.traces) out << t.to_string() << "\n";
  return kOk;
}

int cmd_check_equiv(const std::string& path, const compiler::SimConfig& cfg, const std::string& mutation,
                    std::ostream& out) {
  compiler::Mutation m = compiler::Mutation::None;
  if (!mutation.empty()) {
    auto all = compiler::all_mutations();
    auto it = std::find_if(all.begin(), all.end(),
                           [&](compiler::Mutation x) { return compiler::mutation_name(x) == mutation; });
    if (it == all.end()) throw Error(Errc::NotFound, "unknown mutation " + mutation);
    m = *it;
  }
  Verdict v = compiler::check_equivalent(imp::parse_imp(read_file(path)), cfg, m);
  out << v.to_string() << "\n";
  return v.is_proven() ? kOk : v.is_refuted() ? kRefuted : kUnknown;
}

// Runs the echo tree against the terminal: Input reads one integer per
// line, Output prints one. Ends cleanly at end of input.
int cmd_demo_echo(std::istream& in, std::ostream& out) {
  ITree t = echo();
  for (;;) {
    Observation o = observe(t);
    if (auto* tn = std::get_if<TauO>(&o)) {
      t = std::move(tn->next);
      continue;
    }
    if (is_ret(o)) return kOk;
    const VisO& v = std::get<VisO>(o);
    if (v.event.name() == "Input") {
      std::string line;
      if (!std::getline(in, line)) return kOk;
      std::istringstream ls(line);
      std::uint64_t n = 0;
      std::string rest;
      if (!(ls >> n) || (ls >> rest)) throw Error(Errc::IOError, "expected a natural number, got '" + line + "'");
      t = v.resume(Value::nat(n));
    } else {
      out << v.event.args.at(0).as_nat() << "\n" << std::flush;
      t = v.resume(Value::unit());
    }
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Interaction trees: run, compile and check Imp and Asm programs", "itree"};
  app.require_subcommand(1);

  std::string path;
  std::string out_path;
  std::uint64_t fuel = 1'000'000;
  std::uint64_t entry = 0;
  std::uint64_t depth = 4;
  std::uint64_t tau_budget = 1000;
  std::vector<std::uint64_t> probe{0, 1, 2, 9, 17};
  compiler::SimConfig cfg;
  std::string mutation;

  auto* run_imp = app.add_subcommand("run-imp", "Run an Imp program from an empty environment");
  run_imp->add_option("file", path, "Imp source")->required();
  run_imp->add_option("--fuel", fuel, "Maximum number of silent steps");

  auto* compile = app.add_subcommand("compile", "Compile an Imp program to Asm text");
  compile->add_option("file", path, "Imp source")->required();
  compile->add_option("-o,--output", out_path, "Output file (default: stdout)");

  auto* run_asm = app.add_subcommand("run-asm", "Run an Asm unit from empty memory and registers");
  run_asm->add_option("file", path, "Asm text")->required();
  run_asm->add_option("--fuel", fuel, "Maximum number of silent steps");
  run_asm->add_option("--entry", entry, "Entry label");

  auto* trace = app.add_subcommand("trace", "Print the traces of an Imp program's uninterpreted denotation");
  trace->add_option("file", path, "Imp source")->required();
  trace->add_option("--depth", depth, "Maximum number of events per trace");
  trace->add_option("--tau-budget", tau_budget, "Silent steps skipped before each event");
  trace->add_option("--probe", probe, "Answers tried for natural-number events")->delimiter(',');

  auto* check = app.add_subcommand("check-equiv", "Check an Imp program against its compilation");
  check->add_option("file", path, "Imp source")->required();
  check->add_option("--fuel", cfg.fuel, "Node pairs examined per initial state");
  check->add_option("--tau-budget", cfg.tau_budget, "One-sided silent steps allowed");
  check->add_option("--depth", cfg.depth, "Synchronized steps allowed");
  check->add_option("--seed", cfg.seed, "Seed for sampled initial states");
  check->add_option("--samples", cfg.samples, "Random initial states besides the empty one");
  check->add_option("--mutation", mutation, "Check a deliberately broken compiler instead");

  auto* demo = app.add_subcommand("demo-echo", "Echo each natural number read from stdin");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (*run_imp) return cmd_run_imp(path, fuel, out);
    if (*compile) return cmd_compile(path, out_path, out);
    if (*run_asm) return cmd_run_asm(path, fuel, entry, out);
    if (*trace) return cmd_trace(path, depth, tau_budget, probe, out);
    if (*check) return cmd_check_equiv(path, cfg, mutation, out);
    if (*demo) return cmd_demo_echo(in, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    if (e.code() == Errc::SyntaxError) return kSyntax;
    if (e.code() == Errc::IOError) return kIO;
    return kOther;
  }
  return kOther;
}

}  // namespace itree::cli

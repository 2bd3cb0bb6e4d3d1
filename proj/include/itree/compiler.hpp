#pragma once

// Imp -> Asm compiler and the property-based equivalence harness.
//
// Imp variables are identified with memory addresses. Expressions are
// computed with a register stack: compile_expr(n, e) leaves the value in r<n>
// and touches only registers >= n.

#include <algorithm>
#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "itree/asm.hpp"
#include "itree/bisim.hpp"
#include "itree/imp.hpp"

namespace itree::compiler {

using asml::AsmUnit;
using asml::Instr;
using asml::Operand;
using asml::Reg;
using imp::ExprPtr;
using imp::StmtPtr;

/// Deliberate miscompilations used to test the harness.
enum class Mutation : std::uint8_t {
  None,
  DropStore,         // compile_assign forgets the store
  SwapBrzArms,       // conditionals dispatch on the wrong polarity
  OffByOneRegister,  // binary operators read r(n+2) instead of r(n+1)
  WrongDefault,      // memory reads default to 1 instead of 0
  MissingBackEdge,   // while bodies exit the loop instead of returning to the head
};

inline const std::vector<Mutation>& all_mutations() {
  static const std::vector<Mutation> m{Mutation::DropStore, Mutation::SwapBrzArms, Mutation::OffByOneRegister,
                                       Mutation::WrongDefault, Mutation::MissingBackEdge};
  return m;
}

inline std::string_view mutation_name(Mutation m) {
  switch (m) {
    case Mutation::None: return "none";
    case Mutation::DropStore: return "drop-store";
    case Mutation::SwapBrzArms: return "swap-brz-arms";
    case Mutation::OffByOneRegister: return "off-by-one-register";
    case Mutation::WrongDefault: return "wrong-default";
    case Mutation::MissingBackEdge: return "missing-back-edge";
  }
  return "?";
}

inline std::vector<Instr> compile_expr(Reg target, const ExprPtr& e, Mutation m = Mutation::None) {
  using Op = imp::Expr::Op;
  switch (e->op) {
    case Op::Lit: return {Instr::mov(target, Operand::imm(e->lit))};
    case Op::Var: return {Instr::load(target, e->name)};
    default: break;
  }
  std::vector<Instr> out = compile_expr(target, e->lhs, m);
  std::vector<Instr> rhs = compile_expr(target + 1, e->rhs, m);
  out.insert(out.end(), rhs.begin(), rhs.end());
  Operand r = Operand::reg(m == Mutation::OffByOneRegister ? target + 2 : target + 1);
  if (e->op == Op::Plus) out.push_back(Instr::add(target, target, r));
  if (e->op == Op::Minus) out.push_back(Instr::sub(target, target, r));
  if (e->op == Op::Mult) out.push_back(Instr::mul(target, target, r));
  return out;
}

inline std::vector<Instr> compile_assign(const std::string& x, const ExprPtr& e, Mutation m = Mutation::None) {
  std::vector<Instr> out = compile_expr(0, e, m);
  if (m != Mutation::DropStore) out.push_back(Instr::store(x, Operand::reg(0)));
  return out;
}

/// Imp statement -> asm 1 1.
inline AsmUnit compile(const StmtPtr& s, Mutation m = Mutation::None) {
  using K = imp::Stmt::Kind;
  bool swap = m == Mutation::SwapBrzArms;
  switch (s->kind) {
    case K::Skip: return asml::id_asm(1);
    case K::Assign:
      return asml::make_unit(1, 1, 0, {asml::Block{compile_assign(s->var, s->expr, m), asml::Branch::jmp(0)}});
    case K::Seq: return asml::seq_asm(compile(s->a, m), compile(s->b, m));
    case K::If: return asml::if_asm(compile_expr(0, s->expr, m), compile(s->a, m), compile(s->b, m), swap);
    case K::While: {
      auto edge = m == Mutation::MissingBackEdge ? asml::BackEdge::Inr : asml::BackEdge::Inl;
      return asml::while_asm(compile_expr(0, s->expr, m), compile(s->a, m), edge, swap);
    }
  }
  throw Error(Errc::SyntaxError, "unknown statement");
}

// Equivalence harness ----------------------------------------------------------

struct SimConfig {
  std::uint64_t tau_budget = 50'000;
  std::uint64_t depth = 50'000;
  /// Cap on node pairs the checker examines per initial state.
  std::uint64_t fuel = 50'000;
  std::vector<std::uint64_t> nat_probe{0, 1, 2, 9, 17};
  /// Random initial states tried besides the canonical empty pair.
  std::size_t samples = 3;
  std::uint64_t seed = 0;
};

/// Renv: the Imp environment and the Asm memory agree on every key.
inline bool renv(const Value& env, const Value& mem) { return env.as_map() == mem.as_map(); }

/// state_invariant with the trivial relation on results: compares
/// Pair(env, unit) against Pair(mem, Pair(regs, exit label)).
inline RelSpec state_invariant_tt() {
  return {"state_invariant(TT)", [](const Value& l, const Value& r) { return renv(l.first(), r.first()); }};
}

inline void collect_vars(const ExprPtr& e, std::set<std::string>& out) {
  if (e->op == imp::Expr::Op::Var) out.insert(e->name);
  if (e->lhs) collect_vars(e->lhs, out);
  if (e->rhs) collect_vars(e->rhs, out);
}

inline void collect_vars(const StmtPtr& s, std::set<std::string>& out) {
  if (s->kind == imp::Stmt::Kind::Assign) out.insert(s->var);
  if (s->expr) collect_vars(s->expr, out);
  if (s->a) collect_vars(s->a, out);
  if (s->b) collect_vars(s->b, out);
}

/// The canonical empty pair, then `samples` random equal maps over at most
/// five of the program's variables with probe-set values.
inline std::vector<imp::Env> initial_states(const StmtPtr& s, const SimConfig& cfg) {
  std::set<std::string> vars;
  collect_vars(s, vars);
  std::vector<std::string> pool(vars.begin(), vars.end());
  std::vector<imp::Env> out{{}};
  std::mt19937_64 rng(cfg.seed);
  for (std::size_t i = 0; i < cfg.samples && !pool.empty(); ++i) {
    std::shuffle(pool.begin(), pool.end(), rng);
    std::size_t n = std::min<std::size_t>(pool.size(), 1 + rng() % 5);
    imp::Env g;
    for (std::size_t j = 0; j < n; ++j) g[pool[j]] = cfg.nat_probe[rng() % cfg.nat_probe.size()];
    out.push_back(std::move(g));
  }
  return out;
}

inline ITree imp_side(const StmtPtr& s, const imp::Env& g) { return imp::interp_imp(imp::denote_imp(s), g); }

inline ITree asm_side(const AsmUnit& u, const imp::Env& g, Mutation m = Mutation::None) {
  ITree t = asml::den_asm(u)(Value::label(0, 1));
  return asml::interp_asm(t, g, {}, leaf(asml::done_sig()), m == Mutation::WrongDefault ? 1 : 0);
}

/// Compares the interpreted program against its compilation from each
/// sampled pair of related initial states.
inline Verdict check_equivalent(const StmtPtr& s, const SimConfig& cfg = {}, Mutation m = Mutation::None) {
  AsmUnit u = compile(s, m);
  CheckOptions opts;
  opts.nat_probe = cfg.nat_probe;
  opts.max_steps = cfg.fuel;
  Verdict acc = Verdict::proven();
  for (const auto& g : initial_states(s, cfg)) {
    Verdict v = eutt(state_invariant_tt(), imp_side(s, g), asm_side(u, g, m), cfg.tau_budget, cfg.depth, opts);
    if (v.is_refuted()) {
      std::string start;
      for (const auto& [k, x] : g) start += (start.empty() ? "" : ",") + k + "=" + std::to_string(x);
      return Verdict::refuted(v.witness(), "from {" + start + "}: " + v.detail());
    }
    acc = combine(acc, v);
  }
  return acc;
}

// Program generation -------------------------------------------------------------

enum class LoopMode : std::uint8_t { Bounded, Free };

namespace detail {

class Generator {
 public:
  Generator(LoopMode mode, std::uint64_t seed) : mode_(mode), rng_(seed) {}

  StmtPtr stmt(std::size_t budget) {
    if (budget < 2) return imp::skip();
    if (budget == 2) return pick(3) == 0 ? imp::skip() : imp::assign(data_var(), expr(1));
    std::size_t loop_min = mode_ == LoopMode::Bounded ? kCounterCost + 1 : 3;
    for (;;) {
      switch (pick(5)) {
        case 0: return imp::assign(data_var(), expr(std::min<std::size_t>(budget - 1, 5)));
        case 1: {
          std::size_t left = 1 + pick(budget - 2);
          return imp::seq(stmt(left), stmt(budget - 1 - left));
        }
        case 2: {
          if (budget < 4) continue;
          std::size_t rest = budget - 2;  // node and guard
          std::size_t t = 1 + pick(rest - 1);
          return imp::if_(expr(1), stmt(t), stmt(rest - t));
        }
        case 3:
        case 4: {
          if (budget < loop_min || pick(2) == 0) continue;
          return loop(budget);
        }
      }
    }
  }

 private:
  // c := k; while c do body; c := c - 1 end, without the body.
  static constexpr std::size_t kCounterCost = 10;

  StmtPtr loop(std::size_t budget) {
    if (mode_ == LoopMode::Free) {
      std::size_t guard = std::min<std::size_t>(budget - 2, 3);
      return imp::while_(expr(guard), stmt(budget - 1 - guard));
    }
    std::string c = "c" + std::to_string(counters_++);
    StmtPtr body = stmt(budget - kCounterCost);
    StmtPtr step = imp::assign(c, imp::minus(imp::var(c), imp::lit(1)));
    return imp::seq(imp::assign(c, imp::lit(pick(6))), imp::while_(imp::var(c), imp::seq(body, step)));
  }

  ExprPtr expr(std::size_t budget) {
    if (budget < 3 || pick(3) == 0) {
      return pick(2) == 0 ? imp::lit(pick(10)) : imp::var(any_var());
    }
    std::size_t left = 1 + pick(budget - 2);
    ExprPtr a = expr(left);
    ExprPtr b = expr(budget - 1 - left);
    switch (pick(3)) {
      case 0: return imp::plus(a, b);
      case 1: return imp::minus(a, b);
      default: return imp::mult(a, b);
    }
  }

  std::string data_var() {
    static const char* names[] = {"x", "y", "z", "w"};
    return names[pick(4)];
  }

  std::string any_var() {
    if (counters_ > 0 && pick(4) == 0) return "c" + std::to_string(pick(counters_));
    return data_var();
  }

  std::size_t pick(std::size_t n) { return n == 0 ? 0 : static_cast<std::size_t>(rng_() % n); }

  LoopMode mode_;
  std::mt19937_64 rng_;
  std::size_t counters_ = 0;
};

}  // namespace detail

/// A random program with at most max(size, 1) AST nodes. In bounded mode
/// every loop is a counter loop of at most five iterations whose counter the
/// body never assigns.
inline StmtPtr gen_program(std::size_t size, LoopMode mode, std::uint64_t seed) {
  if (size == 0) return imp::skip();
  return detail::Generator(mode, seed).stmt(size);
}

}  // namespace itree::compiler

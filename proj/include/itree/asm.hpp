#pragma once

// Asm: basic blocks over registers and named memory cells, open control-flow
// graphs (units) with entry, exit and hidden internal labels, and the linking
// combinators used by the compiler.
//
// Label layout of a unit with I internal labels: block i for i < I is
// internal, block I + a is entry a. Branch targets l < I are internal jumps,
// l = I + b leaves through exit b.

#include <cctype>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "itree/combinators.hpp"
#include "itree/interp.hpp"
#include "itree/itree.hpp"

namespace itree::asml {

using Reg = std::uint64_t;

struct Operand {
  bool is_reg = false;
  std::uint64_t v = 0;

  static Operand reg(Reg r) { return {true, r}; }
  static Operand imm(std::uint64_t n) { return {false, n}; }
  friend bool operator==(const Operand&, const Operand&) = default;
};

struct Instr {
  enum class Op : std::uint8_t { Mov, Add, Sub, Mul, Load, Store };
  Op op = Op::Mov;
  Reg dst = 0;      // Mov, Add, Sub, Mul, Load
  Reg lhs = 0;      // Add, Sub, Mul
  Operand src;      // Mov source, arithmetic rhs, Store source
  std::string addr; // Load, Store

  static Instr mov(Reg d, Operand s) { return {Op::Mov, d, 0, s, {}}; }
  static Instr add(Reg d, Reg l, Operand r) { return {Op::Add, d, l, r, {}}; }
  static Instr sub(Reg d, Reg l, Operand r) { return {Op::Sub, d, l, r, {}}; }
  static Instr mul(Reg d, Reg l, Operand r) { return {Op::Mul, d, l, r, {}}; }
  static Instr load(Reg d, std::string a) { return {Op::Load, d, 0, {}, std::move(a)}; }
  static Instr store(std::string a, Operand s) { return {Op::Store, 0, 0, s, std::move(a)}; }

  friend bool operator==(const Instr&, const Instr&) = default;
};

struct Branch {
  enum class Kind : std::uint8_t { Jmp, Brz, Halt };
  Kind kind = Kind::Halt;
  Reg test = 0;
  std::uint64_t yes = 0;  // Jmp target
  std::uint64_t no = 0;

  static Branch jmp(std::uint64_t l) { return {Kind::Jmp, 0, l, 0}; }
  static Branch brz(Reg r, std::uint64_t y, std::uint64_t n) { return {Kind::Brz, r, y, n}; }
  static Branch halt() { return {}; }
  friend bool operator==(const Branch&, const Branch&) = default;
};

struct Block {
  std::vector<Instr> instrs;
  Branch branch;
  friend bool operator==(const Block&, const Block&) = default;
};

struct AsmUnit {
  std::uint64_t entries = 0;
  std::uint64_t exits = 0;
  std::uint64_t internal = 0;
  std::vector<Block> code;  // internal blocks, then one block per entry

  friend bool operator==(const AsmUnit&, const AsmUnit&) = default;
};

/// Throws BoundViolation unless the table is total and every target is in range.
inline const AsmUnit& validate(const AsmUnit& u) {
  if (u.code.size() != u.internal + u.entries) {
    throw Error(Errc::BoundViolation, "code has " + std::to_string(u.code.size()) + " blocks, expected " +
                                          std::to_string(u.internal + u.entries));
  }
  std::uint64_t bound = u.internal + u.exits;
  auto check = [&](std::uint64_t l, std::size_t blk) {
    if (l >= bound) {
      throw Error(Errc::BoundViolation, "block " + std::to_string(blk) + " targets label " +
                                            std::to_string(l) + ", bound is " + std::to_string(bound));
    }
  };
  for (std::size_t i = 0; i < u.code.size(); ++i) {
    const Branch& b = u.code[i].branch;
    if (b.kind == Branch::Kind::Jmp) check(b.yes, i);
    if (b.kind == Branch::Kind::Brz) {
      check(b.yes, i);
      check(b.no, i);
    }
  }
  return u;
}

inline AsmUnit make_unit(std::uint64_t entries, std::uint64_t exits, std::uint64_t internal,
                         std::vector<Block> code) {
  AsmUnit u{entries, exits, internal, std::move(code)};
  validate(u);
  return u;
}

// Events ---------------------------------------------------------------------

inline const SigPtr& reg_sig() {
  static const SigPtr s = make_sig("RegE", {{"GetReg", {Type::nat()}, Type::nat()},
                                            {"SetReg", {Type::nat(), Type::nat()}, Type::unit()}});
  return s;
}
inline const SigPtr& mem_sig() {
  static const SigPtr s = make_sig("MemE", {{"Load", {Type::str()}, Type::nat()},
                                            {"Store", {Type::str(), Type::nat()}, Type::unit()}});
  return s;
}
inline const SigPtr& done_sig() {
  static const SigPtr s = make_sig("DoneE", {{"Done", {}, Type::empty()}});
  return s;
}

/// RegE +' (MemE +' rest)
inline Signature machine_sig(const Signature& rest = leaf(done_sig())) {
  return sum(leaf(reg_sig()), sum(leaf(mem_sig()), rest));
}

inline EventInstance get_reg(Reg r) {
  return inject_left(make_event(reg_sig(), "GetReg", {Value::nat(r)}));
}
inline EventInstance set_reg(Reg r, std::uint64_t v) {
  return inject_left(make_event(reg_sig(), "SetReg", {Value::nat(r), Value::nat(v)}));
}
inline EventInstance load_ev(const std::string& a) {
  return inject_right(inject_left(make_event(mem_sig(), "Load", {Value::str(a)})));
}
inline EventInstance store_ev(const std::string& a, std::uint64_t v) {
  return inject_right(inject_left(make_event(mem_sig(), "Store", {Value::str(a), Value::nat(v)})));
}
inline EventInstance done_ev() {
  return inject_right(inject_right(make_event(done_sig(), "Done")));
}

// Denotation -----------------------------------------------------------------

/// How `halt` is denoted: as the uninterpreted Done event, or (for drivers) as
/// returning Unit in place of an exit label.
enum class HaltMode : std::uint8_t { Event, Return };

inline ITree denote_operand(const Operand& o) {
  return o.is_reg ? trigger(get_reg(o.v)) : ret(Value::nat(o.v));
}

inline ITree denote_instr(const Instr& i) {
  using Op = Instr::Op;
  switch (i.op) {
    case Op::Mov: {
      Reg d = i.dst;
      return itree::bind(denote_operand(i.src), [d](const Value& v) { return trigger(set_reg(d, v.as_nat())); });
    }
    case Op::Add:
    case Op::Sub:
    case Op::Mul: {
      Instr ins = i;
      return itree::bind(trigger(get_reg(i.lhs)), [ins](const Value& l) {
        return itree::bind(denote_operand(ins.src), [ins, l](const Value& r) {
          std::uint64_t a = l.as_nat();
          std::uint64_t b = r.as_nat();
          std::uint64_t v = ins.op == Op::Add ? nat_add(a, b) : ins.op == Op::Sub ? nat_sub(a, b) : nat_mul(a, b);
          return trigger(set_reg(ins.dst, v));
        });
      });
    }
    case Op::Load: {
      Reg d = i.dst;
      return itree::bind(trigger(load_ev(i.addr)), [d](const Value& v) { return trigger(set_reg(d, v.as_nat())); });
    }
    case Op::Store: {
      std::string a = i.addr;
      return itree::bind(denote_operand(i.src), [a](const Value& v) { return trigger(store_ev(a, v.as_nat())); });
    }
  }
  throw Error(Errc::SyntaxError, "unknown instruction");
}

/// Result: Label(bound). Bbrz takes `yes` when the register holds 0.
inline ITree denote_br(const Branch& b, std::uint64_t bound, HaltMode mode = HaltMode::Event) {
  switch (b.kind) {
    case Branch::Kind::Jmp: return ret(Value::label(b.yes, bound));
    case Branch::Kind::Brz: {
      Branch br = b;
      return itree::bind(trigger(get_reg(b.test)), [br, bound](const Value& v) {
        return ret(Value::label(v.as_nat() == 0 ? br.yes : br.no, bound));
      });
    }
    case Branch::Kind::Halt:
      if (mode == HaltMode::Return) return ret(Value::unit());
      return vis(done_ev(), [](const Value&) -> ITree {
        throw Error(Errc::AnswerTagMismatch, "Done has no answers");
      });
  }
  throw Error(Errc::SyntaxError, "unknown branch");
}

inline ITree denote_bk(const Block& blk, std::uint64_t bound, HaltMode mode = HaltMode::Event) {
  ITree t = denote_br(blk.branch, bound, mode);
  for (auto it = blk.instrs.rbegin(); it != blk.instrs.rend(); ++it) {
    t = itree::seq(denote_instr(*it), t);
  }
  return t;
}

/// Label(code.size()) -> Label(bound)
inline KTree denote_bks(const std::vector<Block>& code, std::uint64_t bound, HaltMode mode = HaltMode::Event) {
  auto table = std::make_shared<const std::vector<Block>>(code);
  return KTree(Type::label(code.size()), [table, bound, mode](const Value& l) {
    return denote_bk((*table)[l.label_index()], bound, mode);
  });
}

// Fin(n + m) <-> Fin(n) + Fin(m)

inline Value fin_split(const Value& l, std::uint64_t n, std::uint64_t m) {
  std::uint64_t i = l.label_index();
  return i < n ? inl(Value::label(i, n)) : inr(Value::label(i - n, m));
}
inline Value fin_join(const Value& s, std::uint64_t n, std::uint64_t m) {
  std::uint64_t i = sum_payload(s).label_index();
  return Value::label(is_inl(s) ? i : n + i, n + m);
}

/// Fin(A) -> Fin(B): the internal labels are hidden by `loop`.
inline KTree den_asm(const AsmUnit& u, HaltMode mode = HaltMode::Event) {
  validate(u);
  std::uint64_t I = u.internal;
  std::uint64_t A = u.entries;
  std::uint64_t B = u.exits;
  KTree bks = denote_bks(u.code, I + B, mode);
  KTree body(Type::pair(), [bks, I, A, B](const Value& s) {
    return itree::bind(bks(fin_join(s, I, A)), [I, B](const Value& l) {
      if (l.kind() == Kind::Unit) return ret(inr(l));
      return ret(fin_split(l, I, B));
    });
  });
  KTree looped = loop(body);
  return KTree(Type::label(A), [looped](const Value& a) { return looped(a); });
}

// Label maps -----------------------------------------------------------------

struct FinMap {
  std::uint64_t dom = 0;
  std::uint64_t cod = 0;
  std::vector<std::uint64_t> map;

  FinMap(std::uint64_t d, std::uint64_t c, std::vector<std::uint64_t> m) : dom(d), cod(c), map(std::move(m)) {
    if (map.size() != dom) throw Error(Errc::BoundViolation, "label map is not total");
    for (auto x : map) {
      if (x >= cod) throw Error(Errc::BoundViolation, "label map leaves Fin(" + std::to_string(cod) + ")");
    }
  }

  std::uint64_t operator()(std::uint64_t i) const { return map.at(i); }

  static FinMap id(std::uint64_t n) {
    std::vector<std::uint64_t> m(n);
    for (std::uint64_t i = 0; i < n; ++i) m[i] = i;
    return {n, n, m};
  }
  /// Fin(a + b) -> Fin(b + a)
  static FinMap swap(std::uint64_t a, std::uint64_t b) {
    std::vector<std::uint64_t> m(a + b);
    for (std::uint64_t i = 0; i < a + b; ++i) m[i] = i < a ? b + i : i - a;
    return {a + b, a + b, m};
  }
  /// Fin(a + a) -> Fin(a)
  static FinMap merge(std::uint64_t a) {
    std::vector<std::uint64_t> m(2 * a);
    for (std::uint64_t i = 0; i < 2 * a; ++i) m[i] = i < a ? i : i - a;
    return {2 * a, a, m};
  }
  /// Fin(a) -> Fin(a + b)
  static FinMap inl(std::uint64_t a, std::uint64_t b) {
    std::vector<std::uint64_t> m(a);
    for (std::uint64_t i = 0; i < a; ++i) m[i] = i;
    return {a, a + b, m};
  }
  /// Fin(b) -> Fin(a + b)
  static FinMap inr(std::uint64_t a, std::uint64_t b) {
    std::vector<std::uint64_t> m(b);
    for (std::uint64_t i = 0; i < b; ++i) m[i] = a + i;
    return {b, a + b, m};
  }

  /// As a KTree on labels.
  KTree ktree() const {
    FinMap self = *this;
    return KTree(Type::label(dom), [self](const Value& l) {
      return ret(Value::label(self(l.label_index()), self.cod));
    });
  }
};

// Linking combinators ----------------------------------------------------------

namespace detail {

template <typename F>
Block retarget(Block b, F f) {
  if (b.branch.kind == Branch::Kind::Jmp) b.branch.yes = f(b.branch.yes);
  if (b.branch.kind == Branch::Kind::Brz) {
    b.branch.yes = f(b.branch.yes);
    b.branch.no = f(b.branch.no);
  }
  return b;
}

}  // namespace detail

/// asm A B -> asm C D -> asm (A + C) (B + D)
inline AsmUnit app_asm(const AsmUnit& ab, const AsmUnit& cd) {
  std::uint64_t I1 = ab.internal, I2 = cd.internal, B = ab.exits;
  auto left = [=](std::uint64_t l) { return l < I1 ? l : I1 + I2 + (l - I1); };
  auto right = [=](std::uint64_t l) { return l < I2 ? I1 + l : I1 + I2 + B + (l - I2); };
  std::vector<Block> code;
  for (std::uint64_t i = 0; i < I1; ++i) code.push_back(detail::retarget(ab.code[i], left));
  for (std::uint64_t i = 0; i < I2; ++i) code.push_back(detail::retarget(cd.code[i], right));
  for (std::uint64_t a = 0; a < ab.entries; ++a) code.push_back(detail::retarget(ab.code[I1 + a], left));
  for (std::uint64_t c = 0; c < cd.entries; ++c) code.push_back(detail::retarget(cd.code[I2 + c], right));
  return make_unit(ab.entries + cd.entries, ab.exits + cd.exits, I1 + I2, std::move(code));
}

/// asm (I + A) (I + B) -> asm A B: the first I entries and exits become internal.
inline AsmUnit loop_asm(std::uint64_t I, const AsmUnit& u) {
  if (I > u.entries || I > u.exits) {
    throw Error(Errc::BoundViolation, "cannot internalize " + std::to_string(I) + " labels");
  }
  return make_unit(u.entries - I, u.exits - I, u.internal + I, u.code);
}

/// One jump block per entry.
inline AsmUnit pure_asm(const FinMap& f) {
  std::vector<Block> code;
  for (std::uint64_t a = 0; a < f.dom; ++a) code.push_back(Block{{}, Branch::jmp(f(a))});
  return make_unit(f.dom, f.cod, 0, std::move(code));
}

inline AsmUnit id_asm(std::uint64_t n = 1) { return pure_asm(FinMap::id(n)); }

/// (A -> B) -> (C -> D) -> asm B C -> asm A D
inline AsmUnit relabel_asm(const FinMap& f, const FinMap& g, const AsmUnit& u) {
  if (f.cod != u.entries || g.dom != u.exits) {
    throw Error(Errc::BoundViolation, "label maps do not fit the unit");
  }
  std::uint64_t I = u.internal;
  auto out = [&](std::uint64_t l) { return l < I ? l : I + g(l - I); };
  std::vector<Block> code;
  for (std::uint64_t i = 0; i < I; ++i) code.push_back(detail::retarget(u.code[i], out));
  for (std::uint64_t a = 0; a < f.dom; ++a) code.push_back(detail::retarget(u.code[I + f(a)], out));
  return make_unit(f.dom, g.cod, I, std::move(code));
}

/// asm A B -> asm B C -> asm A C
inline AsmUnit seq_asm(const AsmUnit& ab, const AsmUnit& bc) {
  std::uint64_t A = ab.entries, B = ab.exits;
  AsmUnit both = app_asm(ab, bc);
  return loop_asm(B, relabel_asm(FinMap::swap(B, A), FinMap::id(B + bc.exits), both));
}

/// Runs `e`, then leaves through exit 0 if register 0 is nonzero, exit 1
/// otherwise. `swap_arms` inverts the dispatch.
inline AsmUnit cond_asm(const std::vector<Instr>& e, bool swap_arms = false) {
  Branch br = swap_arms ? Branch::brz(0, 0, 1) : Branch::brz(0, 1, 0);
  return make_unit(1, 2, 0, {Block{e, br}});
}

inline AsmUnit if_asm(const std::vector<Instr>& e, const AsmUnit& t, const AsmUnit& f, bool swap_arms = false) {
  std::uint64_t A = t.exits;
  return seq_asm(cond_asm(e, swap_arms), relabel_asm(FinMap::id(2), FinMap::merge(A), app_asm(t, f)));
}

/// Which exit of the body leads back to the loop head (1 + 1 labels).
enum class BackEdge : std::uint8_t { Inl, Inr };

inline AsmUnit while_asm(const std::vector<Instr>& e, const AsmUnit& p, BackEdge body_exit = BackEdge::Inl,
                         bool swap_arms = false) {
  FinMap back = body_exit == BackEdge::Inl ? FinMap::inl(1, 1) : FinMap::inr(1, 1);
  AsmUnit test = if_asm(e, relabel_asm(FinMap::id(1), back, p), pure_asm(FinMap::inr(1, 1)), swap_arms);
  AsmUnit both = app_asm(test, pure_asm(FinMap::inl(1, 1)));
  return loop_asm(1, relabel_asm(FinMap::id(2), FinMap::merge(2), both));
}

// Interpretation ---------------------------------------------------------------

inline const SigPtr& reg_map_sig() {
  static const SigPtr s = map_default_sig("RegMapE", Type::nat(), Type::nat(), Value::nat(0));
  return s;
}

inline SigPtr mem_map_sig(std::uint64_t dflt = 0) {
  return map_default_sig("MemMapE", Type::str(), Type::nat(), Value::nat(dflt));
}

using Memory = std::map<std::string, std::uint64_t>;
using Registers = std::map<Reg, std::uint64_t>;

inline Value memory_value(const Memory& m) {
  ValueMap out;
  for (const auto& [k, v] : m) out.emplace(Value::str(k), Value::nat(v));
  return Value::map(std::move(out));
}
inline Value registers_value(const Registers& r) {
  ValueMap out;
  for (const auto& [k, v] : r) out.emplace(Value::nat(k), Value::nat(v));
  return Value::map(std::move(out));
}
inline Memory memory_of(const Value& v) {
  Memory m;
  for (const auto& [k, x] : v.as_map()) m.emplace(k.as_str(), x.as_nat());
  return m;
}
inline Registers registers_of(const Value& v) {
  Registers r;
  for (const auto& [k, x] : v.as_map()) r.emplace(k.as_nat(), x.as_nat());
  return r;
}

/// Interprets registers (inner) and memory (outer) into maps. The result is
/// Pair(memory, Pair(registers, result)); events of `rest` pass through.
inline ITree interp_asm(const ITree& t, const Memory& mem0, const Registers& regs0,
                        const Signature& rest = leaf(done_sig()), std::uint64_t mem_default = 0) {
  SigPtr msig = mem_map_sig(mem_default);
  Handler h_reg{leaf(reg_sig()), TargetMonad::itree_m(leaf(reg_map_sig())), [](const EventInstance& e) -> Comp {
                  if (e.name() == "GetReg") return trigger(make_event(reg_map_sig(), "LookupDefault", {e.args[0]}));
                  return trigger(make_event(reg_map_sig(), "Insert", {e.args[0], e.args[1]}));
                }};
  Handler h_mem{leaf(mem_sig()), TargetMonad::itree_m(leaf(msig)), [msig](const EventInstance& e) -> Comp {
                  if (e.name() == "Load") return trigger(make_event(msig, "LookupDefault", {e.args[0]}));
                  return trigger(make_event(msig, "Insert", {e.args[0], e.args[1]}));
                }};
  Handler h = handler_bimap(h_reg, handler_bimap(h_mem, handler_id(rest)));
  ITree maps = interp_tree(h, t);
  Signature mem_rest = sum(leaf(msig), rest);
  ITree regs_done = interp_map(maps, registers_value(regs0), reg_map_sig(), mem_rest);
  return interp_map(regs_done, memory_value(mem0), msig, rest);
}

struct AsmRun {
  enum class Outcome : std::uint8_t { Finished, Halted, OutOfFuel };
  Outcome outcome = Outcome::OutOfFuel;
  std::uint64_t exit = 0;  // Finished
  Memory memory;
  Registers registers;
  std::uint64_t steps = 0;
};

/// Runs entry `entry` of `u`; `halt` ends the run like a return.
inline AsmRun run_asm(const AsmUnit& u, std::uint64_t entry, const Memory& mem0, const Registers& regs0,
                      std::uint64_t fuel) {
  ITree t = den_asm(u, HaltMode::Return)(Value::label(entry, u.entries));
  Burned b = burn_counted(fuel, interp_asm(t, mem0, regs0));
  AsmRun out;
  out.steps = b.steps;
  Observation o = observe(b.tree);
  if (const auto* r = std::get_if<RetO>(&o)) {
    out.memory = memory_of(r->value.first());
    out.registers = registers_of(r->value.second().first());
    const Value& res = r->value.second().second();
    if (res.kind() == Kind::Unit) {
      out.outcome = AsmRun::Outcome::Halted;
    } else {
      out.outcome = AsmRun::Outcome::Finished;
      out.exit = res.label_index();
    }
  } else if (is_vis(o)) {
    throw Error(Errc::UnhandledEvent, std::get<VisO>(o).event.to_string() + " escaped interp_asm");
  }
  return out;
}

// Text format ------------------------------------------------------------------

inline std::string operand_string(const Operand& o) {
  return o.is_reg ? "r" + std::to_string(o.v) : std::to_string(o.v);
}

inline std::string instr_string(const Instr& i) {
  auto r = [](Reg x) { return "r" + std::to_string(x); };
  switch (i.op) {
    case Instr::Op::Mov: return "mov " + r(i.dst) + ", " + operand_string(i.src);
    case Instr::Op::Add: return "add " + r(i.dst) + ", " + r(i.lhs) + ", " + operand_string(i.src);
    case Instr::Op::Sub: return "sub " + r(i.dst) + ", " + r(i.lhs) + ", " + operand_string(i.src);
    case Instr::Op::Mul: return "mul " + r(i.dst) + ", " + r(i.lhs) + ", " + operand_string(i.src);
    case Instr::Op::Load: return "load " + r(i.dst) + ", @" + i.addr;
    case Instr::Op::Store: return "store @" + i.addr + ", " + operand_string(i.src);
  }
  return "?";
}

inline std::string branch_string(const Branch& b) {
  switch (b.kind) {
    case Branch::Kind::Jmp: return "jmp " + std::to_string(b.yes);
    case Branch::Kind::Brz:
      return "brz r" + std::to_string(b.test) + " -> " + std::to_string(b.yes) + ", " + std::to_string(b.no);
    case Branch::Kind::Halt: return "halt";
  }
  return "?";
}

inline std::string print_asm(const AsmUnit& u) {
  std::ostringstream os;
  os << "asm entries=" << u.entries << " exits=" << u.exits << " internal=" << u.internal << "\n";
  for (std::size_t i = 0; i < u.code.size(); ++i) {
    os << "block " << i << ":\n";
    for (const auto& ins : u.code[i].instrs) os << "  " << instr_string(ins) << "\n";
    os << "  " << branch_string(u.code[i].branch) << "\n";
  }
  return os.str();
}

namespace detail {

class AsmReader {
 public:
  explicit AsmReader(std::string_view src) {
    std::size_t start = 0;
    while (start <= src.size()) {
      std::size_t nl = src.find('\n', start);
      if (nl == std::string_view::npos) nl = src.size();
      std::string line(src.substr(start, nl - start));
      if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
      lines_.push_back(std::move(line));
      start = nl + 1;
    }
  }

  AsmUnit read() {
    next_line();
    if (at_eof()) fail("missing header");
    std::uint64_t A = 0, B = 0, I = 0;
    word("asm");
    A = keyed("entries");
    B = keyed("exits");
    I = keyed("internal");
    end_of_line();
    std::vector<Block> code;
    next_line();
    while (!at_eof()) {
      word("block");
      std::uint64_t idx = number();
      if (idx != code.size()) fail("expected block " + std::to_string(code.size()));
      sym(':');
      end_of_line();
      Block blk;
      bool closed = false;
      while (!closed) {
        next_line();
        if (at_eof()) fail("block " + std::to_string(idx) + " has no terminal");
        std::string op = ident();
        if (op == "jmp") {
          blk.branch = Branch::jmp(number());
          closed = true;
        } else if (op == "brz") {
          Reg r = reg();
          sym('-');
          sym('>');
          std::uint64_t y = number();
          sym(',');
          blk.branch = Branch::brz(r, y, number());
          closed = true;
        } else if (op == "halt") {
          blk.branch = Branch::halt();
          closed = true;
        } else if (op == "mov") {
          Reg d = reg();
          sym(',');
          blk.instrs.push_back(Instr::mov(d, operand()));
        } else if (op == "add" || op == "sub" || op == "mul") {
          Reg d = reg();
          sym(',');
          Reg l = reg();
          sym(',');
          Operand r = operand();
          blk.instrs.push_back(op == "add" ? Instr::add(d, l, r) : op == "sub" ? Instr::sub(d, l, r) : Instr::mul(d, l, r));
        } else if (op == "load") {
          Reg d = reg();
          sym(',');
          blk.instrs.push_back(Instr::load(d, address()));
        } else if (op == "store") {
          std::string a = address();
          sym(',');
          blk.instrs.push_back(Instr::store(a, operand()));
        } else {
          fail("unknown instruction '" + op + "'");
        }
        end_of_line();
      }
      code.push_back(std::move(blk));
      next_line();
    }
    return make_unit(A, B, I, std::move(code));
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    std::string where = at_eof() ? "end of input" : "line " + std::to_string(row_ + 1);
    throw Error(Errc::SyntaxError, where + ": " + what);
  }

  // Moves to the next nonblank line (staying put if the current one has text left).
  void next_line() {
    while (row_ < lines_.size()) {
      skip_ws();
      if (col_ < lines_[row_].size()) return;
      ++row_;
      col_ = 0;
    }
  }
  bool at_eof() const { return row_ >= lines_.size(); }

  void skip_ws() {
    const std::string& l = lines_[row_];
    while (col_ < l.size() && std::isspace(static_cast<unsigned char>(l[col_]))) ++col_;
  }
  char peek() {
    skip_ws();
    const std::string& l = lines_[row_];
    return col_ < l.size() ? l[col_] : '\0';
  }
  void end_of_line() {
    if (peek() != '\0') fail("unexpected text '" + lines_[row_].substr(col_) + "'");
    ++row_;
    col_ = 0;
  }
  void sym(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++col_;
  }
  std::string ident() {
    skip_ws();
    const std::string& l = lines_[row_];
    std::size_t s = col_;
    while (col_ < l.size() && (std::isalnum(static_cast<unsigned char>(l[col_])) || l[col_] == '_')) ++col_;
    if (s == col_) fail("expected a word");
    return l.substr(s, col_ - s);
  }
  void word(const char* w) {
    std::size_t at = col_;
    if (ident() != w) {
      col_ = at;
      fail(std::string("expected '") + w + "'");
    }
  }
  std::uint64_t number() {
    skip_ws();
    const std::string& l = lines_[row_];
    std::size_t s = col_;
    std::uint64_t n = 0;
    while (col_ < l.size() && std::isdigit(static_cast<unsigned char>(l[col_]))) {
      auto d = static_cast<std::uint64_t>(l[col_] - '0');
      if (n > (UINT64_MAX - d) / 10) fail("number does not fit in 64 bits");
      n = n * 10 + d;
      ++col_;
    }
    if (s == col_) fail("expected a number");
    return n;
  }
  std::uint64_t keyed(const char* key) {
    word(key);
    sym('=');
    return number();
  }
  Reg reg() {
    if (peek() != 'r') fail("expected a register");
    ++col_;
    return number();
  }
  Operand operand() {
    if (peek() == 'r') return Operand::reg(reg());
    return Operand::imm(number());
  }
  std::string address() {
    sym('@');
    return ident();
  }

  std::vector<std::string> lines_;
  std::size_t row_ = 0;
  std::size_t col_ = 0;
};

}  // namespace detail

inline AsmUnit parse_asm(std::string_view src) { return detail::AsmReader(src).read(); }

}  // namespace itree::asml

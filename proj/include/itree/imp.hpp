#pragma once

// Imp: a small imperative language of natural-number variables.
//
//   stmt  ::= simple (';' simple)*
//   simple::= ident ':=' expr | 'skip'
//           | 'if' expr 'then' stmt 'else' stmt 'end'
//           | 'while' expr 'do' stmt 'end'
//   expr  ::= term (('+' | '-') term)*
//   term  ::= atom ('*' atom)*
//   atom  ::= nat | ident | '(' expr ')'
//
// Its semantics is an ITree over ImpState +' E, interpreted into a map.

#include <cctype>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "itree/combinators.hpp"
#include "itree/interp.hpp"
#include "itree/itree.hpp"

namespace itree::imp {

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  enum class Op : std::uint8_t { Var, Lit, Plus, Minus, Mult };
  Op op = Op::Lit;
  std::string name;
  std::uint64_t lit = 0;
  ExprPtr lhs;
  ExprPtr rhs;
};

inline ExprPtr var(std::string x) { return std::make_shared<const Expr>(Expr{Expr::Op::Var, std::move(x), 0, {}, {}}); }
inline ExprPtr lit(std::uint64_t n) { return std::make_shared<const Expr>(Expr{Expr::Op::Lit, {}, n, {}, {}}); }
inline ExprPtr binop(Expr::Op op, ExprPtr a, ExprPtr b) {
  return std::make_shared<const Expr>(Expr{op, {}, 0, std::move(a), std::move(b)});
}
inline ExprPtr plus(ExprPtr a, ExprPtr b) { return binop(Expr::Op::Plus, std::move(a), std::move(b)); }
inline ExprPtr minus(ExprPtr a, ExprPtr b) { return binop(Expr::Op::Minus, std::move(a), std::move(b)); }
inline ExprPtr mult(ExprPtr a, ExprPtr b) { return binop(Expr::Op::Mult, std::move(a), std::move(b)); }

inline bool equal(const ExprPtr& a, const ExprPtr& b) {
  if (a->op != b->op) return false;
  switch (a->op) {
    case Expr::Op::Var: return a->name == b->name;
    case Expr::Op::Lit: return a->lit == b->lit;
    default: return equal(a->lhs, b->lhs) && equal(a->rhs, b->rhs);
  }
}

struct Stmt;
using StmtPtr = std::shared_ptr<const Stmt>;

struct Stmt {
  enum class Kind : std::uint8_t { Assign, Seq, If, While, Skip };
  Kind kind = Kind::Skip;
  std::string var;  // Assign
  ExprPtr expr;     // Assign value, If/While condition
  StmtPtr a;        // Seq first, If then, While body
  StmtPtr b;        // Seq second, If else
};

inline StmtPtr skip() { return std::make_shared<const Stmt>(Stmt{}); }
inline StmtPtr assign(std::string x, ExprPtr e) {
  return std::make_shared<const Stmt>(Stmt{Stmt::Kind::Assign, std::move(x), std::move(e), {}, {}});
}
inline StmtPtr seq(StmtPtr a, StmtPtr b) {
  return std::make_shared<const Stmt>(Stmt{Stmt::Kind::Seq, {}, {}, std::move(a), std::move(b)});
}
inline StmtPtr if_(ExprPtr c, StmtPtr t, StmtPtr f) {
  return std::make_shared<const Stmt>(Stmt{Stmt::Kind::If, {}, std::move(c), std::move(t), std::move(f)});
}
inline StmtPtr while_(ExprPtr c, StmtPtr body) {
  return std::make_shared<const Stmt>(Stmt{Stmt::Kind::While, {}, std::move(c), std::move(body), {}});
}

inline bool equal(const StmtPtr& a, const StmtPtr& b) {
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case Stmt::Kind::Skip: return true;
    case Stmt::Kind::Assign: return a->var == b->var && equal(a->expr, b->expr);
    case Stmt::Kind::Seq: return equal(a->a, b->a) && equal(a->b, b->b);
    case Stmt::Kind::If: return equal(a->expr, b->expr) && equal(a->a, b->a) && equal(a->b, b->b);
    case Stmt::Kind::While: return equal(a->expr, b->expr) && equal(a->a, b->a);
  }
  return false;
}

inline std::size_t size(const ExprPtr& e) {
  if (e->op == Expr::Op::Var || e->op == Expr::Op::Lit) return 1;
  return 1 + size(e->lhs) + size(e->rhs);
}

/// AST node count, expressions included.
inline std::size_t size(const StmtPtr& s) {
  switch (s->kind) {
    case Stmt::Kind::Skip: return 1;
    case Stmt::Kind::Assign: return 1 + size(s->expr);
    case Stmt::Kind::Seq: return 1 + size(s->a) + size(s->b);
    case Stmt::Kind::If: return 1 + size(s->expr) + size(s->a) + size(s->b);
    case Stmt::Kind::While: return 1 + size(s->expr) + size(s->a);
  }
  return 0;
}

// Printing -------------------------------------------------------------------

inline void print_expr(std::string& out, const ExprPtr& e, int prec = 0) {
  auto level = [](Expr::Op op) { return op == Expr::Op::Mult ? 2 : 1; };
  switch (e->op) {
    case Expr::Op::Var: out += e->name; return;
    case Expr::Op::Lit: out += std::to_string(e->lit); return;
    default: break;
  }
  int mine = level(e->op);
  bool paren = mine < prec;
  if (paren) out += '(';
  print_expr(out, e->lhs, mine);
  out += e->op == Expr::Op::Plus ? " + " : e->op == Expr::Op::Minus ? " - " : " * ";
  print_expr(out, e->rhs, mine + 1);
  if (paren) out += ')';
}

inline std::string print_expr(const ExprPtr& e) {
  std::string out;
  print_expr(out, e);
  return out;
}

namespace detail {

inline void print_stmt(std::string& out, const StmtPtr& s, int indent) {
  std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  switch (s->kind) {
    case Stmt::Kind::Skip: out += pad + "skip"; break;
    case Stmt::Kind::Assign: out += pad + s->var + " := " + print_expr(s->expr); break;
    case Stmt::Kind::Seq:
      print_stmt(out, s->a, indent);
      out += ";\n";
      print_stmt(out, s->b, indent);
      break;
    case Stmt::Kind::If:
      out += pad + "if " + print_expr(s->expr) + " then\n";
      print_stmt(out, s->a, indent + 1);
      out += "\n" + pad + "else\n";
      print_stmt(out, s->b, indent + 1);
      out += "\n" + pad + "end";
      break;
    case Stmt::Kind::While:
      out += pad + "while " + print_expr(s->expr) + " do\n";
      print_stmt(out, s->a, indent + 1);
      out += "\n" + pad + "end";
      break;
  }
}

}  // namespace detail

inline std::string print_imp(const StmtPtr& s) {
  std::string out;
  detail::print_stmt(out, s, 0);
  return out + "\n";
}

// Parsing --------------------------------------------------------------------

namespace detail {

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) { advance(); }

  StmtPtr program() {
    StmtPtr s = stmt();
    if (tok_.kind != Tok::Eof) fail("expected end of input");
    return s;
  }

 private:
  enum class Tok { Eof, Ident, Num, Sym };
  struct Token {
    Tok kind = Tok::Eof;
    std::string text;
    std::size_t line = 1, col = 1;
  };

  [[noreturn]] void fail(const std::string& what) const {
    std::string got = tok_.kind == Tok::Eof ? "end of input" : "'" + tok_.text + "'";
    throw Error(Errc::SyntaxError, "line " + std::to_string(tok_.line) + ", column " +
                                       std::to_string(tok_.col) + ": " + what + ", got " + got);
  }

  void advance() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') bump();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        bump();
      } else {
        break;
      }
    }
    tok_ = Token{Tok::Eof, "", line_, col_};
    if (pos_ >= src_.size()) return;
    char c = src_[pos_];
    std::size_t start = pos_;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) bump();
      tok_.kind = Tok::Ident;
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) bump();
      tok_.kind = Tok::Num;
    } else if (c == ':' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '=') {
      bump();
      bump();
      tok_.kind = Tok::Sym;
    } else if (c == '+' || c == '-' || c == '*' || c == '(' || c == ')' || c == ';') {
      bump();
      tok_.kind = Tok::Sym;
    } else {
      tok_.text = std::string(1, c);
      tok_.kind = Tok::Sym;
      fail("unexpected character");
    }
    tok_.text = std::string(src_.substr(start, pos_ - start));
  }

  void bump() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  static bool keyword(const std::string& s) {
    return s == "skip" || s == "if" || s == "then" || s == "else" || s == "end" || s == "while" ||
           s == "do";
  }

  bool at(const char* text) const { return tok_.kind != Tok::Eof && tok_.text == text; }

  void expect(const char* text) {
    if (!at(text)) fail(std::string("expected '") + text + "'");
    advance();
  }

  StmtPtr stmt() {
    StmtPtr s = simple();
    while (at(";")) {
      advance();
      s = seq(s, simple());
    }
    return s;
  }

  StmtPtr simple() {
    if (at("skip")) {
      advance();
      return skip();
    }
    if (at("if")) {
      advance();
      ExprPtr c = expr();
      expect("then");
      StmtPtr t = stmt();
      expect("else");
      StmtPtr f = stmt();
      expect("end");
      return if_(c, t, f);
    }
    if (at("while")) {
      advance();
      ExprPtr c = expr();
      expect("do");
      StmtPtr body = stmt();
      expect("end");
      return while_(c, body);
    }
    if (tok_.kind == Tok::Ident && !keyword(tok_.text)) {
      std::string x = tok_.text;
      advance();
      expect(":=");
      return assign(x, expr());
    }
    fail("expected a statement");
  }

  ExprPtr expr() {
    ExprPtr e = term();
    while (at("+") || at("-")) {
      bool add = at("+");
      advance();
      ExprPtr r = term();
      e = add ? plus(e, r) : minus(e, r);
    }
    return e;
  }

  ExprPtr term() {
    ExprPtr e = atom();
    while (at("*")) {
      advance();
      e = mult(e, atom());
    }
    return e;
  }

  ExprPtr atom() {
    if (tok_.kind == Tok::Num) {
      std::uint64_t n = 0;
      for (char c : tok_.text) {
        auto d = static_cast<std::uint64_t>(c - '0');
        if (n > (UINT64_MAX - d) / 10) fail("literal does not fit in 64 bits");
        n = n * 10 + d;
      }
      advance();
      return lit(n);
    }
    if (tok_.kind == Tok::Ident && !keyword(tok_.text)) {
      std::string x = tok_.text;
      advance();
      return var(x);
    }
    if (at("(")) {
      advance();
      ExprPtr e = expr();
      expect(")");
      return e;
    }
    fail("expected an expression");
  }

  std::string_view src_;
  std::size_t pos_ = 0, line_ = 1, col_ = 1;
  Token tok_;
};

}  // namespace detail

inline StmtPtr parse_imp(std::string_view src) { return detail::Parser(src).program(); }

// Semantics ------------------------------------------------------------------

inline const SigPtr& imp_state_sig() {
  static const SigPtr s = make_sig("ImpState", {{"GetVar", {Type::str()}, Type::nat()},
                                                {"SetVar", {Type::str(), Type::nat()}, Type::unit()}});
  return s;
}

/// The map events Imp state is interpreted into: variables default to 0.
inline const SigPtr& env_map_sig() {
  static const SigPtr s = map_default_sig("EnvMapE", Type::str(), Type::nat(), Value::nat(0));
  return s;
}

inline EventInstance get_var(const std::string& x) {
  return make_event(imp_state_sig(), "GetVar", {Value::str(x)});
}
inline EventInstance set_var(const std::string& x, std::uint64_t v) {
  return make_event(imp_state_sig(), "SetVar", {Value::str(x), Value::nat(v)});
}

/// Evaluates left operand, then right, then combines.
inline ITree denote_expr(const ExprPtr& e) {
  switch (e->op) {
    case Expr::Op::Var: return trigger(inject_left(get_var(e->name)));
    case Expr::Op::Lit: return ret(Value::nat(e->lit));
    default: break;
  }
  Expr::Op op = e->op;
  ExprPtr rhs = e->rhs;
  return itree::bind(denote_expr(e->lhs), [op, rhs](const Value& l) {
    return itree::bind(denote_expr(rhs), [op, l](const Value& r) {
      std::uint64_t a = l.as_nat();
      std::uint64_t b = r.as_nat();
      std::uint64_t v = op == Expr::Op::Plus ? nat_add(a, b) : op == Expr::Op::Minus ? nat_sub(a, b) : nat_mul(a, b);
      return ret(Value::nat(v));
    });
  });
}

inline ITree denote_imp(const StmtPtr& s) {
  switch (s->kind) {
    case Stmt::Kind::Skip: return ret(Value::unit());
    case Stmt::Kind::Assign: {
      std::string x = s->var;
      return itree::bind(denote_expr(s->expr), [x](const Value& v) {
        return trigger(inject_left(set_var(x, v.as_nat())));
      });
    }
    case Stmt::Kind::Seq: {
      StmtPtr b = s->b;
      return itree::bind(denote_imp(s->a), [b](const Value&) { return denote_imp(b); });
    }
    case Stmt::Kind::If: {
      StmtPtr t = s->a;
      StmtPtr f = s->b;
      return itree::bind(denote_expr(s->expr), [t, f](const Value& v) {
        return v.as_nat() != 0 ? denote_imp(t) : denote_imp(f);
      });
    }
    case Stmt::Kind::While: {
      ExprPtr c = s->expr;
      StmtPtr body = s->a;
      KTree step(Type::unit(), [c, body](const Value&) {
        return itree::bind(denote_expr(c), [body](const Value& v) {
          if (v.as_nat() != 0) {
            return itree::bind(denote_imp(body), [](const Value&) { return ret(inl(Value::unit())); });
          }
          return ret(inr(Value::unit()));
        });
      });
      return iter(step)(Value::unit());
    }
  }
  throw Error(Errc::SyntaxError, "unknown statement");
}

// State interpretation -------------------------------------------------------

using Env = std::map<std::string, std::uint64_t>;

inline Value env_value(const Env& g) {
  ValueMap m;
  for (const auto& [k, v] : g) m.emplace(Value::str(k), Value::nat(v));
  return Value::map(std::move(m));
}

inline Env env_of(const Value& m) {
  Env g;
  for (const auto& [k, v] : m.as_map()) g.emplace(k.as_str(), v.as_nat());
  return g;
}

/// GetVar / SetVar become LookupDefault / Insert on the environment map.
inline Handler h_imp_state() {
  return {leaf(imp_state_sig()), TargetMonad::itree_m(leaf(env_map_sig())),
          [](const EventInstance& e) -> Comp {
            if (e.name() == "GetVar") return trigger(make_event(env_map_sig(), "LookupDefault", {e.args[0]}));
            return trigger(make_event(env_map_sig(), "Insert", {e.args[0], e.args[1]}));
          }};
}

/// Runs `t` (over ImpState +' rest) against the environment `g0`; returns a
/// tree over `rest` yielding Pair(env map, result).
inline ITree interp_imp(const ITree& t, const Env& g0, const Signature& rest = leaf(empty_sig())) {
  Handler h = handler_bimap(h_imp_state(), handler_id(rest));
  ITree translated = interp_tree(h, t);
  return interp_map(translated, env_value(g0), env_map_sig(), rest);
}

struct ImpRun {
  bool finished = false;
  Env env;
  std::uint64_t steps = 0;
};

/// Burns up to `fuel` Taus of the interpreted program.
inline ImpRun run_imp(const StmtPtr& s, const Env& g0, std::uint64_t fuel) {
  Burned b = burn_counted(fuel, interp_imp(denote_imp(s), g0));
  Observation o = observe(b.tree);
  ImpRun out;
  out.steps = b.steps;
  if (const auto* r = std::get_if<RetO>(&o)) {
    out.finished = true;
    out.env = env_of(r->value.first());
  } else if (is_vis(o)) {
    throw Error(Errc::UnhandledEvent, std::get<VisO>(o).event.to_string() + " escaped interp_imp");
  }
  return out;
}

}  // namespace itree::imp

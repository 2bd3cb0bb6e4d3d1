#pragma once

// Event handlers and the generic interpreter. Handlers target either the
// ITree monad over some signature or a state transformer stacked on another
// target; both provide the iteration operator interp is built from.

#include <functional>
#include <memory>
#include <utility>
#include <variant>

#include "itree/combinators.hpp"
#include "itree/event.hpp"
#include "itree/itree.hpp"
#include "itree/value.hpp"

namespace itree {

class Comp;
using StateFn = std::function<Comp(const Value&)>;

/// A computation in a target monad: a tree, or a function from a state to a
/// computation in the inner monad returning Pair(state, result).
class Comp {
 public:
  Comp(ITree t) : rep_(std::move(t)) {}  // NOLINT(google-explicit-constructor)

  static Comp state(StateFn f) { return Comp(std::make_shared<const StateFn>(std::move(f))); }

  bool is_tree() const { return std::holds_alternative<ITree>(rep_); }

  const ITree& tree() const {
    if (!is_tree()) throw Error(Errc::AnswerTagMismatch, "computation expects an initial state");
    return std::get<ITree>(rep_);
  }

  Comp run(const Value& s) const {
    if (is_tree()) throw Error(Errc::AnswerTagMismatch, "computation is not state-passing");
    return (*std::get<std::shared_ptr<const StateFn>>(rep_))(s);
  }

 private:
  explicit Comp(std::shared_ptr<const StateFn> f) : rep_(std::move(f)) {}
  std::variant<ITree, std::shared_ptr<const StateFn>> rep_;
};

class TargetMonad {
 public:
  using Body = std::function<Comp(const Value&)>;

  static TargetMonad itree_m(Signature esig) {
    return TargetMonad(std::make_shared<const Rep>(Rep{false, Type::unit(), std::move(esig), nullptr}));
  }
  static TargetMonad state_t(Type state_tag, const TargetMonad& inner) {
    return TargetMonad(std::make_shared<const Rep>(
        Rep{true, state_tag, inner.esig(), std::make_shared<const TargetMonad>(inner)}));
  }

  bool is_state() const { return rep_->is_state; }
  const Type& state_tag() const { return rep_->state; }
  /// Events that may remain after running this monad down to a tree.
  const Signature& esig() const { return rep_->esig; }
  const TargetMonad& inner() const { return *rep_->inner; }

  Comp ret(Value v) const {
    if (!is_state()) return itree::ret(std::move(v));
    return Comp::state([self = *this, v = std::move(v)](const Value& s) {
      check_tag(self.state_tag(), s, "state");
      return self.inner().ret(Value::pair(s, v));
    });
  }

  Comp bind(const Comp& c, Body k) const {
    if (!is_state()) {
      return itree::bind(c.tree(), [k = std::move(k)](const Value& x) { return k(x).tree(); });
    }
    return Comp::state([self = *this, c, k = std::move(k)](const Value& s) {
      check_tag(self.state_tag(), s, "state");
      return self.inner().bind(c.run(s), [k](const Value& p) { return k(p.second()).run(p.first()); });
    });
  }

  /// MonadIter: `body` returns Left(a') to continue or Right(b) to stop.
  Comp iter(Body body, Value init) const {
    if (!is_state()) {
      auto fn = std::make_shared<const KTree::Fn>([body](const Value& a) { return body(a).tree(); });
      return detail::iterate(fn, init);
    }
    // stateT lifting: iterate in the inner monad over Pair(state, a).
    return Comp::state([self = *this, body = std::move(body), init](const Value& s) {
      check_tag(self.state_tag(), s, "state");
      const TargetMonad& in = self.inner();
      Body lifted = [body, in](const Value& sa) {
        return in.bind(body(sa.second()).run(sa.first()), [in](const Value& p) {
          const Value& st = p.first();
          const Value& r = p.second();
          Value next = Value::pair(st, sum_payload(r));
          return in.ret(is_inl(r) ? inl(std::move(next)) : inr(std::move(next)));
        });
      };
      return in.iter(std::move(lifted), Value::pair(s, init));
    });
  }

 private:
  struct Rep {
    bool is_state;
    Type state;
    Signature esig;
    std::shared_ptr<const TargetMonad> inner;
  };
  explicit TargetMonad(std::shared_ptr<const Rep> r) : rep_(std::move(r)) {}
  std::shared_ptr<const Rep> rep_;
};

struct Handler {
  Signature source;
  TargetMonad target;
  std::function<Comp(const EventInstance&)> fn;

  Comp apply(const EventInstance& e) const {
    if (!belongs_to(source, e)) {
      throw Error(Errc::UnhandledEvent, e.to_string() + " is not handled by " + source.to_string());
    }
    return fn(e);
  }
};

/// Folds `h` over `t`, one target iteration per consumed Tau or Vis node.
inline Comp interp(const Handler& h, const ITree& t) {
  TargetMonad m = h.target;
  TargetMonad::Body body = [h, m](const Value& tv) -> Comp {
    Observation o = observe(as_tree(tv));
    if (auto* r = std::get_if<RetO>(&o)) return m.ret(inr(r->value));
    if (auto* tn = std::get_if<TauO>(&o)) return m.ret(inl(tree_value(tn->next)));
    auto& v = std::get<VisO>(o);
    return m.bind(h.apply(v.event),
                  [m, k = v.k](const Value& x) { return m.ret(inl(tree_value(k(x)))); });
  };
  return m.iter(std::move(body), tree_value(t));
}

inline ITree interp_tree(const Handler& h, const ITree& t) { return interp(h, t).tree(); }

// The cocartesian structure of ITree handlers ---------------------------------

inline Handler handler_id(const Signature& s) {
  return {s, TargetMonad::itree_m(s), [](const EventInstance& e) { return Comp(trigger(e)); }};
}

/// h then g: g interprets the events h translates into.
inline Handler handler_cat(const Handler& h, const Handler& g) {
  return {h.source, g.target, [h, g](const EventInstance& e) { return interp(g, h.apply(e).tree()); }};
}

inline Handler handler_case(const Handler& h, const Handler& g) {
  Signature src = sum(h.source, g.source);
  return {src, h.target, [h, g, src](const EventInstance& e) {
            Projected p = project(src, e);
            return p.side == Side::Left ? h.apply(p.event) : g.apply(p.event);
          }};
}

inline Handler handler_inl(const Signature& e, const Signature& f) {
  return {e, TargetMonad::itree_m(sum(e, f)),
          [](const EventInstance& ev) { return Comp(trigger(inject_left(ev))); }};
}

inline Handler handler_inr(const Signature& e, const Signature& f) {
  return {f, TargetMonad::itree_m(sum(e, f)),
          [](const EventInstance& ev) { return Comp(trigger(inject_right(ev))); }};
}

inline Handler handler_bimap(const Handler& h, const Handler& g) {
  const Signature& f1 = h.target.esig();
  const Signature& f2 = g.target.esig();
  return handler_case(handler_cat(h, handler_inl(f1, f2)), handler_cat(g, handler_inr(f1, f2)));
}

// State and map interpretation -----------------------------------------------

namespace detail {

// Re-emits an event of the remaining signature inside a state computation.
inline Comp lift_event(const EventInstance& e) {
  return Comp::state([e](const Value& s) {
    return Comp(itree::bind(trigger(e), [s](const Value& x) { return ret(Value::pair(s, x)); }));
  });
}

}  // namespace detail

/// Handles StateE(S) +' E into stateT S (itree E).
inline Handler handle_state(Type state_tag, const Signature& rest = leaf(empty_sig())) {
  SigPtr ssig = state_sig(state_tag);
  Signature src = sum(leaf(ssig), rest);
  TargetMonad target = TargetMonad::state_t(state_tag, TargetMonad::itree_m(rest));
  return {src, target, [src](const EventInstance& e) -> Comp {
            Projected p = project(src, e);
            if (p.side == Side::Right) return detail::lift_event(p.event);
            if (p.event.name() == "Get") {
              return Comp::state([](const Value& s) { return Comp(ret(Value::pair(s, s))); });
            }
            Value next = p.event.args.at(0);
            return Comp::state([next](const Value&) {
              return Comp(ret(Value::pair(next, Value::unit())));
            });
          }};
}

inline ITree interp_state(const ITree& t, const Value& s0, Type state_tag,
                          const Signature& rest = leaf(empty_sig())) {
  check_tag(state_tag, s0, "initial state");
  return interp(handle_state(state_tag, rest), t).run(s0).tree();
}

inline EventInstance get_event(Type state_tag) { return make_event(state_sig(state_tag), "Get"); }
inline EventInstance put_event(Type state_tag, Value v) {
  return make_event(state_sig(state_tag), "Put", {std::move(v)});
}

/// Handles MapDefaultE +' E into stateT map (itree E).
inline Handler handle_map(const SigPtr& msig, const Signature& rest = leaf(empty_sig())) {
  if (!msig->default_value()) {
    throw Error(Errc::WrongSignature, msig->name() + " has no default value");
  }
  Signature src = sum(leaf(msig), rest);
  TargetMonad target = TargetMonad::state_t(Type::map(), TargetMonad::itree_m(rest));
  Value dflt = *msig->default_value();
  return {src, target, [src, dflt](const EventInstance& e) -> Comp {
            Projected p = project(src, e);
            if (p.side == Side::Right) return detail::lift_event(p.event);
            const std::string& op = p.event.name();
            std::vector<Value> args = p.event.args;
            return Comp::state([op, args, dflt](const Value& m) {
              const ValueMap& cur = m.as_map();
              if (op == "LookupDefault") {
                auto it = cur.find(args[0]);
                return Comp(ret(Value::pair(m, it == cur.end() ? dflt : it->second)));
              }
              ValueMap next = cur;
              if (op == "Insert") {
                next[args[0]] = args[1];
              } else {
                next.erase(args[0]);
              }
              return Comp(ret(Value::pair(Value::map(std::move(next)), Value::unit())));
            });
          }};
}

inline ITree interp_map(const ITree& t, const Value& m0, const SigPtr& msig,
                        const Signature& rest = leaf(empty_sig())) {
  check_tag(Type::map(), m0, "initial map");
  return interp(handle_map(msig, rest), t).run(m0).tree();
}

}  // namespace itree

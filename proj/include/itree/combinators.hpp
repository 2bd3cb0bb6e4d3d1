#pragma once

// KTrees (functions Value -> ITree) with their cocartesian structure, and the
// recursion combinators iter, loop and mrec.

#include <functional>
#include <memory>
#include <utility>

#include "itree/event.hpp"
#include "itree/itree.hpp"
#include "itree/value.hpp"

namespace itree {

class KTree {
 public:
  using Fn = std::function<ITree(const Value&)>;

  KTree(Type dom, Fn fn) : dom_(dom), fn_(std::make_shared<const Fn>(std::move(fn))) {}
  explicit KTree(Fn fn) : KTree(Type::any(), std::move(fn)) {}

  ITree operator()(const Value& v) const {
    check_tag(dom_, v, "ktree input");
    return (*fn_)(v);
  }

  const Type& dom() const { return dom_; }

  /// As a bind continuation.
  Kont kont() const {
    return [self = *this](const Value& v) { return self(v); };
  }

 private:
  Type dom_;
  std::shared_ptr<const Fn> fn_;
};

/// h >>> k
inline KTree kt_cat(const KTree& h, const KTree& k) {
  return KTree(h.dom(), [h, k](const Value& a) { return itree::bind(h(a), k.kont()); });
}

inline KTree kt_id(Type dom = Type::any()) {
  return KTree(dom, [](const Value& a) { return ret(a); });
}

inline KTree kt_pure(std::function<Value(const Value&)> f, Type dom = Type::any()) {
  return KTree(dom, [f = std::move(f)](const Value& a) { return ret(f(a)); });
}

inline KTree kt_case(const KTree& h, const KTree& k) {
  return KTree(Type::pair(), [h, k](const Value& s) {
    return is_inl(s) ? h(sum_payload(s)) : k(sum_payload(s));
  });
}

inline KTree kt_inl(Type dom = Type::any()) {
  return KTree(dom, [](const Value& a) { return ret(inl(a)); });
}

inline KTree kt_inr(Type dom = Type::any()) {
  return KTree(dom, [](const Value& a) { return ret(inr(a)); });
}

inline KTree kt_bimap(const KTree& f, const KTree& g) {
  return kt_case(kt_cat(f, kt_inl()), kt_cat(g, kt_inr()));
}

inline KTree kt_swap() { return kt_case(kt_inr(), kt_inl()); }

namespace detail {

inline ITree iterate(std::shared_ptr<const KTree::Fn> body, const Value& a) {
  return itree::bind((*body)(a), [body](const Value& lr) {
    if (is_inl(lr)) {
      Value next = sum_payload(lr);
      return tau(lazy([body, next] { return iterate(body, next); }));
    }
    return ret(sum_payload(lr));
  });
}

}  // namespace detail

/// Repeats `body` while it returns Left, with one Tau per repetition.
inline KTree iter(const KTree& body) {
  auto fn = std::make_shared<const KTree::Fn>([body](const Value& a) { return body(a); });
  return KTree(body.dom(), [fn](const Value& a) { return detail::iterate(fn, a); });
}

/// Feeds Left outputs of `body` back as Left inputs; enters with Right(a).
inline KTree loop(const KTree& body) {
  KTree step(Type::pair(), [body](const Value& ca) {
    return itree::bind(body(ca), [](const Value& cb) {
      return is_inl(cb) ? ret(inl(inl(sum_payload(cb)))) : ret(inr(sum_payload(cb)));
    });
  });
  KTree it = iter(step);
  return KTree([it](const Value& a) { return it(inr(a)); });
}

// Mutual recursion -----------------------------------------------------------

/// Recursive handler D ~> itree (D +' E): calls to itself appear as events on
/// the Left of the sum.
struct RecHandler {
  SigPtr dsig;
  std::function<ITree(const EventInstance&)> body;
};

inline ITree mrec(const RecHandler& rh, const EventInstance& e0) {
  if (!same_sig(e0.sig, rh.dsig) || !e0.path.empty()) {
    throw Error(Errc::WrongSignature, e0.to_string() + " is not an event of " + rh.dsig->name());
  }
  auto step = std::make_shared<const KTree::Fn>([rh](const Value& tv) -> ITree {
    Observation o = observe(as_tree(tv));
    if (auto* r = std::get_if<RetO>(&o)) return ret(inr(r->value));
    if (auto* t = std::get_if<TauO>(&o)) return ret(inl(tree_value(t->next)));
    auto& v = std::get<VisO>(o);
    if (v.event.path.empty()) {
      throw Error(Errc::WrongSignature, v.event.to_string() + " is not classified in D +' E");
    }
    EventInstance inner = v.event;
    inner.path.erase(inner.path.begin());
    if (v.event.path.front() == Side::Left) {
      return ret(inl(tree_value(itree::bind(rh.body(inner), v.k))));
    }
    return vis(std::move(inner), [k = v.k](const Value& x) { return ret(inl(tree_value(k(x)))); });
  });
  return detail::iterate(step, tree_value(lazy([rh, e0] { return rh.body(e0); })));
}

inline std::function<ITree(const EventInstance&)> mrec_fn(const RecHandler& rh) {
  return [rh](const EventInstance& d) { return mrec(rh, d); };
}

// Sample recursive handlers ----------------------------------------------------

inline const SigPtr& ackermann_sig() {
  static const SigPtr s =
      make_sig("AckermannE", {{"Ackermann", {Type::nat(), Type::nat()}, Type::nat()}});
  return s;
}

inline EventInstance ackermann_call(std::uint64_t m, std::uint64_t n) {
  return make_event(ackermann_sig(), "Ackermann", {Value::nat(m), Value::nat(n)});
}

inline RecHandler h_ackermann() {
  return {ackermann_sig(), [](const EventInstance& e) -> ITree {
            std::uint64_t m = e.args[0].as_nat();
            std::uint64_t n = e.args[1].as_nat();
            auto call = [](std::uint64_t a, std::uint64_t b) {
              return trigger(inject_left(ackermann_call(a, b)));
            };
            if (m == 0) return ret(Value::nat(n + 1));
            if (n == 0) return call(m - 1, 1);
            return itree::bind(call(m, n - 1),
                        [m, call](const Value& x) { return call(m - 1, x.as_nat()); });
          }};
}

inline const SigPtr& evenodd_sig() {
  static const SigPtr s = make_sig(
      "EvenOddE", {{"Even", {Type::nat()}, Type::boolean()}, {"Odd", {Type::nat()}, Type::boolean()}});
  return s;
}

inline RecHandler h_evenodd() {
  return {evenodd_sig(), [](const EventInstance& e) -> ITree {
            std::uint64_t n = e.args[0].as_nat();
            bool is_even = e.name() == "Even";
            if (n == 0) return ret(Value::boolean(is_even));
            auto next = make_event(evenodd_sig(), is_even ? "Odd" : "Even", {Value::nat(n - 1)});
            return trigger(inject_left(std::move(next)));
          }};
}

}  // namespace itree

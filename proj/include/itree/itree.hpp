#pragma once

// Interaction trees: possibly infinite trees of Ret / Tau / Vis nodes.
//
// A tree is a head (an eager node, or a memoized deferred producer) plus a
// persistent sequence of pending bind continuations. `bind` appends to that
// sequence in constant time; `observe` pops continuations as Ret leaves are
// reached until a genuine Ret, Tau or Vis surfaces.

#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "itree/event.hpp"
#include "itree/value.hpp"

namespace itree {

class ITree;
using Kont = std::function<ITree(const Value&)>;

namespace detail {

struct Head;
struct KNode;
using KList = std::shared_ptr<const KNode>;
using KontPtr = std::shared_ptr<const Kont>;

// A continuation, or a nested sequence spliced in as a single item.
struct KNode {
  KNode(std::variant<KontPtr, KList> i, KList n) : item(std::move(i)), next(std::move(n)) {}
  KNode(const KNode&) = delete;
  KNode& operator=(const KNode&) = delete;

  // Deeply nested segments would otherwise be released recursively.
  ~KNode() {
    std::vector<KList> pending;
    steal(pending);
    while (!pending.empty()) {
      KList n = std::move(pending.back());
      pending.pop_back();
      if (n.use_count() == 1) n->steal(pending);
    }
  }

  void steal(std::vector<KList>& out) const {
    if (next) out.push_back(std::move(next));
    if (auto* sub = std::get_if<KList>(&item); sub && *sub) out.push_back(std::move(*sub));
  }

  mutable std::variant<KontPtr, KList> item;
  mutable KList next;
};

inline KList cons(std::variant<KontPtr, KList> item, KList next) {
  return std::make_shared<const KNode>(std::move(item), std::move(next));
}

// `front` runs before `back`.
inline KList splice(const KList& front, KList back) {
  if (!front) return back;
  if (!back) return front;
  return cons(front, std::move(back));
}

inline KontPtr pop(KList& ks) {
  while (ks) {
    if (const auto* k = std::get_if<KontPtr>(&ks->item)) {
      KontPtr r = *k;
      ks = ks->next;
      return r;
    }
    const KList& sub = std::get<KList>(ks->item);
    if (!sub) {
      ks = ks->next;
      continue;
    }
    KList rest = sub->next ? cons(sub->next, ks->next) : ks->next;
    ks = cons(sub->item, std::move(rest));
  }
  return nullptr;
}

}  // namespace detail

class ITree {
 public:
  ITree(std::shared_ptr<const detail::Head> head, detail::KList konts)
      : head_(std::move(head)), konts_(std::move(konts)) {}

  const std::shared_ptr<const detail::Head>& head() const { return head_; }
  const detail::KList& konts() const { return konts_; }

  /// Identity of the underlying structure (not a semantic comparison).
  friend bool same_tree(const ITree& a, const ITree& b) {
    return a.head_ == b.head_ && a.konts_ == b.konts_;
  }

 private:
  friend struct detail::Head;
  std::shared_ptr<const detail::Head> head_;
  detail::KList konts_;
};

struct RetNode {
  Value value;
};
struct TauNode {
  ITree next;
};
struct VisNode {
  EventInstance event;
  Kont k;
};
using Node = std::variant<RetNode, TauNode, VisNode>;

namespace detail {

struct Head {
  explicit Head(Node n) : node(std::move(n)) {}
  explicit Head(std::function<ITree()> p) : producer(std::move(p)) {}

  Head(const Head&) = delete;
  Head& operator=(const Head&) = delete;

  ~Head() {
    // Long Tau chains would otherwise be released recursively.
    std::vector<std::shared_ptr<const Head>> pending;
    steal_children(pending);
    while (!pending.empty()) {
      std::shared_ptr<const Head> h = std::move(pending.back());
      pending.pop_back();
      if (h.use_count() == 1) h->steal_children(pending);
    }
  }

  bool lazy() const { return !node.has_value(); }

  const ITree& produce() const {
    std::call_once(once, [this] {
      produced.emplace(producer());
      producer = nullptr;
    });
    return *produced;
  }

  void steal_children(std::vector<std::shared_ptr<const Head>>& out) const {
    if (produced && produced->head_) out.push_back(std::move(produced->head_));
    if (node) {
      if (auto* t = std::get_if<TauNode>(&*node); t && t->next.head_) {
        out.push_back(std::move(t->next.head_));
      }
    }
  }

  mutable std::optional<Node> node;
  mutable std::function<ITree()> producer;
  mutable std::optional<ITree> produced;
  mutable std::once_flag once;
};

inline ITree make(Node n) { return ITree(std::make_shared<const Head>(std::move(n)), nullptr); }

}  // namespace detail

// Observations ---------------------------------------------------------------

struct RetO {
  Value value;
};
struct TauO {
  ITree next;
};
struct VisO {
  EventInstance event;
  Kont k;  // checks the answer tag before continuing

  ITree resume(const Value& answer) const { return k(answer); }
};
using Observation = std::variant<RetO, TauO, VisO>;

inline bool is_ret(const Observation& o) { return std::holds_alternative<RetO>(o); }
inline bool is_tau(const Observation& o) { return std::holds_alternative<TauO>(o); }
inline bool is_vis(const Observation& o) { return std::holds_alternative<VisO>(o); }

// Smart constructors ---------------------------------------------------------

inline ITree ret(Value v) { return detail::make(RetNode{std::move(v)}); }
inline ITree tau(ITree t) { return detail::make(TauNode{std::move(t)}); }
inline ITree vis(EventInstance e, Kont k) { return detail::make(VisNode{std::move(e), std::move(k)}); }

/// Defers construction of a tree until it is first observed.
inline ITree lazy(std::function<ITree()> producer) {
  return ITree(std::make_shared<const detail::Head>(std::move(producer)), nullptr);
}

inline ITree bind(const ITree& t, Kont k) {
  auto kp = std::make_shared<const Kont>(std::move(k));
  detail::KList tail = detail::cons(std::move(kp), nullptr);
  return ITree(t.head(), detail::splice(t.konts(), std::move(tail)));
}

/// `t ;; u`: runs t, discards its result, continues with u.
inline ITree seq(const ITree& t, ITree u) {
  return itree::bind(t, [u = std::move(u)](const Value&) { return u; });
}

inline ITree fmap(const ITree& t, std::function<Value(const Value&)> f) {
  return itree::bind(t, [f = std::move(f)](const Value& v) { return ret(f(v)); });
}

inline ITree trigger(EventInstance e) {
  return vis(std::move(e), [](const Value& x) { return ret(x); });
}

// Observation ----------------------------------------------------------------

inline Observation observe(const ITree& t) {
  std::shared_ptr<const detail::Head> h = t.head();
  detail::KList ks = t.konts();
  for (;;) {
    if (h->lazy()) {
      const ITree& p = h->produce();
      ks = detail::splice(p.konts(), std::move(ks));
      h = p.head();
      continue;
    }
    const Node& n = *h->node;
    if (const auto* r = std::get_if<RetNode>(&n)) {
      detail::KontPtr k = detail::pop(ks);
      if (!k) return RetO{r->value};
      ITree u = (*k)(r->value);
      ks = detail::splice(u.konts(), std::move(ks));
      h = u.head();
      continue;
    }
    if (const auto* tn = std::get_if<TauNode>(&n)) {
      return TauO{ITree(tn->next.head(), detail::splice(tn->next.konts(), std::move(ks)))};
    }
    const auto& v = std::get<VisNode>(n);
    Type answer = v.event.answer();
    Kont k = [answer, inner = v.k, ks = std::move(ks), name = v.event.name()](const Value& x) {
      check_tag(answer, x, name);
      ITree u = inner(x);
      return ITree(u.head(), detail::splice(u.konts(), ks));
    };
    return VisO{v.event, std::move(k)};
  }
}

/// Strips up to `n` leading Tau nodes.
struct Burned {
  ITree tree;
  std::uint64_t steps = 0;
};

inline Burned burn_counted(std::uint64_t n, ITree t) {
  std::uint64_t steps = 0;
  while (steps < n) {
    Observation o = observe(t);
    auto* tn = std::get_if<TauO>(&o);
    if (!tn) break;
    t = std::move(tn->next);
    ++steps;
  }
  return {std::move(t), steps};
}

inline ITree burn(std::uint64_t n, ITree t) { return burn_counted(n, std::move(t)).tree; }

// Trees as values (iteration state of interpreters) ---------------------------

struct TreeBox {
  ITree tree;
};

inline Value tree_value(ITree t) {
  return Value::tree(std::make_shared<const TreeBox>(TreeBox{std::move(t)}));
}
inline const ITree& as_tree(const Value& v) { return v.as_tree_box()->tree; }

// Sample trees ---------------------------------------------------------------

/// The silently diverging tree: observe(spin()) is TauO(spin()).
inline ITree spin() {
  static const ITree s = [] {
    auto h = std::make_shared<detail::Head>(std::function<ITree()>{});
    h->node.emplace(TauNode{ITree(h, nullptr)});
    return ITree(std::move(h), nullptr);
  }();
  return s;
}

/// Reads an input, echoes it, and repeats forever.
inline ITree echo() {
  return itree::bind(trigger(input_event()), [](const Value& x) {
    return itree::bind(trigger(output_event(x.as_nat())), [](const Value&) { return tau(lazy(echo)); });
  });
}

/// Keeps asking for input until it receives 9.
inline ITree kill9() {
  return vis(input_event(), [](const Value& n) {
    return n.as_nat() == 9 ? ret(Value::unit()) : kill9();
  });
}

}  // namespace itree

#pragma once

// Event signatures, right-nested disjoint sums of signatures, and subevent
// inclusion. Signatures are runtime values so tools can work over arbitrary
// alphabets.

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "itree/error.hpp"
#include "itree/value.hpp"

namespace itree {

struct EventKind {
  std::string name;
  std::vector<Type> params;
  Type answer;

  friend bool operator==(const EventKind&, const EventKind&) = default;
};

class EventSig {
 public:
  EventSig(std::string name, std::vector<EventKind> kinds, std::optional<Value> default_value = {})
      : name_(std::move(name)), kinds_(std::move(kinds)), default_(std::move(default_value)) {
    for (std::size_t i = 0; i < kinds_.size(); ++i) {
      for (std::size_t j = i + 1; j < kinds_.size(); ++j) {
        if (kinds_[i].name == kinds_[j].name) {
          throw Error(Errc::Ambiguous, "duplicate kind " + kinds_[i].name + " in " + name_);
        }
      }
    }
  }

  const std::string& name() const { return name_; }
  const std::vector<EventKind>& kinds() const { return kinds_; }
  const EventKind& kind(std::size_t i) const { return kinds_.at(i); }
  /// Default answer for lookups; only map-default signatures carry one.
  const std::optional<Value>& default_value() const { return default_; }

  std::optional<std::size_t> find(std::string_view kind_name) const {
    for (std::size_t i = 0; i < kinds_.size(); ++i) {
      if (kinds_[i].name == kind_name) return i;
    }
    return std::nullopt;
  }

  friend bool operator==(const EventSig& a, const EventSig& b) {
    return a.name_ == b.name_ && a.kinds_ == b.kinds_ && a.default_ == b.default_;
  }

 private:
  std::string name_;
  std::vector<EventKind> kinds_;
  std::optional<Value> default_;
};

using SigPtr = std::shared_ptr<const EventSig>;

inline SigPtr make_sig(std::string name, std::vector<EventKind> kinds,
                       std::optional<Value> default_value = {}) {
  return std::make_shared<const EventSig>(std::move(name), std::move(kinds),
                                          std::move(default_value));
}

inline bool same_sig(const SigPtr& a, const SigPtr& b) { return a == b || (a && b && *a == *b); }

enum class Side : std::uint8_t { Left, Right };

/// A leaf signature or a binary sum `left +' right`.
class Signature {
 public:
  static Signature leaf(SigPtr sig) {
    Signature s;
    s.node_ = std::make_shared<const Node>(Node{std::move(sig), {}, {}});
    return s;
  }
  static Signature sum(Signature left, Signature right) {
    Signature s;
    s.node_ = std::make_shared<const Node>(
        Node{nullptr, std::make_shared<const Signature>(std::move(left)),
             std::make_shared<const Signature>(std::move(right))});
    return s;
  }

  bool is_leaf() const { return node_->leaf != nullptr; }
  const SigPtr& sig() const { return node_->leaf; }
  const Signature& left() const {
    require_sum();
    return *node_->left;
  }
  const Signature& right() const {
    require_sum();
    return *node_->right;
  }
  const Signature& child(Side s) const { return s == Side::Left ? left() : right(); }

  friend bool operator==(const Signature& a, const Signature& b) {
    if (a.node_ == b.node_) return true;
    if (a.is_leaf() != b.is_leaf()) return false;
    if (a.is_leaf()) return same_sig(a.sig(), b.sig());
    return a.left() == b.left() && a.right() == b.right();
  }

  std::string to_string() const {
    if (is_leaf()) return sig()->name();
    return "(" + left().to_string() + " +' " + right().to_string() + ")";
  }

 private:
  struct Node {
    SigPtr leaf;
    std::shared_ptr<const Signature> left;
    std::shared_ptr<const Signature> right;
  };

  void require_sum() const {
    if (is_leaf()) throw Error(Errc::WrongSignature, sig()->name() + " is not a sum");
  }

  std::shared_ptr<const Node> node_;
};

inline Signature leaf(SigPtr s) { return Signature::leaf(std::move(s)); }
inline Signature sum(Signature a, Signature b) {
  return Signature::sum(std::move(a), std::move(b));
}

/// A concrete event occurrence. `path` locates the event's leaf signature
/// inside whatever sum it is currently viewed in (empty: the leaf itself).
struct EventInstance {
  SigPtr sig;
  std::size_t kind = 0;
  std::vector<Value> args;
  std::vector<Side> path;

  const EventKind& info() const { return sig->kind(kind); }
  const std::string& name() const { return info().name; }
  Type answer() const { return info().answer; }

  std::string to_string() const {
    std::string out = name() + "(";
    for (std::size_t i = 0; i < args.size(); ++i) {
      if (i) out += ',';
      out += args[i].to_string();
    }
    return out + ")";
  }

  friend bool operator==(const EventInstance& a, const EventInstance& b) {
    return a.kind == b.kind && a.path == b.path && a.args == b.args && same_sig(a.sig, b.sig);
  }
};

inline EventInstance make_event(const SigPtr& sig, std::string_view kind_name,
                                std::vector<Value> args = {}) {
  auto idx = sig->find(kind_name);
  if (!idx) throw Error(Errc::NotFound, std::string(kind_name) + " is not a kind of " + sig->name());
  const auto& k = sig->kind(*idx);
  if (k.params.size() != args.size()) {
    throw Error(Errc::AnswerTagMismatch, k.name + " expects " + std::to_string(k.params.size()) +
                                             " arguments");
  }
  for (std::size_t i = 0; i < args.size(); ++i) check_tag(k.params[i], args[i], k.name);
  return EventInstance{sig, *idx, std::move(args), {}};
}

/// Follows `path` from `s`; returns nullptr if the path leaves the sum.
inline const Signature* follow(const Signature& s, const std::vector<Side>& path,
                               std::size_t from = 0) {
  const Signature* cur = &s;
  for (std::size_t i = from; i < path.size(); ++i) {
    if (cur->is_leaf()) return nullptr;
    cur = &cur->child(path[i]);
  }
  return cur;
}

inline bool belongs_to(const Signature& s, const EventInstance& e) {
  const Signature* target = follow(s, e.path);
  return target && target->is_leaf() && same_sig(target->sig(), e.sig);
}

struct SubeventWitness {
  Signature outer;
  Signature inner;
  std::vector<Side> path;

  static SubeventWitness identity(const Signature& s) { return {s, s, {}}; }
};

inline EventInstance inject(const SubeventWitness& w, EventInstance e) {
  if (!belongs_to(w.inner, e)) {
    throw Error(Errc::WrongSignature, e.to_string() + " is not an event of " + w.inner.to_string());
  }
  std::vector<Side> path = w.path;
  path.insert(path.end(), e.path.begin(), e.path.end());
  e.path = std::move(path);
  return e;
}

inline EventInstance inject_left(EventInstance e) {
  e.path.insert(e.path.begin(), Side::Left);
  return e;
}
inline EventInstance inject_right(EventInstance e) {
  e.path.insert(e.path.begin(), Side::Right);
  return e;
}

struct Projected {
  Side side;
  EventInstance event;
};

inline Projected project(const Signature& s, const EventInstance& e) {
  if (s.is_leaf() || e.path.empty() || !belongs_to(s, e)) {
    throw Error(Errc::WrongSignature, e.to_string() + " is not an event of " + s.to_string());
  }
  EventInstance inner = e;
  inner.path.erase(inner.path.begin());
  return {e.path.front(), std::move(inner)};
}

enum class AmbiguityPolicy { Reject, Leftmost };

/// Path from `outer` to an occurrence of `inner`. Occurrences are searched in
/// preorder (leftmost-outermost first).
inline SubeventWitness derive_witness(const Signature& inner, const Signature& outer,
                                      AmbiguityPolicy policy = AmbiguityPolicy::Reject) {
  std::vector<std::vector<Side>> found;
  std::vector<Side> path;
  auto search = [&](auto&& self, const Signature& s) -> void {
    if (s == inner) {
      found.push_back(path);
      return;
    }
    if (s.is_leaf()) return;
    path.push_back(Side::Left);
    self(self, s.left());
    path.back() = Side::Right;
    self(self, s.right());
    path.pop_back();
  };
  search(search, outer);
  if (found.empty()) {
    throw Error(Errc::NotFound, inner.to_string() + " does not occur in " + outer.to_string());
  }
  if (found.size() > 1 && policy == AmbiguityPolicy::Reject) {
    throw Error(Errc::Ambiguous, inner.to_string() + " occurs " + std::to_string(found.size()) +
                                     " times in " + outer.to_string());
  }
  return {outer, inner, found.front()};
}

// Standard signatures.

inline const SigPtr& io_sig() {
  static const SigPtr s = make_sig("IOE", {{"Input", {}, Type::nat()},
                                           {"Output", {Type::nat()}, Type::unit()}});
  return s;
}

inline const SigPtr& empty_sig() {
  static const SigPtr s = make_sig("EmptyE", {});
  return s;
}

inline SigPtr state_sig(Type state) {
  return make_sig("StateE", {{"Get", {}, state}, {"Put", {state}, Type::unit()}});
}

inline SigPtr map_default_sig(std::string name, Type key, Type value, Value default_value) {
  check_tag(value, default_value, "map default");
  return make_sig(std::move(name),
                  {{"Insert", {key, value}, Type::unit()},
                   {"LookupDefault", {key}, value},
                   {"Remove", {key}, Type::unit()}},
                  std::move(default_value));
}

inline EventInstance input_event() { return make_event(io_sig(), "Input"); }
inline EventInstance output_event(std::uint64_t n) {
  return make_event(io_sig(), "Output", {Value::nat(n)});
}

}  // namespace itree

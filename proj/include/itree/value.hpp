#pragma once

// Dynamically tagged values. Every answer, result and event argument in the
// library is a Value; the tag plays the role of the answer type of an event.

#include <compare>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <utility>
#include <variant>

#include "itree/error.hpp"

namespace itree {

enum class Kind : std::uint8_t {
  Unit,
  Nat,
  Bool,
  Label,
  Pair,
  Str,
  Map,
  // Answer tag of halting events. No value ever carries it.
  Empty,
  // Internal: carries an ITree through iteration state (interp, mrec).
  Tree,
  // Wildcard accepted by polymorphic KTrees; never the tag of a value.
  Any,
};

inline std::string_view kind_name(Kind k) {
  switch (k) {
    case Kind::Unit: return "Unit";
    case Kind::Nat: return "Nat";
    case Kind::Bool: return "Bool";
    case Kind::Label: return "Label";
    case Kind::Pair: return "Pair";
    case Kind::Str: return "Str";
    case Kind::Map: return "Map";
    case Kind::Empty: return "Empty";
    case Kind::Tree: return "Tree";
    case Kind::Any: return "Any";
  }
  return "?";
}

/// Shallow type tag. `bound` is only meaningful for labels.
struct Type {
  Kind kind = Kind::Unit;
  std::uint64_t bound = 0;

  static constexpr Type unit() { return {Kind::Unit, 0}; }
  static constexpr Type nat() { return {Kind::Nat, 0}; }
  static constexpr Type boolean() { return {Kind::Bool, 0}; }
  static constexpr Type label(std::uint64_t bound) { return {Kind::Label, bound}; }
  static constexpr Type pair() { return {Kind::Pair, 0}; }
  static constexpr Type str() { return {Kind::Str, 0}; }
  static constexpr Type map() { return {Kind::Map, 0}; }
  static constexpr Type empty() { return {Kind::Empty, 0}; }
  static constexpr Type any() { return {Kind::Any, 0}; }

  friend bool operator==(const Type&, const Type&) = default;

  std::string to_string() const {
    if (kind == Kind::Label) return "Label(" + std::to_string(bound) + ")";
    return std::string(kind_name(kind));
  }
};

struct TreeBox;  // defined in itree.hpp

class Value;
using ValueMap = std::map<Value, Value>;

class Value {
 public:
  Value() = default;  // unit

  static Value unit() { return Value(); }
  static Value nat(std::uint64_t n) {
    Value v;
    v.kind_ = Kind::Nat;
    v.a_ = n;
    return v;
  }
  static Value boolean(bool b) {
    Value v;
    v.kind_ = Kind::Bool;
    v.a_ = b ? 1 : 0;
    return v;
  }
  static Value label(std::uint64_t index, std::uint64_t bound) {
    if (index >= bound) {
      throw Error(Errc::BoundViolation, "label " + std::to_string(index) + " out of bound " +
                                            std::to_string(bound));
    }
    Value v;
    v.kind_ = Kind::Label;
    v.a_ = index;
    v.b_ = bound;
    return v;
  }
  static Value pair(Value first, Value second) {
    Value v;
    v.kind_ = Kind::Pair;
    v.ptr_ = std::make_shared<const std::pair<Value, Value>>(std::move(first), std::move(second));
    return v;
  }
  static Value str(std::string s) {
    Value v;
    v.kind_ = Kind::Str;
    v.ptr_ = std::make_shared<const std::string>(std::move(s));
    return v;
  }
  static Value map(ValueMap m) {
    Value v;
    v.kind_ = Kind::Map;
    v.ptr_ = std::make_shared<const ValueMap>(std::move(m));
    return v;
  }
  static Value tree(std::shared_ptr<const TreeBox> box) {
    Value v;
    v.kind_ = Kind::Tree;
    v.ptr_ = std::move(box);
    return v;
  }

  Kind kind() const noexcept { return kind_; }
  Type type() const noexcept { return {kind_, kind_ == Kind::Label ? b_ : 0}; }

  std::uint64_t as_nat() const {
    expect(Kind::Nat);
    return a_;
  }
  bool as_bool() const {
    expect(Kind::Bool);
    return a_ != 0;
  }
  std::uint64_t label_index() const {
    expect(Kind::Label);
    return a_;
  }
  std::uint64_t label_bound() const {
    expect(Kind::Label);
    return b_;
  }
  const Value& first() const {
    expect(Kind::Pair);
    return std::get<PairPtr>(ptr_)->first;
  }
  const Value& second() const {
    expect(Kind::Pair);
    return std::get<PairPtr>(ptr_)->second;
  }
  const std::string& as_str() const {
    expect(Kind::Str);
    return *std::get<StrPtr>(ptr_);
  }
  const ValueMap& as_map() const {
    expect(Kind::Map);
    return *std::get<MapPtr>(ptr_);
  }
  const std::shared_ptr<const TreeBox>& as_tree_box() const {
    expect(Kind::Tree);
    return std::get<TreePtr>(ptr_);
  }

  friend std::strong_ordering operator<=>(const Value& x, const Value& y) {
    if (x.kind_ != y.kind_) return x.kind_ <=> y.kind_;
    switch (x.kind_) {
      case Kind::Unit: return std::strong_ordering::equal;
      case Kind::Nat:
      case Kind::Bool: return x.a_ <=> y.a_;
      case Kind::Label:
        if (auto c = x.b_ <=> y.b_; c != 0) return c;
        return x.a_ <=> y.a_;
      case Kind::Pair: {
        if (auto c = x.first() <=> y.first(); c != 0) return c;
        return x.second() <=> y.second();
      }
      case Kind::Str: return x.as_str().compare(y.as_str()) <=> 0;
      case Kind::Map: {
        const auto& a = x.as_map();
        const auto& b = y.as_map();
        auto i = a.begin();
        auto j = b.begin();
        for (; i != a.end() && j != b.end(); ++i, ++j) {
          if (auto c = i->first <=> j->first; c != 0) return c;
          if (auto c = i->second <=> j->second; c != 0) return c;
        }
        return a.size() <=> b.size();
      }
      case Kind::Tree: {
        auto* p = std::get<TreePtr>(x.ptr_).get();
        auto* q = std::get<TreePtr>(y.ptr_).get();
        return std::compare_three_way{}(p, q);
      }
      case Kind::Empty:
      case Kind::Any: return std::strong_ordering::equal;
    }
    return std::strong_ordering::equal;
  }
  friend bool operator==(const Value& x, const Value& y) { return (x <=> y) == 0; }

  std::string to_string() const {
    std::ostringstream os;
    print(os);
    return os.str();
  }

  void print(std::ostream& os) const {
    switch (kind_) {
      case Kind::Unit: os << "tt"; break;
      case Kind::Nat: os << a_; break;
      case Kind::Bool: os << (a_ ? "true" : "false"); break;
      case Kind::Label: os << 'l' << a_; break;
      case Kind::Pair:
        os << '(';
        first().print(os);
        os << ',';
        second().print(os);
        os << ')';
        break;
      case Kind::Str: os << as_str(); break;
      case Kind::Map: {
        os << '{';
        bool sep = false;
        for (const auto& [k, v] : as_map()) {
          if (sep) os << ',';
          sep = true;
          k.print(os);
          os << '=';
          v.print(os);
        }
        os << '}';
        break;
      }
      case Kind::Tree: os << "<tree>"; break;
      case Kind::Empty:
      case Kind::Any: os << '?'; break;
    }
  }

 private:
  using PairPtr = std::shared_ptr<const std::pair<Value, Value>>;
  using StrPtr = std::shared_ptr<const std::string>;
  using MapPtr = std::shared_ptr<const ValueMap>;
  using TreePtr = std::shared_ptr<const TreeBox>;

  void expect(Kind k) const {
    if (kind_ != k) {
      throw Error(Errc::AnswerTagMismatch, "expected " + std::string(kind_name(k)) + ", got " +
                                               std::string(kind_name(kind_)) + " " + to_string());
    }
  }

  Kind kind_ = Kind::Unit;
  std::uint64_t a_ = 0;
  std::uint64_t b_ = 0;
  std::variant<std::monostate, PairPtr, StrPtr, MapPtr, TreePtr> ptr_;
};

inline std::ostream& operator<<(std::ostream& os, const Value& v) {
  v.print(os);
  return os;
}

/// True when `v` is acceptable where `t` is expected.
inline bool matches(const Type& t, const Value& v) {
  if (t.kind == Kind::Any) return v.kind() != Kind::Tree;
  if (t.kind == Kind::Empty) return false;
  if (t.kind != v.kind()) return false;
  return t.kind != Kind::Label || t.bound == v.label_bound();
}

inline void check_tag(const Type& t, const Value& v, std::string_view where) {
  if (!matches(t, v)) {
    throw Error(Errc::AnswerTagMismatch, std::string(where) + ": expected " + t.to_string() +
                                             ", got " + v.to_string());
  }
}

// Sums A+B are encoded as Pair(Bool isLeft, payload).

inline Value inl(Value v) { return Value::pair(Value::boolean(true), std::move(v)); }
inline Value inr(Value v) { return Value::pair(Value::boolean(false), std::move(v)); }

inline bool is_sum(const Value& v) {
  return v.kind() == Kind::Pair && v.first().kind() == Kind::Bool;
}
inline bool is_inl(const Value& v) {
  if (!is_sum(v)) throw Error(Errc::AnswerTagMismatch, "expected a sum value, got " + v.to_string());
  return v.first().as_bool();
}
inline const Value& sum_payload(const Value& v) {
  if (!is_sum(v)) throw Error(Errc::AnswerTagMismatch, "expected a sum value, got " + v.to_string());
  return v.second();
}

// Natural-number arithmetic on 64 bits: subtraction truncates at zero,
// addition and multiplication saturate at the maximum.

inline std::uint64_t nat_add(std::uint64_t a, std::uint64_t b) {
  std::uint64_t r = a + b;
  return r < a ? std::numeric_limits<std::uint64_t>::max() : r;
}
inline std::uint64_t nat_sub(std::uint64_t a, std::uint64_t b) { return a > b ? a - b : 0; }
inline std::uint64_t nat_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a) {
    return std::numeric_limits<std::uint64_t>::max();
  }
  return a * b;
}

}  // namespace itree

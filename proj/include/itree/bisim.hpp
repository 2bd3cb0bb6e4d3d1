#pragma once

// Bounded strong bisimulation and weak bisimulation up to Tau (eutt).
//
// Both checkers explore the pair of trees depth-first with an explicit stack,
// so very long Tau chains do not grow the native stack. A verdict is Proven
// when every explored path closes inside the budgets, Refuted with a
// replayable path when some pair of heads can never be related, and Unknown
// otherwise.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "itree/combinators.hpp"
#include "itree/itree.hpp"
#include "itree/value.hpp"

namespace itree {

enum class UnknownReason : std::uint8_t { TauBudget, DepthBudget, AnswerSpaceTooLarge };

inline std::string_view reason_name(UnknownReason r) {
  switch (r) {
    case UnknownReason::TauBudget: return "TauBudget";
    case UnknownReason::DepthBudget: return "DepthBudget";
    case UnknownReason::AnswerSpaceTooLarge: return "AnswerSpaceTooLarge";
  }
  return "?";
}

struct WitnessStep {
  enum Kind : std::uint8_t { TauLeft, TauRight, TauBoth, Answer };
  Kind kind = TauBoth;
  Value answer;        // Answer only
  std::string event;   // Answer only: the event both sides exposed
};

class Verdict {
 public:
  enum Status : std::uint8_t { Proven, Refuted, Unknown };

  static Verdict proven() { return Verdict(Proven); }
  static Verdict unknown(UnknownReason r) {
    Verdict v(Unknown);
    v.reason_ = r;
    return v;
  }
  static Verdict refuted(std::vector<WitnessStep> path, std::string detail) {
    Verdict v(Refuted);
    v.witness_ = std::move(path);
    v.detail_ = std::move(detail);
    return v;
  }

  Status status() const { return status_; }
  bool is_proven() const { return status_ == Proven; }
  bool is_refuted() const { return status_ == Refuted; }
  bool is_unknown() const { return status_ == Unknown; }
  UnknownReason reason() const { return reason_; }
  const std::vector<WitnessStep>& witness() const { return witness_; }
  const std::string& detail() const { return detail_; }

  /// The witness as a trace string: the events and answers on the path,
  /// followed by the mismatch found there.
  std::string witness_trace() const {
    std::string out;
    for (const auto& s : witness_) {
      if (s.kind != WitnessStep::Answer) continue;
      out += s.event + "=" + s.answer.to_string() + " ; ";
    }
    return out + detail_;
  }

  std::string to_string() const {
    switch (status_) {
      case Proven: return "Proven";
      case Refuted: return "Refuted: " + witness_trace();
      case Unknown: return "Unknown(" + std::string(reason_name(reason_)) + ")";
    }
    return "?";
  }

 private:
  explicit Verdict(Status s) : status_(s) {}
  Status status_;
  UnknownReason reason_ = UnknownReason::DepthBudget;
  std::vector<WitnessStep> witness_;
  std::string detail_;
};

/// Aggregation: Refuted dominates, then Unknown, then Proven.
inline Verdict combine(const Verdict& a, const Verdict& b) {
  auto rank = [](const Verdict& v) {
    return v.is_refuted() ? 2 : v.is_unknown() ? 1 : 0;
  };
  return rank(b) > rank(a) ? b : a;
}

struct RelSpec {
  std::string name;
  std::function<bool(const Value&, const Value&)> relates;

  static RelSpec eq() {
    return {"eq", [](const Value& a, const Value& b) { return a == b; }};
  }
  static RelSpec tt() {
    return {"TT", [](const Value&, const Value&) { return true; }};
  }
};

struct CheckOptions {
  std::vector<std::uint64_t> nat_probe{0, 1, 2, 9, 17};
  /// Demand exhaustive answer spaces: Nat answers then yield
  /// Unknown(AnswerSpaceTooLarge) instead of being probed.
  bool exact = false;
  /// Cap on the number of node pairs examined (0: none). Hitting it gives
  /// Unknown(DepthBudget) unless a refutation was already found.
  std::uint64_t max_steps = 0;
};

/// Answers tried at a Vis node, or nullopt when the space cannot be covered.
inline std::optional<std::vector<Value>> answer_space(const Type& t, const CheckOptions& opts = {}) {
  switch (t.kind) {
    case Kind::Unit: return std::vector<Value>{Value::unit()};
    case Kind::Bool: return std::vector<Value>{Value::boolean(false), Value::boolean(true)};
    case Kind::Label: {
      std::vector<Value> out;
      for (std::uint64_t i = 0; i < t.bound; ++i) out.push_back(Value::label(i, t.bound));
      return out;
    }
    case Kind::Nat: {
      if (opts.exact) return std::nullopt;
      std::vector<Value> out;
      for (auto n : opts.nat_probe) out.push_back(Value::nat(n));
      return out;
    }
    case Kind::Empty: return std::vector<Value>{};
    default: return std::nullopt;
  }
}

namespace detail {

inline std::string head_string(const Observation& o) {
  if (const auto* r = std::get_if<RetO>(&o)) return "ret " + r->value.to_string();
  if (std::holds_alternative<TauO>(o)) return "tau";
  return std::get<VisO>(o).event.to_string() + "?";
}

struct Pending {
  ITree a;
  ITree b;
  std::uint64_t depth;
  std::uint64_t budget;
};

struct Frame {
  WitnessStep step;
  std::optional<Pending> item;
  std::vector<std::pair<WitnessStep, Pending>> kids;
  std::size_t next = 0;
};

inline std::vector<WitnessStep> path_of(const std::vector<Frame>& stack) {
  std::vector<WitnessStep> out;
  for (std::size_t i = 1; i < stack.size(); ++i) out.push_back(stack[i].step);
  return out;
}

// Shared driver. `strong` disables one-sided Tau stripping.
inline Verdict check_pair(const RelSpec& r, const ITree& t1, const ITree& t2,
                          std::uint64_t tau_budget, std::uint64_t depth, bool strong,
                          const CheckOptions& opts) {
  std::vector<Frame> stack;
  stack.push_back(Frame{{}, Pending{t1, t2, depth, tau_budget}, {}, 0});
  std::optional<Verdict> unknown;
  auto note = [&](UnknownReason why) {
    if (!unknown) unknown = Verdict::unknown(why);
  };

  std::uint64_t steps = 0;
  while (!stack.empty()) {
    Frame& f = stack.back();
    if (f.item) {
      if (opts.max_steps != 0 && ++steps > opts.max_steps) return Verdict::unknown(UnknownReason::DepthBudget);
      Pending p = std::move(*f.item);
      f.item.reset();
      Observation o1 = observe(p.a);
      Observation o2 = observe(p.b);
      auto refute = [&](const std::string& why) {
        return Verdict::refuted(path_of(stack),
                                head_string(o1) + " vs " + head_string(o2) + (why.empty() ? "" : " (" + why + ")"));
      };
      bool tau1 = is_tau(o1);
      bool tau2 = is_tau(o2);
      if (tau1 && tau2) {
        if (p.depth == 0) {
          note(UnknownReason::DepthBudget);
        } else {
          f.kids.push_back({{WitnessStep::TauBoth, {}, {}},
                            {std::get<TauO>(o1).next, std::get<TauO>(o2).next, p.depth - 1, tau_budget}});
        }
      } else if (tau1 || tau2) {
        if (strong) return refute("Tau count differs");
        if (p.budget == 0) {
          note(UnknownReason::TauBudget);
        } else if (tau1) {
          f.kids.push_back({{WitnessStep::TauLeft, {}, {}},
                            {std::get<TauO>(o1).next, p.b, p.depth, p.budget - 1}});
        } else {
          f.kids.push_back({{WitnessStep::TauRight, {}, {}},
                            {p.a, std::get<TauO>(o2).next, p.depth, p.budget - 1}});
        }
      } else if (is_ret(o1) && is_ret(o2)) {
        if (!r.relates(std::get<RetO>(o1).value, std::get<RetO>(o2).value)) {
          return refute(r.name + " does not relate the results");
        }
      } else if (is_vis(o1) && is_vis(o2)) {
        const auto& v1 = std::get<VisO>(o1);
        const auto& v2 = std::get<VisO>(o2);
        if (!(v1.event == v2.event)) return refute("events differ");
        auto answers = answer_space(v1.event.answer(), opts);
        if (!answers) {
          note(UnknownReason::AnswerSpaceTooLarge);
        } else if (!answers->empty() && p.depth == 0) {
          note(UnknownReason::DepthBudget);
        } else {
          std::string ev = v1.event.to_string();
          for (const auto& x : *answers) {
            f.kids.push_back({{WitnessStep::Answer, x, ev},
                              {v1.resume(x), v2.resume(x), p.depth - 1, tau_budget}});
          }
        }
      } else {
        return refute("shapes differ");
      }
      continue;
    }
    if (f.next < f.kids.size()) {
      auto& kid = f.kids[f.next++];
      WitnessStep step = std::move(kid.first);
      Pending next = std::move(kid.second);
      stack.push_back(Frame{std::move(step), std::move(next), {}, 0});
      continue;
    }
    stack.pop_back();
  }
  return unknown ? *unknown : Verdict::proven();
}

}  // namespace detail

/// Node-exact comparison, Tau counts included.
inline Verdict strong_bisim(const ITree& t1, const ITree& t2, std::uint64_t depth,
                            const CheckOptions& opts = {}) {
  return detail::check_pair(RelSpec::eq(), t1, t2, 0, depth, true, opts);
}

/// Weak bisimulation with leaves related by `r`.
inline Verdict eutt(const RelSpec& r, const ITree& t1, const ITree& t2, std::uint64_t tau_budget,
                    std::uint64_t depth, const CheckOptions& opts = {}) {
  return detail::check_pair(r, t1, t2, tau_budget, depth, false, opts);
}

/// Pointwise eutt over `inputs`.
inline Verdict ktree_equiv(const RelSpec& r, const KTree& f, const KTree& g,
                           const std::vector<Value>& inputs, std::uint64_t tau_budget,
                           std::uint64_t depth, const CheckOptions& opts = {}) {
  Verdict acc = Verdict::proven();
  for (const auto& x : inputs) {
    acc = combine(acc, eutt(r, f(x), g(x), tau_budget, depth, opts));
    if (acc.is_refuted()) {
      return Verdict::refuted(acc.witness(), "at input " + x.to_string() + ": " + acc.detail());
    }
  }
  return acc;
}

/// Replays a Refuted witness and confirms that both trees reach heads that
/// cannot be related. For strong checks a Tau facing a non-Tau also counts.
inline bool replay(const RelSpec& r, ITree t1, ITree t2, const std::vector<WitnessStep>& path,
                   bool strong = false) {
  for (const auto& s : path) {
    Observation o1 = observe(t1);
    Observation o2 = observe(t2);
    switch (s.kind) {
      case WitnessStep::TauLeft:
        if (!is_tau(o1)) return false;
        t1 = std::get<TauO>(o1).next;
        break;
      case WitnessStep::TauRight:
        if (!is_tau(o2)) return false;
        t2 = std::get<TauO>(o2).next;
        break;
      case WitnessStep::TauBoth:
        if (!is_tau(o1) || !is_tau(o2)) return false;
        t1 = std::get<TauO>(o1).next;
        t2 = std::get<TauO>(o2).next;
        break;
      case WitnessStep::Answer:
        if (!is_vis(o1) || !is_vis(o2)) return false;
        if (!(std::get<VisO>(o1).event == std::get<VisO>(o2).event)) return false;
        t1 = std::get<VisO>(o1).resume(s.answer);
        t2 = std::get<VisO>(o2).resume(s.answer);
        break;
    }
  }
  Observation o1 = observe(t1);
  Observation o2 = observe(t2);
  if (is_tau(o1) || is_tau(o2)) return strong && is_tau(o1) != is_tau(o2);
  if (is_ret(o1) && is_ret(o2)) return !r.relates(std::get<RetO>(o1).value, std::get<RetO>(o2).value);
  if (is_vis(o1) && is_vis(o2)) return !(std::get<VisO>(o1).event == std::get<VisO>(o2).event);
  return true;
}

}  // namespace itree

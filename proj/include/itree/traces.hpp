#pragma once

// Finite traces of interaction trees, trace membership, bounded enumeration,
// and trace refinement / equivalence.

#include <cstdint>
#include <deque>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "itree/bisim.hpp"
#include "itree/itree.hpp"

namespace itree {

/// A sequence of answered events closed by one of three terminals:
/// End (partial trace), Ret v, or a pending event the tree waits on.
struct Trace {
  enum class Terminal : std::uint8_t { End, Ret, EventEnd };

  std::vector<std::pair<EventInstance, Value>> steps;
  Terminal terminal = Terminal::End;
  Value result;                         // Terminal::Ret
  std::optional<EventInstance> pending;  // Terminal::EventEnd

  static Trace end() { return {}; }
  static Trace ret(Value v) {
    Trace t;
    t.terminal = Terminal::Ret;
    t.result = std::move(v);
    return t;
  }
  static Trace event_end(EventInstance e) {
    Trace t;
    t.terminal = Terminal::EventEnd;
    t.pending = std::move(e);
    return t;
  }
  static Trace response(EventInstance e, Value answer, Trace rest) {
    rest.steps.insert(rest.steps.begin(), {std::move(e), std::move(answer)});
    return rest;
  }

  /// Number of events, the pending one included.
  std::size_t events() const { return steps.size() + (terminal == Terminal::EventEnd ? 1 : 0); }

  std::string to_string() const {
    std::string out;
    for (const auto& [e, x] : steps) out += e.to_string() + "=" + x.to_string() + " ; ";
    switch (terminal) {
      case Terminal::End: return out + "end";
      case Terminal::Ret: return out + "ret " + result.to_string();
      case Terminal::EventEnd: return out + pending->to_string() + "?";
    }
    return out;
  }
};

enum class TraceMatch : std::uint8_t { No, Yes, Unknown };

/// Decides whether `tr` is a trace of `t`, skipping at most `tau_budget`
/// Taus before each observation.
inline TraceMatch is_trace_of(ITree t, const Trace& tr, std::uint64_t tau_budget) {
  std::size_t i = 0;
  for (;;) {
    bool at_terminal = i == tr.steps.size();
    if (at_terminal && tr.terminal == Trace::Terminal::End) return TraceMatch::Yes;
    Burned b = burn_counted(tau_budget, std::move(t));
    Observation o = observe(b.tree);
    if (is_tau(o)) return TraceMatch::Unknown;
    if (at_terminal && tr.terminal == Trace::Terminal::Ret) {
      const auto* r = std::get_if<RetO>(&o);
      return r && r->value == tr.result ? TraceMatch::Yes : TraceMatch::No;
    }
    const auto* v = std::get_if<VisO>(&o);
    if (!v) return TraceMatch::No;
    if (at_terminal) return v->event == *tr.pending ? TraceMatch::Yes : TraceMatch::No;
    const auto& [e, x] = tr.steps[i];
    if (!(v->event == e) || !matches(e.answer(), x)) return TraceMatch::No;
    t = v->resume(x);
    ++i;
  }
}

struct TraceSet {
  std::vector<Trace> traces;  // breadth-first by event count
  std::set<std::string> keys;
  bool frontier = false;       // some Vis node lay beyond the event depth
  bool tau_exhausted = false;  // some subtree exposed no head within the Tau budget

  bool contains(const std::string& key) const { return keys.count(key) != 0; }
  bool truncated() const { return frontier || tau_exhausted; }

  void add(Trace t) {
    std::string k = t.to_string();
    if (keys.insert(k).second) traces.push_back(std::move(t));
  }
};

/// All traces of `t` with at most `event_depth` events. A subtree that exposes
/// no head within `tau_budget` contributes only `end`, like a silent loop.
inline TraceSet enumerate_traces(const ITree& t, std::uint64_t event_depth, std::uint64_t tau_budget,
                                 const CheckOptions& opts = {}) {
  struct Item {
    Trace prefix;
    ITree tree;
    std::uint64_t left;
  };
  TraceSet out;
  std::deque<Item> queue;
  queue.push_back({Trace::end(), t, event_depth});
  while (!queue.empty()) {
    Item it = std::move(queue.front());
    queue.pop_front();
    out.add(it.prefix);
    Burned b = burn_counted(tau_budget, std::move(it.tree));
    Observation o = observe(b.tree);
    if (is_tau(o)) {
      out.tau_exhausted = true;
      continue;
    }
    if (const auto* r = std::get_if<RetO>(&o)) {
      Trace done = it.prefix;
      done.terminal = Trace::Terminal::Ret;
      done.result = r->value;
      out.add(std::move(done));
      continue;
    }
    const auto& v = std::get<VisO>(o);
    if (it.left == 0) {
      out.frontier = true;
      continue;
    }
    Trace waiting = it.prefix;
    waiting.terminal = Trace::Terminal::EventEnd;
    waiting.pending = v.event;
    out.add(std::move(waiting));
    auto answers = answer_space(v.event.answer(), opts);
    if (!answers) {
      throw Error(Errc::AnswerSpaceTooLarge,
                  "cannot enumerate answers of type " + v.event.answer().to_string());
    }
    for (const auto& x : *answers) {
      Trace next = it.prefix;
      next.steps.emplace_back(v.event, x);
      queue.push_back({std::move(next), v.resume(x), it.left - 1});
    }
  }
  return out;
}

/// Every trace of `t` is a trace of `u`, at the given budgets.
inline Verdict trace_refines(const ITree& t, const ITree& u, std::uint64_t event_depth,
                             std::uint64_t tau_budget, const CheckOptions& opts = {}) {
  TraceSet lhs = enumerate_traces(t, event_depth, tau_budget, opts);
  TraceSet rhs = enumerate_traces(u, event_depth, tau_budget, opts);
  for (const auto& tr : lhs.traces) {
    std::string key = tr.to_string();
    if (rhs.contains(key)) continue;
    if (rhs.tau_exhausted) return Verdict::unknown(UnknownReason::TauBudget);
    return Verdict::refuted({}, key + " (not a trace of the other tree)");
  }
  return lhs.frontier ? Verdict::unknown(UnknownReason::DepthBudget) : Verdict::proven();
}

inline Verdict trace_equiv(const ITree& t, const ITree& u, std::uint64_t event_depth,
                           std::uint64_t tau_budget, const CheckOptions& opts = {}) {
  Verdict fwd = trace_refines(t, u, event_depth, tau_budget, opts);
  if (fwd.is_refuted()) return fwd;
  return combine(fwd, trace_refines(u, t, event_depth, tau_budget, opts));
}

}  // namespace itree

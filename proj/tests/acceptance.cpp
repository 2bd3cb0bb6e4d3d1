// Acceptance run: one PASS/FAIL line per criterion. Exit status is the number
// of failing criteria.

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "itree/compiler.hpp"
#include "itree/traces.hpp"
#include "support/asm_gen.hpp"
#include "support/cli_cases.hpp"
#include "support/gen.hpp"
#include "support/imp_oracle.hpp"

using namespace itree;

namespace {

// Pinned limits.
constexpr double kMonadSeconds = 10.0;
constexpr double kCategorySeconds = 10.0;
constexpr double kCompilerSeconds = 300.0;
constexpr double kIterUnknownRate = 0.01;
constexpr std::uint64_t kLawDepth = 200;
constexpr std::uint64_t kIterFuel = 500;

struct Outcome {
  bool pass = true;
  std::string detail;

  void fail(const std::string& why) {
    if (pass) detail = why;
    pass = false;
  }
  void expect(bool ok, const std::string& why) {
    if (!ok) fail(why);
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Value nat(std::uint64_t n) { return Value::nat(n); }

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

const std::vector<std::string>& corpus() {
  static const std::vector<std::string> names{"factorial", "fib",   "gcd",   "sum_to",    "nested_while",
                                              "max3",      "power", "collatz", "countdown", "swap"};
  return names;
}

imp::StmtPtr corpus_program(const std::string& name) {
  return imp::parse_imp(slurp(std::string(ITREE_SAMPLES_DIR) + "/" + name + ".imp"));
}

// 1 ------------------------------------------------------------------------------

Outcome monad_laws() {
  auto t0 = std::chrono::steady_clock::now();
  Outcome out;
  gen::Rng rng(1001);
  Kont ret_k = [](const Value& x) { return ret(x); };
  for (int i = 0; i < 1000 && out.pass; ++i) {
    gen::Shape s = gen::random_tree(rng);
    ITree t = gen::build(s);
    KTree k = gen::random_kont(rng);
    KTree h = gen::random_kont(rng);
    Value v = nat(gen::pick(rng, 4));
    std::string at = " (tree " + std::to_string(i) + ")";

    out.expect(strong_bisim(itree::bind(ret(v), k.kont()), k(v), kLawDepth).is_proven(), "left identity" + at);
    out.expect(strong_bisim(itree::bind(t, ret_k), t, kLawDepth).is_proven(), "right identity" + at);
    ITree lhs = itree::bind(itree::bind(t, k.kont()), h.kont());
    ITree rhs = itree::bind(t, [k, h](const Value& y) { return itree::bind(k(y), h.kont()); });
    out.expect(strong_bisim(lhs, rhs, kLawDepth).is_proven(), "associativity" + at);

    // bind over Tau is one Tau step, exactly.
    Observation o = observe(itree::bind(tau(t), k.kont()));
    out.expect(is_tau(o) && strong_bisim(std::get<TauO>(o).next, itree::bind(t, k.kont()), kLawDepth).is_proven(),
               "bind of tau" + at);
    // bind over Vis pushes the continuation under the event.
    EventInstance e{gen::sig3(), gen::pick(rng, 3), {}, {}};
    KTree k0 = gen::random_kont(rng);
    Kont kk = [k0](const Value& x) { return k0(nat(gen::answer_index(x))); };
    ITree bv = itree::bind(vis(e, kk), k.kont());
    ITree vb = vis(e, [kk, k](const Value& x) { return itree::bind(kk(x), k.kont()); });
    out.expect(strong_bisim(bv, vb, kLawDepth).is_proven(), "bind of vis" + at);
    // Tau is invisible up to weak bisimulation.
    out.expect(eutt(RelSpec::eq(), tau(t), t, kLawDepth, kLawDepth).is_proven(), "tau elimination" + at);
  }
  double secs = seconds_since(t0);
  out.expect(secs < kMonadSeconds, "took " + std::to_string(secs) + " s");
  if (out.pass) out.detail = "1000 trees, 6 laws, " + std::to_string(secs) + " s";
  return out;
}

// 2 ------------------------------------------------------------------------------

// A leaf generator producing answers of type `t`.
gen::LeafFn answer_leaf(Type t) {
  return [t](gen::Rng& r) {
    switch (t.kind) {
      case Kind::Bool: return Value::boolean(gen::pick(r, 2) == 1);
      case Kind::Label: return Value::label(gen::pick(r, t.bound), t.bound);
      default: return Value::unit();
    }
  };
}

const SigPtr& coin_sig() {
  static const SigPtr s = make_sig("CoinE", {{"Heads", {}, Type::unit()}, {"Tails", {}, Type::label(3)}});
  return s;
}

// Every event of a signature given as a list of placed leaves.
std::vector<EventInstance> events_of(const std::vector<gen::Alphabet>& alpha) {
  std::vector<EventInstance> out;
  for (const auto& a : alpha) {
    for (std::size_t k = 0; k < a.sig->kinds().size(); ++k) out.push_back({a.sig, k, {}, a.path});
  }
  return out;
}

// A random handler from the placed leaves `alpha` into trees over `tgt`.
Handler random_handler(gen::Rng& rng, const Signature& src, const std::vector<gen::Alphabet>& alpha,
                       const SigPtr& tgt) {
  auto table = std::make_shared<std::vector<std::pair<EventInstance, std::shared_ptr<const gen::Shape>>>>();
  for (const auto& e : events_of(alpha)) {
    table->push_back({e, std::make_shared<const gen::Shape>(gen::random_shape(rng, 2, tgt, answer_leaf(e.answer())))});
  }
  return {src, TargetMonad::itree_m(leaf(tgt)), [table](const EventInstance& e) -> Comp {
            for (const auto& [key, shape] : *table) {
              if (key == e) return gen::build(shape);
            }
            throw Error(Errc::UnhandledEvent, e.to_string());
          }};
}

Verdict handler_equiv(const Handler& a, const Handler& b, const std::vector<EventInstance>& events) {
  Verdict acc = Verdict::proven();
  for (const auto& e : events) {
    acc = combine(acc, eutt(RelSpec::eq(), a.apply(e).tree(), b.apply(e).tree(), kLawDepth, kLawDepth));
  }
  return acc;
}

// A random KTree on the four sums inl/inr of 0 and 1.
KTree random_sum_kont(gen::Rng& rng) {
  auto table = std::make_shared<std::vector<std::shared_ptr<const gen::Shape>>>();
  for (int i = 0; i < 4; ++i) table->push_back(std::make_shared<const gen::Shape>(gen::random_tree(rng, 3)));
  return KTree(Type::pair(), [table](const Value& v) {
    std::size_t at = (is_inl(v) ? 0 : 2) + sum_payload(v).as_nat() % 2;
    return gen::build((*table)[at]);
  });
}

Outcome category_laws() {
  auto t0 = std::chrono::steady_clock::now();
  Outcome out;
  gen::Rng rng(2001);
  std::vector<Value> nats = gen::nat_domain(4);
  std::vector<Value> sums{inl(nat(0)), inl(nat(1)), inr(nat(0)), inr(nat(1))};
  auto keq = [](const KTree& a, const KTree& b, const std::vector<Value>& dom) {
    return ktree_equiv(RelSpec::eq(), a, b, dom, kLawDepth, kLawDepth).is_proven();
  };
  std::size_t checks = 0;
  for (int i = 0; i < 200 && out.pass; ++i) {
    KTree f = gen::random_kont(rng);
    KTree g = gen::random_kont(rng);
    KTree h = gen::random_kont(rng);
    std::string at = " (instance " + std::to_string(i) + ")";
    out.expect(keq(kt_cat(kt_id(), f), f, nats), "id >>> k" + at);
    out.expect(keq(kt_cat(f, kt_id()), f, nats), "k >>> id" + at);
    out.expect(keq(kt_cat(kt_cat(f, g), h), kt_cat(f, kt_cat(g, h)), nats), "associativity" + at);
    std::uint64_t a = gen::pick(rng, 5), b = gen::pick(rng, 5);
    auto pf = [a](const Value& x) { return nat((x.as_nat() + a) % 4); };
    auto pg = [b](const Value& x) { return nat((x.as_nat() * b) % 4); };
    out.expect(keq(kt_cat(kt_pure(pf), kt_pure(pg)), kt_pure([pf, pg](const Value& x) { return pg(pf(x)); }), nats),
               "pure composition" + at);
    out.expect(keq(kt_cat(kt_inl(), kt_case(f, g)), f, nats), "inl >>> case" + at);
    out.expect(keq(kt_cat(kt_inr(), kt_case(f, g)), g, nats), "inr >>> case" + at);
    out.expect(keq(kt_case(kt_inl(), kt_inr()), kt_id(), sums), "case inl inr" + at);
    KTree on_sums = random_sum_kont(rng);
    out.expect(keq(kt_case(kt_cat(kt_inl(), on_sums), kt_cat(kt_inr(), on_sums)), on_sums, sums),
               "case uniqueness" + at);
    out.expect(keq(kt_cat(kt_case(f, g), h), kt_case(kt_cat(f, h), kt_cat(g, h)), sums), "case then cat" + at);
    out.expect(keq(kt_cat(kt_swap(), kt_swap()), kt_id(), sums), "swap involution" + at);
    out.expect(keq(kt_bimap(kt_id(), kt_id()), kt_id(), sums), "bimap id id" + at);
    out.expect(keq(kt_cat(kt_bimap(f, g), kt_case(h, h)), kt_case(kt_cat(f, h), kt_cat(g, h)), sums),
               "bimap then case" + at);
    checks += 12;
  }

  // Handler analogues, pointwise over every event of the source.
  std::vector<gen::Alphabet> bits{{gen::sig2(), {}}};
  std::vector<gen::Alphabet> coins{{coin_sig(), {}}};
  std::vector<gen::Alphabet> both{{gen::sig2(), {Side::Left}}, {coin_sig(), {Side::Right}}};
  Signature B = leaf(gen::sig2()), C = leaf(coin_sig()), BC = sum(B, C);
  for (int i = 0; i < 200 && out.pass; ++i) {
    Handler h1 = random_handler(rng, B, bits, coin_sig());
    Handler h2 = random_handler(rng, C, coins, gen::sig2());
    Handler h3 = random_handler(rng, B, bits, coin_sig());
    Handler hc = random_handler(rng, C, coins, coin_sig());
    Handler f = random_handler(rng, BC, both, gen::sig2());
    std::string at = " (handler instance " + std::to_string(i) + ")";
    auto heq = [&](const Handler& a, const Handler& b, const std::vector<gen::Alphabet>& al) {
      return handler_equiv(a, b, events_of(al)).is_proven();
    };
    out.expect(heq(handler_cat(handler_id(B), h1), h1, bits), "handler id >>> h" + at);
    out.expect(heq(handler_cat(h1, handler_id(C)), h1, bits), "handler h >>> id" + at);
    out.expect(heq(handler_cat(handler_cat(h1, h2), h3), handler_cat(h1, handler_cat(h2, h3)), bits),
               "handler associativity" + at);
    out.expect(heq(handler_cat(handler_inl(B, C), handler_case(h1, hc)), h1, bits), "handler inl >>> case" + at);
    out.expect(heq(handler_cat(handler_inr(B, C), handler_case(h1, hc)), hc, coins), "handler inr >>> case" + at);
    out.expect(heq(handler_case(handler_inl(B, C), handler_inr(B, C)), handler_id(BC), both),
               "handler case inl inr" + at);
    out.expect(heq(handler_case(handler_cat(handler_inl(B, C), f), handler_cat(handler_inr(B, C), f)), f, both),
               "handler case uniqueness" + at);
    out.expect(heq(handler_cat(handler_case(h1, hc), h2), handler_case(handler_cat(h1, h2), handler_cat(hc, h2)), both),
               "handler case then cat" + at);
    out.expect(heq(handler_bimap(handler_id(B), handler_id(C)), handler_id(BC), both), "handler bimap id id" + at);
    checks += 9;
  }
  double secs = seconds_since(t0);
  out.expect(secs < kCategorySeconds, "took " + std::to_string(secs) + " s");
  if (out.pass) out.detail = std::to_string(checks) + " law instances, " + std::to_string(secs) + " s";
  return out;
}

// 3 ------------------------------------------------------------------------------

Value continue_or_stop(gen::Rng& r, std::uint64_t i) {
  if (i > 0 && gen::pick(r, 2) == 0) return inl(nat(gen::pick(r, i)));
  return inr(nat(gen::pick(r, 3)));
}

Value codiagonal_leaf(gen::Rng& r, std::uint64_t i) {
  if (i > 0) {
    switch (gen::pick(r, 3)) {
      case 0: return inl(nat(gen::pick(r, i)));
      case 1: return inr(inl(nat(gen::pick(r, i))));
      default: break;
    }
  }
  return inr(inr(nat(gen::pick(r, 3))));
}

Outcome iterative_laws() {
  constexpr std::uint64_t states = 5;
  Outcome out;
  gen::Rng rng(3001);
  std::vector<Value> dom = gen::nat_domain(states);
  std::size_t total = 0, unknown = 0, refuted = 0;
  std::string first_refuted;
  auto check = [&](const char* law, const KTree& a, const KTree& b) {
    Verdict v = ktree_equiv(RelSpec::eq(), a, b, dom, kIterFuel, kIterFuel);
    ++total;
    if (v.is_unknown()) ++unknown;
    if (v.is_refuted()) {
      if (refuted++ == 0) first_refuted = std::string(law) + ": " + v.to_string();
    }
  };
  for (int i = 0; i < 200; ++i) {
    KTree f = gen::state_body(rng, states, 4, continue_or_stop);
    check("fixed point", iter(f), kt_cat(f, kt_case(iter(f), kt_id())));

    KTree p = gen::state_body(rng, states, 4, continue_or_stop);
    KTree g = gen::random_kont(rng, 2);
    check("parameter", kt_cat(iter(p), g), iter(kt_cat(p, kt_bimap(kt_id(), g))));

    KTree c1 = gen::state_body(rng, states, 3, continue_or_stop);
    KTree c2 = gen::state_body(rng, states, 3, continue_or_stop);
    check("composition", iter(kt_cat(c1, kt_case(c2, kt_inr()))),
          kt_cat(c1, kt_case(iter(kt_cat(c2, kt_case(c1, kt_inr()))), kt_id())));

    KTree d = gen::state_body(rng, states, 4, codiagonal_leaf);
    check("codiagonal", iter(iter(d)), iter(kt_cat(d, kt_case(kt_inl(), kt_id()))));
  }
  double rate = static_cast<double>(unknown) / static_cast<double>(total);
  out.expect(refuted == 0, first_refuted);
  out.expect(rate < kIterUnknownRate, "Unknown rate " + std::to_string(rate));
  if (out.pass) {
    out.detail = std::to_string(total) + " checks, 0 refuted, " + std::to_string(unknown) + " unknown";
  }
  return out;
}

// 4 ------------------------------------------------------------------------------

// GenE ~> itree BitE
Handler h_gen_to_bits() {
  return {leaf(gen::sig3()), TargetMonad::itree_m(leaf(gen::sig2())), [](const EventInstance& e) -> Comp {
            EventInstance tick{gen::sig2(), 0, {}, {}};
            EventInstance tock{gen::sig2(), 1, {}, {}};
            if (e.name() == "Ping") return seq(trigger(tick), ret(Value::unit()));
            if (e.name() == "Flip") return tau(trigger(tock));
            return itree::bind(trigger(tick), [tock](const Value& b) {
              if (b.as_bool()) return ret(Value::label(2, 3));
              return fmap(trigger(tock), [](const Value& c) { return Value::label(c.as_bool() ? 1 : 0, 3); });
            });
          }};
}

ITree get_t() { return trigger(inject_left(get_event(Type::nat()))); }
ITree put_t(std::uint64_t n) { return trigger(inject_left(put_event(Type::nat(), nat(n)))); }
ITree out_t(std::uint64_t n) { return trigger(inject_right(output_event(n))); }

ITree state_prog(std::uint64_t seed, int len) {
  if (len == 0) return ret(nat(seed % 5));
  gen::Rng rng(seed);
  std::uint64_t next = rng();
  switch (gen::pick(rng, 4)) {
    case 0:
      return itree::bind(get_t(), [next, len](const Value& x) { return state_prog(next ^ x.as_nat(), len - 1); });
    case 1: return seq(put_t(gen::pick(rng, 6)), lazy([next, len] { return state_prog(next, len - 1); }));
    case 2: return seq(out_t(gen::pick(rng, 6)), lazy([next, len] { return state_prog(next, len - 1); }));
    default: return tau(lazy([next, len] { return state_prog(next, len - 1); }));
  }
}

ITree run_state(const ITree& t, std::uint64_t s) { return interp_state(t, nat(s), Type::nat(), leaf(io_sig())); }

Outcome interp_laws() {
  Outcome out;
  gen::Rng rng(4001);
  Handler h = h_gen_to_bits();
  auto strong = [](const ITree& a, const ITree& b) { return strong_bisim(a, b, kLawDepth).is_proven(); };
  auto weak = [](const ITree& a, const ITree& b) {
    return eutt(RelSpec::eq(), a, b, kLawDepth, kLawDepth).is_proven();
  };
  for (int i = 0; i < 300 && out.pass; ++i) {
    std::string at = " (tree " + std::to_string(i) + ")";
    Value r = nat(gen::pick(rng, 4));
    out.expect(strong(interp_tree(h, ret(r)), ret(r)), "interp of ret" + at);
    ITree t = gen::build(gen::random_tree(rng));
    out.expect(strong(interp_tree(h, tau(t)), tau(interp_tree(h, t))), "interp of tau" + at);
    EventInstance e{gen::sig3(), gen::pick(rng, 3), {}, {}};
    KTree kt = gen::random_kont(rng);
    Kont kk = [kt](const Value& x) { return kt(nat(gen::answer_index(x))); };
    ITree lhs = interp_tree(h, vis(e, kk));
    ITree rhs = itree::bind(h.apply(e).tree(), [h, kk](const Value& x) { return tau(interp_tree(h, kk(x))); });
    out.expect(strong(lhs, rhs), "interp of vis" + at);
    KTree k = gen::random_kont(rng);
    ITree bl = interp_tree(h, itree::bind(t, k.kont()));
    ITree br = itree::bind(interp_tree(h, t), [h, k](const Value& x) { return interp_tree(h, k(x)); });
    out.expect(weak(bl, br), "interp of bind" + at);
  }
  for (std::uint64_t seed = 0; seed < 200 && out.pass; ++seed) {
    std::uint64_t s = seed % 4;
    std::string at = " (state program " + std::to_string(seed) + ")";
    out.expect(weak(run_state(ret(nat(9)), s), ret(Value::pair(nat(s), nat(9)))), "interp_state ret" + at);
    out.expect(weak(run_state(get_t(), s), ret(Value::pair(nat(s), nat(s)))), "interp_state get" + at);
    out.expect(weak(run_state(put_t(seed % 7), s), ret(Value::pair(nat(seed % 7), Value::unit()))),
               "interp_state put" + at);
    ITree t = state_prog(seed, 6);
    out.expect(strong(run_state(tau(t), s), tau(run_state(t, s))), "interp_state tau" + at);
    ITree o = seq(out_t(seed % 3), t);
    ITree pass = seq(trigger(output_event(seed % 3)), run_state(t, s));
    out.expect(weak(run_state(o, s), pass), "interp_state passes other events" + at);
    Kont k = [seed](const Value& x) { return state_prog(seed * 31 + x.as_nat(), 4); };
    ITree lhs = run_state(itree::bind(t, k), s);
    ITree rhs = itree::bind(run_state(t, s), [k](const Value& p) { return run_state(k(p.second()), p.first().as_nat()); });
    out.expect(weak(lhs, rhs), "interp_state bind" + at);
  }
  if (out.pass) out.detail = "300 trees x 4 interp equations, 200 state programs x 6 equations";
  return out;
}

// 5 ------------------------------------------------------------------------------

std::uint64_t ackermann_oracle(std::uint64_t m, std::uint64_t n) {
  if (m == 0) return n + 1;
  if (n == 0) return ackermann_oracle(m - 1, 1);
  return ackermann_oracle(m - 1, ackermann_oracle(m, n - 1));
}

ITree unfold_once(const RecHandler& rh, const Signature& outer, const EventInstance& e) {
  Signature src = sum(leaf(rh.dsig), outer);
  Handler h{src, TargetMonad::itree_m(outer), [rh, src](const EventInstance& ev) -> Comp {
              Projected p = project(src, ev);
              if (p.side == Side::Left) return mrec(rh, p.event);
              return trigger(p.event);
            }};
  return interp_tree(h, rh.body(e));
}

Outcome mrec_suite() {
  Outcome out;
  constexpr std::uint64_t budget = 100'000'000;
  for (std::uint64_t m = 0; m <= 3; ++m) {
    for (std::uint64_t n = 0; n <= 3; ++n) {
      std::string at = " at (" + std::to_string(m) + "," + std::to_string(n) + ")";
      EventInstance e = ackermann_call(m, n);
      Observation o = observe(burn(budget, mrec(h_ackermann(), e)));
      out.expect(is_ret(o) && std::get<RetO>(o).value == nat(ackermann_oracle(m, n)), "value" + at);
      Verdict v = eutt(RelSpec::eq(), mrec(h_ackermann(), e), unfold_once(h_ackermann(), leaf(empty_sig()), e),
                       budget, budget);
      out.expect(v.is_proven(), "unfolding" + at + ": " + v.to_string());
    }
  }
  Observation o = observe(burn(budget, mrec(h_ackermann(), ackermann_call(2, 3))));
  out.expect(is_ret(o) && std::get<RetO>(o).value == nat(9), "ackermann(2,3) is not 9");
  if (out.pass) out.detail = "16 instances, values and unfolding";
  return out;
}

// 6 ------------------------------------------------------------------------------

Outcome trace_correspondence() {
  Outcome out;
  gen::Rng rng(6001);
  int proven = 0, refuted = 0;
  for (int i = 0; i < 500; ++i) {
    gen::Shape s = gen::random_tree(rng);
    gen::Shape u = gen::pick(rng, 2) == 0 ? gen::perturb_taus(rng, s) : gen::mutate(rng, s);
    ITree a = gen::build(s);
    ITree b = gen::build(u);
    Verdict e = eutt(RelSpec::eq(), a, b, 100, 100);
    Verdict t = trace_equiv(a, b, 10, 100);
    std::string at = " (pair " + std::to_string(i) + "): eutt " + e.to_string() + ", traces " + t.to_string();
    out.expect(e.is_proven() == t.is_proven(), "proven mismatch" + at);
    if (e.is_refuted()) out.expect(t.is_refuted(), "refutation not seen by traces" + at);
    out.expect(!e.is_unknown(), "eutt undecided" + at);
    proven += e.is_proven();
    refuted += e.is_refuted();
  }
  if (out.pass) out.detail = "500 pairs, " + std::to_string(proven) + " proven, " + std::to_string(refuted) + " refuted";
  return out;
}

// 7 ------------------------------------------------------------------------------

Outcome compiler_correctness() {
  auto t0 = std::chrono::steady_clock::now();
  Outcome out;
  compiler::SimConfig cfg;
  cfg.fuel = 50'000;
  std::vector<imp::StmtPtr> programs;
  for (const auto& name : corpus()) programs.push_back(corpus_program(name));
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    programs.push_back(compiler::gen_program(20, compiler::LoopMode::Bounded, seed));
  }
  std::size_t index = 0;
  for (const auto& s : programs) {
    Verdict v = compiler::check_equivalent(s, cfg);
    std::string which = index < corpus().size() ? corpus()[index] : "generated #" + std::to_string(index - corpus().size());
    out.expect(v.is_proven(), which + ": " + v.to_string());
    ++index;
  }
  for (compiler::Mutation m : compiler::all_mutations()) {
    bool caught = false;
    for (const auto& s : programs) {
      if (compiler::check_equivalent(s, cfg, m).is_refuted()) {
        caught = true;
        break;
      }
    }
    out.expect(caught, "mutant " + std::string(compiler::mutation_name(m)) + " was never refuted");
  }
  double secs = seconds_since(t0);
  out.expect(secs < kCompilerSeconds, "took " + std::to_string(secs) + " s");
  if (out.pass) out.detail = "510 programs proven, 5 mutants refuted, " + std::to_string(secs) + " s";
  return out;
}

// 8 ------------------------------------------------------------------------------

Outcome linking_equations() {
  using namespace itree::asml;
  Outcome out;
  asmgen::Rng rng(8001);
  CheckOptions probe;
  probe.nat_probe = {0, 3};
  auto equiv = [&](const KTree& a, const KTree& b, std::uint64_t dom) {
    return ktree_equiv(RelSpec::eq(), a, b, asmgen::labels(dom), 10000, 1000, probe);
  };
  auto note = [&](const char* law, int i, const Verdict& v) {
    out.expect(v.is_proven(), std::string(law) + " #" + std::to_string(i) + ": " + v.to_string());
  };
  for (int i = 0; i < 100 && out.pass; ++i) {
    std::uint64_t a = 1 + asmgen::pick(rng, 4), b = 1 + asmgen::pick(rng, 4);
    FinMap f = asmgen::fin_map(rng, a, b);
    note("pure_asm", i, equiv(den_asm(pure_asm(f)), f.ktree(), a));

    AsmUnit ab = asmgen::unit(rng, 1 + asmgen::pick(rng, 2), 1 + asmgen::pick(rng, 2));
    AsmUnit cd = asmgen::unit(rng, 1 + asmgen::pick(rng, 2), 1 + asmgen::pick(rng, 2));
    note("app_asm", i, equiv(den_asm(app_asm(ab, cd)), asmgen::app_rhs(ab, cd), ab.entries + cd.entries));

    AsmUnit u = asmgen::unit(rng, 1 + asmgen::pick(rng, 2), 1 + asmgen::pick(rng, 2));
    std::uint64_t ra = 1 + asmgen::pick(rng, 3), rd = 1 + asmgen::pick(rng, 3);
    FinMap rf = asmgen::fin_map(rng, ra, u.entries);
    FinMap rg = asmgen::fin_map(rng, u.exits, rd);
    note("relabel_asm", i, equiv(den_asm(relabel_asm(rf, rg, u)), asmgen::relabel_rhs(rf, rg, u), ra));

    std::uint64_t I = 1 + asmgen::pick(rng, 2);
    AsmUnit lu = asmgen::unit(rng, 1 + asmgen::pick(rng, 2), 1 + asmgen::pick(rng, 2), I);
    note("loop_asm", i, equiv(den_asm(loop_asm(I, lu)), asmgen::loop_rhs(I, lu), lu.entries - I));

    std::uint64_t mid = 1 + asmgen::pick(rng, 2);
    AsmUnit s1 = asmgen::unit(rng, 1 + asmgen::pick(rng, 2), mid);
    AsmUnit s2 = asmgen::unit(rng, mid, 1 + asmgen::pick(rng, 2));
    note("seq_asm", i, equiv(den_asm(seq_asm(s1, s2)), kt_cat(den_asm(s1), den_asm(s2)), s1.entries));

    // while_asm: the body counts @c down so the interpreted loop terminates.
    std::vector<Instr> e = asmgen::instrs(rng, 2);
    e.push_back(Instr::load(0, "c"));
    AsmUnit p = asmgen::unit(rng, 1, 1);
    Block& entry = p.code[p.internal];
    std::vector<Instr> dec{Instr::load(3, "c"), Instr::sub(3, 3, Operand::imm(1)), Instr::store("c", Operand::reg(3))};
    entry.instrs.insert(entry.instrs.begin(), dec.begin(), dec.end());
    KTree lhs = den_asm(while_asm(e, p));
    KTree rhs = asmgen::while_rhs(e, p);
    Verdict wv = Verdict::proven();
    for (std::uint64_t c = 0; c < 4; ++c) {
      Memory m{{"c", c}, {"x", asmgen::pick(rng, 3)}};
      Registers r{{1, asmgen::pick(rng, 3)}};
      wv = combine(wv, eutt(RelSpec::eq(), interp_asm(lhs(Value::label(0, 1)), m, r),
                            interp_asm(rhs(Value::label(0, 1)), m, r), 100000, 100000));
    }
    note("while_asm", i, wv);
  }
  if (out.pass) out.detail = "6 equations x 100 units";
  return out;
}

// 9 ------------------------------------------------------------------------------

Outcome divergence() {
  Outcome out;
  imp::StmtPtr s = imp::parse_imp("while 1 do skip end");
  asml::AsmUnit u = compiler::compile(s);
  for (std::uint64_t fuel : {1'000u, 10'000u, 100'000u}) {
    std::string at = " at fuel " + std::to_string(fuel);
    out.expect(!imp::run_imp(s, {}, fuel).finished, "Imp finished" + at);
    out.expect(asml::run_asm(u, 0, {}, {}, fuel).outcome == asml::AsmRun::Outcome::OutOfFuel, "Asm stopped" + at);
    compiler::SimConfig cfg;
    cfg.fuel = fuel;
    cfg.tau_budget = fuel;
    cfg.depth = fuel;
    Verdict v = compiler::check_equivalent(s, cfg);
    out.expect(v.is_unknown(), "verdict " + v.to_string() + at);
  }
  if (out.pass) out.detail = "out of fuel on both sides, Unknown at 1e3/1e4/1e5";
  return out;
}

// 10 -----------------------------------------------------------------------------

struct Proc {
  int code = -1;
  std::string out;
};

std::string quote(const std::string& s) {
  std::string q = "'";
  for (char c : s) q += c == '\'' ? std::string("'\\''") : std::string(1, c);
  return q + "'";
}

Proc run_cli(const std::vector<std::string>& args, const std::string& input) {
  std::filesystem::path in = std::filesystem::temp_directory_path() / "itree_acceptance_stdin.txt";
  std::ofstream(in, std::ios::binary) << input;
  std::string cmd = quote(ITREE_CLI_PATH);
  for (const auto& a : args) cmd += " " + quote(a);
  cmd += " < " + quote(in.string()) + " 2>/dev/null";
  Proc p;
  FILE* f = popen(cmd.c_str(), "r");
  if (!f) return p;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, f)) > 0) p.out.append(buf, n);
  int status = pclose(f);
  p.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::filesystem::remove(in);
  return p;
}

Outcome cli_end_to_end() {
  Outcome out;
  std::size_t compared = 0;
  for (const auto& c : cli_cases::cases()) {
    std::string golden = std::string(ITREE_GOLDEN_DIR) + "/" + c.name + ".out";
    if (!std::filesystem::exists(golden)) {
      out.fail("missing golden " + c.name);
      continue;
    }
    Proc p = run_cli(cli_cases::expand(c.args, ITREE_SAMPLES_DIR), c.input);
    out.expect(p.code == c.exit_code, c.name + ": exit " + std::to_string(p.code));
    out.expect(p.out == slurp(golden), c.name + ": output differs from golden");
    ++compared;
  }
  Proc echo = run_cli({"demo-echo"}, "1\n22\n333\n4\n5\n");
  out.expect(echo.code == 0 && echo.out == "1\n22\n333\n4\n5\n", "echo printed: " + echo.out);

  // run-imp and run-asm of the compiled program print the same map.
  for (const auto& name : corpus()) {
    std::string src = std::string(ITREE_SAMPLES_DIR) + "/" + name + ".imp";
    Proc imp_run = run_cli({"run-imp", src}, "");
    std::filesystem::path asm_path = std::filesystem::temp_directory_path() / ("itree_acceptance_" + name + ".asm");
    run_cli({"compile", src, "-o", asm_path.string()}, "");
    Proc asm_run = run_cli({"run-asm", asm_path.string()}, "");
    std::filesystem::remove(asm_path);
    auto section = [](const std::string& text, const std::string& head) {
      auto b = text.find(head + ":\n");
      if (b == std::string::npos) return std::string("<none>");
      b += head.size() + 2;
      std::string body;
      std::istringstream ss(text.substr(b));
      for (std::string line; std::getline(ss, line) && line.rfind("  ", 0) == 0;) body += line + "\n";
      return body;
    };
    out.expect(imp_run.code == 0 && asm_run.code == 0, name + ": run failed");
    out.expect(section(imp_run.out, "env") == section(asm_run.out, "memory"), name + ": env and memory differ");
  }
  if (out.pass) out.detail = std::to_string(compared) + " goldens byte-exact, echo 5 lines, 10 corpus maps agree";
  return out;
}

}  // namespace

int main() {
  struct Criterion {
    const char* id;
    const char* name;
    std::function<Outcome()> run;
  };
  std::vector<Criterion> all{
      {"AC1", "monad and structural laws", monad_laws},
      {"AC2", "category laws for ktrees and handlers", category_laws},
      {"AC3", "iterative laws", iterative_laws},
      {"AC4", "interp and interp_state equations", interp_laws},
      {"AC5", "mrec on Ackermann", mrec_suite},
      {"AC6", "eutt and trace equivalence agree", trace_correspondence},
      {"AC7", "compiler correctness and mutants", compiler_correctness},
      {"AC8", "linking equations", linking_equations},
      {"AC9", "divergence sensitivity", divergence},
      {"AC10", "command line end to end", cli_end_to_end},
  };
  int failed = 0;
  for (const auto& c : all) {
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    failed += o.pass ? 0 : 1;
    std::cout << c.id << " " << (o.pass ? "PASS" : "FAIL") << "  " << c.name << "  [" << o.detail << "]"
              << std::endl;
  }
  return failed;
}

// Acceptance suite: one line per criterion, nonzero exit if any fails.
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "helpers.hpp"

using namespace cac;
using cactest::num;
using cactest::rule_eq_upto_renaming;
using cactest::t_;
using cactest::theory;
using cactest::unnum;

static int failures = 0;

static void report(int n, bool ok, const std::string& what) {
  std::cout << (ok ? "PASS" : "FAIL") << " criterion " << n << ": " << what << "\n";
  if (!ok) ++failures;
}

// ---------------------------------------------------------------- criterion 1

static std::vector<RewriteRule> golden_rules(const std::string& rec, const std::string& sort) {
  auto R = [&](TermPtr l, TermPtr r) { return RewriteRule{rec, l, r, rec, RuleOrder::Higher, {}}; };
  TermPtr u = mk_var("u"), v = mk_var("v"), w = mk_var("w"), n = mk_var("n"), f = mk_var("f");
  if (sort == "bool")
    return {R(mk_fun(rec, {mk_cons("true", {}), u, v}), u),
            R(mk_fun(rec, {mk_cons("false", {}), u, v}), v)};
  if (sort == "nat")
    return {R(mk_fun(rec, {mk_cons("0", {}), u, v}), u),
            R(mk_fun(rec, {mk_cons("s", {n}), u, v}),
              mk_app(mk_app(v, n), mk_fun(rec, {n, u, v})))};
  TermPtr recfn = mk_fun(rec, {mk_app(f, mk_var("k")), u, v, w});
  return {R(mk_fun(rec, {mk_cons("0o", {}), u, v, w}), u),
          R(mk_fun(rec, {mk_cons("so", {n}), u, v, w}),
            mk_app(mk_app(v, n), mk_fun(rec, {n, u, v, w}))),
          R(mk_fun(rec, {mk_cons("lim", {f}), u, v, w}),
            mk_app(mk_app(w, f), mk_abs("k", mk_sort_ref("nat"), recfn)))};
}

static void criterion1() {
  Signature sig = theory();
  sig.add_sort("t");
  ATypePtr t = mk_asort("t");
  int matched = 0, total = 0;
  for (const std::string s : {"bool", "nat", "ord"}) {
    auto [decl, rules] = generate_recursor(sig, s, t, "rec");
    auto want = golden_rules("rec", s);
    total += static_cast<int>(want.size());
    if (rules.size() != want.size()) continue;
    for (size_t i = 0; i < rules.size(); ++i)
      if (rule_eq_upto_renaming(rules[i], want[i])) ++matched;
  }
  report(1, matched == 7 && total == 7,
         "generate_recursor reproduces the 7 golden rules for bool/nat/ord (" +
             std::to_string(matched) + "/7 up to renaming)");
}

// ---------------------------------------------------------------- criterion 2

static void criterion2() {
  CliInvocation cli;
  cli.command = "check";
  cli.spec_path = cactest::data_path("paper.cac");
  RunResult r = run(cli);
  report(2, r.exit_code == 0, "bundled theory passes `cacc check` (exit " +
                                  std::to_string(r.exit_code) + ")");
}

// ---------------------------------------------------------------- criterion 3

static std::string schema_code(const std::string& text, const std::string& rule) {
  Signature sig = elaborate(parse_spec(text));
  SchemaReport rep = check_general_schema(sig);
  if (rep.pass) return "pass";
  for (const auto& v : rep.rules)
    if (v.rule == rule && !v.pass) return v.code;
  return "other";
}

static std::string elab_code(const std::string& text) {
  try {
    elaborate(parse_spec(text));
    return "pass";
  } catch (const Error& e) {
    return e.code;
  }
}

static void criterion3() {
  std::string c1 = schema_code(
      "sort nat\ncons 0 : nat\ncons s : nat -> nat\n"
      "fun f : nat -> nat order higher\nrule f(x) => f(x)\n",
      "f.1");
  std::string c2 = schema_code(
      "sort nat\ncons 0 : nat\ncons s : nat -> nat\n"
      "fun g : nat -> nat\nfun h : nat -> nat -> nat\nrule g(x) => h(x, x)\n",
      "g.1");
  std::string c3 = elab_code("sort nat\ncons 0 : nat\nsort w\ncons c : (w -> nat) -> w\n");
  std::string c4 = elab_code(
      "sort tree\nsort forest\ncons leaf : forest -> tree\ncons grove : tree -> forest\n");
  bool ok = c1 == "closure" && c2 == "conservativity" && c3 == "positivity" && c4 == "sort-cycle";
  report(3, ok, "rejection suite reason codes: f(x)=>f(x) -> " + c1 + ", g(x)=>h(x,x) -> " + c2 +
                    ", (w->nat)->w -> " + c3 + ", mutual sorts -> " + c4);
}

// ---------------------------------------------------------------- criterion 4

static void criterion4() {
  const std::string rules =
      "rule ack(0, y) => s(y)\n"
      "rule ack(s(x), 0) => ack(x, s(0))\n"
      "rule ack(s(x), s(y)) => ack(x, ack(s(x), y))\n";
  const std::string base = "sort nat\ncons 0 : nat\ncons s : nat -> nat\n";
  Signature fo = elaborate(parse_spec(base + "fun ack : nat -> nat -> nat order first\n" + rules));
  SchemaReport frep = check_general_schema(fo);
  bool fo_fails = !frep.pass && !frep.fo_conservative;
  std::string witness;
  for (const auto& v : frep.rules)
    if (v.rule == "ack.3" && !v.pass && v.code == "conservativity") witness = v.detail;
  Signature ho = elaborate(
      parse_spec(base + "fun ack : nat -> nat -> nat order higher status lex(x1, x2)\n" + rules));
  bool ho_passes = check_general_schema(ho).pass;
  report(4, fo_fails && !witness.empty() && ho_passes,
         "ack reclassification: first-order fails conservativity on rule 3 (witness: " +
             (witness.empty() ? std::string("<none>") : witness) +
             "), higher-order with lex(x1, x2) passes");
}

// ---------------------------------------------------------------- criterion 5

// independent direct-recursion evaluators
static long oracle_plus(long a, long b) { return b == 0 ? a : oracle_plus(a, b - 1) + 1; }
static long oracle_ack(long m, long n) {
  if (m == 0) return n + 1;
  if (n == 0) return oracle_ack(m - 1, 1);
  return oracle_ack(m - 1, oracle_ack(m, n - 1));
}

static void criterion5() {
  TermPtr a = normalize(theory(), mk_fun("ack", {num(2), num(2)}));
  TermPtr p = normalize(theory(), mk_fun("plus", {num(1), num(1)}));
  bool ok_a = alpha_eq(a, num(static_cast<int>(oracle_ack(2, 2)))) && unnum(a) == 7;
  bool ok_p = alpha_eq(p, num(static_cast<int>(oracle_plus(1, 1)))) && unnum(p) == 2;
  report(5, ok_a && ok_p, "normalize(ack(2,2)) = s^" + std::to_string(unnum(a)) +
                              "(0), normalize(plus(s(0),s(0))) = s^" + std::to_string(unnum(p)) +
                              "(0), matching the direct-recursion oracle");
}

// ---------------------------------------------------------------- criterion 6

static void criterion6() {
  CliInvocation cli;
  cli.command = "type";
  cli.spec_path = cactest::data_path("paper.cac");
  cli.env_text = "a: Pi n:nat. *, n: nat, x: a (plus(n, 0))";
  cli.term_text = "x";
  cli.against_text = "a n";
  RunResult r = run(cli);
  report(6, r.exit_code == 0,
         "in env a:Pi n:nat.*, n:nat, x:a (plus(n,0)) the judgement x : a n checks "
         "(conversion through plus(n,0) -> n)");
}

// ---------------------------------------------------------------- criterion 7

static void criterion7() {
  cactest::TermGen gen(20260826);
  const Signature& sig = theory();
  int bad = 0, reduced = 0;
  for (int i = 0; i < 1000; ++i) {
    TermPtr t = gen.closed(4);
    TermPtr ty;
    try {
      ty = infer(sig, {}, t);
    } catch (const Error&) {
      ++bad;  // generator promised a well-typed term
      continue;
    }
    auto st = step(sig, t);
    if (!st) continue;  // normal form
    ++reduced;
    if (!check(sig, {}, st->first, ty)) ++bad;
  }
  report(7, bad == 0, "subject reduction on 1000 random well-typed terms (" +
                          std::to_string(reduced) + " reducible, " + std::to_string(bad) +
                          " failures)");
}

// ---------------------------------------------------------------- criterion 8

static void criterion8() {
  const Signature& sig = theory();
  OverlapReport ov = check_overlaps(sig);
  bool clean = ov.ok() && ov.beta_overlaps.empty();
  for (const auto& e : ov.entries) clean = clean && e.first_order && e.joinable;
  cactest::TermGen gen(424242);
  int disagree = 0;
  for (int i = 0; i < 1000; ++i) {
    TermPtr t = gen.closed(4);
    TermPtr out = normalize(sig, t, 1000000, Strategy::Outermost);
    TermPtr inn = normalize(sig, t, 1000000, Strategy::Innermost);
    if (!alpha_eq(out, inn)) ++disagree;
  }
  report(8, clean && disagree == 0,
         "overlap report clean except joinable first-order pairs (" +
             std::to_string(ov.entries.size()) +
             " pairs); outermost and innermost normalization agree on 1000 random terms (" +
             std::to_string(disagree) + " disagreements)");
}

// ---------------------------------------------------------------- criterion 9

// Independent oracle: bottom-up fixpoint of the closure cases over the
// alpha-deduplicated subterm universe of the candidate.
static bool oracle_closure(const Signature& sig, const ClosureGoal& g) {
  std::vector<TermPtr> univ;
  std::function<void(const TermPtr&)> collect = [&](const TermPtr& t) {
    for (const auto& u : univ)
      if (alpha_eq(u, t)) return;
    univ.push_back(t);
    switch (t->kind) {
      case TermKind::Abs:
      case TermKind::Prod:
      case TermKind::App:
        collect(t->left);
        collect(t->right);
        break;
      case TermKind::Cons:
      case TermKind::Fun:
        for (const auto& a : t->args) collect(a);
        break;
      default:
        break;
    }
  };
  collect(g.candidate);
  std::vector<TermPtr> acc = accessible_subterms(sig, g.env, g.lhs_args);
  std::set<VarKey> lhs_vars;
  for (const auto& c : g.lhs_args)
    for (const auto& v : free_vars(c)) lhs_vars.insert(v);
  const FunctionDecl& f = *sig.find_fun(g.fun);

  std::vector<bool> in(univ.size(), false);
  auto member = [&](const TermPtr& t) -> bool {
    for (size_t i = 0; i < univ.size(); ++i)
      if (alpha_eq(univ[i], t)) return in[i];
    return false;
  };
  bool changed = true;
  while (changed) {
    changed = false;
    for (size_t i = 0; i < univ.size(); ++i) {
      if (in[i]) continue;
      const TermPtr& t = univ[i];
      bool ok = false;
      for (const auto& a : acc) ok = ok || alpha_eq(a, t);
      if (!ok) switch (t->kind) {
          case TermKind::Var:
            ok = !lhs_vars.count({t->name, t->flavor}) && alg_lookup(g.env, t->name);
            break;
          case TermKind::Cons: {
            ok = true;
            for (const auto& a : t->args) ok = ok && member(a);
            break;
          }
          case TermKind::Fun: {
            ok = true;
            for (const auto& a : t->args) ok = ok && member(a);
            if (ok && t->name == g.fun) {
              try {
                ok = critical_greater(sig, f, g.env, g.lhs_args, t->args);
              } catch (const Error&) {
                ok = false;
              }
            } else if (ok) {
              ok = !sig.fun_geq(t->name, g.fun);
            }
            break;
          }
          case TermKind::App: {
            auto tu = algebraic_type_of(sig, g.env, t->left);
            auto tv = algebraic_type_of(sig, g.env, t->right);
            ok = tu && tv && !(*tu)->is_sort() && atype_eq((*tu)->left, *tv) &&
                 member(t->left) && member(t->right);
            break;
          }
          case TermKind::Abs: {
            auto dom = term_to_atype(t->left);
            const ATypePtr* dec = dom ? alg_lookup(g.env, t->name) : nullptr;
            ok = dom && dec && atype_eq(*dec, *dom) && member(t->right);
            break;
          }
          default:
            break;
        }
      if (ok) {
        in[i] = true;
        changed = true;
      }
    }
  }
  return member(g.candidate);
}

struct MicroGen {
  std::mt19937 rng;
  explicit MicroGen(unsigned seed) : rng(seed) {}
  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); }

  // nat with constructors 0/s, a smaller symbol h : nat -> nat and a head
  // symbol f of random arity; dummy rules fix the function order f > h
  Signature make_sig(int arity) {
    Signature s;
    ATypePtr nat = mk_asort("nat");
    s.add_sort("nat");
    s.add_constructor({"0", {}, "nat", nat});
    s.add_constructor({"s", {nat}, "nat", mk_arrow(nat, nat)});
    s.add_function({"h", {nat}, nat, false, {}, {}});
    Status st;
    for (int i = 1; i <= arity; ++i) st.entries.push_back({pick(2) == 0, {i}});
    s.add_function(
        {"f", std::vector<ATypePtr>(static_cast<size_t>(arity), nat), nat, true, st, {}});
    s.rules.push_back({"h.1", mk_fun("h", {mk_cons("s", {mk_var("x")})}),
                       mk_fun("h", {mk_var("x")}), "h", RuleOrder::First, {{"x", nat}}});
    std::vector<TermPtr> zeros(static_cast<size_t>(arity), mk_cons("0", {}));
    s.rules.push_back({"f.0", mk_fun("f", zeros), mk_fun("h", {mk_cons("0", {})}), "f",
                       RuleOrder::Higher, {}});
    return s;
  }

  TermPtr pattern(int i) {
    TermPtr v = mk_var("x" + std::to_string(i));
    switch (pick(4)) {
      case 0: return v;
      case 1: return mk_cons("s", {v});
      case 2: return mk_cons("s", {mk_cons("s", {v})});
      default: return mk_cons("0", {});
    }
  }

  TermPtr candidate(const std::vector<std::string>& vars, int arity, int depth, int* binder) {
    if (depth <= 0) {
      int k = pick(static_cast<int>(vars.size()) + 2);
      if (k < static_cast<int>(vars.size())) return mk_var(vars[static_cast<size_t>(k)]);
      return k == static_cast<int>(vars.size()) ? mk_cons("0", {}) : mk_var("e0");
    }
    switch (pick(6)) {
      case 0: return candidate(vars, arity, 0, binder);
      case 1: return mk_cons("s", {candidate(vars, arity, depth - 1, binder)});
      case 2: return mk_fun("h", {candidate(vars, arity, depth - 1, binder)});
      case 3:
        return mk_app(mk_var("g0"), candidate(vars, arity, depth - 1, binder));
      case 4: {
        if (*binder >= 2) return candidate(vars, arity, depth - 1, binder);
        std::string b = "b" + std::to_string(++*binder);
        auto inner = vars;
        inner.push_back(b);
        return mk_app(mk_abs(b, mk_sort_ref("nat"), candidate(inner, arity, depth - 1, binder)),
                      candidate(vars, arity, depth - 1, binder));
      }
      default: {  // recursive call to the head symbol
        std::vector<TermPtr> args;
        for (int i = 0; i < arity; ++i) args.push_back(candidate(vars, arity, depth - 1, binder));
        return mk_fun("f", args);
      }
    }
  }
};

static void criterion9() {
  MicroGen g(777);
  int mismatches = 0, accepted = 0;
  for (int round = 0; round < 200; ++round) {
    int arity = 1 + g.pick(2);
    Signature sig = g.make_sig(arity);
    ClosureGoal goal;
    goal.fun = "f";
    std::vector<std::string> vars;
    for (int i = 1; i <= arity; ++i) {
      goal.lhs_args.push_back(g.pattern(i));
      vars.push_back("x" + std::to_string(i));
    }
    ATypePtr nat = mk_asort("nat");
    for (const auto& v : vars) goal.env.push_back({v, nat});
    goal.env.push_back({"e0", nat});
    goal.env.push_back({"g0", mk_arrow(nat, nat)});
    goal.env.push_back({"b1", nat});
    goal.env.push_back({"b2", nat});
    int binder = 0;
    TermPtr cand = g.candidate(vars, arity, 3, &binder);
    goal.candidate = cand;
    bool got = closure_contains(sig, goal).accepted;
    bool want = oracle_closure(sig, goal);
    if (got) ++accepted;
    if (got != want) {
      ++mismatches;
      if (mismatches <= 3) {
        std::cout << "  mismatch: lhs f(";
        for (size_t i = 0; i < goal.lhs_args.size(); ++i)
          std::cout << (i ? ", " : "") << show(goal.lhs_args[i]);
        std::cout << ") rhs " << show(cand) << ": checker=" << got << " oracle=" << want << "\n";
      }
    }
  }
  report(9, mismatches == 0, "closure_contains agrees with the brute-force oracle on 200 random "
                                 "micro-signatures (" +
                                 std::to_string(accepted) + " accepted, " +
                                 std::to_string(mismatches) + " mismatches)");
}

// --------------------------------------------------------------- criterion 10

static void criterion10() {
  const Signature& sig = theory();
  ATypePtr nat = mk_asort("nat"), ord = mk_asort("ord");
  AlgEnv env1{{"f", mk_arrow(nat, ord)}, {"n", nat}};
  TermPtr fn = mk_app(mk_var("f"), mk_var("n"));
  bool ok1 = alpha_eq(critical_subterm(sig, env1, "ord", fn), mk_var("f"));
  AlgEnv env2{{"g", mk_arrow(nat, mk_arrow(ord, ord))}, {"a", nat}, {"b", ord}};
  TermPtr gab = mk_app(mk_app(mk_var("g"), mk_var("a")), mk_var("b"));
  bool ok2 = alpha_eq(critical_subterm(sig, env2, "ord", gab), gab);
  report(10, ok1 && ok2,
         "crit_{Gamma,ord}(f n) = f with f:nat->ord; crit_{Gamma,ord}(g a b) = g a b with "
         "g:nat->ord->ord");
}

int main() {
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  criterion9();
  criterion10();
  if (failures) std::cout << failures << " criterion(s) failed\n";
  return failures == 0 ? 0 : 1;
}

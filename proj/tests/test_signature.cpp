#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "helpers.hpp"

using namespace cac;
using cactest::rule_eq_upto_renaming;
using cactest::t_;

static ATypePtr nat() { return mk_asort("nat"); }
static ATypePtr ord() { return mk_asort("ord"); }

TEST_CASE("algebraic type utilities") {
  ATypePtr a = mk_arrow(nat(), mk_arrow(nat(), nat()));
  CHECK(show(a) == "nat -> nat -> nat");
  CHECK(atype_first_order(a));
  CHECK_FALSE(atype_first_order(mk_arrow(mk_arrow(nat(), nat()), nat())));
  ATypePtr out;
  auto args = arrow_args(a, out);
  CHECK(args.size() == 2);
  CHECK(out->sort == "nat");
  CHECK(atype_eq(mk_arrow_chain(args, out), a));
  CHECK(atype_eq(*term_to_atype(atype_to_term(a)), a));
  CHECK(sort_occurs("nat", a));
  CHECK_FALSE(sort_occurs("ord", a));
  CHECK(atype_eq(subst_sort(mk_arrow(nat(), ord()), "ord", nat()), mk_arrow(nat(), nat())));
}

TEST_CASE("positive and negative positions") {
  CHECK(positive_positions(nat()) == std::set<Position>{{}});
  CHECK(negative_positions(nat()).empty());
  ATypePtr no = mk_arrow(nat(), ord());
  CHECK(positive_positions(no) == std::set<Position>{{2}});
  CHECK(negative_positions(no) == std::set<Position>{{1}});
  CHECK(occurs_positively("ord", no));
  CHECK_FALSE(occurs_positively("ord", mk_arrow(ord(), nat())));
  // double flip: ord in ((ord -> nat) -> nat) is positive again
  CHECK(occurs_positively("ord", mk_arrow(mk_arrow(ord(), nat()), nat())));
  // positive/negative partition the sort occurrences
  ATypePtr t = mk_arrow(mk_arrow(nat(), ord()), mk_arrow(ord(), nat()));
  auto pos = positive_positions(t), neg = negative_positions(t);
  for (const auto& p : pos) CHECK_FALSE(neg.count(p));
  CHECK(pos.size() + neg.size() == sort_positions("nat", t).size() +
                                       sort_positions("ord", t).size());
}

TEST_CASE("classify_sort on the bundled theory") {
  const Signature& sig = cactest::theory();
  CHECK(classify_sort(sig, "nat").cls == SortClass::Basic);
  CHECK(classify_sort(sig, "bool").cls == SortClass::Basic);
  CHECK(classify_sort(sig, "list<nat>").cls == SortClass::Basic);
  CHECK(classify_sort(sig, "ord").cls == SortClass::StrictlyPositive);
  CHECK_THROWS_AS((void)classify_sort(sig, "zilch"), Error);
}

TEST_CASE("classify_sort rejects a negative occurrence") {
  Signature sig;
  sig.add_sort("nat");
  sig.add_constructor({"0", {}, "nat", mk_asort("nat")});
  sig.add_sort("w");
  ATypePtr arg = mk_arrow(mk_asort("w"), nat());
  sig.add_constructor({"c", {arg}, "w", mk_arrow(arg, mk_asort("w"))});
  auto v = classify_sort(sig, "w");
  CHECK(v.cls == SortClass::Rejected);
  CHECK(v.reason.find("c") != std::string::npos);
}

TEST_CASE("check_orders") {
  // {nat} with 0,s: self-loop only
  Signature one;
  one.add_sort("nat");
  one.add_constructor({"0", {}, "nat", nat()});
  one.add_constructor({"s", {nat()}, "nat", mk_arrow(nat(), nat())});
  CHECK(check_orders(one).ok);

  // list<nat> over nat: acyclic
  CHECK(check_orders(cactest::theory()).ok);

  // tree/forest mention each other: rejected with the pair as witness
  Signature two;
  two.add_sort("tree");
  two.add_sort("forest");
  two.add_constructor({"node", {mk_asort("forest")}, "tree",
                       mk_arrow(mk_asort("forest"), mk_asort("tree"))});
  two.add_constructor({"grove", {mk_asort("tree")}, "forest",
                       mk_arrow(mk_asort("tree"), mk_asort("forest"))});
  auto rep = check_orders(two);
  CHECK_FALSE(rep.ok);
  CHECK(rep.sort_cycle.size() == 2);

  // two higher-order symbols defined through each other
  Signature fo = one;
  FunctionDecl f{"f", {nat()}, nat(), true, {}, {}};
  FunctionDecl g{"g", {nat()}, nat(), true, {}, {}};
  fo.add_function(f);
  fo.add_function(g);
  RewriteRule rf{"f.1", mk_fun("f", {mk_var("x")}), mk_fun("g", {mk_var("x")}), "f",
                 RuleOrder::Higher, {}};
  RewriteRule rg{"g.1", mk_fun("g", {mk_var("x")}), mk_fun("f", {mk_var("x")}), "g",
                 RuleOrder::Higher, {}};
  fo.rules = {rf, rg};
  auto rep2 = check_orders(fo);
  CHECK_FALSE(rep2.ok);
  CHECK(rep2.fun_cycle.size() == 2);
}

TEST_CASE("status helpers") {
  Status st;
  st.entries.push_back({false, {2}});
  st.entries.push_back({true, {1, 3}});
  CHECK(st.lexicographic_positions() == std::set<int>{2});
  CHECK(st.show() == "lex(x2, mul(x1, x3))");
}

// expected recursor rules, built by hand from the three standard recursors
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
  // ord
  TermPtr recfn = mk_fun(rec, {mk_app(f, mk_var("k")), u, v, w});
  return {R(mk_fun(rec, {mk_cons("0o", {}), u, v, w}), u),
          R(mk_fun(rec, {mk_cons("so", {n}), u, v, w}),
            mk_app(mk_app(v, n), mk_fun(rec, {n, u, v, w}))),
          R(mk_fun(rec, {mk_cons("lim", {f}), u, v, w}),
            mk_app(mk_app(w, f), mk_abs("k", mk_sort_ref("nat"), recfn)))};
}

TEST_CASE("generate_recursor reproduces the standard rules") {
  // a symbolic output type: a fresh sort with no constructors
  Signature sig = cactest::theory();
  sig.add_sort("t");
  ATypePtr t = mk_asort("t");

  for (const std::string s : {"bool", "nat", "ord"}) {
    auto [decl, rules] = generate_recursor(sig, s, t, "rec");
    auto want = golden_rules("rec", s);
    REQUIRE(rules.size() == want.size());
    for (size_t i = 0; i < rules.size(); ++i)
      CHECK_MESSAGE(rule_eq_upto_renaming(rules[i], want[i]),
                    s << " rule " << i + 1 << ": " << show(rules[i].lhs) << " => "
                      << show(rules[i].rhs));
    CHECK(decl.higher_order);
    REQUIRE(decl.status.has_value());
    CHECK(decl.status->show() == "lex(x1)");
    CHECK(decl.inductive_positions == std::set<int>{1});
    // arity n+1, first argument the sort, output t
    CHECK(decl.arity() == (int)sig.sorts.at(s).size() + 1);
    CHECK(decl.arg_types[0]->sort == s);
    CHECK(atype_eq(decl.output_type, t));
  }

  // declared types follow the definition: rec_nat : nat -> t -> (nat -> t -> t) -> t
  auto [dn, rn] = generate_recursor(sig, "nat", t, "rec");
  CHECK(show(dn.type()) == "nat -> t -> (nat -> t -> t) -> t");
  auto [db, rb] = generate_recursor(sig, "bool", t, "rec");
  CHECK(show(db.type()) == "bool -> t -> t -> t");
  auto [dd, rd] = generate_recursor(sig, "ord", t, "rec");
  CHECK(show(dd.type()) == "ord -> t -> (ord -> t -> t) -> ((nat -> ord) -> (nat -> t) -> t) -> t");
  CHECK_THROWS_WITH_AS((void)generate_recursor(sig, "t2", t, "r"),
                       doctest::Contains("unknown-sort"), Error);
}

TEST_CASE("recursor of a rejected sort is refused") {
  Signature sig;
  sig.add_sort("nat");
  sig.add_constructor({"0", {}, "nat", nat()});
  sig.add_sort("w");
  ATypePtr arg = mk_arrow(mk_asort("w"), nat());
  sig.add_constructor({"c", {arg}, "w", mk_arrow(arg, mk_asort("w"))});
  CHECK_THROWS_WITH_AS((void)generate_recursor(sig, "w", nat(), "r"),
                       doctest::Contains("not-inductive"), Error);
}

TEST_CASE("fun_geq reflects rule occurrences") {
  const Signature& sig = cactest::theory();
  CHECK(sig.fun_geq("ack", "ack"));
  CHECK(sig.fun_geq("map<nat,bool>", "map<nat,bool>"));
  CHECK_FALSE(sig.fun_geq("plus", "ack"));
  CHECK_FALSE(sig.fun_geq("ack", "plus"));
}

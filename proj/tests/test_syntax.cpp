#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "helpers.hpp"

using namespace cac;
using cactest::t_;

TEST_CASE("subterm_at / replace_at") {
  Environment env{{"x", VarFlavor::Star, t_("nat")}, {"y", VarFlavor::Star, t_("nat")}};
  TermPtr a = t_("plus(x, s(y))", env);
  CHECK(alpha_eq(subterm_at(a, {2}), t_("s(y)", env)));
  TermPtr b = replace_at(a, {2, 1}, mk_cons("0", {}));
  CHECK(alpha_eq(b, t_("plus(x, s(0))", env)));
  CHECK(alpha_eq(subterm_at(t_("\\x:nat. x"), {1}), t_("nat")));
  CHECK_THROWS_AS((void)subterm_at(a, {7}), Error);
  CHECK_THROWS_WITH_AS((void)subterm_at(a, {2, 9}), doctest::Contains("invalid-position"), Error);
}

TEST_CASE("replace/subterm round trips at every position") {
  Environment env{{"f", VarFlavor::Star, t_("nat -> ord")}, {"n", VarFlavor::Star, t_("nat")}};
  TermPtr a = t_("rec_ord_nat(lim(\\k:nat. so(f k)), n, \\m:nat.\\r:nat. s(r), "
                 "\\g:nat->ord.\\h:nat->nat. h n)",
                 env);
  for (const auto& p : all_positions(a)) {
    TermPtr sub = subterm_at(a, p);
    CHECK(alpha_eq(replace_at(a, p, sub), a));
    CHECK(alpha_eq(subterm_at(replace_at(a, p, mk_cons("0", {})), p), mk_cons("0", {})));
  }
}

TEST_CASE("alpha equivalence") {
  CHECK(alpha_eq(t_("\\x:nat. x"), t_("\\y:nat. y")));
  CHECK_FALSE(alpha_eq(t_("\\x:nat. x"), t_("\\x:bool. x")));
  CHECK_FALSE(alpha_eq(t_("\\x:nat. x"), t_("\\x:nat. 0")));
  // equivalence relation on a small sample
  std::vector<TermPtr> ts = {t_("\\x:nat. x"), t_("\\y:nat. y"), t_("\\x:nat. 0")};
  for (const auto& a : ts) CHECK(alpha_eq(a, a));
  for (const auto& a : ts)
    for (const auto& b : ts) CHECK(alpha_eq(a, b) == alpha_eq(b, a));
}

TEST_CASE("free_vars") {
  Environment env{{"x", VarFlavor::Star, t_("nat")}, {"y", VarFlavor::Star, t_("nat")}};
  auto fv = free_vars(t_("plus(x, s(y))", env));
  CHECK(fv.size() == 2);
  CHECK(fv.count({"x", VarFlavor::Star}));
  CHECK(fv.count({"y", VarFlavor::Star}));
  CHECK(free_vars(t_("\\x:nat. x")).empty());
}

TEST_CASE("substitution") {
  Environment env{{"y", VarFlavor::Star, t_("nat")}};
  TermPtr a = t_("\\x:nat. plus(x, y)", env);
  TermPtr b = substitute(a, {{{"y", VarFlavor::Star}, mk_cons("0", {})}});
  CHECK(alpha_eq(b, t_("\\x:nat. plus(x, 0)")));

  // capture avoidance: substituting x under a binder named x renames the binder
  TermPtr c = t_("\\x:nat. y", env);
  TermPtr d = substitute(c, {{{"y", VarFlavor::Star}, mk_var("x")}});
  CHECK(d->kind == TermKind::Abs);
  CHECK(d->name != "x");
  CHECK(d->right->kind == TermKind::Var);
  CHECK(d->right->name == "x");

  CHECK(alpha_eq(substitute(a, {}), a));
}

TEST_CASE("substitution properties") {
  Environment env{{"x", VarFlavor::Star, t_("nat")}, {"y", VarFlavor::Star, t_("nat")}};
  TermPtr a = t_("plus(x, s(y))", env);
  Substitution th{{{"x", VarFlavor::Star}, t_("s(y)", env)},
                  {{"y", VarFlavor::Star}, mk_cons("0", {})}};
  auto fv = free_vars(substitute(a, th));
  // FV(aθ) ⊆ (FV(a)\dom θ) ∪ FV of used images
  for (const auto& v : fv) CHECK(v.name == "y");
  // α-congruence
  TermPtr l1 = t_("\\z:nat. plus(z, x)", env);
  TermPtr l2 = t_("\\w:nat. plus(w, x)", env);
  CHECK(alpha_eq(substitute(l1, th), substitute(l2, th)));
}

TEST_CASE("spine") {
  Environment env{{"w", VarFlavor::Star, t_("nat -> nat -> nat")},
                  {"f", VarFlavor::Star, t_("nat")},
                  {"g", VarFlavor::Star, t_("nat")}};
  auto [h1, a1] = spine(t_("(w f) g", env));
  CHECK(h1->kind == TermKind::Var);
  CHECK(h1->name == "w");
  REQUIRE(a1.size() == 2);
  CHECK(a1[0]->name == "f");
  CHECK(a1[1]->name == "g");

  TermPtr fa = t_("plus(0, 0)");
  auto [h2, a2] = spine(fa);
  CHECK(alpha_eq(h2, fa));  // symbol application is not an App node
  CHECK(a2.empty());

  auto [h3, a3] = spine(mk_var("x"));
  CHECK(h3->name == "x");
  CHECK(a3.empty());

  // re-application is the identity
  TermPtr rebuilt = h1;
  for (const auto& x : a1) rebuilt = mk_app(rebuilt, x);
  CHECK(alpha_eq(rebuilt, t_("(w f) g", env)));
}

TEST_CASE("show") {
  CHECK(show(t_("\\x:nat. x")) == "\\x:nat. x");
  CHECK(show(t_("!x:nat. nat")) == "nat -> nat");
  CHECK(show(t_("plus(0, s(0))")) == "plus(0, s(0))");
  CHECK(show(Position{}) == "e");
  CHECK(show(Position{1, 2}) == "1.2");
}

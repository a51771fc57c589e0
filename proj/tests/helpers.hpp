#ifndef CAC_TEST_HELPERS_HPP
#define CAC_TEST_HELPERS_HPP

#include <map>
#include <random>
#include <string>
#include <vector>

#include "cac/frontend.hpp"
#include "cac/rewriting.hpp"
#include "cac/schema.hpp"
#include "cac/signature.hpp"
#include "cac/term.hpp"
#include "cac/typing.hpp"

namespace cactest {

using namespace cac;

inline std::string data_path(const std::string& f) { return std::string(CAC_DATA_DIR) + "/" + f; }

// The bundled theory, elaborated once.
inline const Signature& theory() {
  static Signature sig = elaborate(parse_spec_file(data_path("paper.cac")));
  return sig;
}

inline TermPtr t_(const std::string& text, const Environment& env = {}) {
  return parse_term(theory(), text, env);
}

inline TermPtr num(int n) {
  TermPtr t = mk_cons("0", {});
  for (int i = 0; i < n; ++i) t = mk_cons("s", {t});
  return t;
}

inline int unnum(const TermPtr& t) {
  const Term* c = t.get();
  int n = 0;
  while (c->kind == TermKind::Cons && c->name == "s") {
    ++n;
    c = c->args[0].get();
  }
  if (c->kind != TermKind::Cons || c->name != "0") return -1;
  return n;
}

// Canonical renaming of free variables (traversal order) so rules can be
// compared up to renaming; bound variables are left to alpha_eq.
inline TermPtr canon_free(const TermPtr& a, std::map<VarKey, std::string>& names,
                          std::vector<std::string> bound = {}) {
  switch (a->kind) {
    case TermKind::Var: {
      for (const auto& b : bound)
        if (b == a->name) return a;
      VarKey k{a->name, a->flavor};
      auto it = names.find(k);
      if (it == names.end())
        it = names.emplace(k, "v" + std::to_string(names.size() + 1)).first;
      return mk_var(it->second, a->flavor);
    }
    case TermKind::Sort:
    case TermKind::Star:
    case TermKind::Box:
      return a;
    case TermKind::Abs:
    case TermKind::Prod: {
      auto dom = canon_free(a->left, names, bound);
      bound.push_back(a->name);
      auto body = canon_free(a->right, names, bound);
      return a->kind == TermKind::Abs ? mk_abs(a->name, dom, body, a->flavor)
                                      : mk_prod(a->name, dom, body, a->flavor);
    }
    case TermKind::App:
      return mk_app(canon_free(a->left, names, bound), canon_free(a->right, names, bound));
    case TermKind::Cons:
    case TermKind::Fun: {
      std::vector<TermPtr> args;
      for (const auto& x : a->args) args.push_back(canon_free(x, names, bound));
      return a->kind == TermKind::Cons ? mk_cons(a->name, args) : mk_fun(a->name, args);
    }
  }
  return a;
}

inline bool rule_eq_upto_renaming(const RewriteRule& a, const RewriteRule& b) {
  std::map<VarKey, std::string> na, nb;
  TermPtr la = canon_free(a.lhs, na), ra = canon_free(a.rhs, na);
  TermPtr lb = canon_free(b.lhs, nb), rb = canon_free(b.rhs, nb);
  return alpha_eq(la, lb) && alpha_eq(ra, rb);
}

// ---- random well-typed term generation over the bundled theory

struct TermGen {
  std::mt19937 rng;
  explicit TermGen(unsigned seed) : rng(seed) {}

  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); }

  // env: locally bound variables with their algebraic types
  TermPtr gen(const ATypePtr& want, int depth, std::vector<std::pair<std::string, ATypePtr>> env,
              int* fresh) {
    // try a variable of the wanted type
    if (depth <= 0 || pick(4) == 0) {
      std::vector<const std::pair<std::string, ATypePtr>*> fits;
      for (const auto& e : env)
        if (atype_eq(e.second, want)) fits.push_back(&e);
      if (!fits.empty()) return mk_var(fits[static_cast<size_t>(pick((int)fits.size()))]->first);
    }
    if (!want->is_sort()) {
      // abstraction, or occasionally an applied symbol is not available: always lambda
      std::string x = "z" + std::to_string((*fresh)++);
      env.push_back({x, want->left});
      return mk_abs(x, atype_to_term(want->left), gen(want->right, depth - 1, env, fresh));
    }
    const std::string& s = want->sort;
    // occasionally wrap in a beta-redex of the same type
    if (depth > 1 && pick(6) == 0) {
      std::string x = "z" + std::to_string((*fresh)++);
      ATypePtr dom = mk_asort("nat");
      auto body_env = env;
      body_env.push_back({x, dom});
      TermPtr body = gen(want, depth - 1, body_env, fresh);
      TermPtr arg = gen(dom, depth - 1, env, fresh);
      return mk_app(mk_abs(x, atype_to_term(dom), body), arg);
    }
    struct Choice {
      std::string name;
      bool is_cons;
      std::vector<ATypePtr> args;
    };
    std::vector<Choice> cs;
    const Signature& sig = theory();
    for (const auto& [n, c] : sig.constructors)
      if (c.output_sort == s && (depth > 0 || c.arity() == 0))
        cs.push_back({n, true, c.arg_types});
    if (depth > 0)
      for (const auto& [n, f] : sig.functions)
        if (f.output_type->is_sort() && f.output_type->sort == s && n != "ack")  // ack explodes
          cs.push_back({n, false, f.arg_types});
    if (cs.empty()) {
      // fall back: bind a variable via lambda-application
      std::string x = "z" + std::to_string((*fresh)++);
      (void)x;
      return mk_cons("0", {});  // unreachable for the bundled theory's sorts
    }
    const Choice& c = cs[static_cast<size_t>(pick((int)cs.size()))];
    std::vector<TermPtr> args;
    for (const auto& at : c.args) args.push_back(gen(at, depth - 1, env, fresh));
    return c.is_cons ? mk_cons(c.name, args) : mk_fun(c.name, args);
  }

  TermPtr closed(int depth) {
    static const std::vector<std::string> sorts = {"nat", "bool", "list<nat>", "list<bool>",
                                                   "ord"};
    int fresh = 0;
    return gen(mk_asort(sorts[static_cast<size_t>(pick((int)sorts.size()))]), depth, {}, &fresh);
  }
};

}  // namespace cactest

#endif

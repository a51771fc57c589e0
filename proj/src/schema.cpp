#include "cac/schema.hpp"

#include <algorithm>
#include <sstream>

#include "cac/typing.hpp"

namespace cac {

std::optional<ATypePtr> algebraic_type_of(const Signature& sig, const AlgEnv& env,
                                          const TermPtr& a) {
  switch (a->kind) {
    case TermKind::Var: {
      const ATypePtr* t = alg_lookup(env, a->name);
      if (!t) return std::nullopt;
      return *t;
    }
    case TermKind::Cons: {
      const ConstructorDecl* c = sig.find_cons(a->name);
      if (!c || static_cast<int>(a->args.size()) != c->arity()) return std::nullopt;
      for (size_t i = 0; i < a->args.size(); ++i) {
        auto t = algebraic_type_of(sig, env, a->args[i]);
        if (!t || !atype_eq(*t, c->arg_types[i])) return std::nullopt;
      }
      return mk_asort(c->output_sort);
    }
    case TermKind::Fun: {
      const FunctionDecl* f = sig.find_fun(a->name);
      if (!f || static_cast<int>(a->args.size()) != f->arity()) return std::nullopt;
      for (size_t i = 0; i < a->args.size(); ++i) {
        auto t = algebraic_type_of(sig, env, a->args[i]);
        if (!t || !atype_eq(*t, f->arg_types[i])) return std::nullopt;
      }
      return f->output_type;
    }
    case TermKind::App: {
      auto tu = algebraic_type_of(sig, env, a->left);
      auto tv = algebraic_type_of(sig, env, a->right);
      if (!tu || !tv || (*tu)->is_sort() || !atype_eq((*tu)->left, *tv)) return std::nullopt;
      return (*tu)->right;
    }
    case TermKind::Abs: {
      auto dom = term_to_atype(a->left);
      if (!dom) return std::nullopt;
      AlgEnv env2 = env;
      env2.push_back({a->name, *dom});
      auto tb = algebraic_type_of(sig, env2, a->right);
      if (!tb) return std::nullopt;
      return mk_arrow(*dom, *tb);
    }
    default:
      return std::nullopt;
  }
}

bool is_gamma_s_term(const Signature& sig, const AlgEnv& env, const std::string& s,
                     const TermPtr& a) {
  auto t = algebraic_type_of(sig, env, a);
  return t && occurs_positively(s, *t);
}

TermPtr critical_subterm(const Signature& sig, const AlgEnv& env, const std::string& s,
                         const TermPtr& a) {
  if (!is_gamma_s_term(sig, env, s, a))
    throw Error("not-a-gamma-s-term", show(a) + " w.r.t. " + s);
  auto [head, args] = spine(a);
  std::vector<TermPtr> prefixes{head};
  for (const auto& x : args) prefixes.push_back(mk_app(prefixes.back(), x));
  size_t k = prefixes.size() - 1;
  while (k > 0 && is_gamma_s_term(sig, env, s, prefixes[k - 1])) --k;
  return prefixes[k];
}

namespace {

bool gamma_dfs(const Signature& sig, AlgEnv& env, const std::string& s, const TermPtr& cur,
               const TermPtr& target, bool is_root) {
  if (!is_gamma_s_term(sig, env, s, cur)) return false;
  if (!is_root && alpha_eq(cur, target)) return true;
  bool binder = cur->kind == TermKind::Abs;
  for (int i = 1; i <= child_count(*cur); ++i) {
    size_t pushed = 0;
    if (binder && i == 2) {
      auto dom = term_to_atype(cur->left);
      if (!dom) continue;
      env.push_back({cur->name, *dom});
      pushed = 1;
    }
    bool found = gamma_dfs(sig, env, s, child_at(cur, i), target, false);
    for (size_t k = 0; k < pushed; ++k) env.pop_back();
    if (found) return true;
  }
  return false;
}

}  // namespace

bool gamma_s_greater(const Signature& sig, const AlgEnv& env, const std::string& s,
                     const TermPtr& a, const TermPtr& b) {
  AlgEnv e = env;
  return gamma_dfs(sig, e, s, a, b, true);
}

bool proper_subterm(const TermPtr& a, const TermPtr& b) {
  for (int i = 1; i <= child_count(*a); ++i) {
    TermPtr c = child_at(a, i);
    if (alpha_eq(c, b) || proper_subterm(c, b)) return true;
  }
  return false;
}

namespace {

bool multiset_greater(const TermOrder& gt, std::vector<TermPtr> m, std::vector<TermPtr> n) {
  // cancel alpha-equal elements pairwise
  for (size_t i = 0; i < m.size();) {
    bool cancelled = false;
    for (size_t j = 0; j < n.size(); ++j) {
      if (alpha_eq(m[i], n[j])) {
        m.erase(m.begin() + static_cast<long>(i));
        n.erase(n.begin() + static_cast<long>(j));
        cancelled = true;
        break;
      }
    }
    if (!cancelled) ++i;
  }
  if (m.empty()) return false;
  for (const auto& y : n) {
    bool dominated = false;
    for (const auto& x : m)
      if (gt(x, y)) {
        dominated = true;
        break;
      }
    if (!dominated) return false;
  }
  return true;
}

}  // namespace

bool compare_status(const Status& stat, const std::set<int>& inductive,
                    const std::map<int, TermOrder>& indexed_orders, const TermOrder& base,
                    const std::vector<TermPtr>& lhs, const std::vector<TermPtr>& rhs) {
  if (lhs.size() != rhs.size()) throw Error("malformed-status", "tuple length mismatch");
  auto at = [&](const std::vector<TermPtr>& v, int i) -> const TermPtr& {
    if (i < 1 || i > static_cast<int>(v.size()))
      throw Error("malformed-status", "argument index x" + std::to_string(i) + " out of range");
    return v[static_cast<size_t>(i) - 1];
  };
  for (const auto& entry : stat.entries) {
    if (!entry.multiset) {
      int i = entry.indices[0];
      const TermOrder& gt =
          inductive.count(i) && indexed_orders.count(i) ? indexed_orders.at(i) : base;
      if (gt(at(lhs, i), at(rhs, i))) return true;
      if (!alpha_eq(at(lhs, i), at(rhs, i))) return false;
    } else {
      std::vector<TermPtr> m, n;
      for (int i : entry.indices) {
        m.push_back(at(lhs, i));
        n.push_back(at(rhs, i));
      }
      if (multiset_greater(base, m, n)) return true;
      // continue only when the two multisets are equal
      bool equal = m.size() == n.size();
      if (equal) {
        std::vector<TermPtr> n2 = n;
        for (const auto& x : m) {
          bool found = false;
          for (size_t j = 0; j < n2.size(); ++j)
            if (alpha_eq(x, n2[j])) {
              n2.erase(n2.begin() + static_cast<long>(j));
              found = true;
              break;
            }
          if (!found) {
            equal = false;
            break;
          }
        }
      }
      if (!equal) return false;
    }
  }
  return false;
}

bool critical_greater(const Signature& sig, const FunctionDecl& f, const AlgEnv& env,
                      const std::vector<TermPtr>& lhs_args,
                      const std::vector<TermPtr>& rhs_args) {
  if (!f.status) throw Error("malformed-status", f.name + " has no status");
  const Status& stat = *f.status;
  std::set<int> lexpos = stat.lexicographic_positions();
  std::set<int> ind;
  if (f.inductive_positions)
    for (int i : *f.inductive_positions)
      if (lexpos.count(i)) ind.insert(i);

  auto interp = [&](const std::vector<TermPtr>& args,
                    std::vector<TermPtr>& out) -> bool {
    out = args;
    for (int i : ind) {
      const ATypePtr& si = f.arg_types[static_cast<size_t>(i) - 1];
      if (!si->is_sort())
        throw Error("malformed-status",
                    f.name + ": inductive position " + std::to_string(i) + " has non-sort type " +
                        show(si));
      try {
        out[static_cast<size_t>(i) - 1] =
            critical_subterm(sig, env, si->sort, args[static_cast<size_t>(i) - 1]);
      } catch (const Error&) {
        return false;
      }
    }
    return true;
  };

  std::vector<TermPtr> phi_l, phi_r;
  if (!interp(lhs_args, phi_l) || !interp(rhs_args, phi_r)) return false;
  // the schema requires lhs arguments to equal their own interpretation
  for (size_t i = 0; i < lhs_args.size(); ++i)
    if (!alpha_eq(phi_l[i], lhs_args[i])) return false;

  TermOrder base = [](const TermPtr& a, const TermPtr& b) { return proper_subterm(a, b); };
  std::map<int, TermOrder> orders;
  for (int i : ind) {
    std::string s = f.arg_types[static_cast<size_t>(i) - 1]->sort;
    orders[i] = [&sig, env, s](const TermPtr& a, const TermPtr& b) {
      return gamma_s_greater(sig, env, s, a, b);
    };
  }
  return compare_status(stat, ind, orders, base, phi_l, phi_r);
}

namespace {

bool is_basic_sort_type(const Signature& sig, const ATypePtr& t) {
  return t->is_sort() && sig.has_sort(t->sort) &&
         classify_sort(sig, t->sort).cls == SortClass::Basic;
}

void accessible_rec(const Signature& sig, AlgEnv& env, const TermPtr& c, bool ctor_path,
                    std::vector<TermPtr>& out) {
  auto add = [&](const TermPtr& t) {
    for (const auto& x : out)
      if (alpha_eq(x, t)) return;
    out.push_back(t);
  };
  if (ctor_path) add(c);
  else {
    auto t = algebraic_type_of(sig, env, c);
    if (t && is_basic_sort_type(sig, *t)) add(c);
  }
  bool keep_path = ctor_path && c->kind == TermKind::Cons;
  bool binder = c->kind == TermKind::Abs || c->kind == TermKind::Prod;
  for (int i = 1; i <= child_count(*c); ++i) {
    size_t pushed = 0;
    if (binder && i == 2) {
      auto dom = term_to_atype(c->left);
      if (!dom) continue;
      env.push_back({c->name, *dom});
      pushed = 1;
    }
    accessible_rec(sig, env, child_at(c, i), keep_path, out);
    for (size_t k = 0; k < pushed; ++k) env.pop_back();
  }
}

}  // namespace

std::vector<TermPtr> accessible_subterms(const Signature& sig, const AlgEnv& env,
                                         const std::vector<TermPtr>& cs) {
  std::vector<TermPtr> out;
  AlgEnv e = env;
  for (const auto& c : cs) accessible_rec(sig, e, c, true, out);
  return out;
}

namespace {

struct ClosureChecker {
  const Signature& sig;
  const ClosureGoal& goal;
  const FunctionDecl& fdecl;
  std::vector<TermPtr> accessible;
  std::set<VarKey> lhs_vars;
  std::vector<std::string> trace;
  std::string reason;

  bool note(const TermPtr& e, const std::string& why) {
    trace.push_back(show(e) + "  [" + why + "]");
    return true;
  }

  bool fail(const TermPtr& e, const std::string& why) {
    if (reason.empty()) reason = show(e) + ": " + why;
    return false;
  }

  bool contains(const TermPtr& e, int red_depth) {
    for (const auto& a : accessible)
      if (alpha_eq(a, e)) return note(e, "accessible");
    if (e->kind == TermKind::Var) {
      VarKey k{e->name, e->flavor};
      if (!lhs_vars.count(k) && alg_lookup(goal.env, e->name))
        return note(e, "environment variable outside the lhs");
      return fail(e, "variable neither accessible nor outside FV(lhs)");
    }
    switch (e->kind) {
      case TermKind::Cons: {
        const ConstructorDecl* c = sig.find_cons(e->name);
        if (!c || static_cast<int>(e->args.size()) != c->arity())
          return fail(e, "unknown constructor or arity mismatch");
        for (size_t i = 0; i < e->args.size(); ++i)
          if (!contains(e->args[i], red_depth)) return false;
        return note(e, "constructor application");
      }
      case TermKind::Fun: {
        const FunctionDecl* g = sig.find_fun(e->name);
        if (!g || static_cast<int>(e->args.size()) != g->arity())
          return fail(e, "unknown symbol or arity mismatch");
        if (e->name == goal.fun) {
          for (size_t i = 0; i < e->args.size(); ++i)
            if (!contains(e->args[i], red_depth)) return false;
          bool dec;
          try {
            dec = critical_greater(sig, fdecl, goal.env, goal.lhs_args, e->args);
          } catch (const Error& err) {
            return fail(e, err.what());
          }
          if (!dec) return fail(e, "recursive call arguments do not decrease");
          return note(e, "recursive call");
        }
        if (sig.fun_geq(e->name, goal.fun))
          return fail(e, e->name + " is not smaller than " + goal.fun + " in >_F");
        for (size_t i = 0; i < e->args.size(); ++i)
          if (!contains(e->args[i], red_depth)) return false;
        return note(e, "smaller defined symbol");
      }
      case TermKind::App: {
        auto tu = algebraic_type_of(sig, goal.env, e->left);
        auto tv = algebraic_type_of(sig, goal.env, e->right);
        if (tu && tv && !(*tu)->is_sort() && atype_eq((*tu)->left, *tv)) {
          if (contains(e->left, red_depth) && contains(e->right, red_depth))
            return note(e, "application");
        } else {
          fail(e, "application parts have no matching simple types");
        }
        break;
      }
      case TermKind::Abs: {
        auto dom = term_to_atype(e->left);
        const ATypePtr* declared = dom ? alg_lookup(goal.env, e->name) : nullptr;
        if (dom && declared && atype_eq(*declared, *dom)) {
          if (contains(e->right, red_depth)) return note(e, "abstraction");
        } else {
          fail(e, "abstraction binder not declared in the environment");
        }
        break;
      }
      default:
        fail(e, "no closure case applies");
        break;
    }
    // bounded reduction-case search: e as a one-step reduct of a closure term
    if (red_depth > 0) {
      for (const auto& r : sig.rules) {
        if (r.head == goal.fun || sig.fun_geq(r.head, goal.fun)) continue;
        const auto* hd = sig.find_fun(r.head);
        if (!hd || !hd->higher_order) continue;
        std::set<VarKey> lv = free_vars(r.lhs), rv = free_vars(r.rhs);
        if (!std::includes(rv.begin(), rv.end(), lv.begin(), lv.end())) continue;
        for (const auto& p : all_positions(e)) {
          auto sub = subterm_at(e, p);
          auto theta = match_pattern(r.rhs, sub);
          if (!theta) continue;
          TermPtr expanded = replace_at(e, p, substitute(r.lhs, *theta));
          if (contains(expanded, red_depth - 1)) return note(e, "reduct of " + show(expanded));
        }
      }
    }
    return false;
  }
};

}  // namespace

ClosureResult closure_contains(const Signature& sig, const ClosureGoal& goal) {
  const FunctionDecl* f = sig.find_fun(goal.fun);
  if (!f) throw Error("unknown-symbol", goal.fun);
  ClosureChecker ck{sig, goal, *f, accessible_subterms(sig, goal.env, goal.lhs_args), {}, {}, ""};
  for (const auto& c : goal.lhs_args)
    for (const auto& v : free_vars(c)) ck.lhs_vars.insert(v);
  ClosureResult res;
  res.accepted = ck.contains(goal.candidate, goal.reduction_search_depth);
  res.trace = ck.trace;
  res.reason = ck.reason;
  return res;
}

namespace {

// top-down propagation of declared argument types through a rule lhs
void propagate(const Signature& sig, const TermPtr& t, const ATypePtr& expected,
               std::map<std::string, ATypePtr>& vars, AlgEnv& bound) {
  switch (t->kind) {
    case TermKind::Var: {
      const ATypePtr* b = alg_lookup(bound, t->name);
      if (b) {
        if (!atype_eq(*b, expected))
          throw Error("ill-typed-lhs", "bound " + t->name + ": " + show(*b) + " vs " + show(expected));
        return;
      }
      auto it = vars.find(t->name);
      if (it != vars.end()) {
        if (!atype_eq(it->second, expected))
          throw Error("ill-typed-lhs", t->name + ": " + show(it->second) + " vs " + show(expected));
      } else {
        vars[t->name] = expected;
      }
      return;
    }
    case TermKind::Cons: {
      const ConstructorDecl* c = sig.find_cons(t->name);
      if (!c) throw Error("ill-typed-lhs", "unknown constructor " + t->name);
      if (static_cast<int>(t->args.size()) != c->arity())
        throw Error("ill-typed-lhs", "arity of " + t->name);
      if (!expected->is_sort() || expected->sort != c->output_sort)
        throw Error("ill-typed-lhs",
                    t->name + " constructs " + c->output_sort + ", expected " + show(expected));
      for (size_t i = 0; i < t->args.size(); ++i)
        propagate(sig, t->args[i], c->arg_types[i], vars, bound);
      return;
    }
    case TermKind::Fun: {
      const FunctionDecl* f = sig.find_fun(t->name);
      if (!f) throw Error("ill-typed-lhs", "unknown symbol " + t->name);
      if (static_cast<int>(t->args.size()) != f->arity())
        throw Error("ill-typed-lhs", "arity of " + t->name);
      if (!atype_eq(f->output_type, expected))
        throw Error("ill-typed-lhs",
                    t->name + " returns " + show(f->output_type) + ", expected " + show(expected));
      for (size_t i = 0; i < t->args.size(); ++i)
        propagate(sig, t->args[i], f->arg_types[i], vars, bound);
      return;
    }
    case TermKind::Abs: {
      auto dom = term_to_atype(t->left);
      if (!dom) throw Error("ill-typed-lhs", "non-algebraic binder annotation");
      if (expected->is_sort() || !atype_eq(expected->left, *dom))
        throw Error("ill-typed-lhs", "abstraction where " + show(expected) + " expected");
      bound.push_back({t->name, *dom});
      propagate(sig, t->right, expected->right, vars, bound);
      bound.pop_back();
      return;
    }
    case TermKind::App: {
      // need the function part's type bottom-up from what is known so far
      AlgEnv env;
      for (const auto& [x, ty] : vars) env.push_back({x, ty});
      for (const auto& [x, ty] : bound) env.push_back({x, ty});
      auto tv = algebraic_type_of(sig, env, t->right);
      if (tv) {
        propagate(sig, t->left, mk_arrow(*tv, expected), vars, bound);
        return;
      }
      auto tu = algebraic_type_of(sig, env, t->left);
      if (tu && !(*tu)->is_sort() && atype_eq((*tu)->right, expected)) {
        propagate(sig, t->right, (*tu)->left, vars, bound);
        return;
      }
      throw Error("ill-typed-lhs", "cannot infer the type of " + show(t));
    }
    default:
      throw Error("ill-typed-lhs", show(t) + " is not a rule term");
  }
}

}  // namespace

AlgEnv infer_rule_env(const Signature& sig, const TermPtr& lhs) {
  if (lhs->kind != TermKind::Fun)
    throw Error("ill-typed-lhs", "lhs must be headed by a function symbol");
  const FunctionDecl* f = sig.find_fun(lhs->name);
  if (!f) throw Error("ill-typed-lhs", "unknown symbol " + lhs->name);
  if (static_cast<int>(lhs->args.size()) != f->arity())
    throw Error("ill-typed-lhs", "arity of " + lhs->name);
  std::map<std::string, ATypePtr> vars;
  AlgEnv bound;
  for (size_t i = 0; i < lhs->args.size(); ++i)
    propagate(sig, lhs->args[i], f->arg_types[i], vars, bound);
  // order by first occurrence in the lhs
  AlgEnv env;
  std::set<std::string> emitted;
  std::function<void(const TermPtr&)> emit = [&](const TermPtr& t) {
    if (t->kind == TermKind::Var && vars.count(t->name) && !emitted.count(t->name)) {
      emitted.insert(t->name);
      env.push_back({t->name, vars[t->name]});
    }
    for (int i = 1; i <= child_count(*t); ++i) emit(child_at(t, i));
  };
  emit(lhs);
  return env;
}

AdmissibilityResult check_admissible(const Signature& sig, const RewriteRule& r, long fuel) {
  AdmissibilityResult res;
  try {
    res.rule_env = r.rule_env.empty() ? infer_rule_env(sig, r.lhs) : r.rule_env;
  } catch (const Error& e) {
    res.code = "ill-typed-lhs";
    res.detail = e.what();
    return res;
  }
  auto lv = free_vars(r.lhs);
  for (const auto& v : free_vars(r.rhs)) {
    if (!lv.count(v)) {
      res.code = "free-variable";
      res.detail = v.name + " occurs in the rhs but not in the lhs";
      return res;
    }
  }
  const FunctionDecl* f = sig.find_fun(r.head);
  if (!f) {
    res.code = "ill-typed-lhs";
    res.detail = "unknown head symbol " + r.head;
    return res;
  }
  try {
    Environment env = alg_to_env(res.rule_env);
    if (!check(sig, env, r.rhs, atype_to_term(f->output_type), InferOpts{fuel, nullptr})) {
      res.code = "rhs-type";
      res.detail = "rhs does not have the head's output type " + show(f->output_type);
      return res;
    }
  } catch (const Error& e) {
    res.code = "rhs-type";
    res.detail = e.what();
    return res;
  }
  res.ok = true;
  res.code = "ok";
  return res;
}

namespace {

int sym_prec(const RpoParams& p, const std::string& s) {
  auto it = p.precedence.find(s);
  return it == p.precedence.end() ? 0 : it->second;
}

bool rpo_ge(const RpoParams& p, const TermPtr& a, const TermPtr& b);

bool lex_greater(const RpoParams& p, const std::vector<TermPtr>& as,
                 const std::vector<TermPtr>& bs) {
  for (size_t i = 0; i < std::min(as.size(), bs.size()); ++i) {
    if (rpo_greater(p, as[i], bs[i])) return true;
    if (!alpha_eq(as[i], bs[i])) return false;
  }
  return as.size() > bs.size();
}

}  // namespace

bool rpo_greater(const RpoParams& params, const TermPtr& a, const TermPtr& b) {
  if (a->kind == TermKind::Var) return false;
  if (b->kind == TermKind::Var)
    return free_vars(a).count(VarKey{b->name, b->flavor}) > 0;
  if (a->kind != TermKind::Cons && a->kind != TermKind::Fun) return false;
  if (b->kind != TermKind::Cons && b->kind != TermKind::Fun) return false;
  for (const auto& ai : a->args)
    if (rpo_ge(params, ai, b)) return true;
  int pa = sym_prec(params, a->name), pb = sym_prec(params, b->name);
  if (pa > pb) {
    for (const auto& bi : b->args)
      if (!rpo_greater(params, a, bi)) return false;
    return true;
  }
  if (a->name == b->name) {
    bool mul = params.multiset_symbols.count(a->name) > 0;
    if (mul) {
      TermOrder gt = [&params](const TermPtr& x, const TermPtr& y) {
        return rpo_greater(params, x, y);
      };
      return multiset_greater(gt, a->args, b->args);
    }
    if (!lex_greater(params, a->args, b->args)) return false;
    for (const auto& bi : b->args)
      if (!rpo_greater(params, a, bi)) return false;
    return true;
  }
  return false;
}

namespace {
bool rpo_ge(const RpoParams& p, const TermPtr& a, const TermPtr& b) {
  return alpha_eq(a, b) || rpo_greater(p, a, b);
}
}  // namespace

RpoParams default_rpo_params(const Signature& sig) {
  // rank = longest path in the condensed symbol-dependency graph; a defined
  // symbol sits above everything occurring in its rules
  std::map<std::string, std::set<std::string>> g;
  for (const auto& [n, c] : sig.constructors) g[n];
  for (const auto& [n, f] : sig.functions) g[n];
  std::function<void(const std::string&, const TermPtr&)> collect =
      [&](const std::string& head, const TermPtr& t) {
        if ((t->kind == TermKind::Cons || t->kind == TermKind::Fun) && t->name != head)
          g[head].insert(t->name);
        for (int i = 1; i <= child_count(*t); ++i) collect(head, child_at(t, i));
      };
  for (const auto& r : sig.rules) {
    collect(r.head, r.lhs);
    collect(r.head, r.rhs);
  }
  std::map<std::string, int> rank;
  std::map<std::string, int> state;  // 0 new, 1 visiting, 2 done
  std::function<int(const std::string&)> dfs = [&](const std::string& v) -> int {
    if (state[v] == 2) return rank[v];
    if (state[v] == 1) return 0;  // cycle: flatten to the same rank
    state[v] = 1;
    int best = 0;
    for (const auto& w : g[v]) best = std::max(best, 1 + dfs(w));
    state[v] = 2;
    rank[v] = best;
    return best;
  };
  RpoParams p;
  for (const auto& [v, _] : g) p.precedence[v] = dfs(v);
  return p;
}

std::string SchemaReport::to_text() const {
  std::ostringstream os;
  os << "first-order part: conservativity " << (fo_conservative ? "ok" : "FAILED")
     << ", termination " << (fo_terminating ? "ok" : "FAILED");
  if (!fo_detail.empty()) os << " (" << fo_detail << ")";
  os << "\n";
  for (const auto& v : rules)
    os << "rule " << v.rule << ": " << (v.pass ? "accepted" : "rejected (" + v.code + ")")
       << (v.detail.empty() ? "" : " — " + v.detail) << "\n";
  os << overlaps.to_text() << "\n";
  os << "general schema: " << (pass ? "PASS" : "FAIL");
  return os.str();
}

std::string SchemaReport::to_machine() const {
  std::ostringstream os;
  for (const auto& v : rules)
    os << "RULE " << v.rule << " " << (v.pass ? "PASS" : "FAIL") << " "
       << (v.pass ? "ok" : v.code) << "\n";
  os << "FO " << (fo_conservative && fo_terminating ? "PASS" : "FAIL") << " "
     << (fo_conservative ? (fo_terminating ? "ok" : "fo-termination") : "conservativity")
     << "\n";
  os << "OVERLAPS " << (overlaps.ok() ? "PASS" : "FAIL") << "\n";
  os << "SCHEMA " << (pass ? "PASS" : "FAIL");
  return os.str();
}

namespace {

// binder annotations of every abstraction in a term, for the closure env
void collect_binders(const TermPtr& t, AlgEnv& env) {
  if (t->kind == TermKind::Abs) {
    auto dom = term_to_atype(t->left);
    if (dom) env.push_back({t->name, *dom});
  }
  for (int i = 1; i <= child_count(*t); ++i) collect_binders(child_at(t, i), env);
}

FunctionDecl with_default_status(const Signature& sig, const FunctionDecl& f, bool fallback) {
  FunctionDecl d = f;
  if (!d.status) {
    Status st;
    if (fallback) {
      StatusEntry e;
      e.multiset = true;
      for (int i = 1; i <= d.arity(); ++i) e.indices.push_back(i);
      st.entries.push_back(e);
    } else {
      for (int i = 1; i <= d.arity(); ++i) st.entries.push_back({false, {i}});
    }
    d.status = st;
  }
  if (!d.inductive_positions) {
    std::set<int> ind;
    if (!fallback) {
      for (int i = 1; i <= d.arity(); ++i) {
        const auto& at = d.arg_types[static_cast<size_t>(i) - 1];
        if (at->is_sort() && sig.has_sort(at->sort) &&
            classify_sort(sig, at->sort).cls != SortClass::Rejected)
          ind.insert(i);
      }
    }
    d.inductive_positions = ind;
  }
  return d;
}

}  // namespace

SchemaReport check_general_schema(const Signature& sig, const SchemaOptions& opts) {
  SchemaReport rep;

  std::vector<const RewriteRule*> fo, ho;
  for (const auto& r : sig.rules)
    (r.order == RuleOrder::First ? fo : ho).push_back(&r);

  // clause (i): conservativity
  for (const auto* r : fo) {
    auto c = check_conservative(*r);
    RuleVerdict v{r->name, true, "ok", ""};
    if (!c.ok) {
      v.pass = false;
      v.code = "conservativity";
      v.detail = "variable " + c.variable + " occurs " + std::to_string(c.lhs_count) +
                 " time(s) in the lhs but " + std::to_string(c.rhs_count) +
                 " time(s) in the rhs; declare the symbol higher-order to lift the restriction";
      rep.fo_conservative = false;
    }
    rep.rules.push_back(v);
  }

  // clause (i): first-order termination via RPO unless assumed
  if (!fo.empty() && !opts.assume_fo_terminating) {
    auto try_params = [&](const RpoParams& p, std::string* failing) {
      for (const auto* r : fo) {
        if (!rpo_greater(p, r->lhs, r->rhs)) {
          if (failing) *failing = r->name;
          return false;
        }
      }
      return true;
    };
    RpoParams p = default_rpo_params(sig);
    std::string failing;
    bool ok = try_params(p, &failing);
    if (!ok) {
      // small perturbation search: multiset status for heads of failing rules
      std::set<std::string> heads;
      for (const auto* r : fo) heads.insert(r->head);
      for (const auto& h : heads) {
        RpoParams q = p;
        q.multiset_symbols.insert(h);
        if (try_params(q, nullptr)) {
          ok = true;
          p = q;
          break;
        }
      }
      if (!ok) {
        RpoParams q = p;
        q.multiset_symbols = heads;
        ok = try_params(q, &failing);
      }
    }
    rep.fo_terminating = ok;
    if (!ok) {
      rep.fo_detail = "no RPO found; first failing rule: " + failing +
                      " (use --assume-fo-terminating if proved externally)";
      for (auto& v : rep.rules)
        if (v.rule == failing && v.pass) {
          v.pass = false;
          v.code = "fo-termination";
        }
    }
  }

  // clause (ii): admissibility + computable closure per higher-order rule
  for (const auto* r : ho) {
    RuleVerdict v{r->name, false, "", ""};
    auto adm = check_admissible(sig, *r, opts.fuel);
    if (!adm.ok) {
      v.code = adm.code;
      v.detail = adm.detail;
      rep.rules.push_back(v);
      continue;
    }
    const FunctionDecl* f = sig.find_fun(r->head);
    bool accepted = false;
    std::string reason;
    for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
      if (attempt == 1 && f->status) break;  // user-supplied status is not overridden
      Signature sig2 = sig;
      sig2.functions[r->head] = with_default_status(sig, *f, attempt == 1);
      ClosureGoal goal;
      goal.fun = r->head;
      goal.env = adm.rule_env;
      collect_binders(r->rhs, goal.env);
      collect_binders(r->lhs, goal.env);
      goal.lhs_args = r->lhs->args;
      goal.candidate = r->rhs;
      goal.reduction_search_depth = opts.closure_reduction_depth;
      auto res = closure_contains(sig2, goal);
      if (res.accepted) accepted = true;
      else if (reason.empty()) reason = res.reason;
    }
    if (accepted) {
      v.pass = true;
      v.code = "ok";
    } else {
      v.code = "closure";
      v.detail = reason;
    }
    rep.rules.push_back(v);
  }

  rep.overlaps = check_overlaps(sig, opts.fuel);

  rep.pass = rep.fo_conservative && rep.fo_terminating && rep.overlaps.ok();
  for (const auto& v : rep.rules)
    if (!v.pass) rep.pass = false;
  return rep;
}

}  // namespace cac

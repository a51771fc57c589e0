#include "cac/rewriting.hpp"

#include <algorithm>
#include <sstream>

namespace cac {

namespace {

struct BinderPair {
  VarKey pat, subj;
};

bool contains_var(const TermPtr& t, const VarKey& v) {
  return free_vars(t).count(v) > 0;
}

bool match_rec(const TermPtr& p, const TermPtr& s, Substitution& theta,
               std::vector<BinderPair>& binders) {
  if (p->kind == TermKind::Var) {
    VarKey pk{p->name, p->flavor};
    for (auto it = binders.rbegin(); it != binders.rend(); ++it) {
      if (it->pat == pk)
        return s->kind == TermKind::Var && VarKey{s->name, s->flavor} == it->subj;
    }
    // free pattern variable: image may not mention subject-bound variables
    for (const auto& bp : binders)
      if (contains_var(s, bp.subj)) return false;
    auto it = theta.find(pk);
    if (it != theta.end()) return alpha_eq(it->second, s);
    theta[pk] = s;
    return true;
  }
  if (p->kind != s->kind) return false;
  switch (p->kind) {
    case TermKind::Sort:
      return p->name == s->name;
    case TermKind::Star:
    case TermKind::Box:
      return true;
    case TermKind::Abs:
    case TermKind::Prod: {
      if (!match_rec(p->left, s->left, theta, binders)) return false;
      binders.push_back({{p->name, p->flavor}, {s->name, s->flavor}});
      bool ok = match_rec(p->right, s->right, theta, binders);
      binders.pop_back();
      return ok;
    }
    case TermKind::App:
      return match_rec(p->left, s->left, theta, binders) &&
             match_rec(p->right, s->right, theta, binders);
    case TermKind::Cons:
    case TermKind::Fun: {
      if (p->name != s->name || p->args.size() != s->args.size()) return false;
      for (size_t i = 0; i < p->args.size(); ++i)
        if (!match_rec(p->args[i], s->args[i], theta, binders)) return false;
      return true;
    }
    default:
      return false;
  }
}

std::optional<std::pair<TermPtr, ReductionStep>> redex_here(const Signature& sig,
                                                            const TermPtr& a) {
  if (a->kind == TermKind::App && a->left->kind == TermKind::Abs) {
    ReductionStep st;
    st.beta = true;
    st.before = a;
    st.after = subst1(a->left->right, a->left->name, a->left->flavor, a->right);
    return std::make_pair(st.after, st);
  }
  if (a->kind == TermKind::Fun || a->kind == TermKind::Cons) {
    for (const auto& r : sig.rules) {
      if (a->kind != TermKind::Fun || r.head != a->name) continue;
      auto theta = match_pattern(r.lhs, a);
      if (theta) {
        ReductionStep st;
        st.beta = false;
        st.rule_name = r.name;
        st.matched = *theta;
        st.before = a;
        st.after = substitute(r.rhs, *theta);
        return std::make_pair(st.after, st);
      }
    }
  }
  return std::nullopt;
}

std::optional<std::pair<TermPtr, ReductionStep>> step_rec(const Signature& sig, const TermPtr& a,
                                                          Strategy strat, Position& here) {
  if (strat == Strategy::Outermost) {
    if (auto r = redex_here(sig, a)) {
      r->second.position = here;
      return r;
    }
  }
  for (int i = 1; i <= child_count(*a); ++i) {
    here.push_back(i);
    if (auto r = step_rec(sig, child_at(a, i), strat, here)) {
      Position sub(here.begin(), here.end());
      here.pop_back();
      r->first = replace_at(a, Position{i}, r->first);
      return r;
    }
    here.pop_back();
  }
  if (strat == Strategy::Innermost) {
    if (auto r = redex_here(sig, a)) {
      r->second.position = here;
      return r;
    }
  }
  return std::nullopt;
}

}  // namespace

std::optional<Substitution> match_pattern(const TermPtr& pattern, const TermPtr& subject) {
  Substitution theta;
  std::vector<BinderPair> binders;
  if (match_rec(pattern, subject, theta, binders)) return theta;
  return std::nullopt;
}

std::optional<std::pair<TermPtr, ReductionStep>> step(const Signature& sig, const TermPtr& a,
                                                      Strategy strat) {
  Position here;
  return step_rec(sig, a, strat, here);
}

TermPtr normalize(const Signature& sig, const TermPtr& a, long fuel, Strategy strat,
                  const TraceFn& trace) {
  TermPtr cur = a;
  for (long used = 0;; ++used) {
    if (used >= fuel) throw Error("fuel-exhausted", "after " + std::to_string(fuel) + " steps on " + show(a));
    auto r = step(sig, cur, strat);
    if (!r) return cur;
    if (trace) trace(r->second);
    cur = r->first;
  }
}

bool convertible(const Signature& sig, const TermPtr& a, const TermPtr& b, long fuel) {
  if (alpha_eq(a, b)) return true;
  return alpha_eq(normalize(sig, a, fuel), normalize(sig, b, fuel));
}

static void count_vars(const TermPtr& t, std::map<VarKey, int>& counts,
                       std::set<VarKey>& bound) {
  switch (t->kind) {
    case TermKind::Var: {
      VarKey k{t->name, t->flavor};
      if (!bound.count(k)) counts[k]++;
      break;
    }
    case TermKind::Abs:
    case TermKind::Prod: {
      count_vars(t->left, counts, bound);
      VarKey k{t->name, t->flavor};
      bool was = bound.count(k) > 0;
      bound.insert(k);
      count_vars(t->right, counts, bound);
      if (!was) bound.erase(k);
      break;
    }
    default:
      for (int i = 1; i <= child_count(*t); ++i) count_vars(child_at(t, i), counts, bound);
  }
}

ConservativityResult check_conservative(const RewriteRule& r) {
  std::map<VarKey, int> l, rr;
  std::set<VarKey> bound;
  count_vars(r.lhs, l, bound);
  bound.clear();
  count_vars(r.rhs, rr, bound);
  for (const auto& [v, rc] : rr) {
    int lc = l.count(v) ? l[v] : 0;
    if (rc > lc) return {false, v.name, lc, rc};
  }
  return {};
}

namespace {

// First-order-style unification over rule terms with alpha-aware binders.
// All Var nodes outside the binder stack are unification variables.
struct Unifier {
  Substitution sigma;
  std::vector<BinderPair> binders;

  TermPtr walk(TermPtr t) {
    while (t->kind == TermKind::Var) {
      auto it = sigma.find(VarKey{t->name, t->flavor});
      if (it == sigma.end()) break;
      t = it->second;
    }
    return t;
  }

  bool rigid(const VarKey& k) const {
    for (const auto& bp : binders)
      if (bp.pat == k || bp.subj == k) return true;
    return false;
  }

  bool bind(const VarKey& k, const TermPtr& t) {
    if (contains_var(t, k)) return false;  // occurs check
    for (const auto& bp : binders)
      if (contains_var(t, bp.pat) || contains_var(t, bp.subj)) return false;
    sigma[k] = t;
    return true;
  }

  bool unify(TermPtr a, TermPtr b) {
    a = walk(a);
    b = walk(b);
    if (a->kind == TermKind::Var && b->kind == TermKind::Var) {
      VarKey ka{a->name, a->flavor}, kb{b->name, b->flavor};
      if (ka == kb) return true;
      for (auto it = binders.rbegin(); it != binders.rend(); ++it) {
        if (it->pat == ka || it->subj == ka || it->pat == kb || it->subj == kb)
          return (it->pat == ka && it->subj == kb) || (it->pat == kb && it->subj == ka);
      }
      return bind(ka, b);
    }
    if (a->kind == TermKind::Var) {
      VarKey ka{a->name, a->flavor};
      if (rigid(ka)) return false;
      return bind(ka, b);
    }
    if (b->kind == TermKind::Var) {
      VarKey kb{b->name, b->flavor};
      if (rigid(kb)) return false;
      return bind(kb, a);
    }
    if (a->kind != b->kind) return false;
    switch (a->kind) {
      case TermKind::Sort:
        return a->name == b->name;
      case TermKind::Star:
      case TermKind::Box:
        return true;
      case TermKind::Abs:
      case TermKind::Prod: {
        if (!unify(a->left, b->left)) return false;
        binders.push_back({{a->name, a->flavor}, {b->name, b->flavor}});
        bool ok = unify(a->right, b->right);
        binders.pop_back();
        return ok;
      }
      case TermKind::App:
        return unify(a->left, b->left) && unify(a->right, b->right);
      case TermKind::Cons:
      case TermKind::Fun: {
        if (a->name != b->name || a->args.size() != b->args.size()) return false;
        for (size_t i = 0; i < a->args.size(); ++i)
          if (!unify(a->args[i], b->args[i])) return false;
        return true;
      }
      default:
        return false;
    }
  }
};

TermPtr rename_apart(const TermPtr& t, const std::string& suffix) {
  Substitution theta;
  for (const auto& v : free_vars(t)) theta[v] = mk_var(v.name + suffix, v.flavor);
  return substitute(t, theta);
}

TermPtr apply_fully(const Substitution& sigma, TermPtr t) {
  // sigma may be non-idempotent (triangular); iterate to a fixpoint
  for (int i = 0; i < 64; ++i) {
    TermPtr next = substitute(t, sigma);
    if (alpha_eq(next, t)) return t;
    t = next;
  }
  return t;
}

}  // namespace

bool OverlapReport::ok() const {
  if (!beta_overlaps.empty()) return false;
  for (const auto& e : entries)
    if (!e.first_order || !e.joinable) return false;
  return true;
}

std::string OverlapReport::to_text() const {
  std::ostringstream os;
  if (entries.empty() && beta_overlaps.empty()) {
    os << "overlaps: none";
    return os.str();
  }
  for (const auto& e : entries) {
    os << "overlap " << e.rule1 << " / " << e.rule2 << " at " << show(e.position) << ": ";
    if (!e.first_order)
      os << "FORBIDDEN (higher-order overlap)";
    else
      os << (e.joinable ? "joinable" : "NOT JOINABLE");
    if (!e.detail.empty()) os << " [" << e.detail << "]";
    os << "\n";
  }
  for (const auto& b : beta_overlaps)
    os << "overlap " << b << " / beta: FORBIDDEN (lhs contains an applied abstraction)\n";
  std::string s = os.str();
  if (!s.empty() && s.back() == '\n') s.pop_back();
  return s;
}

OverlapReport check_overlaps(const Signature& sig, long fuel) {
  OverlapReport rep;

  // beta overlaps in lhs
  for (const auto& r : sig.rules) {
    for (const auto& p : all_positions(r.lhs)) {
      auto t = subterm_at(r.lhs, p);
      if (t->kind == TermKind::App && t->left->kind == TermKind::Abs) {
        rep.beta_overlaps.push_back(r.name);
        break;
      }
    }
  }

  // first-order-only signature for joinability tests
  Signature fo = sig;
  fo.rules.clear();
  for (const auto& r : sig.rules)
    if (r.order == RuleOrder::First) fo.rules.push_back(r);

  for (size_t i = 0; i < sig.rules.size(); ++i) {
    for (size_t j = 0; j < sig.rules.size(); ++j) {
      const auto& r1 = sig.rules[i];
      const auto& r2 = sig.rules[j];
      TermPtr l2 = rename_apart(r2.lhs, "#2");
      TermPtr rh2 = rename_apart(r2.rhs, "#2");
      for (const auto& p : all_positions(r1.lhs)) {
        auto sub = subterm_at(r1.lhs, p);
        if (sub->kind == TermKind::Var) continue;
        if (p.empty() && (i == j || j < i)) continue;  // root overlaps once, not self
        Unifier u;
        if (!u.unify(sub, l2)) continue;
        OverlapEntry e;
        e.rule1 = r1.name;
        e.rule2 = r2.name;
        e.position = p;
        e.first_order = r1.order == RuleOrder::First && r2.order == RuleOrder::First;
        TermPtr cp1 = apply_fully(u.sigma, r1.rhs);
        TermPtr cp2 = apply_fully(u.sigma, replace_at(r1.lhs, p, rh2));
        if (e.first_order) {
          try {
            e.joinable = alpha_eq(normalize(fo, cp1, fuel), normalize(fo, cp2, fuel));
          } catch (const Error&) {
            e.joinable = false;
            e.detail = "fuel exhausted while joining";
          }
        }
        e.detail += (e.detail.empty() ? "" : "; ") + show(cp1) + " vs " + show(cp2);
        rep.entries.push_back(e);
      }
    }
  }
  return rep;
}

}  // namespace cac

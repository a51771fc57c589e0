#include "cac/signature.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace cac {

ATypePtr mk_asort(const std::string& name) {
  return std::make_shared<const AType>(AType{name, nullptr, nullptr});
}
ATypePtr mk_arrow(ATypePtr l, ATypePtr r) {
  return std::make_shared<const AType>(AType{"", std::move(l), std::move(r)});
}
ATypePtr mk_arrow_chain(const std::vector<ATypePtr>& argts, ATypePtr out) {
  ATypePtr t = std::move(out);
  for (auto it = argts.rbegin(); it != argts.rend(); ++it) t = mk_arrow(*it, t);
  return t;
}

bool atype_eq(const ATypePtr& a, const ATypePtr& b) {
  if (a->is_sort() != b->is_sort()) return false;
  if (a->is_sort()) return a->sort == b->sort;
  return atype_eq(a->left, b->left) && atype_eq(a->right, b->right);
}

bool atype_first_order(const ATypePtr& t) {
  ATypePtr out;
  for (const auto& a : arrow_args(t, out))
    if (!a->is_sort()) return false;
  return out->is_sort();
}

std::string show(const ATypePtr& t) {
  if (t->is_sort()) return t->sort;
  std::string l = show(t->left);
  if (!t->left->is_sort()) l = "(" + l + ")";
  return l + " -> " + show(t->right);
}

std::vector<ATypePtr> arrow_args(const ATypePtr& t, ATypePtr& out) {
  std::vector<ATypePtr> args;
  ATypePtr cur = t;
  while (!cur->is_sort()) {
    args.push_back(cur->left);
    cur = cur->right;
  }
  out = cur;
  return args;
}

TermPtr atype_to_term(const ATypePtr& t) {
  if (t->is_sort()) return mk_sort_ref(t->sort);
  return mk_prod("_", atype_to_term(t->left), atype_to_term(t->right));
}

std::optional<ATypePtr> term_to_atype(const TermPtr& t) {
  if (t->kind == TermKind::Sort) return mk_asort(t->name);
  if (t->kind == TermKind::Prod) {
    if (free_vars(t->right).count(VarKey{t->name, t->flavor})) return std::nullopt;
    auto l = term_to_atype(t->left);
    auto r = term_to_atype(t->right);
    if (l && r) return mk_arrow(*l, *r);
  }
  return std::nullopt;
}

ATypePtr subst_sort(const ATypePtr& t, const std::string& s, const ATypePtr& by) {
  if (t->is_sort()) return t->sort == s ? by : t;
  return mk_arrow(subst_sort(t->left, s, by), subst_sort(t->right, s, by));
}

bool sort_occurs(const std::string& s, const ATypePtr& t) {
  if (t->is_sort()) return t->sort == s;
  return sort_occurs(s, t->left) || sort_occurs(s, t->right);
}

std::set<int> Status::lexicographic_positions() const {
  std::set<int> out;
  for (const auto& e : entries)
    if (!e.multiset) out.insert(e.indices[0]);
  return out;
}

std::string Status::show() const {
  std::ostringstream os;
  os << "lex(";
  for (size_t i = 0; i < entries.size(); ++i) {
    if (i) os << ", ";
    const auto& e = entries[i];
    if (e.multiset) {
      os << "mul(";
      for (size_t j = 0; j < e.indices.size(); ++j) {
        if (j) os << ", ";
        os << "x" << e.indices[j];
      }
      os << ")";
    } else {
      os << "x" << e.indices[0];
    }
  }
  os << ")";
  return os.str();
}

const ATypePtr* alg_lookup(const AlgEnv& env, const std::string& x) {
  for (auto it = env.rbegin(); it != env.rend(); ++it)
    if (it->first == x) return &it->second;
  return nullptr;
}

const ConstructorDecl* Signature::find_cons(const std::string& n) const {
  auto it = constructors.find(n);
  return it == constructors.end() ? nullptr : &it->second;
}
const FunctionDecl* Signature::find_fun(const std::string& n) const {
  auto it = functions.find(n);
  return it == functions.end() ? nullptr : &it->second;
}
void Signature::add_sort(const std::string& s) {
  if (has_sort(s)) throw Error("duplicate-sort", s);
  sort_order.push_back(s);
  sorts[s] = {};
}
void Signature::add_constructor(const ConstructorDecl& c) {
  if (constructors.count(c.name) || functions.count(c.name))
    throw Error("duplicate-symbol", c.name);
  if (!has_sort(c.output_sort)) throw Error("unknown-sort", c.output_sort);
  constructors[c.name] = c;
  sorts[c.output_sort].push_back(c);
}
void Signature::add_function(const FunctionDecl& f) {
  if (constructors.count(f.name) || functions.count(f.name))
    throw Error("duplicate-symbol", f.name);
  functions[f.name] = f;
}

static void term_symbols(const TermPtr& t, std::set<std::string>& out) {
  if (t->kind == TermKind::Cons || t->kind == TermKind::Fun) out.insert(t->name);
  for (int i = 1; i <= child_count(*t); ++i) term_symbols(child_at(t, i), out);
}

bool Signature::fun_geq(const std::string& f, const std::string& g) const {
  if (f == g) return true;
  // reachability over "g occurs in a defining rule of f"
  std::set<std::string> seen{f};
  std::vector<std::string> stack{f};
  while (!stack.empty()) {
    std::string cur = stack.back();
    stack.pop_back();
    for (const auto& r : rules) {
      if (r.head != cur) continue;
      std::set<std::string> occ;
      term_symbols(r.lhs, occ);
      term_symbols(r.rhs, occ);
      for (const auto& s : occ) {
        if (s == g) return true;
        if (functions.count(s) && !seen.count(s)) {
          seen.insert(s);
          stack.push_back(s);
        }
      }
    }
  }
  return false;
}

static void pos_neg(const ATypePtr& t, Position& here, bool positive,
                    std::set<Position>& pos, std::set<Position>& neg) {
  if (t->is_sort()) {
    (positive ? pos : neg).insert(here);
    return;
  }
  here.push_back(1);
  pos_neg(t->left, here, !positive, pos, neg);
  here.back() = 2;
  pos_neg(t->right, here, positive, pos, neg);
  here.pop_back();
}

std::set<Position> positive_positions(const ATypePtr& t) {
  std::set<Position> pos, neg;
  Position here;
  pos_neg(t, here, true, pos, neg);
  return pos;
}
std::set<Position> negative_positions(const ATypePtr& t) {
  std::set<Position> pos, neg;
  Position here;
  pos_neg(t, here, true, pos, neg);
  return neg;
}

static void sort_pos_rec(const std::string& s, const ATypePtr& t, Position& here,
                         std::set<Position>& out) {
  if (t->is_sort()) {
    if (t->sort == s) out.insert(here);
    return;
  }
  here.push_back(1);
  sort_pos_rec(s, t->left, here, out);
  here.back() = 2;
  sort_pos_rec(s, t->right, here, out);
  here.pop_back();
}

std::set<Position> sort_positions(const std::string& s, const ATypePtr& t) {
  std::set<Position> out;
  Position here;
  sort_pos_rec(s, t, here, out);
  return out;
}

bool occurs_positively(const std::string& s, const ATypePtr& t) {
  auto occ = sort_positions(s, t);
  if (occ.empty()) return false;
  auto pos = positive_positions(t);
  for (const auto& p : occ)
    if (!pos.count(p)) return false;
  return true;
}

// t <_S s: t reachable from s through sorts mentioned in constructor types
static bool sort_less(const Signature& sig, const std::string& t, const std::string& s) {
  if (t == s) return false;
  std::set<std::string> seen{s};
  std::vector<std::string> stack{s};
  while (!stack.empty()) {
    std::string cur = stack.back();
    stack.pop_back();
    auto it = sig.sorts.find(cur);
    if (it == sig.sorts.end()) continue;
    for (const auto& c : it->second) {
      std::function<void(const ATypePtr&)> walk = [&](const ATypePtr& at) {
        if (at->is_sort()) {
          if (!seen.count(at->sort)) {
            seen.insert(at->sort);
            stack.push_back(at->sort);
          }
          return;
        }
        walk(at->left);
        walk(at->right);
      };
      for (const auto& at : c.arg_types) walk(at);
    }
  }
  return seen.count(t) > 0;
}

SortVerdict classify_sort(const Signature& sig, const std::string& s) {
  auto it = sig.sorts.find(s);
  if (it == sig.sorts.end()) throw Error("unknown-sort", s);

  std::function<SortClass(const std::string&)> classify = [&](const std::string& name) {
    return classify_sort(sig, name).cls;
  };

  bool basic = true;
  for (const auto& c : it->second) {
    for (size_t j = 0; j < c.arg_types.size(); ++j) {
      const auto& at = c.arg_types[j];
      bool ok = at->is_sort() && (at->sort == s || (sort_less(sig, at->sort, s) &&
                                                    classify(at->sort) == SortClass::Basic));
      if (!ok) {
        basic = false;
        break;
      }
    }
    if (!basic) break;
  }
  if (basic) return {SortClass::Basic, ""};

  for (const auto& c : it->second) {
    for (size_t j = 0; j < c.arg_types.size(); ++j) {
      const auto& at = c.arg_types[j];
      if (at->is_sort() && at->sort != s && sort_less(sig, at->sort, s) &&
          classify(at->sort) != SortClass::Rejected)
        continue;
      // s'_1 -> ... -> s'_p -> s, with each s'_k built from strictly positive
      // sorts smaller than s
      ATypePtr out;
      auto prefix = arrow_args(at, out);
      bool shape_ok = out->is_sort() && out->sort == s;
      if (shape_ok) {
        for (const auto& sp : prefix) {
          std::function<bool(const ATypePtr&)> built_ok = [&](const ATypePtr& u) -> bool {
            if (u->is_sort())
              return u->sort != s && sort_less(sig, u->sort, s) &&
                     classify(u->sort) != SortClass::Rejected;
            return built_ok(u->left) && built_ok(u->right);
          };
          if (!built_ok(sp)) {
            shape_ok = false;
            break;
          }
        }
      }
      if (!shape_ok)
        return {SortClass::Rejected,
                "constructor " + c.name + " argument " + std::to_string(j + 1) + " of type " +
                    show(at) + " is neither a smaller strictly positive sort nor of shape "
                    "s1' -> ... -> sp' -> " + s};
    }
  }
  return {SortClass::StrictlyPositive, ""};
}

// Tarjan-free SCC via Kosaraju on small graphs
static std::vector<std::vector<std::string>> sccs(
    const std::map<std::string, std::set<std::string>>& g) {
  std::vector<std::string> order;
  std::set<std::string> seen;
  std::function<void(const std::string&)> dfs1 = [&](const std::string& v) {
    seen.insert(v);
    auto it = g.find(v);
    if (it != g.end())
      for (const auto& w : it->second)
        if (!seen.count(w) && g.count(w)) dfs1(w);
    order.push_back(v);
  };
  for (const auto& [v, _] : g)
    if (!seen.count(v)) dfs1(v);
  std::map<std::string, std::set<std::string>> rg;
  for (const auto& [v, ws] : g)
    for (const auto& w : ws)
      if (g.count(w)) rg[w].insert(v);
  std::vector<std::vector<std::string>> out;
  seen.clear();
  std::function<void(const std::string&, std::vector<std::string>&)> dfs2 =
      [&](const std::string& v, std::vector<std::string>& comp) {
        seen.insert(v);
        comp.push_back(v);
        auto it = rg.find(v);
        if (it != rg.end())
          for (const auto& w : it->second)
            if (!seen.count(w)) dfs2(w, comp);
      };
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    if (!seen.count(*it)) {
      std::vector<std::string> comp;
      dfs2(*it, comp);
      out.push_back(comp);
    }
  }
  return out;
}

std::string OrderReport::to_text() const {
  if (ok) return "orders: ok";
  std::ostringstream os;
  if (!sort_cycle.empty()) {
    os << "sort-cycle:";
    for (const auto& s : sort_cycle) os << " " << s;
  }
  if (!fun_cycle.empty()) {
    if (!sort_cycle.empty()) os << "; ";
    os << "fun-cycle:";
    for (const auto& s : fun_cycle) os << " " << s;
  }
  return os.str();
}

OrderReport check_orders(const Signature& sig) {
  OrderReport rep;
  // >=_S graph
  std::map<std::string, std::set<std::string>> gs;
  for (const auto& s : sig.sort_order) gs[s];
  for (const auto& [s, conss] : sig.sorts) {
    for (const auto& c : conss) {
      std::function<void(const ATypePtr&)> walk = [&](const ATypePtr& at) {
        if (at->is_sort()) {
          gs[s].insert(at->sort);
          return;
        }
        walk(at->left);
        walk(at->right);
      };
      for (const auto& at : c.arg_types) walk(at);
    }
  }
  for (const auto& comp : sccs(gs)) {
    if (comp.size() >= 2) {
      rep.ok = false;
      rep.sort_cycle = comp;
      std::sort(rep.sort_cycle.begin(), rep.sort_cycle.end());
      break;
    }
  }
  // >=_F graph restricted to higher-order symbols
  std::map<std::string, std::set<std::string>> gf;
  for (const auto& [f, d] : sig.functions)
    if (d.higher_order) gf[f];
  for (const auto& r : sig.rules) {
    auto fd = sig.find_fun(r.head);
    if (!fd || !fd->higher_order) continue;
    std::set<std::string> occ;
    term_symbols(r.lhs, occ);
    term_symbols(r.rhs, occ);
    for (const auto& g : occ) {
      auto gd = sig.find_fun(g);
      if (gd && gd->higher_order) gf[r.head].insert(g);
    }
  }
  for (const auto& comp : sccs(gf)) {
    if (comp.size() >= 2) {
      rep.ok = false;
      rep.fun_cycle = comp;
      std::sort(rep.fun_cycle.begin(), rep.fun_cycle.end());
      break;
    }
  }
  return rep;
}

static std::string canonical_type_id(const ATypePtr& t) {
  if (t->is_sort()) return t->sort;
  return "(" + canonical_type_id(t->left) + ">" + canonical_type_id(t->right) + ")";
}

std::pair<FunctionDecl, std::vector<RewriteRule>> generate_recursor(
    const Signature& sig, const std::string& s, const ATypePtr& t, const std::string& name) {
  auto verdict = classify_sort(sig, s);
  if (verdict.cls == SortClass::Rejected)
    throw Error("not-inductive", s + ": " + verdict.reason);
  auto it = sig.sorts.find(s);
  const auto& conss = it->second;
  int n = static_cast<int>(conss.size());

  FunctionDecl rec;
  rec.name = name.empty() ? "rec_" + s + "_" + canonical_type_id(t) : name;
  rec.arg_types.push_back(mk_asort(s));
  for (const auto& c : conss) {
    std::vector<ATypePtr> parts = c.arg_types;
    for (const auto& a : c.arg_types) parts.push_back(subst_sort(a, s, t));
    rec.arg_types.push_back(mk_arrow_chain(parts, t));
  }
  rec.output_type = t;
  rec.higher_order = true;
  rec.status = Status{{StatusEntry{false, {1}}}};
  rec.inductive_positions = std::set<int>{1};

  std::vector<RewriteRule> rules;
  for (int i = 0; i < n; ++i) {
    const auto& c = conss[static_cast<size_t>(i)];
    // lhs rec(C_i(a...), b...)
    std::vector<TermPtr> avars, bvars;
    for (int j = 0; j < c.arity(); ++j) avars.push_back(mk_var("x" + std::to_string(j + 1)));
    for (int k = 0; k < n; ++k) bvars.push_back(mk_var("u" + std::to_string(k + 1)));
    std::vector<TermPtr> lhs_args{mk_cons(c.name, avars)};
    lhs_args.insert(lhs_args.end(), bvars.begin(), bvars.end());
    TermPtr lhs = mk_fun(rec.name, lhs_args);

    // rhs b_i a... d...
    TermPtr rhs = bvars[static_cast<size_t>(i)];
    for (const auto& a : avars) rhs = mk_app(rhs, a);
    for (int j = 0; j < c.arity(); ++j) {
      const auto& sij = c.arg_types[static_cast<size_t>(j)];
      if (!sort_occurs(s, sij)) {
        rhs = mk_app(rhs, avars[static_cast<size_t>(j)]);
        continue;
      }
      ATypePtr out;
      auto primes = arrow_args(sij, out);
      // d_j = \x...:s'{s -> t}. rec(a_j x..., b...)
      std::vector<TermPtr> xs;
      for (size_t k = 0; k < primes.size(); ++k)
        xs.push_back(mk_var("y" + std::to_string(j + 1) + "_" + std::to_string(k + 1)));
      TermPtr call_arg = avars[static_cast<size_t>(j)];
      for (const auto& x : xs) call_arg = mk_app(call_arg, x);
      std::vector<TermPtr> call_args{call_arg};
      call_args.insert(call_args.end(), bvars.begin(), bvars.end());
      TermPtr dj = mk_fun(rec.name, call_args);
      for (size_t k = primes.size(); k > 0; --k)
        dj = mk_abs(xs[k - 1]->name, atype_to_term(subst_sort(primes[k - 1], s, t)), dj);
      rhs = mk_app(rhs, dj);
    }

    RewriteRule r;
    r.name = rec.name + "." + std::to_string(i + 1);
    r.lhs = lhs;
    r.rhs = rhs;
    r.head = rec.name;
    r.order = RuleOrder::Higher;
    rules.push_back(r);
  }
  return {rec, rules};
}

}  // namespace cac

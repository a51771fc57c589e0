#include "cac/term.hpp"

#include <algorithm>
#include <sstream>

namespace cac {

TermPtr mk_var(const std::string& name, VarFlavor f) {
  return std::make_shared<const Term>(Term{TermKind::Var, name, f, nullptr, nullptr, {}});
}
TermPtr mk_sort_ref(const std::string& name) {
  return std::make_shared<const Term>(Term{TermKind::Sort, name, VarFlavor::Star, nullptr, nullptr, {}});
}
TermPtr star() {
  static TermPtr t = std::make_shared<const Term>(Term{TermKind::Star, "*", VarFlavor::Star, nullptr, nullptr, {}});
  return t;
}
TermPtr box() {
  static TermPtr t = std::make_shared<const Term>(Term{TermKind::Box, "[]", VarFlavor::Star, nullptr, nullptr, {}});
  return t;
}
TermPtr mk_abs(const std::string& binder, TermPtr domain, TermPtr body, VarFlavor f) {
  return std::make_shared<const Term>(Term{TermKind::Abs, binder, f, std::move(domain), std::move(body), {}});
}
TermPtr mk_prod(const std::string& binder, TermPtr domain, TermPtr body, VarFlavor f) {
  return std::make_shared<const Term>(Term{TermKind::Prod, binder, f, std::move(domain), std::move(body), {}});
}
TermPtr mk_app(TermPtr fun, TermPtr arg) {
  return std::make_shared<const Term>(Term{TermKind::App, "", VarFlavor::Star, std::move(fun), std::move(arg), {}});
}
TermPtr mk_app(TermPtr fun, const std::vector<TermPtr>& targs) {
  TermPtr t = std::move(fun);
  for (const auto& a : targs) t = mk_app(t, a);
  return t;
}
TermPtr mk_cons(const std::string& name, std::vector<TermPtr> args) {
  return std::make_shared<const Term>(Term{TermKind::Cons, name, VarFlavor::Star, nullptr, nullptr, std::move(args)});
}
TermPtr mk_fun(const std::string& name, std::vector<TermPtr> args) {
  return std::make_shared<const Term>(Term{TermKind::Fun, name, VarFlavor::Star, nullptr, nullptr, std::move(args)});
}

int child_count(const Term& t) {
  switch (t.kind) {
    case TermKind::Abs:
    case TermKind::Prod:
    case TermKind::App:
      return 2;
    case TermKind::Cons:
    case TermKind::Fun:
      return static_cast<int>(t.args.size());
    default:
      return 0;
  }
}

TermPtr child_at(const TermPtr& t, int i) {
  if (i < 1 || i > child_count(*t)) throw Error("invalid-position", "no child " + std::to_string(i) + " in " + show(t));
  switch (t->kind) {
    case TermKind::Abs:
    case TermKind::Prod:
    case TermKind::App:
      return i == 1 ? t->left : t->right;
    default:
      return t->args[static_cast<size_t>(i) - 1];
  }
}

TermPtr subterm_at(const TermPtr& a, const Position& p) {
  TermPtr cur = a;
  for (int i : p) cur = child_at(cur, i);
  return cur;
}

static TermPtr with_child(const TermPtr& t, int i, const TermPtr& c) {
  Term copy = *t;
  switch (t->kind) {
    case TermKind::Abs:
    case TermKind::Prod:
    case TermKind::App:
      (i == 1 ? copy.left : copy.right) = c;
      break;
    default:
      copy.args[static_cast<size_t>(i) - 1] = c;
  }
  return std::make_shared<const Term>(std::move(copy));
}

TermPtr replace_at(const TermPtr& a, const Position& p, const TermPtr& b) {
  if (p.empty()) return b;
  Position rest(p.begin() + 1, p.end());
  if (p[0] < 1 || p[0] > child_count(*a))
    throw Error("invalid-position", show(p) + " in " + show(a));
  return with_child(a, p[0], replace_at(child_at(a, p[0]), rest, b));
}

static void collect_positions(const TermPtr& a, Position& here, std::vector<Position>& out) {
  out.push_back(here);
  for (int i = 1; i <= child_count(*a); ++i) {
    here.push_back(i);
    collect_positions(child_at(a, i), here, out);
    here.pop_back();
  }
}

std::vector<Position> all_positions(const TermPtr& a) {
  std::vector<Position> out;
  Position here;
  collect_positions(a, here, out);
  return out;
}

static void fv_rec(const TermPtr& a, std::set<VarKey>& bound, std::set<VarKey>& out) {
  switch (a->kind) {
    case TermKind::Var: {
      VarKey k{a->name, a->flavor};
      if (!bound.count(k)) out.insert(k);
      break;
    }
    case TermKind::Abs:
    case TermKind::Prod: {
      fv_rec(a->left, bound, out);
      VarKey k{a->name, a->flavor};
      bool was = bound.count(k) > 0;
      bound.insert(k);
      fv_rec(a->right, bound, out);
      if (!was) bound.erase(k);
      break;
    }
    case TermKind::App:
      fv_rec(a->left, bound, out);
      fv_rec(a->right, bound, out);
      break;
    case TermKind::Cons:
    case TermKind::Fun:
      for (const auto& x : a->args) fv_rec(x, bound, out);
      break;
    default:
      break;
  }
}

std::set<VarKey> free_vars(const TermPtr& a) {
  std::set<VarKey> bound, out;
  fv_rec(a, bound, out);
  return out;
}

static bool aeq(const TermPtr& a, const TermPtr& b,
                std::vector<std::pair<VarKey, VarKey>>& renaming) {
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case TermKind::Var: {
      VarKey ka{a->name, a->flavor}, kb{b->name, b->flavor};
      for (auto it = renaming.rbegin(); it != renaming.rend(); ++it) {
        if (it->first == ka || it->second == kb) return it->first == ka && it->second == kb;
      }
      return ka == kb;
    }
    case TermKind::Sort:
      return a->name == b->name;
    case TermKind::Star:
    case TermKind::Box:
      return true;
    case TermKind::Abs:
    case TermKind::Prod: {
      if (a->flavor != b->flavor) return false;
      if (!aeq(a->left, b->left, renaming)) return false;
      renaming.push_back({{a->name, a->flavor}, {b->name, b->flavor}});
      bool ok = aeq(a->right, b->right, renaming);
      renaming.pop_back();
      return ok;
    }
    case TermKind::App:
      return aeq(a->left, b->left, renaming) && aeq(a->right, b->right, renaming);
    case TermKind::Cons:
    case TermKind::Fun: {
      if (a->name != b->name || a->args.size() != b->args.size()) return false;
      for (size_t i = 0; i < a->args.size(); ++i)
        if (!aeq(a->args[i], b->args[i], renaming)) return false;
      return true;
    }
  }
  return false;
}

bool alpha_eq(const TermPtr& a, const TermPtr& b) {
  std::vector<std::pair<VarKey, VarKey>> renaming;
  return aeq(a, b, renaming);
}

std::string fresh_name(const std::string& base, const std::set<std::string>& avoid) {
  std::string stem = base;
  while (!stem.empty() && stem.back() >= '0' && stem.back() <= '9') stem.pop_back();
  if (stem.empty()) stem = "x";
  if (!avoid.count(stem) && stem == base) return stem;
  for (int i = 1;; ++i) {
    std::string cand = stem + std::to_string(i);
    if (!avoid.count(cand) && cand != base) return cand;
  }
}

static TermPtr subst_rec(const TermPtr& a, const Substitution& theta,
                         std::set<std::string>& avoid) {
  switch (a->kind) {
    case TermKind::Var: {
      auto it = theta.find(VarKey{a->name, a->flavor});
      return it == theta.end() ? a : it->second;
    }
    case TermKind::Sort:
    case TermKind::Star:
    case TermKind::Box:
      return a;
    case TermKind::Abs:
    case TermKind::Prod: {
      TermPtr dom = subst_rec(a->left, theta, avoid);
      VarKey binder{a->name, a->flavor};
      Substitution inner = theta;
      inner.erase(binder);
      TermPtr body = a->right;
      std::string bname = a->name;
      // rename the binder when it would capture a variable of some image,
      // or when it collides with a name we must keep distinct
      bool capture = avoid.count(a->name) > 0;
      if (!capture) {
        for (const auto& [k, img] : inner) {
          (void)k;
          if (free_vars(img).count(binder)) { capture = true; break; }
        }
      }
      if (capture) {
        bname = fresh_name(a->name, avoid);
        inner[binder] = mk_var(bname, a->flavor);
      }
      avoid.insert(bname);
      TermPtr nb = inner.empty() ? body : subst_rec(body, inner, avoid);
      return std::make_shared<const Term>(Term{a->kind, bname, a->flavor, dom, nb, {}});
    }
    case TermKind::App:
      return mk_app(subst_rec(a->left, theta, avoid), subst_rec(a->right, theta, avoid));
    case TermKind::Cons:
    case TermKind::Fun: {
      std::vector<TermPtr> args;
      args.reserve(a->args.size());
      for (const auto& x : a->args) args.push_back(subst_rec(x, theta, avoid));
      return std::make_shared<const Term>(Term{a->kind, a->name, a->flavor, nullptr, nullptr, std::move(args)});
    }
  }
  return a;
}

TermPtr substitute(const TermPtr& a, const Substitution& theta) {
  if (theta.empty()) return a;
  std::set<std::string> avoid;
  for (const auto& [k, img] : theta) {
    avoid.insert(k.name);
    for (const auto& v : free_vars(img)) avoid.insert(v.name);
  }
  for (const auto& v : free_vars(a)) avoid.insert(v.name);
  return subst_rec(a, theta, avoid);
}

TermPtr subst1(const TermPtr& a, const std::string& x, VarFlavor f, const TermPtr& b) {
  Substitution theta;
  theta[VarKey{x, f}] = b;
  return substitute(a, theta);
}

std::pair<TermPtr, std::vector<TermPtr>> spine(const TermPtr& a) {
  std::vector<TermPtr> args;
  TermPtr cur = a;
  while (cur->kind == TermKind::App) {
    args.push_back(cur->right);
    cur = cur->left;
  }
  std::reverse(args.begin(), args.end());
  return {cur, args};
}

static void show_rec(const TermPtr& a, std::ostream& os, int prec) {
  // prec: 0 = top, 1 = application argument
  switch (a->kind) {
    case TermKind::Var:
      os << a->name;
      break;
    case TermKind::Sort:
      os << a->name;
      break;
    case TermKind::Star:
      os << "*";
      break;
    case TermKind::Box:
      os << "[]";
      break;
    case TermKind::Abs:
      if (prec > 0) os << "(";
      os << "\\" << a->name << ":";
      show_rec(a->left, os, 1);
      os << ". ";
      show_rec(a->right, os, 0);
      if (prec > 0) os << ")";
      break;
    case TermKind::Prod: {
      bool arrow = !free_vars(a->right).count(VarKey{a->name, a->flavor});
      if (prec > 0) os << "(";
      if (arrow) {
        show_rec(a->left, os, 1);
        os << " -> ";
        show_rec(a->right, os, 0);
      } else {
        os << "!" << a->name << ":";
        show_rec(a->left, os, 1);
        os << ". ";
        show_rec(a->right, os, 0);
      }
      if (prec > 0) os << ")";
      break;
    }
    case TermKind::App: {
      if (prec > 0) os << "(";
      auto [h, args] = spine(a);
      show_rec(h, os, 1);
      for (const auto& x : args) {
        os << " ";
        show_rec(x, os, 1);
      }
      if (prec > 0) os << ")";
      break;
    }
    case TermKind::Cons:
    case TermKind::Fun:
      os << a->name;
      if (!a->args.empty()) {
        os << "(";
        for (size_t i = 0; i < a->args.size(); ++i) {
          if (i) os << ", ";
          show_rec(a->args[i], os, 0);
        }
        os << ")";
      }
      break;
  }
}

std::string show(const TermPtr& a) {
  std::ostringstream os;
  show_rec(a, os, 0);
  return os.str();
}

std::string show(const Position& p) {
  if (p.empty()) return "e";
  std::ostringstream os;
  for (size_t i = 0; i < p.size(); ++i) {
    if (i) os << ".";
    os << p[i];
  }
  return os.str();
}

}  // namespace cac

#ifndef CAC_TERM_HPP
#define CAC_TERM_HPP

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cac {

// Error carrying a stable machine code plus the intended process exit code
// (1 = verdict/type failure, 2 = usage/parse failure).
struct Error : std::runtime_error {
  std::string code;
  int exit_code;
  Error(std::string c, const std::string& msg, int ec = 1)
      : std::runtime_error(c + ": " + msg), code(std::move(c)), exit_code(ec) {}
};

enum class VarFlavor { Star, Box };

enum class TermKind { Var, Sort, Star, Box, Abs, Prod, App, Cons, Fun };

struct Term;
using TermPtr = std::shared_ptr<const Term>;

// Immutable term tree. Abs/Prod use left=domain, right=body with `name` the
// binder; App uses left=function, right=argument; Cons/Fun are n-ary symbol
// applications kept distinct from curried App.
struct Term {
  TermKind kind;
  std::string name;                 // Var/Sort/Cons/Fun name, or binder name
  VarFlavor flavor = VarFlavor::Star;
  TermPtr left;
  TermPtr right;
  std::vector<TermPtr> args;
};

TermPtr mk_var(const std::string& name, VarFlavor f = VarFlavor::Star);
TermPtr mk_sort_ref(const std::string& name);
TermPtr star();
TermPtr box();
TermPtr mk_abs(const std::string& binder, TermPtr domain, TermPtr body,
               VarFlavor f = VarFlavor::Star);
TermPtr mk_prod(const std::string& binder, TermPtr domain, TermPtr body,
                VarFlavor f = VarFlavor::Star);
TermPtr mk_app(TermPtr fun, TermPtr arg);
TermPtr mk_app(TermPtr fun, const std::vector<TermPtr>& targs);
TermPtr mk_cons(const std::string& name, std::vector<TermPtr> args);
TermPtr mk_fun(const std::string& name, std::vector<TermPtr> args);

// Dewey positions; empty = root. Abs/Prod children are 1 (domain) and
// 2 (body); App children 1 (fun), 2 (arg); Cons/Fun children 1..n.
using Position = std::vector<int>;

struct VarKey {
  std::string name;
  VarFlavor flavor = VarFlavor::Star;
  auto operator<=>(const VarKey&) const = default;
};

using Substitution = std::map<VarKey, TermPtr>;

int child_count(const Term& t);
TermPtr child_at(const TermPtr& t, int i);  // 1-based

TermPtr subterm_at(const TermPtr& a, const Position& p);
TermPtr replace_at(const TermPtr& a, const Position& p, const TermPtr& b);
std::vector<Position> all_positions(const TermPtr& a);

std::set<VarKey> free_vars(const TermPtr& a);
bool alpha_eq(const TermPtr& a, const TermPtr& b);

TermPtr substitute(const TermPtr& a, const Substitution& theta);
TermPtr subst1(const TermPtr& a, const std::string& x, VarFlavor f, const TermPtr& b);

// Head and curried-application arguments; Cons/Fun heads keep their args.
std::pair<TermPtr, std::vector<TermPtr>> spine(const TermPtr& a);

std::string fresh_name(const std::string& base, const std::set<std::string>& avoid);

std::string show(const TermPtr& a);
std::string show(const Position& p);

}  // namespace cac

#endif

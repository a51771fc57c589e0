#ifndef CAC_SIGNATURE_HPP
#define CAC_SIGNATURE_HPP

#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "cac/term.hpp"

namespace cac {

// Simple types over sorts: s ::= sort | s -> s
struct AType;
using ATypePtr = std::shared_ptr<const AType>;

struct AType {
  std::string sort;  // nonempty iff leaf
  ATypePtr left, right;
  bool is_sort() const { return left == nullptr; }
};

ATypePtr mk_asort(const std::string& name);
ATypePtr mk_arrow(ATypePtr l, ATypePtr r);
ATypePtr mk_arrow_chain(const std::vector<ATypePtr>& argts, ATypePtr out);
bool atype_eq(const ATypePtr& a, const ATypePtr& b);
bool atype_first_order(const ATypePtr& t);
std::string show(const ATypePtr& t);

// s1 -> ... -> sn -> out, fully right-unfolded
std::vector<ATypePtr> arrow_args(const ATypePtr& t, ATypePtr& out);

TermPtr atype_to_term(const ATypePtr& t);
// inverse where possible (Prod chains with unused binders over sorts)
std::optional<ATypePtr> term_to_atype(const TermPtr& t);

ATypePtr subst_sort(const ATypePtr& t, const std::string& s, const ATypePtr& by);
bool sort_occurs(const std::string& s, const ATypePtr& t);

// Status template for recursive-call comparison: an ordered list of entries,
// each a single argument index or a multiset of argument indices (1-based).
struct StatusEntry {
  bool multiset = false;
  std::vector<int> indices;
};
struct Status {
  std::vector<StatusEntry> entries;
  std::set<int> lexicographic_positions() const;
  std::string show() const;
};

struct ConstructorDecl {
  std::string name;
  std::vector<ATypePtr> arg_types;
  std::string output_sort;
  ATypePtr type;  // arg_types -> output_sort
  int arity() const { return static_cast<int>(arg_types.size()); }
};

struct FunctionDecl {
  std::string name;
  std::vector<ATypePtr> arg_types;
  ATypePtr output_type;
  bool higher_order = false;  // declared order class
  std::optional<Status> status;
  std::optional<std::set<int>> inductive_positions;  // 1-based
  int arity() const { return static_cast<int>(arg_types.size()); }
  ATypePtr type() const { return mk_arrow_chain(arg_types, output_type); }
};

enum class RuleOrder { First, Higher };

using AlgEnv = std::vector<std::pair<std::string, ATypePtr>>;

const ATypePtr* alg_lookup(const AlgEnv& env, const std::string& x);

struct RewriteRule {
  std::string name;  // e.g. "plus.2"
  TermPtr lhs, rhs;
  std::string head;
  RuleOrder order = RuleOrder::First;
  AlgEnv rule_env;  // Gamma_l over the free variables of lhs
};

struct Signature {
  std::vector<std::string> sort_order;  // declaration order
  std::map<std::string, std::vector<ConstructorDecl>> sorts;
  std::map<std::string, ConstructorDecl> constructors;
  std::map<std::string, FunctionDecl> functions;
  std::vector<RewriteRule> rules;

  bool has_sort(const std::string& s) const { return sorts.count(s) > 0; }
  const ConstructorDecl* find_cons(const std::string& n) const;
  const FunctionDecl* find_fun(const std::string& n) const;
  void add_sort(const std::string& s);
  void add_constructor(const ConstructorDecl& c);
  void add_function(const FunctionDecl& f);

  // f >=_F g (reflexive-transitive: g occurs in a defining rule of f)
  bool fun_geq(const std::string& f, const std::string& g) const;
};

std::set<Position> positive_positions(const ATypePtr& t);
std::set<Position> negative_positions(const ATypePtr& t);
std::set<Position> sort_positions(const std::string& s, const ATypePtr& t);
bool occurs_positively(const std::string& s, const ATypePtr& t);

enum class SortClass { Basic, StrictlyPositive, Rejected };
struct SortVerdict {
  SortClass cls;
  std::string reason;  // offending constructor/argument when rejected
};
SortVerdict classify_sort(const Signature& sig, const std::string& s);

struct OrderReport {
  bool ok = true;
  std::vector<std::string> sort_cycle;  // >=2 distinct sorts on a >=_S cycle
  std::vector<std::string> fun_cycle;   // >=2 distinct higher-order symbols on a >=_F cycle
  std::string to_text() const;
};
OrderReport check_orders(const Signature& sig);

// Recursor rec^s_t: declaration plus one rule per constructor of s.
std::pair<FunctionDecl, std::vector<RewriteRule>> generate_recursor(
    const Signature& sig, const std::string& s, const ATypePtr& t,
    const std::string& name = "");

}  // namespace cac

#endif

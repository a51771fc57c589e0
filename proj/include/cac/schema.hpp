#ifndef CAC_SCHEMA_HPP
#define CAC_SCHEMA_HPP

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cac/rewriting.hpp"
#include "cac/signature.hpp"
#include "cac/term.hpp"

namespace cac {

// Simple-type inference restricted to rule terms (no products, no sorts
// as terms); binder annotations must be algebraic.
std::optional<ATypePtr> algebraic_type_of(const Signature& sig, const AlgEnv& env,
                                          const TermPtr& a);

bool is_gamma_s_term(const Signature& sig, const AlgEnv& env, const std::string& s,
                     const TermPtr& a);

// Shortest spine prefix a1...ak with every longer prefix a Gamma,s-term.
TermPtr critical_subterm(const Signature& sig, const AlgEnv& env, const std::string& s,
                         const TermPtr& a);

// b strictly below a with every term on the path (a included) a Gamma,s-term.
bool gamma_s_greater(const Signature& sig, const AlgEnv& env, const std::string& s,
                     const TermPtr& a, const TermPtr& b);

// b alpha-equal to a proper subterm of a.
bool proper_subterm(const TermPtr& a, const TermPtr& b);

using TermOrder = std::function<bool(const TermPtr&, const TermPtr&)>;

bool compare_status(const Status& stat, const std::set<int>& inductive,
                    const std::map<int, TermOrder>& indexed_orders, const TermOrder& base,
                    const std::vector<TermPtr>& lhs, const std::vector<TermPtr>& rhs);

bool critical_greater(const Signature& sig, const FunctionDecl& f, const AlgEnv& env,
                      const std::vector<TermPtr>& lhs_args,
                      const std::vector<TermPtr>& rhs_args);

// Subterms typable by a basic inductive sort, plus subterms reachable through
// constructor-headed positions only.
std::vector<TermPtr> accessible_subterms(const Signature& sig, const AlgEnv& env,
                                         const std::vector<TermPtr>& cs);

struct ClosureGoal {
  std::string fun;
  AlgEnv env;  // Gamma_l extended with every binder annotation of the rhs
  std::vector<TermPtr> lhs_args;
  TermPtr candidate;
  int reduction_search_depth = 0;  // bounded search for the reduction case, 0 = off
};
struct ClosureResult {
  bool accepted = false;
  std::vector<std::string> trace;
  std::string reason;  // first subterm with no applicable case
};
ClosureResult closure_contains(const Signature& sig, const ClosureGoal& goal);

AlgEnv infer_rule_env(const Signature& sig, const TermPtr& lhs);

struct AdmissibilityResult {
  bool ok = false;
  std::string code;    // ill-typed-lhs | free-variable | rhs-type
  std::string detail;
  AlgEnv rule_env;
};
AdmissibilityResult check_admissible(const Signature& sig, const RewriteRule& r,
                                     long fuel = 1000000);

struct RpoParams {
  std::map<std::string, int> precedence;   // higher value = greater symbol
  std::set<std::string> multiset_symbols;  // lex status otherwise
};
bool rpo_greater(const RpoParams& params, const TermPtr& a, const TermPtr& b);
RpoParams default_rpo_params(const Signature& sig);

struct RuleVerdict {
  std::string rule;
  bool pass = false;
  std::string code;  // reason code on failure, "ok" otherwise
  std::string detail;
};

struct SchemaOptions {
  bool assume_fo_terminating = false;
  long fuel = 1000000;
  int closure_reduction_depth = 0;
};

struct SchemaReport {
  std::vector<RuleVerdict> rules;
  bool fo_conservative = true;
  bool fo_terminating = true;
  std::string fo_detail;
  OverlapReport overlaps;
  bool pass = false;
  std::string to_text() const;
  std::string to_machine() const;  // RULE <name> <PASS|FAIL> <reason-code>
};

SchemaReport check_general_schema(const Signature& sig, const SchemaOptions& opts = {});

}  // namespace cac

#endif

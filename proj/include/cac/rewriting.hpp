#ifndef CAC_REWRITING_HPP
#define CAC_REWRITING_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cac/signature.hpp"
#include "cac/term.hpp"

namespace cac {

enum class Strategy { Outermost, Innermost };

struct ReductionStep {
  bool beta = true;
  std::string rule_name;  // when !beta
  Position position;
  Substitution matched;
  TermPtr before, after;
};

// Syntactic matching modulo alpha; pattern-bound variables match only the
// corresponding subject binders, free pattern variables never capture them.
std::optional<Substitution> match_pattern(const TermPtr& pattern, const TermPtr& subject);

std::optional<std::pair<TermPtr, ReductionStep>> step(const Signature& sig, const TermPtr& a,
                                                      Strategy strat = Strategy::Outermost);

using TraceFn = std::function<void(const ReductionStep&)>;

TermPtr normalize(const Signature& sig, const TermPtr& a, long fuel = 1000000,
                  Strategy strat = Strategy::Outermost, const TraceFn& trace = nullptr);

bool convertible(const Signature& sig, const TermPtr& a, const TermPtr& b, long fuel = 1000000);

struct ConservativityResult {
  bool ok = true;
  std::string variable;
  int lhs_count = 0, rhs_count = 0;
};
ConservativityResult check_conservative(const RewriteRule& r);

struct OverlapEntry {
  std::string rule1, rule2;
  Position position;     // in rule1's lhs
  bool first_order;      // both rules first-order
  bool joinable = false; // meaningful for first-order pairs
  std::string detail;
};
struct OverlapReport {
  std::vector<OverlapEntry> entries;
  std::vector<std::string> beta_overlaps;  // lhs containing an applied abstraction
  bool ok() const;
  std::string to_text() const;
};
OverlapReport check_overlaps(const Signature& sig, long fuel = 100000);

}  // namespace cac

#endif

#ifndef CAC_FRONTEND_HPP
#define CAC_FRONTEND_HPP

#include <optional>
#include <string>
#include <vector>

#include "cac/schema.hpp"
#include "cac/signature.hpp"
#include "cac/term.hpp"
#include "cac/typing.hpp"

namespace cac {

// Surface algebraic type: either an arrow (head empty, kids = {l, r}) or a
// name with optional instantiation arguments.
struct SType {
  std::string head;
  std::vector<SType> params;
  std::vector<SType> kids;
  int line = 0, col = 0;
  bool is_arrow() const { return head.empty(); }
};

struct STerm {
  enum Kind { Ident, StarTok, Lam, Pi, ArrowSugar, Apply } kind = Ident;
  std::string name;          // Ident / binder name
  std::vector<SType> angle;  // instance arguments on Ident
  std::vector<STerm> kids;   // Ident: () args; Lam/Pi: {dom, body}; ArrowSugar/Apply: {l, r}
  bool called = false;       // Ident with an explicit () argument list
  int line = 0, col = 0;
};

struct DSort { std::string name; std::vector<std::string> params; };
struct DCons { std::string name; std::vector<std::string> params; SType type; int line = 0; };
struct DFun {
  std::string name;
  std::vector<std::string> params;
  SType type;
  std::optional<bool> higher;               // `order first|higher`
  std::optional<Status> status;
  std::optional<std::set<int>> inductive;
  int line = 0;
};
struct DRule { STerm lhs, rhs; int line = 0; };
struct DRecursor { std::string name; SType sort; SType to; int line = 0; };
struct DUse { SType inst; int line = 0; };

struct SpecFile {
  std::vector<DSort> sorts;
  std::vector<DCons> conss;
  std::vector<DFun> funs;
  std::vector<DRule> rules;
  std::vector<DRecursor> recursors;
  std::vector<DUse> uses;
};

SpecFile parse_spec(const std::string& text);
SpecFile parse_spec_file(const std::string& path);

// Monomorphizes every parameterized family at each ground instantiation used,
// validates orders and positivity, and elaborates recursor requests.
Signature elaborate(const SpecFile& spec);

// env text: `x:TERM, y:TERM, ...`
Environment parse_env(const Signature& sig, const std::string& text);
TermPtr parse_term(const Signature& sig, const std::string& text,
                   const Environment& env = {});

std::string show_spec(const Signature& sig);

struct CliInvocation {
  std::string command;  // check | type | normalize | recursor
  std::string spec_path;
  std::string term_text;      // -e
  std::string env_text;       // -E
  std::string against_text;   // --against
  std::string recursor_sort;  // recursor: --sort
  std::string recursor_type;  // recursor: --to
  std::string recursor_name;  // recursor: --name
  long fuel = 1000000;
  bool assume_fo_terminating = false;
  bool explain = false;
  bool trace = false;
  int closure_reduction_depth = 0;
};

struct RunResult {
  int exit_code = 0;
  std::string output;
};

RunResult run(const CliInvocation& cli);

}  // namespace cac

#endif

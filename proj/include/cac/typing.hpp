#ifndef CAC_TYPING_HPP
#define CAC_TYPING_HPP

#include <optional>
#include <string>
#include <vector>

#include "cac/rewriting.hpp"
#include "cac/signature.hpp"
#include "cac/term.hpp"

namespace cac {

struct EnvDecl {
  std::string name;
  VarFlavor flavor = VarFlavor::Star;
  TermPtr type;
};

using Environment = std::vector<EnvDecl>;

const EnvDecl* env_lookup(const Environment& env, const std::string& x);
Environment alg_to_env(const AlgEnv& alg);

// One node per applied typing rule; printable for --explain.
struct Derivation {
  std::string rule;
  std::string judgement;
  std::vector<Derivation> premises;
  std::string to_text(int indent = 0) const;
};

struct InferOpts {
  long fuel = 1000000;
  Derivation* derivation = nullptr;
};

TermPtr infer(const Signature& sig, const Environment& env, const TermPtr& a,
              const InferOpts& opts = {});
bool check(const Signature& sig, const Environment& env, const TermPtr& a, const TermPtr& type,
           const InferOpts& opts = {});
void validate_env(const Signature& sig, const Environment& env, long fuel = 1000000);

enum class TermClass { Kind, TypeConstructor, Type, Object };
std::string show(TermClass c);
TermClass classify_term(const Signature& sig, const Environment& env, const TermPtr& a,
                        long fuel = 1000000);

}  // namespace cac

#endif

#include "cac/typing.hpp"

#include <sstream>

namespace cac {

const EnvDecl* env_lookup(const Environment& env, const std::string& x) {
  for (auto it = env.rbegin(); it != env.rend(); ++it)
    if (it->name == x) return &*it;
  return nullptr;
}

Environment alg_to_env(const AlgEnv& alg) {
  Environment env;
  for (const auto& [x, t] : alg) env.push_back({x, VarFlavor::Star, atype_to_term(t)});
  return env;
}

std::string Derivation::to_text(int indent) const {
  std::ostringstream os;
  for (int i = 0; i < indent; ++i) os << "  ";
  os << "(" << rule << ") " << judgement << "\n";
  for (const auto& p : premises) os << p.to_text(indent + 1);
  return os.str();
}

namespace {

std::string judge(const Environment& env, const TermPtr& a, const TermPtr& t) {
  std::ostringstream os;
  for (size_t i = 0; i < env.size(); ++i) {
    if (i) os << ", ";
    os << env[i].name << ":" << show(env[i].type);
  }
  if (!env.empty()) os << " ";
  os << "|- " << show(a) << " : " << show(t);
  return os.str();
}

struct Checker {
  const Signature& sig;
  long fuel;

  TermPtr infer(const Environment& env, const TermPtr& a, Derivation* d);

  // checks that inferred is convertible to expected (the (conv) side condition)
  void check_against(const Environment& env, const TermPtr& a, const TermPtr& expected,
                     Derivation* d, const char* where) {
    Derivation sub;
    TermPtr got = infer(env, a, d ? &sub : nullptr);
    bool ok = expected->kind == TermKind::Box ? got->kind == TermKind::Box
                                              : convertible(sig, got, expected, fuel);
    if (d) d->premises.push_back(std::move(sub));
    if (!ok)
      throw Error("type-error", std::string(where) + ": " + show(a) + " has type " + show(got) +
                                    ", expected " + show(expected));
  }

  // the sort (star or box) a theorem candidate lives in
  TermPtr sort_of(const Environment& env, const TermPtr& a, Derivation* d, const char* where) {
    Derivation sub;
    TermPtr t = infer(env, a, d ? &sub : nullptr);
    if (d) d->premises.push_back(std::move(sub));
    TermPtr n = t->kind == TermKind::Star || t->kind == TermKind::Box
                    ? t
                    : normalize(sig, t, fuel);
    if (n->kind != TermKind::Star && n->kind != TermKind::Box)
      throw Error("type-error",
                  std::string(where) + ": " + show(a) + " is not a type or kind (its type is " +
                      show(t) + ")");
    return n;
  }
};

TermPtr Checker::infer(const Environment& env, const TermPtr& a, Derivation* d) {
  switch (a->kind) {
    case TermKind::Star:
      if (d) *d = {"ax", judge(env, a, box()), {}};
      return box();
    case TermKind::Box:
      throw Error("box-untyped", "[] has no type");
    case TermKind::Sort:
      if (!sig.has_sort(a->name)) throw Error("unknown-sort", a->name);
      if (d) *d = {"sort", judge(env, a, star()), {}};
      return star();
    case TermKind::Var: {
      const EnvDecl* decl = env_lookup(env, a->name);
      if (!decl) throw Error("unbound-variable", a->name);
      if (decl->flavor != a->flavor)
        throw Error("type-error", "variable " + a->name + " used with the wrong flavor");
      if (d) *d = {"var", judge(env, a, decl->type), {}};
      return decl->type;
    }
    case TermKind::Cons: {
      const ConstructorDecl* c = sig.find_cons(a->name);
      if (!c) throw Error("unknown-symbol", a->name);
      if (static_cast<int>(a->args.size()) != c->arity())
        throw Error("arity-mismatch", a->name);
      if (d) *d = {"cons", "", {}};
      for (size_t i = 0; i < a->args.size(); ++i)
        check_against(env, a->args[i], atype_to_term(c->arg_types[i]), d, "constructor argument");
      TermPtr res = mk_sort_ref(c->output_sort);
      if (d) d->judgement = judge(env, a, res);
      return res;
    }
    case TermKind::Fun: {
      const FunctionDecl* f = sig.find_fun(a->name);
      if (!f) throw Error("unknown-symbol", a->name);
      if (static_cast<int>(a->args.size()) != f->arity())
        throw Error("arity-mismatch", a->name);
      if (d) *d = {"fun", "", {}};
      for (size_t i = 0; i < a->args.size(); ++i)
        check_against(env, a->args[i], atype_to_term(f->arg_types[i]), d, "function argument");
      TermPtr res = atype_to_term(f->output_type);
      if (d) d->judgement = judge(env, a, res);
      return res;
    }
    case TermKind::Prod: {
      if (d) *d = {"prod", "", {}};
      TermPtr p = sort_of(env, a->left, d, "product domain");
      Environment env2 = env;
      env2.push_back({a->name, p->kind == TermKind::Star ? VarFlavor::Star : VarFlavor::Box,
                      a->left});
      TermPtr q = sort_of(env2, a->right, d, "product body");
      if (d) d->judgement = judge(env, a, q);
      return q;
    }
    case TermKind::Abs: {
      if (d) *d = {"abs", "", {}};
      TermPtr p = sort_of(env, a->left, d, "abstraction domain");
      Environment env2 = env;
      env2.push_back({a->name, p->kind == TermKind::Star ? VarFlavor::Star : VarFlavor::Box,
                      a->left});
      Derivation sub;
      TermPtr c = infer(env2, a->right, d ? &sub : nullptr);
      if (d) d->premises.push_back(std::move(sub));
      if (c->kind == TermKind::Box)
        throw Error("type-error", "abstraction body is a kind: " + show(a->right));
      TermPtr prod = mk_prod(a->name, a->left,
                             c, env2.back().flavor);
      sort_of(env, prod, d ? d : nullptr, "abstraction product");
      if (d) d->judgement = judge(env, a, prod);
      return prod;
    }
    case TermKind::App: {
      if (d) *d = {"app", "", {}};
      Derivation sub;
      TermPtr tf = infer(env, a->left, d ? &sub : nullptr);
      if (d) d->premises.push_back(std::move(sub));
      TermPtr n = tf->kind == TermKind::Prod ? tf : normalize(sig, tf, fuel);
      if (n->kind != TermKind::Prod)
        throw Error("not-a-product",
                    show(a->left) + " has type " + show(tf) + ", which is not a product");
      check_against(env, a->right, n->left, d, "application argument");
      TermPtr res = subst1(n->right, n->name, n->flavor, a->right);
      if (d) d->judgement = judge(env, a, res);
      return res;
    }
  }
  throw Error("type-error", "unreachable");
}

}  // namespace

TermPtr infer(const Signature& sig, const Environment& env, const TermPtr& a,
              const InferOpts& opts) {
  Checker ck{sig, opts.fuel};
  return ck.infer(env, a, opts.derivation);
}

bool check(const Signature& sig, const Environment& env, const TermPtr& a, const TermPtr& type,
           const InferOpts& opts) {
  Checker ck{sig, opts.fuel};
  TermPtr got = ck.infer(env, a, opts.derivation);
  if (type->kind == TermKind::Box) return got->kind == TermKind::Box;
  return convertible(sig, got, type, opts.fuel);
}

void validate_env(const Signature& sig, const Environment& env, long fuel) {
  Environment prefix;
  for (const auto& d : env) {
    if (env_lookup(prefix, d.name))
      throw Error("invalid-environment", "duplicate variable " + d.name);
    TermPtr t;
    try {
      t = infer(sig, prefix, d.type, InferOpts{fuel, nullptr});
    } catch (const Error& e) {
      throw Error("invalid-environment", d.name + ": " + e.what());
    }
    TermPtr n = t->kind == TermKind::Star || t->kind == TermKind::Box ? t
                                                                      : normalize(sig, t, fuel);
    if (n->kind != TermKind::Star && n->kind != TermKind::Box)
      throw Error("invalid-environment",
                  d.name + ": declared type " + show(d.type) + " is typed by " + show(t) +
                      ", not by * or []");
    VarFlavor expect = n->kind == TermKind::Star ? VarFlavor::Star : VarFlavor::Box;
    if (d.flavor != expect)
      throw Error("invalid-environment", d.name + ": variable flavor does not match its type");
    prefix.push_back(d);
  }
}

std::string show(TermClass c) {
  switch (c) {
    case TermClass::Kind: return "kind";
    case TermClass::TypeConstructor: return "type-constructor";
    case TermClass::Type: return "type";
    case TermClass::Object: return "object";
  }
  return "?";
}

TermClass classify_term(const Signature& sig, const Environment& env, const TermPtr& a,
                        long fuel) {
  InferOpts opts{fuel, nullptr};
  TermPtr t = infer(sig, env, a, opts);
  if (t->kind == TermKind::Box) return TermClass::Kind;
  TermPtr n = t->kind == TermKind::Star ? t : normalize(sig, t, fuel);
  if (n->kind == TermKind::Star) return TermClass::Type;
  TermPtr tt = infer(sig, env, n, opts);
  TermPtr ntt = tt->kind == TermKind::Star || tt->kind == TermKind::Box
                    ? tt
                    : normalize(sig, tt, fuel);
  if (ntt->kind == TermKind::Box) return TermClass::TypeConstructor;
  if (ntt->kind == TermKind::Star) return TermClass::Object;
  throw Error("type-error", show(a) + " is not classifiable");
}

}  // namespace cac

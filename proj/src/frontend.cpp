#include "cac/frontend.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "cac/rewriting.hpp"

namespace cac {

namespace {

// ---------------------------------------------------------------- lexer

struct Token {
  enum Kind { Ident, Sym, End } kind = End;
  std::string text;
  int line = 1, col = 1;
};

bool ident_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
         c == '_' || c == '\'';
}

std::vector<Token> lex(const std::string& text) {
  std::vector<Token> out;
  int line = 1, col = 1;
  size_t i = 0;
  auto advance = [&](size_t n) {
    for (size_t k = 0; k < n; ++k) {
      if (text[i + k] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    i += n;
  };
  while (i < text.size()) {
    char c = text[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      advance(1);
      continue;
    }
    if (c == '#') {
      while (i < text.size() && text[i] != '\n') advance(1);
      continue;
    }
    Token t;
    t.line = line;
    t.col = col;
    if (ident_char(c)) {
      size_t j = i;
      while (j < text.size() && ident_char(text[j])) ++j;
      t.kind = Token::Ident;
      t.text = text.substr(i, j - i);
      advance(j - i);
    } else if (text.compare(i, 2, "->") == 0 || text.compare(i, 2, "=>") == 0) {
      t.kind = Token::Sym;
      t.text = text.substr(i, 2);
      advance(2);
    } else if (std::string("(){}<>,:.*\\!").find(c) != std::string::npos) {
      t.kind = Token::Sym;
      t.text = std::string(1, c);
      advance(1);
    } else {
      throw Error("parse-error",
                  "unexpected character '" + std::string(1, c) + "' at " + std::to_string(line) +
                      ":" + std::to_string(col),
                  2);
    }
    out.push_back(t);
  }
  out.push_back(Token{Token::End, "", line, col});
  return out;
}

const std::set<std::string> kStatementKeywords = {"sort",     "cons", "fun",   "rule",
                                                  "recursor", "use",  "order", "status",
                                                  "inductive", "of",  "to"};

// ---------------------------------------------------------------- parser

// Purely syntactic mangling of a surface type, matching mangle() on the
// resolved type: arrows parenthesized, instance arguments in angle brackets.
std::string smangle(const SType& t) {
  if (t.is_arrow()) return "(" + smangle(t.kids[0]) + "->" + smangle(t.kids[1]) + ")";
  std::string s = t.head;
  if (!t.params.empty()) {
    s += "<";
    for (size_t i = 0; i < t.params.size(); ++i) {
      if (i) s += ",";
      s += smangle(t.params[i]);
    }
    s += ">";
  }
  return s;
}

struct Parser {
  std::vector<Token> toks;
  size_t pos = 0;

  const Token& peek(size_t k = 0) const { return toks[std::min(pos + k, toks.size() - 1)]; }
  const Token& next() { return toks[std::min(pos++, toks.size() - 1)]; }

  [[noreturn]] void fail(const std::string& msg) {
    const Token& t = peek();
    throw Error("parse-error",
                msg + " at " + std::to_string(t.line) + ":" + std::to_string(t.col) +
                    (t.kind == Token::End ? " (end of input)" : " near '" + t.text + "'"),
                2);
  }

  bool at_end() const { return peek().kind == Token::End; }
  // call and instance syntax binds only when the bracket touches the name:
  // `f(x)` is a call, `f (x)` is juxtaposed application
  bool at_adjacent_sym(const std::string& s) const {
    if (!at_sym(s) || pos == 0) return false;
    const Token& prev = toks[pos - 1];
    return peek().line == prev.line && peek().col == prev.col + static_cast<int>(prev.text.size());
  }
  bool at_sym(const std::string& s) const { return peek().kind == Token::Sym && peek().text == s; }
  bool at_ident(const std::string& s) const {
    return peek().kind == Token::Ident && peek().text == s;
  }
  void expect_sym(const std::string& s) {
    if (!at_sym(s)) fail("expected '" + s + "'");
    next();
  }
  std::string expect_ident() {
    if (peek().kind != Token::Ident) fail("expected a name");
    return next().text;
  }

  // ---- types

  SType parse_type_atom() {
    SType t;
    t.line = peek().line;
    t.col = peek().col;
    if (at_sym("(")) {
      next();
      int ln = t.line, cl = t.col;
      t = parse_type();
      t.line = ln;
      t.col = cl;
      expect_sym(")");
      return t;
    }
    t.head = expect_ident();
    if (at_sym("<")) {
      next();
      while (true) {
        t.params.push_back(parse_type());
        if (at_sym(",")) {
          next();
          continue;
        }
        break;
      }
      expect_sym(">");
    }
    return t;
  }

  SType parse_type() {
    SType l = parse_type_atom();
    if (at_sym("->")) {
      next();
      SType r = parse_type();
      SType arrow;
      arrow.line = l.line;
      arrow.col = l.col;
      arrow.kids = {l, r};
      return arrow;
    }
    return l;
  }

  // ---- terms

  bool at_term_start() const {
    if (at_sym("(") || at_sym("*") || at_sym("\\") || at_sym("!")) return true;
    return peek().kind == Token::Ident && !kStatementKeywords.count(peek().text);
  }

  STerm parse_term_atom() {
    STerm t;
    t.line = peek().line;
    t.col = peek().col;
    if (at_sym("(")) {
      next();
      t = parse_term();
      expect_sym(")");
      return t;
    }
    if (at_sym("*")) {
      next();
      t.kind = STerm::StarTok;
      return t;
    }
    t.kind = STerm::Ident;
    t.name = expect_ident();
    if (at_adjacent_sym("<")) {
      next();
      while (true) {
        t.angle.push_back(parse_type());
        if (at_sym(",")) {
          next();
          continue;
        }
        break;
      }
      expect_sym(">");
    }
    if (at_adjacent_sym("(")) {
      next();
      t.called = true;
      if (!at_sym(")")) {
        while (true) {
          t.kids.push_back(parse_term());
          if (at_sym(",")) {
            next();
            continue;
          }
          break;
        }
      }
      expect_sym(")");
    }
    return t;
  }

  STerm parse_binder(STerm::Kind kind) {
    STerm t;
    t.kind = kind;
    t.line = peek().line;
    t.col = peek().col;
    next();  // '\' | '!' | 'Pi'
    t.name = expect_ident();
    expect_sym(":");
    STerm dom = parse_term();
    expect_sym(".");
    STerm body = parse_term();
    t.kids = {dom, body};
    return t;
  }

  STerm parse_app_term() {
    if (at_sym("\\")) return parse_binder(STerm::Lam);
    if (at_sym("!") || at_ident("Pi")) return parse_binder(STerm::Pi);
    STerm t = parse_term_atom();
    while (at_term_start()) {
      STerm app;
      app.kind = STerm::Apply;
      app.line = t.line;
      app.col = t.col;
      app.kids = {t, parse_term_atom()};
      t = app;
    }
    return t;
  }

  STerm parse_term() {
    STerm t = parse_app_term();
    if (at_sym("->")) {
      next();
      STerm arrow;
      arrow.kind = STerm::ArrowSugar;
      arrow.line = t.line;
      arrow.col = t.col;
      arrow.kids = {t, parse_term()};
      return arrow;
    }
    return t;
  }

  // ---- statuses

  int parse_index() {
    std::string id = expect_ident();
    if (id.size() < 2 || id[0] != 'x' ||
        !std::all_of(id.begin() + 1, id.end(), [](char c) { return c >= '0' && c <= '9'; }))
      fail("expected an argument index like x1");
    return std::stoi(id.substr(1));
  }

  Status parse_status() {
    Status st;
    if (!at_ident("lex")) fail("expected lex(...)");
    next();
    expect_sym("(");
    while (true) {
      StatusEntry e;
      if (at_ident("mul")) {
        next();
        e.multiset = true;
        expect_sym("(");
        while (true) {
          e.indices.push_back(parse_index());
          if (at_sym(",")) {
            next();
            continue;
          }
          break;
        }
        expect_sym(")");
      } else {
        e.indices.push_back(parse_index());
      }
      st.entries.push_back(e);
      if (at_sym(",")) {
        next();
        continue;
      }
      break;
    }
    expect_sym(")");
    std::set<int> seen;
    for (const auto& e : st.entries)
      for (int i : e.indices)
        if (!seen.insert(i).second) fail("argument index x" + std::to_string(i) + " repeated");
    return st;
  }

  // Declaration parameters: plain idents declare type parameters; ground
  // types (nat, list<nat>, (nat -> nat)) declare a monomorphic instance.
  std::vector<std::string> parse_params() {
    std::vector<std::string> ps;
    if (at_sym("<")) {
      next();
      while (true) {
        ps.push_back(smangle(parse_type()));
        if (at_sym(",")) {
          next();
          continue;
        }
        break;
      }
      expect_sym(">");
    }
    return ps;
  }

  SpecFile parse_spec() {
    SpecFile spec;
    while (!at_end()) {
      int ln = peek().line;
      std::string kw = expect_ident();
      if (kw == "sort") {
        DSort d;
        d.name = expect_ident();
        d.params = parse_params();
        spec.sorts.push_back(d);
      } else if (kw == "cons") {
        DCons d;
        d.line = ln;
        d.name = expect_ident();
        d.params = parse_params();
        expect_sym(":");
        d.type = parse_type();
        spec.conss.push_back(d);
      } else if (kw == "fun") {
        DFun d;
        d.line = ln;
        d.name = expect_ident();
        d.params = parse_params();
        expect_sym(":");
        d.type = parse_type();
        while (true) {
          if (at_ident("order")) {
            next();
            std::string o = expect_ident();
            if (o != "first" && o != "higher") fail("order must be first or higher");
            d.higher = o == "higher";
          } else if (at_ident("status")) {
            next();
            d.status = parse_status();
          } else if (at_ident("inductive")) {
            next();
            expect_sym("{");
            std::set<int> ind;
            while (!at_sym("}")) {
              std::string id = expect_ident();
              for (char c : id)
                if (c < '0' || c > '9') fail("expected an argument position");
              ind.insert(std::stoi(id));
              if (at_sym(",")) next();
            }
            expect_sym("}");
            d.inductive = ind;
          } else {
            break;
          }
        }
        spec.funs.push_back(d);
      } else if (kw == "rule") {
        DRule d;
        d.line = ln;
        d.lhs = parse_term();
        expect_sym("=>");
        d.rhs = parse_term();
        spec.rules.push_back(d);
      } else if (kw == "recursor") {
        DRecursor d;
        d.line = ln;
        d.name = expect_ident();
        if (!at_ident("of")) fail("expected 'of'");
        next();
        d.sort = parse_type_atom();
        if (!at_ident("to")) fail("expected 'to'");
        next();
        d.to = parse_type();
        spec.recursors.push_back(d);
      } else if (kw == "use") {
        DUse d;
        d.line = ln;
        d.inst = parse_type_atom();
        spec.uses.push_back(d);
      } else {
        fail("expected a declaration (sort/cons/fun/rule/recursor/use)");
      }
    }
    return spec;
  }
};

// ---------------------------------------------------------- name mangling

std::string mangle(const ATypePtr& t) {
  if (t->is_sort()) return t->sort;
  return "(" + mangle(t->left) + "->" + mangle(t->right) + ")";
}

std::string mangle_instance(const std::string& base, const std::vector<ATypePtr>& args) {
  if (args.empty()) return base;
  std::string s = base + "<";
  for (size_t i = 0; i < args.size(); ++i) {
    if (i) s += ",";
    s += mangle(args[i]);
  }
  return s + ">";
}

// A product chain landing in * or [].
bool kind_like(const TermPtr& t) {
  const Term* c = t.get();
  while (c->kind == TermKind::Prod) c = c->right.get();
  return c->kind == TermKind::Star || c->kind == TermKind::Box;
}

void check_arity(const std::string& name, int line, int want, size_t got) {
  if (static_cast<size_t>(want) != got)
    throw Error("arity-mismatch",
                name + " takes " + std::to_string(want) + " argument(s), got " +
                    std::to_string(got) + " (line " + std::to_string(line) + ")",
                2);
}

// ------------------------------------------------------------ elaboration

// A declaration parameter that is compound, or that names a declared sort,
// denotes a ground type; the declaration then introduces a single instance
// under its mangled name rather than a template.
void fold_ground_decls(SpecFile& spec) {
  std::set<std::string> sort_names;
  for (const auto& d : spec.sorts) sort_names.insert(d.name);
  auto ground = [&](const std::string& p) {
    return p.find('<') != std::string::npos || p.find('(') != std::string::npos ||
           sort_names.count(p) > 0;
  };
  auto fold = [&](std::string& name, std::vector<std::string>& params) {
    if (params.empty()) return;
    size_t n = 0;
    for (const auto& p : params) n += ground(p) ? 1 : 0;
    if (n == 0) return;
    if (n != params.size())
      throw Error("parse-error", name + " mixes type parameters and ground types", 2);
    name += "<";
    for (size_t i = 0; i < params.size(); ++i) {
      if (i) name += ",";
      name += params[i];
    }
    name += ">";
    params.clear();
  };
  for (auto& d : spec.sorts) fold(d.name, d.params);
  for (auto& d : spec.conss) fold(d.name, d.params);
  for (auto& d : spec.funs) fold(d.name, d.params);
}

using Binding = std::map<std::string, ATypePtr>;

struct Elaborator {
  Signature sig;
  std::map<std::string, DSort> sort_templates;
  std::map<std::string, std::vector<DCons>> cons_by_sort;  // sort template -> constructors
  std::map<std::string, const DCons*> cons_templates;      // constructor -> its template
  std::map<std::string, DFun> fun_templates;
  std::map<std::string, std::vector<const DRule*>> rules_by_head;
  std::set<std::string> instantiating;

  void register_decls(const SpecFile& spec) {
    auto claim = [&](const std::string& n) {
      if (sort_templates.count(n) || cons_templates.count(n) || fun_templates.count(n))
        throw Error("duplicate-name", n + " declared twice", 2);
    };
    for (const auto& d : spec.sorts) {
      claim(d.name);
      sort_templates[d.name] = d;
      cons_by_sort[d.name];
    }
    for (const auto& d : spec.conss) {
      claim(d.name);
      const SType* out = &d.type;
      while (out->is_arrow()) out = &out->kids[1];
      auto sit = sort_templates.find(out->head);
      if (sit == sort_templates.end()) sit = sort_templates.find(smangle(*out));
      if (sit == sort_templates.end())
        throw Error("unknown-name",
                    "constructor " + d.name + " outputs unknown sort " + out->head + " (line " +
                        std::to_string(d.line) + ")",
                    2);
      if (d.params != sit->second.params)
        throw Error("parse-error",
                    "constructor " + d.name + " must carry the parameters of sort " + out->head +
                        " (line " + std::to_string(d.line) + ")",
                    2);
      cons_by_sort[sit->first].push_back(d);
      cons_templates[d.name] = nullptr;  // name claimed; pointer fixed below
    }
    for (const auto& [s, cs] : cons_by_sort)
      for (const auto& c : cs) cons_templates[c.name] = &c;
    for (const auto& d : spec.funs) {
      claim(d.name);
      fun_templates[d.name] = d;
    }
    for (const auto& d : spec.rules) {
      if (d.lhs.kind != STerm::Ident || !d.lhs.called)
        throw Error("parse-error",
                    "rule lhs must apply a declared function symbol (line " +
                        std::to_string(d.line) + ")",
                    2);
      std::string key = d.lhs.name;
      if (!fun_templates.count(key)) {
        SType st;
        st.head = d.lhs.name;
        st.params = d.lhs.angle;
        key = smangle(st);  // ground instance head like map<nat,bool>
        if (!fun_templates.count(key))
          throw Error("unknown-name",
                      "rule lhs head " + d.lhs.name + " is not a declared function (line " +
                          std::to_string(d.line) + ")",
                      2);
      }
      rules_by_head[key].push_back(&d);
    }
  }

  ATypePtr resolve_type(const SType& t, const Binding& binding) {
    if (t.is_arrow())
      return mk_arrow(resolve_type(t.kids[0], binding), resolve_type(t.kids[1], binding));
    auto bit = binding.find(t.head);
    if (bit != binding.end()) {
      if (!t.params.empty())
        throw Error("parse-error", "type parameter " + t.head + " cannot take arguments", 2);
      return bit->second;
    }
    auto sit = sort_templates.find(t.head);
    if (sit == sort_templates.end()) {
      // a ground instance declared under its mangled name
      if (!t.params.empty()) {
        std::vector<ATypePtr> args;
        for (const auto& p : t.params) args.push_back(resolve_type(p, binding));
        std::string name = mangle_instance(t.head, args);
        if (sort_templates.count(name)) return mk_asort(request_sort(name, {}));
      }
      throw Error("unknown-name", "unknown sort " + t.head + " at line " + std::to_string(t.line),
                  2);
    }
    if (t.params.size() != sit->second.params.size())
      throw Error("arity-mismatch", "sort " + t.head + " expects " +
                                        std::to_string(sit->second.params.size()) +
                                        " parameter(s)",
                  2);
    std::vector<ATypePtr> args;
    for (const auto& p : t.params) args.push_back(resolve_type(p, binding));
    return mk_asort(request_sort(t.head, args));
  }

  std::string request_sort(const std::string& base, const std::vector<ATypePtr>& args) {
    const DSort& tmpl = sort_templates.at(base);
    if (args.size() != tmpl.params.size())
      throw Error("arity-mismatch", "sort " + base + " expects " +
                                        std::to_string(tmpl.params.size()) + " parameter(s)",
                  2);
    std::string name = mangle_instance(base, args);
    if (sig.has_sort(name) || instantiating.count(name)) return name;
    instantiating.insert(name);
    sig.add_sort(name);
    Binding binding;
    for (size_t i = 0; i < tmpl.params.size(); ++i) binding[tmpl.params[i]] = args[i];
    for (const auto& c : cons_by_sort.at(base)) {
      ConstructorDecl decl;
      decl.name = mangle_instance(c.name, args);
      decl.type = resolve_type(c.type, binding);
      ATypePtr out;
      decl.arg_types = arrow_args(decl.type, out);
      decl.output_sort = name;
      sig.add_constructor(decl);
    }
    instantiating.erase(name);
    return name;
  }

  std::string request_fun(const std::string& base, const std::vector<ATypePtr>& args) {
    const DFun& tmpl = fun_templates.at(base);
    if (args.size() != tmpl.params.size())
      throw Error("arity-mismatch", "symbol " + base + " expects " +
                                        std::to_string(tmpl.params.size()) + " parameter(s)",
                  2);
    std::string name = mangle_instance(base, args);
    if (sig.functions.count(name) || instantiating.count(name)) return name;
    instantiating.insert(name);
    Binding binding;
    for (size_t i = 0; i < tmpl.params.size(); ++i) binding[tmpl.params[i]] = args[i];
    FunctionDecl decl;
    decl.name = name;
    ATypePtr full = resolve_type(tmpl.type, binding);
    // the arity is the declaration's arrow count, so an arrow-type
    // instantiation of the result does not add argument positions
    decl.output_type = full;
    for (const SType* s = &tmpl.type; s->is_arrow(); s = &s->kids[1]) {
      decl.arg_types.push_back(decl.output_type->left);
      decl.output_type = decl.output_type->right;
    }
    decl.higher_order = tmpl.higher ? *tmpl.higher : !atype_first_order(full);
    decl.status = tmpl.status;
    decl.inductive_positions = tmpl.inductive;
    sig.add_function(decl);
    int k = 0;
    for (const DRule* dr : rules_by_head[base]) {
      Binding rb;
      if (!tmpl.params.empty()) {
        if (dr->lhs.angle.size() != tmpl.params.size())
          throw Error("parse-error",
                      "rule for " + base + " must name all parameters (line " +
                          std::to_string(dr->line) + ")",
                      2);
        for (size_t i = 0; i < tmpl.params.size(); ++i) {
          const SType& p = dr->lhs.angle[i];
          if (p.is_arrow() || !p.params.empty())
            throw Error("parse-error", "rule parameters must be plain names (line " +
                                           std::to_string(dr->line) + ")",
                        2);
          rb[p.head] = args[i];
        }
      }
      add_rule(name, *dr, rb, ++k);
    }
    instantiating.erase(name);
    return name;
  }

  void add_rule(const std::string& head, const DRule& dr, const Binding& binding, int index) {
    RewriteRule r;
    r.name = head + "." + std::to_string(index);
    std::vector<std::string> bound;
    r.lhs = resolve_rule_term(dr.lhs, binding, bound);
    r.rhs = resolve_rule_term(dr.rhs, binding, bound);
    r.head = head;
    auto lv = free_vars(r.lhs);
    for (const auto& v : free_vars(r.rhs))
      if (!lv.count(v))
        throw Error("free-variable",
                    v.name + " occurs only in the rhs (line " + std::to_string(dr.line) + ")");
    const FunctionDecl& f = sig.functions.at(head);
    bool sides_fo = first_order_term(r.lhs) && first_order_term(r.rhs);
    if (!f.higher_order && !sides_fo)
      throw Error("parse-error",
                  "first-order symbol " + head + " defined by a higher-order rule (line " +
                      std::to_string(dr.line) + "); declare it `order higher`",
                  2);
    r.order = f.higher_order ? RuleOrder::Higher : RuleOrder::First;
    try {
      r.rule_env = infer_rule_env(sig, r.lhs);
    } catch (const Error&) {
      // left empty; the schema check reports the rule as inadmissible
    }
    sig.rules.push_back(r);
  }

  bool first_order_term(const TermPtr& t) {
    switch (t->kind) {
      case TermKind::Var:
        break;
      case TermKind::Cons: {
        const auto* c = sig.find_cons(t->name);
        if (!c || !atype_first_order(c->type)) return false;
        break;
      }
      case TermKind::Fun: {
        const auto* f = sig.find_fun(t->name);
        if (!f || f->higher_order || !atype_first_order(f->type())) return false;
        break;
      }
      default:
        return false;
    }
    for (const auto& a : t->args)
      if (!first_order_term(a)) return false;
    return true;
  }

  TermPtr resolve_rule_term(const STerm& t, const Binding& binding,
                            std::vector<std::string>& bound) {
    switch (t.kind) {
      case STerm::StarTok:
      case STerm::Pi:
      case STerm::ArrowSugar:
        throw Error("parse-error",
                    "rule terms contain only variables, abstractions and symbol applications "
                    "(line " +
                        std::to_string(t.line) + ")",
                    2);
      case STerm::Lam: {
        ATypePtr dom = annotation_type(t.kids[0], binding);
        bound.push_back(t.name);
        TermPtr body = resolve_rule_term(t.kids[1], binding, bound);
        bound.pop_back();
        return mk_abs(t.name, atype_to_term(dom), body);
      }
      case STerm::Apply:
        return mk_app(resolve_rule_term(t.kids[0], binding, bound),
                      resolve_rule_term(t.kids[1], binding, bound));
      case STerm::Ident:
        break;
    }
    if (t.angle.empty() &&
        (std::find(bound.begin(), bound.end(), t.name) != bound.end() ||
         (!cons_templates.count(t.name) && !fun_templates.count(t.name) &&
          !sort_templates.count(t.name) && !binding.count(t.name)))) {
      // pattern variable; a parenthesized argument list is curried application
      TermPtr out = mk_var(t.name);
      for (const auto& k : t.kids) out = mk_app(out, resolve_rule_term(k, binding, bound));
      return out;
    }
    std::vector<ATypePtr> targs;
    for (const auto& a : t.angle) targs.push_back(resolve_type(a, binding));
    if (sort_templates.count(t.name) || binding.count(t.name)) {
      if (t.called)
        throw Error("parse-error", "sort " + t.name + " is not applicable (line " +
                                       std::to_string(t.line) + ")",
                    2);
      if (binding.count(t.name)) {
        const ATypePtr& b = binding.at(t.name);
        if (!b->is_sort())
          throw Error("parse-error", "parameter " + t.name + " is not a sort here (line " +
                                         std::to_string(t.line) + ")",
                      2);
        return mk_sort_ref(b->sort);
      }
      return mk_sort_ref(request_sort(t.name, targs));
    }
    // ground instances declared under their mangled names
    std::string mang = mangle_instance(t.name, targs);
    if (!t.angle.empty() && sort_templates.count(mang)) {
      if (t.called)
        throw Error("parse-error", "sort " + mang + " is not applicable (line " +
                                       std::to_string(t.line) + ")",
                    2);
      return mk_sort_ref(request_sort(mang, {}));
    }
    std::vector<TermPtr> args;
    for (const auto& k : t.kids) args.push_back(resolve_rule_term(k, binding, bound));
    if (cons_templates.count(t.name)) return make_cons(t.name, targs, t.line, args);
    if (!t.angle.empty() && cons_templates.count(mang)) return make_cons(mang, {}, t.line, args);
    if (fun_templates.count(t.name) || (!t.angle.empty() && fun_templates.count(mang))) {
      std::string name = fun_templates.count(t.name) ? request_fun(t.name, targs)
                                                     : request_fun(mang, {});
      check_arity(name, t.line, sig.functions.at(name).arity(), args.size());
      return mk_fun(name, args);
    }
    throw Error("unknown-name", "unknown symbol " + t.name + " at line " + std::to_string(t.line),
                2);
  }

  TermPtr make_cons(const std::string& cname, const std::vector<ATypePtr>& targs, int line,
                    const std::vector<TermPtr>& args) {
    const DCons* tmpl = cons_templates.at(cname);
    if (targs.size() != tmpl->params.size())
      throw Error("arity-mismatch", "constructor " + cname + " expects " +
                                        std::to_string(tmpl->params.size()) + " parameter(s)",
                  2);
    const SType* out = &tmpl->type;
    while (out->is_arrow()) out = &out->kids[1];
    Binding binding;
    for (size_t i = 0; i < tmpl->params.size(); ++i) binding[tmpl->params[i]] = targs[i];
    resolve_type(*out, binding);  // instantiates the sort and its constructors
    std::string name = mangle_instance(cname, targs);
    const ConstructorDecl* c = sig.find_cons(name);
    if (!c) throw Error("unknown-name", "constructor " + name, 2);
    check_arity(name, line, c->arity(), args.size());
    return mk_cons(name, args);
  }

  // binder annotations inside rules must be algebraic types
  ATypePtr annotation_type(const STerm& t, const Binding& binding) {
    if (t.kind == STerm::ArrowSugar)
      return mk_arrow(annotation_type(t.kids[0], binding), annotation_type(t.kids[1], binding));
    if (t.kind == STerm::Ident && !t.called) {
      SType st;
      st.head = t.name;
      st.params = t.angle;
      st.line = t.line;
      return resolve_type(st, binding);
    }
    throw Error("parse-error",
                "binder annotation must be an algebraic type (line " + std::to_string(t.line) +
                    ")",
                2);
  }

  void finish(const SpecFile& spec) {
    for (const auto& d : spec.sorts)
      if (d.params.empty()) request_sort(d.name, {});
    for (const auto& d : spec.funs)
      if (d.params.empty()) request_fun(d.name, {});
    for (const auto& u : spec.uses) {
      if (u.inst.is_arrow())
        throw Error("parse-error",
                    "use expects a named instance (line " + std::to_string(u.line) + ")", 2);
      std::vector<ATypePtr> args;
      for (const auto& p : u.inst.params) args.push_back(resolve_type(p, {}));
      if (sort_templates.count(u.inst.head))
        request_sort(u.inst.head, args);
      else if (fun_templates.count(u.inst.head))
        request_fun(u.inst.head, args);
      else
        throw Error("unknown-name",
                    "unknown family " + u.inst.head + " at line " + std::to_string(u.line), 2);
    }
    for (const auto& d : spec.recursors) {
      ATypePtr src = resolve_type(d.sort, {});
      if (!src->is_sort())
        throw Error("parse-error",
                    "recursor source must be a sort (line " + std::to_string(d.line) + ")", 2);
      ATypePtr to = resolve_type(d.to, {});
      if (sig.functions.count(d.name) || sig.constructors.count(d.name) || sig.has_sort(d.name))
        throw Error("duplicate-name", d.name + " declared twice", 2);
      auto [decl, rules] = generate_recursor(sig, src->sort, to, d.name);
      sig.add_function(decl);
      for (const auto& r : rules) sig.rules.push_back(r);
    }
    OrderReport orders = check_orders(sig);
    if (!orders.ok) {
      if (!orders.sort_cycle.empty()) throw Error("sort-cycle", orders.to_text());
      throw Error("fun-cycle", orders.to_text());
    }
    for (const auto& s : sig.sort_order) {
      SortVerdict v = classify_sort(sig, s);
      if (v.cls == SortClass::Rejected) throw Error("positivity", s + ": " + v.reason);
    }
  }
};

// --------------------------------------------------- signature-based terms

struct TermResolver {
  const Signature& sig;
  const Environment& env;
  std::vector<std::pair<std::string, VarFlavor>> bound;

  ATypePtr resolve_sig_type(const SType& t) {
    if (t.is_arrow()) return mk_arrow(resolve_sig_type(t.kids[0]), resolve_sig_type(t.kids[1]));
    std::vector<ATypePtr> args;
    for (const auto& p : t.params) args.push_back(resolve_sig_type(p));
    std::string name = mangle_instance(t.head, args);
    if (!sig.has_sort(name))
      throw Error("unknown-name", "unknown sort " + name + " at line " + std::to_string(t.line),
                  2);
    return mk_asort(name);
  }

  TermPtr resolve(const STerm& t) {
    switch (t.kind) {
      case STerm::StarTok:
        return star();
      case STerm::ArrowSugar: {
        TermPtr dom = resolve(t.kids[0]);
        TermPtr body = resolve(t.kids[1]);
        std::set<std::string> avoid;
        for (const auto& v : free_vars(body)) avoid.insert(v.name);
        return mk_prod(fresh_name("_", avoid), dom, body,
                       kind_like(dom) ? VarFlavor::Box : VarFlavor::Star);
      }
      case STerm::Lam:
      case STerm::Pi: {
        TermPtr dom = resolve(t.kids[0]);
        VarFlavor f = kind_like(dom) ? VarFlavor::Box : VarFlavor::Star;
        bound.push_back({t.name, f});
        TermPtr body = resolve(t.kids[1]);
        bound.pop_back();
        return t.kind == STerm::Lam ? mk_abs(t.name, dom, body, f)
                                    : mk_prod(t.name, dom, body, f);
      }
      case STerm::Apply:
        return mk_app(resolve(t.kids[0]), resolve(t.kids[1]));
      case STerm::Ident:
        break;
    }
    TermPtr varhead;
    if (t.angle.empty())
      for (auto it = bound.rbegin(); it != bound.rend(); ++it)
        if (it->first == t.name) {
          varhead = mk_var(t.name, it->second);
          break;
        }
    if (!varhead) {
      std::vector<ATypePtr> targs;
      for (const auto& a : t.angle) targs.push_back(resolve_sig_type(a));
      std::string name = mangle_instance(t.name, targs);
      if (sig.has_sort(name)) {
        if (t.called)
          throw Error("parse-error",
                      "sort " + name + " is not applicable (line " + std::to_string(t.line) + ")",
                      2);
        return mk_sort_ref(name);
      }
      const auto* c = sig.find_cons(name);
      const auto* f = sig.find_fun(name);
      if (c || f) {
        std::vector<TermPtr> args;
        for (const auto& k : t.kids) args.push_back(resolve(k));
        check_arity(name, t.line, c ? c->arity() : f->arity(), args.size());
        return c ? mk_cons(name, args) : mk_fun(name, args);
      }
      if (t.angle.empty())
        if (const auto* d = env_lookup(env, t.name)) varhead = mk_var(t.name, d->flavor);
    }
    if (!varhead)
      throw Error("unknown-name", "unknown name " + t.name + " at line " + std::to_string(t.line),
                  2);
    // a parenthesized argument list on a variable is curried application
    TermPtr out = varhead;
    for (const auto& k : t.kids) out = mk_app(out, resolve(k));
    return out;
  }
};

std::string show_positions(const std::set<int>& ps) {
  std::string s = "{";
  bool first = true;
  for (int i : ps) {
    if (!first) s += ", ";
    first = false;
    s += std::to_string(i);
  }
  return s + "}";
}

std::string show_fun_decl(const FunctionDecl& f) {
  std::string s = "fun " + f.name + " : " + show(f.type());
  s += f.higher_order ? " order higher" : " order first";
  if (f.status) s += " status " + f.status->show();
  if (f.inductive_positions) s += " inductive " + show_positions(*f.inductive_positions);
  return s;
}

}  // namespace

SpecFile parse_spec(const std::string& text) {
  Parser p{lex(text)};
  return p.parse_spec();
}

SpecFile parse_spec_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("io-error", "cannot open " + path, 2);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_spec(buf.str());
}

Signature elaborate(const SpecFile& spec) {
  SpecFile folded = spec;
  fold_ground_decls(folded);
  Elaborator el;
  el.register_decls(folded);
  el.finish(folded);
  return std::move(el.sig);
}

Environment parse_env(const Signature& sig, const std::string& text) {
  Environment env;
  Parser p{lex(text)};
  if (p.at_end()) return env;
  while (true) {
    EnvDecl d;
    d.name = p.expect_ident();
    p.expect_sym(":");
    STerm st = p.parse_term();
    TermResolver r{sig, env, {}};
    d.type = r.resolve(st);
    d.flavor = kind_like(d.type) ? VarFlavor::Box : VarFlavor::Star;
    env.push_back(d);
    if (p.at_sym(",")) {
      p.next();
      continue;
    }
    break;
  }
  if (!p.at_end()) p.fail("trailing input after environment");
  return env;
}

TermPtr parse_term(const Signature& sig, const std::string& text, const Environment& env) {
  Parser p{lex(text)};
  STerm st = p.parse_term();
  if (!p.at_end()) p.fail("trailing input after term");
  TermResolver r{sig, env, {}};
  return r.resolve(st);
}

std::string show_spec(const Signature& sig) {
  std::ostringstream out;
  for (const auto& s : sig.sort_order) {
    out << "sort " << s << "\n";
    for (const auto& c : sig.sorts.at(s))
      out << "cons " << c.name << " : " << show(c.type) << "\n";
  }
  for (const auto& [name, f] : sig.functions) out << show_fun_decl(f) << "\n";
  for (const auto& r : sig.rules)
    out << "rule " << show(r.lhs) << " => " << show(r.rhs) << "  # " << r.name << "\n";
  return out.str();
}

RunResult run(const CliInvocation& cli) {
  RunResult res;
  std::ostringstream out;
  try {
    SpecFile spec = parse_spec_file(cli.spec_path);
    Signature sig = elaborate(spec);
    if (cli.command == "check") {
      SchemaOptions opts;
      opts.assume_fo_terminating = cli.assume_fo_terminating;
      opts.fuel = cli.fuel;
      opts.closure_reduction_depth = cli.closure_reduction_depth;
      SchemaReport rep = check_general_schema(sig, opts);
      out << rep.to_text();
      if (cli.explain) out << rep.to_machine();
      res.exit_code = rep.pass ? 0 : 1;
    } else if (cli.command == "type") {
      Environment env = parse_env(sig, cli.env_text);
      validate_env(sig, env, cli.fuel);
      TermPtr a = parse_term(sig, cli.term_text, env);
      Derivation deriv;
      InferOpts opts;
      opts.fuel = cli.fuel;
      if (cli.explain) opts.derivation = &deriv;
      if (!cli.against_text.empty()) {
        TermPtr ty = parse_term(sig, cli.against_text, env);
        bool ok = check(sig, env, a, ty, opts);
        if (cli.explain) out << deriv.to_text();
        out << (ok ? "yes" : "no") << "\n";
        res.exit_code = ok ? 0 : 1;
      } else {
        TermPtr ty = infer(sig, env, a, opts);
        if (cli.explain) out << deriv.to_text();
        out << show(ty) << "\n";
        res.exit_code = 0;
      }
    } else if (cli.command == "normalize") {
      Environment env = parse_env(sig, cli.env_text);
      TermPtr a = parse_term(sig, cli.term_text, env);
      TraceFn trace = nullptr;
      if (cli.trace)
        trace = [&out](const ReductionStep& s) {
          out << (s.beta ? "beta" : s.rule_name) << " at " << show(s.position) << "\n";
        };
      TermPtr nf = normalize(sig, a, cli.fuel, Strategy::Outermost, trace);
      out << show(nf) << "\n";
      res.exit_code = 0;
    } else if (cli.command == "recursor") {
      Parser sp{lex(cli.recursor_sort)};
      SType sst = sp.parse_type_atom();
      if (!sp.at_end()) sp.fail("trailing input after sort");
      Parser tp{lex(cli.recursor_type)};
      SType tst = tp.parse_type();
      if (!tp.at_end()) tp.fail("trailing input after type");
      Environment empty;
      TermResolver r{sig, empty, {}};
      ATypePtr src = r.resolve_sig_type(sst);
      ATypePtr to = r.resolve_sig_type(tst);
      auto [decl, rules] = generate_recursor(sig, src->sort, to, cli.recursor_name);
      out << show_fun_decl(decl) << "\n";
      for (const auto& ru : rules) out << "rule " << show(ru.lhs) << " => " << show(ru.rhs) << "\n";
      res.exit_code = 0;
    } else {
      throw Error("usage", "unknown command " + cli.command, 2);
    }
  } catch (const Error& e) {
    out << "error " << e.what() << "\n";
    res.exit_code = e.exit_code;
  }
  res.output = out.str();
  return res;
}

}  // namespace cac

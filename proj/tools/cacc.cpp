#include <iostream>

#include <CLI11.hpp>

#include "cac/frontend.hpp"

int main(int argc, char** argv) {
  CLI::App app{"cacc - algebraic constructions checker"};
  app.require_subcommand(1);

  cac::CliInvocation cli;

  auto add_common = [&](CLI::App* c) {
    c->add_option("spec", cli.spec_path, "theory file")->required();
    c->add_option("--fuel", cli.fuel, "reduction step budget");
    c->add_flag("--explain", cli.explain, "print derivations / machine-readable verdicts");
  };

  CLI::App* check = app.add_subcommand("check", "validate a theory against the schema");
  add_common(check);
  check->add_flag("--assume-fo-terminating", cli.assume_fo_terminating,
                  "skip the built-in first-order termination search");
  check->add_option("--closure-reduction-depth", cli.closure_reduction_depth,
                    "bounded search depth for the reduction closure case");

  CLI::App* type = app.add_subcommand("type", "infer or check the type of a term");
  add_common(type);
  type->add_option("-e,--term", cli.term_text, "term to type")->required();
  type->add_option("-E,--env", cli.env_text, "environment: x:T, y:U, ...");
  type->add_option("--against", cli.against_text, "expected type");

  CLI::App* norm = app.add_subcommand("normalize", "reduce a term to normal form");
  add_common(norm);
  norm->add_option("-e,--term", cli.term_text, "term to normalize")->required();
  norm->add_option("-E,--env", cli.env_text, "environment: x:T, y:U, ...");
  norm->add_flag("--trace", cli.trace, "print each reduction step");

  CLI::App* rec = app.add_subcommand("recursor", "print a generated recursor");
  add_common(rec);
  rec->add_option("--sort", cli.recursor_sort, "source sort")->required();
  rec->add_option("--to", cli.recursor_type, "output type")->required();
  rec->add_option("--name", cli.recursor_name, "symbol name (defaults to rec_<sort>_<type>)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  for (CLI::App* c : {check, type, norm, rec})
    if (c->parsed()) cli.command = c->get_name();

  cac::RunResult res = cac::run(cli);
  (res.exit_code == 0 ? std::cout : std::cerr) << res.output;
  return res.exit_code;
}

// hmc: parse, model-check, prove, check and unfold hybrid mu-calculus formulas
#include "hmu/prover.hh"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace
{
  using namespace hmu;

  enum Exit { ok = 0, negative = 1, input = 2, io = 3, budget = 4 };

  struct IoError : std::runtime_error
  {
    using std::runtime_error::runtime_error;
  };

  std::string slurp(const std::string& path)
  {
    std::ifstream in(path);
    if (!in)
      throw IoError("cannot read " + path);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  }

  void spill(const std::string& path, const std::string& text)
  {
    std::ofstream out(path);
    if (!out || !(out << text))
      throw IoError("cannot write " + path);
  }

  struct FormulaArg
  {
    std::string file, inline_text;

    std::string text() const { return inline_text.empty() ? slurp(file) : inline_text; }

    void add_to(CLI::App* sub)
    {
      auto f = sub->add_option("formula", file, "formula file");
      auto e = sub->add_option("-e,--expr", inline_text, "formula text");
      f->excludes(e);
    }
  };

  int fail(int code, const std::string& msg)
  {
    std::cout << "error\n" << msg << "\n";
    return code;
  }

  int cmd_parse(const FormulaArg& a)
  {
    Formula f = parse(a.text());
    std::cout << "ok\n" << f.str() << "\n";
    return ok;
  }

  int cmd_mc(const std::string& model_file, const FormulaArg& a, const std::string& world, bool cert)
  {
    KripkeModel m = parse_model(slurp(model_file));
    Formula f = parse(a.text());
    if (!m.has_world(world))
      return fail(input, "unknown world " + world);
    for (Sym i : nominals(f))
      if (!m.assign.count(i))
        return fail(input, "nominal '" + sym_name(i) + " is not assigned");
    bool v = model_check(m, world, f);
    std::cout << (v ? "true" : "false") << "\n";
    if (cert)
      {
        EvaluationGame eg = build_evaluation_game(m, f);
        WinningCertificate c = solve_parity(eg.game);
        for (std::size_t p = 0; p < eg.game.size(); ++p)
          {
            std::size_t w = p / eg.closure.size();
            Formula g = eg.closure.members[p % eg.closure.size()];
            std::cout << "position " << p << " " << m.names[w] << " " << g.str() << " winner "
                      << (c.winner[p] == Player::Ver ? "ver" : "fal");
            if (c.strategy[p] != WinningCertificate::npos)
              std::cout << " move " << c.strategy[p];
            std::cout << "\n";
          }
      }
    return ok;
  }

  int cmd_prove(const FormulaArg& a, const Budget& b, const std::string& out)
  {
    Formula f = parse(a.text());
    ProveOptions opt;
    opt.budget = b;
    SearchOutcome r = prove(f, opt);
    std::string body;
    int code = ok;
    switch (r.status)
      {
      case Status::Proved:
        std::cout << "proved\n";
        body = serialize(r.proof);
        break;
      case Status::Refuted:
        std::cout << "refuted " << r.world << "\n";
        body = print_model(r.model);
        code = negative;
        break;
      case Status::Exhausted:
        std::cout << "exhausted\n" << r.report << "\n";
        return budget;
      }
    if (out.empty())
      std::cout << body;
    else
      spill(out, body);
    return code;
  }

  int cmd_check(const std::string& file)
  {
    Proof p = deserialize(slurp(file));
    Verdict v = check_proof(p);
    if (v.accepted)
      {
        std::cout << "accepted\n";
        return ok;
      }
    std::cout << "rejected " << v.node << "\n" << v.reason << "\n";
    return negative;
  }

  int cmd_unfold(const std::string& file, std::size_t depth)
  {
    Proof p = deserialize(slurp(file));
    std::cout << "unfolding\n" << print_unfolding(p, unfold_proof(p, depth));
    return ok;
  }
}

int main(int argc, char** argv)
{
  CLI::App app{"hybrid mu-calculus toolkit"};
  app.require_subcommand(1);

  FormulaArg pa;
  auto* sp = app.add_subcommand("parse", "parse and print a formula");
  pa.add_to(sp);

  FormulaArg ma;
  std::string model, world;
  bool cert = false;
  auto* sm = app.add_subcommand("mc", "model-check a formula at a world");
  sm->add_option("model", model, "model file")->required();
  ma.add_to(sm);
  sm->add_option("--world,-w", world, "world id")->required();
  sm->add_flag("--certificate", cert, "dump winning regions and strategy");

  FormulaArg ra;
  Budget b;
  std::string out;
  auto* sr = app.add_subcommand("prove", "search for a proof or a countermodel");
  ra.add_to(sr);
  sr->add_option("--budget-depth", b.max_depth, "modal expansions per branch");
  sr->add_option("--budget-steps", b.max_steps, "expansions per worker");
  sr->add_option("--memo-cap", b.memo_cap, "memo entries per worker");
  sr->add_option("--threads", b.threads, "search threads")->check(CLI::PositiveNumber);
  sr->add_option("--out,-o", out, "write the proof or model here");

  std::string proof;
  auto* sc = app.add_subcommand("check", "check a proof file");
  sc->add_option("proof", proof, "proof file")->required();

  std::size_t depth = 0;
  auto* su = app.add_subcommand("unfold", "print the depth-bounded unfolding of a proof");
  su->add_option("proof", proof, "proof file")->required();
  su->add_option("depth", depth, "depth")->required();

  try
    {
      app.parse(argc, argv);
    }
  catch (const CLI::ParseError& e)
    {
      int code = app.exit(e);
      return code == 0 ? ok : input;
    }

  for (auto* s : {sp, sm, sr})
    if (s->parsed() && s->count("formula") + s->count("--expr") == 0)
      return fail(input, "give a formula file or -e TEXT");

  try
    {
      if (sp->parsed())
        return cmd_parse(pa);
      if (sm->parsed())
        return cmd_mc(model, ma, world, cert);
      if (sr->parsed())
        return cmd_prove(ra, b, out);
      if (sc->parsed())
        return cmd_check(proof);
      return cmd_unfold(proof, depth);
    }
  catch (const IoError& e)
    {
      return fail(io, e.what());
    }
  catch (const SyntaxError& e)
    {
      return fail(input, e.what());
    }
  catch (const ModelError& e)
    {
      return fail(input, "model line " + std::to_string(e.line) + ": " + e.what());
    }
  catch (const ProofFormatError& e)
    {
      return fail(input, "proof line " + std::to_string(e.line) + ": " + e.what());
    }
  catch (const std::invalid_argument& e)
    {
      return fail(input, e.what());
    }
  catch (const std::out_of_range& e)
    {
      return fail(input, e.what());
    }
}

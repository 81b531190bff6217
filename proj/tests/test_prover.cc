#include "oracles.hh"

#include <doctest.h>

#include <mutex>

using namespace hmu;

namespace
{
  Formula P(const std::string& s) { return parse(s, {false, true}); }

  const char* PHI = "nu x. [](x \\/ []x)";

  std::string subst(std::string s)
  {
    for (std::size_t k; (k = s.find("PHI")) != std::string::npos;)
      s.replace(k, 3, std::string("(") + PHI + ")");
    return s;
  }

  AnnotatedSequent A(const std::string& s) { return parse_annotated(subst(s)); }

  // follows the single-premise chain from t to its end
  const Tree& last(const Tree& t)
  {
    const Tree* c = &t;
    while (c->kids.size() == 1)
      c = c->kids[0].get();
    return *c;
  }

  bool valid_on_random_models(Formula f, std::mt19937& rng, int models)
  {
    for (int n = 0; n < models; ++n)
      {
        KripkeModel m = oracle::random_model(rng, 5);
        for (Sym i : nominals(f))
          if (!m.assign.count(i))
            m.assign[i] = 0;
        std::uint64_t all = (1ull << m.size()) - 1;
        if (oracle::eval(m, f) != all)
          return false;
      }
    return true;
  }
}

TEST_CASE("saturate decomposes")
{
  auto c = SearchContext::make(P("@'i (p \\/ q)"));
  auto t = saturate(A("|- @'i (p \\/ q) ^"), c);
  const Tree& leaf = last(*t);
  CHECK(!leaf.rule);
  CHECK(leaf.label.plain() == PlainSequent{P("@'i p"), P("@'i q")});
  REQUIRE(t->rule);
  CHECK(t->rule->kind == SafKind::Or);
}

TEST_CASE("saturate thins the worse copy")
{
  auto c = SearchContext::make(P("nu y. <>(y /\\ " + std::string(PHI) + ")"));
  REQUIRE(c.saf.order.contains(intern("x")));
  // give both names a rank order x < y
  c.saf.order.vars = {intern("x"), intern("y")};
  c.saf.order.nu = {true, true};
  auto t = saturate(A("x.0 y.0 |- @'j PHI ^ x.0, @'j []PHI ^ x.0, @'j PHI ^ y.0"), c);
  REQUIRE(t->rule);
  CHECK(t->rule->kind == SafKind::Thin);
  CHECK(t->kids[0]->label == A("x.0 |- @'j PHI ^ x.0, @'j []PHI ^ x.0"));
}

TEST_CASE("saturate resets")
{
  auto c = SearchContext::make(P(PHI));
  auto t = saturate(A("x.0 x.1 |- @'k (PHI \\/ []PHI) ^ x.0 x.1"), c);
  bool reset = false;
  for (const Tree* n = t.get(); n; n = n->kids.empty() ? nullptr : n->kids[0].get())
    if (n->rule && n->rule->kind == SafKind::Reset)
      {
        reset = true;
        CHECK(n->rule->name.str() == "x.0");
        break;
      }
  CHECK(reset);
}

TEST_CASE("expand")
{
  auto c = SearchContext::make(P("@'i ([]p \\/ <>q)"));
  auto one = expand(A("|- @'i []p ^, @'i <>q ^"), c);
  REQUIRE(one.size() == 1);
  CHECK(one[0].narrowed.plain() == PlainSequent{P("@'i []p"), P("@'i <>q"), P("@'_n0 p"), P("@'_n0 q")});

  auto two = expand(A("|- @'i []p ^, @'i []q ^"), c);
  REQUIRE(two.size() == 2);
  CHECK(two[0].principal.f == P("@'i []p"));
  CHECK(two[1].principal.f == P("@'i []q"));

  CHECK(expand(A("|- @'i p ^, @'i <>q ^"), c).empty());
  auto alt = expand(A("|- @'_n0 []p ^"), c);
  REQUIRE(alt.size() == 1);
  CHECK(alt[0].nominal == intern("_n1"));
}

TEST_CASE("prove examples")
{
  auto em = prove(P("@'r (p \\/ ~p)"));
  REQUIRE(em.status == Status::Proved);
  CHECK(em.proof.backedges.empty());

  auto p = prove(P("p"));
  REQUIRE(p.status == Status::Refuted);
  CHECK(p.model.size() == 1);
  CHECK(!model_check(p.model, p.world, P("p")));
  auto v = p.model.val.find(intern("p"));
  CHECK((v == p.model.val.end() || std::none_of(v->second.begin(), v->second.end(), [](bool b) { return b; })));

  auto phi = prove(P(PHI));
  REQUIRE(phi.status == Status::Proved);
  CHECK(!phi.proof.backedges.empty());

  CHECK_THROWS_AS(prove(P("@'_n0 p")), std::invalid_argument);
  CHECK_THROWS_AS(prove(parse("(mu x. <>x) /\\ (mu x. []x)", {false, true})), std::invalid_argument);

  Budget tiny;
  tiny.max_depth = 0;
  CHECK(prove(P(PHI), {tiny, nullptr}).status == Status::Exhausted);
}

TEST_CASE("countermodels")
{
  auto d = prove(P("<>p"));
  REQUIRE(d.status == Status::Refuted);
  CHECK(d.model.size() == 1);
  CHECK(d.model.succ[0].empty());

  auto a = prove(P("@'i p"));
  REQUIRE(a.status == Status::Refuted);
  std::size_t wi = a.model.assign.at(intern("i"));
  auto v = a.model.val.find(intern("p"));
  CHECK((v == a.model.val.end() || !v->second[wi]));

  FailureWitness w;
  w.formulas = {P("@'_r ~p"), P("@'_r <>p")};
  auto ctx = OriginalityContext::make(P("p"), root_nominal());
  auto [m, world] = extract_countermodel(w, ctx);
  CHECK(m.size() == 1);
  CHECK(world == "_r");
  CHECK(m.val.at(intern("p"))[0]);
}

TEST_CASE("outcomes are sound on random formulas")
{
  std::mt19937 rng(29);
  Budget b;
  b.max_depth = 12;
  b.max_steps = 3000;
  int proved = 0, refuted = 0;
  for (int n = 0; n < 200; ++n)
    {
      Formula f = oracle::random_formula(rng, {2, 2, 4});
      std::set<Sym> original = nominals(f);
      original.insert(root_nominal());
      std::size_t cs = closure(f).size();
      std::string broken;
      std::mutex mu;
      ProveOptions opt{b, [&](const AnnotatedSequent& s) {
                         auto why = oracle::invariants(s.plain(), original, cs);
                         std::lock_guard<std::mutex> lock(mu);
                         if (broken.empty() && !why.empty())
                           broken = s.str() + ": " + why;
                       }};
      auto o = prove(f, opt);
      CHECK_MESSAGE(broken.empty(), f.str(), " ", broken);
      auto neg = prove(negate(f), {b, nullptr});
      CHECK(!(o.status == Status::Proved && neg.status == Status::Proved));
      if (o.status == Status::Proved)
        {
          ++proved;
          CHECK(check_proof(o.proof).accepted);
          CHECK_MESSAGE(valid_on_random_models(f, rng, 200), f.str());
        }
      else if (o.status == Status::Refuted)
        {
          ++refuted;
          CHECK(!model_check(o.model, o.world, f));
          CHECK(!eval_denotational(o.model, f)[o.model.world(o.world)]);
        }
    }
  CHECK(proved > 5);
  CHECK(refuted > 50);
}

TEST_CASE("thread count does not change the result")
{
  std::vector<std::string> all = oracle::valid_corpus;
  all.insert(all.end(), oracle::invalid_corpus.begin(), oracle::invalid_corpus.end());
  for (auto& s : all)
    {
      Formula f = P(s);
      Budget b1, b4;
      b4.threads = 4;
      auto a = prove(f, {b1, nullptr});
      auto b = prove(f, {b4, nullptr});
      CHECK(a.status == b.status);
      if (a.status == Status::Proved && b.status == Status::Proved)
        CHECK(serialize(a.proof) == serialize(b.proof));
      CHECK(print_model(a.model) == print_model(b.model));
      CHECK(a.world == b.world);
    }
}

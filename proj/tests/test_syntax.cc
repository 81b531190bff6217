#include "oracles.hh"

#include <doctest.h>

using namespace hmu;

namespace
{
  Formula P(const char* s) { return parse(s); }
  Sym S(const char* s) { return intern(s); }
}

TEST_CASE("parse builds the expected trees")
{
  Formula f = P("nu x. [](x \\/ []x)");
  Formula x = Formula::prop(S("x"));
  CHECK(f == Formula::nu(S("x"), Formula::box(Formula::disj(x, Formula::box(x)))));
  CHECK(P("p") == Formula::prop(S("p")));
  CHECK(P("~'i") == Formula::nom(S("i"), false));
  CHECK(P("'i == 'j") == Formula::at(S("i"), Formula::nom(S("j"))));
  CHECK(P("'i != 'j") == Formula::at(S("i"), Formula::nom(S("j"), false)));
}

TEST_CASE("parse precedence and binder scope")
{
  CHECK(P("p \\/ q /\\ r") == Formula::disj(P("p"), Formula::conj(P("q"), P("r"))));
  CHECK(P("<>p /\\ q") == Formula::conj(P("<>p"), P("q")));
  CHECK(P("mu x. <>x \\/ p") == Formula::mu(S("x"), Formula::disj(P("<>x"), P("p"))));
}

TEST_CASE("parse rejects bad input")
{
  CHECK_THROWS_AS(P("mu x. x"), SyntaxError);
  CHECK_THROWS_AS(P("p \\/"), SyntaxError);
  CHECK_THROWS_AS(P("(p"), SyntaxError);
  CHECK_THROWS_AS(P("mu x. <>x /\\ nu x. []x"), SyntaxError);
  CHECK_THROWS_AS(P("x /\\ mu x. <>x"), SyntaxError);
  CHECK_THROWS_AS(P("mu x. <>(nu x. []x)"), SyntaxError);
  try
    {
      P("p /\\ $");
      FAIL("no error");
    }
  catch (const SyntaxError& e)
    {
      CHECK(e.pos == 5);
    }
}

TEST_CASE("negate")
{
  CHECK(negate(P("mu x. <>x")) == P("nu x. []x"));
  CHECK(negate(P("p")) == P("~p"));
  CHECK(negate(P("@'i (p /\\ <>q)")) == P("@'i (~p \\/ []~q)"));
  CHECK(negate(P("'i")) == P("~'i"));

  std::mt19937 rng(7);
  for (int n = 0; n < 300; ++n)
    {
      Formula f = oracle::random_formula(rng);
      CHECK(negate(negate(f)) == f);
      KripkeModel m = oracle::random_model(rng, 5);
      std::uint64_t all = (1ull << m.size()) - 1;
      CHECK(oracle::eval(m, negate(f)) == (all & ~oracle::eval(m, f)));
    }
}

TEST_CASE("make_well_named")
{
  ParseOptions lax{false, true};
  Formula a = parse("(mu x. <>x) /\\ (mu x. []x)", lax);
  Formula r = make_well_named(a);
  CHECK(!well_named_error(r, true));
  CHECK(r.kind() == Kind::And);
  CHECK(r.left() == P("mu x. <>x"));
  CHECK(r.right().kind() == Kind::Mu);
  CHECK(r.right().sym() != S("x"));
  CHECK(r.right() == Formula::mu(r.right().sym(), Formula::box(Formula::prop(r.right().sym()))));

  CHECK(make_well_named(P("nu x. []x")) == P("nu x. []x"));

  Sym x = S("x");
  Formula b = Formula::mu(x, Formula::dia(Formula::conj(Formula::nu(x, Formula::box(Formula::prop(x))),
                                                        Formula::prop(x))));
  Formula rb = make_well_named(b);
  CHECK(!well_named_error(rb, true));
  CHECK(rb.sym() == S("x"));
  Formula inner = rb.body().body().left();
  CHECK(inner.kind() == Kind::Nu);
  CHECK(inner.sym() != S("x"));
  CHECK(rb.body().body().right() == P("x"));
}

TEST_CASE("unfold")
{
  CHECK(unfold(P("nu x. []x")) == P("[](nu x. []x)"));
  CHECK(unfold(P("mu x. <>x")) == P("<>(mu x. <>x)"));
  Formula phi = P("nu x. [](x \\/ []x)");
  CHECK(unfold(phi) == Formula::box(Formula::disj(phi, Formula::box(phi))));
  CHECK_THROWS(unfold(P("p")));

  std::mt19937 rng(11);
  for (int n = 0; n < 300; ++n)
    {
      Formula f = oracle::random_formula(rng);
      std::vector<Formula> fix;
      std::function<void(Formula)> walk = [&](Formula g) {
        if (g.is_fix())
          fix.push_back(g);
        if (g.kind() == Kind::Or || g.kind() == Kind::And)
          {
            walk(g.left());
            walk(g.right());
          }
        else if (!g.is_literal())
          walk(g.body());
      };
      walk(f);
      for (auto g : fix)
        {
          Formula u = unfold(g);
          auto err = well_named_error(u, false);
          std::string what = g.str() + " -> " + u.str() + ": " + err.value_or("");
          CHECK_MESSAGE(!err, what);
          CHECK_MESSAGE(make_well_named(u) == u, what);
        }
    }
}

TEST_CASE("dependency_order")
{
  VariableOrder o = dependency_order(P("mu x. nu y. <>(x /\\ y)"));
  REQUIRE(o.size() == 2);
  CHECK(o.less(S("x"), S("y")));
  CHECK(!o.is_nu(S("x")));
  CHECK(o.is_nu(S("y")));

  VariableOrder s = dependency_order(P("nu x. []x"));
  CHECK(s.size() == 1);
  CHECK(s.is_nu(S("x")));

  Formula f = P("(nu x. []x) \\/ (nu y. <>y)");
  CHECK(dependency_relation(f).empty());
  CHECK(dependency_order(f).less(S("x"), S("y")));

  std::mt19937 rng(3);
  for (int n = 0; n < 300; ++n)
    {
      Formula g = oracle::random_formula(rng, {3, 2, 5});
      VariableOrder v = dependency_order(g);
      for (auto [a, b] : dependency_relation(g))
        CHECK(v.less(a, b));
      CHECK(v.size() == binders(g).size());
    }
}

TEST_CASE("closure")
{
  Closure c = closure(P("p"));
  CHECK(c.size() == 1);
  CHECK(c.contains(P("p")));

  Closure m = closure(P("mu x. <>x"));
  CHECK(m.size() == 2);
  CHECK(m.contains(P("<>(mu x. <>x)")));

  Closure a = closure(P("@'i p"));
  CHECK(a.size() == 2);
  CHECK(a.contains(P("p")));

  std::mt19937 rng(5);
  for (int n = 0; n < 500; ++n)
    {
      Formula f = oracle::random_formula(rng, {3, 2, 6});
      Closure cf = closure(f);
      CHECK(cf.size() <= oracle::symbols(f));
      for (auto g : cf.members)
        CHECK(cf.index.at(g) < cf.size());
      // closing the closure adds nothing
      for (auto g : cf.members)
        for (auto h : closure(g).members)
          CHECK(cf.contains(h));
    }
}

TEST_CASE("print and parse round-trip")
{
  std::mt19937 rng(13);
  for (int n = 0; n < 500; ++n)
    {
      Formula f = oracle::random_formula(rng, {3, 2, 6});
      CHECK(parse(f.str()) == f);
      CHECK(f.size() == oracle::symbols(f));
    }
}

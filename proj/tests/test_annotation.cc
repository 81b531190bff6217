#include "oracles.hh"

#include <doctest.h>

using namespace hmu;

namespace
{
  NameWord W(const char* s) { return parse_word(s); }

  // x < y < z, x and y greatest fixpoints, z least
  VariableOrder xyz()
  {
    VariableOrder o;
    o.vars = {intern("x"), intern("y"), intern("z")};
    o.nu = {true, true, false};
    return o;
  }

  const char* PHI = "nu x. [](x \\/ []x)";

  std::string subst(std::string s)
  {
    for (std::size_t k; (k = s.find("PHI")) != std::string::npos;)
      s.replace(k, 3, std::string("(") + PHI + ")");
    return s;
  }

  AnnotatedSequent A(const std::string& s) { return parse_annotated(subst(s)); }

  SafContext ctx_for(const char* rho)
  {
    Formula f = parse(rho);
    return {OriginalityContext::make(f, root_nominal()), dependency_order(f)};
  }

  SafTag T(SafKind k, std::size_t p = SafTag::none, std::size_t s = SafTag::none)
  {
    SafTag t;
    t.kind = k;
    t.principal = p;
    t.side = s;
    return t;
  }

  std::size_t index_of(const AnnotatedSequent& s, const std::string& f, const char* ann)
  {
    AnnFormula m{parse(subst(f), {false, true}), W(ann)};
    for (std::size_t k = 0; k < s.members.size(); ++k)
      if (s.members[k] == m)
        return k;
    FAIL("member missing: ", f);
    return SafTag::none;
  }

  // all subsequences of w
  std::vector<NameWord> subseqs(const NameWord& w)
  {
    std::vector<NameWord> out;
    for (std::size_t mask = 0; mask < (1u << w.size()); ++mask)
      {
        NameWord s;
        for (std::size_t k = 0; k < w.size(); ++k)
          if (mask >> k & 1)
            s.push_back(w[k]);
        out.push_back(s);
      }
    return out;
  }
}

TEST_CASE("names and words")
{
  Name n = parse_name("x.3");
  CHECK(n.var == intern("x"));
  CHECK(n.index == 3);
  CHECK(n.str() == "x.3");
  CHECK(print_word(W("x.0 y.1")) == "x.0 y.1");
  CHECK(W("").empty());
  CHECK_THROWS(parse_name("x"));
}

TEST_CASE("restrict")
{
  auto o = xyz();
  CHECK(restrict(W("x.0 y.0"), intern("x"), o) == W("x.0"));
  CHECK(restrict(W(""), intern("x"), o).empty());
  CHECK(restrict(W("x.0 x.1 y.0"), intern("y"), o) == W("x.0 x.1 y.0"));
  NameWord a = W("x.0 z.0 y.0 x.1");
  for (Sym v : o.vars)
    {
      NameWord r = restrict(a, v, o);
      CHECK(restrict(r, v, o) == r);
      for (auto& s : subseqs(a))
        CHECK(subseq(restrict(s, v, o), r));
    }
}

TEST_CASE("subseq")
{
  CHECK(subseq(W("x.0 y.0"), W("x.0 z.0 y.0")));
  CHECK(subseq(W(""), W("x.0")));
  CHECK(!subseq(W("y.0 x.0"), W("x.0 y.0")));
}

TEST_CASE("meet")
{
  CHECK(meet(W("x.0 z.0 y.0"), W("x.0 y.0")) == W("x.0 y.0"));
  CHECK(!meet(W("x.0 y.0"), W("y.0 x.0")));
  CHECK(meet(W("x.0"), W("")) == W(""));

  // greatest lower bound against brute-force enumeration
  NameWord pool = W("x.0 x.1 y.0 y.1 z.0 z.1");
  std::mt19937 rng(4);
  for (int n = 0; n < 400; ++n)
    {
      NameWord a = pool, b = pool;
      std::shuffle(a.begin(), a.end(), rng);
      std::shuffle(b.begin(), b.end(), rng);
      a.resize(std::uniform_int_distribution<std::size_t>(0, 5)(rng));
      b.resize(std::uniform_int_distribution<std::size_t>(0, 5)(rng));
      std::vector<NameWord> common;
      for (auto& s : subseqs(a))
        if (subseq(s, b))
          common.push_back(s);
      std::vector<NameWord> maximal;
      for (auto& s : common)
        {
          bool below = false;
          for (auto& t : common)
            below = below || (t != s && subseq(s, t));
          if (!below)
            maximal.push_back(s);
        }
      auto m = meet(a, b);
      if (maximal.size() == 1)
        {
          REQUIRE(m);
          CHECK(*m == maximal[0]);
          for (auto& s : common)
            CHECK(subseq(s, *m));
        }
      else
        CHECK(!m);
    }
}

TEST_CASE("ann_less")
{
  auto o = xyz();
  CHECK(ann_less(W("x.0"), W(""), W("x.0"), o));
  CHECK(ann_less(W("x.0"), W("x.1"), W("x.0 x.1"), o));
  CHECK(!ann_less(W("x.0 y.0"), W("x.0 y.0"), W("x.0 y.0"), o));
  CHECK(!ann_less(W("x.1"), W("x.0"), W("x.0 x.1"), o));
  // a least fixpoint name never triggers the prefix clause
  CHECK(!ann_less(W("z.0"), W(""), W("z.0"), o));
  CHECK_THROWS(ann_less(W("y.0"), W(""), W("x.0"), o));

  // strict partial order on the subsequences of a control
  NameWord a = W("x.0 y.0 x.1 z.0 y.1");
  auto all = subseqs(a);
  for (auto& b : all)
    {
      CHECK(!ann_less(b, b, a, o));
      for (auto& c : all)
        {
          if (!ann_less(b, c, a, o))
            continue;
          CHECK(!ann_less(c, b, a, o));
          for (auto& d : all)
            if (ann_less(c, d, a, o))
              CHECK(ann_less(b, d, a, o));
        }
    }
}

TEST_CASE("annotated sequents print and parse")
{
  auto s = A("x.0 y.0 |- @'j PHI ^ x.0, @'j []PHI ^ x.0, @'j PHI ^ y.0");
  CHECK(s.control == W("x.0 y.0"));
  CHECK(s.members.size() == 3);
  CHECK(parse_annotated(s.str()) == s);
  auto e = A("|- @'i p ^");
  CHECK(e.control.empty());
  CHECK(e.members[0].ann.empty());
}

TEST_CASE("names_theory")
{
  auto s = A("x.0 |- @'j PHI ^ x.0, @'j []PHI ^ x.0");
  PlainSequent th = names_theory(s, parse_name("x.0"));
  CHECK(th == s.plain());
  CHECK(names_theory(s, parse_name("x.1")).empty());
  auto mixed = A("x.0 y.0 |- @'j p ^ x.0, @'j q ^ y.0");
  CHECK(names_theory(mixed, parse_name("x.0")) == PlainSequent{parse("@'j p")});
}

TEST_CASE("Rec, Reset and Exp instances along a nu x. [](x \\/ []x) proof")
{
  auto ctx = ctx_for(PHI);
  auto concl = A("x.0 |- @'j PHI ^ x.0, @'j []PHI ^ x.0");
  SafTag rec = T(SafKind::Rec, index_of(concl, "@'j PHI", "x.0"));
  rec.name = parse_name("x.1");
  auto prem = A("x.0 x.1 |- @'j PHI ^ x.0, @'j [](PHI \\/ []PHI) ^ x.0 x.1, @'j []PHI ^ x.0");
  CHECK(!check_saf_instance(concl, rec, {prem}, ctx));
  auto weak = A("x.0 x.1 |- @'j [](PHI \\/ []PHI) ^ x.0 x.1, @'j []PHI ^ x.0");
  CHECK(!check_saf_instance(prem, T(SafKind::Weak), {weak}, ctx));

  SafTag stale = rec;
  stale.name = parse_name("x.0");
  CHECK(check_saf_instance(concl, stale, {A("x.0 x.0 |- @'j PHI ^ x.0, @'j [](PHI \\/ []PHI) ^ x.0 x.0, @'j []PHI ^ x.0")}, ctx));

  auto rc = A("x.0 x.1 |- @'k (PHI \\/ []PHI) ^ x.0 x.1");
  SafTag reset = T(SafKind::Reset);
  reset.name = parse_name("x.0");
  auto rp = A("x.0 x.1 |- @'k (PHI \\/ []PHI) ^ x.0");
  CHECK(!check_saf_instance(rc, reset, {rp}, ctx));
  CHECK(!check_saf_instance(rp, T(SafKind::Exp), {A("x.0 |- @'k (PHI \\/ []PHI) ^ x.0")}, ctx));
  CHECK(check_saf_instance(rc, reset, {A("x.0 |- @'k (PHI \\/ []PHI) ^ x.0")}, ctx));
  SafTag reset1 = reset;
  reset1.name = parse_name("x.1");
  CHECK(check_saf_instance(rc, reset1, {rc}, ctx));
}

TEST_CASE("eta and Rec need the annotation below the variable")
{
  const char* rho = "nu x. mu y. [](x \\/ <>y)";
  auto ctx = ctx_for(rho);
  REQUIRE(ctx.order.less(intern("x"), intern("y")));
  Formula X = parse(rho);
  Formula Y = X.body();
  std::string y = "(" + Y.str() + ")", uy = "(" + unfold(Y).str() + ")";
  std::string x = "(" + X.str() + ")", ux = "(" + unfold(X).str() + ")";
  auto c = A("x.0 |- @'i " + y + " ^ x.0");
  CHECK(!check_saf_instance(c, T(SafKind::Eta, 0), {A("x.0 |- @'i " + y + " ^ x.0, @'i " + uy + " ^ x.0")}, ctx));
  CHECK(check_saf_instance(c, T(SafKind::Eta, 0), {A("x.0 |- @'i " + y + " ^ x.0, @'i " + uy + " ^")}, ctx));

  auto r = A("y.0 |- @'i " + x + " ^ y.0");
  SafTag rec = T(SafKind::Rec, 0);
  rec.name = parse_name("x.0");
  CHECK(check_saf_instance(r, rec, {A("y.0 x.0 |- @'i " + x + " ^ y.0, @'i " + ux + " ^ y.0 x.0")}, ctx));
  auto r2 = A("|- @'i " + x + " ^");
  CHECK(!check_saf_instance(r2, rec, {A("x.0 |- @'i " + x + " ^, @'i " + ux + " ^ x.0")}, ctx));
}

TEST_CASE("Thinning")
{
  VariableOrder o;
  o.vars = {intern("x"), intern("y")};
  o.nu = {true, true};
  auto concl = A("x.0 y.0 |- @'j PHI ^ x.0, @'j []PHI ^ x.0, @'j PHI ^ y.0");
  auto prem = A("x.0 |- @'j PHI ^ x.0, @'j []PHI ^ x.0");
  CHECK(!check_thinning(concl, prem, o));
  // untrimmed control
  CHECK(check_thinning(concl, A("x.0 y.0 |- @'j PHI ^ x.0, @'j []PHI ^ x.0"), o));
  // keeping the larger copy
  CHECK(check_thinning(concl, A("y.0 |- @'j []PHI ^ x.0, @'j PHI ^ y.0"), o));
  // equal annotations never thin
  auto same = A("x.0 |- @'j PHI ^ x.0, @'j []PHI ^ x.0");
  CHECK(check_thinning(same, same, o));
}

TEST_CASE("Exp side conditions")
{
  auto ctx = ctx_for(PHI);
  auto c = A("x.0 x.1 x.2 |- @'j PHI ^ x.0 x.1");
  CHECK(!check_saf_instance(c, T(SafKind::Exp), {A("x.0 x.1 |- @'j PHI ^ x.0 x.1")}, ctx));
  CHECK(!check_saf_instance(c, T(SafKind::Exp), {A("x.0 |- @'j PHI ^ x.0")}, ctx));
  CHECK(!check_saf_instance(c, T(SafKind::Exp), {A("|- @'j PHI ^")}, ctx));
  // premise control must be below the conclusion's
  auto d = A("x.0 x.1 |- @'j PHI ^ x.0 x.1");
  CHECK(check_saf_instance(d, T(SafKind::Exp), {A("x.0 x.1 x.2 |- @'j PHI ^ x.0 x.1")}, ctx));
  // b' meet a = x.0 x.1 is not below x.0
  CHECK(check_saf_instance(d, T(SafKind::Exp), {A("x.0 x.1 |- @'j PHI ^ x.0")}, ctx));
  // premise annotation longer than the conclusion's
  CHECK(check_saf_instance(d, T(SafKind::Exp), {A("x.0 x.1 x.2 |- @'j PHI ^ x.0 x.1 x.2")}, ctx));
}

TEST_CASE("Saf axioms")
{
  CHECK(is_saf_axiom(A("|- @'i p ^, @'i ~p ^")));
  CHECK(!is_saf_axiom(A("x.0 |- @'i p ^, @'i ~p ^")));
  CHECK(!is_saf_axiom(A("x.0 |- @'i p ^ x.0, @'i ~p ^")));
}

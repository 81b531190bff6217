#include "oracles.hh"
#include "run.hh"

#include <doctest.h>

#include <unistd.h>

using run::quote;

namespace
{
  const std::filesystem::path dir = run::scratch("cli");

  std::string file(const std::string& name, const std::string& text)
  {
    auto p = dir / name;
    run::write(p, text);
    return quote(p.string());
  }
}

TEST_CASE("hmc parse")
{
  auto ok = run::hmc("parse " + file("nu.f", "nu x. []x\n"));
  CHECK(ok.code == 0);
  CHECK(ok.out == "ok\nnu x. []x\n");
  auto bad = run::hmc("parse " + file("unguarded.f", "mu x. x\n"));
  CHECK(bad.code == 2);
  CHECK(bad.first_line() == "error");
  CHECK(bad.out.find("unguarded") != std::string::npos);
  CHECK(run::hmc("parse " + quote((dir / "missing.f").string())).code == 3);
  CHECK(run::hmc("parse -e 'p /\\ q'").code == 0);
  CHECK(run::hmc("frobnicate").code == 2);
}

TEST_CASE("hmc mc")
{
  std::string m = file("loop.m", "world w\nedge w w\nprop p w\n");
  auto t = run::hmc("mc " + m + " -e 'nu x.(p /\\ <>x)' -w w");
  CHECK(t.code == 0);
  CHECK(t.first_line() == "true");
  auto f = run::hmc("mc " + m + " -e 'mu x. <>x' -w w");
  CHECK(f.code == 0);
  CHECK(f.first_line() == "false");
  CHECK(run::hmc("mc " + m + " -e p -w nowhere").code == 2);
  CHECK(run::hmc("mc " + m + " -e \"@'i p\" -w w").code == 2);
  auto c = run::hmc("mc " + m + " -e '<>p' -w w --certificate");
  CHECK(c.first_line() == "true");
  CHECK(c.out.find("winner ver") != std::string::npos);
}

TEST_CASE("hmc prove and check")
{
  std::string proof = (dir / "em.proof").string();
  auto em = run::hmc("prove -e 'p \\/ ~p' --out " + quote(proof));
  CHECK(em.code == 0);
  CHECK(em.first_line() == "proved");
  CHECK(run::hmc("check " + quote(proof)).code == 0);

  std::string model = (dir / "p.model").string();
  auto p = run::hmc("prove -e p --out " + quote(model));
  CHECK(p.code == 1);
  REQUIRE(p.first_line().rfind("refuted ", 0) == 0);
  std::string world = p.first_line().substr(8);
  auto mc = run::hmc("mc " + quote(model) + " -e p -w " + quote(world));
  CHECK(mc.first_line() == "false");

  auto tiny = run::hmc("prove -e 'nu x. [](x \\/ []x)' --budget-depth 1");
  CHECK(tiny.code == 4);
  CHECK(tiny.first_line() == "exhausted");
}

TEST_CASE("hmc check rejects mutations")
{
  std::string proof = (dir / "phi.proof").string();
  REQUIRE(run::hmc("prove -e 'nu x. [](x \\/ []x)' --out " + quote(proof)).code == 0);
  CHECK(run::hmc("check " + quote(proof)).out == "accepted\n");
  std::string text = run::read(proof);

  std::string flipped = text;
  auto k = flipped.find(" or 0 ->");
  REQUIRE(k != std::string::npos);
  flipped.replace(k, 3, " and");
  auto r = run::hmc("check " + file("flipped.proof", flipped));
  CHECK(r.code == 1);
  CHECK(r.first_line().rfind("rejected ", 0) == 0);
  CHECK(r.first_line().size() > 9);

  std::string broken = text;
  auto b = broken.find("backedge ");
  REQUIRE(b != std::string::npos);
  broken.replace(b, broken.find('\n', b) - b, "backedge 27");
  CHECK(run::hmc("check " + file("broken.proof", broken)).code == 2);
}

TEST_CASE("hmc unfold")
{
  std::string em = (dir / "em2.proof").string();
  REQUIRE(run::hmc("prove -e 'p \\/ ~p' --out " + quote(em)).code == 0);
  auto zero = run::hmc("unfold " + quote(em) + " 0");
  CHECK(zero.code == 0);
  CHECK(zero.first_line() == "unfolding");
  CHECK(std::count(zero.out.begin(), zero.out.end(), '\n') == 2);
  auto full = run::hmc("unfold " + quote(em) + " 100");
  hmu::Proof p = hmu::deserialize(run::read(em));
  CHECK(std::size_t(std::count(full.out.begin(), full.out.end(), '\n')) == p.nodes.size() + 1);

  std::string nu = (dir / "nu.proof").string();
  REQUIRE(run::hmc("prove -e 'nu x. []x' --out " + quote(nu)).code == 0);
  hmu::Proof q = hmu::deserialize(run::read(nu));
  auto [leaf, target] = *q.backedges.begin();
  std::size_t cycle = q.path(target, leaf).size() - 1;
  std::size_t d0 = q.path(0, target).size() - 1;
  auto u = run::hmc("unfold " + quote(nu) + " " + std::to_string(d0 + 2 * cycle));
  CHECK(u.code == 0);
  std::string label = q.nodes[target].label.str();
  std::size_t hits = 0;
  for (std::size_t at = 0; (at = u.out.find(" " + label + "\n", at)) != std::string::npos; ++at)
    ++hits;
  CHECK(hits >= 3);
  CHECK(run::hmc("unfold " + file("junk.proof", "nonsense\n") + " 2").code == 2);
}

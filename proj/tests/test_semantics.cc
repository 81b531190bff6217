#include "oracles.hh"

#include <doctest.h>

using namespace hmu;

namespace
{
  Formula P(const char* s) { return parse(s); }

  KripkeModel loop_model()
  {
    return parse_model("world w\nedge w w\nprop p w\nnom i w\n");
  }

  ParityGame random_game(std::mt19937& rng)
  {
    std::uniform_int_distribution<std::size_t> size(1, 30);
    std::uniform_int_distribution<unsigned> prio(0, 5);
    std::bernoulli_distribution coin(0.5);
    ParityGame g;
    std::size_t n = size(rng);
    std::uniform_int_distribution<std::size_t> pos(0, n - 1);
    for (std::size_t k = 0; k < n; ++k)
      {
        g.owner.push_back(coin(rng) ? Player::Ver : Player::Fal);
        g.priority.push_back(prio(rng));
        std::vector<std::size_t> mv;
        std::size_t deg = std::uniform_int_distribution<std::size_t>(0, 3)(rng);
        for (std::size_t d = 0; d < deg; ++d)
          mv.push_back(pos(rng));
        std::sort(mv.begin(), mv.end());
        mv.erase(std::unique(mv.begin(), mv.end()), mv.end());
        g.moves.push_back(mv);
      }
    return g;
  }
}

TEST_CASE("model files")
{
  KripkeModel m = parse_model("# two worlds\nworld a\nworld b\nedge a b\nprop p b\nnom i a\n");
  CHECK(m.size() == 2);
  CHECK(m.succ[m.world("a")] == std::vector<std::size_t>{m.world("b")});
  CHECK(parse_model(print_model(m)).succ == m.succ);
  CHECK_THROWS_AS(parse_model("world a\nedge a c\n"), ModelError);
  CHECK_THROWS_AS(parse_model("world a\nworld a\n"), ModelError);
  CHECK_THROWS_AS(parse_model("world a\nfrob a\n"), ModelError);
  try
    {
      parse_model("world a\n\nprop p z\n");
      FAIL("no error");
    }
  catch (const ModelError& e)
    {
      CHECK(e.line == 3);
    }
}

TEST_CASE("eval_denotational")
{
  std::mt19937 rng(1);
  for (int n = 0; n < 50; ++n)
    {
      KripkeModel m = oracle::random_model(rng, 6);
      WorldSet none(m.size(), false), all(m.size(), true);
      CHECK(eval_denotational(m, P("mu x. <>x")) == none);
      CHECK(eval_denotational(m, P("nu x. []x")) == all);
      bool pi = m.val[intern("p")][m.assign[intern("i")]];
      CHECK(eval_denotational(m, P("@'i p")) == (pi ? all : none));
    }
  KripkeModel bare = parse_model("world a\n");
  CHECK_THROWS_AS(eval_denotational(bare, P("'i")), std::invalid_argument);
}

TEST_CASE("evaluation game shape")
{
  KripkeModel m = parse_model("world a\nworld b\nedge a b\nnom i b\n");
  Formula f = P("@'i (nu x. []x) /\\ mu y. <>y");
  EvaluationGame g = build_evaluation_game(m, f);
  CHECK(g.game.size() == m.size() * closure(f).size());
  Formula nx = P("nu x. []x");
  std::size_t fx = g.position(0, nx);
  CHECK(g.game.moves[fx] == std::vector<std::size_t>{g.position(0, unfold(nx))});
  CHECK(g.game.owner[fx] == Player::Ver);
  CHECK(g.game.priority[fx] % 2 == 0);
  CHECK(g.game.priority[g.position(0, P("mu y. <>y"))] % 2 == 1);
  std::size_t at = g.position(0, P("@'i (nu x. []x)"));
  CHECK(g.game.moves[at] == std::vector<std::size_t>{g.position(1, nx)});
  CHECK(g.game.priority[at] == 0);
}

TEST_CASE("priorities follow the variable order")
{
  Formula f = P("nu x. mu y. <>(x /\\ <>y)");
  VariableOrder o = dependency_order(f);
  unsigned px = fixpoint_priority(o, intern("x")), py = fixpoint_priority(o, intern("y"));
  CHECK(px % 2 == 0);
  CHECK(py % 2 == 1);
  CHECK(px > py);
}

TEST_CASE("solve_parity small games")
{
  ParityGame stuck{{Player::Ver}, {0}, {{}}};
  CHECK(solve_parity(stuck).winner[0] == Player::Fal);

  ParityGame loop{{Player::Fal}, {2}, {{0}}};
  CHECK(solve_parity(loop).winner[0] == Player::Ver);

  ParityGame cyc{{Player::Ver, Player::Ver}, {2, 3}, {{1}, {0}}};
  auto c = solve_parity(cyc);
  CHECK(c.winner[0] == Player::Fal);
  CHECK(c.winner[1] == Player::Fal);
}

TEST_CASE("certificates")
{
  std::mt19937 rng(2);
  int redirected = 0;
  for (int n = 0; n < 1000; ++n)
    {
      ParityGame g = random_game(rng);
      WinningCertificate c = solve_parity(g);
      REQUIRE(verify_certificate(g, c));

      WinningCertificate sw = c;
      for (auto& w : sw.winner)
        w = w == Player::Ver ? Player::Fal : Player::Ver;
      CHECK(!verify_certificate(g, sw));

      for (std::size_t p = 0; p < g.size(); ++p)
        {
          if (c.strategy[p] == WinningCertificate::npos)
            continue;
          auto out = std::find_if(g.moves[p].begin(), g.moves[p].end(),
                                  [&](std::size_t q) { return c.winner[q] != c.winner[p]; });
          if (out == g.moves[p].end())
            continue;
          WinningCertificate bad = c;
          bad.strategy[p] = *out;
          CHECK(!verify_certificate(g, bad));
          ++redirected;
          break;
        }
    }
  CHECK(redirected > 50);
}

TEST_CASE("model_check examples")
{
  KripkeModel m = loop_model();
  CHECK(model_check(m, "w", P("nu x.(p /\\ <>x)")));
  KripkeModel dead = parse_model("world d\n");
  CHECK(model_check(dead, "d", P("[]p")));
  CHECK(!model_check(m, "w", P("mu x. <>x")));
  CHECK_THROWS(model_check(m, "nowhere", P("p")));
}

TEST_CASE("model_check agrees with the bitmask oracle")
{
  std::mt19937 rng(9);
  for (int n = 0; n < 400; ++n)
    {
      KripkeModel m = oracle::random_model(rng, 6);
      Formula f = oracle::random_formula(rng);
      std::uint64_t o = oracle::eval(m, f);
      WorldSet d = eval_denotational(m, f);
      for (std::size_t w = 0; w < m.size(); ++w)
        {
          bool mc = model_check(m, w, f);
          CHECK(mc == bool((o >> w) & 1));
          CHECK(d[w] == bool((o >> w) & 1));
          CHECK(mc != model_check(m, w, negate(f)));
        }
      EvaluationGame g = build_evaluation_game(m, f);
      CHECK(verify_certificate(g.game, solve_parity(g.game)));
    }
}

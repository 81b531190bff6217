#include "hmu/prover.hh"
#include "hmu/semantics.hh"
#include "hmu/syntax.hh"

#include <benchmark/benchmark.h>

#include <string>

using namespace hmu;

namespace
{
  // a directed cycle of n worlds, p on the even ones
  KripkeModel ring(std::size_t n)
  {
    KripkeModel m;
    for (std::size_t w = 0; w < n; ++w)
      m.add_world("w" + std::to_string(w));
    for (std::size_t w = 0; w < n; ++w)
      m.add_edge(w, (w + 1) % n);
    WorldSet p(n, false);
    for (std::size_t w = 0; w < n; w += 2)
      p[w] = true;
    m.val[intern("p")] = p;
    m.assign[intern("i")] = 0;
    return m;
  }

  const char* kNested = "nu x. mu y. [](p /\\ x \\/ y) /\\ <>'i \\/ ~'i";
}

static void BM_ModelCheck(benchmark::State& st)
{
  KripkeModel m = ring(static_cast<std::size_t>(st.range(0)));
  Formula f = parse(kNested);
  for (auto _ : st)
    benchmark::DoNotOptimize(model_check(m, 0, f));
}
BENCHMARK(BM_ModelCheck)->Range(8, 512);

static void BM_Denotational(benchmark::State& st)
{
  KripkeModel m = ring(static_cast<std::size_t>(st.range(0)));
  Formula f = parse(kNested);
  for (auto _ : st)
    benchmark::DoNotOptimize(eval_denotational(m, f));
}
BENCHMARK(BM_Denotational)->Range(8, 512);

static void BM_SolveParity(benchmark::State& st)
{
  KripkeModel m = ring(static_cast<std::size_t>(st.range(0)));
  EvaluationGame g = build_evaluation_game(m, parse(kNested));
  for (auto _ : st)
    benchmark::DoNotOptimize(solve_parity(g.game));
}
BENCHMARK(BM_SolveParity)->Range(8, 512);

static void BM_Prove(benchmark::State& st, const char* text)
{
  Formula f = parse(text);
  for (auto _ : st)
    benchmark::DoNotOptimize(prove(f, {}));
}
BENCHMARK_CAPTURE(BM_Prove, box_loop, "nu x. [](x \\/ []x)");
BENCHMARK_CAPTURE(BM_Prove, excluded_middle, "(mu x.(p \\/ []x)) \\/ (nu y.(~p /\\ <>y))");
BENCHMARK_CAPTURE(BM_Prove, refute_mu, "mu x. <>x");

BENCHMARK_MAIN();

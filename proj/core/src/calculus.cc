#include "hmu/calculus.hh"

#include <algorithm>
#include <map>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace hmu
{
  const char* rule_name(RuleKind k)
  {
    switch (k)
      {
      case RuleKind::And: return "and";
      case RuleKind::Or: return "or";
      case RuleKind::Glob: return "glob";
      case RuleKind::Eta: return "eta";
      case RuleKind::Eq: return "eq";
      case RuleKind::Com: return "com";
      case RuleKind::Mod: return "mod";
      case RuleKind::Weak: return "weak";
      }
    return "?";
  }

  Sym root_nominal()
  {
    static const Sym r = intern("_r");
    return r;
  }

  Sym fresh_nominal(unsigned k)
  {
    return intern("_n" + std::to_string(k));
  }

  OriginalityContext OriginalityContext::make(Formula rho, Sym r)
  {
    OriginalityContext c;
    c.root = Formula::at(r, rho);
    c.original = nominals(c.root);
    return c;
  }

  bool OriginalityContext::is_ground(Formula f) const
  {
    return f.kind() == Kind::At && is_original(f.sym());
  }

  std::optional<std::pair<Sym, Sym>> as_neq(Formula f)
  {
    if (f.kind() == Kind::At && f.body().kind() == Kind::Nom && !f.body().positive())
      return std::make_pair(f.sym(), f.body().sym());
    return std::nullopt;
  }

  std::set<Sym> sequent_nominals(const PlainSequent& s)
  {
    std::set<Sym> out;
    for (auto f : s)
      {
        auto n = nominals(f);
        out.insert(n.begin(), n.end());
      }
    return out;
  }

  std::string print_sequent(const PlainSequent& s)
  {
    std::string out;
    for (auto f : s)
      {
        if (!out.empty())
          out += ", ";
        out += f.str();
      }
    return out;
  }

  namespace
  {
    bool is_at(Formula f) { return !f.null() && f.kind() == Kind::At; }

    PlainSequent plus(PlainSequent s, std::initializer_list<Formula> fs)
    {
      for (auto f : fs)
        s.insert(f);
      return s;
    }

    std::string show(Formula f) { return f.null() ? "<none>" : f.str(); }
  }

  bool is_axiom(const PlainSequent& s)
  {
    if (s.size() == 1)
      {
        Formula f = *s.begin();
        return is_at(f) && f.body().kind() == Kind::Nom && f.body().positive()
               && f.body().sym() == f.sym();
      }
    if (s.size() != 2)
      return false;
    Formula a = *s.begin(), b = *std::next(s.begin());
    if (!is_at(a) || !is_at(b) || a.sym() != b.sym())
      return false;
    Formula x = a.body(), y = b.body();
    return x.is_literal() && y.is_literal() && x.kind() == y.kind() && x.sym() == y.sym()
           && x.positive() != y.positive();
  }

  std::optional<PlainSequent> find_axiom(const PlainSequent& s)
  {
    for (auto f : s)
      {
        if (!is_at(f) || !f.body().is_literal())
          continue;
        Formula b = f.body();
        if (b.kind() == Kind::Nom && b.positive() && b.sym() == f.sym())
          return PlainSequent{f};
        Formula dual = Formula::at(f.sym(), b.kind() == Kind::Prop
                                                ? Formula::prop(b.sym(), !b.positive())
                                                : Formula::nom(b.sym(), !b.positive()));
        if (s.count(dual))
          return PlainSequent{f, dual};
      }
    return std::nullopt;
  }

  std::vector<PlainSequent> apply_rule(const PlainSequent& s, const RuleTag& t)
  {
    Formula p = t.principal;
    if (t.kind == RuleKind::Weak)
      throw std::invalid_argument("weakening premise is not determined by the tag");
    if (p.null() || !s.count(p) || !is_at(p))
      throw std::invalid_argument("principal " + show(p) + " not in conclusion");
    Sym i = p.sym();
    Formula b = p.body();
    switch (t.kind)
      {
      case RuleKind::And:
        if (b.kind() != Kind::And)
          break;
        return {plus(s, {Formula::at(i, b.left())}), plus(s, {Formula::at(i, b.right())})};
      case RuleKind::Or:
        if (b.kind() != Kind::Or)
          break;
        return {plus(s, {Formula::at(i, b.left()), Formula::at(i, b.right())})};
      case RuleKind::Glob:
        if (b.kind() != Kind::At)
          break;
        return {plus(s, {b})};
      case RuleKind::Eta:
        if (!b.is_fix())
          break;
        return {plus(s, {Formula::at(i, unfold(b))})};
      case RuleKind::Eq:
        {
          auto side = t.side.null() ? std::nullopt : as_neq(t.side);
          if (!side || !s.count(t.side))
            throw std::invalid_argument("Eq side formula " + show(t.side)
                                        + " is not an inequality in the conclusion");
          if (side->first != i)
            throw std::invalid_argument("Eq side formula does not share the principal's nominal");
          return {plus(s, {Formula::at(side->second, b)})};
        }
      case RuleKind::Com:
        {
          auto ne = as_neq(p);
          if (!ne)
            break;
          return {plus(s, {neq(ne->second, ne->first)})};
        }
      case RuleKind::Mod:
        {
          if (b.kind() != Kind::Box)
            break;
          if (sequent_nominals(s).count(t.nominal))
            throw std::invalid_argument("Mod nominal '" + sym_name(t.nominal) + "' is not fresh");
          PlainSequent out = plus(s, {Formula::at(t.nominal, b.body())});
          for (auto f : s)
            if (f.sym() == i && f.body().kind() == Kind::Dia)
              out.insert(Formula::at(t.nominal, f.body().body()));
          return {out};
        }
      case RuleKind::Weak:
        break;
      }
    throw std::invalid_argument(std::string(rule_name(t.kind)) + " does not apply to "
                                + p.str());
  }

  std::optional<std::string> check_inf_instance(const PlainSequent& concl, const RuleTag& t,
                                                const std::vector<PlainSequent>& premises,
                                                const OriginalityContext& ctx)
  {
    (void)ctx;
    for (auto f : concl)
      if (!is_at(f))
        return "conclusion member " + f.str() + " has no satisfaction operator";
    if (t.kind == RuleKind::Weak)
      {
        if (premises.size() != 1)
          return "Weak needs one premise";
        for (auto f : premises[0])
          if (!concl.count(f))
            return "Weak premise member " + f.str() + " not in conclusion";
        return std::nullopt;
      }
    std::size_t want = t.kind == RuleKind::And ? 2 : 1;
    if (premises.size() != want)
      return std::string(rule_name(t.kind)) + " needs " + std::to_string(want) + " premise(s), got "
             + std::to_string(premises.size());
    if (t.kind == RuleKind::Mod)
      {
        // the diamonds copied may be any subset
        Formula p = t.principal;
        if (p.null() || !concl.count(p) || p.body().kind() != Kind::Box)
          return "Mod principal " + show(p) + " is not a box in the conclusion";
        if (sequent_nominals(concl).count(t.nominal))
          return "Mod nominal '" + sym_name(t.nominal) + "' is not fresh";
        const PlainSequent& prem = premises[0];
        for (auto f : concl)
          if (!prem.count(f))
            return "Mod premise drops " + f.str();
        Formula target = Formula::at(t.nominal, p.body().body());
        if (!prem.count(target))
          return "Mod premise lacks " + target.str();
        for (auto f : prem)
          {
            if (concl.count(f) || f == target)
              continue;
            if (!is_at(f) || f.sym() != t.nominal
                || !concl.count(Formula::at(p.sym(), Formula::dia(f.body()))))
              return "Mod premise member " + f.str() + " is not justified";
          }
        return std::nullopt;
      }
    std::vector<PlainSequent> want_p;
    try
      {
        want_p = apply_rule(concl, t);
      }
    catch (const std::invalid_argument& e)
      {
        return std::string(e.what());
      }
    for (std::size_t k = 0; k < want; ++k)
      if (premises[k] != want_p[k])
        return std::string(rule_name(t.kind)) + " premise " + std::to_string(k)
               + " differs from the prescribed one";
    return std::nullopt;
  }

  bool is_repeating(const PlainSequent& concl, const std::vector<PlainSequent>& premises)
  {
    return std::all_of(premises.begin(), premises.end(),
                       [&](const PlainSequent& p) { return p == concl; });
  }

  TraceEdge trace_step(const PlainSequent& concl, const RuleTag& t,
                       std::size_t premise, Formula from, Formula to)
  {
    TraceEdge e;
    if (from == to)
      {
        e.ok = true;
        return e;
      }
    if (t.kind == RuleKind::Weak || from != t.principal || !is_at(from) || !is_at(to))
      {
        // the Mod diamond case has principal != from
        if (t.kind == RuleKind::Mod && is_at(from) && is_at(to) && !t.principal.null()
            && from.sym() == t.principal.sym() && from.body().kind() == Kind::Dia
            && to.sym() == t.nominal && to.body() == from.body().body())
          e.ok = true;
        return e;
      }
    Sym i = from.sym();
    Formula b = from.body();
    switch (t.kind)
      {
      case RuleKind::Or:
        e.ok = b.kind() == Kind::Or && to.sym() == i
               && (to.body() == b.left() || to.body() == b.right());
        break;
      case RuleKind::And:
        e.ok = b.kind() == Kind::And && to.sym() == i
               && to.body() == (premise == 0 ? b.left() : b.right());
        break;
      case RuleKind::Glob:
        e.ok = b.kind() == Kind::At && to == b;
        break;
      case RuleKind::Eq:
        {
          auto side = t.side.null() ? std::nullopt : as_neq(t.side);
          e.ok = side && side->first == i && to == Formula::at(side->second, b);
          break;
        }
      case RuleKind::Eta:
        if (b.is_fix() && to == Formula::at(i, unfold(b)))
          {
            e.ok = true;
            e.unfolded = b.sym();
          }
        break;
      case RuleKind::Mod:
        e.ok = b.kind() == Kind::Box && to == Formula::at(t.nominal, b.body());
        break;
      case RuleKind::Com:
      case RuleKind::Weak:
        break;
      }
    (void)concl;
    return e;
  }

  std::optional<Step> deterministic_step(const PlainSequent& s, const OriginalityContext&)
  {
    for (auto f : s)
      {
        if (!is_at(f))
          continue;
        RuleKind k;
        switch (f.body().kind())
          {
          case Kind::And: k = RuleKind::And; break;
          case Kind::Or: k = RuleKind::Or; break;
          case Kind::At: k = RuleKind::Glob; break;
          case Kind::Mu:
          case Kind::Nu: k = RuleKind::Eta; break;
          default: continue;
          }
        RuleTag t{k, f, {}, 0};
        auto prem = apply_rule(s, t);
        if (!is_repeating(s, prem))
          return Step{t, std::move(prem)};
      }
    return std::nullopt;
  }

  std::optional<Step> ground_step(const PlainSequent& s, const OriginalityContext& ctx)
  {
    // candidates keyed by (principal, tag order, premise print)
    std::optional<std::tuple<std::string, int, std::string>> best_key;
    std::optional<Step> best;
    auto offer = [&](const RuleTag& t, PlainSequent prem) {
      std::tuple<std::string, int, std::string> key{t.principal.str(), static_cast<int>(t.kind),
                                                    print_sequent(prem)};
      if (!best_key || key < *best_key)
        {
          best_key = key;
          best = Step{t, {std::move(prem)}};
        }
    };
    for (auto f : s)
      {
        if (!is_at(f))
          continue;
        if (auto ne = as_neq(f); ne && ctx.is_original(ne->first) && ctx.is_original(ne->second))
          {
            Formula back = neq(ne->second, ne->first);
            if (!s.count(back))
              offer({RuleKind::Com, f, {}, 0}, plus(s, {back}));
          }
        // Eq towards the smallest original nominal for which it is not repeating
        std::optional<std::pair<std::string, Formula>> side;
        for (auto g : s)
          {
            auto ne = as_neq(g);
            if (!ne || g == f || ne->first != f.sym() || !ctx.is_original(ne->second))
              continue;
            if (s.count(Formula::at(ne->second, f.body())))
              continue;
            std::string key = Formula::nom(ne->second).str();
            if (!side || key < side->first)
              side = std::make_pair(key, g);
          }
        if (side)
          {
            RuleTag t{RuleKind::Eq, f, side->second, 0};
            offer(t, apply_rule(s, t)[0]);
          }
      }
    return best;
  }

  PlainSequent narrow_modal(const PlainSequent& s, Formula principal, Sym j,
                            const OriginalityContext& ctx)
  {
    if (!is_at(principal) || principal.body().kind() != Kind::Box)
      throw std::invalid_argument("narrow modal principal " + show(principal) + " is not a box");
    PlainSequent prem = apply_rule(s, {RuleKind::Mod, principal, {}, j})[0];
    PlainSequent out;
    for (auto f : prem)
      if (f.sym() == j || ctx.is_original(f.sym()))
        out.insert(f);
    return out;
  }

  std::optional<std::string> check_invariants(const PlainSequent& s, const OriginalityContext& ctx,
                                              std::size_t closure_size)
  {
    std::set<Sym> non_original;
    std::map<Sym, std::size_t> count;
    for (auto f : s)
      {
        if (!is_at(f))
          return "member " + f.str() + " has no satisfaction operator";
        for (auto n : nominals(f.body()))
          if (!ctx.is_original(n))
            return "body of " + f.str() + " contains non-original nominal " + sym_name(n);
        if (auto ne = as_neq(f); ne && !ctx.is_original(ne->second))
          return "inequality " + f.str() + " points at a non-original nominal";
        if (!ctx.is_original(f.sym()))
          non_original.insert(f.sym());
        ++count[f.sym()];
      }
    if (non_original.size() > 1)
      return std::to_string(non_original.size()) + " non-original nominals";
    std::size_t bound = closure_size + ctx.original.size();
    for (auto& [i, n] : count)
      if (n > bound)
        return "nominal " + sym_name(i) + " prefixes " + std::to_string(n)
               + " formulas, bound " + std::to_string(bound);
    return std::nullopt;
  }
}

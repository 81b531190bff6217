#include "hmu/annotation.hh"

#include <algorithm>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace hmu
{
  std::string Name::str() const
  {
    return sym_name(var) + "." + std::to_string(index);
  }

  bool name_less(const Name& a, const Name& b)
  {
    if (a.var != b.var)
      return sym_name(a.var) < sym_name(b.var);
    return a.index < b.index;
  }

  std::string print_word(const NameWord& w)
  {
    std::string out;
    for (auto& n : w)
      {
        if (!out.empty())
          out += ' ';
        out += n.str();
      }
    return out;
  }

  Name parse_name(std::string_view text)
  {
    auto dot = text.rfind('.');
    if (dot == std::string_view::npos || dot == 0 || dot + 1 == text.size())
      throw std::invalid_argument("bad name '" + std::string(text) + "'");
    Name n;
    n.var = intern(text.substr(0, dot));
    std::string idx(text.substr(dot + 1));
    if (!std::all_of(idx.begin(), idx.end(), [](char c) { return c >= '0' && c <= '9'; }))
      throw std::invalid_argument("bad name index '" + idx + "'");
    n.index = static_cast<unsigned>(std::stoul(idx));
    return n;
  }

  NameWord parse_word(std::string_view text)
  {
    NameWord w;
    std::istringstream in{std::string(text)};
    for (std::string tok; in >> tok;)
      w.push_back(parse_name(tok));
    return w;
  }

  namespace
  {
    bool word_less(const NameWord& a, const NameWord& b)
    {
      return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(), name_less);
    }

    std::string trim(std::string_view s)
    {
      auto b = s.find_first_not_of(" \t\r\n");
      if (b == std::string_view::npos)
        return {};
      auto e = s.find_last_not_of(" \t\r\n");
      return std::string(s.substr(b, e - b + 1));
    }

    std::size_t position(const NameWord& a, const Name& x)
    {
      return static_cast<std::size_t>(std::find(a.begin(), a.end(), x) - a.begin());
    }

    bool non_repeating(const NameWord& a)
    {
      for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = i + 1; j < a.size(); ++j)
          if (a[i] == a[j])
            return false;
      return true;
    }
  }

  bool ann_formula_less(const AnnFormula& a, const AnnFormula& b)
  {
    if (a.f != b.f)
      return Prec()(a.f, b.f);
    return word_less(a.ann, b.ann);
  }

  AnnotatedSequent::AnnotatedSequent(NameWord c, std::vector<AnnFormula> m)
    : control(std::move(c)), members(std::move(m))
  {
    normalize();
  }

  void AnnotatedSequent::normalize()
  {
    std::sort(members.begin(), members.end(), ann_formula_less);
    members.erase(std::unique(members.begin(), members.end()), members.end());
  }

  PlainSequent AnnotatedSequent::plain() const
  {
    PlainSequent s;
    for (auto& m : members)
      s.insert(m.f);
    return s;
  }

  bool AnnotatedSequent::contains(const AnnFormula& m) const
  {
    return std::binary_search(members.begin(), members.end(), m, ann_formula_less);
  }

  std::string AnnotatedSequent::str() const
  {
    std::string out = print_word(control);
    out += out.empty() ? "|-" : " |-";
    bool first = true;
    for (auto& m : members)
      {
        out += first ? " " : ", ";
        first = false;
        out += m.f.str();
        out += " ^";
        if (!m.ann.empty())
          out += " " + print_word(m.ann);
      }
    return out;
  }

  AnnotatedSequent parse_annotated(std::string_view text)
  {
    auto turn = text.find("|-");
    if (turn == std::string_view::npos)
      throw std::invalid_argument("missing '|-'");
    AnnotatedSequent s;
    s.control = parse_word(text.substr(0, turn));
    std::string rest = trim(text.substr(turn + 2));
    if (!rest.empty())
      {
        std::size_t start = 0;
        for (;;)
          {
            auto comma = rest.find(',', start);
            std::string item = trim(std::string_view(rest).substr(
                start, comma == std::string::npos ? std::string::npos : comma - start));
            auto caret = item.rfind('^');
            if (caret == std::string::npos)
              throw std::invalid_argument("member '" + item + "' lacks '^'");
            Formula f = parse(std::string_view(item).substr(0, caret),
                              ParseOptions{false, true});
            if (f.kind() != Kind::At)
              throw std::invalid_argument("member '" + item + "' is not an @-formula");
            s.members.push_back({f, parse_word(std::string_view(item).substr(caret + 1))});
            if (comma == std::string::npos)
              break;
            start = comma + 1;
          }
      }
    std::size_t n = s.members.size();
    s.normalize();
    if (s.members.size() != n)
      throw std::invalid_argument("duplicate member");
    return s;
  }

  const char* saf_name(SafKind k)
  {
    switch (k)
      {
      case SafKind::And: return "and";
      case SafKind::Or: return "or";
      case SafKind::Eq: return "eq";
      case SafKind::Com: return "com";
      case SafKind::Glob: return "glob";
      case SafKind::Mod: return "mod";
      case SafKind::Eta: return "eta";
      case SafKind::Rec: return "rec";
      case SafKind::Reset: return "reset";
      case SafKind::Exp: return "exp";
      case SafKind::Weak: return "weak";
      case SafKind::Thin: return "thin";
      }
    return "?";
  }

  RuleTag plain_tag(const AnnotatedSequent& concl, const SafTag& t)
  {
    auto member = [&](std::size_t i) {
      return i < concl.members.size() ? concl.members[i].f : Formula();
    };
    RuleTag r;
    r.principal = member(t.principal);
    switch (t.kind)
      {
      case SafKind::And: r.kind = RuleKind::And; break;
      case SafKind::Or: r.kind = RuleKind::Or; break;
      case SafKind::Glob: r.kind = RuleKind::Glob; break;
      case SafKind::Com: r.kind = RuleKind::Com; break;
      case SafKind::Eta:
      case SafKind::Rec: r.kind = RuleKind::Eta; break;
      case SafKind::Eq:
        r.kind = RuleKind::Eq;
        r.side = member(t.side);
        break;
      case SafKind::Mod:
        r.kind = RuleKind::Mod;
        r.nominal = t.nominal;
        break;
      default:
        r.kind = RuleKind::Weak;
        r.principal = Formula();
      }
    return r;
  }

  // ---------------------------------------------------------------- words

  NameWord restrict(const NameWord& a, Sym x, const VariableOrder& o)
  {
    std::size_t k = o.index(x);
    NameWord out;
    for (auto& n : a)
      if (o.index(n.var) <= k)
        out.push_back(n);
    return out;
  }

  bool leq_var(const NameWord& a, Sym x, const VariableOrder& o)
  {
    std::size_t k = o.index(x);
    return std::all_of(a.begin(), a.end(), [&](const Name& n) { return o.index(n.var) <= k; });
  }

  bool subseq(const NameWord& a, const NameWord& b)
  {
    std::size_t i = 0;
    for (std::size_t j = 0; i < a.size() && j < b.size(); ++j)
      if (a[i] == b[j])
        ++i;
    return i == a.size();
  }

  std::optional<NameWord> meet(const NameWord& a, const NameWord& b)
  {
    if (non_repeating(a) && non_repeating(b))
      {
        // every common letter is a common subsequence, so a greatest one
        // must contain them all in the same order in both words
        NameWord ca, cb;
        for (auto& n : a)
          if (std::find(b.begin(), b.end(), n) != b.end())
            ca.push_back(n);
        for (auto& n : b)
          if (std::find(a.begin(), a.end(), n) != a.end())
            cb.push_back(n);
        if (ca != cb)
          return std::nullopt;
        return ca;
      }
    const NameWord& s = a.size() <= b.size() ? a : b;
    const NameWord& t = a.size() <= b.size() ? b : a;
    if (s.size() > 20)
      throw std::length_error("meet on long repeating words");
    std::vector<NameWord> common;
    for (std::size_t mask = 0; mask < (std::size_t{1} << s.size()); ++mask)
      {
        NameWord c;
        for (std::size_t i = 0; i < s.size(); ++i)
          if (mask >> i & 1)
            c.push_back(s[i]);
        if (subseq(c, t))
          common.push_back(std::move(c));
      }
    const NameWord* top = &common.front();
    for (auto& c : common)
      if (c.size() > top->size())
        top = &c;
    for (auto& c : common)
      if (!subseq(c, *top))
        return std::nullopt;
    return *top;
  }

  bool ann_less(const NameWord& b, const NameWord& c, const NameWord& a, const VariableOrder& o)
  {
    if (!subseq(b, a) || !subseq(c, a))
      throw std::invalid_argument("ann_less: annotation not below control");
    for (std::size_t k = 0; k < o.size(); ++k)
      {
        if (!o.nu[k])
          continue;
        NameWord rb = restrict(b, o.vars[k], o), rc = restrict(c, o.vars[k], o);
        if (rc.size() < rb.size() && std::equal(rc.begin(), rc.end(), rb.begin()))
          return true;
      }
    std::size_t d = 0;
    while (d < b.size() && d < c.size() && b[d] == c[d])
      ++d;
    if (d < b.size() && d < c.size() && b[d].var == c[d].var)
      return position(a, b[d]) < position(a, c[d]);
    return false;
  }

  bool is_name_in(const NameWord& a, const Name& x)
  {
    return std::find(a.begin(), a.end(), x) != a.end();
  }

  std::optional<std::string> well_formed(const AnnotatedSequent& s, const VariableOrder& o)
  {
    if (!non_repeating(s.control))
      return "control " + print_word(s.control) + " repeats a name";
    for (auto& n : s.control)
      if (!o.contains(n.var))
        return "name " + n.str() + " of an unknown variable";
    for (auto& m : s.members)
      {
        if (m.f.kind() != Kind::At)
          return "member " + m.f.str() + " has no satisfaction operator";
        if (!non_repeating(m.ann))
          return "annotation of " + m.f.str() + " repeats a name";
        for (std::size_t i = 0; i < m.ann.size(); ++i)
          {
            if (!o.contains(m.ann[i].var))
              return "name " + m.ann[i].str() + " of an unknown variable";
            if (i && o.index(m.ann[i - 1].var) > o.index(m.ann[i].var))
              return "annotation of " + m.f.str() + " is decreasing";
          }
        if (!subseq(m.ann, s.control))
          return "annotation of " + m.f.str() + " is not below the control";
      }
    return std::nullopt;
  }

  PlainSequent names_theory(const AnnotatedSequent& s, const Name& x)
  {
    PlainSequent out;
    for (auto& m : s.members)
      if (is_name_in(m.ann, x))
        out.insert(m.f);
    return out;
  }

  bool is_saf_axiom(const AnnotatedSequent& s)
  {
    if (!s.control.empty())
      return false;
    for (auto& m : s.members)
      if (!m.ann.empty())
        return false;
    return is_axiom(s.plain());
  }

  AnnotatedSequent trim_control(const AnnotatedSequent& s)
  {
    AnnotatedSequent out = s;
    out.control.clear();
    for (auto& n : s.control)
      for (auto& m : s.members)
        if (is_name_in(m.ann, n))
          {
            out.control.push_back(n);
            break;
          }
    return out;
  }

  // ---------------------------------------------------------------- rule checks

  namespace
  {
    AnnotatedSequent with(const AnnotatedSequent& s, std::initializer_list<AnnFormula> add)
    {
      AnnotatedSequent out = s;
      for (auto& m : add)
        out.members.push_back(m);
      out.normalize();
      return out;
    }

    std::optional<std::string> expect(const AnnotatedSequent& got, const AnnotatedSequent& want,
                                      const char* rule)
    {
      if (got == want)
        return std::nullopt;
      return std::string(rule) + " premise should be '" + want.str() + "'";
    }

    bool subset(const AnnotatedSequent& a, const AnnotatedSequent& b)
    {
      return std::all_of(a.members.begin(), a.members.end(),
                         [&](const AnnFormula& m) { return b.contains(m); });
    }

    std::optional<std::string> check_exp(const AnnotatedSequent& concl,
                                         const AnnotatedSequent& prem)
    {
      if (!subseq(prem.control, concl.control))
        return std::string("exp control is not a subsequence of the conclusion's");
      const auto& C = concl.members;
      const auto& P = prem.members;
      std::vector<std::vector<std::size_t>> ok(P.size());
      std::vector<bool> covered(C.size(), false);
      for (std::size_t c = 0; c < C.size(); ++c)
        for (std::size_t p = 0; p < P.size(); ++p)
          {
            if (C[c].f != P[p].f || !subseq(P[p].ann, C[c].ann))
              continue;
            auto m = meet(C[c].ann, prem.control);
            if (!m || !subseq(*m, P[p].ann))
              continue;
            ok[p].push_back(c);
            covered[c] = true;
          }
      for (std::size_t c = 0; c < C.size(); ++c)
        if (!covered[c])
          return "exp: no premise member for " + C[c].f.str();
      // every premise member needs its own conclusion member
      std::vector<std::size_t> match_c(C.size(), SafTag::none);
      std::function<bool(std::size_t, std::vector<bool>&)> augment =
        [&](std::size_t p, std::vector<bool>& seen) {
          for (auto c : ok[p])
            {
              if (seen[c])
                continue;
              seen[c] = true;
              if (match_c[c] == SafTag::none || augment(match_c[c], seen))
                {
                  match_c[c] = p;
                  return true;
                }
            }
          return false;
        };
      for (std::size_t p = 0; p < P.size(); ++p)
        {
          std::vector<bool> seen(C.size(), false);
          if (!augment(p, seen))
            return "exp: premise member " + P[p].f.str() + " has no source";
        }
      return std::nullopt;
    }

    std::optional<std::string> check_reset(const AnnotatedSequent& concl, const Name& x,
                                           const AnnotatedSequent& prem)
    {
      if (prem.control != concl.control)
        return std::string("reset changes the control");
      std::optional<NameWord> prefix;
      AnnotatedSequent want;
      want.control = concl.control;
      bool any = false;
      for (auto& m : concl.members)
        {
          std::size_t k = position(m.ann, x);
          if (k == m.ann.size())
            {
              want.members.push_back(m);
              continue;
            }
          if (k + 1 == m.ann.size())
            return "reset(" + x.str() + "): " + m.f.str() + " carries " + x.str()
                   + " without a later name";
          NameWord b(m.ann.begin(), m.ann.begin() + static_cast<std::ptrdiff_t>(k));
          if (prefix && *prefix != b)
            return "reset(" + x.str() + "): annotations disagree before " + x.str();
          prefix = b;
          any = true;
          b.push_back(x);
          want.members.push_back({m.f, b});
        }
      if (!any)
        return "reset(" + x.str() + "): no annotation extends " + x.str();
      want.normalize();
      return expect(prem, want, "reset");
    }
  }

  std::optional<std::string> check_thinning(const AnnotatedSequent& concl, std::size_t removed,
                                            std::size_t kept, const AnnotatedSequent& premise,
                                            const VariableOrder& o)
  {
    if (removed >= concl.members.size() || kept >= concl.members.size() || removed == kept)
      return std::string("thin: bad member indices");
    const auto& r = concl.members[removed];
    const auto& k = concl.members[kept];
    if (r.f != k.f)
      return std::string("thin: members carry different formulas");
    if (!ann_less(k.ann, r.ann, concl.control, o))
      return "thin: kept annotation " + print_word(k.ann) + " is not below "
             + print_word(r.ann);
    AnnotatedSequent rest = concl;
    rest.members.erase(rest.members.begin() + static_cast<std::ptrdiff_t>(removed));
    return expect(premise, trim_control(rest), "thin");
  }

  std::optional<std::string> check_thinning(const AnnotatedSequent& concl,
                                            const AnnotatedSequent& premise,
                                            const VariableOrder& o)
  {
    for (std::size_t r = 0; r < concl.members.size(); ++r)
      for (std::size_t k = 0; k < concl.members.size(); ++k)
        if (r != k && concl.members[r].f == concl.members[k].f
            && !check_thinning(concl, r, k, premise, o))
          return std::nullopt;
    return std::string("thin: no pair of members justifies the premise");
  }

  std::optional<std::string> check_saf_instance(const AnnotatedSequent& concl, const SafTag& t,
                                                const std::vector<AnnotatedSequent>& premises,
                                                const SafContext& ctx)
  {
    const std::size_t want = t.kind == SafKind::And ? 2 : 1;
    if (premises.size() != want)
      return std::string(saf_name(t.kind)) + " needs " + std::to_string(want)
             + " premise(s), got " + std::to_string(premises.size());
    for (auto& p : premises)
      if (auto e = well_formed(p, ctx.order))
        return "premise: " + *e;
    const auto& prem = premises[0];
    const auto& M = concl.members;
    const bool needs_principal = t.kind != SafKind::Weak && t.kind != SafKind::Exp
                                 && t.kind != SafKind::Reset;
    if (needs_principal && t.principal >= M.size())
      return std::string(saf_name(t.kind)) + ": principal index out of range";
    auto same_control = [&]() -> std::optional<std::string> {
      for (auto& p : premises)
        if (p.control != concl.control)
          return std::string(saf_name(t.kind)) + " changes the control";
      return std::nullopt;
    };
    auto wrong_shape = [&]() {
      return std::string(saf_name(t.kind)) + " does not apply to " + M[t.principal].f.str();
    };
    switch (t.kind)
      {
      case SafKind::And:
      case SafKind::Or:
      case SafKind::Glob:
      case SafKind::Eta:
      case SafKind::Com:
      case SafKind::Eq:
        {
          if (auto e = same_control())
            return e;
          const AnnFormula& p = M[t.principal];
          Sym i = p.f.sym();
          Formula b = p.f.body();
          switch (t.kind)
            {
            case SafKind::And:
              if (b.kind() != Kind::And)
                return wrong_shape();
              if (auto e = expect(premises[0], with(concl, {{Formula::at(i, b.left()), p.ann}}),
                                  "and"))
                return e;
              return expect(premises[1], with(concl, {{Formula::at(i, b.right()), p.ann}}), "and");
            case SafKind::Or:
              if (b.kind() != Kind::Or)
                return wrong_shape();
              return expect(prem,
                            with(concl, {{Formula::at(i, b.left()), p.ann},
                                         {Formula::at(i, b.right()), p.ann}}),
                            "or");
            case SafKind::Glob:
              if (b.kind() != Kind::At)
                return wrong_shape();
              return expect(prem, with(concl, {{b, p.ann}}), "glob");
            case SafKind::Eta:
              if (!b.is_fix())
                return wrong_shape();
              if (!ctx.order.contains(b.sym()))
                return "eta: unknown variable " + sym_name(b.sym());
              if (!leq_var(p.ann, b.sym(), ctx.order))
                return "eta: annotation " + print_word(p.ann) + " has names above "
                       + sym_name(b.sym());
              return expect(prem, with(concl, {{Formula::at(i, unfold(b)), p.ann}}), "eta");
            case SafKind::Com:
              {
                auto ne = as_neq(p.f);
                if (!ne)
                  return wrong_shape();
                return expect(prem, with(concl, {{neq(ne->second, ne->first), p.ann}}), "com");
              }
            default:
              {
                if (t.side >= M.size())
                  return std::string("eq: side index out of range");
                auto ne = as_neq(M[t.side].f);
                if (!ne || ne->first != i)
                  return "eq: side " + M[t.side].f.str() + " is not " + sym_name(i) + " != _";
                return expect(prem, with(concl, {{Formula::at(ne->second, b), p.ann}}), "eq");
              }
            }
        }
      case SafKind::Rec:
        {
          const AnnFormula& p = M[t.principal];
          Formula b = p.f.body();
          if (b.kind() != Kind::Nu)
            return wrong_shape();
          Sym x = b.sym();
          if (!ctx.order.contains(x))
            return "rec: unknown variable " + sym_name(x);
          if (t.name.var != x)
            return "rec: name " + t.name.str() + " is not a name of " + sym_name(x);
          if (is_name_in(concl.control, t.name))
            return "rec: name " + t.name.str() + " is not fresh";
          if (!leq_var(p.ann, x, ctx.order))
            return "rec: annotation " + print_word(p.ann) + " has names above " + sym_name(x);
          NameWord ann = p.ann;
          ann.push_back(t.name);
          AnnotatedSequent w = with(concl, {{Formula::at(p.f.sym(), unfold(b)), ann}});
          w.control.push_back(t.name);
          return expect(prem, w, "rec");
        }
      case SafKind::Mod:
        {
          if (auto e = same_control())
            return e;
          const AnnFormula& p = M[t.principal];
          if (p.f.body().kind() != Kind::Box)
            return wrong_shape();
          if (sequent_nominals(concl.plain()).count(t.nominal))
            return "mod: nominal '" + sym_name(t.nominal) + "' is not fresh";
          if (!subset(concl, prem))
            return std::string("mod: premise drops a conclusion member");
          AnnFormula target{Formula::at(t.nominal, p.f.body().body()), p.ann};
          if (!prem.contains(target))
            return "mod: premise lacks " + target.f.str();
          for (auto& m : prem.members)
            {
              if (concl.contains(m) || m == target)
                continue;
              bool justified = m.f.sym() == t.nominal
                               && concl.contains({Formula::at(p.f.sym(), Formula::dia(m.f.body())),
                                                  m.ann});
              if (!justified)
                return "mod: premise member " + m.f.str() + " is not justified";
            }
          return std::nullopt;
        }
      case SafKind::Weak:
        if (auto e = same_control())
          return e;
        if (!subset(prem, concl))
          return std::string("weak: premise is not contained in the conclusion");
        return std::nullopt;
      case SafKind::Exp:
        return check_exp(concl, prem);
      case SafKind::Reset:
        return check_reset(concl, t.name, prem);
      case SafKind::Thin:
        return check_thinning(concl, t.principal, t.side, prem, ctx.order);
      }
    return std::string("unknown rule");
  }
}

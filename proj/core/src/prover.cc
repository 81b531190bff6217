#include "hmu/prover.hh"

#include <algorithm>
#include <atomic>
#include <climits>
#include <functional>
#include <map>
#include <thread>
#include <unordered_map>

namespace hmu
{
  SearchContext SearchContext::make(Formula rho)
  {
    SearchContext c;
    c.rho = rho;
    c.saf.orig = OriginalityContext::make(rho, root_nominal());
    c.saf.order = dependency_order(rho);
    c.closure_size = closure(rho).size();
    return c;
  }

  void FailureWitness::merge(const FailureWitness& o)
  {
    formulas.insert(o.formulas.begin(), o.formulas.end());
    mods.insert(o.mods.begin(), o.mods.end());
  }

  namespace
  {
    const AnnFormula& first_with(const AnnotatedSequent& s, Formula f)
    {
      for (auto& m : s.members)
        if (m.f == f)
          return m;
      throw std::logic_error("no member carries " + f.str());
    }

    AnnotatedSequent add(const AnnotatedSequent& s, std::initializer_list<AnnFormula> ms)
    {
      AnnotatedSequent out = s;
      out.members.insert(out.members.end(), ms.begin(), ms.end());
      out.normalize();
      return out;
    }

    AnnotatedSequent remove(const AnnotatedSequent& s, const AnnFormula& m)
    {
      AnnotatedSequent out = s;
      out.members.erase(std::remove(out.members.begin(), out.members.end(), m), out.members.end());
      return out;
    }

    NameWord without(const NameWord& w, const NameWord& drop)
    {
      NameWord out;
      for (auto& n : w)
        if (!is_name_in(drop, n))
          out.push_back(n);
      return out;
    }

    std::optional<AnnotatedSequent> reset_premise(const AnnotatedSequent& s, const Name& x)
    {
      std::optional<NameWord> prefix;
      AnnotatedSequent out;
      out.control = s.control;
      bool any = false;
      for (auto& m : s.members)
        {
          auto it = std::find(m.ann.begin(), m.ann.end(), x);
          if (it == m.ann.end())
            {
              out.members.push_back(m);
              continue;
            }
          if (it + 1 == m.ann.end())
            return std::nullopt;
          NameWord b(m.ann.begin(), it);
          if (prefix && *prefix != b)
            return std::nullopt;
          prefix = b;
          any = true;
          b.push_back(x);
          out.members.push_back({m.f, b});
        }
      if (!any)
        return std::nullopt;
      out.normalize();
      return out;
    }

    struct Maker
    {
      const SearchContext& c;

      std::shared_ptr<Tree> node(const AnnotatedSequent& l) const
      {
        if (c.observer)
          c.observer(l);
        return bare(l);
      }

      // not reported: the raw Mod premise before narrowing
      static std::shared_ptr<Tree> bare(const AnnotatedSequent& l)
      {
        auto t = std::make_shared<Tree>();
        t->label = l;
        return t;
      }

      std::shared_ptr<Tree> step(const std::shared_ptr<Tree>& cur, TreeTag tag,
                                 const AnnotatedSequent& premise) const
      {
        cur->rule = std::move(tag);
        auto k = node(premise);
        cur->kids = {k};
        return k;
      }
    };

    TreeTag tag(SafKind k, std::optional<AnnFormula> p = std::nullopt,
                std::optional<AnnFormula> s = std::nullopt)
    {
      TreeTag t;
      t.kind = k;
      t.principal = std::move(p);
      t.side = std::move(s);
      return t;
    }
  }

  std::shared_ptr<Tree> saturate(const AnnotatedSequent& s, const SearchContext& c)
  {
    Maker mk{c};
    const auto& orig = c.saf.orig;
    const auto& order = c.saf.order;
    auto root = mk.node(s);
    std::vector<std::shared_ptr<Tree>> work{root};
    while (!work.empty())
      {
        auto cur = work.back();
        work.pop_back();
        std::size_t noms = std::max<std::size_t>(1, sequent_nominals(cur->label.plain()).size());
        const std::size_t bound = std::max<std::size_t>(1, c.closure_size) * noms * 4;
        std::size_t rule_steps = 0;
        for (;;)
          {
            const AnnotatedSequent L = cur->label;
            PlainSequent plain = L.plain();
            if (auto ax = find_axiom(plain))
              {
                std::vector<AnnFormula> keep;
                for (auto f : *ax)
                  keep.push_back(first_with(L, f));
                AnnotatedSequent w(L.control, keep);
                if (!(w == L))
                  cur = mk.step(cur, tag(SafKind::Weak), w);
                if (!is_saf_axiom(w))
                  {
                    for (auto& m : keep)
                      m.ann.clear();
                    cur = mk.step(cur, tag(SafKind::Exp), AnnotatedSequent({}, keep));
                  }
                cur->axiom = true;
                break;
              }
            if (AnnotatedSequent t = trim_control(L); !(t == L))
              {
                cur = mk.step(cur, tag(SafKind::Exp), t);
                continue;
              }
            bool thinned = false;
            for (std::size_t r = 0; r < L.members.size() && !thinned; ++r)
              for (std::size_t k = 0; k < L.members.size() && !thinned; ++k)
                if (r != k && L.members[r].f == L.members[k].f
                    && ann_less(L.members[k].ann, L.members[r].ann, L.control, order))
                  {
                    cur = mk.step(cur, tag(SafKind::Thin, L.members[r], L.members[k]),
                                  trim_control(remove(L, L.members[r])));
                    thinned = true;
                  }
            if (thinned)
              continue;
            if (auto d = deterministic_step(plain, orig))
              {
                if (++rule_steps > bound)
                  throw std::logic_error("saturation did not terminate");
                AnnFormula m = first_with(L, d->tag.principal);
                Sym i = m.f.sym();
                Formula b = m.f.body();
                if (d->tag.kind == RuleKind::And)
                  {
                    cur->rule = tag(SafKind::And, m);
                    for (Formula part : {b.left(), b.right()})
                      {
                        auto kid = mk.node(add(L, {{Formula::at(i, part), m.ann}}));
                        cur->kids.push_back(kid);
                        work.push_back(mk.step(kid, tag(SafKind::Weak), remove(kid->label, m)));
                      }
                    // process the left premise first
                    std::swap(work[work.size() - 1], work[work.size() - 2]);
                    break;
                  }
                AnnotatedSequent p;
                TreeTag t = tag(SafKind::Or, m);
                switch (d->tag.kind)
                  {
                  case RuleKind::Or:
                    p = add(L, {{Formula::at(i, b.left()), m.ann}, {Formula::at(i, b.right()), m.ann}});
                    break;
                  case RuleKind::Glob:
                    t.kind = SafKind::Glob;
                    p = add(L, {{b, m.ann}});
                    break;
                  default:
                    {
                      Sym x = b.sym();
                      if (!leq_var(m.ann, x, order))
                        {
                          NameWord drop;
                          for (auto& n : m.ann)
                            if (order.index(n.var) > order.index(x))
                              drop.push_back(n);
                          AnnotatedSequent e;
                          e.control = without(L.control, drop);
                          for (auto& o : L.members)
                            e.members.push_back({o.f, without(o.ann, drop)});
                          e.normalize();
                          cur = mk.step(cur, tag(SafKind::Exp), e);
                          m.ann = without(m.ann, drop);
                          t.principal = m;
                        }
                      const AnnotatedSequent& E = cur->label;
                      Formula u = Formula::at(i, unfold(b));
                      if (b.kind() == Kind::Mu)
                        {
                          t.kind = SafKind::Eta;
                          p = add(E, {{u, m.ann}});
                        }
                      else
                        {
                          Name n{x, 0};
                          while (is_name_in(E.control, n))
                            ++n.index;
                          t.kind = SafKind::Rec;
                          t.name = n;
                          NameWord ann = m.ann;
                          ann.push_back(n);
                          p = add(E, {{u, ann}});
                          p.control.push_back(n);
                        }
                    }
                  }
                cur = mk.step(cur, t, p);
                cur = mk.step(cur, tag(SafKind::Weak), remove(p, m));
                continue;
              }
            if (auto g = ground_step(plain, orig))
              {
                if (++rule_steps > bound)
                  throw std::logic_error("saturation did not terminate");
                AnnFormula m = first_with(L, g->tag.principal);
                if (g->tag.kind == RuleKind::Eq)
                  {
                    AnnFormula side = first_with(L, g->tag.side);
                    Sym j = as_neq(side.f)->second;
                    cur = mk.step(cur, tag(SafKind::Eq, m, side),
                                  add(L, {{Formula::at(j, m.f.body()), m.ann}}));
                  }
                else
                  {
                    auto ne = as_neq(m.f);
                    cur = mk.step(cur, tag(SafKind::Com, m),
                                  add(L, {{neq(ne->second, ne->first), m.ann}}));
                  }
                continue;
              }
            bool reset = false;
            for (auto& x : L.control)
              if (auto p = reset_premise(L, x))
                {
                  TreeTag t = tag(SafKind::Reset);
                  t.name = x;
                  cur = mk.step(cur, t, *p);
                  reset = true;
                  break;
                }
            if (reset)
              continue;
            break;
          }
      }
    return root;
  }

  std::vector<Choice> expand(const AnnotatedSequent& s, const SearchContext& c)
  {
    std::vector<Choice> out;
    PlainSequent plain = s.plain();
    auto noms = sequent_nominals(plain);
    Sym j = noms.count(fresh_nominal(0)) ? fresh_nominal(1) : fresh_nominal(0);
    for (auto f : plain)
      {
        if (f.body().kind() != Kind::Box)
          continue;
        const AnnFormula& m = first_with(s, f);
        Choice ch{m, j, s, {}};
        ch.mod_premise.members.push_back({Formula::at(j, f.body().body()), m.ann});
        for (auto& d : s.members)
          if (d.f.sym() == f.sym() && d.f.body().kind() == Kind::Dia)
            ch.mod_premise.members.push_back({Formula::at(j, d.f.body().body()), d.ann});
        ch.mod_premise.normalize();
        ch.narrowed.control = s.control;
        for (auto& d : ch.mod_premise.members)
          if (d.f.sym() == j || c.saf.orig.is_original(d.f.sym()))
            ch.narrowed.members.push_back(d);
        out.push_back(std::move(ch));
      }
    return out;
  }

  // ---------------------------------------------------------------- renaming

  namespace
  {
    struct Swapper
    {
      Sym a, b;
      std::unordered_map<Formula, Formula> cache;

      Sym sym(Sym s) const { return s == a ? b : s == b ? a : s; }

      Formula operator()(Formula f)
      {
        if (auto it = cache.find(f); it != cache.end())
          return it->second;
        Formula r;
        switch (f.kind())
          {
          case Kind::Prop: r = f; break;
          case Kind::Nom: r = Formula::nom(sym(f.sym()), f.positive()); break;
          case Kind::Or: r = Formula::disj((*this)(f.left()), (*this)(f.right())); break;
          case Kind::And: r = Formula::conj((*this)(f.left()), (*this)(f.right())); break;
          case Kind::Dia: r = Formula::dia((*this)(f.body())); break;
          case Kind::Box: r = Formula::box((*this)(f.body())); break;
          case Kind::At: r = Formula::at(sym(f.sym()), (*this)(f.body())); break;
          case Kind::Mu:
          case Kind::Nu: r = Formula::fix(f.kind(), f.sym(), (*this)(f.body())); break;
          }
        cache.emplace(f, r);
        return r;
      }

      AnnFormula operator()(const AnnFormula& m) { return {(*this)(m.f), m.ann}; }

      AnnotatedSequent operator()(const AnnotatedSequent& s)
      {
        AnnotatedSequent out;
        out.control = s.control;
        for (auto& m : s.members)
          out.members.push_back((*this)(m));
        out.normalize();
        return out;
      }

      FailureWitness operator()(const FailureWitness& w)
      {
        FailureWitness out;
        for (auto f : w.formulas)
          out.formulas.insert((*this)(f));
        for (auto [i, j] : w.mods)
          out.mods.emplace(sym(i), sym(j));
        return out;
      }

      std::shared_ptr<Tree> operator()(const std::shared_ptr<Tree>& t)
      {
        auto out = std::make_shared<Tree>();
        out->label = (*this)(t->label);
        out->back = t->back;
        out->axiom = t->axiom;
        if (t->rule)
          {
            TreeTag r = *t->rule;
            if (r.principal)
              r.principal = (*this)(*r.principal);
            if (r.side)
              r.side = (*this)(*r.side);
            r.nominal = sym(r.nominal);
            out->rule = r;
          }
        for (auto& k : t->kids)
          out->kids.push_back((*this)(k));
        return out;
      }
    };

    // ---------------------------------------------------------------- search

    struct Result
    {
      enum class S { Ok, Fail, Exhausted } s = S::Exhausted;
      std::size_t min_ref = SIZE_MAX;
      FailureWitness w;
      std::string why;
    };

    struct MemoEntry
    {
      Result r;
      std::shared_ptr<Tree> sub;  // Ok: rule and kids of the open node
      bool swapped;
    };

    struct PathEntry
    {
      const Tree* node;
      bool open;
      std::string key;
    };

    class Searcher
    {
    public:
      Searcher(const SearchContext& c, const Budget& b, bool may_split,
               std::function<bool()> cancelled)
        : c_(c), b_(b), may_split_(may_split), cancelled_(std::move(cancelled))
      {
      }

      Result solve_tree(const std::shared_ptr<Tree>& t);

      Result run_choice(const Choice& ch, std::shared_ptr<Tree>& out);

      std::vector<PathEntry> path;
      std::size_t depth = 0;

    private:
      Result solve_open(const std::shared_ptr<Tree>& t);
      Result split(const std::shared_ptr<Tree>& t, const std::vector<Choice>& choices);
      std::optional<Name> good_name(std::size_t k, std::size_t n) const;

      const SearchContext& c_;
      Budget b_;
      bool may_split_;
      std::function<bool()> cancelled_;
      std::size_t steps_ = 0;
      std::unordered_map<std::string, MemoEntry> memo_;
    };

    Result Searcher::solve_tree(const std::shared_ptr<Tree>& t)
    {
      path.push_back({t.get(), false, {}});
      Result r;
      if (t->axiom)
        r.s = Result::S::Ok;
      else if (!t->rule)
        r = solve_open(t);
      else
        {
          bool exhausted = false;
          r.s = Result::S::Ok;
          for (auto& k : t->kids)
            {
              Result rk = solve_tree(k);
              r.min_ref = std::min(r.min_ref, rk.min_ref);
              if (rk.s == Result::S::Fail)
                {
                  r.s = Result::S::Fail;
                  r.w = std::move(rk.w);
                  r.why = rk.why;
                  break;
                }
              if (rk.s == Result::S::Exhausted)
                {
                  exhausted = true;
                  r.why = rk.why;
                }
            }
          if (r.s == Result::S::Ok && exhausted)
            r.s = Result::S::Exhausted;
          if (r.s == Result::S::Fail)
            for (auto& m : t->label.members)
              r.w.formulas.insert(m.f);
        }
      path.pop_back();
      return r;
    }

    std::optional<Name> Searcher::good_name(std::size_t k, std::size_t n) const
    {
      const auto& order = c_.saf.order;
      std::optional<Name> best;
      for (auto& x : path[k].node->label.control)
        {
          bool everywhere = true;
          for (std::size_t j = k; j <= n && everywhere; ++j)
            everywhere = is_name_in(path[j].node->label.control, x);
          if (!everywhere)
            continue;
          bool reset = false;
          for (std::size_t j = k; j < n && !reset; ++j)
            {
              const auto& r = path[j].node->rule;
              reset = r && r->kind == SafKind::Reset && r->name == x;
            }
          if (!reset)
            continue;
          auto rank = [&](const Name& m) { return std::make_pair(order.index(m.var), m.index); };
          if (!best || rank(x) < rank(*best))
            best = x;
        }
      return best;
    }

    Result Searcher::run_choice(const Choice& ch, std::shared_ptr<Tree>& out)
    {
      auto p = Maker::bare(ch.mod_premise);
      auto frag = saturate(ch.narrowed, c_);
      if (ch.narrowed == ch.mod_premise)
        p = frag;
      else
        {
          p->rule = tag(SafKind::Weak);
          p->kids = {frag};
        }
      out = p;
      ++depth;
      Result r = solve_tree(p);
      --depth;
      return r;
    }

    Result Searcher::solve_open(const std::shared_ptr<Tree>& t)
    {
      const std::size_t n = path.size() - 1;
      const AnnotatedSequent& L = t->label;
      path[n].open = true;
      path[n].key = L.str();
      Result r;
      std::size_t bad = SIZE_MAX;
      for (std::size_t k = n; k-- > 0;)
        if (path[k].open && path[k].key == path[n].key)
          {
            if (good_name(k, n))
              {
                t->back = n - k;
                r.s = Result::S::Ok;
                r.min_ref = k;
                return r;
              }
            bad = k;
          }
      if (bad != SIZE_MAX)
        {
          r.s = Result::S::Fail;
          r.min_ref = bad;
          r.why = "repeat without a good name";
          for (auto& m : L.members)
            r.w.formulas.insert(m.f);
          return r;
        }
      const Sym n0 = fresh_nominal(0), n1 = fresh_nominal(1);
      const bool swapped = sequent_nominals(L.plain()).count(n1) != 0;
      Swapper sw{n0, n1, {}};
      std::string key = swapped ? sw(L).str() : path[n].key;
      if (auto it = memo_.find(key); it != memo_.end())
        {
          const MemoEntry& e = it->second;
          Swapper sw2{n0, n1, {}};
          bool flip = e.swapped != swapped;
          Result out = e.r;
          out.min_ref = SIZE_MAX;
          if (e.r.s == Result::S::Ok)
            {
              auto sub = flip ? sw2(e.sub) : e.sub;
              t->rule = sub->rule;
              t->kids = sub->kids;
            }
          else if (flip)
            out.w = sw2(e.r.w);
          return out;
        }
      if (cancelled_ && cancelled_())
        {
          r.why = "cancelled";
          return r;
        }
      if (depth >= b_.max_depth)
        {
          r.why = "depth budget";
          return r;
        }
      if (++steps_ > b_.max_steps)
        {
          r.why = "step budget";
          return r;
        }
      auto choices = expand(L, c_);
      if (choices.empty())
        {
          r.s = Result::S::Fail;
          r.why = "no box formula";
          for (auto& m : L.members)
            r.w.formulas.insert(m.f);
        }
      else if (may_split_ && choices.size() >= 2)
        {
          may_split_ = false;
          r = split(t, choices);
        }
      else
        {
          FailureWitness w;
          for (auto& m : L.members)
            w.formulas.insert(m.f);
          bool exhausted = false;
          std::size_t min_ref = SIZE_MAX;
          r.s = Result::S::Fail;
          for (auto& ch : choices)
            {
              std::shared_ptr<Tree> sub;
              Result rc = run_choice(ch, sub);
              if (rc.s == Result::S::Ok)
                {
                  t->rule = tag(SafKind::Mod, ch.principal);
                  t->rule->nominal = ch.nominal;
                  t->kids = {sub};
                  r = rc;
                  break;
                }
              min_ref = std::min(min_ref, rc.min_ref);
              if (rc.s == Result::S::Exhausted)
                {
                  exhausted = true;
                  r.why = rc.why;
                }
              else
                {
                  w.merge(rc.w);
                  w.mods.emplace(ch.principal.f.sym(), ch.nominal);
                }
            }
          if (r.s != Result::S::Ok)
            {
              r.s = exhausted ? Result::S::Exhausted : Result::S::Fail;
              r.min_ref = min_ref;
              r.w = std::move(w);
              if (!exhausted)
                r.why = "every box choice fails";
            }
        }
      if (r.s != Result::S::Exhausted && r.min_ref >= n && memo_.size() < b_.memo_cap)
        {
          MemoEntry e{r, nullptr, swapped};
          if (r.s == Result::S::Ok)
            {
              e.sub = std::make_shared<Tree>();
              e.sub->rule = t->rule;
              e.sub->kids = t->kids;
            }
          else
            {
              e.r.w = swapped ? sw(r.w) : r.w;
              e.swapped = false;
            }
          memo_.emplace(key, std::move(e));
        }
      return r;
    }

    Result Searcher::split(const std::shared_ptr<Tree>& t, const std::vector<Choice>& choices)
    {
      const std::size_t k = choices.size();
      std::vector<Result> results(k);
      std::vector<std::shared_ptr<Tree>> subs(k);
      std::atomic<std::size_t> first_ok{SIZE_MAX};
      auto work = [&](std::size_t i) {
        Searcher child(c_, b_, false, [&first_ok, i]() { return first_ok.load() < i; });
        child.path = path;
        child.depth = depth;
        results[i] = child.run_choice(choices[i], subs[i]);
        if (results[i].s == Result::S::Ok)
          {
            std::size_t cur = first_ok.load();
            while (i < cur && !first_ok.compare_exchange_weak(cur, i))
              ;
          }
      };
      unsigned threads = std::max(1u, b_.threads);
      if (threads == 1)
        {
          for (std::size_t i = 0; i < k; ++i)
            {
              work(i);
              if (results[i].s == Result::S::Ok)
                break;
            }
        }
      else
        {
          std::atomic<std::size_t> next{0};
          std::vector<std::thread> pool;
          for (unsigned w = 0; w < std::min<std::size_t>(threads, k); ++w)
            pool.emplace_back([&]() {
              for (std::size_t i; (i = next.fetch_add(1)) < k;)
                if (first_ok.load() > i)
                  work(i);
                else
                  results[i].why = "cancelled";
            });
          for (auto& th : pool)
            th.join();
        }
      Result r;
      FailureWitness w;
      for (auto& m : t->label.members)
        w.formulas.insert(m.f);
      bool exhausted = false;
      std::size_t min_ref = SIZE_MAX;
      for (std::size_t i = 0; i < k; ++i)
        {
          if (results[i].s == Result::S::Ok)
            {
              t->rule = tag(SafKind::Mod, choices[i].principal);
              t->rule->nominal = choices[i].nominal;
              t->kids = {subs[i]};
              return results[i];
            }
          min_ref = std::min(min_ref, results[i].min_ref);
          if (results[i].s == Result::S::Exhausted)
            {
              exhausted = true;
              if (r.why.empty())
                r.why = results[i].why;
            }
          else
            {
              w.merge(results[i].w);
              w.mods.emplace(choices[i].principal.f.sym(), choices[i].nominal);
            }
        }
      r.s = exhausted ? Result::S::Exhausted : Result::S::Fail;
      r.min_ref = min_ref;
      r.w = std::move(w);
      if (!exhausted)
        r.why = "every box choice fails";
      return r;
    }
  }

  // ---------------------------------------------------------------- output

  Proof to_proof(const Tree& root, const SearchContext& c)
  {
    Proof p;
    p.rho = c.rho;
    p.order = c.saf.order;
    auto index_of = [](const AnnotatedSequent& s, const std::optional<AnnFormula>& m) {
      if (!m)
        return SafTag::none;
      for (std::size_t i = 0; i < s.members.size(); ++i)
        if (s.members[i] == *m)
          return i;
      throw std::logic_error("tag member " + m->f.str() + " missing from " + s.str());
    };
    std::vector<std::size_t> stack;
    std::function<void(const Tree&, std::size_t)> walk = [&](const Tree& t, std::size_t parent) {
      std::size_t me = p.nodes.size();
      ProofNode n;
      n.id = std::to_string(me);
      n.label = t.label;
      n.parent = parent;
      if (t.rule)
        {
          SafTag s;
          s.kind = t.rule->kind;
          s.principal = index_of(t.label, t.rule->principal);
          s.side = index_of(t.label, t.rule->side);
          s.nominal = t.rule->nominal;
          s.name = t.rule->name;
          n.rule = s;
        }
      p.nodes.push_back(std::move(n));
      if (parent != ProofNode::none)
        p.nodes[parent].children.push_back(me);
      stack.push_back(me);
      if (t.back)
        p.backedges[me] = stack[stack.size() - 1 - t.back];
      for (auto& k : t.kids)
        walk(*k, me);
      stack.pop_back();
    };
    walk(root, ProofNode::none);
    return p;
  }

  std::pair<KripkeModel, std::string> extract_countermodel(const FailureWitness& w,
                                                           const OriginalityContext& ctx)
  {
    std::set<Sym> N = ctx.original;
    for (auto f : w.formulas)
      {
        auto n = nominals(f);
        N.insert(n.begin(), n.end());
      }
    for (auto [i, j] : w.mods)
      {
        N.insert(i);
        N.insert(j);
      }
    std::map<Sym, Sym> parent;
    for (auto i : N)
      parent[i] = i;
    std::function<Sym(Sym)> find = [&](Sym i) {
      return parent[i] == i ? i : parent[i] = find(parent[i]);
    };
    for (auto f : w.formulas)
      if (auto ne = as_neq(f))
        parent[find(ne->first)] = find(ne->second);
    auto before = [&](Sym a, Sym b) {
      bool oa = ctx.is_original(a), ob = ctx.is_original(b);
      if (oa != ob)
        return oa;
      return Formula::nom(a).str() < Formula::nom(b).str();
    };
    std::map<Sym, Sym> rep;  // class root -> representative
    for (auto i : N)
      {
        Sym r = find(i);
        auto it = rep.find(r);
        if (it == rep.end() || before(i, it->second))
          rep[r] = i;
      }
    auto rep_of = [&](Sym i) { return rep.at(find(i)); };
    std::vector<std::string> worlds;
    for (auto& [r, i] : rep)
      worlds.push_back(sym_name(i));
    std::sort(worlds.begin(), worlds.end());
    KripkeModel m;
    for (auto& id : worlds)
      m.add_world(id);
    for (auto [i, j] : w.mods)
      m.add_edge(m.world(sym_name(rep_of(i))), m.world(sym_name(rep_of(j))));
    for (auto f : w.formulas)
      if (f.kind() == Kind::At && f.body().kind() == Kind::Prop && !f.body().positive())
        {
          auto& s = m.val[f.body().sym()];
          s.resize(m.size(), false);
          s[m.world(sym_name(rep_of(f.sym())))] = true;
        }
    for (auto i : N)
      m.assign[i] = m.world(sym_name(rep_of(i)));
    Sym r = ctx.root.sym();
    return {m, sym_name(rep_of(r))};
  }

  SearchOutcome prove(Formula rho, const ProveOptions& opt)
  {
    if (auto e = guardedness_error(rho))
      throw std::invalid_argument(*e);
    if (auto e = well_named_error(rho, true))
      throw std::invalid_argument(*e);
    for (auto i : nominals(rho))
      if (!sym_name(i).empty() && sym_name(i)[0] == '_')
        throw std::invalid_argument("nominal '" + sym_name(i) + "' uses the reserved prefix _");
    SearchContext c = SearchContext::make(rho);
    c.observer = opt.observer;
    AnnotatedSequent root({}, {{c.saf.orig.root, {}}});
    auto frag = saturate(root, c);
    Searcher s(c, opt.budget, true, nullptr);
    Result r = s.solve_tree(frag);
    SearchOutcome out;
    switch (r.s)
      {
      case Result::S::Ok:
        {
          out.proof = to_proof(*frag, c);
          Verdict v = check_proof(out.proof);
          if (v.accepted)
            out.status = Status::Proved;
          else
            out.report = "internal: proof rejected at node " + v.node + ": " + v.reason;
          break;
        }
      case Result::S::Fail:
        {
          auto [m, w] = extract_countermodel(r.w, c.saf.orig);
          if (!model_check(m, w, rho))
            {
              out.status = Status::Refuted;
              out.model = std::move(m);
              out.world = w;
            }
          else
            out.report = "countermodel did not verify (" + r.why + ")";
          break;
        }
      case Result::S::Exhausted:
        out.report = r.why;
        break;
      }
    return out;
  }
}

#include "hmu/semantics.hh"

#include <algorithm>
#include <cassert>
#include <functional>
#include <optional>
#include <set>
#include <sstream>

namespace hmu
{
  // ---------------------------------------------------------------- models

  std::size_t KripkeModel::add_world(const std::string& id)
  {
    auto it = std::find(names.begin(), names.end(), id);
    if (it != names.end())
      return static_cast<std::size_t>(it - names.begin());
    names.push_back(id);
    succ.emplace_back();
    for (auto& [p, s] : val)
      s.resize(names.size(), false);
    return names.size() - 1;
  }

  void KripkeModel::add_edge(std::size_t a, std::size_t b)
  {
    auto& s = succ.at(a);
    auto it = std::lower_bound(s.begin(), s.end(), b);
    if (it == s.end() || *it != b)
      s.insert(it, b);
  }

  bool KripkeModel::has_world(const std::string& id) const
  {
    return std::find(names.begin(), names.end(), id) != names.end();
  }

  std::size_t KripkeModel::world(const std::string& id) const
  {
    auto it = std::find(names.begin(), names.end(), id);
    if (it == names.end())
      throw std::out_of_range("unknown world '" + id + "'");
    return static_cast<std::size_t>(it - names.begin());
  }

  void KripkeModel::validate() const
  {
    if (names.empty())
      throw std::invalid_argument("model has no worlds");
    if (succ.size() != names.size())
      throw std::invalid_argument("successor table size mismatch");
    for (auto& s : succ)
      for (auto v : s)
        if (v >= names.size())
          throw std::invalid_argument("edge endpoint outside W");
    for (auto& [p, s] : val)
      if (s.size() != names.size())
        throw std::invalid_argument("valuation of " + sym_name(p)
                                    + " has wrong size");
    for (auto& [i, w] : assign)
      if (w >= names.size())
        throw std::invalid_argument("nominal " + sym_name(i) + " outside W");
  }

  ModelError::ModelError(std::size_t l, const std::string& msg)
    : std::runtime_error("line " + std::to_string(l) + ": " + msg), line(l)
  {
  }

  KripkeModel parse_model(const std::string& text)
  {
    KripkeModel m;
    std::istringstream in(text);
    std::string line;
    std::size_t ln = 0;
    auto need = [&](const std::string& id) {
      if (!m.has_world(id))
        throw ModelError(ln, "unknown world '" + id + "'");
      return m.world(id);
    };
    while (std::getline(in, line))
      {
        ++ln;
        auto hash = line.find('#');
        if (hash != std::string::npos)
          line.resize(hash);
        std::istringstream ls(line);
        std::vector<std::string> w;
        for (std::string t; ls >> t;)
          w.push_back(t);
        if (w.empty())
          continue;
        if (w[0] == "world" && w.size() == 2)
          {
            if (m.has_world(w[1]))
              throw ModelError(ln, "duplicate world '" + w[1] + "'");
            m.add_world(w[1]);
          }
        else if (w[0] == "edge" && w.size() == 3)
          m.add_edge(need(w[1]), need(w[2]));
        else if (w[0] == "prop" && w.size() == 3)
          {
            Sym p = intern(w[1]);
            auto& s = m.val[p];
            s.resize(m.size(), false);
            s[need(w[2])] = true;
          }
        else if (w[0] == "nom" && w.size() == 3)
          {
            std::string n = w[1];
            if (!n.empty() && n[0] == '\'')
              n.erase(0, 1);
            Sym i = intern(n);
            std::size_t v = need(w[2]);
            auto [it, fresh] = m.assign.emplace(i, v);
            if (!fresh && it->second != v)
              throw ModelError(ln, "nominal '" + n + "' assigned twice");
          }
        else
          throw ModelError(ln, "cannot parse '" + line + "'");
      }
    for (auto& [p, s] : m.val)
      s.resize(m.size(), false);
    if (m.names.empty())
      throw ModelError(ln, "model has no worlds");
    return m;
  }

  std::string print_model(const KripkeModel& m)
  {
    std::ostringstream o;
    for (auto& n : m.names)
      o << "world " << n << "\n";
    for (std::size_t a = 0; a < m.size(); ++a)
      for (auto b : m.succ[a])
        o << "edge " << m.names[a] << " " << m.names[b] << "\n";
    std::vector<std::pair<std::string, Sym>> props;
    for (auto& [p, s] : m.val)
      props.emplace_back(sym_name(p), p);
    std::sort(props.begin(), props.end());
    for (auto& [name, p] : props)
      for (std::size_t w = 0; w < m.size(); ++w)
        if (m.val.at(p)[w])
          o << "prop " << name << " " << m.names[w] << "\n";
    std::vector<std::pair<std::string, std::size_t>> noms;
    for (auto& [i, w] : m.assign)
      noms.emplace_back(sym_name(i), w);
    std::sort(noms.begin(), noms.end());
    for (auto& [name, w] : noms)
      o << "nom " << name << " " << m.names[w] << "\n";
    return o.str();
  }

  // ---------------------------------------------------------------- denotational

  namespace
  {
    using Env = std::map<Sym, WorldSet>;

    bool subset(const WorldSet& a, const WorldSet& b)
    {
      for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] && !b[i])
          return false;
      return true;
    }

    std::size_t nominal_world(const KripkeModel& m, Sym i)
    {
      auto it = m.assign.find(i);
      if (it == m.assign.end())
        throw std::invalid_argument("unassigned nominal '" + sym_name(i) + "'");
      return it->second;
    }

    WorldSet eval(const KripkeModel& m, Formula f, Env& env)
    {
      const std::size_t n = m.size();
      switch (f.kind())
        {
        case Kind::Prop:
          {
            WorldSet s(n, false);
            if (auto e = env.find(f.sym()); e != env.end())
              s = e->second;
            else if (auto v = m.val.find(f.sym()); v != m.val.end())
              s = v->second;
            if (!f.positive())
              s.flip();
            return s;
          }
        case Kind::Nom:
          {
            WorldSet s(n, !f.positive());
            s[nominal_world(m, f.sym())] = f.positive();
            return s;
          }
        case Kind::Or:
        case Kind::And:
          {
            WorldSet a = eval(m, f.left(), env);
            WorldSet b = eval(m, f.right(), env);
            for (std::size_t w = 0; w < n; ++w)
              a[w] = f.kind() == Kind::Or ? (a[w] || b[w]) : (a[w] && b[w]);
            return a;
          }
        case Kind::Dia:
        case Kind::Box:
          {
            WorldSet b = eval(m, f.body(), env);
            WorldSet s(n, false);
            bool dia = f.kind() == Kind::Dia;
            for (std::size_t w = 0; w < n; ++w)
              {
                bool r = !dia;
                for (auto v : m.succ[w])
                  if (dia ? b[v] : !b[v])
                    {
                      r = dia;
                      break;
                    }
                s[w] = r;
              }
            return s;
          }
        case Kind::At:
          {
            std::size_t w = nominal_world(m, f.sym());
            WorldSet b = eval(m, f.body(), env);
            return WorldSet(n, static_cast<bool>(b[w]));
          }
        case Kind::Mu:
        case Kind::Nu:
          {
            bool mu = f.kind() == Kind::Mu;
            Sym x = f.sym();
            auto saved = env.find(x) == env.end() ? std::optional<WorldSet>()
                                                  : std::optional<WorldSet>(env[x]);
            WorldSet cur(n, !mu);
            std::size_t rounds = 0;
            for (;;)
              {
                env[x] = cur;
                WorldSet nxt = eval(m, f.body(), env);
                // monotone operator: the chain moves in one direction only
                if (mu ? !subset(cur, nxt) : !subset(nxt, cur))
                  throw std::logic_error("non-monotone fixpoint iteration");
                if (nxt == cur)
                  break;
                cur = std::move(nxt);
                if (++rounds > n)
                  throw std::logic_error("fixpoint did not stabilise");
              }
            if (saved)
              env[x] = *saved;
            else
              env.erase(x);
            return cur;
          }
        }
      return WorldSet(n, false);
    }
  }

  WorldSet eval_denotational(const KripkeModel& m, Formula f)
  {
    Env env;
    return eval(m, f, env);
  }

  // ---------------------------------------------------------------- games

  unsigned fixpoint_priority(const VariableOrder& o, Sym x)
  {
    std::size_t r = o.size() - o.index(x);
    return static_cast<unsigned>(o.is_nu(x) ? 2 * r : 2 * r + 1);
  }

  EvaluationGame build_evaluation_game(const KripkeModel& m, Formula rho)
  {
    EvaluationGame eg;
    eg.closure = closure(rho);
    eg.order = dependency_order(rho);
    eg.worlds = m.size();
    const std::size_t C = eg.closure.size();
    auto& g = eg.game;
    g.owner.assign(m.size() * C, Player::Ver);
    g.priority.assign(m.size() * C, 0);
    g.moves.assign(m.size() * C, {});
    for (std::size_t w = 0; w < m.size(); ++w)
      for (std::size_t c = 0; c < C; ++c)
        {
          Formula f = eg.closure.members[c];
          std::size_t p = w * C + c;
          auto pos = [&](std::size_t v, Formula h) { return v * C + eg.closure.index.at(h); };
          switch (f.kind())
            {
            case Kind::Prop:
              {
                auto it = m.val.find(f.sym());
                bool holds = it != m.val.end() && it->second[w];
                if (!f.positive())
                  holds = !holds;
                g.owner[p] = holds ? Player::Fal : Player::Ver;
                break;
              }
            case Kind::Nom:
              {
                bool holds = nominal_world(m, f.sym()) == w;
                if (!f.positive())
                  holds = !holds;
                g.owner[p] = holds ? Player::Fal : Player::Ver;
                break;
              }
            case Kind::Or:
            case Kind::And:
              g.owner[p] = f.kind() == Kind::Or ? Player::Ver : Player::Fal;
              g.moves[p] = {pos(w, f.left()), pos(w, f.right())};
              break;
            case Kind::Dia:
            case Kind::Box:
              g.owner[p] = f.kind() == Kind::Dia ? Player::Ver : Player::Fal;
              for (auto v : m.succ[w])
                g.moves[p].push_back(pos(v, f.body()));
              break;
            case Kind::At:
              g.moves[p] = {pos(nominal_world(m, f.sym()), f.body())};
              break;
            case Kind::Mu:
            case Kind::Nu:
              g.moves[p] = {pos(w, unfold(f))};
              g.priority[p] = fixpoint_priority(eg.order, f.sym());
              break;
            }
          // drop duplicate moves (e.g. p \/ p)
          auto& mv = g.moves[p];
          std::sort(mv.begin(), mv.end());
          mv.erase(std::unique(mv.begin(), mv.end()), mv.end());
        }
    return eg;
  }

  namespace
  {
    constexpr std::size_t NPOS = WinningCertificate::npos;

    struct Solver
    {
      const ParityGame& g;
      std::vector<std::vector<std::size_t>> pred;

      explicit Solver(const ParityGame& game) : g(game), pred(game.size())
      {
        for (std::size_t v = 0; v < g.size(); ++v)
          for (auto u : g.moves[v])
            pred[u].push_back(v);
      }

      // attractor of target for player a inside alive; records a's choices
      std::vector<bool> attr(const std::vector<bool>& alive,
                             const std::vector<bool>& target, int a,
                             std::vector<std::size_t>& strat) const
      {
        const std::size_t n = g.size();
        std::vector<bool> in(n, false);
        std::vector<std::size_t> cnt(n, 0), queue;
        for (std::size_t v = 0; v < n; ++v)
          if (alive[v])
            {
              for (auto u : g.moves[v])
                if (alive[u])
                  ++cnt[v];
              if (target[v])
                {
                  in[v] = true;
                  queue.push_back(v);
                }
            }
        for (std::size_t q = 0; q < queue.size(); ++q)
          {
            std::size_t u = queue[q];
            for (auto v : pred[u])
              {
                if (!alive[v] || in[v])
                  continue;
                if (static_cast<int>(g.owner[v]) == a)
                  {
                    in[v] = true;
                    strat[v] = u;
                    queue.push_back(v);
                  }
                else if (--cnt[v] == 0)
                  {
                    in[v] = true;
                    queue.push_back(v);
                  }
              }
          }
        return in;
      }

      struct Result
      {
        std::vector<bool> win[2];
        std::vector<std::size_t> strat;
      };

      Result solve(const std::vector<bool>& alive) const
      {
        const std::size_t n = g.size();
        Result r;
        r.win[0].assign(n, false);
        r.win[1].assign(n, false);
        r.strat.assign(n, NPOS);
        unsigned p = 0;
        bool any = false;
        for (std::size_t v = 0; v < n; ++v)
          if (alive[v])
            {
              p = any ? std::max(p, g.priority[v]) : g.priority[v];
              any = true;
            }
        if (!any)
          return r;
        int a = static_cast<int>(p % 2);
        std::vector<bool> top(n, false);
        for (std::size_t v = 0; v < n; ++v)
          top[v] = alive[v] && g.priority[v] == p;
        std::vector<std::size_t> sa(n, NPOS);
        std::vector<bool> A = attr(alive, top, a, sa);
        std::vector<bool> rest(n);
        for (std::size_t v = 0; v < n; ++v)
          rest[v] = alive[v] && !A[v];
        Result sub = solve(rest);
        bool opp_empty = std::none_of(sub.win[1 - a].begin(),
                                      sub.win[1 - a].end(), [](bool b) { return b; });
        if (opp_empty)
          {
            r.win[a] = alive;
            for (std::size_t v = 0; v < n; ++v)
              {
                if (!alive[v] || static_cast<int>(g.owner[v]) != a)
                  continue;
                if (rest[v])
                  r.strat[v] = sub.strat[v];
                else if (!top[v])
                  r.strat[v] = sa[v];
                else
                  for (auto u : g.moves[v])
                    if (alive[u])
                      {
                        r.strat[v] = u;
                        break;
                      }
              }
            return r;
          }
        std::vector<std::size_t> sb(n, NPOS);
        std::vector<bool> B = attr(alive, sub.win[1 - a], 1 - a, sb);
        std::vector<bool> rest2(n);
        for (std::size_t v = 0; v < n; ++v)
          rest2[v] = alive[v] && !B[v];
        Result sub2 = solve(rest2);
        for (std::size_t v = 0; v < n; ++v)
          {
            if (!alive[v])
              continue;
            if (B[v])
              {
                r.win[1 - a][v] = true;
                if (static_cast<int>(g.owner[v]) == 1 - a)
                  r.strat[v] = sub.win[1 - a][v] ? sub.strat[v] : sb[v];
              }
            else
              {
                int w = sub2.win[0][v] ? 0 : 1;
                r.win[w][v] = true;
                if (static_cast<int>(g.owner[v]) == w)
                  r.strat[v] = sub2.strat[v];
              }
          }
        return r;
      }
    };
  }

  WinningCertificate solve_parity(const ParityGame& g)
  {
    // make the game total: a stuck player moves to a sink it loses
    const std::size_t n = g.size();
    ParityGame t = g;
    const std::size_t lose_ver = n, lose_fal = n + 1;
    t.owner.push_back(Player::Ver);
    t.priority.push_back(1);
    t.moves.push_back({lose_ver});
    t.owner.push_back(Player::Ver);
    t.priority.push_back(0);
    t.moves.push_back({lose_fal});
    for (std::size_t v = 0; v < n; ++v)
      if (t.moves[v].empty())
        t.moves[v].push_back(g.owner[v] == Player::Ver ? lose_ver : lose_fal);
    Solver s(t);
    auto r = s.solve(std::vector<bool>(n + 2, true));
    WinningCertificate c;
    c.winner.resize(n);
    c.strategy.assign(n, NPOS);
    for (std::size_t v = 0; v < n; ++v)
      {
        c.winner[v] = r.win[0][v] ? Player::Ver : Player::Fal;
        if (g.owner[v] == c.winner[v])
          {
            assert(r.strat[v] != NPOS && r.strat[v] < n);
            c.strategy[v] = r.strat[v];
          }
      }
    return c;
  }

  namespace
  {
    // true iff some node of priority exactly p lies on a cycle of the graph
    // restricted to nodes with priority <= p
    bool bad_cycle(const ParityGame& g, const std::vector<std::vector<std::size_t>>& edges,
                   const std::vector<bool>& region, unsigned p)
    {
      const std::size_t n = g.size();
      std::vector<bool> keep(n);
      for (std::size_t v = 0; v < n; ++v)
        keep[v] = region[v] && g.priority[v] <= p;
      // iterative Tarjan
      std::vector<long> index(n, -1), low(n, 0);
      std::vector<bool> on(n, false);
      std::vector<std::size_t> stack;
      long counter = 0;
      for (std::size_t root = 0; root < n; ++root)
        {
          if (!keep[root] || index[root] >= 0)
            continue;
          std::vector<std::pair<std::size_t, std::size_t>> call{{root, 0}};
          index[root] = low[root] = counter++;
          stack.push_back(root);
          on[root] = true;
          while (!call.empty())
            {
              auto& [v, k] = call.back();
              if (k < edges[v].size())
                {
                  std::size_t u = edges[v][k++];
                  if (!keep[u])
                    continue;
                  if (index[u] < 0)
                    {
                      index[u] = low[u] = counter++;
                      stack.push_back(u);
                      on[u] = true;
                      call.emplace_back(u, 0);
                    }
                  else if (on[u])
                    low[v] = std::min(low[v], index[u]);
                  continue;
                }
              std::size_t vv = v;
              call.pop_back();
              if (!call.empty())
                low[call.back().first] = std::min(low[call.back().first], low[vv]);
              if (low[vv] == index[vv])
                {
                  std::vector<std::size_t> comp;
                  std::size_t u;
                  do
                    {
                      u = stack.back();
                      stack.pop_back();
                      on[u] = false;
                      comp.push_back(u);
                    }
                  while (u != vv);
                  bool cyclic = comp.size() > 1;
                  if (!cyclic)
                    for (auto w : edges[vv])
                      if (w == vv)
                        cyclic = true;
                  if (cyclic)
                    for (auto w : comp)
                      if (g.priority[w] == p)
                        return true;
                }
            }
        }
      return false;
    }
  }

  bool verify_certificate(const ParityGame& g, const WinningCertificate& c)
  {
    const std::size_t n = g.size();
    if (c.winner.size() != n || c.strategy.size() != n)
      return false;
    for (std::size_t v = 0; v < n; ++v)
      {
        Player w = c.winner[v];
        if (g.owner[v] == w)
          {
            std::size_t s = c.strategy[v];
            if (s == NPOS || s >= n)
              return false;
            if (std::find(g.moves[v].begin(), g.moves[v].end(), s) == g.moves[v].end())
              return false;
            if (c.winner[s] != w)
              return false;
          }
        else
          for (auto u : g.moves[v])
            if (c.winner[u] != w)
              return false;
      }
    for (int pl = 0; pl < 2; ++pl)
      {
        Player w = static_cast<Player>(pl);
        std::vector<bool> region(n);
        std::vector<std::vector<std::size_t>> edges(n);
        for (std::size_t v = 0; v < n; ++v)
          {
            region[v] = c.winner[v] == w;
            if (!region[v])
              continue;
            if (g.owner[v] == w)
              edges[v] = {c.strategy[v]};
            else
              edges[v] = g.moves[v];
          }
        std::set<unsigned> prios;
        for (std::size_t v = 0; v < n; ++v)
          if (region[v] && static_cast<int>(g.priority[v] % 2) != pl)
            prios.insert(g.priority[v]);
        for (unsigned p : prios)
          if (bad_cycle(g, edges, region, p))
            return false;
      }
    return true;
  }

  bool model_check(const KripkeModel& m, std::size_t w, Formula f)
  {
    if (w >= m.size())
      throw std::out_of_range("world index out of range");
    auto eg = build_evaluation_game(m, f);
    auto cert = solve_parity(eg.game);
    return cert.winner[eg.position(w, f)] == Player::Ver;
  }

  bool model_check(const KripkeModel& m, const std::string& w, Formula f)
  {
    return model_check(m, m.world(w), f);
  }
}

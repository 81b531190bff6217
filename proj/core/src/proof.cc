#include "hmu/proof.hh"

#include <algorithm>
#include <functional>
#include <sstream>

namespace hmu
{
  bool Proof::is_ancestor(std::size_t a, std::size_t n) const
  {
    for (std::size_t u = n; u != ProofNode::none; u = nodes[u].parent)
      if (u == a)
        return true;
    return false;
  }

  std::vector<std::size_t> Proof::path(std::size_t a, std::size_t n) const
  {
    std::vector<std::size_t> out;
    for (std::size_t u = n;; u = nodes[u].parent)
      {
        if (u == ProofNode::none)
          throw std::invalid_argument("path: not an ancestor");
        out.push_back(u);
        if (u == a)
          break;
      }
    std::reverse(out.begin(), out.end());
    return out;
  }

  std::size_t Proof::find(const std::string& id) const
  {
    for (std::size_t i = 0; i < nodes.size(); ++i)
      if (nodes[i].id == id)
        return i;
    return ProofNode::none;
  }

  ProofFormatError::ProofFormatError(std::size_t l, const std::string& msg)
    : std::runtime_error("line " + std::to_string(l) + ": " + msg), line(l)
  {
  }

  // ---------------------------------------------------------------- text format

  namespace
  {
    std::string tag_text(const Proof& p, const ProofNode& n)
    {
      const SafTag& t = *n.rule;
      std::string s = saf_name(t.kind);
      if (t.kind == SafKind::Rec || t.kind == SafKind::Reset)
        s += "(" + t.name.str() + ")";
      if (t.principal != SafTag::none)
        s += " " + std::to_string(t.principal);
      if (t.side != SafTag::none)
        s += " " + std::to_string(t.side);
      if (t.kind == SafKind::Mod)
        s += " '" + sym_name(t.nominal);
      s += " ->";
      for (std::size_t k = 0; k < n.children.size(); ++k)
        s += (k ? "," : " ") + p.nodes[n.children[k]].id;
      return s;
    }

    std::vector<std::string> split_ws(const std::string& s)
    {
      std::istringstream in(s);
      std::vector<std::string> out;
      for (std::string t; in >> t;)
        out.push_back(t);
      return out;
    }
  }

  std::string serialize(const Proof& p)
  {
    std::ostringstream o;
    o << "root " << p.rho.str() << "\n";
    o << "order";
    for (auto x : p.order.vars)
      o << " " << sym_name(x);
    o << "\n";
    for (auto& n : p.nodes)
      o << "node " << n.id << " " << n.label.str() << "\n";
    for (auto& n : p.nodes)
      if (n.rule)
        o << "rule " << n.id << " " << tag_text(p, n) << "\n";
    for (auto& [l, t] : p.backedges)
      o << "backedge " << p.nodes[l].id << " " << p.nodes[t].id << "\n";
    return o.str();
  }

  Proof deserialize(const std::string& text)
  {
    Proof p;
    std::istringstream in(text);
    std::string line;
    std::size_t ln = 0;
    bool have_root = false, have_order = false;
    std::map<std::string, std::size_t> ids;
    struct RuleLine { std::size_t line; std::string id; SafTag tag; std::vector<std::string> kids; };
    std::vector<RuleLine> rules;
    std::vector<std::tuple<std::size_t, std::string, std::string>> backs;
    std::vector<std::string> order_names;
    while (std::getline(in, line))
      {
        ++ln;
        if (auto h = line.find('#'); h != std::string::npos)
          line.resize(h);
        auto words = split_ws(line);
        if (words.empty())
          continue;
        const std::string& kw = words[0];
        std::string rest = line.substr(line.find(kw) + kw.size());
        try
          {
            if (kw == "root")
              {
                if (have_root)
                  throw ProofFormatError(ln, "second root line");
                p.rho = parse(rest);
                have_root = true;
              }
            else if (kw == "order")
              {
                order_names.assign(words.begin() + 1, words.end());
                have_order = true;
              }
            else if (kw == "node")
              {
                if (words.size() < 2)
                  throw ProofFormatError(ln, "node without id");
                const std::string& id = words[1];
                if (ids.count(id))
                  throw ProofFormatError(ln, "duplicate node id " + id);
                ProofNode n;
                n.id = id;
                n.label = parse_annotated(rest.substr(rest.find(id) + id.size()));
                ids[id] = p.nodes.size();
                p.nodes.push_back(std::move(n));
              }
            else if (kw == "rule")
              {
                auto arrow = rest.find("->");
                if (arrow == std::string::npos || words.size() < 3)
                  throw ProofFormatError(ln, "rule line needs '<id> <tag> ... -> <ids>'");
                auto head = split_ws(rest.substr(0, arrow));
                std::string kids_text = rest.substr(arrow + 2);
                for (auto& c : kids_text)
                  if (c == ',')
                    c = ' ';
                RuleLine r{ln, head[0], {}, split_ws(kids_text)};
                std::string tag = head.size() > 1 ? head[1] : "";
                std::string arg;
                if (auto lp = tag.find('('); lp != std::string::npos)
                  {
                    if (tag.back() != ')')
                      throw ProofFormatError(ln, "bad tag " + tag);
                    arg = tag.substr(lp + 1, tag.size() - lp - 2);
                    tag = tag.substr(0, lp);
                  }
                bool found = false;
                for (int k = 0; k <= static_cast<int>(SafKind::Thin); ++k)
                  if (tag == saf_name(static_cast<SafKind>(k)))
                    {
                      r.tag.kind = static_cast<SafKind>(k);
                      found = true;
                    }
                if (!found)
                  throw ProofFormatError(ln, "unknown rule tag '" + tag + "'");
                bool named = r.tag.kind == SafKind::Rec || r.tag.kind == SafKind::Reset;
                if (named != !arg.empty())
                  throw ProofFormatError(ln, "tag '" + tag + "' argument mismatch");
                if (named)
                  r.tag.name = parse_name(arg);
                for (std::size_t k = 2; k < head.size(); ++k)
                  {
                    const std::string& w = head[k];
                    if (w[0] == '\'')
                      r.tag.nominal = intern(w.substr(1));
                    else if (std::all_of(w.begin(), w.end(), ::isdigit))
                      {
                        std::size_t v = std::stoul(w);
                        if (r.tag.principal == SafTag::none)
                          r.tag.principal = v;
                        else if (r.tag.side == SafTag::none)
                          r.tag.side = v;
                        else
                          throw ProofFormatError(ln, "too many indices");
                      }
                    else
                      throw ProofFormatError(ln, "unexpected token '" + w + "'");
                  }
                rules.push_back(std::move(r));
              }
            else if (kw == "backedge")
              {
                if (words.size() != 3)
                  throw ProofFormatError(ln, "backedge needs two ids");
                backs.emplace_back(ln, words[1], words[2]);
              }
            else
              throw ProofFormatError(ln, "unknown keyword '" + kw + "'");
          }
        catch (const ProofFormatError&)
          {
            throw;
          }
        catch (const std::exception& e)
          {
            throw ProofFormatError(ln, e.what());
          }
      }
    if (!have_root || !have_order)
      throw ProofFormatError(ln, "missing root or order line");
    if (p.nodes.empty())
      throw ProofFormatError(ln, "no nodes");
    auto kinds = binders(p.rho);
    for (auto& n : order_names)
      {
        Sym x = intern(n);
        auto it = kinds.find(x);
        if (it == kinds.end())
          throw ProofFormatError(ln, "order names unbound variable " + n);
        if (p.order.contains(x))
          throw ProofFormatError(ln, "order repeats " + n);
        p.order.vars.push_back(x);
        p.order.nu.push_back(it->second == Kind::Nu);
      }
    auto lookup = [&](std::size_t l, const std::string& id) {
      auto it = ids.find(id);
      if (it == ids.end())
        throw ProofFormatError(l, "dangling node reference " + id);
      return it->second;
    };
    for (auto& r : rules)
      {
        std::size_t u = lookup(r.line, r.id);
        if (p.nodes[u].rule)
          throw ProofFormatError(r.line, "second rule for node " + r.id);
        p.nodes[u].rule = r.tag;
        for (auto& k : r.kids)
          {
            std::size_t c = lookup(r.line, k);
            if (p.nodes[c].parent != ProofNode::none || c == 0)
              throw ProofFormatError(r.line, "node " + k + " has two parents");
            p.nodes[c].parent = u;
            p.nodes[u].children.push_back(c);
          }
      }
    // every node must hang below nodes[0]
    for (std::size_t u = 1; u < p.nodes.size(); ++u)
      {
        std::size_t steps = 0;
        std::size_t v = u;
        while (v != 0 && v != ProofNode::none && steps++ <= p.nodes.size())
          v = p.nodes[v].parent;
        if (v != 0)
          throw ProofFormatError(ln, "node " + p.nodes[u].id + " is not below the root");
      }
    for (auto& [l, a, b] : backs)
      {
        std::size_t leaf = lookup(l, a), target = lookup(l, b);
        if (p.nodes[leaf].rule)
          throw ProofFormatError(l, "backedge from non-leaf " + a);
        if (leaf == target || !p.is_ancestor(target, leaf))
          throw ProofFormatError(l, "backedge target " + b + " is not a proper ancestor");
        if (p.backedges.count(leaf))
          throw ProofFormatError(l, "second backedge from " + a);
        p.backedges[leaf] = target;
      }
    return p;
  }

  bool structurally_equal(const Proof& a, const Proof& b)
  {
    if (a.rho != b.rho || a.order.vars != b.order.vars || a.order.nu != b.order.nu
        || a.nodes.size() != b.nodes.size() || a.backedges != b.backedges)
      return false;
    for (std::size_t i = 0; i < a.nodes.size(); ++i)
      {
        const auto& x = a.nodes[i];
        const auto& y = b.nodes[i];
        if (x.id != y.id || !(x.label == y.label) || x.rule != y.rule || x.children != y.children
            || x.parent != y.parent)
          return false;
      }
    return true;
  }

  // ---------------------------------------------------------------- checking

  std::optional<SafContext> proof_context(const Proof& p)
  {
    if (p.nodes.empty() || p.rho.null())
      return std::nullopt;
    const auto& root = p.nodes[0].label;
    if (!root.control.empty() || root.members.size() != 1 || !root.members[0].ann.empty())
      return std::nullopt;
    Formula f = root.members[0].f;
    if (f.kind() != Kind::At || f.body() != p.rho || nominals(p.rho).count(f.sym()))
      return std::nullopt;
    return SafContext{OriginalityContext::make(p.rho, f.sym()), p.order};
  }

  namespace
  {
    Verdict reject(const Proof& p, std::size_t n, std::string why)
    {
      return Verdict{false, p.nodes[n].id, std::move(why)};
    }

    std::optional<std::string> order_error(const Proof& p)
    {
      auto kinds = binders(p.rho);
      if (kinds.size() != p.order.size())
        return std::string("order does not list every bound variable");
      for (auto [x, y] : dependency_relation(p.rho))
        if (!p.order.less(x, y))
          return "order puts " + sym_name(y) + " before " + sym_name(x);
      return std::nullopt;
    }
  }

  Verdict check_proof(const Proof& p)
  {
    auto ctx = proof_context(p);
    if (!ctx)
      {
        if (p.nodes.empty())
          return Verdict{false, "", "empty proof"};
        return reject(p, 0, "root is not  |- @k rho ^ with k fresh for rho");
      }
    return check_proof(p, *ctx);
  }

  Verdict check_proof(const Proof& p, const SafContext& ctx)
  {
    if (p.nodes.empty())
      return Verdict{false, "", "empty proof"};
    auto own = proof_context(p);
    if (!own || own->orig.root != ctx.orig.root)
      return reject(p, 0, "root label does not match the root formula");
    try
      {
        if (auto e = order_error(p))
          return reject(p, 0, *e);
      }
    catch (const std::exception& e)
      {
        return reject(p, 0, e.what());
      }
    for (std::size_t u = 0; u < p.nodes.size(); ++u)
      {
        const auto& n = p.nodes[u];
        if (auto e = well_formed(n.label, ctx.order))
          return reject(p, u, *e);
        if (n.rule)
          {
            std::vector<AnnotatedSequent> prem;
            for (auto c : n.children)
              prem.push_back(p.nodes[c].label);
            std::optional<std::string> e;
            try
              {
                e = check_saf_instance(n.label, *n.rule, prem, ctx);
              }
            catch (const std::exception& ex)
              {
                e = ex.what();
              }
            if (e)
              return reject(p, u, *e);
            continue;
          }
        auto be = p.backedges.find(u);
        if (be == p.backedges.end())
          {
            if (!is_saf_axiom(n.label))
              return reject(p, u, "leaf is neither an axiom nor back-edged");
            continue;
          }
        if (!(p.nodes[be->second].label == n.label))
          return reject(p, u, "back edge to " + p.nodes[be->second].id + " with a different label");
        if (!goodness(p, u))
          return reject(p, u, "no good name on the cycle to " + p.nodes[be->second].id);
      }
    return Verdict{};
  }

  std::optional<Name> goodness(const Proof& p, std::size_t leaf)
  {
    auto it = p.backedges.find(leaf);
    if (it == p.backedges.end())
      throw std::invalid_argument("goodness: leaf has no back edge");
    auto path = p.path(it->second, leaf);
    std::optional<Name> best;
    for (auto& x : p.nodes[path.front()].label.control)
      {
        bool everywhere = std::all_of(path.begin(), path.end(), [&](std::size_t u) {
          return is_name_in(p.nodes[u].label.control, x);
        });
        if (!everywhere)
          continue;
        bool reset = false;
        for (std::size_t k = 0; k + 1 < path.size(); ++k)
          {
            const auto& r = p.nodes[path[k]].rule;
            if (r && r->kind == SafKind::Reset && r->name == x)
              reset = true;
          }
        if (!reset)
          continue;
        auto rank = [&](const Name& n) { return std::make_pair(p.order.index(n.var), n.index); };
        if (!best || rank(x) < rank(*best))
          best = x;
      }
    return best;
  }

  Unfolding unfold_proof(const Proof& p, std::size_t depth)
  {
    Unfolding u;
    u.nodes.push_back({0, 0, {}});
    for (std::size_t k = 0; k < u.nodes.size(); ++k)
      {
        if (u.nodes[k].depth >= depth)
          continue;
        std::size_t src = u.nodes[k].source;
        if (auto be = p.backedges.find(src); be != p.backedges.end())
          src = be->second;
        for (auto c : p.nodes[src].children)
          {
            u.nodes[k].children.push_back(u.nodes.size());
            u.nodes.push_back({c, u.nodes[k].depth + 1, {}});
          }
      }
    return u;
  }

  std::string print_unfolding(const Proof& p, const Unfolding& u)
  {
    std::string out;
    std::function<void(std::size_t)> walk = [&](std::size_t k) {
      const auto& n = u.nodes[k];
      out += std::string(2 * n.depth, ' ') + p.nodes[n.source].id + " "
             + p.nodes[n.source].label.str() + "\n";
      for (auto c : n.children)
        walk(c);
    };
    walk(0);
    return out;
  }

  bool lasso_trace_oracle(const Proof& p, std::size_t leaf)
  {
    auto it = p.backedges.find(leaf);
    if (it == p.backedges.end())
      throw std::invalid_argument("lasso_trace_oracle: leaf has no back edge");
    auto path = p.path(it->second, leaf);
    const std::size_t m = path.size() - 1;  // positions 0..m-1; leaf wraps to 0
    std::vector<std::vector<Formula>> forms(m);
    std::vector<std::map<Formula, std::size_t, Prec>> idx(m);
    std::size_t total = 0;
    std::vector<std::size_t> base(m);
    for (std::size_t k = 0; k < m; ++k)
      {
        base[k] = total;
        for (auto f : p.nodes[path[k]].label.plain())
          {
            idx[k][f] = forms[k].size();
            forms[k].push_back(f);
          }
        total += forms[k].size();
      }
    struct Edge { std::size_t to; std::optional<Sym> unfolded; };
    std::vector<std::vector<Edge>> g(total);
    for (std::size_t k = 0; k < m; ++k)
      {
        const auto& node = p.nodes[path[k]];
        std::size_t child = path[k + 1];
        std::size_t premise = static_cast<std::size_t>(
          std::find(node.children.begin(), node.children.end(), child) - node.children.begin());
        PlainSequent concl = node.label.plain();
        RuleTag tag = plain_tag(node.label, *node.rule);
        std::size_t nk = (k + 1) % m;
        for (auto from : forms[k])
          for (auto to : p.nodes[child].label.plain())
            {
              auto e = trace_step(concl, tag, premise, from, to);
              if (!e.ok)
                continue;
              auto t = idx[nk].find(to);
              if (t == idx[nk].end())
                continue;
              g[base[k] + idx[k][from]].push_back({base[nk] + t->second, e.unfolded});
            }
      }
    // for each nu variable x: drop edges unfolding higher-ranking variables,
    // then look for an x-unfolding edge inside a strongly connected component
    for (std::size_t xi = 0; xi < p.order.size(); ++xi)
      {
        if (!p.order.nu[xi])
          continue;
        auto allowed = [&](const Edge& e) {
          return !e.unfolded || p.order.index(*e.unfolded) >= xi;
        };
        std::vector<long> index(total, -1), low(total, 0), comp(total, -1);
        std::vector<bool> on(total, false);
        std::vector<std::size_t> stack;
        long counter = 0, ncomp = 0;
        std::function<void(std::size_t)> dfs = [&](std::size_t v) {
          index[v] = low[v] = counter++;
          stack.push_back(v);
          on[v] = true;
          for (auto& e : g[v])
            {
              if (!allowed(e))
                continue;
              if (index[e.to] < 0)
                {
                  dfs(e.to);
                  low[v] = std::min(low[v], low[e.to]);
                }
              else if (on[e.to])
                low[v] = std::min(low[v], index[e.to]);
            }
          if (low[v] == index[v])
            {
              std::size_t w;
              do
                {
                  w = stack.back();
                  stack.pop_back();
                  on[w] = false;
                  comp[w] = ncomp;
                }
              while (w != v);
              ++ncomp;
            }
        };
        for (std::size_t v = 0; v < total; ++v)
          if (index[v] < 0)
            dfs(v);
        for (std::size_t v = 0; v < total; ++v)
          for (auto& e : g[v])
            if (allowed(e) && e.unfolded && p.order.index(*e.unfolded) == xi
                && comp[v] == comp[e.to])
              return true;
      }
    return false;
  }
}

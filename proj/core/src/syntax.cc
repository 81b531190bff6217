#include "hmu/syntax.hh"

#include <algorithm>
#include <cctype>
#include <deque>
#include <memory>
#include <mutex>
#include <unordered_map>

namespace hmu
{
  // ---------------------------------------------------------------- symbols

  namespace
  {
    struct SymTable
    {
      std::mutex m;
      std::deque<std::string> names;
      std::unordered_map<std::string, Sym> ids;
    };

    SymTable& symtab()
    {
      static SymTable t;
      return t;
    }
  }

  Sym intern(std::string_view name)
  {
    auto& t = symtab();
    std::lock_guard<std::mutex> g(t.m);
    auto it = t.ids.find(std::string(name));
    if (it != t.ids.end())
      return it->second;
    Sym s = static_cast<Sym>(t.names.size());
    t.names.emplace_back(name);
    t.ids.emplace(std::string(name), s);
    return s;
  }

  const std::string& sym_name(Sym s)
  {
    auto& t = symtab();
    std::lock_guard<std::mutex> g(t.m);
    return t.names.at(s);
  }

  // ---------------------------------------------------------------- nodes

  struct Node
  {
    Kind kind;
    bool pos;
    Sym sym;
    const Node* a;
    const Node* b;
    std::size_t size;
    std::size_t hash;
    std::string str;
  };

  namespace
  {
    struct Key
    {
      Kind kind;
      bool pos;
      Sym sym;
      const Node* a;
      const Node* b;
      bool operator==(const Key& o) const
      {
        return kind == o.kind && pos == o.pos && sym == o.sym && a == o.a
               && b == o.b;
      }
    };

    struct KeyHash
    {
      std::size_t operator()(const Key& k) const
      {
        std::size_t h = static_cast<std::size_t>(k.kind) * 0x9e3779b97f4a7c15ULL;
        h ^= (k.pos ? 0x51ed27ULL : 0x2545fULL) + (h << 6) + (h >> 2);
        h ^= std::hash<Sym>()(k.sym) + 0x9e3779b9 + (h << 6) + (h >> 2);
        h ^= std::hash<const void*>()(k.a) + 0x9e3779b9 + (h << 6) + (h >> 2);
        h ^= std::hash<const void*>()(k.b) + 0x9e3779b9 + (h << 6) + (h >> 2);
        return h;
      }
    };

    bool wraps(Kind k)
    {
      return k == Kind::Or || k == Kind::And || k == Kind::Mu || k == Kind::Nu;
    }

    std::string atom(const Node* n)
    {
      if (wraps(n->kind))
        return "(" + n->str + ")";
      return n->str;
    }

    std::string render(Kind k, bool pos, Sym s, const Node* a, const Node* b)
    {
      switch (k)
        {
        case Kind::Prop:
          return (pos ? "" : "~") + sym_name(s);
        case Kind::Nom:
          return (pos ? "'" : "~'") + sym_name(s);
        case Kind::Or:
          return atom(a) + " \\/ " + atom(b);
        case Kind::And:
          return atom(a) + " /\\ " + atom(b);
        case Kind::Dia:
          return "<>" + atom(a);
        case Kind::Box:
          return "[]" + atom(a);
        case Kind::At:
          {
            if (a->kind == Kind::Nom)
              return "'" + sym_name(s) + (a->pos ? " == '" : " != '")
                     + sym_name(a->sym);
            std::string body = atom(a);
            return "@'" + sym_name(s) + (body[0] == '(' ? "" : " ") + body;
          }
        case Kind::Mu:
          return "mu " + sym_name(s) + ". " + a->str;
        case Kind::Nu:
          return "nu " + sym_name(s) + ". " + a->str;
        }
      return {};
    }
  }

  struct Factory
  {
    std::mutex m;
    std::unordered_map<Key, std::unique_ptr<Node>, KeyHash> table;

    static Factory& get()
    {
      static Factory f;
      return f;
    }

    static Formula make(Kind k, bool pos, Sym s, const Node* a, const Node* b)
    {
      Key key{k, pos, s, a, b};
      // render outside the lock: sym_name takes its own lock
      auto& f = get();
      {
        std::lock_guard<std::mutex> g(f.m);
        auto it = f.table.find(key);
        if (it != f.table.end())
          return Formula(it->second.get());
      }
      auto n = std::make_unique<Node>();
      n->kind = k;
      n->pos = pos;
      n->sym = s;
      n->a = a;
      n->b = b;
      n->size = 1 + (a ? a->size : 0) + (b ? b->size : 0);
      n->hash = KeyHash()(key);
      n->str = render(k, pos, s, a, b);
      std::lock_guard<std::mutex> g(f.m);
      auto [it, fresh] = f.table.emplace(key, std::move(n));
      (void)fresh;
      return Formula(it->second.get());
    }

    static const Node* node(Formula f) { return f.n_; }
  };

  Formula Formula::prop(Sym p, bool positive)
  {
    return Factory::make(Kind::Prop, positive, p, nullptr, nullptr);
  }
  Formula Formula::nom(Sym i, bool positive)
  {
    return Factory::make(Kind::Nom, positive, i, nullptr, nullptr);
  }
  Formula Formula::disj(Formula a, Formula b)
  {
    return Factory::make(Kind::Or, true, 0, a.n_, b.n_);
  }
  Formula Formula::conj(Formula a, Formula b)
  {
    return Factory::make(Kind::And, true, 0, a.n_, b.n_);
  }
  Formula Formula::dia(Formula a)
  {
    return Factory::make(Kind::Dia, true, 0, a.n_, nullptr);
  }
  Formula Formula::box(Formula a)
  {
    return Factory::make(Kind::Box, true, 0, a.n_, nullptr);
  }
  Formula Formula::at(Sym i, Formula a)
  {
    return Factory::make(Kind::At, true, i, a.n_, nullptr);
  }
  Formula Formula::mu(Sym x, Formula a)
  {
    return Factory::make(Kind::Mu, true, x, a.n_, nullptr);
  }
  Formula Formula::nu(Sym x, Formula a)
  {
    return Factory::make(Kind::Nu, true, x, a.n_, nullptr);
  }
  Formula Formula::fix(Kind k, Sym x, Formula a)
  {
    return k == Kind::Mu ? mu(x, a) : nu(x, a);
  }

  Kind Formula::kind() const { return n_->kind; }
  bool Formula::positive() const { return n_->pos; }
  Sym Formula::sym() const { return n_->sym; }
  Formula Formula::left() const { return Formula(n_->a); }
  Formula Formula::right() const { return Formula(n_->b); }
  Formula Formula::body() const { return Formula(n_->a); }
  const std::string& Formula::str() const { return n_->str; }
  std::size_t Formula::size() const { return n_->size; }
  std::size_t Formula::hash() const { return n_->hash; }

  SyntaxError::SyntaxError(std::size_t p, const std::string& msg)
    : std::runtime_error("at " + std::to_string(p) + ": " + msg), pos(p)
  {
  }

  // ---------------------------------------------------------------- parser

  namespace
  {
    enum class Tok
    {
      Ident, Nom, Tilde, Dia, Box, At, And, Or, LPar, RPar, Dot, Eq, Neq,
      Mu, Nu, End
    };

    struct Token
    {
      Tok t;
      std::string text;
      std::size_t pos;
    };

    bool ident_start(char c)
    {
      return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
    }
    bool ident_char(char c)
    {
      return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
    }

    std::vector<Token> lex(std::string_view s)
    {
      std::vector<Token> out;
      std::size_t i = 0;
      auto two = [&](const char* w) {
        return i + 1 < s.size() && s[i] == w[0] && s[i + 1] == w[1];
      };
      while (i < s.size())
        {
          char c = s[i];
          if (std::isspace(static_cast<unsigned char>(c)))
            {
              ++i;
              continue;
            }
          std::size_t p = i;
          if (ident_start(c))
            {
              while (i < s.size() && ident_char(s[i]))
                ++i;
              while (i < s.size() && s[i] == '\''
                     && !(i + 1 < s.size() && ident_char(s[i + 1])))
                ++i;
              std::string w(s.substr(p, i - p));
              Tok t = w == "mu" ? Tok::Mu : w == "nu" ? Tok::Nu : Tok::Ident;
              out.push_back({t, w, p});
              continue;
            }
          if (c == '\'')
            {
              ++i;
              if (i >= s.size() || !ident_start(s[i]))
                throw SyntaxError(p, "expected nominal name after '");
              while (i < s.size() && ident_char(s[i]))
                ++i;
              out.push_back({Tok::Nom, std::string(s.substr(p + 1, i - p - 1)), p});
              continue;
            }
          if (two("<>")) { out.push_back({Tok::Dia, "<>", p}); i += 2; continue; }
          if (two("[]")) { out.push_back({Tok::Box, "[]", p}); i += 2; continue; }
          if (two("/\\")) { out.push_back({Tok::And, "/\\", p}); i += 2; continue; }
          if (two("\\/")) { out.push_back({Tok::Or, "\\/", p}); i += 2; continue; }
          if (two("==")) { out.push_back({Tok::Eq, "==", p}); i += 2; continue; }
          if (two("!=")) { out.push_back({Tok::Neq, "!=", p}); i += 2; continue; }
          switch (c)
            {
            case '~': out.push_back({Tok::Tilde, "~", p}); break;
            case '@': out.push_back({Tok::At, "@", p}); break;
            case '(': out.push_back({Tok::LPar, "(", p}); break;
            case ')': out.push_back({Tok::RPar, ")", p}); break;
            case '.': out.push_back({Tok::Dot, ".", p}); break;
            default:
              throw SyntaxError(p, std::string("unexpected character '") + c + "'");
            }
          ++i;
        }
      out.push_back({Tok::End, "", s.size()});
      return out;
    }

    struct Parser
    {
      std::vector<Token> toks;
      std::size_t k = 0;

      const Token& peek() const { return toks[k]; }
      const Token& next() { return toks[k++]; }
      void expect(Tok t, const char* what)
      {
        if (peek().t != t)
          throw SyntaxError(peek().pos, std::string("expected ") + what);
        ++k;
      }

      Formula disjunction()
      {
        Formula f = conjunction();
        while (peek().t == Tok::Or)
          {
            next();
            f = Formula::disj(f, conjunction());
          }
        return f;
      }

      Formula conjunction()
      {
        Formula f = unary();
        while (peek().t == Tok::And)
          {
            next();
            f = Formula::conj(f, unary());
          }
        return f;
      }

      Formula unary()
      {
        const Token& t = peek();
        switch (t.t)
          {
          case Tok::Tilde:
            {
              next();
              const Token& a = next();
              if (a.t == Tok::Ident)
                return Formula::prop(intern(a.text), false);
              if (a.t == Tok::Nom)
                return Formula::nom(intern(a.text), false);
              throw SyntaxError(a.pos, "negation applies to literals only");
            }
          case Tok::Dia:
            next();
            return Formula::dia(unary());
          case Tok::Box:
            next();
            return Formula::box(unary());
          case Tok::At:
            {
              next();
              const Token& n = next();
              if (n.t != Tok::Nom)
                throw SyntaxError(n.pos, "expected nominal after @");
              Sym i = intern(n.text);
              return Formula::at(i, unary());
            }
          case Tok::Mu:
          case Tok::Nu:
            {
              next();
              const Token& v = next();
              if (v.t != Tok::Ident)
                throw SyntaxError(v.pos, "expected variable after binder");
              expect(Tok::Dot, "'.'");
              Formula b = disjunction();
              return Formula::fix(t.t == Tok::Mu ? Kind::Mu : Kind::Nu,
                                  intern(v.text), b);
            }
          default:
            return primary();
          }
      }

      Formula primary()
      {
        const Token& t = next();
        switch (t.t)
          {
          case Tok::Ident:
            return Formula::prop(intern(t.text));
          case Tok::Nom:
            {
              if (peek().t == Tok::Eq || peek().t == Tok::Neq)
                {
                  bool eq = next().t == Tok::Eq;
                  const Token& o = next();
                  if (o.t != Tok::Nom)
                    throw SyntaxError(o.pos, "expected nominal after ==/!=");
                  return Formula::at(intern(t.text),
                                     Formula::nom(intern(o.text), eq));
                }
              return Formula::nom(intern(t.text));
            }
          case Tok::LPar:
            {
              Formula f = disjunction();
              expect(Tok::RPar, "')'");
              return f;
            }
          case Tok::End:
            throw SyntaxError(t.pos, "unexpected end of input");
          default:
            throw SyntaxError(t.pos, "unexpected '" + t.text + "'");
          }
      }
    };
  }

  Formula parse(std::string_view text, ParseOptions opt)
  {
    Parser p{lex(text)};
    Formula f = p.disjunction();
    if (p.peek().t != Tok::End)
      throw SyntaxError(p.peek().pos, "trailing input '" + p.peek().text + "'");
    if (opt.rename)
      f = make_well_named(f);
    if (auto e = well_named_error(f, !opt.allow_rebinding))
      throw SyntaxError(0, *e);
    if (auto e = guardedness_error(f))
      throw SyntaxError(0, *e);
    return f;
  }

  // ---------------------------------------------------------------- queries

  namespace
  {
    void free_rec(Formula f, std::vector<Sym>& bound, std::set<Sym>& out)
    {
      switch (f.kind())
        {
        case Kind::Prop:
          if (std::find(bound.begin(), bound.end(), f.sym()) == bound.end())
            out.insert(f.sym());
          return;
        case Kind::Nom:
          return;
        case Kind::Or:
        case Kind::And:
          free_rec(f.left(), bound, out);
          free_rec(f.right(), bound, out);
          return;
        case Kind::Dia:
        case Kind::Box:
        case Kind::At:
          free_rec(f.body(), bound, out);
          return;
        case Kind::Mu:
        case Kind::Nu:
          bound.push_back(f.sym());
          free_rec(f.body(), bound, out);
          bound.pop_back();
          return;
        }
    }

    template <class Fn>
    void visit(Formula f, Fn&& fn)
    {
      fn(f);
      switch (f.kind())
        {
        case Kind::Or:
        case Kind::And:
          visit(f.left(), fn);
          visit(f.right(), fn);
          break;
        case Kind::Dia:
        case Kind::Box:
        case Kind::At:
        case Kind::Mu:
        case Kind::Nu:
          visit(f.body(), fn);
          break;
        default:
          break;
        }
    }
  }

  std::set<Sym> free_vars(Formula f)
  {
    std::vector<Sym> bound;
    std::set<Sym> out;
    free_rec(f, bound, out);
    return out;
  }

  std::set<Sym> nominals(Formula f)
  {
    std::set<Sym> out;
    visit(f, [&](Formula g) {
      if (g.kind() == Kind::Nom || g.kind() == Kind::At)
        out.insert(g.sym());
    });
    return out;
  }

  std::map<Sym, Kind> binders(Formula f)
  {
    std::map<Sym, Kind> out;
    visit(f, [&](Formula g) {
      if (!g.is_fix())
        return;
      auto [it, fresh] = out.emplace(g.sym(), g.kind());
      if (!fresh && it->second != g.kind())
        throw std::invalid_argument("variable " + sym_name(g.sym())
                                    + " bound by both mu and nu");
    });
    return out;
  }

  namespace
  {
    // occurrence of x below f; guarded = some modality between binder and here
    std::optional<std::string> guard_rec(Formula f, Sym x, bool guarded)
    {
      switch (f.kind())
        {
        case Kind::Prop:
          if (f.sym() == x && !guarded)
            return "unguarded occurrence of " + sym_name(x);
          return std::nullopt;
        case Kind::Nom:
          return std::nullopt;
        case Kind::Or:
        case Kind::And:
          if (auto e = guard_rec(f.left(), x, guarded))
            return e;
          return guard_rec(f.right(), x, guarded);
        case Kind::Dia:
        case Kind::Box:
          return guard_rec(f.body(), x, true);
        case Kind::At:
          return guard_rec(f.body(), x, guarded);
        case Kind::Mu:
        case Kind::Nu:
          if (f.sym() == x)
            return std::nullopt;
          return guard_rec(f.body(), x, guarded);
        }
      return std::nullopt;
    }
  }

  std::optional<std::string> guardedness_error(Formula f)
  {
    std::optional<std::string> err;
    visit(f, [&](Formula g) {
      if (!err && g.is_fix())
        err = guard_rec(g.body(), g.sym(), false);
    });
    return err;
  }

  namespace
  {
    std::optional<std::string> scope_rec(Formula f, std::vector<Sym>& scope)
    {
      auto in_scope = [&](Sym s) {
        return std::find(scope.begin(), scope.end(), s) != scope.end();
      };
      switch (f.kind())
        {
        case Kind::Prop:
          if (!f.positive() && in_scope(f.sym()))
            return "bound variable " + sym_name(f.sym()) + " under negation";
          return std::nullopt;
        case Kind::Nom:
          return std::nullopt;
        case Kind::Or:
        case Kind::And:
          if (auto e = scope_rec(f.left(), scope))
            return e;
          return scope_rec(f.right(), scope);
        case Kind::Dia:
        case Kind::Box:
        case Kind::At:
          return scope_rec(f.body(), scope);
        case Kind::Mu:
        case Kind::Nu:
          {
            scope.push_back(f.sym());
            auto e = scope_rec(f.body(), scope);
            scope.pop_back();
            return e;
          }
        }
      return std::nullopt;
    }
  }

  std::optional<std::string> well_named_error(Formula f, bool strict)
  {
    std::map<Sym, Kind> kinds;
    std::map<Sym, int> count;
    std::optional<std::string> err;
    visit(f, [&](Formula g) {
      if (!g.is_fix())
        return;
      ++count[g.sym()];
      auto [it, fresh] = kinds.emplace(g.sym(), g.kind());
      if (!fresh && it->second != g.kind() && !err)
        err = "variable " + sym_name(g.sym()) + " bound by both mu and nu";
    });
    if (err)
      return err;
    for (Sym x : free_vars(f))
      if (kinds.count(x))
        return "variable " + sym_name(x) + " occurs both free and bound";
    if (strict)
      for (auto& [x, n] : count)
        if (n > 1)
          return "variable " + sym_name(x) + " bound twice";
    std::vector<Sym> scope;
    if (auto e = scope_rec(f, scope))
      return e;
    // transitive closure of the dependency relation must be irreflexive
    std::map<Sym, std::set<Sym>> above;
    for (auto& [x, y] : dependency_relation(f))
      above[x].insert(y);
    for (auto& [x, ys] : above)
      {
        std::set<Sym> seen;
        std::vector<Sym> todo(ys.begin(), ys.end());
        while (!todo.empty())
          {
            Sym y = todo.back();
            todo.pop_back();
            if (y == x)
              return "variable " + sym_name(x) + " depends on itself";
            if (!seen.insert(y).second)
              continue;
            if (auto it = above.find(y); it != above.end())
              todo.insert(todo.end(), it->second.begin(), it->second.end());
          }
      }
    return std::nullopt;
  }

  // ---------------------------------------------------------------- transforms

  namespace
  {
    Formula negate_rec(Formula f, std::vector<Sym>& bound)
    {
      switch (f.kind())
        {
        case Kind::Prop:
          if (std::find(bound.begin(), bound.end(), f.sym()) != bound.end())
            return f;
          return Formula::prop(f.sym(), !f.positive());
        case Kind::Nom:
          return Formula::nom(f.sym(), !f.positive());
        case Kind::Or:
          return Formula::conj(negate_rec(f.left(), bound),
                               negate_rec(f.right(), bound));
        case Kind::And:
          return Formula::disj(negate_rec(f.left(), bound),
                               negate_rec(f.right(), bound));
        case Kind::Dia:
          return Formula::box(negate_rec(f.body(), bound));
        case Kind::Box:
          return Formula::dia(negate_rec(f.body(), bound));
        case Kind::At:
          return Formula::at(f.sym(), negate_rec(f.body(), bound));
        case Kind::Mu:
        case Kind::Nu:
          {
            bound.push_back(f.sym());
            Formula b = negate_rec(f.body(), bound);
            bound.pop_back();
            return Formula::fix(f.kind() == Kind::Mu ? Kind::Nu : Kind::Mu,
                                f.sym(), b);
          }
        }
      return f;
    }
  }

  Formula negate(Formula f)
  {
    std::vector<Sym> bound;
    return negate_rec(f, bound);
  }

  Formula substitute(Formula f, Sym x, Formula g)
  {
    switch (f.kind())
      {
      case Kind::Prop:
        return f.sym() == x ? g : f;
      case Kind::Nom:
        return f;
      case Kind::Or:
        return Formula::disj(substitute(f.left(), x, g),
                             substitute(f.right(), x, g));
      case Kind::And:
        return Formula::conj(substitute(f.left(), x, g),
                             substitute(f.right(), x, g));
      case Kind::Dia:
        return Formula::dia(substitute(f.body(), x, g));
      case Kind::Box:
        return Formula::box(substitute(f.body(), x, g));
      case Kind::At:
        return Formula::at(f.sym(), substitute(f.body(), x, g));
      case Kind::Mu:
      case Kind::Nu:
        if (f.sym() == x)
          return f;
        return Formula::fix(f.kind(), f.sym(), substitute(f.body(), x, g));
      }
    return f;
  }

  Formula unfold(Formula f)
  {
    if (!f.is_fix())
      throw std::invalid_argument("unfold: not a fixpoint formula: " + f.str());
    return substitute(f.body(), f.sym(), f);
  }

  namespace
  {
    struct Renamer
    {
      std::set<Sym> taken;  // free symbols and every name handed out
      std::map<Sym, Sym> scope;

      Sym fresh_for(Sym x)
      {
        if (!taken.count(x))
          {
            taken.insert(x);
            return x;
          }
        std::string base = sym_name(x);
        for (;;)
          {
            base += "'";
            Sym s = intern(base);
            if (!taken.count(s))
              {
                taken.insert(s);
                return s;
              }
          }
      }

      Formula run(Formula f)
      {
        switch (f.kind())
          {
          case Kind::Prop:
            {
              auto it = scope.find(f.sym());
              return it == scope.end() ? f
                                       : Formula::prop(it->second, f.positive());
            }
          case Kind::Nom:
            return f;
          case Kind::Or:
            {
              Formula a = run(f.left());
              return Formula::disj(a, run(f.right()));
            }
          case Kind::And:
            {
              Formula a = run(f.left());
              return Formula::conj(a, run(f.right()));
            }
          case Kind::Dia:
            return Formula::dia(run(f.body()));
          case Kind::Box:
            return Formula::box(run(f.body()));
          case Kind::At:
            return Formula::at(f.sym(), run(f.body()));
          case Kind::Mu:
          case Kind::Nu:
            {
              Sym x = f.sym();
              Sym y = fresh_for(x);
              auto saved = scope.find(x) == scope.end()
                             ? std::optional<Sym>()
                             : std::optional<Sym>(scope[x]);
              scope[x] = y;
              Formula b = run(f.body());
              if (saved)
                scope[x] = *saved;
              else
                scope.erase(x);
              return Formula::fix(f.kind(), y, b);
            }
          }
        return f;
      }
    };
  }

  namespace
  {
    // replace every nested fixpoint by its variable
    Formula fold(Formula f)
    {
      switch (f.kind())
        {
        case Kind::Prop:
        case Kind::Nom:
          return f;
        case Kind::Or:
          return Formula::disj(fold(f.left()), fold(f.right()));
        case Kind::And:
          return Formula::conj(fold(f.left()), fold(f.right()));
        case Kind::Dia:
          return Formula::dia(fold(f.body()));
        case Kind::Box:
          return Formula::box(fold(f.body()));
        case Kind::At:
          return Formula::at(f.sym(), fold(f.body()));
        case Kind::Mu:
        case Kind::Nu:
          return Formula::prop(f.sym());
        }
      return f;
    }

    // every binder of a variable is a copy of one fixpoint, as after unfolding
    bool copies_only(Formula f)
    {
      std::map<Sym, Formula> body;
      bool ok = true;
      visit(f, [&](Formula g) {
        if (!g.is_fix())
          return;
        Formula b = fold(g.body());
        auto [it, fresh] = body.emplace(g.sym(), b);
        if (!fresh && it->second != b)
          ok = false;
      });
      return ok;
    }
  }

  Formula make_well_named(Formula f)
  {
    if (!well_named_error(f, false) && copies_only(f))
      return f;
    Renamer r;
    r.taken = free_vars(f);
    // nominal names live in a separate namespace in the surface syntax but
    // share the symbol table; avoid handing one out as a variable anyway
    for (Sym i : nominals(f))
      r.taken.insert(i);
    return r.run(f);
  }

  // ---------------------------------------------------------------- orders

  bool VariableOrder::contains(Sym x) const
  {
    return std::find(vars.begin(), vars.end(), x) != vars.end();
  }

  std::size_t VariableOrder::index(Sym x) const
  {
    auto it = std::find(vars.begin(), vars.end(), x);
    if (it == vars.end())
      throw std::out_of_range("variable " + sym_name(x) + " not in order");
    return static_cast<std::size_t>(it - vars.begin());
  }

  std::set<std::pair<Sym, Sym>> dependency_relation(Formula f)
  {
    std::set<Sym> bound;
    visit(f, [&](Formula g) {
      if (g.is_fix())
        bound.insert(g.sym());
    });
    std::set<std::pair<Sym, Sym>> rel;
    visit(f, [&](Formula g) {
      if (!g.is_fix())
        return;
      for (Sym x : free_vars(g))
        if (bound.count(x))
          rel.emplace(x, g.sym());
    });
    return rel;
  }

  VariableOrder dependency_order(Formula f)
  {
    if (auto e = well_named_error(f, false))
      throw std::invalid_argument("dependency_order: " + *e);
    std::vector<Sym> first;
    std::map<Sym, Kind> kind;
    visit(f, [&](Formula g) {
      if (g.is_fix() && !kind.count(g.sym()))
        {
          first.push_back(g.sym());
          kind[g.sym()] = g.kind();
        }
    });
    auto rel = dependency_relation(f);
    for (auto& [x, y] : rel)
      if (x == y)
        throw std::invalid_argument("dependency_order: " + sym_name(x)
                                    + " depends on itself");
    VariableOrder o;
    std::set<Sym> done;
    while (o.vars.size() < first.size())
      {
        bool progress = false;
        for (Sym y : first)
          {
            if (done.count(y))
              continue;
            bool ready = true;
            for (auto& [a, b] : rel)
              if (b == y && !done.count(a))
                ready = false;
            if (ready)
              {
                o.vars.push_back(y);
                o.nu.push_back(kind[y] == Kind::Nu);
                done.insert(y);
                progress = true;
                break;
              }
          }
        if (!progress)
          throw std::invalid_argument("dependency_order: cyclic dependency");
      }
    return o;
  }

  Closure closure(Formula f)
  {
    Closure c;
    std::vector<Formula> work{f};
    auto add = [&](Formula g) {
      if (c.index.emplace(g, c.members.size()).second)
        {
          c.members.push_back(g);
          work.push_back(g);
        }
    };
    work.clear();
    add(f);
    for (std::size_t k = 0; k < c.members.size(); ++k)
      {
        Formula g = c.members[k];
        switch (g.kind())
          {
          case Kind::Or:
          case Kind::And:
            add(g.left());
            add(g.right());
            break;
          case Kind::Dia:
          case Kind::Box:
          case Kind::At:
            add(g.body());
            break;
          case Kind::Mu:
          case Kind::Nu:
            add(unfold(g));
            break;
          default:
            break;
          }
      }
    return c;
  }
}

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace hmu
{
  /// \brief Interned identifier (proposition, fixpoint variable or nominal).
  using Sym = std::uint32_t;

  Sym intern(std::string_view name);
  const std::string& sym_name(Sym s);

  enum class Kind : std::uint8_t { Prop, Nom, Or, And, Dia, Box, At, Mu, Nu };

  struct Node;

  /// \brief Hash-consed formula handle in negation normal form.
  ///
  /// Two handles are equal iff the formulas are structurally equal.
  /// Bound fixpoint variables are Prop nodes; whether a Prop is bound
  /// depends on the enclosing binders.
  class Formula
  {
  public:
    Formula() = default;

    static Formula prop(Sym p, bool positive = true);
    static Formula nom(Sym i, bool positive = true);
    static Formula disj(Formula a, Formula b);
    static Formula conj(Formula a, Formula b);
    static Formula dia(Formula a);
    static Formula box(Formula a);
    static Formula at(Sym i, Formula a);
    static Formula mu(Sym x, Formula a);
    static Formula nu(Sym x, Formula a);
    static Formula fix(Kind k, Sym x, Formula a);

    Kind kind() const;
    bool positive() const;          ///< literals only
    Sym sym() const;                ///< literal symbol, @-nominal, binder variable
    Formula left() const;
    Formula right() const;
    Formula body() const;           ///< Dia, Box, At, Mu, Nu

    bool is_literal() const { return kind() == Kind::Prop || kind() == Kind::Nom; }
    bool is_fix() const { return kind() == Kind::Mu || kind() == Kind::Nu; }
    bool null() const { return n_ == nullptr; }

    /// canonical printed form; the global order on formulas compares these
    const std::string& str() const;
    /// number of symbols (tree nodes)
    std::size_t size() const;
    std::size_t hash() const;

    bool operator==(const Formula& o) const { return n_ == o.n_; }
    bool operator!=(const Formula& o) const { return n_ != o.n_; }

  private:
    explicit Formula(const Node* n) : n_(n) {}
    const Node* n_ = nullptr;
    friend struct Factory;
  };

  /// \brief The fixed order on formulas: lexicographic on str().
  struct Prec
  {
    bool operator()(const Formula& a, const Formula& b) const
    {
      return a != b && a.str() < b.str();
    }
  };

  using FormulaSet = std::set<Formula, Prec>;

  struct SyntaxError : std::runtime_error
  {
    SyntaxError(std::size_t pos, const std::string& msg);
    std::size_t pos;
  };

  struct ParseOptions
  {
    /// rename clashing bound variables instead of rejecting them
    bool rename = false;
    /// accept several binders of the same variable (unfolded formulas)
    bool allow_rebinding = false;
  };

  /// Grammar: p ~p 'i ~'i 'i == 'j 'i != 'j @'i F <>F []F F /\ F F \/ F
  /// mu x. F  nu x. F ( F ).  Binders extend as far right as possible.
  Formula parse(std::string_view text, ParseOptions opt = {});

  /// Same as str(); kept for symmetry with parse.
  inline const std::string& print(Formula f) { return f.str(); }

  std::set<Sym> free_vars(Formula f);
  std::set<Sym> nominals(Formula f);
  /// bound variable -> binder kind (Mu or Nu); throws if bound by both
  std::map<Sym, Kind> binders(Formula f);

  /// guardedness violation description, or nullopt
  std::optional<std::string> guardedness_error(Formula f);
  /// local well-namedness violation, or nullopt.  strict also rejects a
  /// variable bound twice.
  std::optional<std::string> well_named_error(Formula f, bool strict);

  Formula negate(Formula f);
  Formula make_well_named(Formula f);
  /// substitute free occurrences of x by g
  Formula substitute(Formula f, Sym x, Formula g);
  Formula unfold(Formula f);

  /// \brief Linear order on the bound variables of a root formula.
  ///
  /// vars[0] is the highest-ranking (<-minimal) variable.
  struct VariableOrder
  {
    std::vector<Sym> vars;
    std::vector<bool> nu;

    std::size_t size() const { return vars.size(); }
    bool contains(Sym x) const;
    std::size_t index(Sym x) const;  ///< throws if absent
    bool is_nu(Sym x) const { return nu[index(x)]; }
    bool less(Sym x, Sym y) const { return index(x) < index(y); }
  };

  VariableOrder dependency_order(Formula f);
  /// pairs (x, y) with x <_f y
  std::set<std::pair<Sym, Sym>> dependency_relation(Formula f);

  struct Closure
  {
    std::vector<Formula> members;
    std::map<Formula, std::size_t, Prec> index;

    std::size_t size() const { return members.size(); }
    bool contains(Formula f) const { return index.count(f) != 0; }
  };

  Closure closure(Formula f);
}

template <>
struct std::hash<hmu::Formula>
{
  std::size_t operator()(const hmu::Formula& f) const { return f.hash(); }
};

#pragma once

#include "hmu/calculus.hh"

#include <compare>
#include <optional>
#include <string>
#include <vector>

namespace hmu
{
  /// \brief The index-th name of a fixpoint variable.
  struct Name
  {
    Sym var = 0;
    unsigned index = 0;

    bool operator==(const Name&) const = default;
    std::string str() const;  ///< x.0
  };

  /// canonical comparison used for sorting members (by variable text, then index)
  bool name_less(const Name& a, const Name& b);

  using NameWord = std::vector<Name>;

  std::string print_word(const NameWord& w);
  /// whitespace separated x.0 tokens; throws std::invalid_argument
  NameWord parse_word(std::string_view text);
  Name parse_name(std::string_view text);

  struct AnnFormula
  {
    Formula f;
    NameWord ann;

    bool operator==(const AnnFormula& o) const { return f == o.f && ann == o.ann; }
  };

  bool ann_formula_less(const AnnFormula& a, const AnnFormula& b);

  /// \brief a |- @i phi ^ b, ...
  ///
  /// Members are kept sorted and unique, so indices into members are stable
  /// for a given sequent value.
  struct AnnotatedSequent
  {
    NameWord control;
    std::vector<AnnFormula> members;

    AnnotatedSequent() = default;
    AnnotatedSequent(NameWord c, std::vector<AnnFormula> m);

    void normalize();
    PlainSequent plain() const;
    bool contains(const AnnFormula& m) const;
    std::string str() const;

    bool operator==(const AnnotatedSequent& o) const
    {
      return control == o.control && members == o.members;
    }
  };

  /// throws std::invalid_argument; formulas may rebind variables
  AnnotatedSequent parse_annotated(std::string_view text);

  enum class SafKind : std::uint8_t
  {
    And, Or, Eq, Com, Glob, Mod, Eta, Rec, Reset, Exp, Weak, Thin
  };

  const char* saf_name(SafKind k);

  struct SafTag
  {
    static constexpr std::size_t none = static_cast<std::size_t>(-1);
    SafKind kind = SafKind::Weak;
    std::size_t principal = none;  ///< index into the conclusion members
    std::size_t side = none;       ///< Eq side; Thin kept member
    Sym nominal = 0;               ///< Mod
    Name name;                     ///< Rec, Reset

    bool operator==(const SafTag&) const = default;
  };

  /// Rec/Reset/Exp/Thin/Weak map to the plain rule whose trace steps they allow
  RuleTag plain_tag(const AnnotatedSequent& concl, const SafTag& t);

  struct SafContext
  {
    OriginalityContext orig;
    VariableOrder order;
  };

  /// keep names of variables <= x
  NameWord restrict(const NameWord& a, Sym x, const VariableOrder& o);
  /// no name of a variable > x
  bool leq_var(const NameWord& a, Sym x, const VariableOrder& o);
  bool subseq(const NameWord& a, const NameWord& b);
  /// the greatest common subsequence w.r.t. subseq, if it exists
  std::optional<NameWord> meet(const NameWord& a, const NameWord& b);
  /// b <_a c
  bool ann_less(const NameWord& b, const NameWord& c, const NameWord& a, const VariableOrder& o);

  bool is_name_in(const NameWord& a, const Name& x);
  /// annotations non-repeating, non-decreasing and below the control
  std::optional<std::string> well_formed(const AnnotatedSequent& s, const VariableOrder& o);

  PlainSequent names_theory(const AnnotatedSequent& s, const Name& x);

  /// axiom with empty control and annotations
  bool is_saf_axiom(const AnnotatedSequent& s);

  std::optional<std::string> check_saf_instance(const AnnotatedSequent& concl, const SafTag& t,
                                                const std::vector<AnnotatedSequent>& premises,
                                                const SafContext& ctx);
  /// Thinning with an explicit choice of removed/kept members
  std::optional<std::string> check_thinning(const AnnotatedSequent& concl, std::size_t removed,
                                            std::size_t kept, const AnnotatedSequent& premise,
                                            const VariableOrder& o);
  /// Thinning for some choice of members
  std::optional<std::string> check_thinning(const AnnotatedSequent& concl,
                                            const AnnotatedSequent& premise,
                                            const VariableOrder& o);

  /// remove every control name not used by an annotation
  AnnotatedSequent trim_control(const AnnotatedSequent& s);
}

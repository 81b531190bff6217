#pragma once

#include "hmu/syntax.hh"

#include <optional>
#include <set>
#include <string>
#include <vector>

namespace hmu
{
  /// Members all have the shape @i phi.
  using PlainSequent = FormulaSet;

  /// declaration order is the tie-break order between rule instances
  enum class RuleKind : std::uint8_t { And, Or, Glob, Eta, Eq, Com, Mod, Weak };

  const char* rule_name(RuleKind k);

  struct RuleTag
  {
    RuleKind kind = RuleKind::Weak;
    Formula principal;  ///< null for Weak
    Formula side;       ///< Eq only: i != j
    Sym nominal = 0;    ///< Mod only: the introduced nominal
  };

  /// The root @r rho and its nominals.
  struct OriginalityContext
  {
    Formula root;        ///< @r rho
    std::set<Sym> original;

    static OriginalityContext make(Formula rho, Sym r);
    bool is_original(Sym i) const { return original.count(i) != 0; }
    /// @j psi with j original
    bool is_ground(Formula f) const;
  };

  /// reserved root nominal and fresh nominals
  Sym root_nominal();
  Sym fresh_nominal(unsigned k);

  inline Formula neq(Sym i, Sym j) { return Formula::at(i, Formula::nom(j, false)); }
  /// @i ~j -> (i, j)
  std::optional<std::pair<Sym, Sym>> as_neq(Formula f);

  /// every nominal occurring in the sequent, prefixes and bodies
  std::set<Sym> sequent_nominals(const PlainSequent& s);
  std::string print_sequent(const PlainSequent& s);

  bool is_axiom(const PlainSequent& s);
  /// an axiom contained in s, if any (smallest by the formula order)
  std::optional<PlainSequent> find_axiom(const PlainSequent& s);

  /// premises prescribed by the tag; throws std::invalid_argument if the tag
  /// does not apply (Weak is not computable this way)
  std::vector<PlainSequent> apply_rule(const PlainSequent& s, const RuleTag& t);

  /// nullopt when the instance is correct, otherwise a diagnostic
  std::optional<std::string> check_inf_instance(const PlainSequent& concl, const RuleTag& t,
                                                const std::vector<PlainSequent>& premises,
                                                const OriginalityContext& ctx);

  bool is_repeating(const PlainSequent& concl, const std::vector<PlainSequent>& premises);

  struct TraceEdge
  {
    bool ok = false;
    std::optional<Sym> unfolded;  ///< variable unfolded on this step
  };

  /// One step of a partial trace from `from` in the conclusion to `to` in
  /// premise number `premise`.
  TraceEdge trace_step(const PlainSequent& concl, const RuleTag& t,
                       std::size_t premise, Formula from, Formula to);

  struct Step
  {
    RuleTag tag;
    std::vector<PlainSequent> premises;
  };

  std::optional<Step> deterministic_step(const PlainSequent& s, const OriginalityContext& ctx);
  /// precondition: deterministic_step(s) is empty
  std::optional<Step> ground_step(const PlainSequent& s, const OriginalityContext& ctx);
  /// Mod premise followed by weakening of @k psi for every non-original k != j
  PlainSequent narrow_modal(const PlainSequent& s, Formula principal, Sym j,
                            const OriginalityContext& ctx);

  /// checks the four reachability invariants; nullopt if all hold
  std::optional<std::string> check_invariants(const PlainSequent& s, const OriginalityContext& ctx,
                                              std::size_t closure_size);
}

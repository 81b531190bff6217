#pragma once

#include "hmu/proof.hh"
#include "hmu/semantics.hh"

#include <functional>
#include <memory>
#include <set>
#include <string>
#include <vector>

namespace hmu
{
  struct Budget
  {
    std::size_t max_depth = 48;       ///< modal expansions on one branch
    std::size_t max_steps = 200000;   ///< expansions per search worker
    std::size_t memo_cap = 100000;    ///< entries per memo table
    unsigned threads = 1;
  };

  struct ProveOptions
  {
    Budget budget;
    /// called on every search position (all labels except the raw Mod premise
    /// before narrowing); may run on several threads
    std::function<void(const AnnotatedSequent&)> observer;
  };

  /// tag with member references instead of indices
  struct TreeTag
  {
    SafKind kind = SafKind::Weak;
    std::optional<AnnFormula> principal;
    std::optional<AnnFormula> side;
    Sym nominal = 0;
    Name name;
  };

  /// \brief Proof fragment; open leaves are saturated sequents.
  struct Tree
  {
    AnnotatedSequent label;
    std::optional<TreeTag> rule;
    std::vector<std::shared_ptr<Tree>> kids;
    std::size_t back = 0;  ///< levels up to the back-edge target, 0 if none
    bool axiom = false;
  };

  struct SearchContext
  {
    Formula rho;
    SafContext saf;
    std::size_t closure_size = 0;
    std::function<void(const AnnotatedSequent&)> observer;

    static SearchContext make(Formula rho);
  };

  /// deterministic, ground, Thinning, Reset and trimming until none applies
  std::shared_ptr<Tree> saturate(const AnnotatedSequent& s, const SearchContext& c);

  struct Choice
  {
    AnnFormula principal;
    Sym nominal;
    AnnotatedSequent mod_premise;
    AnnotatedSequent narrowed;
  };

  /// one choice per box formula, in formula order
  std::vector<Choice> expand(const AnnotatedSequent& s, const SearchContext& c);

  /// what a failed search saw: every formula on the failed branch set and
  /// every modal step (from prefix, introduced nominal)
  struct FailureWitness
  {
    FormulaSet formulas;
    std::set<std::pair<Sym, Sym>> mods;

    void merge(const FailureWitness& o);
  };

  /// countermodel per the construction over nominals; world is rep(root)
  std::pair<KripkeModel, std::string> extract_countermodel(const FailureWitness& w,
                                                           const OriginalityContext& ctx);

  enum class Status { Proved, Refuted, Exhausted };

  struct SearchOutcome
  {
    Status status = Status::Exhausted;
    Proof proof;
    KripkeModel model;
    std::string world;
    std::string report;
  };

  /// throws std::invalid_argument on formulas that are not closed, guarded and
  /// well-named, or that use reserved nominals
  SearchOutcome prove(Formula rho, const ProveOptions& opt = {});

  Proof to_proof(const Tree& t, const SearchContext& c);
}

#pragma once

#include "hmu/syntax.hh"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace hmu
{
  using WorldSet = std::vector<bool>;

  /// \brief Finite Kripke model with nominal assignment.
  ///
  /// Worlds are dense indices; names keeps the file-level ids.
  struct KripkeModel
  {
    std::vector<std::string> names;
    std::vector<std::vector<std::size_t>> succ;  // sorted, unique
    std::map<Sym, WorldSet> val;
    std::map<Sym, std::size_t> assign;

    std::size_t size() const { return names.size(); }
    std::size_t add_world(const std::string& id);
    void add_edge(std::size_t a, std::size_t b);
    std::size_t world(const std::string& id) const;  ///< throws if unknown
    bool has_world(const std::string& id) const;
    /// throws std::invalid_argument on a broken invariant
    void validate() const;
  };

  struct ModelError : std::runtime_error
  {
    ModelError(std::size_t line, const std::string& msg);
    std::size_t line;
  };

  /// lines: world <id> | edge <id> <id> | prop <name> <id> | nom <name> <id>
  KripkeModel parse_model(const std::string& text);
  std::string print_model(const KripkeModel& m);

  /// Knaster-Tarski by naive iteration.  Throws std::invalid_argument on an
  /// unassigned nominal.
  WorldSet eval_denotational(const KripkeModel& m, Formula f);

  enum class Player : std::uint8_t { Ver = 0, Fal = 1 };

  struct ParityGame
  {
    std::vector<Player> owner;
    std::vector<unsigned> priority;
    std::vector<std::vector<std::size_t>> moves;

    std::size_t size() const { return owner.size(); }
  };

  /// game positions are world * |closure| + closure index
  struct EvaluationGame
  {
    ParityGame game;
    Closure closure;
    VariableOrder order;
    std::size_t worlds = 0;

    std::size_t position(std::size_t w, Formula f) const
    {
      return w * closure.size() + closure.index.at(f);
    }
  };

  EvaluationGame build_evaluation_game(const KripkeModel& m, Formula rho);
  /// ν variable of rank r (1 = lowest ranking) gets 2r, μ gets 2r+1
  unsigned fixpoint_priority(const VariableOrder& o, Sym x);

  struct WinningCertificate
  {
    std::vector<Player> winner;  // per position
    /// chosen move for positions owned by their winner; npos elsewhere
    std::vector<std::size_t> strategy;
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);
  };

  WinningCertificate solve_parity(const ParityGame& g);
  bool verify_certificate(const ParityGame& g, const WinningCertificate& c);

  /// true iff Ver wins (w, f).  Throws std::out_of_range on a bad world.
  bool model_check(const KripkeModel& m, std::size_t w, Formula f);
  bool model_check(const KripkeModel& m, const std::string& w, Formula f);
}

#pragma once

#include "hmu/annotation.hh"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace hmu
{
  struct ProofNode
  {
    static constexpr std::size_t none = static_cast<std::size_t>(-1);

    std::string id;
    AnnotatedSequent label;
    std::optional<SafTag> rule;
    std::vector<std::size_t> children;
    std::size_t parent = none;
  };

  /// \brief Finite tree of annotated sequents with a back-edge map.
  ///
  /// nodes[0] is the root; parents precede their children.
  struct Proof
  {
    Formula rho;
    VariableOrder order;
    std::vector<ProofNode> nodes;
    std::map<std::size_t, std::size_t> backedges;  // leaf -> proper ancestor

    bool is_ancestor(std::size_t a, std::size_t n) const;
    /// nodes from a down to n inclusive; a must be an ancestor of n
    std::vector<std::size_t> path(std::size_t a, std::size_t n) const;
    std::size_t find(const std::string& id) const;  ///< none if absent
  };

  struct ProofFormatError : std::runtime_error
  {
    ProofFormatError(std::size_t line, const std::string& msg);
    std::size_t line;
  };

  std::string serialize(const Proof& p);
  Proof deserialize(const std::string& text);
  bool structurally_equal(const Proof& a, const Proof& b);

  struct Verdict
  {
    bool accepted = true;
    std::string node;    ///< id of the witness node
    std::string reason;
  };

  /// context read off the root label ε |- @k rho ^ε
  std::optional<SafContext> proof_context(const Proof& p);
  Verdict check_proof(const Proof& p);
  Verdict check_proof(const Proof& p, const SafContext& ctx);

  /// highest-ranking name in every control on f(l)..l and reset on it
  std::optional<Name> goodness(const Proof& p, std::size_t leaf);

  struct Unfolding
  {
    struct Node
    {
      std::size_t source;
      std::size_t depth;
      std::vector<std::size_t> children;
    };
    std::vector<Node> nodes;  // nodes[0] is the root
  };

  Unfolding unfold_proof(const Proof& p, std::size_t depth);
  std::string print_unfolding(const Proof& p, const Unfolding& u);

  /// does the branch looping through f(l)..l forever carry a good trace
  bool lasso_trace_oracle(const Proof& p, std::size_t leaf);
}

#pragma once

#include <compare>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "netex/utility.hpp"

// Bipartite exchange network: actors with endowments and utilities,
// capacitated exchange opportunities, strategies and the exchange network a
// strategy profile induces. Instances are immutable after validation.

namespace netex {

enum class Side { Buyer, Seller };

const char* side_name(Side side);

struct NumericConfig {
  double quantity_tol{1e-10};    // absolute tolerance on exchanged quantities
  double value_tol{1e-9};        // payoff tolerance for frontier queries / RX
  double stability_tol{1e-6};    // strictness margin of the certifier
  double degenerate_tol{1e-9};   // drop threshold on rationally feasible maxima
};

struct Actor {
  std::string id;
  Side side{Side::Buyer};
  double endowment{1.0};
  UtilitySpec utility{AdditivePower{}};
};

struct EdgeSpec {
  std::string buyer;
  std::string seller;
  double capacity{1.0};
};

struct EdgeKey {
  std::string buyer;
  std::string seller;
  auto operator<=>(const EdgeKey&) const = default;
};

inline EdgeKey key_of(const EdgeSpec& e) { return {e.buyer, e.seller}; }

// An exchange (m_i, m_j): quantities each endpoint hands over.
struct Exchange {
  double buyer_gives{0.0};
  double seller_gives{0.0};
};

// A pure strategy: partner to propose to, quantity offered, quantity asked.
// No partner means the designated no-op strategy of an isolated actor.
struct Strategy {
  std::optional<std::string> partner;
  double give{0.0};
  double ask{0.0};
};

using StrategyProfile = std::map<std::string, Strategy>;
using PayoffMap = std::map<std::string, double>;
using Matching = std::set<EdgeKey>;

// Matched edges with their agreed exchange; always a matching (each actor
// appears at most once).
struct ExchangeNetwork {
  std::map<EdgeKey, Exchange> matched;

  bool involves(const std::string& actor_id) const;
  std::optional<EdgeKey> edge_of(const std::string& actor_id) const;
};

class Instance {
 public:
  Instance() = default;
  Instance(std::vector<Actor> actors, std::vector<EdgeSpec> edges,
           NumericConfig numerics = {});

  const std::vector<Actor>& actors() const { return actors_; }
  const std::vector<EdgeSpec>& edges() const { return edges_; }
  const NumericConfig& numerics() const { return numerics_; }

  const Actor* find_actor(const std::string& id) const;
  const EdgeSpec* find_edge(const EdgeKey& key) const;
  bool has_edge(const EdgeKey& key) const;

  // Neighbor ids in lexicographic order (the deterministic iteration order
  // used everywhere).
  const std::vector<std::string>& neighbors(const std::string& id) const;

  // Payoff function of one endpoint of an edge.
  const PayoffFn& payoff_fn(const std::string& actor_id) const;
  const PayoffFn& payoff_fn(const EdgeSpec& edge, Side side) const;

  // Edge keys in lexicographic (buyer, seller) order.
  std::vector<EdgeKey> edge_keys_sorted() const;

  void drop_edge(const EdgeKey& key);

 private:
  void rebuild_index();

  std::vector<Actor> actors_;
  std::vector<EdgeSpec> edges_;
  NumericConfig numerics_;
  std::map<std::string, std::size_t> actor_index_;
  std::map<EdgeKey, std::size_t> edge_index_;
  std::map<std::string, PayoffFn> payoffs_;
  std::map<std::string, std::vector<std::string>> neighbors_;
  std::vector<std::string> no_neighbors_;
};

struct ValidationIssue {
  enum class Severity { Error, Warning };
  Severity severity{Severity::Error};
  std::string code;     // stable machine-readable tag
  std::string message;  // human-readable description
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;
  std::vector<EdgeKey> dropped_edges;

  bool ok() const;
  std::size_t error_count() const;
  std::size_t warning_count() const;
  std::string summary() const;
};

// Structural and semantic validation. Hard errors: duplicate ids,
// non-bipartite or dangling edges, nonpositive endowments/capacities, bad
// utility parameters. Edges whose rationally feasible set carries no
// positive payoff vector are dropped from the instance with a warning.
ValidationReport validate_instance(Instance& instance);

// Empty if the profile is well-formed for the instance (every actor has one
// strategy, partners are neighbors, quantities within bounds).
std::optional<std::string> profile_error(const Instance& instance,
                                         const StrategyProfile& profile);

// Edge (i, j) is matched iff both strategies name each other and the terms
// agree exactly on the stored representation.
ExchangeNetwork induced_exchange_network(const Instance& instance,
                                         const StrategyProfile& profile);

// Matched actors get their payoff at the agreed exchange; everyone else 0.
PayoffMap payoff_profile(const Instance& instance,
                         const StrategyProfile& profile);

}  // namespace netex

#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "netex/frontier.hpp"
#include "netex/model.hpp"

// Pairwise-stability verification. A profile is unstable iff some actor's
// own strategy would pay negative if accepted, or some edge admits a
// rationally feasible Pareto-efficient payoff vector weakly dominating the
// current payoffs with one strict margin.

namespace netex {

struct IrrationalStrategy {
  std::string actor;
  double payoff{0.0};  // payoff the actor's own proposal would yield
};

struct BlockingPair {
  EdgeKey edge;
  PayoffVector dominating;  // point on the edge's RQ path
  PayoffVector current;     // (u_i, u_j) under the checked profile
};

struct EdgeSlack {
  EdgeKey edge;
  double slack{0.0};  // min over both directions; negative means blocking
};

struct BlockingReport {
  enum class Verdict { Stable, Unstable };

  Verdict verdict{Verdict::Stable};
  std::optional<std::variant<IrrationalStrategy, BlockingPair>> violation;
  std::vector<EdgeSlack> slacks;  // per edge, filled by certify()

  bool stable() const { return verdict == Verdict::Stable; }
  std::string describe() const;
};

// Actors whose own strategy terms would yield payoff < -tol if accepted.
std::vector<IrrationalStrategy> check_individual_rationality(
    const Instance& instance, const StrategyProfile& profile, double tol);

// Scans edges in lexicographic (buyer, seller) order; the first edge whose
// frontier offers one endpoint strictly more than tol while holding the
// other at its clamped current payoff wins. Payoffs are recomputed from the
// profile, never taken from any solver record.
BlockingReport find_blocking_pair(const Instance& instance,
                                  const FrontierSet& frontiers,
                                  const StrategyProfile& profile, double tol);

// Runs both checks and embeds per-edge slack margins. Stable iff both pass.
BlockingReport certify_profile(const Instance& instance,
                               const FrontierSet& frontiers,
                               const StrategyProfile& profile, double tol);

}  // namespace netex

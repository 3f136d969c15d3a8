#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "netex/frontier.hpp"
#include "netex/model.hpp"
#include "netex/stability.hpp"

// Pairwise-stable outcomes.
//
// solve() runs a continuous deferred-acceptance pass to pick a matching
// (proposers concede their demanded payoff in steps; receivers tentatively
// hold the best offer), then polishes the tentative matching to an exact
// split: receiver payoffs start at zero and are pushed up monotonically to
// the least values absorbing all outside frontier pressure, partner payoffs
// follow the frontier, and the aspiration identity s_i + s_j = 1 is set
// exactly. The result is verified with feasible() and certified; on any
// failure the concession step is halved and the pass restarts. The solver
// never returns an uncertified outcome.

namespace netex {

using AspirationVector = std::map<std::string, double>;

struct DaEvent {
  int round{0};
  std::string proposer;
  double aspiration{0.0};    // proposer's normalized demand in [0, 1]
  std::string receiver;      // empty when the event is a concession
  double held_payoff{0.0};   // receiver's held payoff after the event
  bool accepted{false};
};

struct SolverConfig {
  Side propose_side{Side::Buyer};
  double step{1e-3};            // concession step on the normalized demand
  int max_rounds{2000000};
  int max_retries{20};
  double tol{1e-6};             // stability / feasibility tolerance
  int polish_sweep_cap{400};
  std::function<void(const DaEvent&)> observer;  // test hook, may be empty
};

struct SolverStats {
  int rounds{0};
  int retries{0};
  int polish_sweeps{0};
  double step_used{0.0};
  double wall_ms{0.0};  // not serialized; timing is not reproducible
};

struct StableOutcome {
  ExchangeNetwork matching;
  AspirationVector aspirations;
  StrategyProfile profile;
  PayoffMap payoffs;
  BlockingReport certificate;
  SolverStats stats;
};

struct FeasibilityViolation {
  std::string constraint;  // "eq13", "eq14", "eq15", "eq16", "structure"
  std::string where;
  double slack{0.0};
};

struct FeasibilityReport {
  std::vector<FeasibilityViolation> violations;
  bool feasible() const { return violations.empty(); }
  std::string summary() const;
};

// Checks the stable-matching inequality system on (matching, aspirations):
// matched pairs split to one (s_i + s_j = 1), payoffs follow the RQ
// parametrization (u = 0 off the matching), and no edge's frontier can
// improve both endpoints; payoffs are clamped into each edge's RQ range
// before inversion. Tolerance is in aspiration units.
FeasibilityReport feasible(const Instance& instance,
                           const FrontierSet& frontiers,
                           const Matching& matching,
                           const AspirationVector& aspirations, double tol);

// Matched pairs get reciprocal strategies carrying the unique
// Pareto-efficient exchange at the buyer level s_i * v_max_i(RX); unmatched
// actors propose (lexicographically first neighbor, 0, 0); isolated actors
// get the no-op strategy.
StrategyProfile construct_profile(const Instance& instance,
                                  const FrontierSet& frontiers,
                                  const Matching& matching,
                                  const AspirationVector& aspirations);

class SolveError : public std::runtime_error {
 public:
  explicit SolveError(const std::string& what) : std::runtime_error(what) {}
};

StableOutcome solve(const Instance& instance, const SolverConfig& config = {});
StableOutcome solve(const Instance& instance, const FrontierSet& frontiers,
                    const SolverConfig& config = {});

// Certificate over an outcome's profile; payoffs recomputed from strategies.
BlockingReport certify(const Instance& instance, const FrontierSet& frontiers,
                       const StableOutcome& outcome, double tol);

// Independent small-instance oracle: enumerates every matching of E and a
// uniform aspiration grid (s_j = 1 - s_i enforced by construction), keeping
// the assignments that pass feasible() and certify(). Deterministic order.
std::vector<StableOutcome> brute_force_solve(const Instance& instance,
                                             double grid_step,
                                             int actor_cap = 8,
                                             double tol = 1e-6);

}  // namespace netex

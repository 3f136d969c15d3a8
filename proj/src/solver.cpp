#include "netex/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <set>
#include <sstream>

namespace netex {

namespace {

Side other_side(Side s) {
  return s == Side::Buyer ? Side::Seller : Side::Buyer;
}

std::string edge_name(const EdgeKey& key) {
  return "(" + key.buyer + ", " + key.seller + ")";
}

EdgeKey edge_between(Side side_of_first, const std::string& first,
                     const std::string& second) {
  return side_of_first == Side::Buyer ? EdgeKey{first, second}
                                      : EdgeKey{second, first};
}

struct Hold {
  std::string proposer;
  EdgeKey edge;
  double offer{0.0};  // receiver's payoff under the tentative match
};

struct DaResult {
  bool converged{false};
  int rounds{0};
  std::map<std::string, Hold> holds;  // receiver id -> tentative match
  std::string failure;
};

// Discrete-concession deferred acceptance. Proposers demand a payoff level
// (their normalized aspiration times the best rationally feasible payoff
// any of their edges supports) and walk it down by `step`; receivers keep
// the offer that pays them most, ties to the lexicographically smaller
// proposer. Offers use the interpolated frontier; exact values are
// recomputed during polishing.
DaResult run_deferred_acceptance(const Instance& instance,
                                 const FrontierSet& frontiers, Side propose,
                                 double step, int max_rounds,
                                 const std::function<void(const DaEvent&)>&
                                     observer) {
  struct Proposer {
    std::vector<EdgeKey> edges;
    double top_demand{0.0};
    double sigma{1.0};
    std::set<EdgeKey> rejected;  // at the current aspiration level
  };

  DaResult result;
  std::map<std::string, Proposer> proposers;
  for (const auto& actor : instance.actors()) {
    if (actor.side != propose) continue;
    Proposer p;
    for (const auto& nbr : instance.neighbors(actor.id))
      p.edges.push_back(edge_between(propose, actor.id, nbr));
    if (p.edges.empty()) continue;
    std::sort(p.edges.begin(), p.edges.end());
    for (const auto& e : p.edges)
      p.top_demand = std::max(p.top_demand, frontiers.at(e).rx_max(propose));
    proposers.emplace(actor.id, std::move(p));
  }

  std::set<std::string> free;
  for (const auto& [id, _] : proposers) free.insert(id);

  auto emit = [&](const DaEvent& ev) {
    if (observer) observer(ev);
  };

  while (!free.empty()) {
    if (++result.rounds > max_rounds) {
      result.failure = "round budget exhausted";
      return result;
    }
    const std::string id = *free.begin();
    Proposer& p = proposers.at(id);
    const double demand = p.sigma * p.top_demand;

    // Best not-yet-rejected edge whose frontier can pay the demand,
    // ranked by the payoff it hands the receiver.
    const EdgeKey* best_edge = nullptr;
    double best_offer = 0.0;
    for (const auto& e : p.edges) {
      if (p.rejected.count(e)) continue;
      const FrontierMap& fm = frontiers.at(e);
      if (fm.rx_max(propose) < demand - 1e-12 * (1.0 + demand)) continue;
      const double offer = fm.frontier_other_approx(propose, demand);
      if (!best_edge || offer > best_offer) {
        best_edge = &e;
        best_offer = offer;
      }
    }

    if (!best_edge) {
      if (p.sigma <= 0.0) {
        free.erase(id);  // conceded everything; stays unmatched
      } else {
        p.sigma = std::max(0.0, p.sigma - step);
        p.rejected.clear();
        emit({result.rounds, id, p.sigma, "", 0.0, false});
      }
      continue;
    }

    const EdgeKey edge = *best_edge;
    const std::string receiver =
        propose == Side::Buyer ? edge.seller : edge.buyer;
    auto held = result.holds.find(receiver);
    const bool accept =
        held == result.holds.end() || best_offer > held->second.offer ||
        (best_offer == held->second.offer && id < held->second.proposer);
    if (accept) {
      if (held != result.holds.end()) {
        Proposer& dumped = proposers.at(held->second.proposer);
        dumped.rejected.insert(held->second.edge);
        free.insert(held->second.proposer);
      }
      result.holds[receiver] = Hold{id, edge, best_offer};
      free.erase(id);
    } else {
      p.rejected.insert(edge);
    }
    emit({result.rounds, id, p.sigma, receiver,
          result.holds.at(receiver).offer, accept});
  }
  result.converged = true;
  return result;
}

struct PolishResult {
  bool ok{false};
  int sweeps{0};
  std::map<std::string, double> receiver_payoff;  // per matched receiver
  std::string failure;
};

// Exact split on a fixed matching. Receiver payoffs start at zero and rise
// monotonically to absorb the strongest frontier pressure from competing
// edges; each partner's payoff follows the frontier of the matched edge.
// The limit is the proposer-optimal split if the matching supports one;
// pressure beyond a pair's rationally feasible maximum means it does not.
PolishResult polish_matching(const Instance& instance,
                             const FrontierSet& frontiers, Side propose,
                             const std::map<std::string, Hold>& holds,
                             double tol, int sweep_cap) {
  const Side receive = other_side(propose);
  PolishResult result;
  for (const auto& [receiver, _] : holds) result.receiver_payoff[receiver] = 0.0;

  // Receiver of the matched partner of a proposer, if any.
  std::map<std::string, const Hold*> hold_of_proposer;
  for (const auto& [receiver, hold] : holds)
    hold_of_proposer[hold.proposer] = &hold;

  auto proposer_payoff = [&](const std::string& proposer_id) {
    auto it = hold_of_proposer.find(proposer_id);
    if (it == hold_of_proposer.end()) return 0.0;
    const Hold& h = *it->second;
    const std::string receiver =
        propose == Side::Buyer ? h.edge.seller : h.edge.buyer;
    return frontiers.at(h.edge).frontier_other(
        receive, result.receiver_payoff.at(receiver));
  };

  double delta = 0.0;
  for (int sweep = 0; sweep < sweep_cap; ++sweep) {
    ++result.sweeps;
    delta = 0.0;
    for (auto& [receiver, u_r] : result.receiver_payoff) {
      const Hold& own = holds.at(receiver);
      double pressure = 0.0;
      for (const auto& nbr : instance.neighbors(receiver)) {
        const EdgeKey e = edge_between(receive, receiver, nbr);
        if (e == own.edge) continue;
        const FrontierMap& fm = frontiers.at(e);
        const double u_p = proposer_payoff(nbr);
        const double clamped = std::clamp(u_p, 0.0, fm.rx_max(propose));
        pressure = std::max(pressure, fm.frontier_other(propose, clamped));
      }
      const double cap = frontiers.at(own.edge).rx_max(receive);
      if (pressure > cap + 0.5 * tol) {
        result.failure = "edge " + edge_name(own.edge) +
                         " cannot absorb outside pressure " +
                         std::to_string(pressure);
        return result;
      }
      const double next = std::min(std::max(u_r, pressure), cap);
      delta = std::max(delta, next - u_r);
      u_r = next;
    }
    if (delta < 1e-11) {
      result.ok = true;
      return result;
    }
  }
  if (delta < 1e-9) {  // nearly settled; certification decides
    result.ok = true;
    return result;
  }
  result.failure = "pressure iteration did not settle";
  return result;
}

double grid_value(int k, int n, double step) {
  return k >= n ? 1.0 : k * step;
}

}  // namespace

std::string FeasibilityReport::summary() const {
  std::ostringstream out;
  for (const auto& v : violations)
    out << v.constraint << " at " << v.where << " (slack " << v.slack << ")\n";
  return out.str();
}

FeasibilityReport feasible(const Instance& instance,
                           const FrontierSet& frontiers,
                           const Matching& matching,
                           const AspirationVector& aspirations, double tol) {
  FeasibilityReport report;
  auto violate = [&](const char* eq, std::string where, double slack) {
    report.violations.push_back({eq, std::move(where), slack});
  };

  std::set<std::string> matched_actors;
  for (const auto& key : matching) {
    if (!instance.has_edge(key)) {
      violate("structure", "unknown edge " + edge_name(key), 0.0);
      continue;
    }
    if (!matched_actors.insert(key.buyer).second)
      violate("structure", key.buyer + " matched twice", 0.0);
    if (!matched_actors.insert(key.seller).second)
      violate("structure", key.seller + " matched twice", 0.0);
  }
  for (const auto& actor : instance.actors())
    if (!aspirations.count(actor.id))
      violate("structure", "no aspiration for " + actor.id, 0.0);
  if (!report.feasible()) return report;

  // Aspiration bounds (all actors).
  for (const auto& [id, s] : aspirations)
    if (s < -tol || s > 1.0 + tol)
      violate("eq16", id, s < 0.0 ? s : 1.0 - s);

  // Payoffs via the RQ parametrization; zero off the matching.
  PayoffMap u;
  for (const auto& actor : instance.actors()) u[actor.id] = 0.0;
  for (const auto& key : matching) {
    const FrontierMap& fm = frontiers.at(key);
    const double vmax_i = fm.rx_max(Side::Buyer);
    const double s_i = aspirations.at(key.buyer);
    const double s_j = aspirations.at(key.seller);
    if (std::fabs(s_i + s_j - 1.0) > tol)
      violate("eq13", edge_name(key), 1.0 - s_i - s_j);
    u[key.buyer] = std::clamp(s_i, 0.0, 1.0) * vmax_i;
    // The construction pins u_j through 1 - s_j; under the split identity
    // this equals the value at s_i. Both are computed and must agree.
    const double level_a = std::clamp(1.0 - s_j, 0.0, 1.0) * vmax_i;
    const double u_j = fm.value_ji(level_a);
    const double u_j_alt = fm.value_ji(std::clamp(s_i, 0.0, 1.0) * vmax_i);
    const double scale = std::max(1.0, fm.rx_max(Side::Seller));
    if (std::fabs(u_j - u_j_alt) > 10.0 * tol * scale)
      violate("eq14", edge_name(key), u_j - u_j_alt);
    u[key.seller] = u_j;
  }

  // No edge may offer both endpoints more: the aspiration the buyer needs
  // must be at least the aspiration the seller's payoff pins.
  for (const EdgeKey& key : instance.edge_keys_sorted()) {
    const FrontierMap& fm = frontiers.at(key);
    const double vmax_i = fm.rx_max(Side::Buyer);
    const double vmax_j = fm.rx_max(Side::Seller);
    if (!(vmax_i > 0.0)) continue;  // degenerate edges are dropped upstream
    const double sigma_i = std::clamp(u.at(key.buyer), 0.0, vmax_i) / vmax_i;
    const double u_j_clamped = std::clamp(u.at(key.seller), 0.0, vmax_j);
    const double sigma_j = fm.value_ij(u_j_clamped) / vmax_i;
    const double slack = sigma_i + 1.0 - sigma_j - 1.0;
    if (slack < -tol) violate("eq15", edge_name(key), slack);
  }
  return report;
}

StrategyProfile construct_profile(const Instance& instance,
                                  const FrontierSet& frontiers,
                                  const Matching& matching,
                                  const AspirationVector& aspirations) {
  std::map<std::string, const EdgeKey*> matched;
  for (const auto& key : matching) {
    if (!instance.has_edge(key))
      throw std::invalid_argument("construct_profile: unknown edge " +
                                  edge_name(key));
    if (matched.count(key.buyer) || matched.count(key.seller))
      throw std::invalid_argument("construct_profile: not a matching");
    matched[key.buyer] = &key;
    matched[key.seller] = &key;
  }

  StrategyProfile profile;
  for (const auto& actor : instance.actors()) {
    if (matched.count(actor.id)) continue;  // pairs written below
    const auto& nbrs = instance.neighbors(actor.id);
    if (nbrs.empty())
      profile[actor.id] = Strategy{};  // no-op for isolated actors
    else
      profile[actor.id] = Strategy{nbrs.front(), 0.0, 0.0};
  }
  for (const auto& key : matching) {
    const FrontierMap& fm = frontiers.at(key);
    auto s_it = aspirations.find(key.buyer);
    if (s_it == aspirations.end())
      throw std::invalid_argument("construct_profile: no aspiration for " +
                                  key.buyer);
    const double s_i = s_it->second;
    if (s_i < -1e-9 || s_i > 1.0 + 1e-9)
      throw std::invalid_argument("construct_profile: aspiration of " +
                                  key.buyer + " outside [0, 1]");
    const double q_i = std::clamp(s_i, 0.0, 1.0) * fm.rx_max(Side::Buyer);
    // One canonical exchange copied into both strategies, so reciprocity
    // never depends on re-deriving terms.
    const Exchange x = fm.pareto_point(q_i);
    profile[key.buyer] = Strategy{key.seller, x.buyer_gives, x.seller_gives};
    profile[key.seller] = Strategy{key.buyer, x.seller_gives, x.buyer_gives};
  }
  return profile;
}

BlockingReport certify(const Instance& instance, const FrontierSet& frontiers,
                       const StableOutcome& outcome, double tol) {
  return certify_profile(instance, frontiers, outcome.profile, tol);
}

StableOutcome solve(const Instance& instance, const SolverConfig& config) {
  FrontierSet frontiers(instance);
  return solve(instance, frontiers, config);
}

StableOutcome solve(const Instance& instance, const FrontierSet& frontiers,
                    const SolverConfig& config) {
  const auto t0 = std::chrono::steady_clock::now();
  if (!(config.step > 0.0 && config.step <= 1.0))
    throw std::invalid_argument("solve: step must be in (0, 1]");
  const Side propose = config.propose_side;
  const Side receive = other_side(propose);

  std::vector<std::string> attempts_log;
  int total_rounds = 0;
  for (int attempt = 0; attempt <= config.max_retries; ++attempt) {
    const double step = config.step / static_cast<double>(1 << attempt);
    DaResult da = run_deferred_acceptance(instance, frontiers, propose, step,
                                          config.max_rounds, config.observer);
    total_rounds += da.rounds;
    if (!da.converged) {
      attempts_log.push_back("step " + std::to_string(step) +
                             ": deferred acceptance " + da.failure);
      continue;
    }

    PolishResult polish =
        polish_matching(instance, frontiers, propose, da.holds, config.tol,
                        config.polish_sweep_cap);
    if (!polish.ok) {
      attempts_log.push_back("step " + std::to_string(step) + ": " +
                             polish.failure);
      continue;
    }

    Matching matching;
    AspirationVector aspirations;
    for (const auto& actor : instance.actors()) aspirations[actor.id] = 0.0;
    bool split_ok = true;
    for (const auto& [receiver, hold] : da.holds) {
      matching.insert(hold.edge);
      const FrontierMap& fm = frontiers.at(hold.edge);
      const double u_r = polish.receiver_payoff.at(receiver);
      const double u_buyer =
          receive == Side::Buyer ? u_r : fm.frontier_other(receive, u_r);
      const double vmax_i = fm.rx_max(Side::Buyer);
      if (!(vmax_i > 0.0)) {
        split_ok = false;
        break;
      }
      const double s_i = std::clamp(u_buyer / vmax_i, 0.0, 1.0);
      aspirations[hold.edge.buyer] = s_i;
      aspirations[hold.edge.seller] = 1.0 - s_i;
    }
    if (!split_ok) {
      attempts_log.push_back("degenerate matched edge");
      continue;
    }

    const FeasibilityReport fr =
        feasible(instance, frontiers, matching, aspirations, config.tol);
    if (!fr.feasible()) {
      attempts_log.push_back("step " + std::to_string(step) +
                             ": infeasible: " + fr.summary());
      continue;
    }

    StableOutcome outcome;
    outcome.aspirations = aspirations;
    outcome.profile =
        construct_profile(instance, frontiers, matching, aspirations);
    outcome.matching = induced_exchange_network(instance, outcome.profile);
    outcome.payoffs = payoff_profile(instance, outcome.profile);

    // The outcome record must agree with the polished split.
    bool consistent = outcome.matching.matched.size() == matching.size();
    for (const auto& [receiver, hold] : da.holds) {
      const double u_r = polish.receiver_payoff.at(receiver);
      if (std::fabs(outcome.payoffs.at(receiver) - u_r) > 10.0 * config.tol)
        consistent = false;
    }
    if (!consistent) {
      attempts_log.push_back("step " + std::to_string(step) +
                             ": payoff consistency check failed");
      continue;
    }

    outcome.certificate =
        certify_profile(instance, frontiers, outcome.profile, config.tol);
    if (!outcome.certificate.stable()) {
      attempts_log.push_back("step " + std::to_string(step) +
                             ": certificate: " +
                             outcome.certificate.describe());
      continue;
    }

    outcome.stats.rounds = total_rounds;
    outcome.stats.retries = attempt;
    outcome.stats.polish_sweeps = polish.sweeps;
    outcome.stats.step_used = step;
    outcome.stats.wall_ms =
        std::chrono::duration<double, std::milli>(
            std::chrono::steady_clock::now() - t0)
            .count();
    return outcome;
  }

  std::ostringstream msg;
  msg << "solve: no certified outcome within " << config.max_retries + 1
      << " attempts:\n";
  for (const auto& line : attempts_log) msg << "  " << line << "\n";
  throw SolveError(msg.str());
}

std::vector<StableOutcome> brute_force_solve(const Instance& instance,
                                             double grid_step, int actor_cap,
                                             double tol) {
  if (static_cast<int>(instance.actors().size()) > actor_cap)
    throw std::invalid_argument(
        "brute_force_solve: instance above the actor cap");
  if (!(grid_step > 0.0 && grid_step <= 1.0))
    throw std::invalid_argument("brute_force_solve: bad grid step");

  FrontierSet frontiers(instance);
  const std::vector<EdgeKey> edges = instance.edge_keys_sorted();

  // All matchings of E, including the empty one.
  std::vector<std::vector<EdgeKey>> matchings;
  std::vector<EdgeKey> current;
  std::set<std::string> used;
  std::function<void(std::size_t)> enumerate = [&](std::size_t k) {
    if (k == edges.size()) {
      matchings.push_back(current);
      return;
    }
    enumerate(k + 1);
    const EdgeKey& e = edges[k];
    if (!used.count(e.buyer) && !used.count(e.seller)) {
      used.insert(e.buyer);
      used.insert(e.seller);
      current.push_back(e);
      enumerate(k + 1);
      current.pop_back();
      used.erase(e.buyer);
      used.erase(e.seller);
    }
  };
  enumerate(0);
  std::sort(matchings.begin(), matchings.end(),
            [](const auto& a, const auto& b) {
              if (a.size() != b.size()) return a.size() < b.size();
              return a < b;
            });

  const int n_steps = static_cast<int>(std::lround(1.0 / grid_step));

  std::vector<StableOutcome> outcomes;
  for (const auto& matched_edges : matchings) {
    Matching matching(matched_edges.begin(), matched_edges.end());
    std::vector<int> odometer(matched_edges.size(), 0);
    while (true) {
      AspirationVector aspirations;
      for (const auto& actor : instance.actors()) aspirations[actor.id] = 0.0;
      for (std::size_t k = 0; k < matched_edges.size(); ++k) {
        const double s_i = grid_value(odometer[k], n_steps, grid_step);
        aspirations[matched_edges[k].buyer] = s_i;
        aspirations[matched_edges[k].seller] = 1.0 - s_i;
      }
      const FeasibilityReport fr =
          feasible(instance, frontiers, matching, aspirations, tol);
      if (fr.feasible()) {
        StableOutcome outcome;
        outcome.aspirations = aspirations;
        outcome.profile =
            construct_profile(instance, frontiers, matching, aspirations);
        outcome.matching = induced_exchange_network(instance, outcome.profile);
        outcome.payoffs = payoff_profile(instance, outcome.profile);
        outcome.certificate =
            certify_profile(instance, frontiers, outcome.profile, tol);
        outcome.stats.step_used = grid_step;
        if (outcome.certificate.stable()) outcomes.push_back(std::move(outcome));
      }
      // Advance the odometer.
      std::size_t pos = 0;
      while (pos < odometer.size() && ++odometer[pos] > n_steps) {
        odometer[pos] = 0;
        ++pos;
      }
      if (pos == odometer.size()) break;
    }
  }
  return outcomes;
}

}  // namespace netex

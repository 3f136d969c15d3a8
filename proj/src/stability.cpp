#include "netex/stability.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace netex {

namespace {

// One direction of the blocking test on an edge: hold `level_side` at its
// clamped current payoff, ask the frontier what the other side could get.
// A payoff above the edge's rationally feasible maximum rules the direction
// out: no frontier point can match it.
struct DirectionalSlack {
  bool applicable{false};
  double offer{0.0};    // frontier payoff for the other side
  double clamped{0.0};  // level used on the RQ path
};

DirectionalSlack probe(const FrontierMap& fm, Side level_side, double u_level,
                       double tol) {
  DirectionalSlack d;
  const double vmax = fm.rx_max(level_side);
  if (u_level > vmax + tol) return d;
  d.applicable = true;
  d.clamped = std::clamp(u_level, 0.0, vmax);
  d.offer = fm.frontier_other(level_side, d.clamped);
  return d;
}

}  // namespace

std::string BlockingReport::describe() const {
  if (stable()) return "stable";
  std::ostringstream out;
  out << "unstable: ";
  if (!violation) return out.str() + "(no detail)";
  if (const auto* ir = std::get_if<IrrationalStrategy>(&*violation)) {
    out << "actor '" << ir->actor << "' proposes terms paying " << ir->payoff;
  } else {
    const auto& bp = std::get<BlockingPair>(*violation);
    out << "edge (" << bp.edge.buyer << ", " << bp.edge.seller
        << ") offers (" << bp.dominating.v_i << ", " << bp.dominating.v_j
        << ") against current (" << bp.current.v_i << ", " << bp.current.v_j
        << ")";
  }
  return out.str();
}

std::vector<IrrationalStrategy> check_individual_rationality(
    const Instance& instance, const StrategyProfile& profile, double tol) {
  if (auto err = profile_error(instance, profile))
    throw std::invalid_argument("check_individual_rationality: " + *err);

  std::vector<IrrationalStrategy> out;
  for (const auto& [id, strategy] : profile) {
    if (!strategy.partner) continue;
    const double payoff =
        instance.payoff_fn(id)(strategy.give, strategy.ask);
    if (payoff < -tol) out.push_back({id, payoff});
  }
  return out;
}

BlockingReport find_blocking_pair(const Instance& instance,
                                  const FrontierSet& frontiers,
                                  const StrategyProfile& profile, double tol) {
  const PayoffMap payoffs = payoff_profile(instance, profile);

  BlockingReport report;
  for (const EdgeKey& key : instance.edge_keys_sorted()) {
    const FrontierMap& fm = frontiers.at(key);
    const double u_i = payoffs.at(key.buyer);
    const double u_j = payoffs.at(key.seller);

    const DirectionalSlack di = probe(fm, Side::Buyer, u_i, tol);
    if (di.applicable && di.offer > u_j + tol) {
      report.verdict = BlockingReport::Verdict::Unstable;
      report.violation = BlockingPair{
          key, PayoffVector{di.clamped, di.offer}, PayoffVector{u_i, u_j}};
      return report;
    }
    const DirectionalSlack dj = probe(fm, Side::Seller, u_j, tol);
    if (dj.applicable && dj.offer > u_i + tol) {
      report.verdict = BlockingReport::Verdict::Unstable;
      report.violation = BlockingPair{
          key, PayoffVector{dj.offer, dj.clamped}, PayoffVector{u_i, u_j}};
      return report;
    }
  }
  return report;
}

BlockingReport certify_profile(const Instance& instance,
                               const FrontierSet& frontiers,
                               const StrategyProfile& profile, double tol) {
  auto irrational = check_individual_rationality(instance, profile, tol);
  if (!irrational.empty()) {
    BlockingReport report;
    report.verdict = BlockingReport::Verdict::Unstable;
    report.violation = irrational.front();
    return report;
  }

  BlockingReport report = find_blocking_pair(instance, frontiers, profile, tol);

  // Per-edge slack margins: how far each edge is from blocking, in payoff
  // units. Negative slack on the reported edge mirrors the verdict.
  const PayoffMap payoffs = payoff_profile(instance, profile);
  for (const EdgeKey& key : instance.edge_keys_sorted()) {
    const FrontierMap& fm = frontiers.at(key);
    const double u_i = payoffs.at(key.buyer);
    const double u_j = payoffs.at(key.seller);
    double slack = std::numeric_limits<double>::infinity();
    const DirectionalSlack di = probe(fm, Side::Buyer, u_i, tol);
    if (di.applicable) slack = std::min(slack, u_j - di.offer);
    const DirectionalSlack dj = probe(fm, Side::Seller, u_j, tol);
    if (dj.applicable) slack = std::min(slack, u_i - dj.offer);
    if (!std::isfinite(slack)) slack = 0.0;  // edge out of reach both ways
    report.slacks.push_back({key, slack});
  }
  return report;
}

}  // namespace netex

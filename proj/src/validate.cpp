#include <set>
#include <sstream>

#include "netex/frontier.hpp"
#include "netex/model.hpp"

namespace netex {

namespace {

void error(ValidationReport& report, std::string code, std::string message) {
  report.issues.push_back({ValidationIssue::Severity::Error, std::move(code),
                           std::move(message)});
}

void warning(ValidationReport& report, std::string code, std::string message) {
  report.issues.push_back({ValidationIssue::Severity::Warning, std::move(code),
                           std::move(message)});
}

}  // namespace

ValidationReport validate_instance(Instance& instance) {
  ValidationReport report;

  std::set<std::string> seen_ids;
  for (const auto& actor : instance.actors()) {
    if (actor.id.empty()) error(report, "empty-id", "actor with empty id");
    if (!seen_ids.insert(actor.id).second)
      error(report, "duplicate-id", "duplicate actor id '" + actor.id + "'");
    if (!(actor.endowment > 0.0))
      error(report, "nonpositive-endowment",
            "actor '" + actor.id + "' has nonpositive endowment");
    if (auto err = spec_error(actor.utility))
      error(report, "parameter-out-of-range",
            "actor '" + actor.id + "': " + *err);
  }

  std::set<EdgeKey> seen_edges;
  for (const auto& edge : instance.edges()) {
    std::ostringstream name;
    name << "(" << edge.buyer << ", " << edge.seller << ")";
    if (!seen_edges.insert(key_of(edge)).second)
      error(report, "duplicate-edge", "duplicate edge " + name.str());
    const Actor* b = instance.find_actor(edge.buyer);
    const Actor* s = instance.find_actor(edge.seller);
    if (!b || !s) {
      error(report, "unknown-endpoint",
            "edge " + name.str() + " references an unknown actor");
      continue;
    }
    if (b->side != Side::Buyer || s->side != Side::Seller)
      error(report, "non-bipartite",
            "edge " + name.str() + " must join a buyer to a seller");
    if (!(edge.capacity > 0.0))
      error(report, "nonpositive-capacity",
            "edge " + name.str() + " has nonpositive capacity");
  }

  if (!report.ok()) return report;

  // Edges whose rationally feasible set holds no positive payoff vector
  // add nothing to any outcome; drop them rather than reject the instance.
  std::vector<EdgeKey> to_drop;
  for (const auto& edge : instance.edges()) {
    FrontierMap fm(edge, instance.payoff_fn(edge, Side::Buyer),
                   instance.payoff_fn(edge, Side::Seller),
                   instance.numerics());
    const PayoffBounds& rx = fm.bounds(ExchangeSet::RX);
    const double tol = instance.numerics().degenerate_tol;
    if (rx.v_max_i <= tol || rx.v_max_j <= tol)
      to_drop.push_back(key_of(edge));
  }
  for (const auto& key : to_drop) {
    warning(report, "dropped",
            "edge (" + key.buyer + ", " + key.seller +
                ") admits no positive rationally feasible payoff vector; "
                "dropped");
    report.dropped_edges.push_back(key);
    instance.drop_edge(key);
  }
  return report;
}

}  // namespace netex

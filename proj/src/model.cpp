#include "netex/model.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace netex {

const char* side_name(Side side) {
  return side == Side::Buyer ? "buyer" : "seller";
}

bool ExchangeNetwork::involves(const std::string& actor_id) const {
  return edge_of(actor_id).has_value();
}

std::optional<EdgeKey> ExchangeNetwork::edge_of(
    const std::string& actor_id) const {
  for (const auto& [key, _] : matched)
    if (key.buyer == actor_id || key.seller == actor_id) return key;
  return std::nullopt;
}

Instance::Instance(std::vector<Actor> actors, std::vector<EdgeSpec> edges,
                   NumericConfig numerics)
    : actors_(std::move(actors)),
      edges_(std::move(edges)),
      numerics_(numerics) {
  rebuild_index();
}

void Instance::rebuild_index() {
  actor_index_.clear();
  edge_index_.clear();
  payoffs_.clear();
  neighbors_.clear();
  for (std::size_t i = 0; i < actors_.size(); ++i)
    actor_index_.emplace(actors_[i].id, i);
  for (std::size_t i = 0; i < edges_.size(); ++i)
    edge_index_.emplace(key_of(edges_[i]), i);
  for (const auto& a : actors_) {
    if (a.endowment > 0.0 && !spec_error(a.utility))
      payoffs_.emplace(a.id, PayoffFn(a.utility, a.endowment));
    neighbors_.emplace(a.id, std::vector<std::string>{});
  }
  for (const auto& e : edges_) {
    if (auto it = neighbors_.find(e.buyer); it != neighbors_.end())
      it->second.push_back(e.seller);
    if (auto it = neighbors_.find(e.seller); it != neighbors_.end())
      it->second.push_back(e.buyer);
  }
  for (auto& [_, nbrs] : neighbors_) std::sort(nbrs.begin(), nbrs.end());
}

const Actor* Instance::find_actor(const std::string& id) const {
  auto it = actor_index_.find(id);
  return it == actor_index_.end() ? nullptr : &actors_[it->second];
}

const EdgeSpec* Instance::find_edge(const EdgeKey& key) const {
  auto it = edge_index_.find(key);
  return it == edge_index_.end() ? nullptr : &edges_[it->second];
}

bool Instance::has_edge(const EdgeKey& key) const {
  return edge_index_.count(key) != 0;
}

const std::vector<std::string>& Instance::neighbors(
    const std::string& id) const {
  auto it = neighbors_.find(id);
  if (it == neighbors_.end()) return no_neighbors_;
  return it->second;
}

const PayoffFn& Instance::payoff_fn(const std::string& actor_id) const {
  auto it = payoffs_.find(actor_id);
  if (it == payoffs_.end())
    throw std::invalid_argument("unknown actor: " + actor_id);
  return it->second;
}

const PayoffFn& Instance::payoff_fn(const EdgeSpec& edge, Side side) const {
  return payoff_fn(side == Side::Buyer ? edge.buyer : edge.seller);
}

std::vector<EdgeKey> Instance::edge_keys_sorted() const {
  std::vector<EdgeKey> keys;
  keys.reserve(edges_.size());
  for (const auto& e : edges_) keys.push_back(key_of(e));
  std::sort(keys.begin(), keys.end());
  return keys;
}

void Instance::drop_edge(const EdgeKey& key) {
  edges_.erase(std::remove_if(edges_.begin(), edges_.end(),
                              [&](const EdgeSpec& e) {
                                return key_of(e) == key;
                              }),
               edges_.end());
  rebuild_index();
}

bool ValidationReport::ok() const { return error_count() == 0; }

std::size_t ValidationReport::error_count() const {
  std::size_t n = 0;
  for (const auto& i : issues)
    if (i.severity == ValidationIssue::Severity::Error) ++n;
  return n;
}

std::size_t ValidationReport::warning_count() const {
  return issues.size() - error_count();
}

std::string ValidationReport::summary() const {
  std::ostringstream out;
  for (const auto& i : issues)
    out << (i.severity == ValidationIssue::Severity::Error ? "error"
                                                           : "warning")
        << " [" << i.code << "] " << i.message << "\n";
  return out.str();
}

std::optional<std::string> profile_error(const Instance& instance,
                                         const StrategyProfile& profile) {
  for (const auto& actor : instance.actors()) {
    auto it = profile.find(actor.id);
    if (it == profile.end()) return "actor " + actor.id + " has no strategy";
    const Strategy& s = it->second;
    if (!s.partner) {
      if (s.give != 0.0 || s.ask != 0.0)
        return "no-op strategy of " + actor.id + " carries nonzero terms";
      continue;
    }
    const auto& nbrs = instance.neighbors(actor.id);
    if (!std::binary_search(nbrs.begin(), nbrs.end(), *s.partner))
      return "actor " + actor.id + " proposes to non-neighbor " + *s.partner;
    const Actor* partner = instance.find_actor(*s.partner);
    const EdgeKey key = actor.side == Side::Buyer
                            ? EdgeKey{actor.id, *s.partner}
                            : EdgeKey{*s.partner, actor.id};
    const EdgeSpec* edge = instance.find_edge(key);
    if (s.give < 0.0 || s.ask < 0.0)
      return "actor " + actor.id + " proposes negative quantities";
    if (s.give > actor.endowment)
      return "actor " + actor.id + " offers more than its endowment";
    if (s.ask > partner->endowment)
      return "actor " + actor.id + " asks more than " + *s.partner +
             "'s endowment";
    if (s.give + s.ask > edge->capacity + 1e-12)
      return "proposal of " + actor.id + " exceeds capacity of (" +
             key.buyer + ", " + key.seller + ")";
  }
  for (const auto& [id, _] : profile)
    if (!instance.find_actor(id)) return "strategy for unknown actor " + id;
  return std::nullopt;
}

ExchangeNetwork induced_exchange_network(const Instance& instance,
                                         const StrategyProfile& profile) {
  if (auto err = profile_error(instance, profile))
    throw std::invalid_argument("induced_exchange_network: " + *err);

  ExchangeNetwork net;
  for (const auto& edge : instance.edges()) {
    const auto bi = profile.find(edge.buyer);
    const auto si = profile.find(edge.seller);
    if (bi == profile.end() || si == profile.end()) continue;
    const Strategy& sb = bi->second;
    const Strategy& ss = si->second;
    if (!sb.partner || !ss.partner) continue;
    if (*sb.partner != edge.seller || *ss.partner != edge.buyer) continue;
    // Terms must be mutually identical on the stored representation.
    if (sb.give != ss.ask || sb.ask != ss.give) continue;
    net.matched.emplace(key_of(edge), Exchange{sb.give, sb.ask});
  }
  return net;
}

PayoffMap payoff_profile(const Instance& instance,
                         const StrategyProfile& profile) {
  const ExchangeNetwork net = induced_exchange_network(instance, profile);
  PayoffMap payoffs;
  for (const auto& actor : instance.actors()) payoffs[actor.id] = 0.0;
  for (const auto& [key, x] : net.matched) {
    payoffs[key.buyer] =
        instance.payoff_fn(key.buyer)(x.buyer_gives, x.seller_gives);
    payoffs[key.seller] =
        instance.payoff_fn(key.seller)(x.seller_gives, x.buyer_gives);
  }
  return payoffs;
}

}  // namespace netex

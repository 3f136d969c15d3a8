#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "netex/frontier.hpp"
#include "netex/model.hpp"

// Shared fixtures and independent oracles. The oracles work straight from
// the payoff definitions on dense grids; they never touch the frontier
// solver they are used to check.

namespace fixtures {

// Two actors, sqrt-additive utilities, unit endowments, unit capacity.
// The Pareto frontier is the capacity line m_i + m_j = 1 with
// u_i = 2*sqrt(1 - m) - 1 and u_j = 2*sqrt(m) - 1.
inline netex::Instance sqrt_instance() {
  netex::Actor buyer{"b1", netex::Side::Buyer, 1.0,
                     netex::AdditivePower{0.5, 0.5, 1.0}};
  netex::Actor seller{"s1", netex::Side::Seller, 1.0,
                      netex::AdditivePower{0.5, 0.5, 1.0}};
  netex::Instance inst({buyer, seller}, {{"b1", "s1", 1.0}});
  netex::validate_instance(inst);
  return inst;
}

// Two identical sqrt buyers competing for one seller.
inline netex::Instance competition_instance() {
  netex::AdditivePower sqrt_u{0.5, 0.5, 1.0};
  std::vector<netex::Actor> actors{
      {"b1", netex::Side::Buyer, 1.0, sqrt_u},
      {"b2", netex::Side::Buyer, 1.0, sqrt_u},
      {"s1", netex::Side::Seller, 1.0, sqrt_u},
  };
  netex::Instance inst(actors, {{"b1", "s1", 1.0}, {"b2", "s1", 1.0}});
  netex::validate_instance(inst);
  return inst;
}

// Asymmetric additive-power pair with a binding capacity.
inline netex::Instance asym_instance() {
  netex::Actor buyer{"b1", netex::Side::Buyer, 1.2,
                     netex::AdditivePower{0.6, 0.4, 1.3}};
  netex::Actor seller{"s1", netex::Side::Seller, 0.9,
                      netex::AdditivePower{0.45, 0.7, 0.8}};
  netex::Instance inst({buyer, seller}, {{"b1", "s1", 0.9}});
  netex::validate_instance(inst);
  return inst;
}

// CES buyer against a shifted Cobb-Douglas seller, slack capacity.
inline netex::Instance mixed_instance() {
  netex::Actor buyer{"b1", netex::Side::Buyer, 1.5, netex::Ces{0.5, 0.5}};
  netex::Actor seller{"s1", netex::Side::Seller, 1.0,
                      netex::ShiftedCobbDouglas{0.3, 0.4, 0.6}};
  netex::Instance inst({buyer, seller}, {{"b1", "s1", 1.2}});
  netex::validate_instance(inst);
  return inst;
}

inline std::vector<netex::Instance> frontier_fixtures() {
  std::vector<netex::Instance> v;
  v.push_back(sqrt_instance());
  v.push_back(asym_instance());
  v.push_back(mixed_instance());
  return v;
}

struct GridPoint {
  double m_i, m_j, v_i, v_j;
};

// Every grid point of EX with both payoffs, in row-major order.
inline std::vector<GridPoint> ex_grid(const netex::Instance& inst,
                                      const netex::EdgeKey& key, double step) {
  const netex::EdgeSpec* edge = inst.find_edge(key);
  const netex::PayoffFn& pb = inst.payoff_fn(key.buyer);
  const netex::PayoffFn& ps = inst.payoff_fn(key.seller);
  std::vector<GridPoint> grid;
  const int ni = static_cast<int>(std::floor(pb.endowment() / step)) + 1;
  const int nj = static_cast<int>(std::floor(ps.endowment() / step)) + 1;
  for (int a = 0; a < ni; ++a) {
    const double m_i = std::min(pb.endowment(), a * step);
    for (int b = 0; b < nj; ++b) {
      const double m_j = std::min(ps.endowment(), b * step);
      if (m_i + m_j > edge->capacity) break;
      grid.push_back({m_i, m_j, pb(m_i, m_j), ps(m_j, m_i)});
    }
  }
  return grid;
}

// Brute-force frontier value: best v_j over grid points with v_i >= level.
inline double grid_frontier_value(const std::vector<GridPoint>& grid,
                                  double level) {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& p : grid)
    if (p.v_i >= level) best = std::max(best, p.v_j);
  return best;
}

}  // namespace fixtures

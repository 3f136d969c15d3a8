#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "netex/model.hpp"

// Per-edge Pareto frontier machinery.
//
// For an edge (i, j) the possible exchange set EX is the polytope
//   0 <= m_i <= |M_i|,  0 <= m_j <= |M_j|,  m_i + m_j <= W,
// and the rationally feasible set RX additionally requires both payoffs
// nonnegative. For a payoff level q of one endpoint, the unique
// Pareto-efficient exchange maximizes the other endpoint's payoff over the
// upper-level set {V >= q}. The induced frontier maps value_ji / value_ij
// are strictly decreasing, continuous, and inverse to each other; the RQ
// path parametrizes the rationally feasible part of the frontier by
// s in [0, 1].

namespace netex {

struct PayoffVector {
  double v_i{0.0};
  double v_j{0.0};
};

enum class ExchangeSet { EX, RX };

struct PayoffBounds {
  double v_min_i{0.0};
  double v_max_i{0.0};
  double v_min_j{0.0};
  double v_max_j{0.0};

  double min_of(Side side) const {
    return side == Side::Buyer ? v_min_i : v_min_j;
  }
  double max_of(Side side) const {
    return side == Side::Buyer ? v_max_i : v_max_j;
  }
};

class FrontierMap {
 public:
  FrontierMap(EdgeSpec edge, PayoffFn buyer_payoff, PayoffFn seller_payoff,
              NumericConfig numerics);
  ~FrontierMap();
  FrontierMap(const FrontierMap&) = delete;
  FrontierMap& operator=(const FrontierMap&) = delete;

  const EdgeSpec& edge() const { return edge_; }
  const NumericConfig& numerics() const { return numerics_; }

  const PayoffBounds& bounds(ExchangeSet set) const;

  bool in_ex(const Exchange& x) const;
  bool in_rx(const Exchange& x) const;

  // V_ij / V_ji at an exchange; requires the exchange to lie in EX.
  double payoff_of(Side side, const Exchange& x) const;

  // Unique Pareto-efficient exchange giving the buyer at least q_i
  // (level over the EX payoff range of the buyer).
  Exchange pareto_point(double q_i) const;
  // Same with the roles swapped: level q_j on the seller's payoff.
  Exchange pareto_point_j(double q_j) const;

  // Frontier maps V^p: the partner's payoff at the level's Pareto point.
  double value_ji(double q_i) const;  // strictly decreasing in q_i
  double value_ij(double q_j) const;

  // q_i with value_ji(q_i) = v_j, by bisection on the decreasing frontier.
  double inverse_ji(double v_j) const;

  // Path of rationally feasible Pareto-efficient payoff vectors,
  // rq(0) = (0, v_max_j(RX)), rq(1) = (v_max_i(RX), 0).
  PayoffVector rq(double s) const;
  // Exact affine inverse of the first component of rq.
  double rq_param_of_payoff_i(double u_i) const;

  // Path over the full EX payoff range (diagnostics; may carry negative
  // payoffs).
  PayoffVector pq(double s) const;

  // Side-neutral helpers used by the stability checker and the solver.
  double rx_max(Side side) const;
  // Partner's frontier payoff when `level_side` is held at payoff q.
  double frontier_other(Side level_side, double q) const;
  // Interpolated variant for search interiors; never used for final answers.
  double frontier_other_approx(Side level_side, double q) const;

 private:
  struct Direction;  // one orientation of the level/maximize scheme

  const Direction& dir(Side level_side) const;
  Exchange exchange_from(Side level_side, double lead_give,
                         double follow_give) const;

  EdgeSpec edge_;
  PayoffFn buyer_pay_;
  PayoffFn seller_pay_;
  NumericConfig numerics_;
  PayoffBounds bounds_ex_;
  PayoffBounds bounds_rx_;
  std::unique_ptr<Direction> dir_buyer_;
  std::unique_ptr<Direction> dir_seller_;
};

// Lazily built FrontierMap per edge of a validated instance. Thread-safe;
// concurrent queries return the same values as sequential execution.
class FrontierSet {
 public:
  explicit FrontierSet(const Instance& instance);

  const FrontierMap& at(const EdgeKey& key) const;
  const Instance& instance() const { return instance_; }

 private:
  const Instance& instance_;
  mutable std::mutex mutex_;
  mutable std::map<EdgeKey, std::unique_ptr<FrontierMap>> maps_;
};

// Membership per the defining inequality systems.
bool in_EX(const FrontierMap& fm, const Exchange& x);
bool in_RX(const FrontierMap& fm, const Exchange& x);

PayoffBounds payoff_bounds(const FrontierMap& fm, ExchangeSet set);

// CSV over the RQ path: header `s,u_i,u_j,m_i,m_j`, n_samples rows with s
// uniform on [0, 1]; u_i non-decreasing, u_j non-increasing down the file.
std::string frontier_csv(const FrontierMap& fm, int n_samples);

}  // namespace netex

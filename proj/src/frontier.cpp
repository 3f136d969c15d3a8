#include "netex/frontier.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "netex/scalar_search.hpp"

namespace netex {

namespace {

constexpr int kGuardGridPoints = 64;
constexpr int kApproxTablePoints = 65;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

}  // namespace

// One orientation of the level/maximize scheme. The lead side's payoff is
// pinned to the level q; the follow side's payoff is maximized over the
// upper-level set. Reduction: parametrize by the lead side's given quantity
// m, recover the smallest follow quantity y(m) keeping the lead at >= q
// (the lead payoff increases strictly in y, so y solves an equation), then
// maximize the follow payoff along m. The follow payoff is quasi-concave
// along that curve, so a guard grid plus Brent finds the unique optimum.
struct FrontierMap::Direction {
  struct Result {
    double lead_give{0.0};
    double follow_give{0.0};
    double follow_value{0.0};
  };

  const PayoffFn* lead{nullptr};
  const PayoffFn* follow{nullptr};
  double capacity{0.0};
  NumericConfig num;
  double lead_min{0.0};  // EX payoff range of the lead side
  double lead_max{0.0};
  double rx_lead_max{0.0};  // set after RX bounds are known

  mutable std::mutex mutex;
  mutable std::map<double, Result> memo;
  mutable std::vector<double> table_q;
  mutable std::vector<double> table_v;

  double lead_value(double m, double y) const { return (*lead)(m, y); }
  double follow_value_at(double m, double y) const { return (*follow)(y, m); }

  double lead_give_cap() const {
    return std::min(lead->endowment(), capacity);
  }
  double follow_give_cap(double m) const {
    return std::max(0.0, std::min(follow->endowment(), capacity - m));
  }

  // Max lead payoff when the lead gives m; strictly decreasing in m.
  double best_lead(double m) const {
    return lead_value(m, follow_give_cap(m));
  }

  // Smallest follow quantity keeping the lead at payoff >= q.
  double follow_level(double m, double q) const {
    const double y0 = lead_value(m, 0.0);
    if (y0 >= q) return 0.0;
    const double cap = follow_give_cap(m);
    const double fhi = lead_value(m, cap) - q;
    if (fhi <= 0.0) return cap;  // barely feasible; caller stays within [0, hi]
    const double f_tol = 1e-12 * (1.0 + std::fabs(q));
    return find_root(
        [&](double y) { return lead_value(m, y) - q; }, 0.0, cap, y0 - q, fhi,
        1e-15, f_tol);
  }

  Result solve(double q) const {
    const double m_cap = lead_give_cap();
    // Feasible lead quantities form [0, hi]: best_lead decreases strictly.
    double hi = m_cap;
    const double at_cap = best_lead(m_cap);
    if (at_cap < q) {
      const double at_zero = best_lead(0.0);
      if (at_zero <= q) {
        hi = 0.0;
      } else {
        hi = find_root([&](double m) { return best_lead(m) - q; }, 0.0, m_cap,
                       at_zero - q, at_cap - q, 1e-14,
                       1e-12 * (1.0 + std::fabs(q)));
      }
    }

    auto g = [&](double m) { return follow_value_at(m, follow_level(m, q)); };

    double best_m = 0.0;
    if (hi > 0.0) {
      // Guard grid brackets the window before the local search.
      double best_g = g(0.0);
      int best_k = 0;
      for (int k = 1; k < kGuardGridPoints; ++k) {
        const double m = hi * static_cast<double>(k) / (kGuardGridPoints - 1);
        const double v = g(m);
        if (v > best_g) {
          best_g = v;
          best_k = k;
        }
      }
      const double cell = hi / (kGuardGridPoints - 1);
      const double lo_b = std::max(0.0, (best_k - 1) * cell);
      const double hi_b = std::min(hi, (best_k + 1) * cell);
      best_m = minimize_scalar([&](double m) { return -g(m); }, lo_b, hi_b,
                               num.quantity_tol);
      if (g(best_m) < best_g) best_m = best_k * cell;
    }

    Result r;
    r.lead_give = best_m;
    r.follow_give = follow_level(best_m, q);
    r.follow_value = follow_value_at(best_m, r.follow_give);
    return r;
  }

  Result query(double q_raw) const {
    if (!std::isfinite(q_raw))
      throw std::invalid_argument("frontier level must be finite");
    const double slack = 16.0 * num.value_tol * (1.0 + std::fabs(lead_max));
    if (q_raw < lead_min - slack || q_raw > lead_max + slack) {
      std::ostringstream msg;
      msg << "frontier level " << q_raw << " outside [" << lead_min << ", "
          << lead_max << "]";
      throw std::invalid_argument(msg.str());
    }
    const double q = std::clamp(q_raw, lead_min, lead_max);
    {
      std::lock_guard<std::mutex> lock(mutex);
      auto it = memo.find(q);
      if (it != memo.end()) return it->second;
    }
    Result r = solve(q);
    std::lock_guard<std::mutex> lock(mutex);
    return memo.emplace(q, r).first->second;
  }

  // Piecewise-linear read of the frontier over the RX range. Search use
  // only (offer comparisons inside deferred acceptance); all published
  // values come from query().
  double approx(double q) const {
    {
      std::lock_guard<std::mutex> lock(mutex);
      if (!table_q.empty()) return interp_locked(q);
    }
    std::vector<double> qs(kApproxTablePoints), vs(kApproxTablePoints);
    for (int k = 0; k < kApproxTablePoints; ++k)
      qs[k] = rx_lead_max * static_cast<double>(k) / (kApproxTablePoints - 1);
    for (int k = 0; k < kApproxTablePoints; ++k)
      vs[k] = query(qs[k]).follow_value;
    std::lock_guard<std::mutex> lock(mutex);
    if (table_q.empty()) {
      table_q = std::move(qs);
      table_v = std::move(vs);
    }
    return interp_locked(q);
  }

  double interp_locked(double q) const {
    q = std::clamp(q, table_q.front(), table_q.back());
    auto it = std::upper_bound(table_q.begin(), table_q.end(), q);
    if (it == table_q.begin()) return table_v.front();
    if (it == table_q.end()) return table_v.back();
    const std::size_t k = static_cast<std::size_t>(it - table_q.begin());
    const double t = (q - table_q[k - 1]) / (table_q[k] - table_q[k - 1]);
    return table_v[k - 1] + t * (table_v[k] - table_v[k - 1]);
  }
};

FrontierMap::FrontierMap(EdgeSpec edge, PayoffFn buyer_payoff,
                         PayoffFn seller_payoff, NumericConfig numerics)
    : edge_(std::move(edge)),
      buyer_pay_(std::move(buyer_payoff)),
      seller_pay_(std::move(seller_payoff)),
      numerics_(numerics) {
  if (!(edge_.capacity > 0.0))
    throw std::invalid_argument("FrontierMap: capacity must be positive");
  const double w = edge_.capacity;
  const double e_i = buyer_pay_.endowment();
  const double e_j = seller_pay_.endowment();
  bounds_ex_.v_max_i = buyer_pay_(0.0, std::min(e_j, w));
  bounds_ex_.v_min_i = buyer_pay_(std::min(e_i, w), 0.0);
  bounds_ex_.v_max_j = seller_pay_(0.0, std::min(e_i, w));
  bounds_ex_.v_min_j = seller_pay_(std::min(e_j, w), 0.0);

  dir_buyer_ = std::make_unique<Direction>();
  dir_buyer_->lead = &buyer_pay_;
  dir_buyer_->follow = &seller_pay_;
  dir_buyer_->capacity = w;
  dir_buyer_->num = numerics_;
  dir_buyer_->lead_min = bounds_ex_.v_min_i;
  dir_buyer_->lead_max = bounds_ex_.v_max_i;

  dir_seller_ = std::make_unique<Direction>();
  dir_seller_->lead = &seller_pay_;
  dir_seller_->follow = &buyer_pay_;
  dir_seller_->capacity = w;
  dir_seller_->num = numerics_;
  dir_seller_->lead_min = bounds_ex_.v_min_j;
  dir_seller_->lead_max = bounds_ex_.v_max_j;

  // RX maxima: the frontier value of the other side at level 0. The null
  // exchange is always rationally feasible, so RX minima are 0.
  bounds_rx_.v_min_i = 0.0;
  bounds_rx_.v_min_j = 0.0;
  bounds_rx_.v_max_j = dir_buyer_->query(0.0).follow_value;
  bounds_rx_.v_max_i = dir_seller_->query(0.0).follow_value;
  dir_buyer_->rx_lead_max = std::max(0.0, bounds_rx_.v_max_i);
  dir_seller_->rx_lead_max = std::max(0.0, bounds_rx_.v_max_j);
}

FrontierMap::~FrontierMap() = default;

const PayoffBounds& FrontierMap::bounds(ExchangeSet set) const {
  return set == ExchangeSet::EX ? bounds_ex_ : bounds_rx_;
}

bool FrontierMap::in_ex(const Exchange& x) const {
  const double slack =
      1e-12 * std::max({1.0, buyer_pay_.endowment(), seller_pay_.endowment(),
                        edge_.capacity});
  return x.buyer_gives >= -slack &&
         x.buyer_gives <= buyer_pay_.endowment() + slack &&
         x.seller_gives >= -slack &&
         x.seller_gives <= seller_pay_.endowment() + slack &&
         x.buyer_gives + x.seller_gives <= edge_.capacity + slack;
}

bool FrontierMap::in_rx(const Exchange& x) const {
  if (!in_ex(x)) return false;
  return payoff_of(Side::Buyer, x) >= -numerics_.value_tol &&
         payoff_of(Side::Seller, x) >= -numerics_.value_tol;
}

double FrontierMap::payoff_of(Side side, const Exchange& x) const {
  if (!in_ex(x))
    throw std::invalid_argument("payoff_of: exchange outside EX");
  const double bg = std::clamp(x.buyer_gives, 0.0, buyer_pay_.endowment());
  const double sg = std::clamp(x.seller_gives, 0.0, seller_pay_.endowment());
  return side == Side::Buyer ? buyer_pay_(bg, sg) : seller_pay_(sg, bg);
}

const FrontierMap::Direction& FrontierMap::dir(Side level_side) const {
  return level_side == Side::Buyer ? *dir_buyer_ : *dir_seller_;
}

Exchange FrontierMap::exchange_from(Side level_side, double lead_give,
                                    double follow_give) const {
  if (level_side == Side::Buyer) return Exchange{lead_give, follow_give};
  return Exchange{follow_give, lead_give};
}

Exchange FrontierMap::pareto_point(double q_i) const {
  const auto r = dir_buyer_->query(q_i);
  return exchange_from(Side::Buyer, r.lead_give, r.follow_give);
}

Exchange FrontierMap::pareto_point_j(double q_j) const {
  const auto r = dir_seller_->query(q_j);
  return exchange_from(Side::Seller, r.lead_give, r.follow_give);
}

double FrontierMap::value_ji(double q_i) const {
  return dir_buyer_->query(q_i).follow_value;
}

double FrontierMap::value_ij(double q_j) const {
  return dir_seller_->query(q_j).follow_value;
}

double FrontierMap::inverse_ji(double v_j) const {
  const double slack = 16.0 * numerics_.value_tol *
                       (1.0 + std::fabs(bounds_ex_.v_max_j));
  if (v_j < bounds_ex_.v_min_j - slack || v_j > bounds_ex_.v_max_j + slack)
    throw std::invalid_argument("inverse_ji: value outside the EX range");
  const double target = std::clamp(v_j, bounds_ex_.v_min_j, bounds_ex_.v_max_j);
  // Plain bisection: value_ji is strictly decreasing, so the sign of
  // value_ji(q) - target pins the half-interval.
  double lo = bounds_ex_.v_min_i;
  double hi = bounds_ex_.v_max_i;
  if (value_ji(lo) <= target) return lo;
  if (value_ji(hi) >= target) return hi;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double f = value_ji(mid) - target;
    if (std::fabs(f) <= 0.1 * numerics_.value_tol ||
        hi - lo <= 1e-13 * std::max(1.0, std::fabs(hi))) {
      return mid;
    }
    if (f > 0.0) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

PayoffVector FrontierMap::rq(double s) const {
  if (!(s >= -1e-12 && s <= 1.0 + 1e-12))
    throw std::invalid_argument("rq: parameter outside [0, 1]");
  s = std::clamp(s, 0.0, 1.0);
  const double u_i = s * bounds_rx_.v_max_i;
  return {u_i, value_ji(u_i)};
}

double FrontierMap::rq_param_of_payoff_i(double u_i) const {
  const double vmax = bounds_rx_.v_max_i;
  if (!(vmax > 0.0))
    throw std::logic_error("rq_param_of_payoff_i: degenerate RQ path");
  if (u_i < -numerics_.value_tol || u_i > vmax + numerics_.value_tol)
    throw std::invalid_argument("rq_param_of_payoff_i: payoff outside range");
  return std::clamp(u_i, 0.0, vmax) / vmax;
}

PayoffVector FrontierMap::pq(double s) const {
  if (!(s >= -1e-12 && s <= 1.0 + 1e-12))
    throw std::invalid_argument("pq: parameter outside [0, 1]");
  s = std::clamp(s, 0.0, 1.0);
  const double u_i = (1.0 - s) * bounds_ex_.v_min_i + s * bounds_ex_.v_max_i;
  return {u_i, value_ji(u_i)};
}

double FrontierMap::rx_max(Side side) const {
  return side == Side::Buyer ? bounds_rx_.v_max_i : bounds_rx_.v_max_j;
}

double FrontierMap::frontier_other(Side level_side, double q) const {
  return dir(level_side).query(q).follow_value;
}

double FrontierMap::frontier_other_approx(Side level_side, double q) const {
  return dir(level_side).approx(q);
}

FrontierSet::FrontierSet(const Instance& instance) : instance_(instance) {}

const FrontierMap& FrontierSet::at(const EdgeKey& key) const {
  std::lock_guard<std::mutex> lock(mutex_);
  auto it = maps_.find(key);
  if (it != maps_.end()) return *it->second;
  const EdgeSpec* edge = instance_.find_edge(key);
  if (!edge)
    throw std::invalid_argument("unknown edge (" + key.buyer + ", " +
                                key.seller + ")");
  auto fm = std::make_unique<FrontierMap>(
      *edge, instance_.payoff_fn(edge->buyer),
      instance_.payoff_fn(edge->seller), instance_.numerics());
  return *maps_.emplace(key, std::move(fm)).first->second;
}

bool in_EX(const FrontierMap& fm, const Exchange& x) { return fm.in_ex(x); }
bool in_RX(const FrontierMap& fm, const Exchange& x) { return fm.in_rx(x); }

PayoffBounds payoff_bounds(const FrontierMap& fm, ExchangeSet set) {
  return fm.bounds(set);
}

std::string frontier_csv(const FrontierMap& fm, int n_samples) {
  if (n_samples < 2)
    throw std::invalid_argument("frontier_csv: need at least 2 samples");
  std::ostringstream out;
  out << "s,u_i,u_j,m_i,m_j\n";
  for (int k = 0; k < n_samples; ++k) {
    const double s =
        k == n_samples - 1 ? 1.0
                           : static_cast<double>(k) / (n_samples - 1);
    const PayoffVector v = fm.rq(s);
    const Exchange x = fm.pareto_point(v.v_i);
    out << fmt(s) << ',' << fmt(v.v_i) << ',' << fmt(v.v_j) << ','
        << fmt(x.buyer_gives) << ',' << fmt(x.seller_gives) << '\n';
  }
  return out.str();
}

}  // namespace netex

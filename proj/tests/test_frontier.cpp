#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <future>
#include <sstream>

#include "doctest.h"
#include "fixtures.hpp"
#include "netex/frontier.hpp"

using namespace netex;

namespace {

// Closed-form values on the sqrt fixture (frontier on m_i + m_j = 1):
//   u_i = 2*sqrt(1 - m) - 1, u_j = 2*sqrt(m) - 1, v_max(RX) = sqrt(3) - 1.
const double kVmaxRx = std::sqrt(3.0) - 1.0;          // 0.7320508...
const double kSymmetric = 2.0 * std::sqrt(0.5) - 1.0; // 0.4142135...

}  // namespace

TEST_CASE("EX and RX membership") {
  Instance inst = fixtures::sqrt_instance();
  FrontierSet fs(inst);
  const FrontierMap& fm = fs.at({"b1", "s1"});
  CHECK(in_EX(fm, {0.5, 0.5}));
  CHECK(in_RX(fm, {0.5, 0.5}));
  CHECK(in_EX(fm, {0.0, 0.0}));
  CHECK(in_RX(fm, {0.0, 0.0}));
  CHECK(in_EX(fm, {1.0, 0.0}));
  CHECK(!in_RX(fm, {1.0, 0.0}));  // buyer pays -1
  CHECK(!in_EX(fm, {0.7, 0.7}));  // over capacity
  CHECK(!in_EX(fm, {1.2, 0.0}));
}

TEST_CASE("payoff bounds: closed-form EX corners, RX from the frontier") {
  Instance inst = fixtures::sqrt_instance();
  FrontierSet fs(inst);
  const FrontierMap& fm = fs.at({"b1", "s1"});
  const PayoffBounds ex = payoff_bounds(fm, ExchangeSet::EX);
  CHECK(ex.v_max_i == doctest::Approx(1.0));
  CHECK(ex.v_min_i == doctest::Approx(-1.0));
  CHECK(ex.v_max_j == doctest::Approx(1.0));
  CHECK(ex.v_min_j == doctest::Approx(-1.0));
  const PayoffBounds rx = payoff_bounds(fm, ExchangeSet::RX);
  CHECK(rx.v_min_i == 0.0);
  CHECK(rx.v_min_j == 0.0);
  CHECK(rx.v_max_j == doctest::Approx(kVmaxRx).epsilon(1e-7));
  CHECK(rx.v_max_i == doctest::Approx(kVmaxRx).epsilon(1e-7));
}

TEST_CASE("pareto_point hits the known exchanges") {
  Instance inst = fixtures::sqrt_instance();
  FrontierSet fs(inst);
  const FrontierMap& fm = fs.at({"b1", "s1"});

  const Exchange sym = fm.pareto_point(kSymmetric);
  CHECK(sym.buyer_gives == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(sym.seller_gives == doctest::Approx(0.5).epsilon(1e-6));

  const Exchange top = fm.pareto_point(1.0);  // buyer's best EX corner
  CHECK(top.buyer_gives == doctest::Approx(0.0).epsilon(1e-8));
  CHECK(top.seller_gives == doctest::Approx(1.0).epsilon(1e-8));

  const Exchange zero = fm.pareto_point(0.0);
  CHECK(zero.buyer_gives == doctest::Approx(0.75).epsilon(1e-6));
  CHECK(zero.seller_gives == doctest::Approx(0.25).epsilon(1e-6));

  CHECK_THROWS_AS(fm.pareto_point(1.5), std::invalid_argument);
  CHECK_THROWS_AS(fm.pareto_point(-1.5), std::invalid_argument);
}

TEST_CASE("frontier values on the sqrt fixture") {
  Instance inst = fixtures::sqrt_instance();
  FrontierSet fs(inst);
  const FrontierMap& fm = fs.at({"b1", "s1"});
  CHECK(fm.value_ji(0.0) == doctest::Approx(kVmaxRx).epsilon(1e-7));
  CHECK(fm.value_ji(kSymmetric) == doctest::Approx(kSymmetric).epsilon(1e-6));
  const PayoffBounds ex = fm.bounds(ExchangeSet::EX);
  CHECK(fm.value_ji(ex.v_max_i) == doctest::Approx(ex.v_min_j).epsilon(1e-7));
}

TEST_CASE("tightness: the level binds at the pareto point") {
  for (const Instance& inst : fixtures::frontier_fixtures()) {
    FrontierSet fs(inst);
    const EdgeKey key = inst.edge_keys_sorted().front();
    const FrontierMap& fm = fs.at(key);
    const PayoffBounds ex = fm.bounds(ExchangeSet::EX);
    for (int k = 0; k < 40; ++k) {
      const double q =
          ex.v_min_i + (ex.v_max_i - ex.v_min_i) * (k + 0.5) / 40.0;
      const Exchange x = fm.pareto_point(q);
      CHECK(std::fabs(fm.payoff_of(Side::Buyer, x) - q) <= 5e-9);
    }
  }
}

TEST_CASE("strict monotonicity of the frontier maps") {
  for (const Instance& inst : fixtures::frontier_fixtures()) {
    FrontierSet fs(inst);
    const EdgeKey key = inst.edge_keys_sorted().front();
    const FrontierMap& fm = fs.at(key);
    const PayoffBounds ex = fm.bounds(ExchangeSet::EX);
    double prev = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= 100; ++k) {
      const double q = ex.v_min_i + (ex.v_max_i - ex.v_min_i) * k / 100.0;
      const double v = fm.value_ji(q);
      if (k > 0) CHECK(prev - v > 1e-9);
      prev = v;
    }
  }
}

TEST_CASE("the two frontier maps invert each other") {
  for (const Instance& inst : fixtures::frontier_fixtures()) {
    FrontierSet fs(inst);
    const EdgeKey key = inst.edge_keys_sorted().front();
    const FrontierMap& fm = fs.at(key);
    const PayoffBounds ex = fm.bounds(ExchangeSet::EX);
    for (int k = 0; k < 50; ++k) {
      const double q =
          ex.v_min_i + (ex.v_max_i - ex.v_min_i) * (k + 0.5) / 50.0;
      CHECK(std::fabs(fm.value_ij(fm.value_ji(q)) - q) <= 1e-8);
    }
  }
}

TEST_CASE("frontier_inverse: bisection route agrees with the forward map") {
  Instance inst = fixtures::sqrt_instance();
  FrontierSet fs(inst);
  const FrontierMap& fm = fs.at({"b1", "s1"});
  CHECK(fm.inverse_ji(kVmaxRx) == doctest::Approx(0.0).epsilon(1e-7));
  const PayoffBounds ex = fm.bounds(ExchangeSet::EX);
  CHECK(fm.inverse_ji(ex.v_min_j) == doctest::Approx(ex.v_max_i).epsilon(1e-7));
  // Round trip at an interior level.
  CHECK(std::fabs(fm.inverse_ji(fm.value_ji(0.3)) - 0.3) <= 1e-8);
  CHECK_THROWS_AS(fm.inverse_ji(5.0), std::invalid_argument);
}

TEST_CASE("rq path endpoints and monotone components") {
  for (const Instance& inst : fixtures::frontier_fixtures()) {
    FrontierSet fs(inst);
    const EdgeKey key = inst.edge_keys_sorted().front();
    const FrontierMap& fm = fs.at(key);
    const PayoffBounds rx = fm.bounds(ExchangeSet::RX);
    const PayoffVector at0 = fm.rq(0.0);
    CHECK(at0.v_i == doctest::Approx(0.0));
    CHECK(at0.v_j == doctest::Approx(rx.v_max_j).epsilon(1e-8));
    const PayoffVector at1 = fm.rq(1.0);
    CHECK(at1.v_i == doctest::Approx(rx.v_max_i).epsilon(1e-8));
    CHECK(std::fabs(at1.v_j) <= 1e-7);

    double prev_i = -1.0, prev_j = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= 100; ++k) {
      const double s = static_cast<double>(k) / 100.0;
      const PayoffVector v = fm.rq(s);
      if (k > 0) {
        CHECK(v.v_i - prev_i > 1e-9);
        CHECK(prev_j - v.v_j > 1e-9);
      }
      prev_i = v.v_i;
      prev_j = v.v_j;
      CHECK(fm.rq_param_of_payoff_i(v.v_i) == doctest::Approx(s).epsilon(1e-12));
    }
    CHECK_THROWS_AS(fm.rq(1.5), std::invalid_argument);
  }
}

TEST_CASE("rq at the symmetric split of the sqrt fixture") {
  Instance inst = fixtures::sqrt_instance();
  FrontierSet fs(inst);
  const FrontierMap& fm = fs.at({"b1", "s1"});
  const double s = fm.rq_param_of_payoff_i(kSymmetric);  // 0.565826...
  CHECK(s == doctest::Approx(kSymmetric / kVmaxRx).epsilon(1e-7));
  const PayoffVector v = fm.rq(s);
  CHECK(v.v_i == doctest::Approx(kSymmetric).epsilon(1e-6));
  CHECK(v.v_j == doctest::Approx(kSymmetric).epsilon(1e-6));
}

TEST_CASE("pq spans the full EX range") {
  Instance inst = fixtures::sqrt_instance();
  FrontierSet fs(inst);
  const FrontierMap& fm = fs.at({"b1", "s1"});
  const PayoffBounds ex = fm.bounds(ExchangeSet::EX);
  const PayoffVector at0 = fm.pq(0.0);
  CHECK(at0.v_i == doctest::Approx(ex.v_min_i));
  CHECK(at0.v_j == doctest::Approx(ex.v_max_j).epsilon(1e-7));
  const PayoffVector at1 = fm.pq(1.0);
  CHECK(at1.v_i == doctest::Approx(ex.v_max_i));
  CHECK(at1.v_j == doctest::Approx(ex.v_min_j).epsilon(1e-7));
}

TEST_CASE("grid oracle: no EX grid point dominates a pareto point") {
  Instance inst = fixtures::sqrt_instance();
  FrontierSet fs(inst);
  const FrontierMap& fm = fs.at({"b1", "s1"});
  const auto grid = fixtures::ex_grid(inst, {"b1", "s1"}, 1e-3);
  const PayoffBounds ex = fm.bounds(ExchangeSet::EX);
  for (int k = 0; k < 7; ++k) {
    const double q = ex.v_min_i + (ex.v_max_i - ex.v_min_i) * (k + 0.5) / 7.0;
    const Exchange x = fm.pareto_point(q);
    const double p_i = fm.payoff_of(Side::Buyer, x);
    const double p_j = fm.payoff_of(Side::Seller, x);
    for (const auto& g : grid) {
      CHECK(!(g.v_i >= p_i + 1e-5 && g.v_j >= p_j + 1e-5));
    }
    // And the frontier value itself tracks the grid's best.
    const double oracle = fixtures::grid_frontier_value(grid, q);
    CHECK(p_j >= oracle - 1e-9);
    CHECK(p_j <= oracle + 6e-3);  // oracle lags by at most one grid cell
  }
}

TEST_CASE("sampled EX payoffs stay inside the bounds box; no jumps") {
  for (const Instance& inst : fixtures::frontier_fixtures()) {
    FrontierSet fs(inst);
    const EdgeKey key = inst.edge_keys_sorted().front();
    const FrontierMap& fm = fs.at(key);
    const PayoffBounds ex = fm.bounds(ExchangeSet::EX);
    for (const auto& g : fixtures::ex_grid(inst, key, 0.02)) {
      CHECK(g.v_i >= ex.v_min_i - 1e-9);
      CHECK(g.v_i <= ex.v_max_i + 1e-9);
      CHECK(g.v_j >= ex.v_min_j - 1e-9);
      CHECK(g.v_j <= ex.v_max_j + 1e-9);
    }
    // Connectedness proxy: consecutive frontier samples never jump by more
    // than a few times their neighbors' increments.
    std::vector<double> vals;
    for (int k = 0; k <= 200; ++k)
      vals.push_back(
          fm.value_ji(ex.v_min_i + (ex.v_max_i - ex.v_min_i) * k / 200.0));
    for (std::size_t k = 1; k + 1 < vals.size(); ++k) {
      const double gap = std::fabs(vals[k] - vals[k - 1]);
      const double nbr = std::max(std::fabs(vals[k + 1] - vals[k]),
                                  k >= 2 ? std::fabs(vals[k - 1] - vals[k - 2])
                                         : 0.0);
      CHECK(gap <= 10.0 * nbr + 1e-6);
    }
  }
}

TEST_CASE("concurrent queries return the sequential values") {
  Instance inst = fixtures::mixed_instance();
  FrontierSet fs(inst);
  const EdgeKey key = inst.edge_keys_sorted().front();

  // Sequential reference on a fresh map.
  FrontierSet fs_ref(inst);
  const FrontierMap& ref = fs_ref.at(key);
  const PayoffBounds ex = ref.bounds(ExchangeSet::EX);
  std::vector<double> qs, expected;
  for (int k = 0; k < 64; ++k) {
    qs.push_back(ex.v_min_i + (ex.v_max_i - ex.v_min_i) * k / 63.0);
    expected.push_back(ref.value_ji(qs.back()));
  }

  const FrontierMap& fm = fs.at(key);
  std::vector<std::future<std::vector<double>>> workers;
  for (int w = 0; w < 4; ++w) {
    workers.push_back(std::async(std::launch::async, [&fm, &qs, w] {
      std::vector<double> out;
      for (std::size_t k = 0; k < qs.size(); ++k)
        out.push_back(fm.value_ji(qs[(k + static_cast<std::size_t>(w) * 17) %
                                      qs.size()]));
      return out;
    }));
  }
  for (int w = 0; w < 4; ++w) {
    const auto got = workers[static_cast<std::size_t>(w)].get();
    for (std::size_t k = 0; k < qs.size(); ++k) {
      const std::size_t idx = (k + static_cast<std::size_t>(w) * 17) % qs.size();
      CHECK(got[k] == expected[idx]);
    }
  }
}

TEST_CASE("frontier CSV: shape, endpoints, monotone columns") {
  Instance inst = fixtures::sqrt_instance();
  FrontierSet fs(inst);
  const std::string csv = frontier_csv(fs.at({"b1", "s1"}), 3);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == "s,u_i,u_j,m_i,m_j");
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    std::vector<double> row;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(row);
  }
  REQUIRE(rows.size() == 3);
  CHECK(rows[0][1] == 0.0);                                      // u_i at s=0
  CHECK(rows[0][2] == doctest::Approx(kVmaxRx).epsilon(1e-6));   // u_j at s=0
  CHECK(rows[1][1] == doctest::Approx(0.366025).epsilon(1e-5));
  CHECK(rows[1][2] == doctest::Approx(0.460813).epsilon(1e-5));
  CHECK(rows[2][1] == doctest::Approx(kVmaxRx).epsilon(1e-6));
  CHECK(std::fabs(rows[2][2]) <= 1e-7);                          // u_j at s=1
  for (std::size_t k = 1; k < rows.size(); ++k) {
    CHECK(rows[k][1] >= rows[k - 1][1]);  // u_i non-decreasing
    CHECK(rows[k][2] <= rows[k - 1][2]);  // u_j non-increasing
  }
  CHECK_THROWS_AS(frontier_csv(fs.at({"b1", "s1"}), 1), std::invalid_argument);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "doctest.h"
#include "netex/utility.hpp"

using namespace netex;

TEST_CASE("parameter ranges are enforced per family") {
  CHECK(!spec_error(AdditivePower{0.5, 0.5, 1.0}));
  CHECK(spec_error(AdditivePower{1.2, 0.5, 1.0}));
  CHECK(spec_error(AdditivePower{0.5, 0.0, 1.0}));
  CHECK(spec_error(AdditivePower{0.5, 0.5, -1.0}));
  CHECK(!spec_error(ShiftedCobbDouglas{1.0, 1.0, 0.5}));
  CHECK(spec_error(ShiftedCobbDouglas{0.0, 1.0, 0.5}));
  CHECK(spec_error(ShiftedCobbDouglas{1.0, 1.0, 1.0}));
  CHECK(!spec_error(Ces{0.5, 0.5}));
  CHECK(spec_error(Ces{1.0, 0.5}));
  CHECK(spec_error(Ces{0.5, 0.0}));
  CHECK_THROWS_AS(PayoffFn(AdditivePower{1.2, 0.5, 1.0}, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(PayoffFn(AdditivePower{}, 0.0), std::invalid_argument);
}

TEST_CASE("eval_utility matches closed forms") {
  const UtilitySpec sqrt_u = AdditivePower{0.5, 0.5, 1.0};
  CHECK(eval_utility(sqrt_u, 1.0, 0.0) == doctest::Approx(1.0));
  CHECK(eval_utility(sqrt_u, 0.5, 0.5) ==
        doctest::Approx(1.414214).epsilon(1e-6));
  CHECK(eval_utility(ShiftedCobbDouglas{1.0, 1.0, 0.5}, 0.0, 0.0) ==
        doctest::Approx(1.0));
  CHECK(eval_utility(Ces{0.5, 0.5}, 1.0, 1.0) == doctest::Approx(1.0));
  CHECK_THROWS_AS(eval_utility(sqrt_u, -0.1, 0.0), std::domain_error);
}

TEST_CASE("payoff is zero at the null exchange, exactly") {
  const PayoffFn v(AdditivePower{0.5, 0.5, 1.0}, 1.0);
  CHECK(v(0.0, 0.0) == 0.0);
  const PayoffFn v2(Ces{0.37, 0.61}, 1.7);
  CHECK(v2(0.0, 0.0) == 0.0);
  const PayoffFn v3(ShiftedCobbDouglas{0.4, 1.3, 0.55}, 0.8);
  CHECK(v3(0.0, 0.0) == 0.0);
}

TEST_CASE("payoff examples on the sqrt fixture") {
  const PayoffFn v(AdditivePower{0.5, 0.5, 1.0}, 1.0);
  CHECK(v(0.5, 0.5) == doctest::Approx(0.414214).epsilon(1e-6));
  CHECK(v(1.0, 0.0) == doctest::Approx(-1.0));
  CHECK_THROWS_AS(v(1.5, 0.0), std::domain_error);
}

TEST_CASE("payoff strictly falls in give and rises in receive") {
  const std::vector<PayoffFn> fns{
      PayoffFn(AdditivePower{0.5, 0.5, 1.0}, 1.0),
      PayoffFn(AdditivePower{0.7, 0.35, 1.6}, 1.4),
      PayoffFn(ShiftedCobbDouglas{0.3, 0.4, 0.6}, 1.0),
      PayoffFn(Ces{0.5, 0.5}, 1.5),
  };
  std::mt19937_64 rng(7);
  auto u01 = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  const double h = 1e-6;
  for (const auto& v : fns) {
    for (int k = 0; k < 200; ++k) {
      const double give = 0.05 + 0.8 * u01() * v.endowment();
      const double recv = 0.05 + 0.9 * u01();
      const double base = v(give, recv);
      CHECK(v(give + h, recv) - base < -1e-12 * std::max(1.0, std::fabs(base)));
      CHECK(v(give, recv + h) - base > 1e-12 * std::max(1.0, std::fabs(base)));
    }
  }
}

TEST_CASE("utilities are continuous: small moves, small changes") {
  const std::vector<UtilitySpec> specs{AdditivePower{0.5, 0.5, 1.0},
                                       ShiftedCobbDouglas{0.3, 0.4, 0.6},
                                       Ces{0.5, 0.5}};
  std::mt19937_64 rng(11);
  auto u01 = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  for (const auto& spec : specs) {
    // Local slope estimated at a coarse step bounds the fine-step change.
    for (int k = 0; k < 200; ++k) {
      const double x = 0.1 + 0.8 * u01();
      const double y = 0.1 + 0.8 * u01();
      const double coarse = 1e-3, fine = 1e-7;
      const double slope = std::fabs(eval_utility(spec, x + coarse, y) -
                                     eval_utility(spec, x - coarse, y)) /
                           (2 * coarse);
      const double dfine = std::fabs(eval_utility(spec, x + fine, y) -
                                     eval_utility(spec, x, y));
      CHECK(dfine <= 10.0 * slope * fine + 1e-12);
    }
  }
}

TEST_CASE("verify_properties passes the admitted families") {
  const Box box{0.0, 1.0, 0.0, 1.0};
  auto r1 = verify_properties(AdditivePower{0.5, 0.5, 1.0}, box, 1000, 5);
  CHECK(r1.ok());
  CHECK(r1.monotonicity_samples > 500);
  auto r2 = verify_properties(Ces{0.5, 0.5}, box, 1000, 5);
  CHECK(r2.ok());
  auto r3 = verify_properties(ShiftedCobbDouglas{0.3, 0.4, 0.6}, box, 1000, 5);
  CHECK(r3.ok());
}

TEST_CASE("verify_properties flags a linear candidate") {
  // u = x + y has flat level segments: no strict quasi-concavity.
  auto r = verify_properties_fn([](double x, double y) { return x + y; },
                                Box{0.0, 1.0, 0.0, 1.0}, 1000, 13);
  CHECK(!r.ok());
  bool saw_qc = false;
  for (const auto& v : r.violations)
    if (v.find("quasi-concavity") != std::string::npos) saw_qc = true;
  CHECK(saw_qc);
}

TEST_CASE("verify_properties flags a non-monotone candidate") {
  auto r = verify_properties_fn(
      [](double x, double y) { return -(x * x) - y * y; },
      Box{0.0, 1.0, 0.0, 1.0}, 500, 17);
  CHECK(!r.ok());
}

TEST_CASE("verify_properties requires at least two samples") {
  CHECK_THROWS_AS(verify_properties(AdditivePower{}, Box{0, 1, 0, 1}, 1, 0),
                  std::invalid_argument);
}

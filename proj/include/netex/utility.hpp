#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

// Utility families and bilateral payoff functions.
//
// A utility u(own, other) maps the bundle an actor holds (units of its own
// item left, units of the partner's item received) to a scalar. Every
// admitted family is continuous, strictly quasi-concave and strongly
// monotone on the closed nonnegative quadrant; the parameter ranges below
// are exactly the ones for which that holds.

namespace netex {

struct AdditivePower {  // u = own^alpha + c * other^beta
  double alpha{0.5};
  double beta{0.5};
  double c{1.0};
};

struct ShiftedCobbDouglas {  // u = (own + a)^theta * (other + b)^(1 - theta)
  double a{1.0};
  double b{1.0};
  double theta{0.5};
};

struct Ces {  // u = (w * own^rho + (1 - w) * other^rho)^(1 / rho)
  double rho{0.5};
  double w{0.5};
};

using UtilitySpec = std::variant<AdditivePower, ShiftedCobbDouglas, Ces>;

// Empty if the parameters are in range; otherwise a description of the
// first violated constraint.
std::optional<std::string> spec_error(const UtilitySpec& spec);

const char* family_name(const UtilitySpec& spec);

// u(own, other); both arguments must be >= 0.
double eval_utility(const UtilitySpec& spec, double own, double other);

// Payoff of one actor in a bilateral exchange:
//   V(give, receive) = u(endowment - give, receive) - u(endowment, 0).
// The baseline is evaluated once at construction so V(0, 0) == 0 exactly.
// V strictly decreases in give and strictly increases in receive.
class PayoffFn {
 public:
  PayoffFn() = default;
  PayoffFn(UtilitySpec spec, double endowment);

  double operator()(double give, double receive) const;

  double endowment() const { return endowment_; }
  const UtilitySpec& spec() const { return spec_; }

 private:
  UtilitySpec spec_{AdditivePower{}};
  double endowment_{1.0};
  double baseline_{0.0};
};

struct Box {
  double own_lo{0.0};
  double own_hi{1.0};
  double other_lo{0.0};
  double other_hi{1.0};
};

struct PropertyReport {
  std::vector<std::string> violations;
  int monotonicity_samples{0};
  int quasiconcavity_samples{0};
  bool ok() const { return violations.empty(); }
};

// Sampling net over the stated assumptions: strong monotonicity
// (pointwise >= with one > implies strictly greater value) and strict
// quasi-concavity (midpoint of two distinct same-level points lies strictly
// above the level). Takes an arbitrary candidate so tests can inject
// functions outside the admitted families.
PropertyReport verify_properties_fn(
    const std::function<double(double, double)>& fn, const Box& box,
    int n_samples, std::uint64_t seed);

PropertyReport verify_properties(const UtilitySpec& spec, const Box& box,
                                 int n_samples, std::uint64_t seed);

}  // namespace netex

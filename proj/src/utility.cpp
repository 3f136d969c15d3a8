#include "netex/utility.hpp"

#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

namespace netex {

namespace {

double u01(std::mt19937_64& rng) {
  // Explicit mapping instead of std::uniform_real_distribution so draws are
  // identical across standard library implementations.
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double in_range(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * u01(rng);
}

}  // namespace

std::optional<std::string> spec_error(const UtilitySpec& spec) {
  std::ostringstream err;
  if (const auto* ap = std::get_if<AdditivePower>(&spec)) {
    if (!(ap->alpha > 0.0 && ap->alpha < 1.0))
      err << "additive_power: alpha must be in (0, 1), got " << ap->alpha;
    else if (!(ap->beta > 0.0 && ap->beta < 1.0))
      err << "additive_power: beta must be in (0, 1), got " << ap->beta;
    else if (!(ap->c > 0.0))
      err << "additive_power: c must be > 0, got " << ap->c;
  } else if (const auto* cd = std::get_if<ShiftedCobbDouglas>(&spec)) {
    if (!(cd->a > 0.0))
      err << "shifted_cobb_douglas: a must be > 0, got " << cd->a;
    else if (!(cd->b > 0.0))
      err << "shifted_cobb_douglas: b must be > 0, got " << cd->b;
    else if (!(cd->theta > 0.0 && cd->theta < 1.0))
      err << "shifted_cobb_douglas: theta must be in (0, 1), got " << cd->theta;
  } else if (const auto* ces = std::get_if<Ces>(&spec)) {
    if (!(ces->rho > 0.0 && ces->rho < 1.0))
      err << "ces: rho must be in (0, 1), got " << ces->rho;
    else if (!(ces->w > 0.0 && ces->w < 1.0))
      err << "ces: w must be in (0, 1), got " << ces->w;
  }
  const std::string s = err.str();
  if (s.empty()) return std::nullopt;
  return s;
}

const char* family_name(const UtilitySpec& spec) {
  switch (spec.index()) {
    case 0: return "additive_power";
    case 1: return "shifted_cobb_douglas";
    default: return "ces";
  }
}

double eval_utility(const UtilitySpec& spec, double own, double other) {
  if (own < 0.0 || other < 0.0)
    throw std::domain_error("eval_utility: negative bundle component");
  switch (spec.index()) {
    case 0: {
      const auto& p = std::get<AdditivePower>(spec);
      return std::pow(own, p.alpha) + p.c * std::pow(other, p.beta);
    }
    case 1: {
      const auto& p = std::get<ShiftedCobbDouglas>(spec);
      return std::pow(own + p.a, p.theta) *
             std::pow(other + p.b, 1.0 - p.theta);
    }
    default: {
      const auto& p = std::get<Ces>(spec);
      const double inner =
          p.w * std::pow(own, p.rho) + (1.0 - p.w) * std::pow(other, p.rho);
      return std::pow(inner, 1.0 / p.rho);
    }
  }
}

PayoffFn::PayoffFn(UtilitySpec spec, double endowment)
    : spec_(std::move(spec)), endowment_(endowment) {
  if (!(endowment_ > 0.0))
    throw std::invalid_argument("PayoffFn: endowment must be positive");
  if (auto err = spec_error(spec_))
    throw std::invalid_argument("PayoffFn: " + *err);
  baseline_ = eval_utility(spec_, endowment_, 0.0);
}

double PayoffFn::operator()(double give, double receive) const {
  constexpr double kSlack = 1e-12;
  if (give < -kSlack || receive < -kSlack || give > endowment_ + kSlack)
    throw std::domain_error("PayoffFn: exchange outside the actor's bounds");
  const double own = std::max(0.0, std::min(endowment_, endowment_ - give));
  return eval_utility(spec_, own, std::max(0.0, receive)) - baseline_;
}

PropertyReport verify_properties_fn(
    const std::function<double(double, double)>& fn, const Box& box,
    int n_samples, std::uint64_t seed) {
  if (n_samples < 2)
    throw std::invalid_argument("verify_properties: n_samples must be >= 2");

  PropertyReport report;
  std::mt19937_64 rng(seed);
  const double span_x = box.own_hi - box.own_lo;
  const double span_y = box.other_hi - box.other_lo;
  const double min_sep = 1e-3 * std::max(span_x, span_y);

  auto flag = [&](const std::string& what) {
    if (report.violations.size() < 32) report.violations.push_back(what);
  };

  for (int k = 0; k < n_samples; ++k) {
    // Strong monotonicity: q >= p pointwise with at least one strict step.
    double px = in_range(rng, box.own_lo, box.own_hi);
    double py = in_range(rng, box.other_lo, box.other_hi);
    double dx = u01(rng) < 0.5 ? 0.0 : in_range(rng, 0.0, box.own_hi - px);
    double dy = in_range(rng, 0.0, box.other_hi - py);
    if (dx < min_sep && dy < min_sep) dy = std::min(box.other_hi - py, min_sep);
    if (dx + dy > 0.0) {
      const double up = fn(px, py);
      const double uq = fn(px + dx, py + dy);
      ++report.monotonicity_samples;
      if (!(uq - up > 1e-12 * std::max(1.0, std::fabs(up)))) {
        std::ostringstream msg;
        msg << "strong monotonicity violated at (" << px << ", " << py
            << ") -> (" << px + dx << ", " << py + dy << "): " << up
            << " vs " << uq;
        flag(msg.str());
      }
    }

    // Strict quasi-concavity: pick two distinct points on one level curve,
    // the midpoint must sit strictly above the level.
    px = in_range(rng, box.own_lo + 0.05 * span_x, box.own_hi - 0.05 * span_x);
    py = in_range(rng, box.other_lo + 0.05 * span_y,
                  box.other_hi - 0.05 * span_y);
    const double level = fn(px, py);
    const double qx =
        in_range(rng, box.own_lo + 0.05 * span_x, box.own_hi - 0.05 * span_x);
    // Solve fn(qx, y) = level for y by bisection; fn increases in y.
    double lo = box.other_lo, hi = box.other_hi;
    double flo = fn(qx, lo) - level, fhi = fn(qx, hi) - level;
    if (flo > 0.0 || fhi < 0.0) continue;  // level not reachable at this qx
    for (int it = 0; it < 80 && hi - lo > 1e-14 * std::max(1.0, hi); ++it) {
      const double mid = 0.5 * (lo + hi);
      const double fm = fn(qx, mid) - level;
      if (fm < 0.0) lo = mid; else hi = mid;
    }
    const double qy = 0.5 * (lo + hi);
    const double dist = std::hypot(px - qx, py - qy);
    if (dist < min_sep) continue;
    const double mid_val = fn(0.5 * (px + qx), 0.5 * (py + qy));
    ++report.quasiconcavity_samples;
    if (mid_val - std::min(level, fn(qx, qy)) <=
        1e-11 * std::max(1.0, std::fabs(level))) {
      std::ostringstream msg;
      msg << "strict quasi-concavity violated between (" << px << ", " << py
          << ") and (" << qx << ", " << qy << "): midpoint " << mid_val
          << " vs level " << level;
      flag(msg.str());
    }
  }
  return report;
}

PropertyReport verify_properties(const UtilitySpec& spec, const Box& box,
                                 int n_samples, std::uint64_t seed) {
  return verify_properties_fn(
      [&spec](double own, double other) {
        return eval_utility(spec, own, other);
      },
      box, n_samples, seed);
}

}  // namespace netex

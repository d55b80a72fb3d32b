#include "relev/distribution.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>

#include <boost/math/special_functions/gamma.hpp>

#include "relev/errors.hpp"

namespace relev {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;
constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  // Shortest representation that still round-trips.
  for (int prec = 1; prec <= 17; ++prec) {
    char shortbuf[32];
    std::snprintf(shortbuf, sizeof shortbuf, "%.*g", prec, v);
    if (std::strtod(shortbuf, nullptr) == v) return shortbuf;
  }
  return buf;
}

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw DomainError(std::string(what) + " must be positive and finite");
  }
}

void require_time(double t) {
  if (!(t >= 0.0)) throw DomainError("time must be >= 0, got " + format_number(t));
}

void require_open_unit(double u, const char* what) {
  if (!(u > 0.0 && u < 1.0)) {
    throw DomainError(std::string(what) + " must lie in (0,1), got " + format_number(u));
  }
}

}  // namespace

LifetimeDistribution::LifetimeDistribution(Family family, NumericOptions options)
    : family_(family), options_(options) {
  std::visit(Overloaded{
                 [](const Exponential& e) { require_positive(e.rate, "exponential rate"); },
                 [](const Gamma& g) {
                   require_positive(g.shape, "gamma shape");
                   require_positive(g.scale, "gamma scale");
                 },
                 [](const Weibull& w) {
                   require_positive(w.shape, "weibull shape");
                   require_positive(w.scale, "weibull scale");
                 },
                 [](const auto&) {},
             },
             family_);
  require_positive(options_.quad_tol, "quadrature tolerance");
  require_positive(options_.bracket_bound, "bracket bound");
}

LifetimeDistribution LifetimeDistribution::exponential(double rate) {
  return LifetimeDistribution(Exponential{rate});
}
LifetimeDistribution LifetimeDistribution::gamma(double shape, double scale) {
  return LifetimeDistribution(Gamma{shape, scale});
}
LifetimeDistribution LifetimeDistribution::weibull(double shape, double scale) {
  return LifetimeDistribution(Weibull{shape, scale});
}
LifetimeDistribution LifetimeDistribution::stoyanov() { return LifetimeDistribution(StoyanovNBU{}); }
LifetimeDistribution LifetimeDistribution::lai_xie() {
  return LifetimeDistribution(LaiXieNonMonotone{});
}

double LifetimeDistribution::base_cumulative_hazard(double x) const {
  return std::visit(
      Overloaded{
          [x](const Exponential& e) { return e.rate * x; },
          [x](const Gamma& g) {
            const double z = x / g.scale;
            const double p = boost::math::gamma_p(g.shape, z);
            if (p < 0.5) return -std::log1p(-p);
            const double q = boost::math::gamma_q(g.shape, z);
            return q > 0.0 ? -std::log(q) : kInf;
          },
          [x](const Weibull& w) { return std::pow(x / w.scale, w.shape); },
          [x](const StoyanovNBU&) {
            if (x <= kHalfPi) {
              const double s = std::sin(x);
              return s * s;
            }
            return kHalfPi * (x - kHalfPi) + 1.0;
          },
          [x](const LaiXieNonMonotone&) { return std::pow(x, 0.2) * std::exp(1.1 * x); },
      },
      family_);
}

double LifetimeDistribution::base_hazard(double x) const {
  return std::visit(
      Overloaded{
          [](const Exponential& e) { return e.rate; },
          [x](const Gamma& g) {
            if (x == 0.0) {
              if (g.shape < 1.0) return kInf;
              return g.shape == 1.0 ? 1.0 / g.scale : 0.0;
            }
            const double z = x / g.scale;
            const double q = boost::math::gamma_q(g.shape, z);
            if (q <= 0.0) return 1.0 / g.scale;  // asymptotic tail hazard
            return boost::math::gamma_p_derivative(g.shape, z) / g.scale / q;
          },
          [x](const Weibull& w) {
            return w.shape / w.scale * std::pow(x / w.scale, w.shape - 1.0);
          },
          // Closed branch [0, pi/2]; the right branch starts strictly after.
          [x](const StoyanovNBU&) { return x <= kHalfPi ? std::sin(2.0 * x) : kHalfPi; },
          [x](const LaiXieNonMonotone&) {
            if (x == 0.0) return kInf;
            return std::exp(1.1 * x) * (0.2 * std::pow(x, -0.8) + 1.1 * std::pow(x, 0.2));
          },
      },
      family_);
}

double LifetimeDistribution::bisect_base_inverse(double y) const {
  double lo = 0.0;
  double hi = 1.0;
  if (base_cumulative_hazard(hi) < y) {
    lo = hi;
    while (base_cumulative_hazard(hi) < y) {
      lo = hi;
      hi *= 2.0;
      if (hi > options_.bracket_bound) {
        throw NumericError("no quantile bracket below " + format_number(options_.bracket_bound) +
                           " for " + describe() + " at cumulative hazard " + format_number(y));
      }
    }
  } else {
    lo = 0.5;
    while (base_cumulative_hazard(lo) >= y) {
      hi = lo;
      lo *= 0.5;
      if (lo < std::numeric_limits<double>::min()) return hi;
    }
  }
  while (hi - lo > 1e-12 * hi) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (base_cumulative_hazard(mid) < y) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double LifetimeDistribution::base_inverse_cumulative_hazard(double y) const {
  if (y <= 0.0) return 0.0;
  if (std::isinf(y)) return kInf;
  return std::visit(Overloaded{
                        [y](const Exponential& e) { return y / e.rate; },
                        [this, y](const Gamma& g) {
                          const double p = -std::expm1(-y);
                          if (p < 0.5) return boost::math::gamma_p_inv(g.shape, p) * g.scale;
                          const double q = std::exp(-y);
                          if (q > kSurvivalFloor) {
                            return boost::math::gamma_q_inv(g.shape, q) * g.scale;
                          }
                          return bisect_base_inverse(y);
                        },
                        [y](const Weibull& w) { return w.scale * std::pow(y, 1.0 / w.shape); },
                        [y](const StoyanovNBU&) {
                          if (y <= 1.0) return std::asin(std::sqrt(y));
                          return kHalfPi + (y - 1.0) / kHalfPi;
                        },
                        [this, y](const LaiXieNonMonotone&) { return bisect_base_inverse(y); },
                    },
                    family_);
}

double LifetimeDistribution::cumulative_hazard(double t) const {
  require_time(t);
  const double h = hazard_scale_ * (base_cumulative_hazard(t + age_) - base_hazard_at_age_);
  if (!(std::exp(-h) >= kSurvivalFloor)) {
    throw OutOfSupportError("survival of " + describe() + " vanishes at t=" + format_number(t));
  }
  return std::max(h, 0.0);
}

double LifetimeDistribution::survival(double t) const {
  require_time(t);
  const double h = hazard_scale_ * (base_cumulative_hazard(t + age_) - base_hazard_at_age_);
  const double s = std::exp(-std::max(h, 0.0));
  return s < kSurvivalFloor ? 0.0 : s;
}

double LifetimeDistribution::density(double t) const {
  require_time(t);
  const double s = survival(t);
  if (s == 0.0) return 0.0;
  return hazard_scale_ * base_hazard(t + age_) * s;
}

double LifetimeDistribution::hazard(double t) const {
  require_time(t);
  if (survival(t) == 0.0) {
    throw OutOfSupportError("hazard of " + describe() + " undefined at t=" + format_number(t) +
                            " (survival underflow)");
  }
  return hazard_scale_ * base_hazard(t + age_);
}

double LifetimeDistribution::inverse_cumulative_hazard(double y) const {
  if (!(y >= 0.0)) throw DomainError("cumulative hazard level must be >= 0");
  const double x = base_inverse_cumulative_hazard(y / hazard_scale_ + base_hazard_at_age_);
  return std::max(x - age_, 0.0);
}

double LifetimeDistribution::quantile(double p) const {
  require_open_unit(p, "probability");
  return inverse_cumulative_hazard(-std::log1p(-p));
}

double LifetimeDistribution::sample(double u) const {
  require_open_unit(u, "uniform");
  return inverse_cumulative_hazard(-std::log(u));
}

double LifetimeDistribution::sample_conditional_exceed(double u, double s) const {
  require_open_unit(u, "uniform");
  require_time(s);
  // The draw lives in hazard space, so survival underflow at s is harmless;
  // only an infinite H(s) is unusable.
  const double at_s = base_cumulative_hazard(s + age_);
  if (!std::isfinite(at_s)) {
    throw OutOfSupportError("cannot condition " + describe() + " on exceeding " +
                            format_number(s) + ": cumulative hazard overflow");
  }
  // H^{-1}(H(s) - ln u), kept in base coordinates to avoid cancellation.
  const double level = at_s - std::log(u) / hazard_scale_;
  double t = base_inverse_cumulative_hazard(level) - age_;
  if (!std::isfinite(t)) {
    throw NumericError("conditional draw of " + describe() + " beyond numeric support");
  }
  if (t <= s) t = std::nextafter(s, kInf);
  return t;
}

LifetimeDistribution LifetimeDistribution::residual(double a) const {
  require_time(a);
  LifetimeDistribution out = *this;
  out.age_ = age_ + a;
  out.base_hazard_at_age_ = base_cumulative_hazard(out.age_);
  if (!std::isfinite(out.base_hazard_at_age_) ||
      std::exp(-hazard_scale_ * (out.base_hazard_at_age_ - base_hazard_at_age_)) < kSurvivalFloor) {
    throw OutOfSupportError("residual of " + describe() + " at age " + format_number(a) +
                            " has vanishing survival");
  }
  return out;
}

LifetimeDistribution LifetimeDistribution::scaled_hazard(double factor) const {
  require_positive(factor, "hazard multiplier");
  LifetimeDistribution out = *this;
  out.hazard_scale_ = hazard_scale_ * factor;
  return out;
}

std::vector<double> LifetimeDistribution::breakpoints() const {
  if (std::holds_alternative<StoyanovNBU>(family_) && age_ < kHalfPi) return {kHalfPi - age_};
  return {};
}

bool LifetimeDistribution::singular_at_origin() const {
  if (age_ > 0.0) return false;
  return std::isinf(base_hazard(0.0));
}

std::string LifetimeDistribution::describe() const {
  std::string out = std::visit(
      Overloaded{
          [](const Exponential& e) { return "exp:rate=" + format_number(e.rate); },
          [](const Gamma& g) {
            return "gamma:shape=" + format_number(g.shape) + ",scale=" + format_number(g.scale);
          },
          [](const Weibull& w) {
            return "weibull:shape=" + format_number(w.shape) + ",scale=" + format_number(w.scale);
          },
          [](const StoyanovNBU&) { return std::string("stoyanov"); },
          [](const LaiXieNonMonotone&) { return std::string("laixie"); },
      },
      family_);
  if (age_ != 0.0) out += ";age=" + format_number(age_);
  if (hazard_scale_ != 1.0) out += ";hazard_scale=" + format_number(hazard_scale_);
  return out;
}

bool LifetimeDistribution::operator==(const LifetimeDistribution& other) const {
  const bool same_family = std::visit(
      Overloaded{
          [](const Exponential& a, const Exponential& b) { return a.rate == b.rate; },
          [](const Gamma& a, const Gamma& b) { return a.shape == b.shape && a.scale == b.scale; },
          [](const Weibull& a, const Weibull& b) {
            return a.shape == b.shape && a.scale == b.scale;
          },
          [](const StoyanovNBU&, const StoyanovNBU&) { return true; },
          [](const LaiXieNonMonotone&, const LaiXieNonMonotone&) { return true; },
          [](const auto&, const auto&) { return false; },
      },
      family_, other.family_);
  return same_family && age_ == other.age_ && hazard_scale_ == other.hazard_scale_;
}

// ---------------------------------------------------------------------------
// Mini-grammar

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

double parse_value(std::string_view key, std::string_view raw) {
  raw = trim(raw);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), v);
  if (ec != std::errc() || ptr != raw.data() + raw.size() || raw.empty()) {
    throw ConfigError("invalid number '" + std::string(raw) + "' for key '" + std::string(key) +
                      "'");
  }
  return v;
}

struct KeyValues {
  std::vector<std::pair<std::string, double>> items;

  double take(std::string_view key, double fallback) {
    for (auto it = items.begin(); it != items.end(); ++it) {
      if (it->first == key) {
        const double v = it->second;
        items.erase(it);
        return v;
      }
    }
    return fallback;
  }
};

KeyValues parse_pairs(std::string_view body, std::string_view family, std::string_view expected) {
  KeyValues kv;
  while (!body.empty()) {
    const auto comma = body.find(',');
    const std::string_view token = trim(body.substr(0, comma));
    body = comma == std::string_view::npos ? std::string_view{} : body.substr(comma + 1);
    const auto eq = token.find('=');
    if (token.empty() || eq == std::string_view::npos) {
      throw ConfigError("malformed parameter '" + std::string(token) + "' for " +
                        std::string(family) + " (expected key=value with keys: " +
                        std::string(expected) + ")");
    }
    const std::string key(trim(token.substr(0, eq)));
    kv.items.emplace_back(key, parse_value(key, token.substr(eq + 1)));
  }
  return kv;
}

void reject_leftovers(const KeyValues& kv, std::string_view family, std::string_view expected) {
  if (!kv.items.empty()) {
    throw ConfigError("unknown key '" + kv.items.front().first + "' for " + std::string(family) +
                      " (expected keys: " + std::string(expected) + ")");
  }
}

}  // namespace

LifetimeDistribution parse_distribution(std::string_view text, NumericOptions options) {
  std::string_view rest = trim(text);
  std::vector<std::string_view> modifiers;
  if (const auto semi = rest.find(';'); semi != std::string_view::npos) {
    std::string_view mods = rest.substr(semi + 1);
    rest = trim(rest.substr(0, semi));
    while (!mods.empty()) {
      const auto next = mods.find(';');
      modifiers.push_back(trim(mods.substr(0, next)));
      mods = next == std::string_view::npos ? std::string_view{} : mods.substr(next + 1);
    }
  }

  const auto colon = rest.find(':');
  const std::string name(trim(rest.substr(0, colon)));
  const std::string_view body =
      colon == std::string_view::npos ? std::string_view{} : rest.substr(colon + 1);

  Family family;
  if (name == "exp" || name == "exponential") {
    KeyValues kv = parse_pairs(body, name, "rate");
    family = Exponential{kv.take("rate", 1.0)};
    reject_leftovers(kv, name, "rate");
  } else if (name == "gamma") {
    KeyValues kv = parse_pairs(body, name, "shape, scale");
    const double shape = kv.take("shape", std::numeric_limits<double>::quiet_NaN());
    const double scale = kv.take("scale", 1.0);
    reject_leftovers(kv, name, "shape, scale");
    if (std::isnan(shape)) throw ConfigError("gamma requires key 'shape' (expected keys: shape, scale)");
    family = Gamma{shape, scale};
  } else if (name == "weibull") {
    KeyValues kv = parse_pairs(body, name, "shape, scale");
    const double shape = kv.take("shape", std::numeric_limits<double>::quiet_NaN());
    const double scale = kv.take("scale", 1.0);
    reject_leftovers(kv, name, "shape, scale");
    if (std::isnan(shape)) {
      throw ConfigError("weibull requires key 'shape' (expected keys: shape, scale)");
    }
    family = Weibull{shape, scale};
  } else if (name == "stoyanov" || name == "laixie") {
    if (!trim(body).empty()) {
      throw ConfigError("'" + name + "' takes no parameters, got '" + std::string(body) + "'");
    }
    family = name == "stoyanov" ? Family{StoyanovNBU{}} : Family{LaiXieNonMonotone{}};
  } else {
    throw ConfigError("unknown distribution '" + name +
                      "' (expected one of: exp, gamma, weibull, stoyanov, laixie)");
  }

  std::optional<LifetimeDistribution> dist;
  try {
    dist.emplace(family, options);
  } catch (const DomainError& e) {
    throw ConfigError("invalid parameters in '" + std::string(text) + "': " + e.what());
  }
  for (std::string_view mod : modifiers) {
    const auto eq = mod.find('=');
    const std::string key(trim(mod.substr(0, eq)));
    if (eq == std::string_view::npos || (key != "age" && key != "hazard_scale")) {
      throw ConfigError("unknown modifier '" + std::string(mod) +
                        "' (expected keys: age, hazard_scale)");
    }
    const double v = parse_value(key, mod.substr(eq + 1));
    try {
      dist = key == "age" ? dist->residual(v) : dist->scaled_hazard(v);
    } catch (const std::exception& e) {
      throw ConfigError("invalid modifier '" + std::string(mod) + "': " + e.what());
    }
  }
  return *dist;
}

}  // namespace relev

#include "relev/ageing.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "relev/errors.hpp"

namespace relev {

namespace {

constexpr double kAgeingTolerance = 1e-9;

TriState from_violations(bool own_violated, bool other_violated) {
  if (own_violated) return TriState::No;
  return other_violated ? TriState::Yes : TriState::Boundary;
}

nlohmann::json witness_json(const std::vector<AgeingWitness>& ws) {
  nlohmann::json out = nlohmann::json::array();
  for (const AgeingWitness& w : ws) {
    out.push_back({{"s", w.s}, {"t", w.t}, {"lhs", w.lhs}, {"rhs", w.rhs}});
  }
  return out;
}

}  // namespace

const char* to_string(TriState s) {
  switch (s) {
    case TriState::Yes: return "yes";
    case TriState::No: return "no";
    case TriState::Boundary: return "boundary";
  }
  return "?";
}

MonotonicityResult classify_hazard_monotonicity(const LifetimeDistribution& d,
                                                const std::vector<double>& grid) {
  std::vector<double> pts, r;
  for (double t : grid) {
    if (t == 0.0 && d.singular_at_origin()) continue;
    pts.push_back(t);
    r.push_back(d.hazard(t));
  }
  if (pts.size() < 2) throw DomainError("hazard grid needs at least two usable points");

  MonotonicityResult out;
  std::optional<AgeingWitness> rise, fall;
  int last_sign = 0;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const double step = r[i] - r[i - 1];
    const double tol = kAgeingTolerance * std::max({1.0, std::abs(r[i]), std::abs(r[i - 1])});
    int sign = 0;
    if (step > tol) {
      sign = 1;
      if (!rise || step > rise->rhs - rise->lhs) rise = AgeingWitness{pts[i - 1], pts[i], r[i - 1], r[i]};
    } else if (step < -tol) {
      sign = -1;
      if (!fall || step < fall->rhs - fall->lhs) fall = AgeingWitness{pts[i - 1], pts[i], r[i - 1], r[i]};
    }
    if (sign == 0) continue;
    if (last_sign != 0 && sign != last_sign) out.turning_points.push_back(pts[i - 1]);
    last_sign = sign;
  }
  out.ifr = from_violations(fall.has_value(), rise.has_value());
  out.dfr = from_violations(rise.has_value(), fall.has_value());
  if (rise) out.witnesses.push_back(*rise);
  if (fall) out.witnesses.push_back(*fall);
  return out;
}

NbuResult classify_nbu(const LifetimeDistribution& d, const std::vector<double>& s_grid,
                       const std::vector<double>& t_grid) {
  NbuResult out;
  std::optional<AgeingWitness> over, under;  // Fbar(s+t) above / below the product
  double worst_over = 0.0, worst_under = 0.0;
  for (double s : s_grid) {
    const double fs = d.survival(s);
    if (!(fs > kSurvivalFloor)) throw DomainError("survival vanishes on the s grid");
    for (double t : t_grid) {
      const double ft = d.survival(t);
      if (!(ft > kSurvivalFloor)) throw DomainError("survival vanishes on the t grid");
      const double rhs = fs * ft;
      const double lhs = d.survival(s + t);
      const double rel = (lhs - rhs) / rhs;
      if (rel > kAgeingTolerance && rel > worst_over) {
        worst_over = rel;
        over = AgeingWitness{s, t, lhs, rhs};
      } else if (rel < -kAgeingTolerance && rel < worst_under) {
        worst_under = rel;
        under = AgeingWitness{s, t, lhs, rhs};
      }
    }
  }
  out.nbu = from_violations(over.has_value(), under.has_value());
  out.nwu = from_violations(under.has_value(), over.has_value());
  if (over) out.witnesses.push_back(*over);
  if (under) out.witnesses.push_back(*under);
  return out;
}

std::vector<double> ageing_grid(const LifetimeDistribution& d, std::size_t points) {
  if (points < 2) throw DomainError("ageing grid needs at least two points");
  const double q = d.quantile(0.995);
  const double lo = q * 1e-3;
  std::vector<double> g(points);
  for (std::size_t i = 0; i < points; ++i) {
    g[i] = lo * std::pow(q / lo, static_cast<double>(i) / static_cast<double>(points - 1));
  }
  g.back() = q;
  return g;
}

AgeingReport classify(const LifetimeDistribution& d) {
  AgeingReport r;
  r.law = d.describe();
  r.hazard_grid = ageing_grid(d, 512);
  r.nbu_grid = ageing_grid(d, 64);
  const MonotonicityResult m = classify_hazard_monotonicity(d, r.hazard_grid);
  const NbuResult n = classify_nbu(d, r.nbu_grid, r.nbu_grid);
  r.ifr = m.ifr;
  r.dfr = m.dfr;
  r.hazard_witnesses = m.witnesses;
  r.turning_points = m.turning_points;
  r.nbu = n.nbu;
  r.nwu = n.nwu;
  r.nbu_witnesses = n.witnesses;
  check_consistency(r);
  return r;
}

void check_consistency(const AgeingReport& r) {
  if (r.ifr == TriState::Yes && r.nbu == TriState::No) {
    throw NumericError(r.law + ": hazard classified increasing but NBU product inequality fails");
  }
  if (r.dfr == TriState::Yes && r.nwu == TriState::No) {
    throw NumericError(r.law + ": hazard classified decreasing but NWU product inequality fails");
  }
  if (r.ifr == TriState::Boundary && r.dfr == TriState::Boundary &&
      (r.nbu != TriState::Boundary || r.nwu != TriState::Boundary)) {
    throw NumericError(r.law + ": flat hazard but survival is not multiplicative");
  }
}

nlohmann::json to_json(const AgeingReport& r) {
  return {{"law", r.law},
          {"ifr", to_string(r.ifr)},
          {"dfr", to_string(r.dfr)},
          {"nbu", to_string(r.nbu)},
          {"nwu", to_string(r.nwu)},
          {"hazard_witnesses", witness_json(r.hazard_witnesses)},
          {"turning_points", r.turning_points},
          {"nbu_witnesses", witness_json(r.nbu_witnesses)},
          {"hazard_grid", {{"points", r.hazard_grid.size()},
                           {"lo", r.hazard_grid.front()},
                           {"hi", r.hazard_grid.back()}}},
          {"nbu_grid", {{"points", r.nbu_grid.size()},
                        {"lo", r.nbu_grid.front()},
                        {"hi", r.nbu_grid.back()}}}};
}

}  // namespace relev

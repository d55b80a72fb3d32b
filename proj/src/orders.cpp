#include "relev/orders.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "relev/errors.hpp"
#include "relev/quadrature.hpp"
#include "relev/rng.hpp"

namespace relev {

namespace {

constexpr double kHazardTolerance = 1e-9;
constexpr double kHistoryTolerance = 1e-12;
constexpr double kCisTolerance = 1e-12;

/// Signed differences d_i where positive values contradict "A <= B".
/// Points with |d_i| <= margin_i are ties.
OrderVerdict classify_differences(const std::vector<double>& grid, const std::vector<double>& d,
                                  const std::vector<double>& margin, bool statistical,
                                  const std::vector<double>& a, const std::vector<double>& b) {
  OrderVerdict v;
  v.grid_size = grid.size();
  v.statistical = statistical;

  std::size_t worst_pos = grid.size();
  std::size_t worst_neg = grid.size();
  std::size_t worst_abs = 0;
  int last_sign = 0;
  std::size_t last_index = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (std::abs(d[i]) > std::abs(d[worst_abs])) worst_abs = i;
    int sign = 0;
    if (d[i] > margin[i]) {
      sign = 1;
      if (worst_pos == grid.size() || d[i] > d[worst_pos]) worst_pos = i;
    } else if (d[i] < -margin[i]) {
      sign = -1;
      if (worst_neg == grid.size() || d[i] < d[worst_neg]) worst_neg = i;
    }
    if (sign == 0) continue;
    if (last_sign != 0 && sign != last_sign) v.crossings.push_back({grid[last_index], grid[i]});
    last_sign = sign;
    last_index = i;
  }

  const bool pos = worst_pos != grid.size();
  const bool neg = worst_neg != grid.size();
  auto witness = [&](std::size_t i) { return Witness{grid[i], a[i], b[i]}; };
  if (pos && neg) {
    v.relation = Relation::Crossing;
    v.witnesses = {witness(worst_neg), witness(worst_pos)};
  } else if (neg) {
    v.relation = Relation::ALessB;
    v.witnesses = {witness(worst_neg)};
  } else if (pos) {
    v.relation = Relation::BLessA;
    v.witnesses = {witness(worst_pos)};
  } else {
    v.relation = statistical ? Relation::Inconclusive : Relation::Equal;
    if (!grid.empty()) v.witnesses = {witness(worst_abs)};
  }
  return v;
}

std::vector<double> merged_grid(const std::vector<double>& a, const std::vector<double>& b) {
  const double lo = std::max(a.front(), b.front());
  const double hi = std::min(a.back(), b.back());
  std::vector<double> out;
  for (const auto* g : {&a, &b}) {
    for (double t : *g) {
      if (t >= lo && t <= hi) out.push_back(t);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Relation swap_relation(Relation r) {
  switch (r) {
    case Relation::ALessB: return Relation::BLessA;
    case Relation::BLessA: return Relation::ALessB;
    default: return r;
  }
}

double scaled(double tol, double x, double y) {
  return tol * std::max({1.0, std::abs(x), std::abs(y)});
}

}  // namespace

const char* to_string(Relation r) {
  switch (r) {
    case Relation::ALessB: return "ALessB";
    case Relation::BLessA: return "BLessA";
    case Relation::Equal: return "Equal";
    case Relation::Crossing: return "Crossing";
    case Relation::Inconclusive: return "Inconclusive";
  }
  return "?";
}

const char* to_string(OrderKind k) {
  switch (k) {
    case OrderKind::Stochastic: return "st";
    case OrderKind::HazardRate: return "hr";
    case OrderKind::DynamicHazardRate: return "dyn-hr";
    case OrderKind::Cis: return "cis";
  }
  return "?";
}

OrderVerdict swapped(const OrderVerdict& v) {
  OrderVerdict out = v;
  out.relation = swap_relation(v.relation);
  for (Witness& w : out.witnesses) std::swap(w.a, w.b);
  return out;
}

nlohmann::json to_json(const OrderVerdict& v) {
  nlohmann::json witnesses = nlohmann::json::array();
  for (const Witness& w : v.witnesses) {
    nlohmann::json item{{"t", w.t}, {"a", w.a}, {"b", w.b}};
    if (!std::isnan(w.s)) item["s"] = w.s;
    witnesses.push_back(item);
  }
  nlohmann::json crossings = nlohmann::json::array();
  for (const Interval& c : v.crossings) crossings.push_back({c.lo, c.hi});
  return {{"relation", to_string(v.relation)}, {"order", to_string(v.order)},
          {"witnesses", witnesses},           {"tolerance", v.tolerance},
          {"grid_size", v.grid_size},         {"crossings", crossings},
          {"statistical", v.statistical},     {"consistent", v.consistent}};
}

OrderVerdict st_compare(const SurvivalCurve& a, const SurvivalCurve& b) {
  a.validate();
  b.validate();
  const SurvivalCurve* pa = &a;
  const SurvivalCurve* pb = &b;
  SurvivalCurve ra, rb;
  if (a.grid != b.grid) {
    const std::vector<double> grid = merged_grid(a.grid, b.grid);
    if (grid.size() < 2) throw DomainError("curves share fewer than two grid points of support");
    ra = resample(a, grid);
    rb = resample(b, grid);
    pa = &ra;
    pb = &rb;
  }
  const bool statistical = !a.is_exact() || !b.is_exact();
  const double tol = statistical ? a.band() + b.band() : kExactTieTolerance + a.band() + b.band();

  const std::size_t m = pa->size();
  std::vector<double> d(m), margin(m, tol);
  for (std::size_t i = 0; i < m; ++i) d[i] = pa->values[i] - pb->values[i];
  OrderVerdict v = classify_differences(pa->grid, d, margin, statistical, pa->values, pb->values);
  v.order = OrderKind::Stochastic;
  v.tolerance = tol;
  return v;
}

OrderVerdict pointwise_compare(const std::vector<double>& points, const std::vector<double>& a,
                               const std::vector<double>& b, double margin, bool statistical) {
  if (a.size() != points.size() || b.size() != points.size()) {
    throw DomainError("pointwise comparison needs equal-length inputs");
  }
  std::vector<double> d(points.size()), m(points.size(), margin);
  for (std::size_t i = 0; i < points.size(); ++i) d[i] = a[i] - b[i];
  OrderVerdict v = classify_differences(points, d, m, statistical, a, b);
  v.order = OrderKind::Stochastic;
  v.tolerance = margin;
  return v;
}

RefinedVerdict st_compare_refined(const CurveOnGrid& a, const CurveOnGrid& b,
                                  const GridOfSize& grid, std::size_t start_points,
                                  std::size_t max_points) {
  if (start_points < 2) throw DomainError("refinement needs at least two grid points");
  RefinedVerdict out;
  for (std::size_t points = start_points; points <= max_points; points *= 2) {
    const std::vector<double> g = grid(points);
    out.verdict = st_compare(a(g), b(g));
    out.grid_sizes.push_back(points);
    out.relations.push_back(out.verdict.relation);
    const std::size_t k = out.relations.size();
    if (k >= 3 && out.relations[k - 1] == out.relations[k - 2] &&
        out.relations[k - 2] == out.relations[k - 3]) {
      out.stable = true;
      break;
    }
  }
  if (!out.stable) {
    out.verdict.relation = Relation::Inconclusive;
    out.verdict.crossings.clear();
  }
  return out;
}

double nbu_relevation_integral(const LifetimeDistribution& d, double t) {
  if (!(t >= 0.0)) throw DomainError("t must be >= 0");
  if (t == 0.0) return 0.0;
  const double st = d.survival(t);
  if (!(st > kSurvivalFloor)) throw DomainError("survival vanishes before t");
  // Fbar(t - x) is as rough at x = t as f is at x = 0, so each half gets the
  // endpoint map at its own singular end.
  QuadratureOptions head;
  head.abs_tol = 0.5 * d.options().quad_tol;
  head.singular_at_lower = d.singular_at_origin();
  for (double p : d.breakpoints()) {
    head.breakpoints.push_back(p);
    head.breakpoints.push_back(t - p);
  }
  QuadratureOptions tail = head;
  for (double& b : tail.breakpoints) b = t - b;
  auto integrand = [&](double x) {
    const double f = d.density(x);
    if (f == 0.0) return 0.0;
    return (d.survival(t - x) - st / d.survival(x)) * f;
  };
  const double mid = 0.5 * t;
  return integrate(integrand, 0.0, mid, head) +
         integrate([&](double s) { return integrand(t - s); }, 0.0, t - mid, tail);
}

OrderVerdict hr_compare(const LifetimeDistribution& a, const LifetimeDistribution& b,
                        const std::vector<double>& grid) {
  std::vector<double> pts, d, margin, ra, rb, log_ratio;
  for (double t : grid) {
    if (t < 0.0) throw DomainError("hazard grid must be nonnegative");
    if (t == 0.0 && (a.singular_at_origin() || b.singular_at_origin())) continue;
    if (!(a.survival(t) > kSurvivalFloor) || !(b.survival(t) > kSurvivalFloor)) {
      throw DomainError("survival vanishes at grid point " + std::to_string(t));
    }
    const double x = a.hazard(t);
    const double y = b.hazard(t);
    pts.push_back(t);
    ra.push_back(x);
    rb.push_back(y);
    d.push_back(y - x);
    margin.push_back(scaled(kHazardTolerance, x, y));
    log_ratio.push_back(a.cumulative_hazard(t) - b.cumulative_hazard(t));
  }
  if (pts.empty()) throw DomainError("no usable hazard grid points");

  OrderVerdict v = classify_differences(pts, d, margin, false, ra, rb);
  v.order = OrderKind::HazardRate;
  v.tolerance = kHazardTolerance;

  bool rises = true;
  bool falls = true;
  for (std::size_t i = 1; i < log_ratio.size(); ++i) {
    const double step = log_ratio[i] - log_ratio[i - 1];
    const double tol = scaled(kHazardTolerance, log_ratio[i], log_ratio[i - 1]);
    if (step < -tol) rises = false;
    if (step > tol) falls = false;
  }
  switch (v.relation) {
    case Relation::ALessB: v.consistent = rises; break;
    case Relation::BLessA: v.consistent = falls; break;
    case Relation::Equal: v.consistent = rises && falls; break;
    default: v.consistent = true; break;
  }
  return v;
}

// ---------------------------------------------------------------------------

void History::validate() const {
  double prev = 0.0;
  for (double x : failed) {
    if (!(x > prev)) throw DomainError("history failure times must be positive and strictly ascending");
    prev = x;
  }
  if (!(censor > prev)) throw DomainError("history censor time must exceed the last failure time");
}

void validate_severity(const HistoryPair& pair) {
  pair.severe.validate();
  pair.mild.validate();
  if (pair.severe.censor != pair.mild.censor) {
    throw DomainError("severity: both histories must be observed at the same time t");
  }
  const std::size_t i = pair.mild.failed.size();
  const std::size_t j = pair.severe.failed.size();
  if (j < i) {
    throw DomainError("severity: the more severe history must have at least as many failures (j=" +
                      std::to_string(j) + " < i=" + std::to_string(i) + ")");
  }
  for (std::size_t k = 0; k < i; ++k) {
    if (pair.severe.failed[k] > pair.mild.failed[k]) {
      throw DomainError("severity: failure " + std::to_string(k + 1) +
                        " must occur no later in the more severe history (x_k <= y_k)");
    }
  }
}

std::vector<HistoryPair> history_pair_sampler(std::uint64_t seed, std::size_t count, double t,
                                              std::size_t max_failures) {
  if (!(t > 0.0)) throw DomainError("history time t must be > 0");
  std::vector<HistoryPair> out;
  out.reserve(count);
  if (count == 0) return out;
  out.push_back({History{{}, t}, History{{}, t}});

  auto sorted_times = [t](UniformStream& s, std::size_t k) {
    std::vector<double> v(k);
    for (double& x : v) x = t * s.next();
    std::sort(v.begin(), v.end());
    return v;
  };
  for (std::uint64_t rep = 1; out.size() < count; ++rep) {
    UniformStream stream(seed, rep);
    const auto pick = [&stream](std::size_t hi) {
      return std::min(hi, static_cast<std::size_t>(stream.next() * static_cast<double>(hi + 1)));
    };
    const std::size_t j = pick(max_failures);
    const std::size_t i = pick(j);
    HistoryPair pair{History{sorted_times(stream, j), t}, History{sorted_times(stream, i), t}};
    for (std::size_t k = 0; k < i; ++k) {
      pair.mild.failed[k] = std::max(pair.mild.failed[k], pair.severe.failed[k]);
    }
    try {
      validate_severity(pair);
    } catch (const DomainError&) {
      continue;  // tied draws; redraw
    }
    out.push_back(std::move(pair));
  }
  return out;
}

OrderVerdict dyn_hr_compare(const DistributionSequence& replacement,
                            const DistributionSequence& epb,
                            const std::vector<HistoryPair>& pairs) {
  OrderVerdict v;
  v.order = OrderKind::DynamicHazardRate;
  v.tolerance = kHistoryTolerance;
  v.grid_size = pairs.size();

  // Direction 1: EPB under the severe history vs renewal under the mild one.
  // Direction 2: the roles exchanged.
  double worst1 = 0.0, worst2 = 0.0;
  std::optional<Witness> w1, w2;
  for (const HistoryPair& pair : pairs) {
    validate_severity(pair);
    const std::size_t i = pair.mild.failed.size();
    const std::size_t j = pair.severe.failed.size();
    if (i != j) continue;
    const double t = pair.severe.censor;
    const double x_last = j ? pair.severe.failed.back() : 0.0;
    const double y_last = i ? pair.mild.failed.back() : 0.0;

    const double eta = epb.nth(j + 1).hazard(t);
    const double lambda = replacement.nth(i + 1).hazard(t - y_last);
    const double excess1 = lambda - eta;
    if (excess1 > scaled(kHistoryTolerance, eta, lambda) && excess1 > worst1) {
      worst1 = excess1;
      w1 = Witness{t, eta, lambda, y_last};
    }

    const double eta_mild = epb.nth(i + 1).hazard(t);
    const double lambda_severe = replacement.nth(j + 1).hazard(t - x_last);
    const double excess2 = eta_mild - lambda_severe;
    if (excess2 > scaled(kHistoryTolerance, eta_mild, lambda_severe) && excess2 > worst2) {
      worst2 = excess2;
      w2 = Witness{t, eta_mild, lambda_severe, x_last};
    }
  }

  if (!w1 && !w2) {
    v.relation = Relation::Equal;
  } else if (!w1) {
    v.relation = Relation::ALessB;
    v.witnesses = {*w2};
  } else if (!w2) {
    v.relation = Relation::BLessA;
    v.witnesses = {*w1};
  } else {
    v.relation = Relation::Crossing;
    v.witnesses = {*w1, *w2};
    v.crossings = {{std::min(w1->t, w2->t), std::max(w1->t, w2->t)}};
  }
  return v;
}

OrderVerdict cis_check(const DistributionSequence& seq, std::size_t n_max,
                       const std::vector<double>& s_grid, const std::vector<double>& t_grid) {
  if (!std::is_sorted(s_grid.begin(), s_grid.end())) throw DomainError("s grid must ascend");
  OrderVerdict v;
  v.order = OrderKind::Cis;
  v.tolerance = kCisTolerance;
  v.grid_size = s_grid.size() * t_grid.size();
  v.relation = Relation::ALessB;
  for (std::size_t i = 2; i <= n_max; ++i) {
    const LifetimeDistribution law = seq.nth(i);
    for (double t : t_grid) {
      const double st = law.survival(t);
      double prev = -1.0;
      double prev_s = 0.0;
      for (double s : s_grid) {
        if (s > t) break;
        const double ss = law.survival(s);
        if (!(ss > kSurvivalFloor)) break;
        const double ratio = st / ss;
        if (ratio < prev - kCisTolerance) {
          v.relation = Relation::Crossing;
          v.crossings.push_back({prev_s, s});
          v.witnesses.push_back(Witness{t, prev, ratio, s});
        }
        prev = ratio;
        prev_s = s;
      }
    }
  }
  return v;
}

HypothesesReport theorem_hypotheses_check(const DistributionSequence& x,
                                          const DistributionSequence& y, HypothesisMode mode,
                                          std::size_t n_max, const std::vector<double>& t_grid,
                                          const std::vector<double>& x_grid) {
  if (n_max == 0) throw DomainError("n_max must be >= 1");
  if (x_grid.empty()) throw DomainError("x grid is empty");
  HypothesesReport report;
  report.mode = mode;
  report.x_grid = x_grid;
  report.tolerance = mode == HypothesisMode::Stochastic ? kExactTieTolerance : kHazardTolerance;

  auto compare = [&](const LifetimeDistribution& xn, const LifetimeDistribution& res,
                     std::size_t n, double t) {
    HypothesisCell cell{n, t};
    double ge = INFINITY, le = INFINITY;
    for (double u : x_grid) {
      if (mode == HypothesisMode::Stochastic) {
        const double diff = xn.survival(u) - res.survival(u);
        ge = std::min(ge, diff);
        le = std::min(le, -diff);
      } else {
        if (u == 0.0 && (xn.singular_at_origin() || res.singular_at_origin())) continue;
        // X >=_hr R iff r_X <= r_R; margins are relative for large hazards.
        const double rx = xn.hazard(u);
        const double rr = res.hazard(u);
        const double scale = std::max({1.0, std::abs(rx), std::abs(rr)});
        ge = std::min(ge, (rr - rx) / scale);
        le = std::min(le, (rx - rr) / scale);
      }
    }
    cell.ge_margin = ge;
    cell.le_margin = le;
    cell.ge = ge >= -report.tolerance;
    cell.le = le >= -report.tolerance;
    report.all_ge = report.all_ge && cell.ge;
    report.all_le = report.all_le && cell.le;
    report.cells.push_back(cell);
  };

  compare(x.nth(1), y.nth(1), 1, 0.0);
  for (std::size_t n = 2; n <= n_max; ++n) {
    const LifetimeDistribution xn = x.nth(n);
    const LifetimeDistribution yn = y.nth(n);
    for (double t : t_grid) {
      if (!(t > 0.0)) continue;
      if (!(yn.survival(t) > kSurvivalFloor)) continue;
      compare(xn, yn.residual(t), n, t);
    }
  }
  return report;
}

nlohmann::json to_json(const HypothesesReport& r) {
  nlohmann::json cells = nlohmann::json::array();
  for (const HypothesisCell& c : r.cells) {
    cells.push_back({{"n", c.n},
                     {"t", c.t},
                     {"ge", c.ge},
                     {"le", c.le},
                     {"ge_margin", c.ge_margin},
                     {"le_margin", c.le_margin}});
  }
  return {{"mode", r.mode == HypothesisMode::Stochastic ? "st" : "hr"},
          {"all_ge", r.all_ge},
          {"all_le", r.all_le},
          {"tolerance", r.tolerance},
          {"grid_size", r.x_grid.size()},
          {"cells", cells}};
}

}  // namespace relev

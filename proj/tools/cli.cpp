#include "relev/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <utility>

#include <CLI11.hpp>
#include <json.hpp>

#include "relev/ageing.hpp"
#include "relev/errors.hpp"
#include "relev/orders.hpp"
#include "relev/processes.hpp"
#include "relev/relevation.hpp"
#include "relev/svg.hpp"

namespace relev::cli {

namespace {

using nlohmann::json;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Output target: "-" writes to the fallback stream.
class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) {
    if (path.empty() || path == "-") {
      stream_ = &fallback;
      return;
    }
    file_.open(path, std::ios::binary);
    if (!file_) throw ConfigError("cannot open output file '" + path + "'");
    stream_ = &file_;
  }
  std::ostream& operator*() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_ = nullptr;
};

using Echo = std::vector<std::pair<std::string, std::string>>;

void write_echo(std::ostream& os, const std::string& command, const Echo& echo) {
  os << "# relev " << command << '\n';
  for (const auto& [key, value] : echo) os << "# " << key << '=' << value << '\n';
}

json echo_json(const std::string& command, const Echo& echo) {
  json j{{"command", command}};
  for (const auto& [key, value] : echo) j[key] = value;
  return j;
}

constexpr const char* kCurveHeader = "t,survival,lower,upper,n,process\n";

void write_curve_rows(std::ostream& os, const SurvivalCurve& c, std::size_t n,
                      const std::string& process) {
  for (std::size_t i = 0; i < c.size(); ++i) {
    os << num(c.grid[i]) << ',' << num(c.values[i]) << ',' << num(c.lower(i)) << ','
       << num(c.upper(i)) << ',' << n << ',' << process << '\n';
  }
}

LineSeries series_of(const SurvivalCurve& c, std::string label) {
  return {std::move(label), c.grid, c.values};
}

void maybe_write_svg(const std::string& path, const std::string& title,
                     const std::vector<LineSeries>& series) {
  if (path.empty()) return;
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open SVG file '" + path + "'");
  write_svg(f, title, "t", "survival", series);
}

std::string join(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + num(v[i]);
  return out;
}

// ---------------------------------------------------------------------------
// Process models

const std::vector<std::string> kProcesses = {"relevation", "renewal", "minimal-repair", "yule",
                                             "age"};

struct ModelArgs {
  std::string process;
  std::string dist;
  std::string sequence_file;
  double offset = 1.0;
  double interval = 1.0;
};

DistributionSequence load_sequence_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot read sequence file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_sequence_json(ss.str());
}

struct Model {
  ProcessSpec spec;
  /// Law sequence driving the arrivals (Yule: the scaled sequence); empty for age.
  std::optional<DistributionSequence> seq;
};

Model build_model(const ModelArgs& a) {
  const bool has_dist = !a.dist.empty();
  const bool has_seq = !a.sequence_file.empty();
  if (has_dist == has_seq) {
    throw ConfigError("process '" + a.process + "' needs exactly one of --dist or --sequence");
  }
  if (a.process == "relevation" || a.process == "renewal") {
    DistributionSequence seq = has_seq ? load_sequence_file(a.sequence_file)
                                       : DistributionSequence::iid(parse_distribution(a.dist));
    if (a.process == "relevation") return {ProcessSpec{RelevationPolicy{seq}}, seq};
    return {ProcessSpec{RenewalPolicy{seq}}, seq};
  }
  if (has_seq) throw ConfigError("process '" + a.process + "' takes --dist, not --sequence");
  const LifetimeDistribution law = parse_distribution(a.dist);
  if (a.process == "minimal-repair") {
    return {ProcessSpec{MinimalRepairPolicy{law}}, DistributionSequence::iid(law)};
  }
  if (a.process == "yule") {
    if (!(a.offset > -1.0)) throw ConfigError("--offset must exceed -1");
    return {ProcessSpec{YulePolicy{law, a.offset}}, DistributionSequence::yule(law, a.offset)};
  }
  if (a.process == "age") {
    if (!(a.interval > 0.0)) throw ConfigError("--interval must be > 0");
    return {ProcessSpec{AgeReplacementPolicy{law, a.interval}}, std::nullopt};
  }
  throw ConfigError("unknown process '" + a.process + "'");
}

void check_delta(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("--delta must lie in (0, 1)");
}

std::vector<double> arrival_quantiles(const std::vector<ArrivalPath>& paths, std::size_t n,
                                      double p) {
  std::vector<double> v;
  for (const ArrivalPath& path : paths) {
    if (path.times.size() >= n) v.push_back(path.times[n - 1]);
  }
  if (v.empty()) return {};
  std::sort(v.begin(), v.end());
  const auto k = static_cast<std::size_t>(p * static_cast<double>(v.size() - 1));
  return {v[k]};
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateArgs {
  ModelArgs model;
  std::optional<std::size_t> n;
  std::optional<double> horizon;
  std::size_t reps = 1000;
  std::uint64_t seed = 0;
  std::string paths_out = "-";
  std::string curves_out;
  std::size_t grid_points = 256;
  std::optional<double> t_max;
  double delta = 0.01;
};

int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
  check_delta(a.delta);
  if (!a.n && !a.horizon) throw ConfigError("simulate needs --n or --horizon");
  const Model model = build_model(a.model);
  SimulationRequest req{model.spec, a.n.value_or(1), a.horizon, a.reps, a.seed};
  const std::vector<ArrivalPath> paths = simulate_parallel(req, threads_from_env());

  Echo echo = {{"process", model.spec.name()}, {"spec", model.spec.id()},
               {"reps", std::to_string(a.reps)}, {"seed", std::to_string(a.seed)}};
  if (a.n) echo.emplace_back("n", std::to_string(*a.n));
  if (a.horizon) echo.emplace_back("horizon", num(*a.horizon));

  {
    Output o(a.paths_out, out);
    write_echo(*o, "simulate", echo);
    *o << "replication,arrival_index,time\n";
    for (const ArrivalPath& p : paths) {
      for (std::size_t i = 0; i < p.times.size(); ++i) {
        *o << p.replication << ',' << i + 1 << ',' << num(p.times[i]) << '\n';
      }
    }
  }

  if (!a.curves_out.empty()) {
    if (!a.n) throw ConfigError("--curves needs --n to choose the arrivals to plot");
    double t_max = 0.0;
    if (a.t_max) {
      t_max = *a.t_max;
    } else if (a.horizon) {
      t_max = *a.horizon;
    } else {
      for (const ArrivalPath& p : paths) t_max = std::max(t_max, p.times.back());
    }
    if (!(t_max > 0.0)) throw ConfigError("--t-max must be > 0");
    const std::vector<double> grid = log_grid(t_max, a.grid_points);
    const double per_curve = a.delta / static_cast<double>(*a.n);
    const auto curves = empirical_curve_set(paths, *a.n, grid, per_curve);
    Echo cecho = echo;
    cecho.emplace_back("delta", num(a.delta));
    cecho.emplace_back("grid_points", std::to_string(a.grid_points));
    cecho.emplace_back("t_max", num(t_max));
    Output o(a.curves_out, out);
    write_echo(*o, "simulate", cecho);
    *o << kCurveHeader;
    for (std::size_t n = 1; n <= curves.size(); ++n) {
      write_curve_rows(*o, curves[n - 1], n, model.spec.name());
    }
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// compare

struct CompareArgs {
  std::string a_process = "relevation";
  std::string b_process = "renewal";
  std::string dist, sequence, a_dist, b_dist, a_sequence, b_sequence;
  double offset = 1.0;
  double interval = 1.0;
  std::size_t n_max = 4;
  std::size_t reps = 100000;
  std::uint64_t seed = 0;
  std::vector<double> count_times;
  bool coupling = false;
  std::size_t grid_points = 256;
  std::optional<double> t_max;
  double delta = 0.01;
  std::string json_out = "-";
  std::string curves_out;
  bool strict = false;
};

/// One side of a comparison: exact curves where a closed form or quadrature
/// exists, Monte Carlo otherwise.
class Side {
 public:
  Side(std::string tag, Model model) : tag_(std::move(tag)), model_(std::move(model)) {}

  const std::string& tag() const { return tag_; }
  const Model& model() const { return model_; }
  std::string label() const { return tag_ + ":" + model_.spec.name(); }

  bool exact(std::size_t n) const {
    const std::string name = model_.spec.name();
    if (name == "age") return false;
    if (name == "renewal") return n <= 2;
    return true;
  }

  bool needs_paths(std::size_t n_max) const {
    for (std::size_t n = 1; n <= n_max; ++n) {
      if (!exact(n)) return true;
    }
    return false;
  }

  void simulate(std::size_t n_max, std::size_t reps, std::uint64_t seed) {
    SimulationRequest req{model_.spec, n_max, std::nullopt, reps, seed};
    paths_ = simulate_parallel(req, threads_from_env());
  }

  /// Upper end for the default grid: summed 0.999 quantiles of the entries, or
  /// the 0.999 sample quantile of T_{n_max} when simulated.
  double grid_bound(std::size_t n_max) const {
    double bound = 0.0;
    if (model_.seq) {
      for (std::size_t k = 1; k <= n_max; ++k) bound += model_.seq->nth(k).quantile(0.999);
    }
    for (double q : arrival_quantiles(paths_, n_max, 0.999)) bound = std::max(bound, q);
    return bound;
  }

  SurvivalCurve curve(std::size_t n, const std::vector<double>& grid, double delta) const {
    if (!exact(n)) return empirical_survival(paths_, n, grid, delta);
    const std::string name = model_.spec.name();
    if (name == "renewal") {
      const LifetimeDistribution first = model_.seq->nth(1);
      SurvivalCurve c;
      c.grid = grid;
      if (n == 1) {
        for (double t : grid) c.values.push_back(first.survival(t));
        c.kind = ExactCurve{0.0};
      } else {
        const LifetimeDistribution second = model_.seq->nth(2);
        for (double t : grid) c.values.push_back(convolution_survival(first, second, t));
        c.kind = ExactCurve{1e-7};
      }
      return c;
    }
    if (name == "minimal-repair") {
      const LifetimeDistribution law = model_.seq->nth(1);
      SurvivalCurve c;
      c.grid = grid;
      for (double t : grid) c.values.push_back(minimal_repair_marginal(law, n, t));
      c.kind = ExactCurve{1e-12};
      return c;
    }
    return epb_marginal(*model_.seq, n, grid);
  }

  const std::vector<ArrivalPath>& paths() const { return paths_; }

 private:
  std::string tag_;
  Model model_;
  std::vector<ArrivalPath> paths_;
};

bool is_epb(const std::string& process) {
  return process == "relevation" || process == "minimal-repair" || process == "yule";
}

int cmd_compare(const CompareArgs& a, std::ostream& out) {
  check_delta(a.delta);
  if (a.n_max == 0) throw ConfigError("--n-max must be >= 1");
  auto side_args = [&](const std::string& process, const std::string& dist,
                       const std::string& seq) {
    ModelArgs m{process, dist, seq, a.offset, a.interval};
    if (m.dist.empty() && m.sequence_file.empty()) {
      m.dist = a.dist;
      m.sequence_file = a.sequence;
    }
    return m;
  };
  Side A("a", build_model(side_args(a.a_process, a.a_dist, a.a_sequence)));
  Side B("b", build_model(side_args(a.b_process, a.b_dist, a.b_sequence)));
  if (A.needs_paths(a.n_max)) A.simulate(a.n_max, a.reps, a.seed);
  if (B.needs_paths(a.n_max)) B.simulate(a.n_max, a.reps, a.seed + 1);

  const double t_max = a.t_max.value_or(std::max(A.grid_bound(a.n_max), B.grid_bound(a.n_max)));
  if (!(t_max > 0.0)) throw ConfigError("--t-max must be > 0");
  std::size_t empirical_curves = 0;
  for (std::size_t n = 1; n <= a.n_max; ++n) {
    empirical_curves += !A.exact(n) + !B.exact(n);
  }
  const double per_curve = empirical_curves ? a.delta / static_cast<double>(empirical_curves) : a.delta;
  const GridOfSize grid_of = [t_max](std::size_t points) { return log_grid(t_max, points); };
  const std::vector<double> grid = grid_of(a.grid_points);

  Echo echo = {{"a", A.model().spec.id()},
               {"b", B.model().spec.id()},
               {"n_max", std::to_string(a.n_max)},
               {"reps", std::to_string(a.reps)},
               {"seed", std::to_string(a.seed)},
               {"delta", num(a.delta)},
               {"grid_points", std::to_string(a.grid_points)},
               {"t_max", num(t_max)}};

  bool inconclusive = false;
  json per_n = json::array();
  for (std::size_t n = 1; n <= a.n_max; ++n) {
    json entry{{"n", n}};
    OrderVerdict v;
    if (A.exact(n) && B.exact(n)) {
      const RefinedVerdict r = st_compare_refined(
          [&](const std::vector<double>& g) { return A.curve(n, g, per_curve); },
          [&](const std::vector<double>& g) { return B.curve(n, g, per_curve); }, grid_of,
          a.grid_points, a.grid_points * 4);
      v = r.verdict;
      entry["refinement"] = r.grid_sizes;
      entry["stable"] = r.stable;
    } else {
      v = st_compare(A.curve(n, grid, per_curve), B.curve(n, grid, per_curve));
    }
    inconclusive = inconclusive || v.relation == Relation::Inconclusive;
    entry["verdict"] = to_json(v);
    per_n.push_back(entry);
  }

  // N_A(t) <=_st N_B(t) iff P(N_A(t) >= k) <= P(N_B(t) >= k) for every k,
  // and P(N(t) >= k) = 1 - Gbar_k(t).
  json counting = json::array();
  for (double t : a.count_times) {
    if (!(t > 0.0)) throw ConfigError("--t values must be > 0");
    std::vector<double> ks, pa, pb;
    double margin = 0.0;
    bool statistical = false;
    for (std::size_t k = 1; k <= a.n_max; ++k) {
      const SurvivalCurve ca = A.curve(k, {0.0, t}, per_curve);
      const SurvivalCurve cb = B.curve(k, {0.0, t}, per_curve);
      ks.push_back(static_cast<double>(k));
      pa.push_back(1.0 - ca.values[1]);
      pb.push_back(1.0 - cb.values[1]);
      statistical = statistical || !ca.is_exact() || !cb.is_exact();
      margin = std::max(margin, ca.band() + cb.band());
    }
    if (!statistical) margin += kExactTieTolerance;
    const OrderVerdict v = pointwise_compare(ks, pa, pb, margin, statistical);
    inconclusive = inconclusive || v.relation == Relation::Inconclusive;
    counting.push_back({{"t", t}, {"verdict", to_json(v)}});
  }

  json coupling = nullptr;
  if (a.coupling) {
    if (!is_epb(a.a_process) || a.b_process != "renewal") {
      throw ConfigError("--coupling needs an EPB process (relevation, minimal-repair, yule) "
                        "as --a and renewal as --b");
    }
    const CoupledPaths cp = simulate_coupled_parallel(*B.model().seq, *A.model().seq, a.n_max,
                                                      a.reps, a.seed, threads_from_env());
    const DominanceReport below = check_dominance(cp, Dominance::EpbBelow);
    const DominanceReport above = check_dominance(cp, Dominance::EpbAbove);
    std::string certificate = "none";
    if (below.violating_paths == 0 && above.violating_paths == 0) {
      certificate = "equal";
    } else if (below.violating_paths == 0) {
      certificate = "ALessB";
    } else if (above.violating_paths == 0) {
      certificate = "BLessA";
    }
    auto report = [](const DominanceReport& d) {
      return json{{"violating_paths", d.violating_paths},
                  {"worst_excess", d.worst_excess},
                  {"worst_replication", d.worst_replication}};
    };
    coupling = {{"paths", below.paths},
                {"epb_below", report(below)},
                {"epb_above", report(above)},
                {"certificate", certificate}};
  }

  {
    json doc{{"config", echo_json("compare", echo)},
             {"per_n", per_n},
             {"counting", counting},
             {"coupling", coupling}};
    Output o(a.json_out, out);
    *o << doc.dump(2) << '\n';
  }

  if (!a.curves_out.empty()) {
    Output o(a.curves_out, out);
    write_echo(*o, "compare", echo);
    *o << kCurveHeader;
    for (std::size_t n = 1; n <= a.n_max; ++n) {
      write_curve_rows(*o, A.curve(n, grid, per_curve), n, A.label());
      write_curve_rows(*o, B.curve(n, grid, per_curve), n, B.label());
    }
  }
  return a.strict && inconclusive ? kExitInconclusive : kExitOk;
}

// ---------------------------------------------------------------------------
// figure

struct FigureArgs {
  std::string name;
  std::optional<std::uint64_t> seed;
  std::size_t reps = 100000;
  std::optional<std::size_t> points;
  double delta = 0.01;
  std::vector<double> intervals = {0.5, 1.0, 2.0};
  double t_max = 15.0;
  std::string output = "-";
  std::string svg;
};

int figure_cox(const FigureArgs& a, std::ostream& out) {
  const std::size_t points = a.points.value_or(512);
  const LifetimeDistribution law = LifetimeDistribution::lai_xie();
  const std::vector<double> grid = linear_grid(3.0, points);
  SurvivalCurve relevation = epb_marginal(DistributionSequence::iid(law), 2, grid);
  SurvivalCurve renewal;
  renewal.grid = grid;
  for (double t : grid) renewal.values.push_back(convolution_survival(law, law, t));
  renewal.kind = ExactCurve{1e-7};
  const OrderVerdict v = st_compare(relevation, renewal);

  std::string brackets;
  for (const Interval& c : v.crossings) {
    brackets += (brackets.empty() ? "" : ";") + num(c.lo) + ":" + num(c.hi);
  }
  Echo echo = {{"figure", "cox"},         {"law", law.describe()},
               {"points", std::to_string(points)}, {"relation", to_string(v.relation)},
               {"sign_changes", std::to_string(v.crossings.size())},
               {"crossings", brackets}};
  Output o(a.output, out);
  write_echo(*o, "figure", echo);
  *o << kCurveHeader;
  write_curve_rows(*o, relevation, 2, "relevation");
  write_curve_rows(*o, renewal, 2, "renewal");
  maybe_write_svg(a.svg, "laixie: T1#T2 vs T1+T2",
                  {series_of(relevation, "T1#T2"), series_of(renewal, "T1+T2")});
  return kExitOk;
}

int figure_age(const FigureArgs& a, std::ostream& out) {
  if (!a.seed) throw ConfigError("figure age simulates and needs --seed");
  check_delta(a.delta);
  if (a.intervals.empty()) throw ConfigError("--intervals must list at least one K");
  if (!(a.t_max > 0.0)) throw ConfigError("--t-max must be > 0");
  constexpr std::size_t kArrivals = 4;
  const std::size_t points = a.points.value_or(301);
  const LifetimeDistribution law = LifetimeDistribution::stoyanov();
  std::vector<double> grid = {0.0};
  for (double t : linear_grid(a.t_max, points - 1)) grid.push_back(t);
  const double per_curve = a.delta / static_cast<double>(kArrivals * a.intervals.size());

  std::vector<SurvivalCurve> mr;
  for (std::size_t n = 1; n <= kArrivals; ++n) {
    SurvivalCurve c;
    c.grid = grid;
    for (double t : grid) c.values.push_back(minimal_repair_marginal(law, n, t));
    c.kind = ExactCurve{1e-12};
    mr.push_back(std::move(c));
  }

  bool below = true;
  std::vector<std::pair<std::string, std::vector<SurvivalCurve>>> age;
  for (double K : a.intervals) {
    if (!(K > 0.0)) throw ConfigError("--intervals must be positive");
    SimulationRequest req{ProcessSpec{AgeReplacementPolicy{law, K}}, kArrivals, std::nullopt,
                          a.reps, *a.seed};
    const std::vector<ArrivalPath> paths = simulate_parallel(req, threads_from_env());
    std::vector<SurvivalCurve> curves = empirical_curve_set(paths, kArrivals, grid, per_curve);
    for (std::size_t n = 0; n < kArrivals; ++n) {
      for (std::size_t i = 0; i < grid.size(); ++i) {
        below = below && mr[n].values[i] <= curves[n].upper(i);
      }
    }
    age.emplace_back("age K=" + num(K), std::move(curves));
  }

  Echo echo = {{"figure", "age"},
               {"law", law.describe()},
               {"intervals", join(a.intervals)},
               {"reps", std::to_string(a.reps)},
               {"seed", std::to_string(*a.seed)},
               {"delta", num(a.delta)},
               {"points", std::to_string(grid.size())},
               {"t_max", num(a.t_max)},
               {"mr_below_age_band", below ? "true" : "false"}};
  Output o(a.output, out);
  write_echo(*o, "figure", echo);
  *o << kCurveHeader;
  std::vector<LineSeries> series;
  for (std::size_t n = 1; n <= kArrivals; ++n) {
    write_curve_rows(*o, mr[n - 1], n, "minimal-repair");
    series.push_back(series_of(mr[n - 1], "minimal repair n=" + std::to_string(n)));
  }
  for (const auto& [label, curves] : age) {
    for (std::size_t n = 1; n <= kArrivals; ++n) {
      write_curve_rows(*o, curves[n - 1], n, label);
      series.push_back(series_of(curves[n - 1], label + " n=" + std::to_string(n)));
    }
  }
  maybe_write_svg(a.svg, "stoyanov: minimal repair vs age replacement", series);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// ageing and relevation-curve

int cmd_ageing(const std::string& dist, const std::string& json_out, std::ostream& out) {
  const AgeingReport r = classify(parse_distribution(dist));
  json doc = to_json(r);
  doc["config"] = echo_json("ageing", {{"dist", dist}});
  Output o(json_out, out);
  *o << doc.dump(2) << '\n';
  return kExitOk;
}

struct CurveArgs {
  std::string dist;
  std::string second;
  std::string sequence;
  std::optional<std::size_t> n;
  std::optional<double> t_max;
  std::size_t points = 256;
  std::string output = "-";
  std::string svg;
};

int cmd_relevation_curve(const CurveArgs& a, std::ostream& out) {
  if (a.dist.empty() == a.sequence.empty()) {
    throw ConfigError("relevation-curve needs exactly one of --dist or --sequence");
  }
  SurvivalCurve curve;
  Echo echo;
  std::size_t n = 2;
  if (a.n || !a.sequence.empty()) {
    if (!a.second.empty()) throw ConfigError("--second applies to the two-unit curve, not --n");
    n = a.n.value_or(2);
    if (n == 0) throw ConfigError("--n must be >= 1");
    const DistributionSequence seq = a.sequence.empty()
                                         ? DistributionSequence::iid(parse_distribution(a.dist))
                                         : load_sequence_file(a.sequence);
    double t_max = 0.0;
    for (std::size_t k = 1; k <= n; ++k) t_max += seq.nth(k).quantile(0.999);
    t_max = a.t_max.value_or(t_max);
    if (!(t_max > 0.0)) throw ConfigError("--t-max must be > 0");
    curve = epb_marginal(seq, n, log_grid(t_max, a.points));
    echo = {{"sequence", seq.describe()}, {"n", std::to_string(n)}};
  } else {
    const LifetimeDistribution first = parse_distribution(a.dist);
    const LifetimeDistribution second = a.second.empty() ? first : parse_distribution(a.second);
    const double t_max = a.t_max.value_or(first.quantile(0.999) + second.quantile(0.999));
    if (!(t_max > 0.0)) throw ConfigError("--t-max must be > 0");
    curve.grid = log_grid(t_max, a.points);
    for (double t : curve.grid) curve.values.push_back(relevation_transform(first, second, t));
    curve.kind = ExactCurve{1e-8};
    echo = {{"first", first.describe()}, {"second", second.describe()}};
  }
  echo.emplace_back("points", std::to_string(a.points));
  echo.emplace_back("t_max", num(curve.grid.back()));
  Output o(a.output, out);
  write_echo(*o, "relevation-curve", echo);
  *o << kCurveHeader;
  write_curve_rows(*o, curve, n, "relevation");
  maybe_write_svg(a.svg, "relevation survival", {series_of(curve, "relevation n=" + std::to_string(n))});
  return kExitOk;
}

}  // namespace

int threads_from_env() {
  const char* raw = std::getenv("RELEV_THREADS");
  if (raw == nullptr || *raw == '\0') return 0;
  char* end = nullptr;
  const long v = std::strtol(raw, &end, 10);
  if (*end != '\0' || v < 1 || v > 4096) {
    throw ConfigError(std::string("RELEV_THREADS must be a positive integer, got '") + raw + "'");
  }
  return static_cast<int>(v);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Relevation and replacement processes: simulation, stochastic orders, ageing"};
  app.name("relev");
  app.require_subcommand(1);
  std::function<int()> action;

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Simulate arrival paths and empirical curves");
  simulate->add_option("--process", sim.model.process, "Replacement policy")
      ->required()
      ->check(CLI::IsMember(kProcesses));
  simulate->add_option("--dist", sim.model.dist, "Lifetime law, e.g. gamma:shape=2");
  simulate->add_option("--sequence", sim.model.sequence_file, "JSON file with a law sequence");
  simulate->add_option("--offset", sim.model.offset, "Yule multiplier offset")->capture_default_str();
  simulate->add_option("--interval", sim.model.interval, "Age replacement interval K")
      ->capture_default_str();
  simulate->add_option("--n", sim.n, "Arrivals per path")->check(CLI::PositiveNumber);
  simulate->add_option("--horizon", sim.horizon, "Record every arrival up to this time");
  simulate->add_option("--reps", sim.reps, "Replications")->check(CLI::PositiveNumber);
  simulate->add_option("--seed", sim.seed, "Master seed")->required();
  simulate->add_option("--paths", sim.paths_out, "Path CSV ('-' for stdout)");
  simulate->add_option("--curves", sim.curves_out, "Empirical curve CSV");
  simulate->add_option("--grid-points", sim.grid_points)->check(CLI::Range(2, 1 << 20));
  simulate->add_option("--t-max", sim.t_max, "Curve grid end");
  simulate->add_option("--delta", sim.delta, "Band level, split across curves");
  simulate->callback([&] { action = [&] { return cmd_simulate(sim, out); }; });

  CompareArgs cmp;
  auto* compare = app.add_subcommand("compare", "Stochastic comparison of two processes");
  compare->add_option("--a", cmp.a_process)->check(CLI::IsMember(kProcesses))->capture_default_str();
  compare->add_option("--b", cmp.b_process)->check(CLI::IsMember(kProcesses))->capture_default_str();
  compare->add_option("--dist", cmp.dist, "Law shared by both sides");
  compare->add_option("--sequence", cmp.sequence, "Sequence file shared by both sides");
  compare->add_option("--a-dist", cmp.a_dist);
  compare->add_option("--b-dist", cmp.b_dist);
  compare->add_option("--a-sequence", cmp.a_sequence);
  compare->add_option("--b-sequence", cmp.b_sequence);
  compare->add_option("--offset", cmp.offset);
  compare->add_option("--interval", cmp.interval);
  compare->add_option("--n-max", cmp.n_max)->check(CLI::PositiveNumber);
  compare->add_option("--reps", cmp.reps)->check(CLI::PositiveNumber);
  compare->add_option("--seed", cmp.seed)->required();
  compare->add_option("--t", cmp.count_times, "Times for counting-process verdicts")
      ->delimiter(',');
  compare->add_flag("--coupling", cmp.coupling, "Add the pathwise coupling certificate");
  compare->add_option("--grid-points", cmp.grid_points)->check(CLI::Range(2, 1 << 20));
  compare->add_option("--t-max", cmp.t_max);
  compare->add_option("--delta", cmp.delta);
  compare->add_option("--json", cmp.json_out, "Verdict JSON ('-' for stdout)");
  compare->add_option("--curves", cmp.curves_out, "Curve CSV");
  compare->add_flag("--strict", cmp.strict, "Exit 4 on inconclusive verdicts");
  compare->callback([&] { action = [&] { return cmd_compare(cmp, out); }; });

  FigureArgs fig;
  auto* figure = app.add_subcommand("figure", "Plot data for the cox and age figures");
  figure->add_option("name", fig.name)->required()->check(CLI::IsMember({"cox", "age"}));
  figure->add_option("--seed", fig.seed);
  figure->add_option("--reps", fig.reps)->check(CLI::PositiveNumber);
  figure->add_option("--points", fig.points)->check(CLI::Range(3, 1 << 20));
  figure->add_option("--delta", fig.delta);
  figure->add_option("--intervals", fig.intervals)->delimiter(',');
  figure->add_option("--t-max", fig.t_max);
  figure->add_option("--output", fig.output, "CSV ('-' for stdout)");
  figure->add_option("--svg", fig.svg, "Also draw an SVG line chart");
  figure->callback([&] {
    action = [&] { return fig.name == "cox" ? figure_cox(fig, out) : figure_age(fig, out); };
  });

  std::string ageing_dist, ageing_json = "-";
  auto* ageing = app.add_subcommand("ageing", "IFR/DFR/NBU/NWU classification");
  ageing->add_option("--dist", ageing_dist)->required();
  ageing->add_option("--json", ageing_json);
  ageing->callback([&] { action = [&] { return cmd_ageing(ageing_dist, ageing_json, out); }; });

  CurveArgs rc;
  auto* curve = app.add_subcommand("relevation-curve", "Exact relevation / EPB survival curve");
  curve->add_option("--dist", rc.dist);
  curve->add_option("--second", rc.second, "Law of the replacing unit (default: --dist)");
  curve->add_option("--sequence", rc.sequence);
  curve->add_option("--n", rc.n, "EPB arrival index");
  curve->add_option("--t-max", rc.t_max);
  curve->add_option("--points", rc.points)->check(CLI::Range(2, 1 << 20));
  curve->add_option("--output", rc.output);
  curve->add_option("--svg", rc.svg);
  curve->callback([&] { action = [&] { return cmd_relevation_curve(rc, out); }; });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    return action();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DomainError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  }
}

}  // namespace relev::cli

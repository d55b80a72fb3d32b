#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "relev/distribution.hpp"

namespace relev {

/// Boundary: the defining inequality held with equality (within tolerance)
/// everywhere, as for the exponential law.
enum class TriState { Yes, No, Boundary };

const char* to_string(TriState s);

/// For hazard checks: r(s) and r(t) at adjacent grid points s < t.
/// For NBU checks: lhs = Fbar(s + t), rhs = Fbar(s) Fbar(t).
struct AgeingWitness {
  double s = 0.0;
  double t = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
};

struct MonotonicityResult {
  TriState ifr = TriState::Boundary;
  TriState dfr = TriState::Boundary;
  /// Worst rise and worst fall, when present.
  std::vector<AgeingWitness> witnesses;
  /// Grid points where significant hazard steps change direction.
  std::vector<double> turning_points;
};

struct NbuResult {
  TriState nbu = TriState::Boundary;
  TriState nwu = TriState::Boundary;
  /// Worst violation of each inequality, when present.
  std::vector<AgeingWitness> witnesses;
};

/// Signs of successive hazard differences on `grid`; steps within 1e-9
/// (relative above 1) are flat. Points where the density is singular are
/// skipped.
MonotonicityResult classify_hazard_monotonicity(const LifetimeDistribution& d,
                                                const std::vector<double>& grid);

/// Product-form check of Fbar(s + t) against Fbar(s) Fbar(t) over the grid
/// product, tolerance 1e-9 relative to Fbar(s) Fbar(t).
NbuResult classify_nbu(const LifetimeDistribution& d, const std::vector<double>& s_grid,
                       const std::vector<double>& t_grid);

struct AgeingReport {
  std::string law;
  TriState ifr = TriState::Boundary;
  TriState dfr = TriState::Boundary;
  TriState nbu = TriState::Boundary;
  TriState nwu = TriState::Boundary;
  std::vector<AgeingWitness> hazard_witnesses;
  std::vector<double> turning_points;
  std::vector<AgeingWitness> nbu_witnesses;
  std::vector<double> hazard_grid;
  std::vector<double> nbu_grid;  // used for both s and t
};

/// `points` log-spaced times from q * 1e-3 to q, q the 0.995 quantile.
std::vector<double> ageing_grid(const LifetimeDistribution& d, std::size_t points);

/// Both classifiers on default grids (512 hazard points, 64 x 64 pairs),
/// followed by check_consistency.
AgeingReport classify(const LifetimeDistribution& d);

/// Throws NumericError when IFR [DFR] = yes comes with NBU [NWU] = no, or a
/// flat hazard comes without NBU = NWU = boundary.
void check_consistency(const AgeingReport& r);

nlohmann::json to_json(const AgeingReport& r);

}  // namespace relev

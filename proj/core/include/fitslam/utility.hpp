#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "fitslam/fisher.hpp"
#include "fitslam/frontier.hpp"
#include "fitslam/planner.hpp"

namespace fitslam {

struct CandidateGoal {
  FrontierCluster cluster;
  Cell cell;                 ///< cluster.candidate
  std::size_t index = 0;     ///< row-major index of `cell`, the final tie-break
  Point2 position;           ///< world coordinates of the cell center
  Path path;                 ///< filled for candidates that need one
  double rho = 0.0;          ///< path length to the goal, meters
  double delta_e = 0.0;      ///< entropy gain at the goal, bits
  double theta_star = 0.0;   ///< best arrival orientation, radians
  double u1 = 0.0;
  std::optional<PathInformation> info;
  std::optional<double> u2;
};

struct UtilityParams {
  double alpha = 0.35;
  double beta = 0.4;
  int shortlist_n = 7;
  /// Path lengths below this are treated as this value in the distance term.
  double rho_floor = 0.0;

  /// Throws ConfigError when a weight leaves [0, 1] or shortlist_n < 1.
  void validate() const;
};

/// u1 = alpha * N_rho * (1/rho) + (1 - alpha) * N_dE * dE with both
/// normalizers the reciprocal of the set maximum (the entropy term is 0 when
/// every dE is 0). Throws EmptyCandidateSet, or ConfigError for negative rho
/// or dE.
void compute_u1(std::span<CandidateGoal> candidates, const UtilityParams& params);

/// Strict ranking: higher score first, then smaller rho, then smaller index.
bool ranks_before(double score_a, const CandidateGoal& a, double score_b, const CandidateGoal& b);

/// Top-n candidates by u1.
std::vector<CandidateGoal> shortlist(std::span<const CandidateGoal> candidates, int n);

/// Sets u2 = beta * u1 + (1 - beta) * I_p on every candidate and returns the
/// argmax. Throws EmptyCandidateSet, or ConfigError when a candidate lacks
/// path information.
CandidateGoal select_best(std::span<CandidateGoal> shortlisted, const UtilityParams& params);

}  // namespace fitslam

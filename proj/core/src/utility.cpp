#include "fitslam/utility.hpp"

#include <algorithm>

namespace fitslam {

void UtilityParams::validate() const {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ConfigError("alpha must be in [0, 1]");
  if (!(beta >= 0.0 && beta <= 1.0)) throw ConfigError("beta must be in [0, 1]");
  if (shortlist_n < 1) throw ConfigError("shortlist size must be >= 1");
  if (!(rho_floor >= 0.0)) throw ConfigError("rho_floor must be >= 0");
}

void compute_u1(std::span<CandidateGoal> candidates, const UtilityParams& params) {
  params.validate();
  if (candidates.empty()) throw EmptyCandidateSet("no candidates to score");

  std::vector<double> inv_rho;
  inv_rho.reserve(candidates.size());
  double max_inv_rho = 0.0;
  double max_gain = 0.0;
  for (const CandidateGoal& c : candidates) {
    if (!(c.rho >= 0.0) || !(c.delta_e >= 0.0)) throw ConfigError("candidate rho and delta_e must be >= 0");
    const double rho = std::max(c.rho, params.rho_floor);
    if (!(rho > 0.0)) throw ConfigError("candidate rho must be > 0");
    inv_rho.push_back(1.0 / rho);
    max_inv_rho = std::max(max_inv_rho, inv_rho.back());
    max_gain = std::max(max_gain, c.delta_e);
  }

  for (std::size_t k = 0; k < candidates.size(); ++k) {
    // Dividing by the maximum keeps the top term at exactly 1.
    const double distance_term = inv_rho[k] / max_inv_rho;
    const double gain_term = max_gain > 0.0 ? candidates[k].delta_e / max_gain : 0.0;
    const double u1 = params.alpha * distance_term + (1.0 - params.alpha) * gain_term;
    candidates[k].u1 = std::clamp(u1, 0.0, 1.0);
  }
}

bool ranks_before(double score_a, const CandidateGoal& a, double score_b, const CandidateGoal& b) {
  if (score_a != score_b) return score_a > score_b;
  if (a.rho != b.rho) return a.rho < b.rho;
  return a.index < b.index;
}

std::vector<CandidateGoal> shortlist(std::span<const CandidateGoal> candidates, int n) {
  if (n < 1) throw ConfigError("shortlist size must be >= 1");
  std::vector<CandidateGoal> out(candidates.begin(), candidates.end());
  std::sort(out.begin(), out.end(),
            [](const CandidateGoal& a, const CandidateGoal& b) { return ranks_before(a.u1, a, b.u1, b); });
  if (out.size() > static_cast<std::size_t>(n)) out.resize(static_cast<std::size_t>(n));
  return out;
}

CandidateGoal select_best(std::span<CandidateGoal> shortlisted, const UtilityParams& params) {
  params.validate();
  if (shortlisted.empty()) throw EmptyCandidateSet("no shortlisted candidates");
  std::size_t best = 0;
  for (std::size_t k = 0; k < shortlisted.size(); ++k) {
    CandidateGoal& c = shortlisted[k];
    if (!c.info) throw ConfigError("shortlisted candidate lacks path information");
    c.u2 = params.beta * c.u1 + (1.0 - params.beta) * c.info->value;
    if (k > 0 && ranks_before(*c.u2, c, *shortlisted[best].u2, shortlisted[best])) best = k;
  }
  return shortlisted[best];
}

}  // namespace fitslam

#pragma once

#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "dtseq/model.hpp"

namespace dtseq {

struct DurationRecord {
  std::string user_id;
  double duration = 0.0;  // minutes
  bool event_observed = false;
  Platform platform;
};

enum class SinglePlatformPolicy { IncludeCensored, Exclude };

struct DurationSet {
  std::vector<DurationRecord> records;
  /// Records whose duration was zero and were bumped to one second.
  std::int64_t zero_adjusted = 0;
};

/// One record per platform session. A session's duration runs from its start
/// to the start of the next session on a different platform (event observed);
/// when no such session follows, it is censored at its own span.
/// `sessions_per_user` holds platform-merged sessions, one list per user.
DurationSet build_durations(std::span<const std::vector<Session>> sessions_per_user,
                            SinglePlatformPolicy policy = SinglePlatformPolicy::IncludeCensored);

struct SurvivalPoint {
  double time = 0.0;
  double survival = 1.0;
  double variance = 0.0;  // Greenwood
  double lower = 1.0;
  double upper = 1.0;
  std::int64_t at_risk = 0;
  std::int64_t events = 0;
  std::int64_t censored = 0;
};

struct SurvivalCurve {
  std::string group;
  /// Starts with t = 0, S = 1; then one point per distinct event time.
  std::vector<SurvivalPoint> points;
  bool no_events = false;

  /// Step-function value at t.
  double at(double t) const;
};

/// Product-limit estimate with Greenwood variance and log-log 95% bounds.
SurvivalCurve kaplan_meier(std::span<const double> durations, std::span<const bool> observed,
                           std::string group = {});

/// One curve per platform, ordered by platform name.
std::vector<SurvivalCurve> kaplan_meier_by_platform(std::span<const DurationRecord> records);

struct CoxOptions {
  double tolerance = 1e-9;
  int max_iterations = 50;
};

struct CoxFit {
  std::vector<std::string> names;
  Eigen::VectorXd coef;
  Eigen::VectorXd se;
  Eigen::VectorXd z;
  Eigen::VectorXd p;
  double log_likelihood = 0.0;
  /// Partial log-likelihood after every accepted step, starting at beta = 0.
  std::vector<double> trace;
  int iterations = 0;
  int step_halvings = 0;
  bool converged = false;
  double score_norm = 0.0;
};

/// Breslow partial log-likelihood at `beta`; rows of `x` are records.
double cox_log_likelihood(const Eigen::MatrixXd& x, std::span<const double> time, std::span<const bool> event,
                          const Eigen::VectorXd& beta);

/// Newton-Raphson with step halving on the Breslow partial likelihood. Stops
/// when the score max-norm is below `tolerance` or the predicted gain of the
/// next step is under the rounding floor of the likelihood.
/// Throws SingularModel when the information matrix cannot be inverted,
/// InvalidInput when there are no events or shapes disagree.
CoxFit cox_fit(const Eigen::MatrixXd& x, std::span<const double> time, std::span<const bool> event,
               std::vector<std::string> names, const CoxOptions& options = {});

/// Platform dummies against `baseline`; throws InvalidInput if fewer than two
/// platforms are present or the baseline is absent.
CoxFit cox_fit_platforms(std::span<const DurationRecord> records, const std::string& baseline = "YouTube",
                         const CoxOptions& options = {});

void write_curve_csv(std::ostream& out, const SurvivalCurve& curve);
void write_cox_csv(std::ostream& out, const CoxFit& fit);

}  // namespace dtseq

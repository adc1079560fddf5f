#include "dtseq/survival.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>
#include <ostream>
#include <set>

#include <Eigen/Dense>

#include "dtseq/error.hpp"
#include "dtseq/io.hpp"
#include "dtseq/stats.hpp"

namespace dtseq {

DurationSet build_durations(std::span<const std::vector<Session>> sessions_per_user, SinglePlatformPolicy policy) {
  DurationSet out;
  const double one_second = 1.0 / 60.0;
  for (const auto& sessions : sessions_per_user) {
    std::set<std::string> platforms;
    for (const auto& s : sessions) platforms.insert(s.descriptor.platform.name());
    if (platforms.size() < 2 && policy == SinglePlatformPolicy::Exclude) continue;

    // Walk backwards carrying the start of the nearest later session on a
    // different platform.
    std::vector<DurationRecord> user_records(sessions.size());
    std::optional<Instant> next_other;
    for (std::size_t k = sessions.size(); k-- > 0;) {
      const Session& s = sessions[k];
      if (k + 1 < sessions.size() && sessions[k + 1].descriptor.platform != s.descriptor.platform)
        next_other = sessions[k + 1].start;

      DurationRecord r;
      r.user_id = s.user_id;
      r.platform = s.descriptor.platform;
      if (next_other) {
        r.duration = std::chrono::duration<double, std::ratio<60>>(*next_other - s.start).count();
        r.event_observed = true;
      } else {
        r.duration = std::chrono::duration<double, std::ratio<60>>(s.end - s.start).count();
        r.event_observed = false;
      }
      if (r.duration <= 0.0) {
        r.duration = one_second;
        ++out.zero_adjusted;
      }
      user_records[k] = std::move(r);
    }
    out.records.insert(out.records.end(), std::make_move_iterator(user_records.begin()),
                       std::make_move_iterator(user_records.end()));
  }
  return out;
}

double SurvivalCurve::at(double t) const {
  double s = 1.0;
  for (const auto& p : points) {
    if (p.time > t) break;
    s = p.survival;
  }
  return s;
}

SurvivalCurve kaplan_meier(std::span<const double> durations, std::span<const bool> observed, std::string group) {
  if (durations.size() != observed.size())
    throw Error(ErrorKind::InvalidInput, "durations and event flags differ in length");
  SurvivalCurve curve;
  curve.group = std::move(group);
  curve.points.push_back(SurvivalPoint{0.0, 1.0, 0.0, 1.0, 1.0, static_cast<std::int64_t>(durations.size()), 0, 0});

  std::vector<std::size_t> order(durations.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return durations[a] < durations[b]; });

  auto at_risk = static_cast<std::int64_t>(durations.size());
  double s = 1.0;
  double greenwood = 0.0;
  std::int64_t total_events = 0;
  const double z = 1.959963984540054;
  for (std::size_t i = 0; i < order.size();) {
    const double t = durations[order[i]];
    std::int64_t d = 0, c = 0;
    std::size_t j = i;
    for (; j < order.size() && durations[order[j]] == t; ++j) (observed[order[j]] ? d : c) += 1;
    if (d > 0) {
      const auto n = static_cast<double>(at_risk);
      s *= 1.0 - static_cast<double>(d) / n;
      if (at_risk > d) greenwood += static_cast<double>(d) / (n * (n - static_cast<double>(d)));
      SurvivalPoint p;
      p.time = t;
      p.survival = s;
      p.at_risk = at_risk;
      p.events = d;
      p.censored = c;
      if (s > 0.0 && s < 1.0) {
        p.variance = s * s * greenwood;
        const double log_s = std::log(s);
        const double sigma = std::sqrt(greenwood / (log_s * log_s));
        p.lower = std::pow(s, std::exp(z * sigma));
        p.upper = std::pow(s, std::exp(-z * sigma));
      } else {
        p.variance = 0.0;
        p.lower = p.upper = s;
      }
      curve.points.push_back(p);
      total_events += d;
    }
    at_risk -= d + c;
    i = j;
  }
  curve.no_events = total_events == 0;
  return curve;
}

std::vector<SurvivalCurve> kaplan_meier_by_platform(std::span<const DurationRecord> records) {
  std::map<std::string, std::pair<std::vector<double>, std::vector<bool>>> groups;
  for (const auto& r : records) {
    auto& g = groups[r.platform.name()];
    g.first.push_back(r.duration);
    g.second.push_back(r.event_observed);
  }
  std::vector<SurvivalCurve> out;
  for (auto& [name, g] : groups) {
    std::vector<char> flags(g.second.begin(), g.second.end());
    std::unique_ptr<bool[]> obs(new bool[flags.size()]);
    for (std::size_t i = 0; i < flags.size(); ++i) obs[i] = flags[i] != 0;
    out.push_back(kaplan_meier(g.first, std::span<const bool>(obs.get(), flags.size()), name));
  }
  return out;
}

namespace {

struct CoxState {
  double ll = 0.0;
  Eigen::VectorXd score;
  Eigen::MatrixXd info;
};

/// Breslow log-likelihood, score and observed information. `order` sorts
/// records by time descending.
CoxState cox_state(const Eigen::MatrixXd& x, std::span<const double> time, std::span<const bool> event,
                   const std::vector<std::size_t>& order, const Eigen::VectorXd& beta, bool derivatives) {
  const Eigen::Index p = x.cols();
  const Eigen::VectorXd eta = x * beta;
  const double shift = eta.size() ? eta.maxCoeff() : 0.0;

  CoxState st;
  st.score = Eigen::VectorXd::Zero(p);
  st.info = Eigen::MatrixXd::Zero(p, p);
  double s0 = 0.0;
  Eigen::VectorXd s1 = Eigen::VectorXd::Zero(p);
  Eigen::MatrixXd s2 = Eigen::MatrixXd::Zero(p, p);

  for (std::size_t i = 0; i < order.size();) {
    const double t = time[order[i]];
    std::size_t j = i;
    for (; j < order.size() && time[order[j]] == t; ++j) {
      const auto r = static_cast<Eigen::Index>(order[j]);
      const double w = std::exp(eta(r) - shift);
      s0 += w;
      if (derivatives) {
        s1 += w * x.row(r).transpose();
        s2 += w * x.row(r).transpose() * x.row(r);
      }
    }
    const double log_s0 = std::log(s0) + shift;
    for (std::size_t k = i; k < j; ++k) {
      if (!event[order[k]]) continue;
      const auto r = static_cast<Eigen::Index>(order[k]);
      st.ll += eta(r) - log_s0;
      if (derivatives) {
        const Eigen::VectorXd mean = s1 / s0;
        st.score += x.row(r).transpose() - mean;
        st.info += s2 / s0 - mean * mean.transpose();
      }
    }
    i = j;
  }
  return st;
}

std::vector<std::size_t> descending_time(std::span<const double> time) {
  std::vector<std::size_t> order(time.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return time[a] > time[b]; });
  return order;
}

bool well_conditioned(const Eigen::MatrixXd& info) {
  if (info.size() == 0) return false;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(info, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().cwiseAbs().maxCoeff();
  return std::isfinite(lo) && lo > 1e-12 * std::max(1.0, hi);
}

}  // namespace

double cox_log_likelihood(const Eigen::MatrixXd& x, std::span<const double> time, std::span<const bool> event,
                          const Eigen::VectorXd& beta) {
  return cox_state(x, time, event, descending_time(time), beta, false).ll;
}

CoxFit cox_fit(const Eigen::MatrixXd& x, std::span<const double> time, std::span<const bool> event,
               std::vector<std::string> names, const CoxOptions& options) {
  const auto n = static_cast<std::size_t>(x.rows());
  if (time.size() != n || event.size() != n || names.size() != static_cast<std::size_t>(x.cols()))
    throw Error(ErrorKind::InvalidInput, "Cox design, times, events and names disagree in size");
  if (x.cols() == 0) throw Error(ErrorKind::InvalidInput, "Cox model needs at least one covariate");
  if (std::none_of(event.begin(), event.end(), [](bool e) { return e; }))
    throw Error(ErrorKind::InvalidInput, "Cox model needs at least one event");

  const auto order = descending_time(time);
  CoxFit fit;
  fit.names = std::move(names);
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(x.cols());
  CoxState st = cox_state(x, time, event, order, beta, true);
  if (!well_conditioned(st.info))
    throw Error(ErrorKind::SingularModel, "singular information matrix: no covariate variation among events");
  fit.trace.push_back(st.ll);

  for (;;) {
    fit.score_norm = st.score.cwiseAbs().maxCoeff();
    if (fit.score_norm < options.tolerance) {
      fit.converged = true;
      break;
    }
    if (fit.iterations >= options.max_iterations || !well_conditioned(st.info)) break;
    Eigen::VectorXd step = st.info.ldlt().solve(st.score);
    // Predicted gain below the rounding floor of the likelihood.
    if (st.score.dot(step) < 1e-14 * (1.0 + std::abs(st.ll))) {
      fit.converged = true;
      break;
    }
    CoxState next;
    Eigen::VectorXd candidate;
    bool accepted = false;
    for (int h = 0; h < 40; ++h) {
      candidate = beta + step;
      next = cox_state(x, time, event, order, candidate, true);
      if (std::isfinite(next.ll) && next.ll >= st.ll) {
        accepted = true;
        break;
      }
      step *= 0.5;
      ++fit.step_halvings;
    }
    if (!accepted) break;
    ++fit.iterations;
    beta = candidate;
    st = std::move(next);
    fit.trace.push_back(st.ll);
  }

  fit.coef = beta;
  fit.log_likelihood = st.ll;
  const Eigen::Index p = x.cols();
  fit.se = Eigen::VectorXd::Constant(p, std::numeric_limits<double>::quiet_NaN());
  fit.z = fit.se;
  fit.p = fit.se;
  if (well_conditioned(st.info)) {
    const Eigen::MatrixXd cov = st.info.inverse();
    for (Eigen::Index i = 0; i < p; ++i) {
      fit.se(i) = std::sqrt(cov(i, i));
      fit.z(i) = beta(i) / fit.se(i);
      fit.p(i) = stats::normal_two_sided_p(fit.z(i));
    }
  }
  return fit;
}

CoxFit cox_fit_platforms(std::span<const DurationRecord> records, const std::string& baseline,
                         const CoxOptions& options) {
  std::set<std::string> levels;
  for (const auto& r : records) levels.insert(r.platform.name());
  if (levels.size() < 2) throw Error(ErrorKind::InvalidInput, "Cox model needs at least two platforms");
  if (!levels.count(baseline)) throw Error(ErrorKind::InvalidInput, "baseline platform '" + baseline + "' absent");
  std::vector<std::string> names;
  for (const auto& l : levels)
    if (l != baseline) names.push_back(l);

  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(records.size()),
                                            static_cast<Eigen::Index>(names.size()));
  std::vector<double> time;
  std::unique_ptr<bool[]> event(new bool[records.size()]);
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    auto it = std::find(names.begin(), names.end(), r.platform.name());
    if (it != names.end()) x(static_cast<Eigen::Index>(i), it - names.begin()) = 1.0;
    time.push_back(r.duration);
    event[i] = r.event_observed;
  }
  return cox_fit(x, time, std::span<const bool>(event.get(), records.size()), std::move(names), options);
}

void write_curve_csv(std::ostream& out, const SurvivalCurve& curve) {
  out << "t,S,lo,hi,at_risk,events,censored\n";
  for (const auto& p : curve.points)
    write_csv_row(out, {fmt_double(p.time), fmt_double(p.survival), fmt_double(p.lower), fmt_double(p.upper),
                        std::to_string(p.at_risk), std::to_string(p.events), std::to_string(p.censored)});
}

void write_cox_csv(std::ostream& out, const CoxFit& fit) {
  out << "covariate,coef,exp_coef,se_coef,z,p\n";
  for (Eigen::Index i = 0; i < fit.coef.size(); ++i)
    write_csv_row(out, {fit.names[static_cast<std::size_t>(i)], fmt_double(fit.coef(i)), fmt_double(std::exp(fit.coef(i))),
                        fmt_double(fit.se(i)), fmt_double(fit.z(i)), fmt_double(fit.p(i))});
}

}  // namespace dtseq

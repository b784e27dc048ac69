#include "resokit/fit.hpp"

#include "resokit/error.hpp"
#include "resokit/extract.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include <Eigen/Dense>
#include <fmt/format.h>

namespace resokit {

namespace {

constexpr int kNumParams = 6;
constexpr double kMaxDamping = 1e16;
using LogParams = std::array<double, kNumParams>;

MbvdParams from_log(const LogParams& lp) {
  return {std::exp(lp[0]), std::exp(lp[1]), std::exp(lp[2]),
          std::exp(lp[3]), std::exp(lp[4]), std::exp(lp[5])};
}

LogParams to_log(const MbvdParams& p, double r_floor) {
  return {std::log(std::max(p.r_s, r_floor)), std::log(std::max(p.r_0, r_floor)),
          std::log(std::max(p.r_m, r_floor)), std::log(p.l_m),
          std::log(p.c_m),                    std::log(p.c_0)};
}

std::vector<double> sample_weights(const AdmittanceTrace& y) {
  double peak = 0.0;
  for (const auto& v : y.y()) peak = std::max(peak, std::abs(v));
  std::vector<double> w(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double m = std::max(std::abs(y.y()[i]), 0.01 * peak);
    w[i] = 1.0 / (m * m);
  }
  return w;
}

class Problem {
public:
  Problem(const AdmittanceTrace& y, const FitConfig& config)
      : y_(y), sqrt_w_(sample_weights(y)), config_(config) {
    for (double& w : sqrt_w_) w = std::sqrt(w);
  }

  void residuals(const LogParams& lp, Eigen::VectorXd& r) const {
    const MbvdParams p = from_log(lp);
    const std::size_t n = y_.size();
    r.resize(static_cast<Eigen::Index>(2 * n));
    for (std::size_t i = 0; i < n; ++i) {
      const Complex d = (admittance(p, y_.frequencies()[i]) - y_.y()[i]) * sqrt_w_[i];
      r(static_cast<Eigen::Index>(i)) = d.real();
      r(static_cast<Eigen::Index>(n + i)) = d.imag();
    }
  }

  double cost(const LogParams& lp) const {
    Eigen::VectorXd r;
    residuals(lp, r);
    const double c = r.squaredNorm();
    return std::isfinite(c) ? c : std::numeric_limits<double>::infinity();
  }

  void jacobian(const LogParams& lp, const Eigen::VectorXd& r0, double step,
                Eigen::MatrixXd& jac) const {
    jac.resize(r0.size(), kNumParams);
    Eigen::VectorXd r;
    for (int k = 0; k < kNumParams; ++k) {
      LogParams shifted = lp;
      shifted[k] += step;
      residuals(shifted, r);
      jac.col(k) = (r - r0) / step;
    }
  }

  void clamp(LogParams& lp) const {
    const double floor = std::log(config_.resistance_floor);
    for (int k = 0; k < 3; ++k) lp[k] = std::max(lp[k], floor);
  }

private:
  const AdmittanceTrace& y_;
  std::vector<double> sqrt_w_;
  const FitConfig& config_;
};

struct StageOutcome {
  int iterations = 0;
  bool converged = false;
};

// Levenberg-style damped Gauss-Newton over the free subset of log-parameters.
StageOutcome run_stage(const Problem& problem, const FitConfig& config,
                       std::span<const int> free, int max_iterations, LogParams& lp,
                       std::vector<double>& history) {
  const auto m = static_cast<Eigen::Index>(free.size());
  double damping = config.initial_damping;
  Eigen::VectorXd r;
  problem.residuals(lp, r);
  double cost = r.squaredNorm();
  Eigen::MatrixXd jac_full;

  StageOutcome out;
  while (out.iterations < max_iterations) {
    ++out.iterations;
    problem.jacobian(lp, r, config.jacobian_step, jac_full);
    Eigen::MatrixXd jac(jac_full.rows(), m);
    for (Eigen::Index j = 0; j < m; ++j) jac.col(j) = jac_full.col(free[j]);
    const Eigen::MatrixXd normal = jac.transpose() * jac;
    const Eigen::VectorXd grad = jac.transpose() * r;

    bool accepted = false;
    LogParams trial{};
    double trial_cost = 0.0;
    double step_norm = 0.0;
    while (damping <= kMaxDamping) {
      Eigen::MatrixXd lhs = normal;
      for (Eigen::Index j = 0; j < m; ++j) {
        lhs(j, j) += damping * std::max(normal(j, j), 1e-300);
      }
      const Eigen::VectorXd delta = lhs.ldlt().solve(-grad);
      trial = lp;
      for (Eigen::Index j = 0; j < m; ++j) trial[free[j]] += delta(j);
      problem.clamp(trial);
      trial_cost = problem.cost(trial);
      if (trial_cost < cost) {
        step_norm = 0.0;
        for (Eigen::Index j = 0; j < m; ++j) {
          step_norm = std::max(step_norm, std::abs(trial[free[j]] - lp[free[j]]));
        }
        accepted = true;
        break;
      }
      damping *= 10.0;
    }
    if (!accepted) {
      // No descent direction left at this point.
      out.converged = true;
      return out;
    }
    const double improvement = (cost - trial_cost) / cost;
    lp = trial;
    cost = trial_cost;
    problem.residuals(lp, r);
    history.push_back(cost);
    damping = std::max(damping / 10.0, 1e-12);
    if (improvement < config.min_relative_improvement || step_norm < config.min_relative_step) {
      out.converged = true;
      return out;
    }
  }
  return out;
}

std::optional<MbvdParams> aligned_seed(const AdmittanceTrace& y, const MbvdParams& init) {
  ResonancePair res;
  try {
    res = find_fs_fp(y);
  } catch (const Error&) {
    return std::nullopt;
  }
  const double q = motional_q(init);
  MbvdParams p = init;
  p.c_m = init.c_0 * (res.f_p * res.f_p / (res.f_s * res.f_s) - 1.0);
  const double w = kTwoPi * res.f_s;
  p.l_m = 1.0 / (w * w * p.c_m);
  p.r_m = std::isfinite(q) ? w * p.l_m / q : init.r_m;
  try {
    validate(p);
  } catch (const Error&) {
    return std::nullopt;
  }
  return p;
}

}  // namespace

MbvdParams initial_guess(const AdmittanceTrace& y) {
  const ResonancePair res = find_fs_fp(y);
  const auto f = y.frequencies();

  // Lossless model: Im(Y)/w = C_0 (1 + r / (1 - x^2)), x = f/f_s, r = C_m/C_0.
  const double ratio = (res.f_p * res.f_p - res.f_s * res.f_s) / (res.f_s * res.f_s);
  auto capacitance_samples = [&](auto&& in_region) {
    std::vector<double> c;
    for (std::size_t i = 0; i < y.size(); ++i) {
      if (!in_region(f[i])) continue;
      const double x = f[i] / res.f_s;
      c.push_back(y.y()[i].imag() / (kTwoPi * f[i]) / (1.0 + ratio / (1.0 - x * x)));
    }
    return c;
  };
  std::vector<double> c = capacitance_samples([&](double x) { return x < 0.95 * res.f_s; });
  if (c.empty()) c = capacitance_samples([&](double x) { return x > 1.05 * res.f_p; });
  if (c.empty()) {
    throw Error(ErrorKind::TooFewPoints,
                "no samples below 0.95 f_s or above 1.05 f_p to estimate C_0");
  }
  const auto mid = c.begin() + static_cast<std::ptrdiff_t>(c.size() / 2);
  std::nth_element(c.begin(), mid, c.end());
  double c0 = *mid;
  if (c.size() % 2 == 0) {
    c0 = 0.5 * (c0 + *std::max_element(c.begin(), mid));
  }
  if (!(c0 > 0.0)) {
    throw Error(ErrorKind::NegativeStaticCapacitance,
                fmt::format("static capacitance estimate {} F is not positive", c0));
  }

  double peak = 0.0;
  for (const auto& v : y.y()) peak = std::max(peak, std::abs(v));

  MbvdParams p;
  p.c_0 = c0;
  p.c_m = c0 * ratio;
  const double w = kTwoPi * res.f_s;
  p.l_m = 1.0 / (w * w * p.c_m);
  p.r_m = std::max(1.0 / peak, 0.01);
  p.r_s = 0.5;
  p.r_0 = 0.1;
  validate(p);
  return p;
}

FitResult fit_mbvd(const AdmittanceTrace& y, const MbvdParams& init, const FitConfig& config) {
  validate(init);
  const Problem problem(y, config);

  LogParams lp = to_log(init, config.resistance_floor);
  double start_cost = problem.cost(lp);
  if (!std::isfinite(start_cost)) {
    throw Error(ErrorKind::NonFiniteResidual, "initial mBVD parameters give a non-finite residual");
  }

  FitResult result;
  if (config.align_resonance) {
    if (const auto seed = aligned_seed(y, init)) {
      const LogParams alt = to_log(*seed, config.resistance_floor);
      const double alt_cost = problem.cost(alt);
      if (alt_cost < start_cost) {
        lp = alt;
        start_cost = alt_cost;
        result.aligned_seed = true;
      }
    }
  }
  result.cost_history.push_back(start_cost);

  static constexpr std::array<int, 4> kReactive = {2, 3, 4, 5};
  static constexpr std::array<int, 6> kAll = {0, 1, 2, 3, 4, 5};

  int used = 0;
  if (config.staged) {
    const StageOutcome s1 = run_stage(problem, config, kReactive, config.max_iterations, lp,
                                      result.cost_history);
    used += s1.iterations;
  }
  const StageOutcome s2 = run_stage(problem, config, kAll, config.max_iterations - used, lp,
                                    result.cost_history);
  used += s2.iterations;
  result.iterations = used;
  result.converged = s2.converged;

  if (!std::isfinite(result.cost_history.back())) {
    throw Error(ErrorKind::NonFiniteResidual, "mBVD fit produced a non-finite residual");
  }

  result.params = from_log(lp);
  double ss = 0.0;
  double ref = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    ss += std::norm(admittance(result.params, y.frequencies()[i]) - y.y()[i]);
    ref += std::norm(y.y()[i]);
  }
  result.rms_residual = std::sqrt(ss / static_cast<double>(y.size()));
  result.relative_residual = ref > 0.0 ? std::sqrt(ss / ref) : 0.0;
  return result;
}

std::vector<double> weighted_residuals(const AdmittanceTrace& y, const MbvdParams& p) {
  const FitConfig config;
  const Problem problem(y, config);
  Eigen::VectorXd r;
  problem.residuals(to_log(p, config.resistance_floor), r);
  return {r.data(), r.data() + r.size()};
}

std::vector<double> numeric_jacobian(const AdmittanceTrace& y, const MbvdParams& p, double step) {
  const FitConfig config;
  const Problem problem(y, config);
  const LogParams lp = to_log(p, config.resistance_floor);
  Eigen::VectorXd r;
  problem.residuals(lp, r);
  Eigen::MatrixXd jac;
  problem.jacobian(lp, r, step, jac);
  std::vector<double> out(static_cast<std::size_t>(jac.size()));
  for (Eigen::Index i = 0; i < jac.rows(); ++i) {
    for (Eigen::Index k = 0; k < jac.cols(); ++k) {
      out[static_cast<std::size_t>(i * kNumParams + k)] = jac(i, k);
    }
  }
  return out;
}

}  // namespace resokit

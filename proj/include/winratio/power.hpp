#pragma once

// Closed-form operating characteristics for the binary prioritized composite
// (death first, hospitalization second) and the matched / unmatched sample
// size formulas.
//
// Normal quantile conventions, used everywhere below:
//   Z_alpha = Phi^{-1}(1 - alpha/2)   (two-sided alpha)
//   Z_beta  = Phi^{-1}(1 - power)     (negative for power > 0.5)

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "winratio/errors.hpp"
#include "winratio/stats.hpp"

namespace winratio {

inline double z_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
  return normal_quantile(1.0 - alpha / 2.0);
}

inline double z_beta(double power) {
  if (!(power > 0.0 && power < 1.0)) throw ConfigError("power must lie in (0, 1)");
  return normal_quantile(1.0 - power);
}

inline void check_probability(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0)) throw ConfigError(std::string(name) + " must lie in [0, 1]");
}

// ---------------------------------------------------------------- matched ---

struct WinProbs {
  double p_w = 0.0;
  double p_l = 0.0;
  double p_tie = 0.0;
};

inline WinProbs matched_win_probs(double p_t, double q_t, double p_c, double q_c) {
  check_probability(p_t, "p_t");
  check_probability(q_t, "q_t");
  check_probability(p_c, "p_c");
  check_probability(q_c, "q_c");
  WinProbs w;
  w.p_w = p_t * (1 - q_t) * p_c * q_c + (1 - p_t) * q_t * p_c + (1 - p_t) * (1 - q_t) * (1 - (1 - p_c) * (1 - q_c));
  w.p_l = p_t * (1 - q_t) * (1 - p_c) + p_t * q_t * (1 - p_c * q_c) + (1 - p_t) * q_t * (1 - p_c) * (1 - q_c);
  w.p_tie = 1.0 - w.p_w - w.p_l;
  return w;
}

struct MatchedSampleSize {
  long n = 0;  // non-tie pairs
  long N = 0;  // total pairs
  double p_a = kNaN;
  double p_tie = kNaN;
  double n_exact = kNaN;
};

// n = ((Z_a - R Z_b) / ((2 p_a - 1)/(1 - p_a)))^2 with R = p_a/(1 - p_a),
// N = ceil(n / (1 - p_tie)).
inline MatchedSampleSize matched_sample_size(double p_a, double p_tie, double alpha, double power) {
  if (p_a == 0.5) throw ConfigError("no effect: sample size infinite (p_a = 0.5)");
  if (!(p_a > 0.5 && p_a < 1.0)) throw ConfigError("p_a must lie in (0.5, 1)");
  if (!(p_tie >= 0.0 && p_tie < 1.0)) throw ConfigError("p_tie must lie in [0, 1)");
  const double za = z_alpha(alpha), zb = z_beta(power);
  const double ratio = p_a / (1.0 - p_a);
  const double effect = (2.0 * p_a - 1.0) / (1.0 - p_a);
  MatchedSampleSize s;
  s.p_a = p_a;
  s.p_tie = p_tie;
  s.n_exact = std::pow((za - ratio * zb) / effect, 2);
  s.n = static_cast<long>(std::ceil(s.n_exact - 1e-9));
  s.N = static_cast<long>(std::ceil(static_cast<double>(s.n) / (1.0 - p_tie) - 1e-9));
  return s;
}

// Same target, but with the delta-method variance p/(1-p)^3 of the odds
// X/(1-X) in place of p^2/(1-p)^2. Reported alongside for comparison.
inline MatchedSampleSize matched_sample_size_delta(double p_a, double p_tie, double alpha, double power) {
  auto s = matched_sample_size(p_a, p_tie, alpha, power);
  const double za = z_alpha(alpha), zb = z_beta(power);
  const double sd0 = 2.0;  // sqrt(0.5 / 0.5^3)
  const double sd1 = std::sqrt(p_a / std::pow(1.0 - p_a, 3));
  const double effect = (2.0 * p_a - 1.0) / (1.0 - p_a);
  s.n_exact = std::pow((za * sd0 - zb * sd1) / effect, 2);
  s.n = static_cast<long>(std::ceil(s.n_exact - 1e-9));
  s.N = static_cast<long>(std::ceil(static_cast<double>(s.n) / (1.0 - p_tie) - 1e-9));
  return s;
}

// -------------------------------------------------------------- unmatched ---

// theta = (p_t, q_t, p_t q_t, p_c, q_c, p_c q_c).
struct ThetaBinary {
  std::array<double, 6> theta{0.5, 0.5, 0.25, 0.5, 0.5, 0.25};

  static ThetaBinary from_rates(double p_t, double q_t, double p_c, double q_c) {
    check_probability(p_t, "p_t");
    check_probability(q_t, "q_t");
    check_probability(p_c, "p_c");
    check_probability(q_c, "q_c");
    return {{p_t, q_t, p_t * q_t, p_c, q_c, p_c * q_c}};
  }

  static ThetaBinary null() { return {}; }

  ThetaBinary mirrored() const { return {{theta[3], theta[4], theta[5], theta[0], theta[1], theta[2]}}; }

  double operator[](std::size_t i) const { return theta[i]; }

  void validate() const {
    for (double v : theta)
      if (!(v >= 0.0 && v <= 1.0)) throw ConfigError("theta components must lie in [0, 1]");
    if (std::fabs(theta[2] - theta[0] * theta[1]) > 1e-12 || std::fabs(theta[5] - theta[3] * theta[4]) > 1e-12)
      throw ConfigError("theta components 3 and 6 must equal the products of (1,2) and (4,5)");
  }
};

using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;

// Expected per-pair win and loss probabilities, written in the joint moments
// so that plugging in arm-wise sample means gives the observed N_w / N_L.
inline double unmatched_w(const ThetaBinary& th) {
  const auto& t = th.theta;
  return (1 - t[0]) * t[3] + (t[0] - t[2]) * t[5] + (1 - t[0] - t[1] + t[2]) * (t[4] - t[5]);
}

inline double unmatched_l(const ThetaBinary& th) {
  const auto& t = th.theta;
  return t[0] * (1 - t[3]) + t[2] * (t[3] - t[5]) + (t[1] - t[2]) * (1 - t[3] - t[4] + t[5]);
}

inline double unmatched_g(const ThetaBinary& th) {
  const double l = unmatched_l(th);
  if (l == 0.0) throw DegenerateError("infinite ratio: loss probability is zero");
  return unmatched_w(th) / l;
}

inline Vec6 unmatched_w_gradient(const ThetaBinary& th) {
  const auto& t = th.theta;
  const double a = t[4] - t[5];               // control: alive, hospitalized
  const double b = 1 - t[0] - t[1] + t[2];    // treatment: alive, not hospitalized
  Vec6 d;
  d << -t[3] + t[5] - a, -a, -t[5] + a, 1 - t[0], b, (t[0] - t[2]) - b;
  return d;
}

inline Vec6 unmatched_l_gradient(const ThetaBinary& th) {
  const auto& t = th.theta;
  const double a = 1 - t[3] - t[4] + t[5];  // control: alive, not hospitalized
  const double b = t[1] - t[2];             // treatment: alive, hospitalized
  Vec6 d;
  d << 1 - t[3], a, (t[3] - t[5]) - a, -t[0] + t[2] - b, -b, -t[2] + b;
  return d;
}

inline Vec6 unmatched_g_gradient(const ThetaBinary& th) {
  const double w = unmatched_w(th), l = unmatched_l(th);
  if (l == 0.0) throw DegenerateError("infinite ratio: loss probability is zero");
  return (unmatched_w_gradient(th) * l - unmatched_l_gradient(th) * w) / (l * l);
}

// Per-patient covariance of (Y, X, XY) for independent Y ~ B(p), X ~ B(q).
inline Eigen::Matrix3d arm_moment_covariance(double p, double q) {
  Eigen::Matrix3d c;
  const double pq = p * q;
  c << p * (1 - p), 0.0, pq * (1 - p),
       0.0, q * (1 - q), pq * (1 - q),
       pq * (1 - p), pq * (1 - q), pq * (1 - pq);
  return c;
}

// Covariance of sqrt(n_t) * (arm-wise sample means), n_t = n1 + n0.
inline Mat6 unmatched_covariance(const ThetaBinary& th, double allocation) {
  if (!(allocation > 0.0 && allocation < 1.0)) throw ConfigError("allocation must lie in (0, 1)");
  Mat6 c = Mat6::Zero();
  c.topLeftCorner<3, 3>() = arm_moment_covariance(th[0], th[1]) / allocation;
  c.bottomRightCorner<3, 3>() = arm_moment_covariance(th[3], th[4]) / (1.0 - allocation);
  return c;
}

// Asymptotic variance C^2 of sqrt(n_t) (g(X) - g(theta)).
inline double unmatched_variance(const ThetaBinary& th, double allocation = 0.5) {
  const Vec6 grad = unmatched_g_gradient(th);
  return grad.dot(unmatched_covariance(th, allocation) * grad);
}

inline double unmatched_variance(const ThetaBinary& th, long n1, long n0) {
  if (n1 <= 0 || n0 <= 0) throw ConfigError("arm sizes must be positive");
  return unmatched_variance(th, static_cast<double>(n1) / static_cast<double>(n1 + n0));
}

struct UnmatchedSampleSize {
  long n_t = 0;
  long n1 = 0;
  long n0 = 0;
  double g1 = kNaN;
  double c0 = kNaN;
  double c1 = kNaN;
  double n_exact = kNaN;
};

// n_t = ((C0 Z_a - C1 Z_b) / (g(theta1) - 1))^2, C0 at the null theta0,
// rounded up and, for 1:1 allocation, up to an even total.
inline UnmatchedSampleSize unmatched_sample_size(const ThetaBinary& theta1, double alpha, double power,
                                                 double allocation = 0.5) {
  theta1.validate();
  const double za = z_alpha(alpha), zb = z_beta(power);
  UnmatchedSampleSize s;
  s.g1 = unmatched_g(theta1);
  if (s.g1 == 1.0) throw ConfigError("no effect: g(theta1) = 1, sample size infinite");
  s.c0 = std::sqrt(unmatched_variance(ThetaBinary::null(), allocation));
  s.c1 = std::sqrt(unmatched_variance(theta1, allocation));
  s.n_exact = std::pow((s.c0 * za - s.c1 * zb) / (s.g1 - 1.0), 2);
  s.n_t = static_cast<long>(std::ceil(s.n_exact - 1e-9));
  if (allocation == 0.5 && s.n_t % 2 != 0) ++s.n_t;
  s.n_t = std::max(s.n_t, 2L);
  s.n1 = std::clamp(static_cast<long>(std::lround(static_cast<double>(s.n_t) * allocation)), 1L, s.n_t - 1);
  s.n0 = s.n_t - s.n1;
  return s;
}

}  // namespace winratio

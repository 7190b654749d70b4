/**
 * @file stats.hpp
 * @brief Sample statistics used for campaign aggregation and trend checks.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

namespace nrmimo::stats {

inline double mean(const std::vector<double>& x) {
  if (x.empty()) return 0.0;
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

/// Sample variance (n - 1).
inline double variance(const std::vector<double>& x) {
  if (x.size() < 2) return 0.0;
  const double m = mean(x);
  double s = 0;
  for (double v : x) s += (v - m) * (v - m);
  return s / static_cast<double>(x.size() - 1);
}

/// Half-width of the two-sided 95% Student-t interval of the mean.
inline double ci95(const std::vector<double>& x) {
  if (x.size() < 2) return 0.0;
  const boost::math::students_t t(static_cast<double>(x.size() - 1));
  return boost::math::quantile(t, 0.975) * std::sqrt(variance(x) / static_cast<double>(x.size()));
}

/// One-sided Welch test of H1: mean(a) < mean(b). Returns the p-value.
inline double welchLessPValue(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() < 2 || b.size() < 2) throw std::invalid_argument("welch: need >= 2 samples per group");
  const double va = variance(a) / a.size(), vb = variance(b) / b.size();
  const double diff = mean(a) - mean(b);
  const double se2 = va + vb;
  if (se2 <= 0.0) return diff < 0.0 ? 0.0 : 1.0;
  const double df = se2 * se2 /
                    (va * va / static_cast<double>(a.size() - 1) + vb * vb / static_cast<double>(b.size() - 1));
  const boost::math::students_t t(df);
  return boost::math::cdf(t, diff / std::sqrt(se2));
}

/// Average ranks, ties share the mean rank (1-based).
inline std::vector<double> ranks(const std::vector<double>& x) {
  std::vector<std::size_t> idx(x.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> r(x.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && x[idx[j + 1]] == x[idx[i]]) ++j;
    const double avg = (static_cast<double>(i + j) / 2.0) + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
    i = j + 1;
  }
  return r;
}

inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double mx = mean(x), my = mean(y);
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx <= 0 || syy <= 0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

struct Correlation {
  double rho = 0;
  double pValue = 1;  ///< two-sided
};

/// Spearman rank correlation, p-value from the t approximation with n - 2 dof.
inline Correlation spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 3) throw std::invalid_argument("spearman: need >= 3 paired samples");
  Correlation c;
  c.rho = pearson(ranks(x), ranks(y));
  const double n = static_cast<double>(x.size());
  if (std::abs(c.rho) >= 1.0) {
    c.pValue = 0.0;
    return c;
  }
  const double t = c.rho * std::sqrt((n - 2.0) / (1.0 - c.rho * c.rho));
  const boost::math::students_t dist(n - 2.0);
  c.pValue = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
  return c;
}

}  // namespace nrmimo::stats

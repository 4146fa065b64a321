#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace amicus {

// Logits are clamped to +-700 so exp never overflows.
inline double clamp_logit(double x) {
  if (x > 700.0) return 700.0;
  if (x < -700.0) return -700.0;
  return x;
}

// Numerically stable logistic function.
inline double sigmoid(double x) {
  x = clamp_logit(x);
  if (x >= 0.0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// log sigma(x) without underflow: -log1p(exp(-x)) for x >= 0.
inline double log_sigmoid(double x) {
  x = clamp_logit(x);
  if (x >= 0.0) return -std::log1p(std::exp(-x));
  return x - std::log1p(std::exp(x));
}

// sigma'(x) = sigma(x) (1 - sigma(x)).
inline double sigmoid_grad(double x) {
  const double s = sigmoid(x);
  return s * (1.0 - s);
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double l2_dist_sq(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

inline double sum(std::span<const double> a) {
  double s = 0.0;
  for (double x : a) s += x;
  return s;
}

inline double mean(std::span<const double> a) {
  return a.empty() ? 0.0 : sum(a) / static_cast<double>(a.size());
}

// Sample standard deviation (n - 1 denominator).
inline double stdev(std::span<const double> a) {
  if (a.size() < 2) return 0.0;
  const double m = mean(a);
  double s = 0.0;
  for (double x : a) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(a.size() - 1));
}

inline double total_variation(std::span<const double> p, std::span<const double> q) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::fabs(p[i] - q[i]);
  return 0.5 * s;
}

inline double pearson(std::span<const double> x, std::span<const double> y) {
  const double mx = mean(x), my = mean(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx <= 0.0 || syy <= 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

inline void normalize_in_place(std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  if (s > 0.0) {
    for (double& x : v) x /= s;
  }
}

// Entries nonnegative and summing to 1 within tol.
inline bool is_simplex(std::span<const double> v, double tol = 1e-9) {
  double s = 0.0;
  for (double x : v) {
    if (!(x >= 0.0)) return false;
    s += x;
  }
  return std::fabs(s - 1.0) <= tol;
}

}  // namespace amicus

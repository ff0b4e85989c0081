#pragma once

#include <cmath>
#include <utility>
#include <vector>

namespace eitlab::stats {

struct Wilson {
  double center = 0, half = 0;
};

inline Wilson wilson95(double phat, double n) {
  const double z = 1.959963984540054;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  Wilson w;
  w.center = (phat + z2 / (2.0 * n)) / denom;
  w.half = z * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n)) / denom;
  return w;
}

struct LineFit {
  double slope = 0, intercept = 0, slope_se = 0;
  int points = 0;
};

inline LineFit least_squares(const std::vector<std::pair<double, double>>& xy) {
  LineFit f;
  f.points = static_cast<int>(xy.size());
  if (f.points < 2) return f;
  double sx = 0, sy = 0;
  for (auto [x, y] : xy) sx += x, sy += y;
  const double mx = sx / f.points, my = sy / f.points;
  double sxx = 0, sxy = 0;
  for (auto [x, y] : xy) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
  }
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  if (f.points > 2) {
    double rss = 0;
    for (auto [x, y] : xy) {
      const double r = y - (f.intercept + f.slope * x);
      rss += r * r;
    }
    f.slope_se = std::sqrt(rss / (f.points - 2) / sxx);
  }
  return f;
}

// mean and its standard error
struct MeanSe {
  double mean = 0, se = 0;
};

inline MeanSe mean_se(const std::vector<double>& xs) {
  MeanSe m;
  if (xs.empty()) return m;
  double s = 0;
  for (const double x : xs) s += x;
  m.mean = s / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double v = 0;
    for (const double x : xs) v += (x - m.mean) * (x - m.mean);
    m.se = std::sqrt(v / static_cast<double>(xs.size() - 1) /
                     static_cast<double>(xs.size()));
  }
  return m;
}

}  // namespace eitlab::stats

#include "cvscramble/stats.hpp"

#include <cmath>
#include <stdexcept>

namespace cvscramble {

void KahanSum::add(double x) {
  double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x))
    c_ += (sum_ - t) + x;
  else
    c_ += (x - t) + sum_;
  sum_ = t;
}

MeanStd mean_std(const std::vector<double>& xs) {
  MeanStd out;
  out.n = xs.size();
  if (xs.empty()) return out;
  KahanSum s;
  for (double x : xs) s.add(x);
  out.mean = s.value() / xs.size();
  if (xs.size() > 1) {
    KahanSum v;
    for (double x : xs) v.add((x - out.mean) * (x - out.mean));
    out.stddev = std::sqrt(v.value() / (xs.size() - 1));
    out.stderr_ = out.stddev / std::sqrt(static_cast<double>(xs.size()));
  }
  return out;
}

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("linear_fit: need >= 2 matching points");
  const double n = x.size();
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("linear_fit: degenerate abscissa");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r = (syy > 0) ? sxy / std::sqrt(sxx * syy) : 1.0;
  double rr = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double e = y[i] - (f.intercept + f.slope * x[i]);
    rr += e * e;
  }
  f.rms_residual = std::sqrt(rr / n);
  return f;
}

double slope_through_origin(const std::vector<double>& x, const std::vector<double>& y) {
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += x[i] * y[i];
    sxx += x[i] * x[i];
  }
  if (sxx == 0.0) throw std::invalid_argument("slope_through_origin: degenerate abscissa");
  return sxy / sxx;
}

QuadFit quad_fit_no_intercept(const std::vector<double>& t, const std::vector<double>& y) {
  // normal equations for basis {t, t^2}
  double s2 = 0, s3 = 0, s4 = 0, y1 = 0, y2 = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    double a = t[i], a2 = a * a;
    s2 += a2;
    s3 += a2 * a;
    s4 += a2 * a2;
    y1 += a * y[i];
    y2 += a2 * y[i];
  }
  double det = s2 * s4 - s3 * s3;
  if (det == 0.0) throw std::invalid_argument("quad_fit: degenerate abscissa");
  return {(y1 * s4 - y2 * s3) / det, (s2 * y2 - s3 * y1) / det};
}

}  // namespace cvscramble

#pragma once

#include <cstddef>
#include <vector>

namespace cvscramble {

// Neumaier compensated sum.
class KahanSum {
 public:
  void add(double x);
  double value() const { return sum_ + c_; }

 private:
  double sum_ = 0.0;
  double c_ = 0.0;
};

struct MeanStd {
  double mean = 0.0;
  double stddev = 0.0;  // sample std-dev (n-1)
  double stderr_ = 0.0;
  std::size_t n = 0;
};

MeanStd mean_std(const std::vector<double>& xs);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r = 0.0;  // Pearson correlation
  double rms_residual = 0.0;
};

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);
// y = slope * x, no intercept
double slope_through_origin(const std::vector<double>& x, const std::vector<double>& y);

// y = a t + b t^2 (no constant term); returns {a, b}
struct QuadFit {
  double a = 0.0;
  double b = 0.0;
};
QuadFit quad_fit_no_intercept(const std::vector<double>& t, const std::vector<double>& y);

}  // namespace cvscramble

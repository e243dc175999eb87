#pragma once

#include <vector>

#include "relproj/types.hpp"

namespace relproj {

struct TTestResult {
  double t = 0.0;
  double p = 1.0;
};

// Regularized incomplete beta function I_x(a, b), evaluated with the
// continued-fraction expansion. Needed for the Student t tail; accurate to
// ~1e-14 for the parameter ranges used here.
double incomplete_beta(double a, double b, double x);

// Two-tailed p-value of a t statistic with df degrees of freedom:
// I_{df/(df+t^2)}(df/2, 1/2).
double student_t_two_tailed(double t, double df);

// Paired two-tailed t-test on per-year values. Degenerate inputs follow the
// usual conventions: all differences zero -> (t=0, p=1); zero variance with
// a nonzero mean -> (t=+-inf, p=0).
TTestResult paired_t_test(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace relproj

// tests/oracles.hpp - Independent reference computations used by the test suites

#pragma once

#include <cmath>
#include <complex>
#include <vector>

namespace oracle {

// Lower incomplete gamma integral_0^U e^{-u} u^k du by the series
// e^{-U} U^{k+1} sum_m U^m / ((k+1)(k+2)...(k+1+m)), in long double.
inline long double truncated_moment(int k, long double upper) {
    long double term = 1.0L / (k + 1), sum = 0.0L;
    for (int m = 0; m < 4000 && term > 1e-30L * sum; ++m) {
        sum += term;
        term *= upper / (k + 2 + m);
    }
    return std::exp(-upper + (k + 1) * std::log(upper)) * sum;
}

// Regularized upper tail Gamma(k+1, U)/k! = e^{-U} sum_{m<=k} U^m/m!.
inline long double poisson_cdf(int k, long double mean) {
    long double term = std::exp(-mean), sum = 0.0L;
    for (int m = 0; m <= k; ++m) {
        sum += term;
        term *= mean / (m + 1);
    }
    return sum;
}

inline long double factorial(int k) {
    long double f = 1.0L;
    for (int i = 2; i <= k; ++i) f *= i;
    return f;
}

} // namespace oracle

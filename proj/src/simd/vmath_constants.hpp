#pragma once

// Shared constants for the vectorized exp/log used by the ISA kernels.
// log(m), m in [sqrt(1/2), sqrt(2)): f = (m-1)/(m+1), log m = 2 f sum_k f^(2k) / (2k+1).
// exp(r), |r| <= ln(2)/2: Taylor series to r^13.

namespace nlos::simd::vmath {

inline constexpr double kLn2Hi = 6.93147180369123816490e-01;
inline constexpr double kLn2Lo = 1.90821492927058770002e-10;
inline constexpr double kLog2e = 1.44269504088896338700e+00;
inline constexpr double kSqrt2 = 1.41421356237309514547e+00;
inline constexpr double kExpMin = -708.0;

// 1/(2k+1), k = 10 .. 0
inline constexpr double kLogSeries[11] = {1.0 / 21, 1.0 / 19, 1.0 / 17, 1.0 / 15, 1.0 / 13, 1.0 / 11,
                                          1.0 / 9,  1.0 / 7,  1.0 / 5,  1.0 / 3,  1.0};

// 1/k!, k = 13 .. 0
inline constexpr double kExpSeries[14] = {
    1.0 / 6227020800.0, 1.0 / 479001600.0, 1.0 / 39916800.0, 1.0 / 3628800.0, 1.0 / 362880.0,
    1.0 / 40320.0,      1.0 / 5040.0,      1.0 / 720.0,      1.0 / 120.0,     1.0 / 24.0,
    1.0 / 6.0,          0.5,               1.0,              1.0};

}  // namespace nlos::simd::vmath

#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

#include <boost/multiprecision/cpp_bin_float.hpp>

namespace derham {

// Double-precision mantissa with a 64-bit binary exponent. Superattracting
// branches (Df(0) = 0) drive curve points towards 2^-65535 and beyond at
// moderate depth; this keeps them representable so logs stay finite.
using wide_real = boost::multiprecision::number<
    boost::multiprecision::cpp_bin_float<53, boost::multiprecision::backends::digit_base_2, void,
                                         std::int64_t, -(std::int64_t{1} << 52),
                                         (std::int64_t{1} << 52)>,
    boost::multiprecision::et_off>;

/// log_base |x|; -inf for x == 0.
inline double log_abs(double x, double base) {
    if (x == 0.0) return -std::numeric_limits<double>::infinity();
    return std::log(std::abs(x)) / std::log(base);
}

inline double log_abs(const wide_real& x, double base) {
    if (x == 0) return -std::numeric_limits<double>::infinity();
    return static_cast<double>(boost::multiprecision::log(boost::multiprecision::abs(x))) / std::log(base);
}

inline double to_double(double x) { return x; }
inline double to_double(const wide_real& x) { return static_cast<double>(x); }

}  // namespace derham

#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <cstdint>
#include <limits>

#include "errors.hpp"

namespace mdimlab {

// Exact rational scalar used wherever piecewise-affine structure must be
// computed without rounding (breakpoint pullback, lap counts, interval
// images, sup-distances between piecewise-affine maps).
using rational = boost::multiprecision::cpp_rational;

// Every finite double is a dyadic rational; decompose it exactly.
inline rational rational_from_double(double x) {
    if (!std::isfinite(x)) fail(errc::invalid_argument, "rational_from_double: non-finite input");
    if (x == 0.0) return rational(0);
    int exp = 0;
    double m = std::frexp(x, &exp); // x = m * 2^exp, |m| in [0.5, 1)
    // 53 doublings make the mantissa integral.
    auto mant = static_cast<std::int64_t>(std::ldexp(m, 53));
    rational r(mant);
    int shift = exp - 53;
    if (shift > 0)
        r *= boost::multiprecision::pow(boost::multiprecision::cpp_int(2), shift);
    else if (shift < 0)
        r /= boost::multiprecision::pow(boost::multiprecision::cpp_int(2), -shift);
    return r;
}

inline double to_double(const rational& r) { return r.convert_to<double>(); }

inline rational rat(long long num, long long den = 1) {
    if (den == 0) fail(errc::invalid_argument, "rat: zero denominator");
    return rational(num) / den;
}

} // namespace mdimlab

#pragma once

#include <cmath>
#include <utility>

namespace ruinkit {

namespace detail {

template <typename F>
double simpson_step(const F& f, double lo, double mid, double hi, double f_lo,
                    double f_mid, double f_hi, double whole, double tol, int depth) {
    const double lmid = 0.5 * (lo + mid);
    const double rmid = 0.5 * (mid + hi);
    const double f_lmid = f(lmid);
    const double f_rmid = f(rmid);
    const double left = (mid - lo) / 6.0 * (f_lo + 4.0 * f_lmid + f_mid);
    const double right = (hi - mid) / 6.0 * (f_mid + 4.0 * f_rmid + f_hi);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
        return left + right + delta / 15.0;
    }
    return simpson_step(f, lo, lmid, mid, f_lo, f_lmid, f_mid, left, 0.5 * tol, depth - 1) +
           simpson_step(f, mid, rmid, hi, f_mid, f_rmid, f_hi, right, 0.5 * tol, depth - 1);
}

} // namespace detail

// Adaptive Simpson on [lo, hi] with absolute tolerance.
template <typename F>
double adaptive_simpson(const F& f, double lo, double hi, double abs_tol, int max_depth = 48) {
    if (!(hi > lo)) return 0.0;
    const double mid = 0.5 * (lo + hi);
    const double f_lo = f(lo);
    const double f_mid = f(mid);
    const double f_hi = f(hi);
    const double whole = (hi - lo) / 6.0 * (f_lo + 4.0 * f_mid + f_hi);
    return detail::simpson_step(f, lo, mid, hi, f_lo, f_mid, f_hi, whole, abs_tol, max_depth);
}

} // namespace ruinkit

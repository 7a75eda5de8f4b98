#pragma once

// Independent reference implementations used by tests only. These are kept
// deliberately naive (O(N^2) transforms, direct time-domain correlation) so
// they share nothing with the production signal path.

#include <cmath>
#include <complex>
#include <random>
#include <span>
#include <vector>

#include "types.hpp"

namespace ofdr::oracle {

// Direct O(N^2) DFT, forward e^{-j2pi kn/N}.
inline std::vector<cplx> naive_dft(std::span<const cplx> x, bool inverse = false) {
    const size_t n = x.size();
    std::vector<cplx> out(n, cplx{});
    const double sign = inverse ? 1.0 : -1.0;
    for (size_t k = 0; k < n; ++k) {
        cplx acc{};
        for (size_t t = 0; t < n; ++t) {
            const double ang = sign * kTwoPi * static_cast<double>(k * t % n) /
                               static_cast<double>(n);
            acc += x[t] * cplx{std::cos(ang), std::sin(ang)};
        }
        out[k] = inverse ? acc / static_cast<double>(n) : acc;
    }
    return out;
}

// Analytic signal via the naive DFT: zero negative bins, double positives.
inline std::vector<cplx> naive_analytic(std::span<const double> x) {
    std::vector<cplx> c(x.size());
    for (size_t i = 0; i < x.size(); ++i) c[i] = cplx{x[i], 0.0};
    auto spec = naive_dft(c);
    const size_t n = x.size();
    for (size_t k = 0; k < n; ++k) {
        if (k == 0 || (n % 2 == 0 && k == n / 2)) continue;
        if (k < (n + 1) / 2)
            spec[k] *= 2.0;
        else
            spec[k] = cplx{};
    }
    return naive_dft(spec, true);
}

// Direct circular cross-correlation: out[u] = sum_t a[t] * conj(b[(t-u) mod n]).
inline std::vector<cplx> naive_circular_correlation(std::span<const cplx> a,
                                                    std::span<const cplx> b) {
    const size_t n = a.size();
    std::vector<cplx> out(n, cplx{});
    for (size_t u = 0; u < n; ++u) {
        cplx acc{};
        for (size_t t = 0; t < n; ++t) acc += a[t] * std::conj(b[(t + n - u) % n]);
        out[u] = acc;
    }
    return out;
}

// Quadrature amplitude of a tone at f_hz in a uniformly sampled series
// (mean removed first). Exact for integer numbers of cycles.
inline double tone_amplitude(std::span<const double> x, double fs, double f_hz) {
    const size_t n = x.size();
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(n);
    cplx acc{};
    for (size_t i = 0; i < n; ++i) {
        const double ang = kTwoPi * f_hz * static_cast<double>(i) / fs;
        acc += (x[i] - mean) * cplx{std::cos(ang), -std::sin(ang)};
    }
    return 2.0 * std::abs(acc) / static_cast<double>(n);
}

inline double variance(std::span<const double> x) {
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(x.size());
    double var = 0.0;
    for (double v : x) var += (v - mean) * (v - mean);
    return var / static_cast<double>(x.size());
}

}  // namespace ofdr::oracle

#include "fft.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <tuple>

#ifdef OFDR_WITH_FFTW
#include <fftw3.h>
#endif

namespace ofdr {

#ifdef OFDR_WITH_FFTW

namespace {

// FFTW plan creation is not thread-safe; execution via the new-array interface
// is. Plans are keyed by size, direction and placement (in-place plans differ
// from out-of-place ones). FFTW_ESTIMATE keeps planning deterministic run to run.
class PlanCache {
public:
    fftw_plan get(size_t n, int sign, bool in_place) {
        std::lock_guard<std::mutex> lock(mu_);
        const Key key{n, sign, in_place};
        auto it = plans_.find(key);
        if (it != plans_.end()) return it->second;
        std::vector<cplx> a(n), b(n);
        fftw_complex* pin = reinterpret_cast<fftw_complex*>(a.data());
        fftw_complex* pout = in_place ? pin : reinterpret_cast<fftw_complex*>(b.data());
        fftw_plan p = fftw_plan_dft_1d(static_cast<int>(n), pin, pout, sign,
                                       FFTW_ESTIMATE | FFTW_UNALIGNED);
        plans_[key] = p;
        return p;
    }

private:
    using Key = std::tuple<size_t, int, bool>;
    std::mutex mu_;
    std::map<Key, fftw_plan> plans_;
};

PlanCache& cache() {
    static PlanCache c;
    return c;
}

void execute(const cplx* in, cplx* out, size_t n, int sign) {
    fftw_plan p = cache().get(n, sign, in == out);
    fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in)),
                     reinterpret_cast<fftw_complex*>(out));
}

}  // namespace

void fft_forward(const cplx* in, cplx* out, size_t n) { execute(in, out, n, FFTW_FORWARD); }

void fft_inverse(const cplx* in, cplx* out, size_t n) {
    execute(in, out, n, FFTW_BACKWARD);
    const double inv = 1.0 / static_cast<double>(n);
    for (size_t i = 0; i < n; ++i) out[i] *= inv;
}

const char* fft_backend() { return "fftw3"; }

#else  // built-in fallback: iterative radix-2 plus Bluestein for general sizes

namespace {

bool is_pow2(size_t n) { return n != 0 && (n & (n - 1)) == 0; }

void fft_pow2(cplx* a, size_t n, bool inverse) {
    // Bit-reversal permutation.
    for (size_t i = 1, j = 0; i < n; ++i) {
        size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (size_t len = 2; len <= n; len <<= 1) {
        const double ang = (inverse ? kTwoPi : -kTwoPi) / static_cast<double>(len);
        const cplx wlen(std::cos(ang), std::sin(ang));
        for (size_t i = 0; i < n; i += len) {
            cplx w(1.0, 0.0);
            for (size_t k = 0; k < len / 2; ++k) {
                const cplx u = a[i + k];
                const cplx v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
}

// Bluestein chirp-z transform: DFT of arbitrary length via a pow2 convolution.
void fft_bluestein(cplx* a, size_t n, bool inverse) {
    size_t m = 1;
    while (m < 2 * n - 1) m <<= 1;
    std::vector<cplx> w(n);
    for (size_t i = 0; i < n; ++i) {
        // i^2 mod 2n keeps the argument small for large n.
        const uint64_t sq = (static_cast<uint64_t>(i) * i) % (2 * n);
        const double ang = kPi * static_cast<double>(sq) / static_cast<double>(n);
        w[i] = inverse ? cplx(std::cos(ang), std::sin(ang)) : cplx(std::cos(ang), -std::sin(ang));
    }
    std::vector<cplx> x(m, cplx{}), y(m, cplx{});
    for (size_t i = 0; i < n; ++i) x[i] = a[i] * w[i];
    y[0] = std::conj(w[0]);
    for (size_t i = 1; i < n; ++i) y[i] = y[m - i] = std::conj(w[i]);
    fft_pow2(x.data(), m, false);
    fft_pow2(y.data(), m, false);
    for (size_t i = 0; i < m; ++i) x[i] *= y[i];
    fft_pow2(x.data(), m, true);
    const double inv_m = 1.0 / static_cast<double>(m);
    for (size_t i = 0; i < n; ++i) a[i] = x[i] * w[i] * inv_m;
}

void transform(cplx* a, size_t n, bool inverse) {
    if (n <= 1) return;
    if (is_pow2(n)) {
        fft_pow2(a, n, inverse);
    } else {
        fft_bluestein(a, n, inverse);
    }
}

}  // namespace

void fft_forward(const cplx* in, cplx* out, size_t n) {
    if (in != out) std::copy(in, in + n, out);
    transform(out, n, false);
}

void fft_inverse(const cplx* in, cplx* out, size_t n) {
    if (in != out) std::copy(in, in + n, out);
    transform(out, n, true);
    const double inv = 1.0 / static_cast<double>(n);
    for (size_t i = 0; i < n; ++i) out[i] *= inv;
}

const char* fft_backend() { return "builtin"; }

#endif

void fft_forward(std::vector<cplx>& data) { fft_forward(data.data(), data.data(), data.size()); }
void fft_inverse(std::vector<cplx>& data) { fft_inverse(data.data(), data.data(), data.size()); }

}  // namespace ofdr

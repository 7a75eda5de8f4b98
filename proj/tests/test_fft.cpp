#include <doctest.h>

#include <random>

#include "fft.hpp"
#include "oracles.hpp"

using namespace ofdr;

namespace {

std::vector<cplx> random_signal(size_t n, uint32_t seed) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<cplx> out(n);
    for (auto& v : out) v = cplx{g(rng), g(rng)};
    return out;
}

double rel_err(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    double num = 0, den = 0;
    for (size_t i = 0; i < a.size(); ++i) {
        num += std::norm(a[i] - b[i]);
        den += std::norm(b[i]);
    }
    return den > 0 ? std::sqrt(num / den) : std::sqrt(num);
}

}  // namespace

TEST_CASE("fft matches the naive DFT across sizes") {
    // Powers of two, odd sizes, primes and the desk sweep length factors.
    for (size_t n : {1u, 2u, 3u, 8u, 16u, 60u, 97u, 128u, 500u, 625u, 1000u}) {
        auto x = random_signal(n, static_cast<uint32_t>(n));
        auto want = oracle::naive_dft(x);
        auto got = x;
        fft_forward(got);
        CHECK(rel_err(got, want) < 1e-9);
    }
}

TEST_CASE("inverse undoes forward") {
    for (size_t n : {4u, 50u, 243u, 1024u, 50000u}) {
        auto x = random_signal(n, static_cast<uint32_t>(n + 1));
        auto y = x;
        fft_forward(y);
        fft_inverse(y);
        CHECK(rel_err(y, x) < 1e-10);
    }
}

TEST_CASE("parseval holds") {
    auto x = random_signal(1000, 7);
    double time_e = 0;
    for (auto& v : x) time_e += std::norm(v);
    auto spec = x;
    fft_forward(spec);
    double freq_e = 0;
    for (auto& v : spec) freq_e += std::norm(v);
    CHECK(freq_e / static_cast<double>(x.size()) == doctest::Approx(time_e).epsilon(1e-12));
}

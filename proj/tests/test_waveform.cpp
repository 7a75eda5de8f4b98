#include <doctest.h>

#include <cmath>

#include "fft.hpp"
#include "oracles.hpp"
#include "waveform.hpp"

using namespace ofdr;

namespace {

SweepConfig desk_cfg() { return SweepConfig{}; }

// Windowed single-sweep spectrum measurement: fraction of power outside the
// configured band, and at negative frequencies, in dBc.
struct SpectrumCheck {
    double oob_dbc;
    double negative_dbc;
};

SpectrumCheck measure_confinement(const SweepConfig& cfg, const std::vector<cplx>& samples) {
    const size_t n = samples.size();
    std::vector<cplx> spec(n);
    for (size_t i = 0; i < n; ++i) {
        const double w = 0.5 * (1.0 - std::cos(kTwoPi * static_cast<double>(i) /
                                               static_cast<double>(n - 1)));
        spec[i] = samples[i] * w;
    }
    fft_forward(spec);
    const double f_lo = cfg.if_center_hz - cfg.sweep_bandwidth_hz / 2 - cfg.guard_band_hz;
    const double f_hi = cfg.if_center_hz + cfg.sweep_bandwidth_hz / 2 + cfg.guard_band_hz;
    double total = 0, oob = 0, neg = 0;
    for (size_t k = 0; k < n; ++k) {
        double f = static_cast<double>(k) * cfg.sample_rate_hz / static_cast<double>(n);
        if (f >= cfg.sample_rate_hz / 2) f -= cfg.sample_rate_hz;
        const double p = std::norm(spec[k]);
        total += p;
        if (f < f_lo || f > f_hi) oob += p;
        if (f < 0) neg += p;
    }
    return {10.0 * std::log10(oob / total + 1e-300),
            10.0 * std::log10(neg / total + 1e-300)};
}

}  // namespace

TEST_CASE("pol_multiplex alternates X and Y") {
    const auto cfg = desk_cfg();
    CHECK(pol_multiplex(cfg, 0) == LaunchPol::X);
    CHECK(pol_multiplex(cfg, 1) == LaunchPol::Y);
    CHECK(pol_multiplex(cfg, 7) == LaunchPol::Y);
    CHECK(pol_multiplex(cfg, 1234) == LaunchPol::X);
}

TEST_CASE("generate_sweep: length and exact constant modulus") {
    const auto cfg = desk_cfg();
    const auto w = generate_sweep(cfg, 0);
    CHECK(w.samples.size() == 50000);
    double worst = 0;
    for (const auto& s : w.samples) worst = std::max(worst, std::abs(std::abs(s) - 1.0));
    CHECK(worst < 1e-12);
}

TEST_CASE("instantaneous frequency ramps from f_if - B/2 to f_if + B/2") {
    const auto cfg = desk_cfg();
    const auto w = generate_sweep(cfg, 0);
    // Finite difference of the phase at both ends of the sweep.
    auto inst_freq = [&](size_t i) {
        const double dp = std::arg(w.samples[i + 1] * std::conj(w.samples[i]));
        return dp * cfg.sample_rate_hz / kTwoPi;
    };
    CHECK(inst_freq(0) == doctest::Approx(10e6).epsilon(1e-4));
    CHECK(inst_freq(w.samples.size() - 2) == doctest::Approx(20e6).epsilon(1e-4));
}

TEST_CASE("sweep is a pure function of (cfg, index)") {
    const auto cfg = desk_cfg();
    const auto a = generate_sweep(cfg, 3);
    const auto b = generate_sweep(cfg, 3);
    REQUIRE(a.samples.size() == b.samples.size());
    for (size_t i = 0; i < a.samples.size(); ++i) CHECK(a.samples[i] == b.samples[i]);
    CHECK(a.launch_pol == LaunchPol::Y);
}

TEST_CASE("spectral confinement pre- and post-quantization") {
    const auto cfg = desk_cfg();
    const auto w = generate_sweep(cfg, 0);

    const auto pre = measure_confinement(cfg, w.samples);
    CHECK(pre.oob_dbc < -60.0);
    CHECK(pre.negative_dbc < -60.0);

    // 14-bit DAC on I and Q.
    std::vector<double> re(w.samples.size()), im(w.samples.size());
    for (size_t i = 0; i < w.samples.size(); ++i) {
        re[i] = w.samples[i].real();
        im[i] = w.samples[i].imag();
    }
    const auto qi = quantize(re, cfg.dac_bits, 1.0);
    const auto qq = quantize(im, cfg.dac_bits, 1.0);
    std::vector<cplx> quantized(w.samples.size());
    const double scale = 1.0 / 8192.0;
    for (size_t i = 0; i < w.samples.size(); ++i)
        quantized[i] = cplx{qi.codes[i] * scale, qq.codes[i] * scale};

    const auto post = measure_confinement(cfg, quantized);
    CHECK(post.oob_dbc < -60.0);
    CHECK(post.negative_dbc < -60.0);

    // Envelope ripple after quantization stays under 0.1 dB.
    double lo = 1e300, hi = 0;
    for (const auto& s : quantized) {
        const double m = std::abs(s);
        lo = std::min(lo, m);
        hi = std::max(hi, m);
    }
    CHECK(20.0 * std::log10(hi / lo) < 0.1);
}

TEST_CASE("quantize: zero, saturation and clip counting") {
    const std::vector<double> in{0.0, 1.0, -1.0, 0.9999, -2.0};
    const auto q = quantize(in, 14, 1.0);
    CHECK(q.codes[0] == 0);
    CHECK(q.codes[1] == 8191);  // positive full scale clips to max code
    CHECK(q.codes[2] == -8192);
    CHECK(q.codes[3] == 8191);
    CHECK(q.codes[4] == -8192);
    CHECK(q.clipped == 2);  // +1.0 maps to 8192 (clipped), -2.0 well past range
}

TEST_CASE("quantize: round half away from zero") {
    // With bits=3 and full_scale=4, scale is one code per unit.
    const std::vector<double> in{0.5, -0.5, 1.5, -1.5};
    const auto q = quantize(in, 3, 4.0);
    CHECK(q.codes[0] == 1);
    CHECK(q.codes[1] == -1);
    CHECK(q.codes[2] == 2);
    CHECK(q.codes[3] == -2);
}

TEST_CASE("quantized sine at -6 dBFS hits the expected SQNR") {
    const size_t n = 65536;
    std::vector<double> sine(n), recon(n);
    for (size_t i = 0; i < n; ++i)
        sine[i] = 0.5 * std::sin(kTwoPi * 1237.0 * static_cast<double>(i) /
                                 static_cast<double>(n));
    const auto q = quantize(sine, 14, 1.0);
    double sig = 0, err = 0;
    for (size_t i = 0; i < n; ++i) {
        recon[i] = q.codes[i] / 8192.0;
        sig += sine[i] * sine[i];
        err += (recon[i] - sine[i]) * (recon[i] - sine[i]);
    }
    const double sqnr_db = 10.0 * std::log10(sig / err);
    const double expect = 6.02 * 14 + 1.76 - 6.0;
    CHECK(sqnr_db == doctest::Approx(expect).epsilon(0.02));
}

TEST_CASE("chirp oscillator tracks the closed form") {
    const auto cfg = desk_cfg();
    for (double x0 : {0.0, -3.7e-4, 2.1e-4}) {
        ChirpOscillator osc(cfg, x0);
        double worst = 0;
        for (size_t i = 0; i < 20000; ++i) {
            const double x = x0 + static_cast<double>(i) / cfg.sample_rate_hz;
            const double ph = kTwoPi * (cfg.if_center_hz * x +
                                        0.5 * cfg.sweep_rate() * x * x -
                                        0.5 * cfg.sweep_bandwidth_hz * x);
            const cplx want{std::cos(ph), std::sin(ph)};
            worst = std::max(worst, std::abs(osc.next() - want));
        }
        CHECK(worst < 1e-9);
    }
}

TEST_CASE("invalid configs are rejected with the violated field named") {
    auto cfg = desk_cfg();
    cfg.sweep_period_s = 1.00000033e-3;  // non-integer samples per sweep
    CHECK_THROWS_WITH_AS(generate_sweep(cfg, 0),
                         doctest::Contains("sweep_period_s"), ConfigError);
    cfg = desk_cfg();
    cfg.if_center_hz = 22e6;  // band edge above Nyquist
    CHECK_THROWS_AS(generate_sweep(cfg, 0), ConfigError);
    cfg = desk_cfg();
    cfg.sweep_bandwidth_hz = -1.0;
    CHECK_THROWS_AS(generate_sweep(cfg, 0), ConfigError);
}

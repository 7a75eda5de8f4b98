#include <doctest.h>

#include <cmath>

#include "matched_filter.hpp"
#include "oracles.hpp"
#include "peaks.hpp"
#include "propagate.hpp"
#include "rng.hpp"

using namespace ofdr;

namespace {

SweepConfig small_cfg() {
    SweepConfig cfg;
    cfg.sample_rate_hz = 1e6;
    cfg.if_center_hz = 0.3e6;
    cfg.sweep_bandwidth_hz = 0.2e6;
    cfg.sweep_period_s = 2e-3;
    cfg.guard_band_hz = 0.05e6;
    return cfg;
}

// Build a capture whose X channel carries given analytic contributions:
// sum of amp * exp(j phase) * probe(t - tau), quantized at 16 bits.
SweepCapture synth_capture(const SweepConfig& cfg,
                           const std::vector<std::tuple<double, double, double>>& reflectors,
                           double noise_sigma = 0.0, uint64_t seed = 1) {
    const size_t n = cfg.samples_per_sweep();
    std::vector<double> x(n, 0.0);
    for (const auto& [tau, amp, phase] : reflectors) {
        const cplx coef = std::polar(amp, phase);
        for (size_t i = 0; i < n; ++i) {
            const double t = static_cast<double>(i) / cfg.sample_rate_hz;
            x[i] += (coef * probe_sample_at(cfg, t - tau)).real();
        }
    }
    if (noise_sigma > 0) {
        for (size_t i = 0; i < n; ++i)
            x[i] += noise_sigma * rng::gaussian(rng::key(seed, rng::kGeneric, 1, i));
    }
    SweepCapture cap;
    cap.sweep_index = 0;
    cap.launch_pol = LaunchPol::X;
    cap.adc_bits = 16;
    cap.full_scale = 4.0 * std::max(noise_sigma, 1e-12) + 2.0;
    const auto q = quantize(x, 16, cap.full_scale);
    cap.chan_x.resize(n);
    cap.chan_y.assign(n, 0);
    for (size_t i = 0; i < n; ++i) cap.chan_x[i] = static_cast<int16_t>(q.codes[i]);
    return cap;
}

}  // namespace

TEST_CASE("autocorrelation: loopback capture peaks at bin 0 with value N") {
    const auto cfg = small_cfg();
    const auto cap = synth_capture(cfg, {{0.0, 1.0, 0.0}});
    MatchedFilter mf(cfg);
    const auto ir = mf.apply(cap);
    size_t best = 1;
    for (size_t i = 1; i < ir.size(); ++i)
        if (ir.power(i) > ir.power(best)) best = i;
    const double n = static_cast<double>(ir.size());
    CHECK(ir.power(0) > ir.power(best));
    CHECK(std::abs(ir.ch_x[0]) * ir.code_scale == doctest::Approx(n).epsilon(1e-3));
}

TEST_CASE("two reflectors one resolution cell apart stay resolvable") {
    const auto cfg = small_cfg();
    const double cell = 1.0 / cfg.sweep_bandwidth_hz;  // 5 bins at these rates
    const double tau1 = 400.0 / cfg.sample_rate_hz;
    const double tau2 = tau1 + cell;
    MatchedFilter mf(cfg);

    // Kernel responses of each reflector alone fix the relative phase that
    // makes the midpoint destructive (reflector phases are arbitrary in the
    // field; this is the deterministic Rayleigh-limit instance).
    const auto k1 = mf.apply(synth_capture(cfg, {{tau1, 1.0, 0.0}}));
    const auto k2 = mf.apply(synth_capture(cfg, {{tau2, 1.0, 0.0}}));
    const size_t mid = 402;
    const double phi2 = kPi + std::arg(k1.ch_x[mid]) - std::arg(k2.ch_x[mid]);

    const auto ir = mf.apply(synth_capture(cfg, {{tau1, 1.0, 0.0}, {tau2, 1.0, phi2}}));
    const size_t b1 = 400, b2 = 405;
    double saddle = 1e300;
    for (size_t i = b1 + 1; i < b2; ++i) saddle = std::min(saddle, ir.power(i));
    const double smaller_peak = std::min(ir.power(b1), ir.power(b2));
    CHECK(10.0 * std::log10(smaller_peak / saddle) >= 3.0);

    // The detector reports them as two separate peaks at the right bins.
    const auto peaks = detect_peaks(ir, std::nullopt, 10.0, cfg);
    bool saw1 = false, saw2 = false;
    for (const auto& p : peaks) {
        if (std::llabs(static_cast<long long>(p.bin) - 400) <= 1) saw1 = true;
        if (std::llabs(static_cast<long long>(p.bin) - 405) <= 1) saw2 = true;
    }
    CHECK(saw1);
    CHECK(saw2);
}

TEST_CASE("detect_peaks monitoring mode: all repeaters, missing flag on faults") {
    const auto cfg = small_cfg();
    CableModel cable = CableModel::uniform(8, 25.0, 0.2);
    LaserModel quiet;
    quiet.linewidth_hz = 0;
    Propagator prop(cable, quiet, cfg, 2, 1);
    MatchedFilter mf(cfg);
    const auto delays = cable.nominal_roundtrip_delays(cfg.sweep_period_s);

    const auto ir = mf.apply(prop.simulate_sweep(0));
    auto peaks = detect_peaks(ir, std::span<const double>(delays), 10.0, cfg);
    REQUIRE(peaks.size() == 8);
    for (size_t k = 0; k < 8; ++k) {
        CHECK(!peaks[k].missing);
        CHECK(peaks[k].bin ==
              static_cast<size_t>(std::llround(delays[k] * cfg.sample_rate_hz)));
    }

    // Kill repeater 5 (60 dB extra loss) and watch only it get flagged.
    CableModel faulty = cable;
    faulty.repeaters[4].hllb_coupling_db = -105.0;
    faulty.repeaters[4].ase_noise_density = 1e-13;  // keep a floor to measure against
    Propagator prop2(faulty, quiet, cfg, 2, 1);
    const auto ir2 = mf.apply(prop2.simulate_sweep(0));
    auto peaks2 = detect_peaks(ir2, std::span<const double>(delays), 10.0, cfg);
    REQUIRE(peaks2.size() == 8);
    for (size_t k = 0; k < 8; ++k) CHECK(peaks2[k].missing == (k == 4));
}

TEST_CASE("subsample delay: exact on-bin, biased under 0.02 bins at fractional offsets") {
    const auto cfg = small_cfg();
    const double bin = 1.0 / cfg.sample_rate_hz;
    MatchedFilter mf(cfg);

    {
        const auto cap = synth_capture(cfg, {{300.0 * bin, 1.0, 0.3}});
        const auto ir = mf.apply(cap);
        const double est = estimate_delay_subsample(ir, 300);
        CHECK(std::abs(est / bin - 300.0) < 1e-3);
    }
    {
        // Deterministic interpolation bias at a fractional offset.
        const auto cap = synth_capture(cfg, {{300.3 * bin, 1.0, 0.1}});
        const auto ir = mf.apply(cap);
        CHECK(std::abs(estimate_delay_subsample(ir, 300) / bin - 300.3) < 0.005);
    }
    {
        // At 30 dB single-sweep SNR one estimate carries ~0.1 bin of noise
        // (the lobe spans fs/B bins); the averaged estimate settles inside
        // the 0.02-bin accuracy of the interpolator.
        const double amp = 1.0;
        const double n = static_cast<double>(cfg.samples_per_sweep());
        const double snr_lin = std::pow(10.0, 30.0 / 10.0);
        const double sigma = std::sqrt(n * amp * amp / (4.0 * 0.6931 * snr_lin));
        double err_sum = 0;
        const int trials = 256;
        for (int t = 0; t < trials; ++t) {
            const auto cap = synth_capture(cfg, {{300.3 * bin, amp, 0.1}}, sigma,
                                           static_cast<uint64_t>(t + 1));
            const auto ir = mf.apply(cap);
            size_t best = 299;
            for (size_t i = 299; i <= 301; ++i)
                if (ir.power(i) > ir.power(best)) best = i;
            err_sum += estimate_delay_subsample(ir, best) / bin - 300.3;
        }
        CHECK(std::abs(err_sum / trials) < 0.02);
    }
}

TEST_CASE("coherent averaging: identity at W=1, floor drops 12 dB at W=16") {
    const auto cfg = small_cfg();
    MatchedFilter mf(cfg);
    std::vector<ImpulseResponse> irs;
    const double tau = 250.0 / cfg.sample_rate_hz;
    // Noise well above the deterministic correlation sidelobes so the floor is
    // noise-dominated even after 16-fold averaging.
    for (int m = 0; m < 16; ++m)
        irs.push_back(mf.apply(
            synth_capture(cfg, {{tau, 1.0, 0.0}}, 3.0, static_cast<uint64_t>(m + 100))));

    const auto one = coherent_average({irs.data(), 1}, 1);
    for (size_t i = 0; i < one.size(); ++i) CHECK(one.ch_x[i] == irs[0].ch_x[i]);

    auto floor_of = [&](const ImpulseResponse& ir) {
        std::vector<double> p;
        for (size_t i = 0; i < ir.size(); ++i) {
            const long d = std::labs(static_cast<long>(i) - 250);
            if (std::min(d, 2000 - d) > 100) p.push_back(ir.power(i));
        }
        std::nth_element(p.begin(), p.begin() + static_cast<ptrdiff_t>(p.size() / 2), p.end());
        return p[p.size() / 2];
    };
    const auto avg = coherent_average(irs, 16);
    const double drop_db = 10.0 * std::log10(floor_of(irs[0]) / floor_of(avg));
    CHECK(drop_db == doctest::Approx(12.0).epsilon(0.09));

    // A deterministic signal is untouched by averaging.
    std::vector<ImpulseResponse> same(8, irs[0]);
    const auto avg_same = coherent_average(same, 8);
    CHECK(std::abs(avg_same.ch_x[250] - irs[0].ch_x[250]) <
          1e-9 * std::abs(irs[0].ch_x[250]));

    auto flipped = irs;
    flipped[3].launch_pol = LaunchPol::Y;
    CHECK_THROWS_AS(coherent_average(flipped, 16), ConfigError);
}

TEST_CASE("estimate_snr: clamp on a zero floor, low-confidence flag") {
    const auto cfg = small_cfg();
    ImpulseResponse ir;
    ir.bin_spacing_s = 1.0 / cfg.sample_rate_hz;
    ir.ch_x.assign(2000, cplx{});
    ir.ch_y.assign(2000, cplx{});
    ir.ch_x[250] = cplx{1000.0, 0.0};
    PeakInfo pk;
    pk.repeater = 1;
    pk.bin = 250;
    pk.vx = ir.ch_x[250];
    const std::vector<PeakInfo> peaks{pk};
    const auto snrs = estimate_snr(ir, peaks, cfg);
    REQUIRE(snrs.size() == 1);
    CHECK(snrs[0].snr_db == doctest::Approx(99.0));
    CHECK(snrs[0].clamped);

    // Short response: almost every bin sits inside the peak guard.
    ImpulseResponse tiny;
    tiny.bin_spacing_s = ir.bin_spacing_s;
    tiny.ch_x.assign(60, cplx{0.001, 0.0});
    tiny.ch_y.assign(60, cplx{});
    tiny.ch_x[30] = cplx{100.0, 0.0};
    PeakInfo pk2 = pk;
    pk2.bin = 30;
    const auto snrs2 = estimate_snr(tiny, {&pk2, 1}, cfg);
    CHECK(snrs2[0].low_confidence);
}

TEST_CASE("estimate_snr: doubling the noise power costs 3 dB") {
    const auto cfg = small_cfg();
    MatchedFilter mf(cfg);
    const double tau = 250.0 / cfg.sample_rate_hz;
    const std::vector<double> expected{tau};
    const auto measure = [&](double sigma) {
        double acc = 0;
        for (uint64_t s = 0; s < 8; ++s) {
            const auto ir = mf.apply(synth_capture(cfg, {{tau, 1.0, 0.0}}, sigma, 900 + s));
            auto peaks = detect_peaks(ir, std::span<const double>(expected), 10.0, cfg);
            REQUIRE(peaks.size() == 1);
            acc += estimate_snr(ir, peaks, cfg)[0].snr_db;
        }
        return acc / 8.0;
    };
    const double snr1 = measure(0.2);
    const double snr2 = measure(0.2 * std::sqrt(2.0));  // double the noise power
    CHECK(snr1 - snr2 == doctest::Approx(3.0).epsilon(0.17));
}

TEST_CASE("measurement bandwidth reporting") {
    const auto cfg = small_cfg();
    CHECK(meas_bandwidth_hz(cfg, 1) == doctest::Approx(500.0));
    CHECK(meas_bandwidth_hz(cfg, 250) == doctest::Approx(2.0));
}

TEST_CASE("power averaging keeps decohered peaks and the floor level") {
    const auto cfg = small_cfg();
    MatchedFilter mf(cfg);
    const double tau = 250.0 / cfg.sample_rate_hz;
    // Same reflector with a different phase every sweep: coherent averaging
    // melts the peak away, power averaging keeps it.
    std::vector<ImpulseResponse> irs;
    for (int m = 0; m < 16; ++m)
        irs.push_back(mf.apply(synth_capture(cfg, {{tau, 1.0, 0.4 * m * kTwoPi}}, 1.0,
                                             static_cast<uint64_t>(m + 500))));
    const auto coh = coherent_average(irs, 16);
    const auto pow_avg = power_average(irs, 16);
    CHECK(pow_avg.power(250) > 50.0 * coh.power(250));
    CHECK(std::abs(std::sqrt(pow_avg.power(250)) - std::sqrt(irs[0].power(250))) <
          0.2 * std::sqrt(irs[0].power(250)));

    auto flipped = irs;
    flipped[2].launch_pol = LaunchPol::Y;
    CHECK_THROWS_AS(power_average(flipped, 16), ConfigError);
}

// Acceptance suite: one line per criterion, nonzero exit on any failure.

#include <cstdio>

#include "helpers.hpp"

using acceptance::Result;

namespace {

struct Criterion {
    int number;
    const char* name;
    Result (*run)();
};

const Criterion kCriteria[] = {
    {1, "SNR anchor: 30 +/- 1 dB per repeater on transatlantic-mini at 1 s averaging",
     acceptance::criterion_01_snr_anchor},
    {2, "Averaging law: SNR(W) - SNR(1) = 10 log10 W +/- 1 dB for W in {4,16,64}",
     acceptance::criterion_02_averaging_law},
    {3, "Differential-phase isolation: 1 Hz 2 rad tone on span 5 of 8",
     acceptance::criterion_03_differential_isolation},
    {4, "Integrated-noise growth: Var(phi_k) non-decreasing in k (bootstrap)",
     acceptance::criterion_04_noise_growth},
    {5, "Laser comparison: stabilized/free PSD ratio -10 dB (<1 Hz), -20 dB (10-1k Hz)",
     acceptance::criterion_05_laser_comparison},
    {6, "Delay tracking: 5 ns span drift -> 10 ns round trip +/- 0.5 ns; pair flags",
     acceptance::criterion_06_delay_tracking},
    {7, "Matched-filter oracle equivalence to 1e-6 on 100 random inputs",
     acceptance::criterion_07_matched_filter_oracle},
    {8, "Probe invariants: constant modulus, ripple < 0.1 dB, out-of-band < -60 dBc",
     acceptance::criterion_08_probe_invariants},
    {9, "Wire protocol: golden frame, round trips, gap report, 60 s real-time loopback",
     acceptance::criterion_09_wire_protocol},
    {10, "Determinism: two cmd_e2e runs produce byte-identical outputs",
     acceptance::criterion_10_determinism},
};

}  // namespace

int main(int argc, char** argv) {
    int only = 0;
    if (argc > 1) only = std::atoi(argv[1]);

    int failures = 0;
    for (const auto& c : kCriteria) {
        if (only != 0 && c.number != only) continue;
        Result r;
        try {
            r = c.run();
        } catch (const std::exception& e) {
            r.pass = false;
            r.detail = std::string("exception: ") + e.what();
        }
        std::printf("%s criterion %2d: %s%s%s\n", r.pass ? "PASS" : "FAIL", c.number, c.name,
                    r.detail.empty() ? "" : " -- ", r.detail.c_str());
        std::fflush(stdout);
        if (!r.pass) ++failures;
    }
    return failures;
}

#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ofdr {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

// Speed of light in km/s; span lengths are kept in km throughout.
inline constexpr double kSpeedOfLightKmPerS = 299792.458;

enum class LaunchPol : uint8_t { X = 0, Y = 1 };

inline const char* to_string(LaunchPol p) { return p == LaunchPol::X ? "X" : "Y"; }

// 2x2 complex polarization transfer matrix, row-major [[xx, xy], [yx, yy]].
struct Jones {
    cplx xx{1.0, 0.0};
    cplx xy{0.0, 0.0};
    cplx yx{0.0, 0.0};
    cplx yy{1.0, 0.0};

    static Jones identity() { return Jones{}; }

    // Rotation by angle (rad) in the x/y plane.
    static Jones rotation(double angle_rad) {
        const double c = std::cos(angle_rad);
        const double s = std::sin(angle_rad);
        return Jones{cplx{c, 0}, cplx{-s, 0}, cplx{s, 0}, cplx{c, 0}};
    }

    Jones operator*(const Jones& o) const {
        return Jones{xx * o.xx + xy * o.yx, xx * o.xy + xy * o.yy,
                     yx * o.xx + yy * o.yx, yx * o.xy + yy * o.yy};
    }

    Jones operator*(cplx s) const { return Jones{xx * s, xy * s, yx * s, yy * s}; }

    // Apply to a launch vector (vx, vy); returns (out_x, out_y).
    std::pair<cplx, cplx> apply(cplx vx, cplx vy) const {
        return {xx * vx + xy * vy, yx * vx + yy * vy};
    }

    // Frobenius deviation from unitarity, ||J*J^H - I||_F.
    double unitarity_deviation() const {
        const cplx a = xx * std::conj(xx) + xy * std::conj(xy) - 1.0;
        const cplx b = xx * std::conj(yx) + xy * std::conj(yy);
        const cplx c = yx * std::conj(xx) + yy * std::conj(xy);
        const cplx d = yx * std::conj(yx) + yy * std::conj(yy) - 1.0;
        return std::sqrt(std::norm(a) + std::norm(b) + std::norm(c) + std::norm(d));
    }

    double frobenius_norm() const {
        return std::sqrt(std::norm(xx) + std::norm(xy) + std::norm(yx) + std::norm(yy));
    }
};

// Error taxonomy. The C API maps these onto status codes.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct IoError : std::runtime_error {
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

struct CalibrationError : std::runtime_error {
    CalibrationError(const std::string& what, double achieved_db)
        : std::runtime_error(what), achieved_snr_db(achieved_db) {}
    double achieved_snr_db;
};

struct StreamError : std::runtime_error {
    explicit StreamError(const std::string& what) : std::runtime_error(what) {}
};

inline const char* ofdr_version_string() { return "0.1.0"; }

}  // namespace ofdr

// pump.cpp - excitation waveform evaluation and quadrature
#include "nanolase/pump.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "nanolase/errors.hpp"
#include "nanolase/model.hpp"

namespace nanolase {

namespace {

constexpr double kSigmaCut = 6.0;       // pulses are exactly 0 beyond 6 sigma
constexpr double kOnThreshold = 1e-6;   // "pump on" means L > 1e-6 peak

double gauss_sigma(double fwhm) {
    return fwhm / (2.0 * std::sqrt(2.0 * std::numbers::ln2));
}

// centre indices whose 6-sigma support can reach t
void nearby_pulses(double t, double period, long& k_lo, long& k_hi) {
    const long k = static_cast<long>(std::floor(t / period + 0.5));
    k_lo = k - 1 < 0 ? 0 : k - 1;
    k_hi = k + 1 < 0 ? 0 : k + 1;
}

double floor_mod(double t, double period) {
    double r = std::fmod(t, period);
    if (r < 0) r += period;
    return r;
}

// composite-Simpson refinement of a smooth integrand
template <class F>
double simpson_refine(F&& f, double a, double b, double rel_tol) {
    if (b <= a) return 0.0;
    auto simpson = [&](std::size_t n) {
        const double h = (b - a) / static_cast<double>(n);
        double acc = f(a) + f(b);
        for (std::size_t i = 1; i < n; ++i)
            acc += f(a + h * static_cast<double>(i)) * (i % 2 ? 4.0 : 2.0);
        return acc * h / 3.0;
    };
    double prev = simpson(64);
    for (std::size_t n = 128; n <= (1u << 22); n *= 2) {
        const double cur = simpson(n);
        const double scale = std::max({std::fabs(cur), std::fabs(prev), 1e-300});
        if (std::fabs(cur - prev) <= rel_tol * scale) return cur;
        prev = cur;
    }
    throw NumericError("pump_energy_per_period: quadrature did not converge");
}

}  // namespace

PumpProfile PumpProfile::cw(double power_W) {
    if (!(power_W >= 0) || !std::isfinite(power_W))
        throw DomainError("PumpProfile: cw power must be non-negative");
    PumpProfile p;
    p.kind = Kind::cw;
    p.power = power_W;
    return p;
}

PumpProfile PumpProfile::gaussian_train(double avg_power_W, double fwhm_s,
                                        double period_s) {
    if (!(avg_power_W >= 0) || !std::isfinite(avg_power_W))
        throw DomainError("PumpProfile: avg_power must be non-negative");
    if (!(fwhm_s > 0) || !(period_s > 0) || !(fwhm_s < period_s / 10.0))
        throw DomainError("PumpProfile: need 0 < fwhm < period/10");
    PumpProfile p;
    p.kind = Kind::gaussian_train;
    p.avg_power = avg_power_W;
    p.fwhm = fwhm_s;
    p.period = period_s;
    return p;
}

PumpProfile PumpProfile::chopped(double cw_power_W, double on_duration_s,
                                 double period_s) {
    if (!(cw_power_W >= 0) || !std::isfinite(cw_power_W))
        throw DomainError("PumpProfile: chopped power must be non-negative");
    if (!(on_duration_s > 0) || !(period_s > 0) || !(on_duration_s < period_s))
        throw DomainError("PumpProfile: need 0 < on_duration < period");
    PumpProfile p;
    p.kind = Kind::chopped;
    p.cw_power = cw_power_W;
    p.on_duration = on_duration_s;
    p.period = period_s;
    return p;
}

double PumpProfile::peak_power() const {
    switch (kind) {
        case Kind::cw: return power;
        case Kind::chopped: return cw_power;
        case Kind::gaussian_train:
            return avg_power > 0 ? peak_from_average(avg_power, fwhm, period) : 0.0;
    }
    return 0.0;
}

double pump_power_at(const PumpProfile& pump, double t) {
    switch (pump.kind) {
        case PumpProfile::Kind::cw:
            return pump.power;
        case PumpProfile::Kind::chopped:
            return floor_mod(t, pump.period) < pump.on_duration ? pump.cw_power : 0.0;
        case PumpProfile::Kind::gaussian_train: {
            if (pump.avg_power == 0) return 0.0;
            const double peak = pump.peak_power();
            const double sigma = gauss_sigma(pump.fwhm);
            long k_lo, k_hi;
            nearby_pulses(t, pump.period, k_lo, k_hi);
            double acc = 0.0;
            for (long k = k_lo; k <= k_hi; ++k) {
                const double u = t - static_cast<double>(k) * pump.period;
                if (std::fabs(u) > kSigmaCut * sigma) continue;
                acc += peak * std::exp(-u * u / (2.0 * sigma * sigma));
            }
            return acc;
        }
    }
    return 0.0;
}

double pump_power_slope(const PumpProfile& pump, double t) {
    if (pump.kind != PumpProfile::Kind::gaussian_train || pump.avg_power == 0)
        return 0.0;
    const double peak = pump.peak_power();
    const double sigma = gauss_sigma(pump.fwhm);
    long k_lo, k_hi;
    nearby_pulses(t, pump.period, k_lo, k_hi);
    double acc = 0.0;
    for (long k = k_lo; k <= k_hi; ++k) {
        const double u = t - static_cast<double>(k) * pump.period;
        if (std::fabs(u) > kSigmaCut * sigma) continue;
        acc += peak * std::exp(-u * u / (2.0 * sigma * sigma)) * (-u / (sigma * sigma));
    }
    return acc;
}

double pump_energy_per_period(const PumpProfile& pump,
                              std::optional<double> window) {
    const double quad_tol = 1e-9;
    switch (pump.kind) {
        case PumpProfile::Kind::cw: {
            if (!window || !(*window > 0))
                throw DomainError(
                    "pump_energy_per_period: cw profile needs a positive reference window");
            auto f = [&](double) { return pump.power; };
            return simpson_refine(f, 0.0, *window, quad_tol);
        }
        case PumpProfile::Kind::chopped: {
            // piecewise constant: integrate the smooth pieces separately
            auto f = [&](double) { return pump.cw_power; };
            return simpson_refine(f, 0.0, pump.on_duration, quad_tol);
        }
        case PumpProfile::Kind::gaussian_train: {
            if (pump.avg_power == 0) return 0.0;
            // pulse 0 owns the period [-T/2, T/2); support is well inside
            const double half = kSigmaCut * gauss_sigma(pump.fwhm);
            auto f = [&](double t) { return pump_power_at(pump, t); };
            return simpson_refine(f, -half, half, quad_tol);
        }
    }
    return 0.0;
}

double pump_max_step_hint(const PumpProfile& pump, double t) {
    const double inf = std::numeric_limits<double>::infinity();
    switch (pump.kind) {
        case PumpProfile::Kind::cw:
            return inf;
        case PumpProfile::Kind::chopped: {
            const double eps = 1e-12 * pump.period;
            double phase = floor_mod(t, pump.period);
            if (phase >= pump.period - eps) phase = 0.0;  // at the rising edge
            if (phase < pump.on_duration - eps) {
                // inside ON: keep it sampled, stop at the falling edge
                return std::min(pump.on_duration / 20.0, pump.on_duration - phase);
            }
            // inside OFF (or at the falling edge): stop at the next rising edge
            return pump.period - phase;
        }
        case PumpProfile::Kind::gaussian_train: {
            if (pump.avg_power == 0) return inf;
            // window where L > 1e-6 peak
            const double sigma = gauss_sigma(pump.fwhm);
            const double w = sigma * std::sqrt(-2.0 * std::log(kOnThreshold));
            const double dense = pump.fwhm / 20.0;
            const double eps = 1e-9 * pump.fwhm;
            long k_lo, k_hi;
            nearby_pulses(t, pump.period, k_lo, k_hi);
            for (long k = k_lo; k <= k_hi + 1; ++k) {
                const double start = static_cast<double>(k) * pump.period - w;
                const double end = start + 2.0 * w;
                if (t < start - eps) return std::max(start - t, dense);
                if (t < end - eps) return dense;  // inside the window
            }
            return inf;
        }
    }
    return inf;
}

}  // namespace nanolase

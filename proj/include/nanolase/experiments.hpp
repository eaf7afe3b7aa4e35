// experiments.hpp - LL curves, threshold extraction, streak-convolved pulse
// responses, and Auger significance
#pragma once

#include <optional>
#include <vector>

#include "nanolase/dynamics.hpp"

namespace nanolase {

enum class LLRegime { pulsed_averaged, cw };

struct LLPoint {
    double pump_in = 0;    // W
    double light_out = 0;  // W (arbitrary-unit data uses the same slot)
};

struct LLCurve {
    std::vector<LLPoint> points;  // pump_in strictly increasing
    LLRegime regime = LLRegime::pulsed_averaged;
};

// Continuous two-segment piecewise-linear fit; threshold is the breakpoint.
struct ThresholdFit {
    double threshold = 0;    // W
    double slope_below = 0;  // W/W
    double slope_above = 0;  // W/W
    double residual = 0;     // RMS misfit / RMS signal
};

struct PulseMetrics {
    double fwhm = 0;            // s
    double rise_time_10_90 = 0; // s
    double fall_time_90_10 = 0; // s
    double peak_delay = 0;      // s, pump-pulse centre to lasing peak
};

// Time-averaged output over one pump period (after a warm-up period) for
// each average power; pulse_template supplies FWHM and repetition period.
LLCurve ll_curve_pulsed(const LaserParams& p, const PumpProfile& pulse_template,
                        const std::vector<double>& powers, double rel_tol = 1e-8);

// Steady-state output per CW power.
LLCurve ll_curve_cw(const LaserParams& p, const std::vector<double>& powers);

ThresholdFit extract_threshold(const LLCurve& ll);

// Convolve the light-output channel with a unit-area Gaussian of the given
// FWHM. The input is treated as piecewise linear and the convolution is
// evaluated in closed form on a uniform grid (step resample_dt, default
// min(irf_fwhm/20, smallest input spacing)).
Trajectory convolve_irf(const Trajectory& traj, double irf_fwhm,
                        double resample_dt = 0);

// Full width between the first upward and last downward half-maximum
// crossings of P(t), crossings located by linear interpolation.
double measure_fwhm(const Trajectory& traj);

// One-period pulse simulation + optional IRF convolution + pulse metrics.
PulseMetrics pulse_response(const LaserParams& p, const PumpProfile& pump,
                            std::optional<double> irf_fwhm,
                            double rel_tol = 1e-8,
                            Trajectory* response = nullptr);

// C_A N_G^3 over the total lasing-level loss rate at the given state.
double auger_fraction(const LaserParams& p, const RateState& state);

// Linear resampling onto a uniform grid (exported for analysis tooling).
Trajectory resample_uniform(const Trajectory& traj, double dt);

}  // namespace nanolase

// pump.hpp - time-dependent excitation waveforms L_in(t)
#pragma once

#include <optional>

namespace nanolase {

// CW, Gaussian pulse train, or chopped quasi-CW excitation.
// Gaussian pulses sit at t = k*period (k >= 0, first pulse at t = 0) and
// evaluate to exactly 0 beyond +/-6 sigma of the nearest centre; the peak
// is chosen so each period carries avg_power * period of energy.
struct PumpProfile {
    enum class Kind { cw, gaussian_train, chopped };

    Kind kind = Kind::cw;
    double power = 0;        // W, cw
    double avg_power = 0;    // W, gaussian_train
    double fwhm = 0;         // s, gaussian_train
    double period = 0;       // s, gaussian_train and chopped
    double cw_power = 0;     // W, chopped
    double on_duration = 0;  // s, chopped

    static PumpProfile cw(double power_W);
    static PumpProfile gaussian_train(double avg_power_W, double fwhm_s,
                                      double period_s);
    static PumpProfile chopped(double cw_power_W, double on_duration_s,
                               double period_s);

    double peak_power() const;
    bool is_periodic() const { return kind != Kind::cw; }
};

double pump_power_at(const PumpProfile& pump, double t);

// dL_in/dt, used by the stiff integrator (zero for cw/chopped interiors;
// discontinuities are handled by stepping exactly onto waveform edges).
double pump_power_slope(const PumpProfile& pump, double t);

// Energy in one period by numerical quadrature; CW profiles need an
// explicit reference window.
double pump_energy_per_period(const PumpProfile& pump,
                              std::optional<double> window = std::nullopt);

// Integrator support: the largest step the sampling contract allows when
// starting from t (>= 20 samples per pulse FWHM while the pump is above
// 1e-6 of its peak; steps land exactly on chopped edges).
double pump_max_step_hint(const PumpProfile& pump, double t);

}  // namespace nanolase

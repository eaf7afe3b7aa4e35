// model.hpp - parameter set and right-hand side of the three-level
// rate-equation laser model, plus small closed-form derived quantities.
#pragma once

#include <string>

#include "nanolase/constants.hpp"

namespace nanolase {

struct PumpProfile;  // pump.hpp

// Instantaneous model state. Carrier densities are per m^3 of active
// volume; the photon density P is the photon number in the lasing mode
// divided by the coupled-cavity mode volume V_mode.
struct RateState {
    double t = 0;    // s
    double N_E = 0;  // 1/m^3, pump level
    double N_G = 0;  // 1/m^3, lasing level
    double P = 0;    // 1/m^3, cavity photons / V_mode
};

struct Derivs {
    double dN_E = 0;
    double dN_G = 0;
    double dP = 0;
};

// All physical constants of the model, SI units throughout. The Auger
// coefficient is stored in m^6/s (1e-28 cm^6/s == 1e-40 m^6/s).
struct LaserParams {
    double F_cav = 31.0;        // Purcell enhancement of SE into the lasing mode
    double eta = 1.3e-3;        // pump absorption efficiency
    double tau_relax = 6e-12;   // s, pump level -> lasing level
    double tau_sp = 1e-9;       // s, bulk QW spontaneous-emission lifetime
    double tau_nr_G = 188e-12;  // s, nonradiative lifetime of lasing-level carriers
    double tau_nr_E = 188e-12;  // s, nonradiative lifetime of pump-level carriers
    double C_A = 1e-40;         // m^6/s, Auger coefficient
    double g0 = 1.5e5;          // 1/m, logarithmic gain coefficient
    double N_tr = 2e23;         // 1/m^3, transparency density
    double beta_c = 5e-3;       // SE fraction coupled to the lasing mode (pre-Purcell)
    double Q = 2000.0;          // cavity quality factor
    double lambda_cav = 950e-9;   // m
    double lambda_pump = 780e-9;  // m
    double V_a = 1.3e-21;       // m^3, active (QW) volume interacting with the mode
    double V_mode = 6.5e-21;    // m^3, coupled-cavity optical mode volume
    double v_g = 8.5e7;         // m/s, group velocity in the gain medium
    double kappa_out = 0.1;     // collection/output coupling of the reported power

    // derived quantities
    double confinement() const;      // Gamma = min(V_a / V_mode, 1)
    double tau_photon() const;       // Q lambda_cav / (2 pi c)
    double se_enhancement() const;   // 1 + beta_c (F_cav - 1)
    double pump_rate_coeff() const;  // eta lambda_pump / (h c V_a), carriers per (m^3 J)

    // Throws DomainError naming the offending field. beta_c = 0 is allowed
    // (decouples the cavity mode, used by decay checks).
    void validate() const;
};

enum class PumpRegime { pulsed, cw };

// Operating-point presets: the quantities that change between low
// temperature (10 K) and room temperature, with the default pump
// absorption efficiency for each excitation regime.
struct EnvironmentPreset {
    std::string name;       // "LT" or "RT"
    double temperature_K;
    double tau_nr_G;        // s
    double tau_relax;       // s
    double g0;              // 1/m
    double N_tr;            // 1/m^3
    double eta_pulsed;
    double eta_cw;
};

const EnvironmentPreset& lt_preset();
const EnvironmentPreset& rt_preset();

LaserParams make_params(const EnvironmentPreset& env, PumpRegime regime);
LaserParams lt_params(PumpRegime regime = PumpRegime::pulsed);
LaserParams rt_params(PumpRegime regime = PumpRegime::pulsed);

// tau_p = Q lambda / (2 pi c)
double photon_lifetime(double Q, double lambda_cav);

// Logarithmic QW gain g = g0 ln(N_G / N_tr), clamped below at
// N_G = 1e-6 N_tr so the value stays bounded as N_G -> 0.
double gain(double N_G, const LaserParams& p);
double gain_slope(double N_G, const LaserParams& p);  // dg/dN_G

// The three coupled derivatives (dN_E/dt, dN_G/dt, dP/dt); L_in(t) is
// taken from the pump profile. Throws NumericError on non-finite state.
Derivs rhs(const RateState& state, double t, const LaserParams& p,
           const PumpProfile& pump);

// Jacobian of rhs with respect to (N_E, N_G, P), row-major.
void rhs_jacobian(const RateState& state, const LaserParams& p, double J[3][3]);

// Peak power of a Gaussian pulse of the given FWHM that carries the full
// per-period energy avg_power * period.
double peak_from_average(double avg_power, double fwhm, double period);

// Pump-capture efficiency rescaled with inverse spot area.
double spot_scaled_eta(double eta_ref, double d_ref, double d_new);

double drift_length(double v_th, double delta_tau);

// Reported output power for a photon density P:
// kappa_out * (h c / lambda_cav) * V_mode * P / tau_p
double output_power(double P, const LaserParams& p);

}  // namespace nanolase

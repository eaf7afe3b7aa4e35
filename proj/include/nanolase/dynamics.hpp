// dynamics.hpp - stiff time integration, CW steady states, and carrier
// bookkeeping over trajectories
#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "nanolase/model.hpp"
#include "nanolase/pump.hpp"

namespace nanolase {

struct Trajectory {
    std::vector<RateState> samples;   // strictly increasing t
    std::uint64_t params_hash = 0;    // identifies the generating configuration

    double t_begin() const { return samples.front().t; }
    double t_end() const { return samples.back().t; }
};

struct IntegrateStats {
    std::size_t steps_accepted = 0;
    std::size_t steps_rejected = 0;
    std::size_t clamp_events = 0;   // negative excursions clamped to zero
    std::size_t rhs_evals = 0;
};

struct IntegrateOptions {
    double max_step = 0;   // 0: span/300
    double init_step = 0;  // 0: automatic
};

// Adaptive Rosenbrock integration of the rate equations from init over
// [t0, t1], local error per step bounded by rel_tol (mixed scale with a
// tiny running-maximum absolute floor). Accepted steps form the returned
// trajectory. Components are clamped at zero from below; excursions beyond
// round-off dust count as clamp events.
Trajectory integrate(const LaserParams& p, const PumpProfile& pump, double t0,
                     double t1, const RateState& init, double rel_tol,
                     IntegrateStats* stats = nullptr,
                     const IntegrateOptions* opts = nullptr);

// CW fixed point: damped Newton seeded from a long relaxation integration.
// The returned state is non-negative and satisfies |rhs| <= 1e-9 of the
// characteristic rate of each equation.
RateState steady_state(const LaserParams& p, double cw_power);

// Per-channel carrier bookkeeping over one trajectory, in carrier counts.
// injected = stimulated + se_cavity + se_other + nr + auger + stored_delta
// up to quadrature error (closure_residual, relative to injected).
struct EnergyLedger {
    double injected_carriers = 0;
    double stimulated_photons_emitted = 0;  // net; dips negative below transparency
    double se_cavity = 0;
    double se_other = 0;
    double nr_losses = 0;
    double auger_losses = 0;
    double stored_delta = 0;

    double closure_residual() const;
};

EnergyLedger energy_ledger(const Trajectory& traj, const LaserParams& p,
                           const PumpProfile& pump);

// FNV-1a over the raw parameter/pump/tolerance fields.
std::uint64_t config_hash(const LaserParams& p, const PumpProfile& pump,
                          double rel_tol);

}  // namespace nanolase

// dynamics.cpp - adaptive Rosenbrock integration, CW fixed points, and the
// carrier ledger
#include "nanolase/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <sstream>

#include "linalg.hpp"
#include "nanolase/errors.hpp"
#include "nanolase/util.hpp"

namespace nanolase {

namespace {

inline bool solve3(const double A[3][3], const double b[3], double x[3]) {
    return detail::solve_dense<3>(A, b, x);
}

// Kaps-Rentrop 4-stage Rosenbrock with Shampine's parameters (embedded
// third-order error estimate); three RHS evaluations per step.
constexpr double GAM = 0.5;
constexpr double A21 = 2.0, A31 = 48.0 / 25.0, A32 = 6.0 / 25.0;
constexpr double C21 = -8.0, C31 = 372.0 / 25.0, C32 = 12.0 / 5.0;
constexpr double C41 = -112.0 / 125.0, C42 = -54.0 / 125.0, C43 = -2.0 / 5.0;
constexpr double B1 = 19.0 / 9.0, B2 = 1.0 / 2.0, B3 = 25.0 / 108.0,
                 B4 = 125.0 / 108.0;
constexpr double E1 = 17.0 / 54.0, E2 = 7.0 / 36.0, E3 = 0.0, E4 = 125.0 / 108.0;
constexpr double C1X = 1.0 / 2.0, C2X = -3.0 / 2.0, C3X = 121.0 / 50.0,
                 C4X = 29.0 / 250.0;
constexpr double A2X = 1.0, A3X = 3.0 / 5.0;

// Absolute-error floor, relative to the larger of the running maximum and
// the characteristic density of each component. Values within the floor are
// numerically zero: they are flushed, and only excursions below -floor
// count as clamp events.
constexpr double kAtolRel = 1e-12;

struct RhsEval {
    const LaserParams* p;
    const PumpProfile* pump;
    IntegrateStats* stats;

    void operator()(double t, const double y[3], double f[3]) const {
        RateState s{t, y[0], y[1], y[2]};
        const Derivs d = rhs(s, t, *p, *pump);
        f[0] = d.dN_E;
        f[1] = d.dN_G;
        f[2] = d.dP;
        if (stats) ++stats->rhs_evals;
    }
};

std::string state_string(double t, const double y[3]) {
    std::ostringstream os;
    os << "t=" << t << " N_E=" << y[0] << " N_G=" << y[1] << " P=" << y[2];
    return os.str();
}

// magnitudes of the individual rhs terms; used as characteristic rates
void rhs_term_scales(const RateState& s, const LaserParams& p, double R_pump,
                     double scale[3]) {
    const double Gamma = p.confinement();
    const double g = gain(s.N_G, p);
    const double tau_p = p.tau_photon();
    const double se_rate = p.se_enhancement() / p.tau_sp;
    const double aN_E = std::fabs(s.N_E);
    const double aN_G = std::fabs(s.N_G);
    const double aP = std::fabs(s.P);
    scale[0] = R_pump + aN_E / p.tau_relax + aN_E / p.tau_nr_E;
    scale[1] = aN_E / p.tau_relax + aN_G * se_rate + aN_G / p.tau_nr_G +
               p.C_A * aN_G * aN_G * aN_G + std::fabs(p.v_g * g * s.P);
    scale[2] = std::fabs(Gamma * p.v_g * g * s.P) + aP / tau_p +
               Gamma * p.F_cav * p.beta_c * aN_G / p.tau_sp;
}

}  // namespace

std::uint64_t config_hash(const LaserParams& p, const PumpProfile& pump,
                          double rel_tol) {
    std::uint64_t h = fnv1a64("nanolase.config", 15);
    for (double v :
         {p.F_cav, p.eta, p.tau_relax, p.tau_sp, p.tau_nr_G, p.tau_nr_E, p.C_A,
          p.g0, p.N_tr, p.beta_c, p.Q, p.lambda_cav, p.lambda_pump, p.V_a,
          p.V_mode, p.v_g, p.kappa_out})
        h = hash_double(v, h);
    const auto kind = static_cast<std::uint64_t>(pump.kind);
    h = fnv1a64(&kind, sizeof kind, h);
    for (double v : {pump.power, pump.avg_power, pump.fwhm, pump.period,
                     pump.cw_power, pump.on_duration})
        h = hash_double(v, h);
    return hash_double(rel_tol, h);
}

Trajectory integrate(const LaserParams& p, const PumpProfile& pump, double t0,
                     double t1, const RateState& init, double rel_tol,
                     IntegrateStats* stats, const IntegrateOptions* opts) {
    p.validate();
    if (!(t1 > t0)) throw DomainError("integrate: t_span must satisfy t0 < t1");
    if (!(rel_tol >= 1e-12 && rel_tol <= 1e-3))
        throw DomainError("integrate: rel_tol must lie in [1e-12, 1e-3]");
    if (!std::isfinite(init.N_E) || !std::isfinite(init.N_G) ||
        !std::isfinite(init.P))
        throw NumericError("integrate: non-finite initial state");
    if (init.N_E < 0 || init.N_G < 0 || init.P < 0)
        throw DomainError("integrate: initial state must be non-negative");

    IntegrateStats local_stats;
    IntegrateStats* st = stats ? stats : &local_stats;
    *st = IntegrateStats{};

    const double span = t1 - t0;
    const double h_max =
        (opts && opts->max_step > 0) ? opts->max_step : span / 300.0;
    const double h_min = span * 1e-16 + 1e-300;
    const double tau_p = p.tau_photon();

    RhsEval deriv{&p, &pump, st};
    const double pump_coeff = p.pump_rate_coeff();

    double t = t0;
    double y[3] = {init.N_E, init.N_G, init.P};
    double runmax[3] = {y[0], y[1], y[2]};
    const double char_scale[3] = {p.N_tr, p.N_tr, p.confinement() * p.N_tr};
    auto atol = [&](int i) {
        return kAtolRel * std::max(runmax[i], char_scale[i]);
    };

    Trajectory traj;
    traj.params_hash = config_hash(p, pump, rel_tol);
    traj.samples.reserve(1024);
    traj.samples.push_back({t, y[0], y[1], y[2]});

    double h = (opts && opts->init_step > 0) ? opts->init_step
                                             : std::min(h_max, tau_p / 10.0);

    int consecutive_rejects = 0;
    while (t < t1 && (t1 - t) > span * 1e-15) {
        h = std::min({h, h_max, t1 - t, pump_max_step_hint(pump, t)});
        if (!(h > 0)) h = h_min;

        double f0[3];
        deriv(t, y, f0);
        double J[3][3];
        rhs_jacobian({t, y[0], y[1], y[2]}, p, J);
        const double dLdt = pump_power_slope(pump, t);
        const double dfdt[3] = {pump_coeff * dLdt, 0.0, 0.0};

        bool accepted = false;
        double y_new[3];
        double err = 0.0;
        while (!accepted) {
            // M = I/(gam h) - J
            double M[3][3];
            for (int r = 0; r < 3; ++r)
                for (int c = 0; c < 3; ++c)
                    M[r][c] = (r == c ? 1.0 / (GAM * h) : 0.0) - J[r][c];

            double g1[3], g2[3], g3[3], g4[3], rhs_v[3], yt[3], ft[3];
            bool ok = true;

            for (int i = 0; i < 3; ++i) rhs_v[i] = f0[i] + h * C1X * dfdt[i];
            ok = ok && solve3(M, rhs_v, g1);

            if (ok) {
                for (int i = 0; i < 3; ++i) yt[i] = y[i] + A21 * g1[i];
                deriv(t + A2X * h, yt, ft);
                for (int i = 0; i < 3; ++i)
                    rhs_v[i] = ft[i] + h * C2X * dfdt[i] + C21 * g1[i] / h;
                ok = solve3(M, rhs_v, g2);
            }
            if (ok) {
                for (int i = 0; i < 3; ++i)
                    yt[i] = y[i] + A31 * g1[i] + A32 * g2[i];
                deriv(t + A3X * h, yt, ft);
                for (int i = 0; i < 3; ++i)
                    rhs_v[i] = ft[i] + h * C3X * dfdt[i] +
                               (C31 * g1[i] + C32 * g2[i]) / h;
                ok = solve3(M, rhs_v, g3);
            }
            if (ok) {
                // stage 4 reuses the stage-3 derivative
                for (int i = 0; i < 3; ++i)
                    rhs_v[i] = ft[i] + h * C4X * dfdt[i] +
                               (C41 * g1[i] + C42 * g2[i] + C43 * g3[i]) / h;
                ok = solve3(M, rhs_v, g4);
            }

            err = 0.0;
            if (ok) {
                for (int i = 0; i < 3; ++i) {
                    y_new[i] =
                        y[i] + B1 * g1[i] + B2 * g2[i] + B3 * g3[i] + B4 * g4[i];
                    const double e =
                        E1 * g1[i] + E2 * g2[i] + E3 * g3[i] + E4 * g4[i];
                    const double sc =
                        atol(i) + rel_tol * std::max(std::fabs(y[i]),
                                                     std::fabs(y_new[i]));
                    if (sc > 0) err = std::max(err, std::fabs(e) / sc);
                    if (!std::isfinite(y_new[i])) ok = false;
                }
            }

            if (ok && std::isfinite(err) && err <= 1.0) {
                accepted = true;
                break;
            }

            ++st->steps_rejected;
            if (++consecutive_rejects > 200)
                throw StiffnessError("integrate: step control stalled at " +
                                     state_string(t, y));
            const double shrink =
                (ok && std::isfinite(err) && err > 0)
                    ? std::clamp(0.9 * std::pow(err, -1.0 / 3.0), 0.1, 0.9)
                    : 0.1;
            h *= shrink;
            if (h < h_min)
                throw StiffnessError("integrate: step size underflow at " +
                                     state_string(t, y));
        }

        consecutive_rejects = 0;
        t += h;
        for (int i = 0; i < 3; ++i) {
            y[i] = y_new[i];
            if (std::fabs(y[i]) > runmax[i]) runmax[i] = std::fabs(y[i]);
            const double floor = atol(i);
            if (y[i] < -floor) {
                y[i] = 0.0;
                ++st->clamp_events;
            } else if (std::fabs(y[i]) <= floor) {
                y[i] = 0.0;  // within the absolute tolerance of zero
            }
        }
        traj.samples.push_back({t, y[0], y[1], y[2]});
        ++st->steps_accepted;

        const double grow =
            err > 0 ? std::clamp(0.9 * std::pow(err, -0.25), 0.2, 5.0) : 5.0;
        h *= grow;
    }

    return traj;
}

RateState steady_state(const LaserParams& p, double cw_power) {
    p.validate();
    if (!(cw_power >= 0) || !std::isfinite(cw_power))
        throw DomainError("steady_state: cw_power must be non-negative");
    if (cw_power == 0.0) return RateState{0, 0, 0, 0};  // unique quiescent root

    const PumpProfile pump = PumpProfile::cw(cw_power);
    const double R_pump = p.pump_rate_coeff() * cw_power;
    RhsEval deriv{&p, &pump, nullptr};

    auto scaled_residual = [&](const double y[3], double f[3]) {
        deriv(0.0, y, f);
        double scale[3];
        rhs_term_scales({0, y[0], y[1], y[2]}, p, R_pump, scale);
        double r = 0.0;
        for (int i = 0; i < 3; ++i)
            r = std::max(r, std::fabs(f[i]) / (scale[i] + 1e-300));
        return r;
    };
    const double tol = 1e-9;

    double horizon = 60e-9;
    for (int attempt = 0; attempt < 3; ++attempt, horizon *= 5.0) {
        // relaxation seed; above threshold this lands on the lasing branch
        Trajectory relax =
            integrate(p, pump, 0.0, horizon, RateState{}, 1e-9);
        const RateState& fin = relax.samples.back();
        double y[3] = {fin.N_E, fin.N_G, fin.P};

        double f[3];
        double res = scaled_residual(y, f);
        for (int iter = 0; iter < 60 && res > tol; ++iter) {
            double J[3][3];
            rhs_jacobian({0, y[0], y[1], y[2]}, p, J);
            double neg_f[3] = {-f[0], -f[1], -f[2]};
            double step[3];
            if (!solve3(J, neg_f, step)) {
                // regularize a near-singular Jacobian
                double mu = 0.0;
                for (int i = 0; i < 3; ++i) mu = std::max(mu, std::fabs(J[i][i]));
                mu = mu * 1e-12 + 1e-300;
                double Jd[3][3];
                std::memcpy(Jd, J, sizeof Jd);
                for (int i = 0; i < 3; ++i) Jd[i][i] -= mu;
                if (!solve3(Jd, neg_f, step)) break;
            }
            // damped update, projected onto the non-negative orthant
            bool improved = false;
            for (double alpha = 1.0; alpha > 1e-9; alpha *= 0.5) {
                double yt[3];
                for (int i = 0; i < 3; ++i)
                    yt[i] = std::max(y[i] + alpha * step[i], 0.0);
                double ft[3];
                const double rt = scaled_residual(yt, ft);
                if (rt < res) {
                    std::memcpy(y, yt, sizeof yt);
                    std::memcpy(f, ft, sizeof ft);
                    res = rt;
                    improved = true;
                    break;
                }
            }
            if (!improved) break;
        }
        if (res <= tol) return RateState{0, y[0], y[1], y[2]};
    }
    throw ConvergenceError("steady_state: no convergence at cw_power = " +
                           std::to_string(cw_power));
}

double EnergyLedger::closure_residual() const {
    const double out = stimulated_photons_emitted + se_cavity + se_other +
                       nr_losses + auger_losses + stored_delta;
    const double scale = std::max(std::fabs(injected_carriers), 1e-300);
    return std::fabs(injected_carriers - out) / scale;
}

EnergyLedger energy_ledger(const Trajectory& traj, const LaserParams& p,
                           const PumpProfile& pump) {
    p.validate();
    if (traj.samples.size() < 2)
        throw ResolutionError("energy_ledger: trajectory needs >= 2 samples");
    const double span = traj.t_end() - traj.t_begin();
    if (!(span > 0)) throw ResolutionError("energy_ledger: degenerate time span");
    for (std::size_t i = 1; i < traj.samples.size(); ++i) {
        const double gap = traj.samples[i].t - traj.samples[i - 1].t;
        if (gap > span / 20.0 + 1e-300)
            throw ResolutionError("energy_ledger: trajectory too sparse (gap " +
                                  std::to_string(gap) + " s)");
    }

    struct Channels {
        double inj = 0, stim = 0, se_cav = 0, se_oth = 0, nr = 0, auger = 0;
    };
    auto channels_at = [&](double t, double N_E, double N_G, double P) {
        Channels c;
        c.inj = p.pump_rate_coeff() * pump_power_at(pump, t);
        const double g = gain(N_G, p);
        c.stim = p.v_g * g * P;
        c.se_cav = p.F_cav * p.beta_c * N_G / p.tau_sp;
        c.se_oth = (1.0 - p.beta_c) * N_G / p.tau_sp;
        c.nr = N_E / p.tau_nr_E + N_G / p.tau_nr_G;
        c.auger = p.C_A * N_G * N_G * N_G;
        return c;
    };

    // cubic-Hermite midpoint per segment, Simpson in time
    Channels total;
    RateState prev = traj.samples.front();
    Derivs dprev = rhs(prev, prev.t, p, pump);
    for (std::size_t i = 1; i < traj.samples.size(); ++i) {
        const RateState& cur = traj.samples[i];
        const Derivs dcur = rhs(cur, cur.t, p, pump);
        const double h = cur.t - prev.t;
        auto hermite_mid = [&](double y0, double d0, double y1, double d1) {
            return 0.5 * (y0 + y1) + h * (d0 - d1) / 8.0;
        };
        const double tm = prev.t + 0.5 * h;
        const double Em = hermite_mid(prev.N_E, dprev.dN_E, cur.N_E, dcur.dN_E);
        const double Gm = hermite_mid(prev.N_G, dprev.dN_G, cur.N_G, dcur.dN_G);
        const double Pm = hermite_mid(prev.P, dprev.dP, cur.P, dcur.dP);

        const Channels c0 = channels_at(prev.t, prev.N_E, prev.N_G, prev.P);
        const Channels cm = channels_at(tm, Em, Gm, Pm);
        const Channels c1 = channels_at(cur.t, cur.N_E, cur.N_G, cur.P);
        const double w = h / 6.0;
        total.inj += w * (c0.inj + 4.0 * cm.inj + c1.inj);
        total.stim += w * (c0.stim + 4.0 * cm.stim + c1.stim);
        total.se_cav += w * (c0.se_cav + 4.0 * cm.se_cav + c1.se_cav);
        total.se_oth += w * (c0.se_oth + 4.0 * cm.se_oth + c1.se_oth);
        total.nr += w * (c0.nr + 4.0 * cm.nr + c1.nr);
        total.auger += w * (c0.auger + 4.0 * cm.auger + c1.auger);

        prev = cur;
        dprev = dcur;
    }

    const RateState& first = traj.samples.front();
    const RateState& last = traj.samples.back();

    EnergyLedger ledger;
    ledger.injected_carriers = total.inj * p.V_a;
    ledger.stimulated_photons_emitted = total.stim * p.V_a;
    ledger.se_cavity = total.se_cav * p.V_a;
    ledger.se_other = total.se_oth * p.V_a;
    ledger.nr_losses = total.nr * p.V_a;
    ledger.auger_losses = total.auger * p.V_a;
    ledger.stored_delta =
        ((last.N_E + last.N_G) - (first.N_E + first.N_G)) * p.V_a;
    return ledger;
}

}  // namespace nanolase

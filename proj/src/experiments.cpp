// experiments.cpp - LL sweeps, threshold fits, pulse metrics, and IRF
// convolution
#include "nanolase/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "linalg.hpp"
#include "nanolase/errors.hpp"
#include "nanolase/util.hpp"

namespace nanolase {

namespace {

std::string with_power(const char* what, double power) {
    std::ostringstream os;
    os << what << " at pump power " << power << " W";
    return os.str();
}

// re-raise integration/solver errors annotated with the offending power,
// preserving the category
template <class Fn>
auto annotated(double power, Fn&& fn) {
    try {
        return fn();
    } catch (const StiffnessError& e) {
        throw StiffnessError(with_power(e.what(), power));
    } catch (const ConvergenceError& e) {
        throw ConvergenceError(with_power(e.what(), power));
    } catch (const NumericError& e) {
        throw NumericError(with_power(e.what(), power));
    } catch (const DomainError& e) {
        throw DomainError(with_power(e.what(), power));
    }
}

// time average of P over the trajectory span (cubic-Hermite midpoints,
// Simpson in time)
double mean_photon_density(const Trajectory& traj, const LaserParams& p,
                           const PumpProfile& pump) {
    double acc = 0.0;
    RateState prev = traj.samples.front();
    Derivs dprev = rhs(prev, prev.t, p, pump);
    for (std::size_t i = 1; i < traj.samples.size(); ++i) {
        const RateState& cur = traj.samples[i];
        const Derivs dcur = rhs(cur, cur.t, p, pump);
        const double h = cur.t - prev.t;
        const double Pm = 0.5 * (prev.P + cur.P) + h * (dprev.dP - dcur.dP) / 8.0;
        acc += h / 6.0 * (prev.P + 4.0 * Pm + cur.P);
        prev = cur;
        dprev = dcur;
    }
    return acc / (traj.t_end() - traj.t_begin());
}

void check_powers(const std::vector<double>& powers) {
    if (powers.empty()) throw DomainError("LL sweep: empty power list");
    for (std::size_t i = 0; i < powers.size(); ++i) {
        if (!(powers[i] >= 0) || !std::isfinite(powers[i]))
            throw DomainError("LL sweep: powers must be non-negative and finite");
        if (i > 0 && !(powers[i] > powers[i - 1]))
            throw DomainError("LL sweep: powers must be strictly increasing");
    }
}

struct SegmentFit {
    double a = 0, b = 0, c = 0;  // y = a + b min(x,xb) + c max(x-xb,0)
    double sse = std::numeric_limits<double>::infinity();
};

SegmentFit fit_two_segments(const LLCurve& ll, double xb) {
    const std::size_t n = ll.points.size();
    auto col = [&](std::size_t i, int j) -> double {
        const double x = ll.points[i].pump_in;
        switch (j) {
            case 0: return 1.0;
            case 1: return std::min(x, xb);
            default: return std::max(x - xb, 0.0);
        }
    };
    auto solve_normal = [&](int ncols, double coef[3]) {
        double A[3][3] = {};
        double rhs_v[3] = {};
        for (std::size_t i = 0; i < n; ++i) {
            const double y = ll.points[i].light_out;
            for (int r = 0; r < ncols; ++r) {
                rhs_v[r] += col(i, r) * y;
                for (int c = 0; c < ncols; ++c) A[r][c] += col(i, r) * col(i, c);
            }
        }
        if (ncols == 2) {
            // pad to a well-posed 3x3 for the shared solver
            A[2][2] = 1.0;
            rhs_v[2] = 0.0;
        }
        return detail::solve_dense<3>(A, rhs_v, coef);
    };

    SegmentFit fit;
    double coef[3];
    if (!solve_normal(3, coef)) return fit;
    if (coef[1] < 0.0) {
        // negative floor slope: refit with the below-threshold branch flat
        double A[3][3] = {};
        double rhs_v[3] = {};
        for (std::size_t i = 0; i < n; ++i) {
            const double y = ll.points[i].light_out;
            const double u = std::max(ll.points[i].pump_in - xb, 0.0);
            A[0][0] += 1.0;
            A[0][1] += u;
            A[1][0] += u;
            A[1][1] += u * u;
            rhs_v[0] += y;
            rhs_v[1] += u * y;
        }
        A[2][2] = 1.0;
        double c2[3];
        if (!detail::solve_dense<3>(A, rhs_v, c2)) return fit;
        coef[0] = c2[0];
        coef[1] = 0.0;
        coef[2] = c2[1];
    }
    fit.a = coef[0];
    fit.b = coef[1];
    fit.c = coef[2];
    fit.sse = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = ll.points[i].pump_in;
        const double yhat =
            fit.a + fit.b * std::min(x, xb) + fit.c * std::max(x - xb, 0.0);
        const double r = ll.points[i].light_out - yhat;
        fit.sse += r * r;
    }
    return fit;
}

// linear-interpolation crossing search; returns NaN when no crossing exists
double first_upward_crossing(const std::vector<RateState>& s, double level) {
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
        if (s[i].P < level && s[i + 1].P >= level) {
            const double f = (level - s[i].P) / (s[i + 1].P - s[i].P);
            return s[i].t + f * (s[i + 1].t - s[i].t);
        }
    }
    return std::numeric_limits<double>::quiet_NaN();
}

double last_downward_crossing(const std::vector<RateState>& s, double level) {
    for (std::size_t i = s.size() - 1; i > 0; --i) {
        if (s[i].P < level && s[i - 1].P >= level) {
            const double f = (level - s[i - 1].P) / (s[i].P - s[i - 1].P);
            return s[i - 1].t + f * (s[i].t - s[i - 1].t);
        }
    }
    return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

LLCurve ll_curve_pulsed(const LaserParams& p, const PumpProfile& pulse_template,
                        const std::vector<double>& powers, double rel_tol) {
    p.validate();
    if (pulse_template.kind != PumpProfile::Kind::gaussian_train)
        throw DomainError("ll_curve_pulsed: pulse_template must be a Gaussian train");
    check_powers(powers);

    LLCurve ll;
    ll.regime = LLRegime::pulsed_averaged;
    ll.points.resize(powers.size());
    const double T = pulse_template.period;
    const double fwhm = pulse_template.fwhm;

    parallel_for(powers.size(), [&](std::size_t i) {
        const double power = powers[i];
        if (power == 0.0) {
            ll.points[i] = {0.0, 0.0};
            return;
        }
        annotated(power, [&] {
            const PumpProfile pump = PumpProfile::gaussian_train(power, fwhm, T);
            const double t0 = -3.0 * fwhm;
            // one warm-up period, then the measured period
            Trajectory warm = integrate(p, pump, t0, T + t0, RateState{}, rel_tol);
            RateState init = warm.samples.back();
            Trajectory meas =
                integrate(p, pump, T + t0, 2.0 * T + t0, init, rel_tol);
            const double mean_P = mean_photon_density(meas, p, pump);
            ll.points[i] = {power, output_power(mean_P, p)};
            return 0;
        });
    });
    return ll;
}

LLCurve ll_curve_cw(const LaserParams& p, const std::vector<double>& powers) {
    p.validate();
    check_powers(powers);
    LLCurve ll;
    ll.regime = LLRegime::cw;
    ll.points.resize(powers.size());
    parallel_for(powers.size(), [&](std::size_t i) {
        annotated(powers[i], [&] {
            const RateState s = steady_state(p, powers[i]);
            ll.points[i] = {powers[i], output_power(s.P, p)};
            return 0;
        });
    });
    return ll;
}

ThresholdFit extract_threshold(const LLCurve& ll) {
    const std::size_t n = ll.points.size();
    if (n < 8)
        throw DomainError("extract_threshold: need >= 8 points spanning the kink");
    for (std::size_t i = 0; i < n; ++i) {
        const auto& pt = ll.points[i];
        if (!std::isfinite(pt.pump_in) || !std::isfinite(pt.light_out) ||
            pt.light_out < 0)
            throw DomainError("extract_threshold: invalid LL point");
        if (i > 0 && !(pt.pump_in > ll.points[i - 1].pump_in))
            throw DomainError("extract_threshold: pump powers must be strictly increasing");
    }

    // candidate breakpoints: interior samples with >= 2 points on each side
    std::size_t best_k = 1;
    double best_sse = std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k + 2 < n; ++k) {
        const SegmentFit f = fit_two_segments(ll, ll.points[k].pump_in);
        if (f.sse < best_sse) {
            best_sse = f.sse;
            best_k = k;
        }
    }

    // golden-section refinement of the breakpoint within the neighbouring
    // samples
    const double lo_lim = ll.points[1].pump_in;
    const double hi_lim = ll.points[n - 3].pump_in;
    double lo = std::max(ll.points[best_k - 1].pump_in, lo_lim);
    double hi = std::min(ll.points[best_k + 1].pump_in, hi_lim);
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - invphi * (hi - lo);
    double x2 = lo + invphi * (hi - lo);
    double f1 = fit_two_segments(ll, x1).sse;
    double f2 = fit_two_segments(ll, x2).sse;
    const double span = ll.points[n - 1].pump_in - ll.points[0].pump_in;
    while (hi - lo > 1e-12 * span) {
        if (f1 <= f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - invphi * (hi - lo);
            f1 = fit_two_segments(ll, x1).sse;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + invphi * (hi - lo);
            f2 = fit_two_segments(ll, x2).sse;
        }
    }
    const double xb = 0.5 * (lo + hi);
    const SegmentFit fit = fit_two_segments(ll, xb);

    if (!(fit.c > 0))
        throw NoThresholdError("extract_threshold: no rising above-threshold branch");
    const double ratio = fit.b > 0 ? fit.c / fit.b
                                   : std::numeric_limits<double>::infinity();
    if (ratio < 1.5)
        throw NoThresholdError("extract_threshold: slope ratio " +
                               std::to_string(ratio) + " < 1.5");

    double y_rms = 0.0;
    for (const auto& pt : ll.points) y_rms += pt.light_out * pt.light_out;
    y_rms = std::sqrt(y_rms / static_cast<double>(n));

    ThresholdFit out;
    out.threshold = xb;
    out.slope_below = fit.b;
    out.slope_above = fit.c;
    out.residual =
        y_rms > 0 ? std::sqrt(fit.sse / static_cast<double>(n)) / y_rms : 0.0;
    return out;
}

Trajectory resample_uniform(const Trajectory& traj, double dt) {
    if (traj.samples.size() < 2)
        throw DomainError("resample_uniform: need >= 2 samples");
    if (!(dt > 0)) throw DomainError("resample_uniform: dt must be positive");
    const double t0 = traj.t_begin();
    const double span = traj.t_end() - t0;
    const std::size_t n = static_cast<std::size_t>(std::floor(span / dt)) + 1;
    if (n > 20'000'000)
        throw ResolutionError("resample_uniform: grid would exceed 2e7 samples");

    Trajectory out;
    out.params_hash = traj.params_hash;
    out.samples.resize(n);
    std::size_t seg = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = t0 + static_cast<double>(i) * dt;
        while (seg + 2 < traj.samples.size() && traj.samples[seg + 1].t < t) ++seg;
        const RateState& a = traj.samples[seg];
        const RateState& b = traj.samples[seg + 1];
        const double f = std::clamp((t - a.t) / (b.t - a.t), 0.0, 1.0);
        out.samples[i] = {t, a.N_E + f * (b.N_E - a.N_E),
                          a.N_G + f * (b.N_G - a.N_G), a.P + f * (b.P - a.P)};
    }
    return out;
}

Trajectory convolve_irf(const Trajectory& traj, double irf_fwhm,
                        double resample_dt) {
    if (!(irf_fwhm > 0) || !std::isfinite(irf_fwhm))
        throw DomainError("convolve_irf: irf_fwhm must be positive");
    if (traj.samples.size() < 2)
        throw DomainError("convolve_irf: need >= 2 samples");
    const double span = traj.t_end() - traj.t_begin();
    if (!(span >= 3.0 * irf_fwhm))
        throw DomainError("convolve_irf: trajectory shorter than 3x irf_fwhm");

    double dt = resample_dt;
    if (!(dt > 0)) {
        double min_gap = span;
        for (std::size_t i = 1; i < traj.samples.size(); ++i)
            min_gap = std::min(min_gap, traj.samples[i].t - traj.samples[i - 1].t);
        dt = std::min(irf_fwhm / 20.0, std::max(min_gap, irf_fwhm / 2000.0));
    }

    Trajectory out = resample_uniform(traj, dt);
    const std::size_t n = out.samples.size();
    std::vector<double> conv(n, 0.0);

    // The signal is piecewise linear between input samples; its convolution
    // with the Gaussian kernel has a closed form per segment, so the result
    // is exact up to the 8-sigma support cutoff (unit kernel area by
    // construction).
    const double sigma = irf_fwhm / (2.0 * std::sqrt(2.0 * std::numbers::ln2));
    const double support = 8.0 * sigma;
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    const double t_out0 = out.samples.front().t;
    auto cdf = [&](double u) { return 0.5 * std::erfc(-u / sigma * inv_sqrt2); };
    auto pdf = [&](double u) {
        return std::exp(-u * u / (2.0 * sigma * sigma)) /
               (sigma * std::sqrt(2.0 * std::numbers::pi));
    };

    for (std::size_t s = 0; s + 1 < traj.samples.size(); ++s) {
        const RateState& a = traj.samples[s];
        const RateState& b = traj.samples[s + 1];
        const double len = b.t - a.t;
        if (!(len > 0)) continue;
        const double m = (b.P - a.P) / len;
        if (a.P == 0.0 && b.P == 0.0) continue;
        const long i_lo = std::max<long>(
            0, static_cast<long>(std::ceil((a.t - support - t_out0) / dt)));
        const long i_hi = std::min<long>(
            static_cast<long>(n) - 1,
            static_cast<long>(std::floor((b.t + support - t_out0) / dt)));
        for (long i = i_lo; i <= i_hi; ++i) {
            const double t = t_out0 + static_cast<double>(i) * dt;
            const double alpha = a.t - t;
            const double beta = b.t - t;
            const double c0 = a.P + m * (t - a.t);
            conv[static_cast<std::size_t>(i)] +=
                c0 * (cdf(beta) - cdf(alpha)) +
                m * sigma * sigma * (pdf(alpha) - pdf(beta));
        }
    }

    for (std::size_t i = 0; i < n; ++i) out.samples[i].P = conv[i];
    return out;
}

double measure_fwhm(const Trajectory& traj) {
    const auto& s = traj.samples;
    if (s.size() < 3) throw DomainError("measure_fwhm: need >= 3 samples");
    double peak = 0.0;
    for (const auto& st : s) peak = std::max(peak, st.P);
    if (!(peak > 0)) throw NoPulseError("measure_fwhm: signal has no positive peak");
    const double half = 0.5 * peak;
    const double t_up = first_upward_crossing(s, half);
    const double t_down = last_downward_crossing(s, half);
    if (std::isnan(t_up))
        throw UnboundedPulseError(
            "measure_fwhm: signal never falls below half maximum on the left");
    if (std::isnan(t_down))
        throw UnboundedPulseError(
            "measure_fwhm: signal never falls below half maximum on the right");
    return t_down - t_up;
}

PulseMetrics pulse_response(const LaserParams& p, const PumpProfile& pump,
                            std::optional<double> irf_fwhm, double rel_tol,
                            Trajectory* response) {
    p.validate();
    if (pump.kind != PumpProfile::Kind::gaussian_train)
        throw DomainError("pulse_response: pump must be a Gaussian train");
    if (!(pump.avg_power > 0))
        throw DomainError("pulse_response: pump power must be positive");

    const double T = pump.period;
    const double t0 = -3.0 * pump.fwhm;
    Trajectory warm = integrate(p, pump, t0, T + t0, RateState{}, rel_tol);
    Trajectory meas =
        integrate(p, pump, T + t0, 2.0 * T + t0, warm.samples.back(), rel_tol);

    double P_peak = 0.0;
    double N_G_peak = 0.0;
    for (const auto& st : meas.samples) {
        P_peak = std::max(P_peak, st.P);
        N_G_peak = std::max(N_G_peak, st.N_G);
    }
    // below-threshold reference: the quasi-static SE photon level at the
    // carrier peak
    const double se_level = p.confinement() * p.F_cav * p.beta_c * N_G_peak *
                            p.tau_photon() / p.tau_sp;
    if (!(P_peak > 0) || P_peak < 10.0 * se_level)
        throw NoPulseError("pulse_response: peak photon density below 10x the "
                           "spontaneous-emission level");

    Trajectory sig;
    if (irf_fwhm) {
        if (!(*irf_fwhm > 0))
            throw DomainError("pulse_response: irf_fwhm must be positive");
        const double dt = std::min(*irf_fwhm, pump.fwhm) / 20.0;
        sig = convolve_irf(meas, *irf_fwhm, dt);
    } else {
        sig = std::move(meas);
    }

    double peak = 0.0;
    double t_peak = sig.samples.front().t;
    for (const auto& st : sig.samples) {
        if (st.P > peak) {
            peak = st.P;
            t_peak = st.t;
        }
    }

    PulseMetrics metrics;
    metrics.fwhm = measure_fwhm(sig);
    const double t10 = first_upward_crossing(sig.samples, 0.1 * peak);
    const double t90 = first_upward_crossing(sig.samples, 0.9 * peak);
    const double t90f = last_downward_crossing(sig.samples, 0.9 * peak);
    const double t10f = last_downward_crossing(sig.samples, 0.1 * peak);
    metrics.rise_time_10_90 = (std::isnan(t10) || std::isnan(t90)) ? 0.0 : t90 - t10;
    metrics.fall_time_90_10 =
        (std::isnan(t90f) || std::isnan(t10f)) ? 0.0 : t10f - t90f;
    metrics.peak_delay = t_peak - T;  // measured pulse is centred at t = T
    if (response) *response = std::move(sig);
    return metrics;
}

double auger_fraction(const LaserParams& p, const RateState& state) {
    p.validate();
    if (!std::isfinite(state.N_G) || !std::isfinite(state.P) ||
        !std::isfinite(state.N_E))
        throw NumericError("auger_fraction: non-finite state");
    const double auger = p.C_A * state.N_G * state.N_G * state.N_G;
    const double se = state.N_G * p.se_enhancement() / p.tau_sp;
    const double nr = state.N_G / p.tau_nr_G;
    const double stim = p.v_g * gain(state.N_G, p) * state.P;
    const double total = se + nr + auger + std::max(stim, 0.0);
    if (!(total > 0))
        throw UndefinedFractionError("auger_fraction: total loss rate is zero");
    return auger / total;
}

}  // namespace nanolase

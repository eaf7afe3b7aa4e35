// fit.cpp - single-parameter estimation of the pump absorption efficiency
#include "nanolase/fit.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "nanolase/errors.hpp"

namespace nanolase {

namespace {

constexpr int kScanPoints = 20;

struct Objective {
    const LaserParams* base;
    const LLCurve* measured;
    const PumpProfile* tmpl;
    double rel_tol;
    std::vector<double> xs;
    mutable int evals = 0;

    LLCurve model_curve(double eta) const {
        LaserParams p = *base;
        p.eta = eta;
        ++evals;
        return measured->regime == LLRegime::pulsed_averaged
                   ? ll_curve_pulsed(p, *tmpl, xs, rel_tol)
                   : ll_curve_cw(p, xs);
    }

    // RMS log-domain misfit after removing the best common scale factor;
    // invariant under uniform rescaling of the measured outputs
    double misfit(const LLCurve& model) const {
        std::vector<double> r;
        r.reserve(xs.size());
        for (std::size_t i = 0; i < xs.size(); ++i) {
            const double y = measured->points[i].light_out;
            const double m = model.points[i].light_out;
            if (y > 0 && m > 0) r.push_back(std::log(y) - std::log(m));
        }
        if (r.size() < 4)
            throw DomainError("fit_eta: fewer than 4 usable (positive) points");
        double mean = 0.0;
        for (double v : r) mean += v;
        mean /= static_cast<double>(r.size());
        double acc = 0.0;
        for (double v : r) acc += (v - mean) * (v - mean);
        return std::sqrt(acc / static_cast<double>(r.size()));
    }

    double operator()(double eta) const { return misfit(model_curve(eta)); }
};

}  // namespace

FitResult fit_eta(const LaserParams& params_sans_eta, const LLCurve& measured,
                  const PumpProfile& pump_template,
                  std::pair<double, double> bracket, double rel_tol) {
    params_sans_eta.validate();
    if (measured.points.size() < 8)
        throw DomainError("fit_eta: measured curve needs >= 8 points");
    const double lo = bracket.first;
    const double hi = bracket.second;
    if (!(lo > 0) || !(hi <= 1.0) || !(lo < hi))
        throw DomainError("fit_eta: bracket must satisfy 0 < lo < hi <= 1");
    if (measured.regime == LLRegime::pulsed_averaged &&
        pump_template.kind != PumpProfile::Kind::gaussian_train)
        throw DomainError("fit_eta: pulsed regime needs a Gaussian-train template");

    Objective obj;
    obj.base = &params_sans_eta;
    obj.measured = &measured;
    obj.tmpl = &pump_template;
    obj.rel_tol = rel_tol;
    obj.xs.reserve(measured.points.size());
    for (const auto& pt : measured.points) obj.xs.push_back(pt.pump_in);

    // coarse scan over log eta: unimodality and lasing checks
    const double llo = std::log(lo);
    const double lhi = std::log(hi);
    double scan_eta[kScanPoints];
    double scan_val[kScanPoints];
    bool any_lasing = false;
    for (int k = 0; k < kScanPoints; ++k) {
        scan_eta[k] = std::exp(llo + (lhi - llo) * k / double(kScanPoints - 1));
        const LLCurve model = obj.model_curve(scan_eta[k]);
        scan_val[k] = obj.misfit(model);
        if (!any_lasing) {
            try {
                extract_threshold(model);
                any_lasing = true;
            } catch (const NoThresholdError&) {
            } catch (const DomainError&) {
            }
        }
    }
    if (!any_lasing)
        throw NoLasingError("fit_eta: model never lases anywhere in the bracket");

    int minima = 0;
    int best = 0;
    for (int k = 1; k + 1 < kScanPoints; ++k) {
        if (scan_val[k] < scan_val[k - 1] && scan_val[k] < scan_val[k + 1]) ++minima;
        if (scan_val[k] < scan_val[best]) best = k;
    }
    if (scan_val[kScanPoints - 1] < scan_val[best]) best = kScanPoints - 1;
    if (minima >= 2)
        throw AmbiguousFitError("fit_eta: objective has " +
                                std::to_string(minima) +
                                " interior local minima over the bracket");

    // golden section on log eta between the neighbours of the scan minimum,
    // down to 1% relative bracket width
    const double grid_step = (lhi - llo) / double(kScanPoints - 1);
    double a = std::max(llo, std::log(scan_eta[best]) - grid_step);
    double b = std::min(lhi, std::log(scan_eta[best]) + grid_step);
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    const double width_tol = std::log(1.01);
    double x1 = b - invphi * (b - a);
    double x2 = a + invphi * (b - a);
    double f1 = obj(std::exp(x1));
    double f2 = obj(std::exp(x2));
    while (b - a > width_tol) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - invphi * (b - a);
            f1 = obj(std::exp(x1));
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + invphi * (b - a);
            f2 = obj(std::exp(x2));
        }
    }

    FitResult out;
    out.eta_hat = std::exp(0.5 * (a + b));
    out.residual = obj(out.eta_hat);
    out.n_evals = obj.evals;
    out.bracket_lo = lo;
    out.bracket_hi = hi;
    return out;
}

}  // namespace nanolase

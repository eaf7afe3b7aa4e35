// fit.hpp - estimation of the pump absorption efficiency from measured
// LL data
#pragma once

#include <utility>

#include "nanolase/experiments.hpp"

namespace nanolase {

struct FitResult {
    double eta_hat = 0;
    double residual = 0;   // RMS log-domain misfit after the scale factor
    int n_evals = 0;       // model LL-curve evaluations
    double bracket_lo = 0;
    double bracket_hi = 0;
};

// Minimizes the RMS relative (log-domain) residual between the model LL
// curve and the measured one over eta, with a closed-form output-scale
// nuisance factor per evaluation (measured units are arbitrary). Search is
// golden-section on log(eta), terminated at 1% relative bracket width,
// after a 20-point unimodality scan.
FitResult fit_eta(const LaserParams& params_sans_eta, const LLCurve& measured,
                  const PumpProfile& pump_template,
                  std::pair<double, double> bracket, double rel_tol = 1e-7);

}  // namespace nanolase

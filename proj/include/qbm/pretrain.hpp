#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qbm/gibbs.hpp"
#include "qbm/targets.hpp"

namespace qbm {

// Clamp used before artanh / inverse sigmoid at pure-state marginals.
inline constexpr double kClampDelta = 1e-6;

struct PretrainResult {
    std::string method;
    Ansatz sub_ansatz;
    RVector chi;
    double achieved_entropy = 0.0;  // S(eta || rho_chi) in nats
    int iterations = 0;             // 0 for closed forms
    bool hit_iteration_cap = false;
    std::vector<double> entropy_trace;  // gl_fit: S after each step, starting at chi = 0
    std::vector<std::string> warnings;
};

// Closed-form mean-field fit theta_i = <sigma_i> artanh(r_i) / r_i.
// Throws ValidationError when a Bloch norm exceeds 1 + 1e-9.
PretrainResult mf_fit(const Target& target, double clamp = kClampDelta);

struct GaussianFermionicFit {
    FermionicQuadraticForm form;   // Theta = 1/2 W logit(Lambda) W^dag (ordering convention aware)
    WeightedPauliSum pauli;        // Jordan-Wigner image of the form
    double gamma_residual = 0.0;   // max |Gamma_model - Gamma_input|
};

// Closed-form Gaussian Fermionic fit from a correlation matrix. When a
// target is given the achieved entropy is evaluated against it; otherwise it
// is left NaN. Throws ValidationError for a spectrum outside [-1e-9, 1+1e-9].
PretrainResult gf_fit(const CorrelationMatrix& gamma, const Target* target = nullptr,
                      GaussianFermionicFit* details = nullptr, double clamp = kClampDelta);

// Convenience: fermionic_correlations(target) followed by gf_fit.
PretrainResult gf_fit(const Target& target, GaussianFermionicFit* details = nullptr);

struct GlFitOptions {
    std::optional<double> learning_rate;  // default 1 / m~
    double stop_tol = 0.01;               // on the infinity norm of the gradient
    int max_iters = 20000;
};

// Exact gradient descent over the sub-ansatz from chi = 0.
PretrainResult gl_fit(const Target& target, const Ansatz& ansatz, const GlFitOptions& options = {});

struct Embedding {
    Ansatz ansatz;
    RVector theta0;
    std::vector<std::string> warnings;
};

// Full ansatz = sub-ansatz followed by the extension terms that are not
// already present; theta0 = [chi, 0].
Embedding embed(const PretrainResult& pre, const std::vector<PauliTerm>& extension_terms);

}  // namespace qbm

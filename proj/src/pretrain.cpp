#include "qbm/pretrain.hpp"

#include <cmath>
#include <limits>
#include <set>

#include <Eigen/Eigenvalues>

#include "qbm/calculus.hpp"
#include "qbm/errors.hpp"

namespace qbm {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double entropy_if_known(const Target* target, const GibbsModel& model) {
    if (target == nullptr || !target->eta_entropy) return kNaN;
    return relative_entropy(*target, model);
}

}  // namespace

PretrainResult mf_fit(const Target& target, double clamp) {
    const int n = target.n;
    PretrainResult res;
    res.method = "MF";
    res.sub_ansatz = build_ansatz(AnsatzKind::mean_field, n);
    res.chi = RVector::Zero(static_cast<Eigen::Index>(res.sub_ansatz.size()));
    for (int q = 0; q < n; ++q) {
        const double bx = target.expectation(PauliTerm::single(n, q, 'X'));
        const double by = target.expectation(PauliTerm::single(n, q, 'Y'));
        const double bz = target.expectation(PauliTerm::single(n, q, 'Z'));
        const double r = std::sqrt(bx * bx + by * by + bz * bz);
        if (r > 1.0 + 1e-9) {
            throw ValidationError("inconsistent expectations: Bloch norm " + std::to_string(r) + " on qubit " +
                                  std::to_string(q));
        }
        if (r < 1e-300) continue;
        const double rc = std::min(r, 1.0 - clamp);
        if (rc < r) res.warnings.push_back("qubit " + std::to_string(q) + " Bloch norm clamped to 1 - delta");
        const double scale = std::atanh(rc) / r;
        res.chi(3 * q) = bx * scale;
        res.chi(3 * q + 1) = by * scale;
        res.chi(3 * q + 2) = bz * scale;
    }
    const auto model = gibbs_state(res.sub_ansatz, res.chi);
    res.achieved_entropy = entropy_if_known(&target, model);
    return res;
}

PretrainResult gf_fit(const CorrelationMatrix& corr, const Target* target, GaussianFermionicFit* details,
                      double clamp) {
    const int n = corr.n;
    check_qubit_count(n);
    const Matrix& gamma = corr.gamma;
    if (gamma.rows() != 2 * n || gamma.cols() != 2 * n) throw DimensionError("correlation matrix must be 2n x 2n");
    if ((gamma - gamma.adjoint()).cwiseAbs().maxCoeff() > 1e-10) {
        throw ValidationError("correlation matrix is not Hermitian");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> solver(gamma);
    const RVector lambda = solver.eigenvalues();
    if (lambda.minCoeff() < -1e-9 || lambda.maxCoeff() > 1.0 + 1e-9) {
        throw ValidationError("correlation spectrum outside [0, 1]");
    }
    PretrainResult res;
    res.method = "GF";
    RVector logit(lambda.size());
    for (Eigen::Index k = 0; k < lambda.size(); ++k) {
        const double l = std::clamp(lambda(k), clamp, 1.0 - clamp);
        logit(k) = std::log(l / (1.0 - l));
    }
    // exp(C^dag Theta C) has <C^dag_a C_b> = [sigmoid(2 Theta)]_ba, so the
    // inverse map carries a transpose: Theta = 1/2 conj(W logit(Lambda) W^dag).
    const Matrix& w = solver.eigenvectors();
    const Matrix h = 0.5 * (w * logit.cast<Complex>().asDiagonal() * w.adjoint());
    FermionicQuadraticForm form{n, h.conjugate()};
    form.theta_tilde = (0.5 * (form.theta_tilde + form.theta_tilde.adjoint())).eval();
    WeightedPauliSum pauli = jw_quadratic_to_pauli(form);

    res.sub_ansatz = gaussian_fermionic_ansatz(n);
    res.chi = RVector::Zero(static_cast<Eigen::Index>(res.sub_ansatz.size()));
    for (const auto& [term, weight] : pauli.terms) {
        const auto idx = res.sub_ansatz.index_of(term);
        if (!idx) throw ValidationError("Jordan-Wigner term " + term.letters() + " outside the Gaussian family");
        res.chi(static_cast<Eigen::Index>(*idx)) = weight;
    }
    const auto model = gibbs_state(res.sub_ansatz, res.chi);
    res.achieved_entropy = entropy_if_known(target, model);

    Target model_target;
    model_target.n = n;
    model_target.eta = model.rho;
    const double residual = (fermionic_correlations(model_target).gamma - gamma).cwiseAbs().maxCoeff();
    if (details != nullptr) *details = GaussianFermionicFit{std::move(form), std::move(pauli), residual};
    return res;
}

PretrainResult gf_fit(const Target& target, GaussianFermionicFit* details) {
    return gf_fit(fermionic_correlations(target), &target, details);
}

PretrainResult gl_fit(const Target& target, const Ansatz& ansatz, const GlFitOptions& options) {
    auto sub = std::make_shared<const Ansatz>(ansatz);
    const double m = static_cast<double>(ansatz.size());
    const double lr = options.learning_rate.value_or(1.0 / m);
    if (!(lr > 0.0)) throw ConfigError("learning rate must be positive");
    if (options.max_iters < 0) throw ConfigError("max_iters must be non-negative");
    const RVector target_exp = target.expectations_for(ansatz);
    const bool has_entropy = target.eta_entropy.has_value();

    PretrainResult res;
    res.method = "GL";
    res.sub_ansatz = ansatz;
    res.chi = RVector::Zero(static_cast<Eigen::Index>(ansatz.size()));
    for (;;) {
        const GibbsModel model = gibbs_state(sub, res.chi);
        const double s = has_entropy ? relative_entropy(*target.eta_entropy, target_exp, model) : kNaN;
        res.entropy_trace.push_back(s);
        res.achieved_entropy = s;
        const RVector g = gradient(model, target_exp);
        if (g.lpNorm<Eigen::Infinity>() <= options.stop_tol) break;
        if (res.iterations >= options.max_iters) {
            res.hit_iteration_cap = true;
            res.warnings.push_back("gl_fit stopped at the iteration cap before reaching stop_tol");
            break;
        }
        res.chi -= lr * g;
        ++res.iterations;
    }
    return res;
}

Embedding embed(const PretrainResult& pre, const std::vector<PauliTerm>& extension_terms) {
    Embedding e;
    std::vector<PauliTerm> terms = pre.sub_ansatz.terms;
    std::vector<std::string> labels = pre.sub_ansatz.labels;
    std::set<PauliTerm> present(terms.begin(), terms.end());
    for (const auto& t : extension_terms) {
        if (t.num_qubits() != pre.sub_ansatz.n) throw DimensionError("extension term on the wrong qubit count");
        if (t.is_identity()) throw ValidationError("identity is not linearly independent of the model");
        if (!present.insert(t).second) {
            e.warnings.push_back("extension term " + t.letters() + " already pre-trained; keeping its coefficient");
            continue;
        }
        terms.push_back(t);
        labels.push_back(t.letters());
    }
    e.ansatz = make_ansatz(pre.sub_ansatz.n, std::move(terms), std::move(labels));
    e.theta0 = RVector::Zero(static_cast<Eigen::Index>(e.ansatz.size()));
    e.theta0.head(pre.chi.size()) = pre.chi;
    return e;
}

}  // namespace qbm

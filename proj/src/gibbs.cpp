#include "qbm/gibbs.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "qbm/errors.hpp"

namespace qbm {

namespace {

constexpr double kEigenCutoff = 1e-14;

void fill_spectral(GibbsModel& model, const Matrix& h) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(h);
    if (solver.info() != Eigen::Success) throw NumericalAbort("Hermitian eigensolver failed");
    model.eigvals = solver.eigenvalues();
    model.eigvecs = solver.eigenvectors();
    const double shift = model.eigvals.maxCoeff();
    RVector e = (model.eigvals.array() - shift).exp();
    const double sum = e.sum();
    model.log_z = shift + std::log(sum);
    model.weights = e / sum;
    model.rho.noalias() = (model.eigvecs * model.weights.asDiagonal()) * model.eigvecs.adjoint();
}

int qubits_for_dimension(Eigen::Index dim) {
    int n = 0;
    while ((Eigen::Index{1} << n) < dim) ++n;
    if ((Eigen::Index{1} << n) != dim) throw DimensionError("matrix dimension is not a power of two");
    return n;
}

}  // namespace

int GibbsModel::num_qubits() const { return qubits_for_dimension(rho.rows()); }

RVector GibbsModel::expectations() const {
    if (!ansatz) throw ContractError("model has no ansatz");
    RVector out(static_cast<Eigen::Index>(ansatz->size()));
    for (std::size_t i = 0; i < ansatz->size(); ++i) {
        out(static_cast<Eigen::Index>(i)) = expectation(ansatz->terms[i]);
    }
    return out;
}

GibbsModel gibbs_state(std::shared_ptr<const Ansatz> ansatz, const RVector& theta, int cap) {
    if (!ansatz) throw ContractError("gibbs_state needs an ansatz");
    check_qubit_count(ansatz->n, cap);
    if (static_cast<std::size_t>(theta.size()) != ansatz->size()) {
        throw DimensionError("theta has length " + std::to_string(theta.size()) + ", ansatz has " +
                             std::to_string(ansatz->size()) + " terms");
    }
    if (!theta.allFinite()) throw ValidationError("theta contains non-finite entries");
    GibbsModel model;
    model.ansatz = std::move(ansatz);
    model.theta = theta;
    const Matrix h = pauli_sum_matrix(model.ansatz->n, model.ansatz->terms,
                                      std::span<const double>(theta.data(), static_cast<std::size_t>(theta.size())), cap);
    fill_spectral(model, h);
    return model;
}

GibbsModel gibbs_state(const Ansatz& ansatz, const RVector& theta, int cap) {
    return gibbs_state(std::make_shared<const Ansatz>(ansatz), theta, cap);
}

GibbsModel gibbs_from_hamiltonian(const Matrix& hamiltonian) {
    if (hamiltonian.rows() != hamiltonian.cols()) throw DimensionError("Hamiltonian must be square");
    qubits_for_dimension(hamiltonian.rows());
    if (!hamiltonian.allFinite()) throw ValidationError("Hamiltonian contains non-finite entries");
    GibbsModel model;
    fill_spectral(model, hamiltonian);
    return model;
}

Target Target::from_density(Matrix eta) {
    Target t;
    t.n = qubits_for_dimension(eta.rows());
    if (eta.rows() != eta.cols()) throw DimensionError("density matrix must be square");
    if ((eta - eta.adjoint()).cwiseAbs().maxCoeff() > 1e-10) throw ValidationError("density matrix is not Hermitian");
    if (std::abs(eta.trace().real() - 1.0) > 1e-10) throw ValidationError("density matrix trace is not 1");
    t.eta_entropy = entropy_term(eta);
    t.eta = std::move(eta);
    return t;
}

Target Target::from_statevector(CVector psi) {
    Target t;
    t.n = qubits_for_dimension(psi.size());
    if (std::abs(psi.squaredNorm() - 1.0) > 1e-10) throw ValidationError("statevector is not normalized");
    t.eta_entropy = 0.0;
    t.psi = std::move(psi);
    return t;
}

Target Target::from_expectations(int n, std::map<std::string, double> values, std::optional<double> eta_entropy) {
    for (const auto& [letters, v] : values) {
        const PauliTerm p(letters);
        if (p.num_qubits() != n) throw DimensionError("expectation key \"" + letters + "\" is not on n qubits");
        if (!std::isfinite(v) || std::abs(v) > 1.0 + 1e-12) {
            throw ValidationError("Pauli expectation of " + letters + " outside [-1, 1]");
        }
    }
    Target t;
    t.n = n;
    t.expectations = std::move(values);
    t.eta_entropy = eta_entropy;
    return t;
}

double Target::expectation(const PauliTerm& term) const {
    if (term.num_qubits() != n) throw DimensionError("term \"" + term.letters() + "\" is not on the target's qubits");
    if (const auto it = expectations.find(term.letters()); it != expectations.end()) return it->second;
    if (psi) return pauli_expectation(*psi, term);
    if (eta) return pauli_expectation(*eta, term);
    throw ContractError("target has no expectation for " + term.letters());
}

RVector Target::expectations_for(const Ansatz& ansatz) const {
    RVector out(static_cast<Eigen::Index>(ansatz.size()));
    for (std::size_t i = 0; i < ansatz.size(); ++i) out(static_cast<Eigen::Index>(i)) = expectation(ansatz.terms[i]);
    return out;
}

Target Target::with_expectations(const Ansatz& ansatz) const {
    Target t = *this;
    for (const auto& term : ansatz.terms) t.expectations[term.letters()] = expectation(term);
    return t;
}

Matrix Target::density() const {
    if (eta) return *eta;
    if (psi) return *psi * psi->adjoint();
    throw ContractError("target carries no density matrix");
}

double entropy_term(const Matrix& eta) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(eta, Eigen::EigenvaluesOnly);
    double acc = 0.0;
    for (Eigen::Index k = 0; k < solver.eigenvalues().size(); ++k) {
        const double l = solver.eigenvalues()(k);
        if (l > kEigenCutoff) acc += l * std::log(l);
    }
    return acc;
}

double relative_entropy(double eta_entropy, const RVector& target_expectations, const GibbsModel& model) {
    if (target_expectations.size() != model.theta.size()) {
        throw DimensionError("target expectation vector does not match theta");
    }
    return eta_entropy - model.theta.dot(target_expectations) + model.log_z;
}

double relative_entropy(const Target& target, const GibbsModel& model) {
    if (!target.eta_entropy) throw ContractError("relative entropy needs Tr[eta log eta] of the target");
    if (!model.ansatz) throw ContractError("relative entropy needs a model with an ansatz");
    return relative_entropy(*target.eta_entropy, target.expectations_for(*model.ansatz), model);
}

double maximally_mixed_entropy(const Target& target) {
    if (!target.eta_entropy) throw ContractError("target entropy unknown");
    return target.n * std::numbers::ln2 + *target.eta_entropy;
}

double trace_distance(const Matrix& rho, const Matrix& sigma) {
    if (rho.rows() != sigma.rows() || rho.cols() != sigma.cols()) {
        throw DimensionError("trace distance of differently sized matrices");
    }
    const Matrix diff = rho - sigma;
    Eigen::SelfAdjointEigenSolver<Matrix> solver(diff, Eigen::EigenvaluesOnly);
    return 0.5 * solver.eigenvalues().cwiseAbs().sum();
}

}  // namespace qbm

#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>

#include "qbm/operators.hpp"

namespace qbm {

struct Dataset;

// rho_theta = exp(H_theta) / Z, with H_theta = sum_i theta_i H_i.
// Immutable after construction.
struct GibbsModel {
    std::shared_ptr<const Ansatz> ansatz;  // null for models built from a raw Hamiltonian
    RVector theta;
    RVector eigvals;  // spectrum of H_theta, ascending
    Matrix eigvecs;   // columns are eigenvectors
    double log_z = 0.0;
    RVector weights;  // softmax(eigvals) = spectrum of rho
    Matrix rho;

    int num_qubits() const;
    double expectation(const PauliTerm& term) const { return pauli_expectation(rho, term); }
    // <H_i>_rho for every ansatz term, in ansatz order.
    RVector expectations() const;
};

// Throws ValidationError on non-finite theta and DimensionError on a length
// mismatch or when n exceeds `cap`.
GibbsModel gibbs_state(std::shared_ptr<const Ansatz> ansatz, const RVector& theta, int cap = kDefaultQubitCap);
GibbsModel gibbs_state(const Ansatz& ansatz, const RVector& theta, int cap = kDefaultQubitCap);

// Gibbs state of an explicit Hermitian matrix (ansatz left empty).
GibbsModel gibbs_from_hamiltonian(const Matrix& hamiltonian);

// Target information: expectation values, and at desk scale the exact state.
struct Target {
    int n = 0;
    std::map<std::string, double> expectations;  // keyed by Pauli letters
    std::optional<Matrix> eta;
    std::optional<CVector> psi;           // pure targets keep the statevector
    std::optional<double> eta_entropy;    // Tr[eta log eta] in nats (<= 0)
    std::shared_ptr<const Dataset> dataset;  // set by encode_dataset

    static Target from_density(Matrix eta);
    static Target from_statevector(CVector psi);
    static Target from_expectations(int n, std::map<std::string, double> values,
                                    std::optional<double> eta_entropy = std::nullopt);

    // Stored value, else computed from psi / eta; ContractError otherwise.
    double expectation(const PauliTerm& term) const;
    RVector expectations_for(const Ansatz& ansatz) const;
    // Copy with every ansatz expectation materialized in the map.
    Target with_expectations(const Ansatz& ansatz) const;

    bool has_state() const { return eta.has_value() || psi.has_value(); }
    Matrix density() const;  // eta, or |psi><psi|; ContractError when neither
};

// sum_j l_j ln l_j over the spectrum of a density matrix, eigenvalues below
// 1e-14 treated as exact zeros.
double entropy_term(const Matrix& eta);

// S(eta || rho_theta) = Tr[eta log eta] - sum_i theta_i <H_i>_eta + log Z.
double relative_entropy(const Target& target, const GibbsModel& model);

// Same value given the target-side expectation vector (ansatz order).
double relative_entropy(double eta_entropy, const RVector& target_expectations, const GibbsModel& model);

// S(eta || I / 2^n) = n ln 2 + Tr[eta log eta].
double maximally_mixed_entropy(const Target& target);

// 1/2 ||rho - sigma||_1.
double trace_distance(const Matrix& rho, const Matrix& sigma);

}  // namespace qbm

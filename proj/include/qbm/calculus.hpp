#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qbm/gibbs.hpp"

namespace qbm {

// dS/dtheta_i = <H_i>_rho - <H_i>_eta.
RVector gradient(const GibbsModel& model, const Target& target);
RVector gradient(const GibbsModel& model, const RVector& target_expectations);

struct HessianRecord {
    RVector theta;
    RMatrix hess;
    double min_eig = 0.0;
    double max_eig = 0.0;
};

// tanh(w/2) / (w/2), with its limit 1 for |w| < 1e-12.
double belief_propagation_kernel(double omega);

// Exact Hessian of S(eta || rho_theta) with respect to theta, evaluated in the
// eigenbasis of H_theta. Independent of the target.
HessianRecord hessian(const GibbsModel& model);

// Smoothness constant 2 m max_j ||H_j||_2^2 for Pauli ansaetze.
inline double smoothness_constant(std::size_t m) { return 2.0 * static_cast<double>(m); }

struct ScanRecord {
    std::string kind;
    int n = 0;
    double mu = 0.0;
    int instance = 0;
    double min_eig = 0.0;
    double max_eig = 0.0;
    std::size_t m = 0;
    RVector theta;
};

struct ScanSummary {
    std::string kind;
    int n = 0;
    double mu = 0.0;
    double median_min_eig = 0.0;
    double q25_min_eig = 0.0;
    double q75_min_eig = 0.0;
    double max_max_eig = 0.0;
};

struct ScanOptions {
    bool single_qubit_terms = false;  // the spectrum scan uses two-body couplings only
    bool periodic = false;            // open chain for gl_1d
};

// Ansatz used by the scan for a given kind and size.
Ansatz scan_ansatz(AnsatzKind kind, int n, const ScanOptions& options = {});

// Samples theta uniformly in [-mu, mu] for each of `instances` models per n
// and records the Hessian spectrum edges. Instance k of size n draws from its
// own stream seeded by (seed, n, k, mu), so results do not depend on order.
std::vector<ScanRecord> hessian_spectrum_scan(AnsatzKind kind, const std::vector<int>& n_list, double mu,
                                              int instances, std::uint64_t seed, const ScanOptions& options = {});

std::vector<ScanSummary> summarize_scan(const std::vector<ScanRecord>& records);

}  // namespace qbm

#include "qbm/calculus.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <random>
#include <tuple>

#include <Eigen/Eigenvalues>

#include "qbm/errors.hpp"

namespace qbm {

RVector gradient(const GibbsModel& model, const RVector& target_expectations) {
    if (!model.ansatz) throw ContractError("gradient needs a model with an ansatz");
    if (static_cast<std::size_t>(target_expectations.size()) != model.ansatz->size()) {
        throw ContractError("target expectations do not cover the ansatz");
    }
    return model.expectations() - target_expectations;
}

RVector gradient(const GibbsModel& model, const Target& target) {
    if (!model.ansatz) throw ContractError("gradient needs a model with an ansatz");
    return gradient(model, target.expectations_for(*model.ansatz));
}

double belief_propagation_kernel(double omega) {
    if (std::abs(omega) < 1e-12) return 1.0;
    const double half = 0.5 * omega;
    return std::tanh(half) / half;
}

HessianRecord hessian(const GibbsModel& model) {
    if (!model.ansatz) throw ContractError("hessian needs a model with an ansatz");
    const Ansatz& ansatz = *model.ansatz;
    const Eigen::Index d = model.rho.rows();
    const Eigen::Index m = static_cast<Eigen::Index>(ansatz.size());
    if (model.eigvecs.rows() != d || model.eigvals.size() != d) throw DimensionError("eigendecomposition missing");

    // K(a, b) = p_a f(l_b - l_a)
    RMatrix kernel(d, d);
    for (Eigen::Index a = 0; a < d; ++a) {
        for (Eigen::Index b = 0; b < d; ++b) {
            kernel(a, b) = model.weights(a) * belief_propagation_kernel(model.eigvals(b) - model.eigvals(a));
        }
    }

    // Column i of `lhs` holds vec(A_i), column j of `rhs` holds vec(K o A_j^T),
    // where A_i = V^dag H_i V. Hess_ij = Re sum_ab (A_i)_ab K_ab (A_j)_ba.
    Matrix lhs(d * d, m);
    Matrix rhs(d * d, m);
    RVector mean(m);
    Matrix pv(d, d);
    for (Eigen::Index i = 0; i < m; ++i) {
        const PauliTerm& p = ansatz.terms[static_cast<std::size_t>(i)];
        const std::uint64_t f = p.flip_mask();
        for (Eigen::Index x = 0; x < d; ++x) {
            pv.row(static_cast<Eigen::Index>(static_cast<std::uint64_t>(x) ^ f)) =
                p.phase(static_cast<std::uint64_t>(x)) * model.eigvecs.row(x);
        }
        Matrix a = model.eigvecs.adjoint() * pv;
        mean(i) = (a.diagonal().real().array() * model.weights.array()).sum();
        Eigen::Map<Matrix>(lhs.col(i).data(), d, d) = a;
        Eigen::Map<Matrix>(rhs.col(i).data(), d, d) = kernel.cast<Complex>().cwiseProduct(a.transpose());
    }

    HessianRecord rec;
    rec.theta = model.theta;
    rec.hess = (lhs.transpose() * rhs).real() - mean * mean.transpose();
    rec.hess = (0.5 * (rec.hess + rec.hess.transpose())).eval();
    Eigen::SelfAdjointEigenSolver<RMatrix> solver(rec.hess, Eigen::EigenvaluesOnly);
    rec.min_eig = solver.eigenvalues().minCoeff();
    rec.max_eig = solver.eigenvalues().maxCoeff();
    return rec;
}

Ansatz scan_ansatz(AnsatzKind kind, int n, const ScanOptions& options) {
    AnsatzOptions ao;
    ao.single_qubit_terms = options.single_qubit_terms;
    if (kind == AnsatzKind::gl_1d) ao.geometry = Geometry{1, n, false, options.periodic};
    return build_ansatz(kind, n, ao);
}

std::vector<ScanRecord> hessian_spectrum_scan(AnsatzKind kind, const std::vector<int>& n_list, double mu,
                                              int instances, std::uint64_t seed, const ScanOptions& options) {
    if (mu < 0.0 || !std::isfinite(mu)) throw ConfigError("scale mu must be finite and non-negative");
    if (instances < 1) throw ConfigError("scan needs at least one instance");
    std::vector<ScanRecord> out;
    const auto mu_bits = std::bit_cast<std::uint64_t>(mu);
    for (int n : n_list) {
        check_qubit_count(n);
        auto ansatz = std::make_shared<const Ansatz>(scan_ansatz(kind, n, options));
        for (int k = 0; k < instances; ++k) {
            std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                              static_cast<std::uint32_t>(n), static_cast<std::uint32_t>(k),
                              static_cast<std::uint32_t>(mu_bits), static_cast<std::uint32_t>(mu_bits >> 32)};
            std::mt19937_64 rng(seq);
            std::uniform_real_distribution<double> dist(-mu, mu);
            RVector theta(static_cast<Eigen::Index>(ansatz->size()));
            for (Eigen::Index i = 0; i < theta.size(); ++i) theta(i) = dist(rng);
            const HessianRecord h = hessian(gibbs_state(ansatz, theta));
            out.push_back({to_string(kind), n, mu, k, h.min_eig, h.max_eig, ansatz->size(), theta});
        }
    }
    return out;
}

namespace {

double quantile(std::vector<double> v, double q) {
    std::sort(v.begin(), v.end());
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = static_cast<std::size_t>(std::ceil(pos));
    return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

}  // namespace

std::vector<ScanSummary> summarize_scan(const std::vector<ScanRecord>& records) {
    std::map<std::tuple<std::string, int, double>, std::vector<const ScanRecord*>> groups;
    std::vector<std::tuple<std::string, int, double>> order;
    for (const auto& r : records) {
        auto key = std::make_tuple(r.kind, r.n, r.mu);
        auto& g = groups[key];
        if (g.empty()) order.push_back(key);
        g.push_back(&r);
    }
    std::vector<ScanSummary> out;
    for (const auto& key : order) {
        const auto& g = groups[key];
        std::vector<double> mins;
        double max_max = -INFINITY;
        for (const auto* r : g) {
            mins.push_back(r->min_eig);
            max_max = std::max(max_max, r->max_eig);
        }
        out.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), quantile(mins, 0.5),
                       quantile(mins, 0.25), quantile(mins, 0.75), max_max});
    }
    return out;
}

}  // namespace qbm

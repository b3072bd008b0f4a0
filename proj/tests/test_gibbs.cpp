#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "qbm/calculus.hpp"
#include "qbm/errors.hpp"
#include "qbm/gibbs.hpp"
#include "qbm/pretrain.hpp"
#include "qbm/targets.hpp"

using namespace qbm;

namespace {

RVector random_theta(std::size_t m, double scale, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-scale, scale);
    RVector t(static_cast<Eigen::Index>(m));
    for (auto& v : t) v = u(rng);
    return t;
}

Matrix oracle_hamiltonian(const Ansatz& a, const RVector& theta) {
    const int d = 1 << a.n;
    Matrix h = Matrix::Zero(d, d);
    for (std::size_t i = 0; i < a.size(); ++i) h += theta(static_cast<Eigen::Index>(i)) * oracle::pauli(a.terms[i].letters());
    return h;
}

// Newton iteration on the convex objective; returns the maximum-entropy optimum.
RVector newton_optimum(const std::shared_ptr<const Ansatz>& a, const Target& target) {
    const RVector te = target.expectations_for(*a);
    RVector theta = RVector::Zero(static_cast<Eigen::Index>(a->size()));
    for (int it = 0; it < 100; ++it) {
        const GibbsModel m = gibbs_state(a, theta);
        const RVector g = gradient(m, te);
        if (g.lpNorm<Eigen::Infinity>() <= 1e-12) break;
        const RMatrix h = hessian(m).hess;
        RVector step = h.ldlt().solve(g);
        double t = 1.0;
        const double s0 = relative_entropy(*target.eta_entropy, te, m);
        while (t > 1e-8 && relative_entropy(*target.eta_entropy, te, gibbs_state(a, theta - t * step)) > s0 + 1e-14) t *= 0.5;
        theta -= t * step;
    }
    return theta;
}

}  // namespace

TEST_CASE("zero parameters give the maximally mixed state") {
    for (int n = 1; n <= 4; ++n) {
        const auto a = build_ansatz(AnsatzKind::fully_connected, n);
        const auto m = gibbs_state(a, RVector::Zero(static_cast<Eigen::Index>(a.size())));
        const int d = 1 << n;
        CHECK((m.rho - Matrix::Identity(d, d) / d).norm() < 1e-14);
        CHECK(m.log_z == doctest::Approx(n * std::log(2.0)));
    }
}

TEST_CASE("single-qubit field values") {
    const auto a = make_ansatz(1, {PauliTerm("Z")});
    CHECK(gibbs_state(a, RVector::Constant(1, 2.64)).expectation(PauliTerm("Z")) == doctest::Approx(0.99).epsilon(0.005));
    CHECK(std::abs(gibbs_state(a, RVector::Constant(1, 3.8)).expectation(PauliTerm("Z")) - 0.999) <= 0.0005);
    CHECK(gibbs_state(a, RVector::Constant(1, 0.7)).expectation(PauliTerm("Z")) == doctest::Approx(std::tanh(0.7)));
}

TEST_CASE("gibbs state agrees with the matrix exponential oracle") {
    std::mt19937_64 rng(17);
    for (int rep = 0; rep < 10; ++rep) {
        const int n = 1 + rep % 3;
        const auto a = build_ansatz(AnsatzKind::fully_connected, n);
        const RVector theta = random_theta(a.size(), 1.5, rng);
        const auto m = gibbs_state(a, theta);
        const Matrix h = oracle_hamiltonian(a, theta);
        const Matrix ref = oracle::gibbs(h);
        CHECK((m.rho - ref).norm() < 1e-10);
        CHECK(m.log_z == doctest::Approx(std::log(h.exp().trace().real())).epsilon(1e-12));
        CHECK(std::abs(m.rho.trace().real() - 1.0) < 1e-10);
        const Eigen::SelfAdjointEigenSolver<Matrix> es(m.rho);
        CHECK(es.eigenvalues().minCoeff() >= -1e-12);
        // log Z = logsumexp(eigvals), rho spectrum = softmax(eigvals).
        const double mx = m.eigvals.maxCoeff();
        const double lse = mx + std::log((m.eigvals.array() - mx).exp().sum());
        CHECK(m.log_z == doctest::Approx(lse).epsilon(1e-13));
        CHECK(((m.eigvals.array() - m.log_z).exp().matrix() - m.weights).norm() < 1e-13);
        const RVector ex = m.expectations();
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(ex(static_cast<Eigen::Index>(i)) ==
                  doctest::Approx((ref * oracle::pauli(a.terms[i].letters())).trace().real()).epsilon(1e-10));
        }
    }
}

TEST_CASE("large parameters stay finite") {
    const auto a = build_ansatz(AnsatzKind::mean_field, 3);
    const auto m = gibbs_state(a, RVector::Constant(static_cast<Eigen::Index>(a.size()), 400.0));
    CHECK(m.rho.allFinite());
    CHECK(std::isfinite(m.log_z));
    CHECK(std::abs(m.rho.trace().real() - 1.0) < 1e-10);
}

TEST_CASE("identity shift leaves the state unchanged") {
    std::mt19937_64 rng(4);
    for (int rep = 0; rep < 5; ++rep) {
        const Matrix h = oracle::random_hermitian(8, rng);
        const double c = 3.7 * (rep - 2);
        const auto m1 = gibbs_from_hamiltonian(h);
        const auto m2 = gibbs_from_hamiltonian(h + c * Matrix::Identity(8, 8));
        CHECK(m2.log_z == doctest::Approx(m1.log_z + c).epsilon(1e-12));
        CHECK((m1.rho - m2.rho).norm() < 1e-10);
        CHECK(m1.expectation(PauliTerm("XYZ")) == doctest::Approx(m2.expectation(PauliTerm("XYZ"))).epsilon(1e-10));
    }
}

TEST_CASE("gibbs_state input checks") {
    const auto a = build_ansatz(AnsatzKind::mean_field, 2);
    RVector bad = RVector::Zero(6);
    bad(2) = std::nan("");
    CHECK_THROWS_AS(gibbs_state(a, bad), ValidationError);
    CHECK_THROWS_AS(gibbs_state(a, RVector::Zero(5)), DimensionError);
    CHECK_THROWS_AS(gibbs_state(a, RVector::Zero(6), 1), DimensionError);
}

TEST_CASE("expectation examples") {
    Matrix zero = Matrix::Zero(4, 4);
    zero(0, 0) = 1.0;
    const Target t = Target::from_density(zero);
    CHECK(t.expectation(PauliTerm("ZI")) == doctest::Approx(1.0));
    CHECK(t.expectation(PauliTerm("ZZ")) == doctest::Approx(1.0));
    CHECK(t.expectation(PauliTerm("XI")) == doctest::Approx(0.0));

    // XXZ n = 4, Z on qubit 0, against a Kronecker/expm oracle.
    const XxzParams p;
    const int n = 4;
    Matrix h = Matrix::Zero(16, 16);
    for (int i = 0; i + 1 < n; ++i) {
        std::string xx(4, 'I'), yy(4, 'I'), zz(4, 'I');
        xx[i] = xx[i + 1] = 'X';
        yy[i] = yy[i + 1] = 'Y';
        zz[i] = zz[i + 1] = 'Z';
        h += p.J * (oracle::pauli(xx) + oracle::pauli(yy)) + p.Delta * oracle::pauli(zz);
    }
    for (int i = 0; i < n; ++i) {
        std::string z(4, 'I');
        z[i] = 'Z';
        h += p.h_z * oracle::pauli(z);
    }
    const Matrix eta = oracle::gibbs(h);
    const Target x = xxz_target(n);
    CHECK(x.expectation(PauliTerm("ZIII")) == doctest::Approx((eta * oracle::pauli("ZIII")).trace().real()).epsilon(1e-10));
    CHECK(x.expectation(PauliTerm("XXII")) == doctest::Approx((eta * oracle::pauli("XXII")).trace().real()).epsilon(1e-10));
}

TEST_CASE("target construction and validation") {
    std::mt19937_64 rng(9);
    const Matrix eta = oracle::random_density(4, rng);
    const Target t = Target::from_density(eta);
    REQUIRE(t.eta_entropy.has_value());
    CHECK(*t.eta_entropy <= 0.0);
    for (const char* s : {"XI", "YZ", "ZZ", "IY"}) {
        CHECK(t.expectation(PauliTerm(s)) == doctest::Approx((eta * oracle::pauli(s)).trace().real()).epsilon(1e-10));
    }
    Matrix not_herm = eta;
    not_herm(0, 1) += 0.1;
    CHECK_THROWS_AS(Target::from_density(not_herm), ValidationError);
    CHECK_THROWS_AS(Target::from_density(2.0 * eta), ValidationError);

    const CVector psi = oracle::random_state(4, rng);
    const Target pure = Target::from_statevector(psi);
    CHECK(*pure.eta_entropy == doctest::Approx(0.0));
    CHECK(pure.expectation(PauliTerm("XY")) ==
          doctest::Approx((psi.adjoint() * oracle::pauli("XY") * psi)(0, 0).real()).epsilon(1e-12));
    CHECK_THROWS_AS(Target::from_statevector(2.0 * psi), ValidationError);

    const Target ex = Target::from_expectations(2, {{"XI", 0.5}});
    CHECK(ex.expectation(PauliTerm("XI")) == 0.5);
    CHECK_THROWS_AS(ex.expectation(PauliTerm("ZI")), ContractError);
    CHECK_THROWS_AS(ex.density(), ContractError);
    CHECK_THROWS_AS(Target::from_expectations(2, {{"XI", 1.5}}), ValidationError);
    const auto a = make_ansatz(2, {PauliTerm("XI")});
    CHECK_THROWS_AS(relative_entropy(ex, gibbs_state(a, RVector::Zero(1))), ContractError);
}

TEST_CASE("relative entropy examples") {
    std::mt19937_64 rng(21);
    const auto a = build_ansatz(AnsatzKind::fully_connected, 2);
    const RVector theta = random_theta(a.size(), 1.0, rng);
    const auto model = gibbs_state(a, theta);
    CHECK(std::abs(relative_entropy(Target::from_density(model.rho), model)) < 1e-10);

    const CVector psi = oracle::random_state(8, rng);
    const auto a3 = build_ansatz(AnsatzKind::mean_field, 3);
    const auto mixed = gibbs_state(a3, RVector::Zero(9));
    CHECK(relative_entropy(Target::from_statevector(psi), mixed) == doctest::Approx(3.0 * std::log(2.0)));

    const Target xxz = xxz_target(4);
    const auto mf = mf_fit(xxz);
    const auto mf_model = gibbs_state(mf.sub_ansatz, mf.chi);
    CHECK(relative_entropy(xxz, mf_model) ==
          doctest::Approx(oracle::relative_entropy(*xxz.eta, mf_model.rho)).epsilon(1e-9));
    CHECK(maximally_mixed_entropy(xxz) == doctest::Approx(4 * std::log(2.0) + *xxz.eta_entropy));
}

TEST_CASE("relative entropy matches the matrix-log oracle and is non-negative") {
    std::mt19937_64 rng(33);
    for (int rep = 0; rep < 20; ++rep) {
        const int n = 1 + rep % 3;
        const auto a = build_ansatz(rep % 2 ? AnsatzKind::fully_connected : AnsatzKind::gl_1d, n);
        const Matrix eta = oracle::random_density(1 << n, rng);
        const auto model = gibbs_state(a, random_theta(a.size(), 1.0, rng));
        const double s = relative_entropy(Target::from_density(eta), model);
        CHECK(s >= -1e-10);
        CHECK(s == doctest::Approx(oracle::relative_entropy(eta, model.rho)).epsilon(1e-9));
    }
}

TEST_CASE("trace distance") {
    std::mt19937_64 rng(8);
    const Matrix r = oracle::random_density(4, rng), s = oracle::random_density(4, rng);
    CHECK(trace_distance(r, r) == doctest::Approx(0.0));
    Matrix p0 = Matrix::Zero(2, 2), p1 = Matrix::Zero(2, 2);
    p0(0, 0) = 1.0;
    p1(1, 1) = 1.0;
    CHECK(trace_distance(p0, p1) == doctest::Approx(1.0));
    CHECK(trace_distance(r, s) == doctest::Approx(0.5 * oracle::trace_norm(r - s)).epsilon(1e-12));
    CHECK(trace_distance(r, s) <= 1.0);
    CHECK_THROWS_AS(trace_distance(r, p0), DimensionError);
}

TEST_CASE("pinsker bound on random pairs") {
    std::mt19937_64 rng(55);
    for (int rep = 0; rep < 50; ++rep) {
        const int n = 1 + rep % 3;
        const auto a = build_ansatz(AnsatzKind::fully_connected, n);
        const Matrix eta = oracle::random_density(1 << n, rng);
        const auto model = gibbs_state(a, random_theta(a.size(), 2.0, rng));
        const double s = relative_entropy(Target::from_density(eta), model);
        const double l1 = oracle::trace_norm(eta - model.rho);
        CHECK(s >= 0.5 * l1 * l1 - 1e-12);
    }
}

TEST_CASE("collinearity and gap bound around the maximum-entropy optimum") {
    std::mt19937_64 rng(77);
    auto a = std::make_shared<const Ansatz>(build_ansatz(AnsatzKind::gl_1d, 3));
    const Target target = Target::from_density(oracle::random_density(8, rng));
    const RVector opt = newton_optimum(a, target);
    const auto m_opt = gibbs_state(a, opt);
    REQUIRE(gradient(m_opt, target).lpNorm<Eigen::Infinity>() <= 1e-9);
    const double s_opt = relative_entropy(target, m_opt);
    for (int rep = 0; rep < 10; ++rep) {
        const RVector theta = opt + random_theta(a->size(), 0.8, rng);
        const auto m = gibbs_state(a, theta);
        const double lhs = relative_entropy(target, m) - s_opt;
        CHECK(lhs == doctest::Approx(oracle::relative_entropy(m_opt.rho, m.rho)).epsilon(1e-6));
        const double eps = gradient(m, target).lpNorm<Eigen::Infinity>();
        CHECK(lhs <= 2.0 * eps * (theta - opt).lpNorm<1>() + 1e-12);
    }
}

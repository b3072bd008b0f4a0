#include <doctest.h>

#include <random>
#include <set>

#include "oracles.hpp"
#include "qbm/errors.hpp"
#include "qbm/operators.hpp"

using namespace qbm;

namespace {

std::string random_letters(int n, std::mt19937_64& rng) {
    static const char kLetters[] = "IXYZ";
    std::uniform_int_distribution<int> pick(0, 3);
    std::string s;
    for (int q = 0; q < n; ++q) s += kLetters[pick(rng)];
    return s;
}

Matrix random_form(int n, std::mt19937_64& rng) {
    // Particle-hole consistent: Theta = [[A, B], [-conj(B), -conj(A)]] with A
    // Hermitian and B antisymmetric.
    std::normal_distribution<double> g(0.0, 1.0);
    Matrix a = oracle::random_hermitian(n, rng);
    Matrix b(n, n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) b(r, c) = Complex(g(rng), g(rng));
    b = (0.5 * (b - b.transpose())).eval();
    Matrix t(2 * n, 2 * n);
    t << a, b, -b.conjugate(), -a.conjugate();
    return t;
}

Matrix quadratic_matrix(const Matrix& theta, int n) {
    const int d = 1 << n;
    std::vector<Matrix> cdag, c;
    for (int i = 0; i < n; ++i) {
        Matrix a = oracle::annihilation(n, i);
        cdag.push_back(a.adjoint());
        c.push_back(a);
    }
    auto op_dag = [&](int k) -> const Matrix& { return k < n ? cdag[k] : c[k - n]; };
    auto op = [&](int k) -> const Matrix& { return k < n ? c[k] : cdag[k - n]; };
    Matrix h = Matrix::Zero(d, d);
    for (int a = 0; a < 2 * n; ++a)
        for (int b = 0; b < 2 * n; ++b) h += theta(a, b) * op_dag(a) * op(b);
    return h;
}

Matrix weighted_sum(const WeightedPauliSum& s) {
    const int d = 1 << s.n;
    Matrix h = s.identity_shift * Matrix::Identity(d, d);
    for (const auto& [term, w] : s.terms) h += w * oracle::pauli(term.letters());
    return h;
}

}  // namespace

TEST_CASE("pauli term basics") {
    PauliTerm p("XIZY");
    CHECK(p.num_qubits() == 4);
    CHECK(p.weight() == 3);
    CHECK(p.letters() == "XIZY");
    CHECK(p.at(2) == 'Z');
    CHECK_FALSE(p.is_diagonal());
    CHECK(PauliTerm("IZZI").is_diagonal());
    CHECK(PauliTerm::identity(3).is_identity());
    CHECK(PauliTerm::single(3, 1, 'Y').letters() == "IYI");
    CHECK(PauliTerm::pair(4, 0, 3, 'X').letters() == "XIIX");
    CHECK_THROWS_AS(PauliTerm("XAZ"), ValidationError);
    CHECK_THROWS_AS(PauliTerm(""), ValidationError);
    CHECK_THROWS_AS(PauliTerm::pair(3, 1, 1, 'Z'), ValidationError);
}

TEST_CASE("pauli matrix examples") {
    Matrix z = pauli_matrix(PauliTerm("Z"));
    CHECK(z(0, 0) == Complex(1, 0));
    CHECK(z(1, 1) == Complex(-1, 0));
    CHECK(std::abs(z(0, 1)) == 0.0);

    Matrix xi = pauli_matrix(PauliTerm("XI"));
    CHECK(std::abs(xi.trace()) < 1e-15);
    CHECK((xi * xi - Matrix::Identity(4, 4)).norm() < 1e-15);
    CHECK((xi - oracle::kron(oracle::single('X'), oracle::single('I'))).norm() < 1e-15);

    Matrix a = oracle::pauli("ZZI"), b = oracle::pauli("IZZ");
    CHECK(std::abs((a * b).trace()) < 1e-12);
    CHECK(std::abs((pauli_matrix(PauliTerm("ZZI")) * pauli_matrix(PauliTerm("IZZ"))).trace()) < 1e-12);
}

TEST_CASE("pauli matrices match the Kronecker oracle and are Hermitian unitaries") {
    std::mt19937_64 rng(11);
    for (int n = 1; n <= 4; ++n) {
        for (int rep = 0; rep < 20; ++rep) {
            const auto s = random_letters(n, rng);
            const Matrix m = pauli_matrix(PauliTerm(s));
            const int d = 1 << n;
            CHECK((m - oracle::pauli(s)).norm() < 1e-14);
            CHECK((m - m.adjoint()).norm() < 1e-14);
            CHECK((m * m - Matrix::Identity(d, d)).norm() < 1e-14);
            const Eigen::SelfAdjointEigenSolver<Matrix> es(m);
            CHECK(es.eigenvalues().cwiseAbs().maxCoeff() == doctest::Approx(1.0));
            if (s != std::string(static_cast<std::size_t>(n), 'I')) CHECK(std::abs(m.trace()) < 1e-14);
        }
    }
}

TEST_CASE("multiply agrees with matrix products") {
    std::mt19937_64 rng(5);
    for (int rep = 0; rep < 50; ++rep) {
        const auto a = random_letters(3, rng), b = random_letters(3, rng);
        const auto [coef, prod] = multiply(PauliTerm(a), PauliTerm(b));
        CHECK((coef * oracle::pauli(prod.letters()) - oracle::pauli(a) * oracle::pauli(b)).norm() < 1e-14);
    }
}

TEST_CASE("expectations from density matrices and statevectors") {
    std::mt19937_64 rng(3);
    const Matrix rho = oracle::random_density(8, rng);
    const CVector psi = oracle::random_state(8, rng);
    for (int rep = 0; rep < 20; ++rep) {
        const auto s = random_letters(3, rng);
        const Matrix p = oracle::pauli(s);
        CHECK(pauli_expectation(rho, PauliTerm(s)) == doctest::Approx((rho * p).trace().real()).epsilon(1e-12));
        CHECK(pauli_expectation(psi, PauliTerm(s)) ==
              doctest::Approx((psi.adjoint() * p * psi)(0, 0).real()).epsilon(1e-12));
    }
    CHECK_THROWS_AS(pauli_expectation(rho, PauliTerm("XX")), DimensionError);
    Matrix mixed = Matrix::Identity(4, 4) / 4.0;
    CHECK(pauli_expectation(mixed, PauliTerm("XY")) == doctest::Approx(0.0));
}

TEST_CASE("pauli sum and qubit cap") {
    std::vector<PauliTerm> terms{PauliTerm("XZ"), PauliTerm("YI")};
    std::vector<double> w{0.3, -1.2};
    const Matrix h = pauli_sum_matrix(2, terms, w);
    CHECK((h - (0.3 * oracle::pauli("XZ") - 1.2 * oracle::pauli("YI"))).norm() < 1e-14);
    CHECK_THROWS_AS(pauli_matrix(PauliTerm(std::string(5, 'Z')), 4), DimensionError);
    CHECK_THROWS_AS(check_qubit_count(13), DimensionError);
    CHECK_NOTHROW(check_qubit_count(12));
}

TEST_CASE("ansatz catalog sizes") {
    CHECK(build_ansatz(AnsatzKind::mean_field, 8).size() == 24);
    CHECK(build_ansatz(AnsatzKind::fully_connected, 8).size() == 108);
    for (int n = 2; n <= 8; ++n) {
        CHECK(build_ansatz(AnsatzKind::fully_connected, n).size() == static_cast<std::size_t>(3 * n * (n + 1) / 2));
    }
    CHECK(build_ansatz(AnsatzKind::gl_1d, 4).size() == 24);
    AnsatzOptions open;
    open.geometry = Geometry{1, 4, false, false};
    CHECK(build_ansatz(AnsatzKind::gl_1d, 4, open).size() == 21);
    // 2x4 with the length-4 direction periodic: 8 horizontal + 4 vertical bonds.
    CHECK(build_ansatz(AnsatzKind::gl_2d, 8).size() == 24 + 3 * 12);
    const Geometry g = default_2d_geometry(8);
    CHECK(g.rows == 2);
    CHECK(g.cols == 4);
    CHECK(g.periodic_cols);
    CHECK_FALSE(g.periodic_rows);
    CHECK(lattice_edges(Geometry{2, 2, true, true}).size() == 4);
}

TEST_CASE("ansatz invariants") {
    for (auto kind : {AnsatzKind::mean_field, AnsatzKind::gl_1d, AnsatzKind::gl_2d, AnsatzKind::fully_connected}) {
        for (int n : {2, 3, 4}) {
            const Ansatz a = build_ansatz(kind, n);
            CHECK_NOTHROW(a.validate());
            CHECK(a.labels.size() == a.size());
            const Ansatz mf = build_ansatz(AnsatzKind::mean_field, n);
            for (std::size_t i = 0; i < mf.size(); ++i) CHECK(a.terms[i] == mf.terms[i]);
            const int d = 1 << n;
            for (std::size_t i = 0; i < a.size(); ++i) {
                const Matrix pi = oracle::pauli(a.terms[i].letters());
                for (std::size_t j = i; j < a.size(); ++j) {
                    const Complex tr = (pi * oracle::pauli(a.terms[j].letters())).trace();
                    CHECK(std::abs(tr - Complex(i == j ? d : 0, 0)) < 1e-12);
                }
            }
        }
    }
    CHECK_THROWS_AS(make_ansatz(2, {PauliTerm("XX"), PauliTerm("XX")}), ValidationError);
    CHECK_THROWS_AS(make_ansatz(2, {PauliTerm("II")}), ValidationError);
    CHECK_THROWS_AS(make_ansatz(2, {}), ValidationError);
    CHECK(make_ansatz(2, {PauliTerm("XZ")}).index_of(PauliTerm("XZ")) == std::optional<std::size_t>(0));
}

TEST_CASE("invalid geometry is a configuration error") {
    AnsatzOptions opts;
    opts.geometry = Geometry{3, 3, false, false};
    CHECK_THROWS_AS(build_ansatz(AnsatzKind::gl_2d, 8, opts), ConfigError);
    CHECK_THROWS_AS(ansatz_kind_from_string("ring"), ConfigError);
    CHECK(ansatz_kind_from_string(to_string(AnsatzKind::gl_2d)) == AnsatzKind::gl_2d);
}

TEST_CASE("jordan-wigner ladder matrices") {
    for (int n : {1, 2, 3}) {
        for (int i = 0; i < n; ++i) {
            CHECK((jw_annihilation(n, i) - oracle::annihilation(n, i)).norm() < 1e-15);
            CHECK((jw_creation(n, i) - oracle::annihilation(n, i).adjoint()).norm() < 1e-15);
        }
        // Canonical anticommutation relations.
        const int d = 1 << n;
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                const Matrix ci = jw_annihilation(n, i), cj = jw_annihilation(n, j);
                const Matrix acomm = ci * cj.adjoint() + cj.adjoint() * ci;
                CHECK((acomm - (i == j ? 1.0 : 0.0) * Matrix::Identity(d, d)).norm() < 1e-14);
                CHECK((ci * cj + cj * ci).norm() < 1e-14);
            }
        }
    }
}

TEST_CASE("jordan-wigner examples") {
    // Number operator c^dag c = (I - Z) / 2.
    FermionicQuadraticForm one{1, Matrix::Zero(2, 2)};
    one.theta_tilde(0, 0) = 1.0;
    const auto s1 = jw_quadratic_to_pauli(one);
    REQUIRE(s1.terms.size() == 1);
    CHECK(s1.terms[0].first.letters() == "Z");
    CHECK(s1.terms[0].second == doctest::Approx(-0.5));
    CHECK(s1.identity_shift == doctest::Approx(0.5));

    // Hopping c1^dag c2 + c2^dag c1 = (X1 X2 + Y1 Y2) / 2.
    FermionicQuadraticForm hop{2, Matrix::Zero(4, 4)};
    hop.theta_tilde(0, 1) = 1.0;
    hop.theta_tilde(1, 0) = 1.0;
    const auto s2 = jw_quadratic_to_pauli(hop);
    CHECK(s2.identity_shift == doctest::Approx(0.0));
    REQUIRE(s2.terms.size() == 2);
    for (const auto& [term, w] : s2.terms) {
        CHECK((term.letters() == "XX" || term.letters() == "YY"));
        CHECK(w == doctest::Approx(0.5));
    }
    const Matrix direct = quadratic_matrix(hop.theta_tilde, 2);
    CHECK((weighted_sum(s2) - direct).norm() < 1e-12);
}

TEST_CASE("jordan-wigner round trip on random Hermitian forms") {
    std::mt19937_64 rng(2024);
    for (int n : {2, 3}) {
        for (int rep = 0; rep < 20; ++rep) {
            FermionicQuadraticForm f{n, oracle::random_hermitian(2 * n, rng)};
            const auto s = jw_quadratic_to_pauli(f);
            CHECK((weighted_sum(s) - quadratic_matrix(f.theta_tilde, n)).norm() < 1e-10);
            const Ansatz family = gaussian_fermionic_ansatz(n);
            for (const auto& [term, w] : s.terms) CHECK(family.index_of(term).has_value());
        }
        for (int rep = 0; rep < 5; ++rep) {
            FermionicQuadraticForm f{n, random_form(n, rng)};
            const auto s = jw_quadratic_to_pauli(f);
            CHECK((weighted_sum(s) - quadratic_matrix(f.theta_tilde, n)).norm() < 1e-10);
        }
    }
}

TEST_CASE("jordan-wigner rejects non-Hermitian input") {
    FermionicQuadraticForm f{2, Matrix::Zero(4, 4)};
    f.theta_tilde(0, 1) = 1.0;
    CHECK_THROWS_AS(jw_quadratic_to_pauli(f), ValidationError);
    FermionicQuadraticForm wrong{2, Matrix::Zero(3, 3)};
    CHECK_THROWS_AS(jw_quadratic_to_pauli(wrong), DimensionError);
}

TEST_CASE("gaussian fermionic family") {
    for (int n = 1; n <= 5; ++n) {
        const Ansatz a = gaussian_fermionic_ansatz(n);
        CHECK(a.size() == static_cast<std::size_t>(2 * n * n - n));
        std::set<std::string> distinct;
        for (const auto& t : a.terms) distinct.insert(t.letters());
        CHECK(distinct.size() == a.size());
    }
}

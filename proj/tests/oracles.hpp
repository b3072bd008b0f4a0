#pragma once

// Independent reference implementations. Nothing here calls into the
// library's own matrix builders, eigen-based Gibbs code or expectation
// routines.

#include <cmath>
#include <random>
#include <string>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

namespace oracle {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

inline Matrix single(char c) {
    Matrix m(2, 2);
    const Complex i(0.0, 1.0);
    switch (c) {
        case 'X': m << 0, 1, 1, 0; break;
        case 'Y': m << 0, -i, i, 0; break;
        case 'Z': m << 1, 0, 0, -1; break;
        default: m << 1, 0, 0, 1; break;
    }
    return m;
}

inline Matrix kron(const Matrix& a, const Matrix& b) { return Eigen::kroneckerProduct(a, b).eval(); }

// Explicit Kronecker chain, qubit 0 leftmost.
inline Matrix pauli(const std::string& letters) {
    Matrix m = single(letters.at(0));
    for (std::size_t k = 1; k < letters.size(); ++k) m = kron(m, single(letters[k]));
    return m;
}

// c_i = Z x .. x Z x (X + iY)/2 x I x .. x I, mode i at Kronecker slot i.
inline Matrix annihilation(int n, int mode) {
    Matrix lower(2, 2);
    lower << 0, 1, 0, 0;
    Matrix m = Matrix::Identity(1, 1);
    for (int q = 0; q < n; ++q) {
        const Matrix f = q < mode ? single('Z') : (q == mode ? lower : single('I'));
        m = kron(m, f);
    }
    return m;
}

inline Matrix gibbs(const Matrix& h) {
    Matrix e = h.exp();
    return e / e.trace();
}

// Tr[eta log eta] - Tr[eta log rho] with a 1e-14 cutoff on eta's spectrum.
inline double relative_entropy(const Matrix& eta, const Matrix& rho) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(eta);
    double s = 0.0;
    for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
        const double l = es.eigenvalues()(k);
        if (l > 1e-14) s += l * std::log(l);
    }
    const Matrix log_rho = rho.log();
    return s - (eta * log_rho).trace().real();
}

inline double trace_norm(const Matrix& a) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(a);
    return es.eigenvalues().cwiseAbs().sum();
}

inline Matrix random_hermitian(int d, std::mt19937_64& rng, double scale = 1.0) {
    std::normal_distribution<double> g(0.0, 1.0);
    Matrix a(d, d);
    for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) a(r, c) = Complex(g(rng), g(rng));
    return (scale * 0.5 * (a + a.adjoint())).eval();
}

// Full-rank random density matrix (Wishart).
inline Matrix random_density(int d, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    Matrix a(d, d);
    for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) a(r, c) = Complex(g(rng), g(rng));
    Matrix rho = a * a.adjoint();
    return rho / rho.trace();
}

inline CVector random_state(int d, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    CVector v(d);
    for (int k = 0; k < d; ++k) v(k) = Complex(g(rng), g(rng));
    return v.normalized();
}

}  // namespace oracle

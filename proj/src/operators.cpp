#include "qbm/operators.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <set>

#include "qbm/errors.hpp"

namespace qbm {

namespace {

std::uint64_t qubit_bit(int n, int qubit) { return std::uint64_t{1} << (n - 1 - qubit); }

// Single-qubit product a * b = coefficient * letter.
std::pair<Complex, char> multiply_letters(char a, char b) {
    constexpr Complex i{0.0, 1.0};
    if (a == 'I') return {1.0, b};
    if (b == 'I') return {1.0, a};
    if (a == b) return {1.0, 'I'};
    if (a == 'X' && b == 'Y') return {i, 'Z'};
    if (a == 'Y' && b == 'Z') return {i, 'X'};
    if (a == 'Z' && b == 'X') return {i, 'Y'};
    if (a == 'Y' && b == 'X') return {-i, 'Z'};
    if (a == 'Z' && b == 'Y') return {-i, 'X'};
    return {-i, 'Y'};  // X * Z
}

}  // namespace

void check_qubit_count(int n, int cap) {
    if (n < 1) throw DimensionError("qubit count must be positive, got " + std::to_string(n));
    if (n > cap) {
        throw DimensionError("qubit count " + std::to_string(n) + " exceeds dense cap " +
                             std::to_string(cap));
    }
}

PauliTerm::PauliTerm(std::string letters) : letters_(std::move(letters)) {
    const int n = num_qubits();
    if (n < 1 || n > 62) throw ValidationError("Pauli string length must be in [1, 62]");
    for (int q = 0; q < n; ++q) {
        const char c = letters_[static_cast<std::size_t>(q)];
        const std::uint64_t bit = qubit_bit(n, q);
        switch (c) {
            case 'I':
                break;
            case 'X':
                flip_ |= bit;
                ++weight_;
                break;
            case 'Y':
                flip_ |= bit;
                zmask_ |= bit;
                ++y_count_;
                ++weight_;
                break;
            case 'Z':
                zmask_ |= bit;
                ++weight_;
                break;
            default:
                throw ValidationError(std::string("invalid Pauli letter '") + c + "' in \"" +
                                      letters_ + "\"");
        }
    }
}

PauliTerm PauliTerm::identity(int n) { return PauliTerm(std::string(static_cast<std::size_t>(n), 'I')); }

PauliTerm PauliTerm::single(int n, int qubit, char letter) {
    std::string s(static_cast<std::size_t>(n), 'I');
    s.at(static_cast<std::size_t>(qubit)) = letter;
    return PauliTerm(std::move(s));
}

PauliTerm PauliTerm::pair(int n, int q1, int q2, char letter) {
    if (q1 == q2) throw ValidationError("pair term needs two distinct qubits");
    std::string s(static_cast<std::size_t>(n), 'I');
    s.at(static_cast<std::size_t>(q1)) = letter;
    s.at(static_cast<std::size_t>(q2)) = letter;
    return PauliTerm(std::move(s));
}

Complex PauliTerm::phase(std::uint64_t basis) const {
    // Y = i X Z, so each Y contributes a factor i on top of the Z sign.
    static constexpr Complex kIPow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    const Complex base = kIPow[y_count_ & 3];
    return (std::popcount(basis & zmask_) & 1) ? -base : base;
}

std::pair<Complex, PauliTerm> multiply(const PauliTerm& a, const PauliTerm& b) {
    if (a.num_qubits() != b.num_qubits()) throw DimensionError("Pauli product of unequal lengths");
    Complex coefficient{1.0, 0.0};
    std::string out(a.letters().size(), 'I');
    for (std::size_t q = 0; q < out.size(); ++q) {
        const auto [c, letter] = multiply_letters(a.letters()[q], b.letters()[q]);
        coefficient *= c;
        out[q] = letter;
    }
    return {coefficient, PauliTerm(std::move(out))};
}

Matrix pauli_matrix(const PauliTerm& term, int cap) {
    const int n = term.num_qubits();
    check_qubit_count(n, cap);
    const std::uint64_t dim = std::uint64_t{1} << n;
    Matrix m = Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (std::uint64_t x = 0; x < dim; ++x) {
        m(static_cast<Eigen::Index>(x ^ term.flip_mask()), static_cast<Eigen::Index>(x)) = term.phase(x);
    }
    return m;
}

Matrix pauli_sum_matrix(int n, std::span<const PauliTerm> terms, std::span<const double> weights, int cap) {
    check_qubit_count(n, cap);
    if (terms.size() != weights.size()) throw DimensionError("term/weight count mismatch");
    const std::uint64_t dim = std::uint64_t{1} << n;
    Matrix h = Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (std::size_t k = 0; k < terms.size(); ++k) {
        const PauliTerm& p = terms[k];
        if (p.num_qubits() != n) throw DimensionError("term \"" + p.letters() + "\" is not on n qubits");
        const double w = weights[k];
        if (w == 0.0) continue;
        const std::uint64_t f = p.flip_mask();
        for (std::uint64_t x = 0; x < dim; ++x) {
            h(static_cast<Eigen::Index>(x ^ f), static_cast<Eigen::Index>(x)) += w * p.phase(x);
        }
    }
    return h;
}

double pauli_expectation(const Matrix& rho, const PauliTerm& term) {
    const std::uint64_t dim = std::uint64_t{1} << term.num_qubits();
    if (static_cast<std::uint64_t>(rho.rows()) != dim || rho.rows() != rho.cols()) {
        throw DimensionError("density matrix does not match term \"" + term.letters() + "\"");
    }
    // Tr[rho P] = sum_x rho(x, x ^ f) phase(x)
    Complex acc{0.0, 0.0};
    const std::uint64_t f = term.flip_mask();
    for (std::uint64_t x = 0; x < dim; ++x) {
        acc += rho(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(x ^ f)) * term.phase(x);
    }
    return acc.real();
}

double pauli_expectation(const CVector& psi, const PauliTerm& term) {
    const std::uint64_t dim = std::uint64_t{1} << term.num_qubits();
    if (static_cast<std::uint64_t>(psi.size()) != dim) {
        throw DimensionError("statevector does not match term \"" + term.letters() + "\"");
    }
    Complex acc{0.0, 0.0};
    const std::uint64_t f = term.flip_mask();
    for (std::uint64_t x = 0; x < dim; ++x) {
        acc += std::conj(psi(static_cast<Eigen::Index>(x ^ f))) * term.phase(x) *
               psi(static_cast<Eigen::Index>(x));
    }
    return acc.real();
}

std::optional<std::size_t> Ansatz::index_of(const PauliTerm& term) const {
    const auto it = std::find(terms.begin(), terms.end(), term);
    if (it == terms.end()) return std::nullopt;
    return static_cast<std::size_t>(it - terms.begin());
}

void Ansatz::validate() const {
    if (terms.empty()) throw ValidationError("ansatz needs at least one term");
    if (labels.size() != terms.size()) throw ValidationError("ansatz needs one label per term");
    std::set<std::string> seen;
    for (const auto& t : terms) {
        if (t.num_qubits() != n) {
            throw ValidationError("term \"" + t.letters() + "\" does not act on " + std::to_string(n) +
                                  " qubits");
        }
        if (t.is_identity()) throw ValidationError("identity term does not change the Gibbs state");
        if (!seen.insert(t.letters()).second) throw ValidationError("duplicate term \"" + t.letters() + "\"");
    }
}

Ansatz make_ansatz(int n, std::vector<PauliTerm> terms, std::vector<std::string> labels) {
    if (labels.empty()) {
        labels.reserve(terms.size());
        for (const auto& t : terms) labels.push_back(t.letters());
    }
    Ansatz a{n, std::move(terms), std::move(labels)};
    a.validate();
    return a;
}

std::string to_string(AnsatzKind kind) {
    switch (kind) {
        case AnsatzKind::mean_field:
            return "mean_field";
        case AnsatzKind::gl_1d:
            return "gl_1d";
        case AnsatzKind::gl_2d:
            return "gl_2d";
        case AnsatzKind::fully_connected:
            return "fully_connected";
    }
    return "unknown";
}

AnsatzKind ansatz_kind_from_string(std::string_view name) {
    if (name == "mean_field" || name == "mf") return AnsatzKind::mean_field;
    if (name == "gl_1d") return AnsatzKind::gl_1d;
    if (name == "gl_2d") return AnsatzKind::gl_2d;
    if (name == "fully_connected" || name == "fc") return AnsatzKind::fully_connected;
    throw ConfigError("unknown ansatz kind \"" + std::string(name) + "\"");
}

Geometry default_2d_geometry(int n) {
    int rows = 1;
    for (int r = 1; r * r <= n; ++r) {
        if (n % r == 0) rows = r;
    }
    Geometry g;
    g.rows = rows;
    g.cols = n / rows;
    g.periodic_cols = g.cols > 2;
    g.periodic_rows = false;
    return g;
}

std::vector<std::pair<int, int>> lattice_edges(const Geometry& g) {
    if (g.rows < 1 || g.cols < 1) throw ConfigError("lattice dimensions must be positive");
    std::set<std::pair<int, int>> seen;
    std::vector<std::pair<int, int>> edges;
    auto add = [&](int a, int b) {
        if (a == b) return;
        const std::pair<int, int> e{std::min(a, b), std::max(a, b)};
        if (seen.insert(e).second) edges.push_back(e);
    };
    auto site = [&](int r, int c) { return r * g.cols + c; };
    for (int r = 0; r < g.rows; ++r) {
        for (int c = 0; c + 1 < g.cols; ++c) add(site(r, c), site(r, c + 1));
        if (g.periodic_cols && g.cols > 2) add(site(r, g.cols - 1), site(r, 0));
    }
    for (int c = 0; c < g.cols; ++c) {
        for (int r = 0; r + 1 < g.rows; ++r) add(site(r, c), site(r + 1, c));
        if (g.periodic_rows && g.rows > 2) add(site(g.rows - 1, c), site(0, c));
    }
    return edges;
}

Ansatz build_ansatz(AnsatzKind kind, int n, const AnsatzOptions& options) {
    check_qubit_count(n, 62);
    std::vector<std::pair<int, int>> bonds;
    switch (kind) {
        case AnsatzKind::mean_field:
            break;
        case AnsatzKind::gl_1d: {
            Geometry g = options.geometry.value_or(Geometry{1, n, false, true});
            if (g.rows * g.cols != n || (g.rows != 1 && g.cols != 1)) {
                throw ConfigError("gl_1d geometry must be a chain of n sites");
            }
            bonds = lattice_edges(g);
            break;
        }
        case AnsatzKind::gl_2d: {
            const Geometry g = options.geometry.value_or(default_2d_geometry(n));
            if (g.rows * g.cols != n) {
                throw ConfigError("gl_2d lattice " + std::to_string(g.rows) + "x" + std::to_string(g.cols) +
                                  " does not have " + std::to_string(n) + " sites");
            }
            bonds = lattice_edges(g);
            break;
        }
        case AnsatzKind::fully_connected:
            for (int i = 0; i < n; ++i) {
                for (int j = i + 1; j < n; ++j) bonds.emplace_back(i, j);
            }
            break;
    }

    std::vector<PauliTerm> terms;
    std::vector<std::string> labels;
    if (options.single_qubit_terms || kind == AnsatzKind::mean_field) {
        for (int q = 0; q < n; ++q) {
            for (char p : {'X', 'Y', 'Z'}) {
                terms.push_back(PauliTerm::single(n, q, p));
                labels.push_back(std::string(1, p) + "(" + std::to_string(q) + ")");
            }
        }
    }
    for (const auto& [i, j] : bonds) {
        for (char p : {'X', 'Y', 'Z'}) {
            terms.push_back(PauliTerm::pair(n, i, j, p));
            labels.push_back(std::string(2, p) + "(" + std::to_string(i) + "," + std::to_string(j) + ")");
        }
    }
    return make_ansatz(n, std::move(terms), std::move(labels));
}

Ansatz gaussian_fermionic_ansatz(int n) {
    check_qubit_count(n, 62);
    std::vector<PauliTerm> terms;
    std::vector<std::string> labels;
    for (int q = 0; q < n; ++q) {
        terms.push_back(PauliTerm::single(n, q, 'Z'));
        labels.push_back("n(" + std::to_string(q) + ")");
    }
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            for (const char* ab : {"XX", "YY", "XY", "YX"}) {
                std::string s(static_cast<std::size_t>(n), 'I');
                s[static_cast<std::size_t>(i)] = ab[0];
                for (int k = i + 1; k < j; ++k) s[static_cast<std::size_t>(k)] = 'Z';
                s[static_cast<std::size_t>(j)] = ab[1];
                terms.emplace_back(s);
                labels.push_back(std::string(ab) + "~(" + std::to_string(i) + "," + std::to_string(j) + ")");
            }
        }
    }
    return make_ansatz(n, std::move(terms), std::move(labels));
}

namespace {

// c_i (dagger=false) or c_i^dagger as a two-term Pauli sum.
std::vector<std::pair<Complex, PauliTerm>> jw_ladder_terms(int n, int mode, bool dagger) {
    std::string sx(static_cast<std::size_t>(n), 'I');
    for (int k = 0; k < mode; ++k) sx[static_cast<std::size_t>(k)] = 'Z';
    std::string sy = sx;
    sx[static_cast<std::size_t>(mode)] = 'X';
    sy[static_cast<std::size_t>(mode)] = 'Y';
    const Complex iy = dagger ? Complex{0.0, -0.5} : Complex{0.0, 0.5};
    return {{Complex{0.5, 0.0}, PauliTerm(sx)}, {iy, PauliTerm(sy)}};
}

Matrix dense_ladder(int n, int mode, bool dagger) {
    if (mode < 0 || mode >= n) throw DimensionError("mode index out of range");
    Matrix m = Matrix::Zero(Eigen::Index{1} << n, Eigen::Index{1} << n);
    for (const auto& [c, p] : jw_ladder_terms(n, mode, dagger)) m += c * pauli_matrix(p);
    return m;
}

}  // namespace

Matrix jw_annihilation(int n, int mode) { return dense_ladder(n, mode, false); }
Matrix jw_creation(int n, int mode) { return dense_ladder(n, mode, true); }

WeightedPauliSum jw_quadratic_to_pauli(const FermionicQuadraticForm& form, double tol) {
    const int n = form.n;
    check_qubit_count(n, 62);
    const Eigen::Index two_n = 2 * n;
    if (form.theta_tilde.rows() != two_n || form.theta_tilde.cols() != two_n) {
        throw DimensionError("theta_tilde must be 2n x 2n");
    }
    if ((form.theta_tilde - form.theta_tilde.adjoint()).cwiseAbs().maxCoeff() > tol) {
        throw ValidationError("quadratic form is not Hermitian");
    }

    // C^dagger_a: a < n -> c_a^dag, else c_{a-n}; C_b: b < n -> c_b, else c_{b-n}^dag.
    auto row_op = [&](Eigen::Index a) {
        return a < n ? jw_ladder_terms(n, static_cast<int>(a), true)
                     : jw_ladder_terms(n, static_cast<int>(a - n), false);
    };
    auto col_op = [&](Eigen::Index b) {
        return b < n ? jw_ladder_terms(n, static_cast<int>(b), false)
                     : jw_ladder_terms(n, static_cast<int>(b - n), true);
    };

    std::map<PauliTerm, Complex> acc;
    double scale = 0.0;
    for (Eigen::Index a = 0; a < two_n; ++a) {
        for (Eigen::Index b = 0; b < two_n; ++b) {
            const Complex w = form.theta_tilde(a, b);
            if (w == Complex{0.0, 0.0}) continue;
            scale = std::max(scale, std::abs(w));
            for (const auto& [ca, pa] : row_op(a)) {
                for (const auto& [cb, pb] : col_op(b)) {
                    const auto [c, p] = multiply(pa, pb);
                    acc[p] += w * ca * cb * c;
                }
            }
        }
    }

    WeightedPauliSum out;
    out.n = n;
    const double drop = 1e-14 * std::max(1.0, scale);
    for (const auto& [p, c] : acc) {
        if (std::abs(c.imag()) > std::max(tol, 1e-12 * scale)) {
            throw ValidationError("Jordan-Wigner image has a non-real weight on " + p.letters());
        }
        if (p.is_identity()) {
            out.identity_shift = c.real();
        } else if (std::abs(c.real()) > drop) {
            out.terms.emplace_back(p, c.real());
        }
    }
    return out;
}

}  // namespace qbm

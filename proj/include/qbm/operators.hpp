#pragma once

#include <complex>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace qbm {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;

// Largest qubit count the dense backend accepts by default.
inline constexpr int kDefaultQubitCap = 12;

// Throws DimensionError when n is outside [1, cap].
void check_qubit_count(int n, int cap = kDefaultQubitCap);

// An n-qubit Pauli string. Qubit 0 is the leftmost Kronecker factor, so it
// maps to the most significant bit of a computational-basis index.
class PauliTerm {
  public:
    PauliTerm() = default;
    explicit PauliTerm(std::string letters);

    static PauliTerm identity(int n);
    static PauliTerm single(int n, int qubit, char letter);
    static PauliTerm pair(int n, int q1, int q2, char letter);

    int num_qubits() const { return static_cast<int>(letters_.size()); }
    int weight() const { return weight_; }
    bool is_identity() const { return weight_ == 0; }
    const std::string& letters() const { return letters_; }
    char at(int qubit) const { return letters_[static_cast<std::size_t>(qubit)]; }

    // P|x> = phase(x) |x ^ flip_mask()>.
    std::uint64_t flip_mask() const { return flip_; }
    Complex phase(std::uint64_t basis) const;

    bool is_diagonal() const { return flip_ == 0; }

    auto operator<=>(const PauliTerm& other) const { return letters_ <=> other.letters_; }
    bool operator==(const PauliTerm& other) const { return letters_ == other.letters_; }

  private:
    std::string letters_;
    int weight_ = 0;
    std::uint64_t flip_ = 0;   // bits carrying X or Y
    std::uint64_t zmask_ = 0;  // bits carrying Y or Z
    int y_count_ = 0;
};

// Product of two Pauli strings: a * b = coefficient * result.
std::pair<Complex, PauliTerm> multiply(const PauliTerm& a, const PauliTerm& b);

// Dense 2^n x 2^n matrix of a Pauli string.
Matrix pauli_matrix(const PauliTerm& term, int cap = kDefaultQubitCap);

// Dense matrix of sum_i weights[i] * terms[i].
Matrix pauli_sum_matrix(int n, std::span<const PauliTerm> terms, std::span<const double> weights,
                        int cap = kDefaultQubitCap);

// Tr[rho P] for a dense density matrix, real part (imaginary residue dropped).
double pauli_expectation(const Matrix& rho, const PauliTerm& term);

// <psi|P|psi> for a normalized statevector.
double pauli_expectation(const CVector& psi, const PauliTerm& term);

// Ordered list of Pauli strings H_i defining H_theta = sum_i theta_i H_i.
struct Ansatz {
    int n = 0;
    std::vector<PauliTerm> terms;
    std::vector<std::string> labels;

    std::size_t size() const { return terms.size(); }
    std::optional<std::size_t> index_of(const PauliTerm& term) const;

    // Throws ValidationError unless terms are distinct n-qubit non-identity
    // strings with one label each and m >= 1.
    void validate() const;
};

// Builds a validated ansatz; labels default to the letter strings.
Ansatz make_ansatz(int n, std::vector<PauliTerm> terms, std::vector<std::string> labels = {});

enum class AnsatzKind { mean_field, gl_1d, gl_2d, fully_connected };

std::string to_string(AnsatzKind kind);
AnsatzKind ansatz_kind_from_string(std::string_view name);

// Rectangular lattice, row-major site index r * cols + c. periodic_cols wraps
// along a row (length cols), periodic_rows along a column (length rows).
// A wrap of a length-2 direction would duplicate an existing bond and is
// ignored.
struct Geometry {
    int rows = 1;
    int cols = 1;
    bool periodic_rows = false;
    bool periodic_cols = true;
};

struct AnsatzOptions {
    std::optional<Geometry> geometry;
    bool single_qubit_terms = true;
};

// Default lattice for gl_2d: the most square rows x cols factorization with
// rows <= cols, periodic only along the longer direction (when it exceeds 2).
Geometry default_2d_geometry(int n);

// Nearest-neighbour bonds (i < j), deduplicated, in lattice order.
std::vector<std::pair<int, int>> lattice_edges(const Geometry& geometry);

// Term order: single-qubit {X_i, Y_i, Z_i} for each qubit first (when
// enabled), then {X_iX_j, Y_iY_j, Z_iZ_j} per bond. A mean-field ansatz is
// therefore a prefix of every other kind built for the same n.
Ansatz build_ansatz(AnsatzKind kind, int n, const AnsatzOptions& options = {});

// All Jordan-Wigner images of quadratic Majorana monomials: Z_i plus the four
// string operators {X,Y} Z...Z {X,Y} for every i < j. Size 2n^2 - n.
Ansatz gaussian_fermionic_ansatz(int n);

// H = C^dagger Theta C with C^dagger = [c1^dag..cn^dag, c1..cn].
struct FermionicQuadraticForm {
    int n = 0;
    Matrix theta_tilde;  // 2n x 2n Hermitian
};

struct WeightedPauliSum {
    int n = 0;
    std::vector<std::pair<PauliTerm, double>> terms;  // sorted by letters
    double identity_shift = 0.0;                      // stripped coefficient of I
};

// Dense Jordan-Wigner matrices with c_i = (prod_{j<i} Z_j) (X_i + iY_i)/2.
Matrix jw_annihilation(int n, int mode);
Matrix jw_creation(int n, int mode);

// Maps a quadratic Fermionic form to real-weighted Pauli strings.
// Throws ValidationError when theta_tilde is not Hermitian within `tol`.
WeightedPauliSum jw_quadratic_to_pauli(const FermionicQuadraticForm& form, double tol = 1e-10);

}  // namespace qbm

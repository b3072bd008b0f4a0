#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "qbm/gibbs.hpp"

namespace qbm {

// Binary samples; bitstring character k is qubit k ('1' = occupied / |1>).
struct Dataset {
    int n = 0;
    std::vector<std::string> samples;
    std::map<std::string, std::int64_t> counts;

    std::int64_t size() const { return static_cast<std::int64_t>(samples.size()); }
    // Empirical probability q(s) = count(s) / M.
    double probability(const std::string& bits) const;

    static Dataset from_samples(std::vector<std::string> samples);
};

// Plain text, one bitstring per line; blank lines and '#' comments ignored.
Dataset read_dataset(std::istream& in);
Dataset read_dataset(const std::filesystem::path& path);
void write_dataset(std::ostream& out, const Dataset& dataset);

// Gamma_ij = <C^dag_i C_j>, C^dag = [c1^dag..cn^dag, c1..cn].
struct CorrelationMatrix {
    int n = 0;
    Matrix gamma;
};

struct XxzParams {
    double J = -0.5;
    double Delta = -0.7;
    double h_z = -0.8;
};

// Open-chain XXZ Hamiltonian as weighted Pauli strings (identity-free).
std::vector<std::pair<PauliTerm, double>> xxz_hamiltonian(int n, const XxzParams& params);

// eta = exp(H_XXZ) / Z. Expectations are served from eta on demand.
Target xxz_target(int n, const XxzParams& params = {}, int cap = kDefaultQubitCap);

// |psi> = sum_s sqrt(q(s)) |s>, eta = |psi><psi|.
Target encode_dataset(const Dataset& dataset, int cap = kDefaultQubitCap);

// Statevector of encode_dataset without building the target.
CVector dataset_statevector(const Dataset& dataset, int cap = kDefaultQubitCap);

// Basis index of a bitstring (character 0 is the most significant bit).
std::uint64_t bitstring_index(const std::string& bits);

// Correlation matrix by contracting Jordan-Wigner ladder operators with the
// target state. Throws ContractError if the target has neither eta nor psi.
CorrelationMatrix fermionic_correlations(const Target& target);

// Bitstring-sum evaluation of <c_i^dag c_j> and friends directly from a
// dataset. With jw_signs=false the Jordan-Wigner parity strings are omitted,
// which reproduces the sign-free closed-form sums; with jw_signs=true the
// result equals fermionic_correlations(encode_dataset(dataset)).
CorrelationMatrix fermionic_correlations_from_dataset(const Dataset& dataset, bool jw_signs = true);

enum class SynthModel { independent_bernoulli, pairwise_ising };

struct SynthOptions {
    // independent_bernoulli: P(bit = 1) per feature; a single value is
    // broadcast, empty means probabilities drawn uniformly in [0.05, 0.5].
    std::vector<double> p_one;
    // pairwise_ising: couplings J_ij ~ U[-coupling, coupling], fields
    // h_i ~ U[field_lo, field_hi]; P(s) ~ exp(sum J s_i s_j + sum h s_i) with
    // spins s = 2 bit - 1.
    double coupling = 0.5;
    double field_lo = -1.5;
    double field_hi = -0.5;
};

// Reproducible synthetic dataset. pairwise_ising samples exactly from the
// enumerated distribution (n <= 12).
Dataset synth_dataset(int n, std::int64_t M, std::uint64_t seed, SynthModel model, const SynthOptions& options = {});

// Exact bit marginals P(bit_i = 1) of the pairwise model generated by
// synth_dataset for the same (n, seed, options).
std::vector<double> pairwise_ising_marginals(int n, std::uint64_t seed, const SynthOptions& options = {});

SynthModel synth_model_from_string(const std::string& name);

}  // namespace qbm

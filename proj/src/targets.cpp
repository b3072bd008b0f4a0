#include "qbm/targets.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>

#include "qbm/errors.hpp"

namespace qbm {

double Dataset::probability(const std::string& bits) const {
    const auto it = counts.find(bits);
    if (it == counts.end() || samples.empty()) return 0.0;
    return static_cast<double>(it->second) / static_cast<double>(samples.size());
}

Dataset Dataset::from_samples(std::vector<std::string> samples) {
    if (samples.empty()) throw ValidationError("dataset is empty");
    Dataset d;
    d.n = static_cast<int>(samples.front().size());
    if (d.n < 1) throw ValidationError("dataset bitstrings must be non-empty");
    for (const auto& s : samples) {
        if (static_cast<int>(s.size()) != d.n) {
            throw ValidationError("bitstring \"" + s + "\" has length " + std::to_string(s.size()) + ", expected " +
                                  std::to_string(d.n));
        }
        if (s.find_first_not_of("01") != std::string::npos) {
            throw ValidationError("bitstring \"" + s + "\" contains characters other than 0/1");
        }
        ++d.counts[s];
    }
    d.samples = std::move(samples);
    return d;
}

Dataset read_dataset(std::istream& in) {
    std::vector<std::string> samples;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        const auto last = line.find_last_not_of(" \t\r");
        std::string s = line.substr(first, last - first + 1);
        if (s.front() == '#') continue;
        if (s.find_first_not_of("01") != std::string::npos) {
            throw ValidationError("dataset line " + std::to_string(lineno) + ": expected a 0/1 bitstring");
        }
        samples.push_back(std::move(s));
    }
    return Dataset::from_samples(std::move(samples));
}

Dataset read_dataset(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open dataset file " + path.string());
    return read_dataset(in);
}

void write_dataset(std::ostream& out, const Dataset& dataset) {
    for (const auto& s : dataset.samples) out << s << '\n';
}

std::vector<std::pair<PauliTerm, double>> xxz_hamiltonian(int n, const XxzParams& p) {
    if (n < 2) throw DimensionError("XXZ chain needs at least two qubits");
    std::vector<std::pair<PauliTerm, double>> h;
    for (int i = 0; i + 1 < n; ++i) {
        h.emplace_back(PauliTerm::pair(n, i, i + 1, 'X'), p.J);
        h.emplace_back(PauliTerm::pair(n, i, i + 1, 'Y'), p.J);
        h.emplace_back(PauliTerm::pair(n, i, i + 1, 'Z'), p.Delta);
    }
    for (int i = 0; i < n; ++i) h.emplace_back(PauliTerm::single(n, i, 'Z'), p.h_z);
    return h;
}

Target xxz_target(int n, const XxzParams& params, int cap) {
    check_qubit_count(n, cap);
    const auto h = xxz_hamiltonian(n, params);
    std::vector<PauliTerm> terms;
    std::vector<double> weights;
    for (const auto& [t, w] : h) {
        terms.push_back(t);
        weights.push_back(w);
    }
    const GibbsModel g = gibbs_from_hamiltonian(pauli_sum_matrix(n, terms, weights, cap));
    Target t;
    t.n = n;
    double ent = 0.0;
    for (Eigen::Index k = 0; k < g.weights.size(); ++k) {
        const double w = g.weights(k);
        if (w > 1e-14) ent += w * std::log(w);
    }
    t.eta_entropy = ent;
    t.eta = g.rho;
    return t;
}

std::uint64_t bitstring_index(const std::string& bits) {
    std::uint64_t x = 0;
    for (char c : bits) x = (x << 1) | static_cast<std::uint64_t>(c == '1');
    return x;
}

CVector dataset_statevector(const Dataset& dataset, int cap) {
    if (dataset.samples.empty()) throw ValidationError("cannot encode an empty dataset");
    check_qubit_count(dataset.n, cap);
    CVector psi = CVector::Zero(Eigen::Index{1} << dataset.n);
    for (const auto& [bits, count] : dataset.counts) {
        psi(static_cast<Eigen::Index>(bitstring_index(bits))) = std::sqrt(dataset.probability(bits));
    }
    psi.normalize();
    return psi;
}

Target encode_dataset(const Dataset& dataset, int cap) {
    Target t = Target::from_statevector(dataset_statevector(dataset, cap));
    t.dataset = std::make_shared<const Dataset>(dataset);
    return t;
}

namespace {

// Ladder operator on a basis state: c_mode (dagger=false) or c_mode^dag.
struct Ladder {
    int mode;
    bool dagger;
};

// Ladder index a of C^dag (row) or C (column).
Ladder row_ladder(int n, int a) { return a < n ? Ladder{a, true} : Ladder{a - n, false}; }
Ladder col_ladder(int n, int b) { return b < n ? Ladder{b, false} : Ladder{b - n, true}; }

// Applies op to |x>; returns the target index and sign, or nothing on zero.
std::optional<std::pair<std::uint64_t, double>> apply_ladder(int n, Ladder op, std::uint64_t x, bool signs) {
    const std::uint64_t bit = std::uint64_t{1} << (n - 1 - op.mode);
    const bool occupied = (x & bit) != 0;
    if (occupied == op.dagger) return std::nullopt;
    // parity of modes j < mode, which sit in the more significant bits
    const std::uint64_t higher = ~((bit << 1) - 1) & ((std::uint64_t{1} << n) - 1);
    const double sign = (signs && (std::popcount(x & higher) & 1)) ? -1.0 : 1.0;
    return std::make_pair(x ^ bit, sign);
}

// A B |x> = sign |y>, or nothing.
std::optional<std::pair<std::uint64_t, double>> apply_pair(int n, Ladder a, Ladder b, std::uint64_t x, bool signs) {
    const auto first = apply_ladder(n, b, x, signs);
    if (!first) return std::nullopt;
    const auto second = apply_ladder(n, a, first->first, signs);
    if (!second) return std::nullopt;
    return std::make_pair(second->first, first->second * second->second);
}

}  // namespace

CorrelationMatrix fermionic_correlations(const Target& target) {
    if (!target.has_state()) throw ContractError("fermionic correlations need the target state");
    const int n = target.n;
    const std::uint64_t dim = std::uint64_t{1} << n;
    CorrelationMatrix out{n, Matrix::Zero(2 * n, 2 * n)};
    for (int a = 0; a < 2 * n; ++a) {
        for (int b = 0; b < 2 * n; ++b) {
            const Ladder la = row_ladder(n, a);
            const Ladder lb = col_ladder(n, b);
            Complex acc{0.0, 0.0};
            for (std::uint64_t x = 0; x < dim; ++x) {
                const auto r = apply_pair(n, la, lb, x, true);
                if (!r) continue;
                const auto [y, s] = *r;
                if (target.psi) {
                    acc += s * std::conj((*target.psi)(static_cast<Eigen::Index>(y))) *
                           (*target.psi)(static_cast<Eigen::Index>(x));
                } else {
                    // Tr[eta A B] = sum_x <x| eta A B |x> = sum_x s eta(x, y)
                    acc += s * (*target.eta)(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y));
                }
            }
            out.gamma(a, b) = acc;
        }
    }
    return out;
}

CorrelationMatrix fermionic_correlations_from_dataset(const Dataset& dataset, bool jw_signs) {
    if (dataset.samples.empty()) throw ValidationError("empty dataset");
    const int n = dataset.n;
    if (n > 62) throw DimensionError("bitstrings longer than 62 are not supported");
    std::map<std::uint64_t, double> amp;
    for (const auto& [bits, count] : dataset.counts) amp[bitstring_index(bits)] = std::sqrt(dataset.probability(bits));
    CorrelationMatrix out{n, Matrix::Zero(2 * n, 2 * n)};
    for (int a = 0; a < 2 * n; ++a) {
        for (int b = 0; b < 2 * n; ++b) {
            double acc = 0.0;
            for (const auto& [x, qx] : amp) {
                const auto r = apply_pair(n, row_ladder(n, a), col_ladder(n, b), x, jw_signs);
                if (!r) continue;
                const auto it = amp.find(r->first);
                if (it != amp.end()) acc += r->second * it->second * qx;
            }
            out.gamma(a, b) = acc;
        }
    }
    return out;
}

namespace {

struct PairwiseModel {
    RMatrix J;
    RVector h;
};

PairwiseModel draw_pairwise(int n, std::mt19937_64& rng, const SynthOptions& o) {
    std::uniform_real_distribution<double> coupling(-o.coupling, o.coupling);
    std::uniform_real_distribution<double> field(o.field_lo, o.field_hi);
    PairwiseModel p{RMatrix::Zero(n, n), RVector::Zero(n)};
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) p.J(i, j) = coupling(rng);
    }
    for (int i = 0; i < n; ++i) p.h(i) = field(rng);
    return p;
}

std::vector<double> pairwise_probabilities(int n, const PairwiseModel& p) {
    const std::uint64_t dim = std::uint64_t{1} << n;
    std::vector<double> logw(dim);
    for (std::uint64_t x = 0; x < dim; ++x) {
        RVector s(n);
        for (int i = 0; i < n; ++i) s(i) = ((x >> (n - 1 - i)) & 1) ? 1.0 : -1.0;
        double e = p.h.dot(s);
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) e += p.J(i, j) * s(i) * s(j);
        }
        logw[x] = e;
    }
    const double mx = *std::max_element(logw.begin(), logw.end());
    double z = 0.0;
    for (auto& w : logw) {
        w = std::exp(w - mx);
        z += w;
    }
    for (auto& w : logw) w /= z;
    return logw;
}

std::string index_bits(int n, std::uint64_t x) {
    std::string s(static_cast<std::size_t>(n), '0');
    for (int i = 0; i < n; ++i) {
        if ((x >> (n - 1 - i)) & 1) s[static_cast<std::size_t>(i)] = '1';
    }
    return s;
}

}  // namespace

Dataset synth_dataset(int n, std::int64_t M, std::uint64_t seed, SynthModel model, const SynthOptions& options) {
    if (M < 1) throw ConfigError("dataset size M must be at least 1");
    if (n < 1 || n > 62) throw ConfigError("feature count must be in [1, 62]");
    std::mt19937_64 rng(seed);
    std::vector<std::string> samples;
    samples.reserve(static_cast<std::size_t>(M));
    if (model == SynthModel::independent_bernoulli) {
        std::vector<double> p = options.p_one;
        if (p.empty()) {
            std::uniform_real_distribution<double> pick(0.05, 0.5);
            for (int i = 0; i < n; ++i) p.push_back(pick(rng));
        } else if (p.size() == 1) {
            p.assign(static_cast<std::size_t>(n), p.front());
        }
        if (static_cast<int>(p.size()) != n) throw ConfigError("p_one needs 1 or n entries");
        for (double v : p) {
            if (!(v >= 0.0 && v <= 1.0)) throw ConfigError("Bernoulli probability outside [0, 1]");
        }
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (std::int64_t k = 0; k < M; ++k) {
            std::string s(static_cast<std::size_t>(n), '0');
            for (int i = 0; i < n; ++i) {
                if (u(rng) < p[static_cast<std::size_t>(i)]) s[static_cast<std::size_t>(i)] = '1';
            }
            samples.push_back(std::move(s));
        }
    } else {
        check_qubit_count(n);
        const PairwiseModel pm = draw_pairwise(n, rng, options);
        const auto probs = pairwise_probabilities(n, pm);
        std::discrete_distribution<std::uint64_t> pick(probs.begin(), probs.end());
        for (std::int64_t k = 0; k < M; ++k) samples.push_back(index_bits(n, pick(rng)));
    }
    return Dataset::from_samples(std::move(samples));
}

std::vector<double> pairwise_ising_marginals(int n, std::uint64_t seed, const SynthOptions& options) {
    check_qubit_count(n);
    std::mt19937_64 rng(seed);
    const auto probs = pairwise_probabilities(n, draw_pairwise(n, rng, options));
    std::vector<double> marg(static_cast<std::size_t>(n), 0.0);
    for (std::uint64_t x = 0; x < probs.size(); ++x) {
        for (int i = 0; i < n; ++i) {
            if ((x >> (n - 1 - i)) & 1) marg[static_cast<std::size_t>(i)] += probs[x];
        }
    }
    return marg;
}

SynthModel synth_model_from_string(const std::string& name) {
    if (name == "independent_bernoulli") return SynthModel::independent_bernoulli;
    if (name == "pairwise_ising") return SynthModel::pairwise_ising;
    throw ConfigError("unknown synthetic model \"" + name + "\"");
}

}  // namespace qbm

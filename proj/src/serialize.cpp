#include "qbm/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "qbm/errors.hpp"

namespace qbm {

json ansatz_to_json(const Ansatz& ansatz) {
    json j;
    j["n"] = ansatz.n;
    j["terms"] = json::array();
    for (const auto& t : ansatz.terms) j["terms"].push_back(t.letters());
    j["labels"] = ansatz.labels;
    return j;
}

Ansatz ansatz_from_json(const json& j) {
    try {
        const int n = j.at("n").get<int>();
        std::vector<PauliTerm> terms;
        for (const auto& s : j.at("terms")) terms.emplace_back(s.get<std::string>());
        std::vector<std::string> labels;
        if (j.contains("labels")) labels = j.at("labels").get<std::vector<std::string>>();
        return make_ansatz(n, std::move(terms), std::move(labels));
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed ansatz JSON: ") + e.what());
    }
}

json pretrain_to_json(const PretrainResult& r) {
    json j;
    j["method"] = r.method;
    j["n"] = r.sub_ansatz.n;
    j["chi"] = std::vector<double>(r.chi.data(), r.chi.data() + r.chi.size());
    j["terms"] = json::array();
    for (const auto& t : r.sub_ansatz.terms) j["terms"].push_back(t.letters());
    if (std::isfinite(r.achieved_entropy)) {
        j["achieved_entropy"] = r.achieved_entropy;
    } else {
        j["achieved_entropy"] = nullptr;
    }
    j["iterations"] = r.iterations;
    if (r.hit_iteration_cap) j["hit_iteration_cap"] = true;
    if (!r.warnings.empty()) j["warnings"] = r.warnings;
    return j;
}

PretrainResult pretrain_from_json(const json& j) {
    try {
        PretrainResult r;
        r.method = j.at("method").get<std::string>();
        std::vector<PauliTerm> terms;
        for (const auto& s : j.at("terms")) terms.emplace_back(s.get<std::string>());
        if (terms.empty()) throw ConfigError("pre-training file lists no terms");
        const int n = j.contains("n") ? j.at("n").get<int>() : terms.front().num_qubits();
        r.sub_ansatz = make_ansatz(n, std::move(terms));
        const auto chi = j.at("chi").get<std::vector<double>>();
        if (chi.size() != r.sub_ansatz.size()) throw ConfigError("chi length does not match the term list");
        r.chi = Eigen::Map<const RVector>(chi.data(), static_cast<Eigen::Index>(chi.size()));
        const auto& s = j.at("achieved_entropy");
        r.achieved_entropy = s.is_null() ? std::nan("") : s.get<double>();
        r.iterations = j.at("iterations").get<int>();
        return r;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed pre-training JSON: ") + e.what());
    }
}

std::string format_number(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

void write_trace_csv(std::ostream& out, const TrainingTrace& trace) {
    out << "t,S,max_abs_error,grad_norm,gamma\n";
    for (const auto& r : trace.rows) {
        out << r.t << ',' << format_number(r.S) << ',' << format_number(r.max_abs_error) << ','
            << format_number(r.grad_norm) << ',' << format_number(r.gamma) << '\n';
    }
}

void write_scan_csv(std::ostream& out, const std::vector<ScanRecord>& records) {
    out << "kind,n,mu,instance,min_eig,max_eig\n";
    for (const auto& r : records) {
        out << r.kind << ',' << r.n << ',' << format_number(r.mu) << ',' << r.instance << ','
            << format_number(r.min_eig) << ',' << format_number(r.max_eig) << '\n';
    }
}

}  // namespace qbm

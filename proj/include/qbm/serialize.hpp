#pragma once

#include <iosfwd>
#include <vector>

#include <json.hpp>

#include "qbm/calculus.hpp"
#include "qbm/operators.hpp"
#include "qbm/pretrain.hpp"
#include "qbm/trainer.hpp"

namespace qbm {

using json = nlohmann::ordered_json;

// {"n": .., "terms": ["XIZ", ..], "labels": [..]}
json ansatz_to_json(const Ansatz& ansatz);
Ansatz ansatz_from_json(const json& j);

// {"method", "chi", "terms", "achieved_entropy", "iterations"}
json pretrain_to_json(const PretrainResult& result);
PretrainResult pretrain_from_json(const json& j);

// Fixed-format number rendering shared by every CSV writer (%.17g).
std::string format_number(double value);

// t,S,max_abs_error,grad_norm,gamma
void write_trace_csv(std::ostream& out, const TrainingTrace& trace);

// kind,n,mu,instance,min_eig,max_eig
void write_scan_csv(std::ostream& out, const std::vector<ScanRecord>& records);

}  // namespace qbm

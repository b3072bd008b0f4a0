#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "qbm/gibbs.hpp"

namespace qbm {

enum class NoiseKind { exact, gaussian, sampling };

// Gradient estimator noise. kappa is the model-side precision (standard
// deviation), xi the data-side one.
struct NoiseModel {
    NoiseKind kind = NoiseKind::exact;
    double kappa = 0.0;
    double xi = 0.0;
    int shots = 0;               // sampling: +-1 draws per model expectation
    bool minibatch_data = false;  // data side from dataset mini-batches of size ceil(1/xi^2)

    static NoiseModel exact() { return {}; }
    static NoiseModel gaussian(double kappa, double xi) { return {NoiseKind::gaussian, kappa, xi, 0, false}; }
    // Combined variance kappa^2 + xi^2 = v, split equally.
    static NoiseModel combined(double variance_sum);
    static NoiseModel sampling(int shots, double xi = 0.0) { return {NoiseKind::sampling, 0.0, xi, shots, false}; }

    double variance_sum() const { return kappa * kappa + xi * xi; }
    void validate() const;  // throws ConfigError
};

std::string to_string(NoiseKind kind);
NoiseKind noise_kind_from_string(const std::string& name);

// Draw order per call: the model side for terms 0..m-1, then the data side
// for terms 0..m-1.
RVector stochastic_gradient(const GibbsModel& model, const Target& target, const NoiseModel& noise,
                            std::mt19937_64& rng);
RVector stochastic_gradient(const GibbsModel& model, const Target& target, const RVector& target_expectations,
                            const NoiseModel& noise, std::mt19937_64& rng);

enum class ScheduleKind { constant, custom, thm1, thm2_step };

std::string to_string(ScheduleKind kind);
ScheduleKind schedule_kind_from_string(const std::string& name);

struct ScheduleParams {
    std::optional<double> gamma;         // constant / custom
    std::optional<double> epsilon;       // thm1
    std::optional<std::size_t> m;        // thm1
    std::optional<double> variance_sum;  // thm1: kappa^2 + xi^2
    std::optional<double> a;             // thm2_step
    std::optional<double> b;             // thm2_step
    std::optional<int> horizon;          // thm2_step: T
};

// thm1: min(1/L, eps / (4 m^2 (kappa^2 + xi^2))) with L = 2m.
// thm2_step: 1/b when T <= b/a or t < ceil(T/2), else 2 / (a (s + t - k0))
// with s = 2b/a. Throws ConfigError when parameters are missing.
double lr_schedule(ScheduleKind kind, const ScheduleParams& params, int t);

// Whether the thm1 rate was limited by 1/L.
bool thm1_rate_capped(const ScheduleParams& params);

struct TrainingConfig {
    std::shared_ptr<const Ansatz> ansatz;
    RVector theta0;  // empty means zeros
    Target target;
    NoiseModel noise;
    ScheduleKind schedule = ScheduleKind::constant;
    ScheduleParams schedule_params;
    double epsilon = 0.1;
    int max_iters = 1000;
    std::uint64_t seed = 0;
    int record_every = 1;
    bool keep_theta = false;

    void validate() const;  // throws ConfigError / ContractError
};

struct TraceRow {
    int t = 0;
    double S = 0.0;  // NaN when the target entropy is unknown
    double max_abs_error = 0.0;
    double grad_norm = 0.0;  // Euclidean norm of the exact gradient
    double gamma = 0.0;      // rate applied for the step t -> t+1 (0 on the last row)
    std::optional<RVector> theta;
};

struct TrainingTrace {
    std::vector<TraceRow> rows;
    int best_t = 0;
    double best_max_error = 0.0;
    bool converged = false;
    int iterations = 0;  // updates performed
    RVector final_theta;
    std::vector<std::string> warnings;
};

// theta^{t+1} = theta^t - gamma_t g_hat(theta^t). Stops at the first t whose
// exact max error is <= epsilon, or after max_iters updates. Step t draws its
// noise from a stream seeded by (seed, t). Throws NumericalAbort when theta
// becomes non-finite.
TrainingTrace sgd_train(const TrainingConfig& config);

struct BoundsInput {
    std::size_t m = 0;
    double kappa = 0.0;
    double xi = 0.0;
    double epsilon = 0.1;
    double delta0 = 1.0;
    std::optional<double> alpha;
    double lambda_success = 0.9;
    std::optional<int> k_locality;
};

struct BoundsRecord {
    double T_thm1 = 0.0;
    double gamma_thm1 = 0.0;
    std::optional<double> T_thm2;
    double N_pauli = 0.0;  // order of magnitude only (unit constant)
    std::optional<double> N_klocal;
    bool precondition_met = true;  // kappa^2 + xi^2 >= eps / (2m)
    std::vector<std::string> warnings;
};

BoundsRecord theorem_bounds(const BoundsInput& in);

}  // namespace qbm

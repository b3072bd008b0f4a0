#include "qbm/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qbm/calculus.hpp"
#include "qbm/errors.hpp"
#include "qbm/targets.hpp"

namespace qbm {

NoiseModel NoiseModel::combined(double variance_sum) {
    if (variance_sum < 0.0) throw ConfigError("noise variance must be non-negative");
    if (variance_sum == 0.0) return exact();
    const double s = std::sqrt(0.5 * variance_sum);
    return gaussian(s, s);
}

void NoiseModel::validate() const {
    if (!(kappa >= 0.0) || !(xi >= 0.0) || !std::isfinite(kappa) || !std::isfinite(xi)) {
        throw ConfigError("noise precisions must be finite and non-negative");
    }
    switch (kind) {
        case NoiseKind::exact:
            if (kappa != 0.0 || xi != 0.0) throw ConfigError("exact noise requires kappa = xi = 0");
            if (minibatch_data) throw ConfigError("exact noise cannot mini-batch the data");
            break;
        case NoiseKind::gaussian:
            break;
        case NoiseKind::sampling:
            if (shots < 1) throw ConfigError("sampling noise needs shots >= 1");
            break;
    }
    if (minibatch_data && !(xi > 0.0)) throw ConfigError("mini-batching needs xi > 0");
}

std::string to_string(NoiseKind kind) {
    switch (kind) {
        case NoiseKind::exact:
            return "exact";
        case NoiseKind::gaussian:
            return "gaussian";
        case NoiseKind::sampling:
            return "sampling";
    }
    return "unknown";
}

NoiseKind noise_kind_from_string(const std::string& name) {
    if (name == "exact") return NoiseKind::exact;
    if (name == "gaussian") return NoiseKind::gaussian;
    if (name == "sampling") return NoiseKind::sampling;
    throw ConfigError("unknown noise kind \"" + name + "\"");
}

namespace {

// Eigenvalue of a diagonal Pauli string on a bitstring.
double diagonal_value(const PauliTerm& term, const std::string& bits) {
    int parity = 0;
    for (std::size_t q = 0; q < bits.size(); ++q) {
        if (term.letters()[q] == 'Z' && bits[q] == '1') parity ^= 1;
    }
    return parity ? -1.0 : 1.0;
}

}  // namespace

RVector stochastic_gradient(const GibbsModel& model, const Target& target, const RVector& target_exp,
                            const NoiseModel& noise, std::mt19937_64& rng) {
    const RVector model_exp = model.expectations();
    if (noise.kind == NoiseKind::exact) return model_exp - target_exp;

    const Ansatz& ansatz = *model.ansatz;
    const Eigen::Index m = model_exp.size();
    RVector model_hat = model_exp;
    if (noise.kind == NoiseKind::gaussian) {
        if (noise.kappa > 0.0) {
            std::normal_distribution<double> z(0.0, noise.kappa);
            for (Eigen::Index i = 0; i < m; ++i) model_hat(i) += z(rng);
        }
    } else {
        for (Eigen::Index i = 0; i < m; ++i) {
            const double p = std::clamp(0.5 * (1.0 + model_exp(i)), 0.0, 1.0);
            std::binomial_distribution<int> draws(noise.shots, p);
            model_hat(i) = 2.0 * static_cast<double>(draws(rng)) / noise.shots - 1.0;
        }
    }

    RVector data_hat = target_exp;
    if (noise.minibatch_data) {
        if (!target.dataset) throw ContractError("mini-batching needs a dataset-encoded target");
        const auto& samples = target.dataset->samples;
        const auto batch = static_cast<std::size_t>(std::ceil(1.0 / (noise.xi * noise.xi)));
        std::uniform_int_distribution<std::size_t> pick(0, samples.size() - 1);
        std::vector<std::size_t> idx(batch);
        for (auto& k : idx) k = pick(rng);
        std::normal_distribution<double> z(0.0, noise.xi);
        for (Eigen::Index i = 0; i < m; ++i) {
            const PauliTerm& term = ansatz.terms[static_cast<std::size_t>(i)];
            if (term.is_diagonal()) {
                double acc = 0.0;
                for (std::size_t k : idx) acc += diagonal_value(term, samples[k]);
                data_hat(i) = acc / static_cast<double>(batch);
            } else {
                data_hat(i) += z(rng);
            }
        }
    } else if (noise.xi > 0.0) {
        std::normal_distribution<double> z(0.0, noise.xi);
        for (Eigen::Index i = 0; i < m; ++i) data_hat(i) += z(rng);
    }
    return model_hat - data_hat;
}

RVector stochastic_gradient(const GibbsModel& model, const Target& target, const NoiseModel& noise,
                            std::mt19937_64& rng) {
    if (!model.ansatz) throw ContractError("stochastic gradient needs a model with an ansatz");
    return stochastic_gradient(model, target, target.expectations_for(*model.ansatz), noise, rng);
}

std::string to_string(ScheduleKind kind) {
    switch (kind) {
        case ScheduleKind::constant:
            return "constant";
        case ScheduleKind::custom:
            return "custom";
        case ScheduleKind::thm1:
            return "thm1";
        case ScheduleKind::thm2_step:
            return "thm2_step";
    }
    return "unknown";
}

ScheduleKind schedule_kind_from_string(const std::string& name) {
    if (name == "constant") return ScheduleKind::constant;
    if (name == "custom") return ScheduleKind::custom;
    if (name == "thm1") return ScheduleKind::thm1;
    if (name == "thm2_step") return ScheduleKind::thm2_step;
    throw ConfigError("unknown schedule \"" + name + "\"");
}

namespace {

template <typename T>
T need(const std::optional<T>& v, const char* what) {
    if (!v) throw ConfigError(std::string("learning-rate schedule is missing '") + what + "'");
    return *v;
}

double thm1_uncapped(const ScheduleParams& p) {
    const double eps = need(p.epsilon, "epsilon");
    const double m = static_cast<double>(need(p.m, "m"));
    const double v = need(p.variance_sum, "variance_sum");
    if (!(eps > 0.0) || !(m > 0.0) || !(v > 0.0)) throw ConfigError("thm1 needs epsilon, m, variance_sum > 0");
    return eps / (4.0 * m * m * v);
}

}  // namespace

bool thm1_rate_capped(const ScheduleParams& p) {
    return thm1_uncapped(p) > 1.0 / smoothness_constant(need(p.m, "m"));
}

double lr_schedule(ScheduleKind kind, const ScheduleParams& p, int t) {
    if (t < 0) throw ConfigError("iteration index must be non-negative");
    switch (kind) {
        case ScheduleKind::constant:
        case ScheduleKind::custom: {
            const double g = need(p.gamma, "gamma");
            if (!(g > 0.0)) throw ConfigError("learning rate must be positive");
            return g;
        }
        case ScheduleKind::thm1:
            return std::min(1.0 / smoothness_constant(need(p.m, "m")), thm1_uncapped(p));
        case ScheduleKind::thm2_step: {
            const double a = need(p.a, "a");
            const double b = need(p.b, "b");
            const int horizon = need(p.horizon, "horizon");
            if (!(a > 0.0) || !(b >= a)) throw ConfigError("thm2_step needs 0 < a <= b");
            if (horizon < 1) throw ConfigError("thm2_step needs horizon >= 1");
            const int k0 = (horizon + 1) / 2;
            if (static_cast<double>(horizon) <= b / a || t < k0) return 1.0 / b;
            const double s = 2.0 * b / a;
            return 2.0 / (a * (s + static_cast<double>(t - k0)));
        }
    }
    throw ConfigError("unknown schedule");
}

void TrainingConfig::validate() const {
    if (!ansatz) throw ConfigError("training needs an ansatz");
    ansatz->validate();
    if (target.n != ansatz->n) throw ConfigError("target and ansatz qubit counts differ");
    if (theta0.size() != 0 && static_cast<std::size_t>(theta0.size()) != ansatz->size()) {
        throw ConfigError("theta0 length does not match the ansatz");
    }
    if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");
    if (max_iters < 0) throw ConfigError("max_iters must be non-negative");
    if (record_every < 1) throw ConfigError("record_every must be >= 1");
    noise.validate();
    if (schedule == ScheduleKind::thm1) {
        const double m = static_cast<double>(ansatz->size());
        const double v = schedule_params.variance_sum.value_or(noise.variance_sum());
        if (v < epsilon / (2.0 * m)) {
            throw ConfigError("thm1 schedule requires kappa^2 + xi^2 >= epsilon / (2m)");
        }
    }
}

TrainingTrace sgd_train(const TrainingConfig& config) {
    config.validate();
    const auto& ansatz = config.ansatz;
    const Eigen::Index m = static_cast<Eigen::Index>(ansatz->size());
    ScheduleParams sp = config.schedule_params;
    if (config.schedule == ScheduleKind::thm1) {
        if (!sp.epsilon) sp.epsilon = config.epsilon;
        if (!sp.m) sp.m = ansatz->size();
        if (!sp.variance_sum) sp.variance_sum = config.noise.variance_sum();
    }

    TrainingTrace trace;
    if (config.schedule == ScheduleKind::thm1 && thm1_rate_capped(sp)) {
        trace.warnings.push_back("thm1 learning rate capped at 1/L = 1/(2m)");
    }
    const RVector target_exp = config.target.expectations_for(*ansatz);
    const bool has_entropy = config.target.eta_entropy.has_value();
    RVector theta = config.theta0.size() == 0 ? RVector::Zero(m) : config.theta0;
    trace.best_max_error = std::numeric_limits<double>::infinity();

    for (int t = 0;; ++t) {
        const GibbsModel model = gibbs_state(ansatz, theta);
        const RVector model_exp = model.expectations();
        const RVector exact_grad = model_exp - target_exp;
        const double max_err = exact_grad.lpNorm<Eigen::Infinity>();
        const bool converged = max_err <= config.epsilon;
        const bool last = converged || t >= config.max_iters;

        TraceRow row;
        row.t = t;
        row.S = has_entropy ? relative_entropy(*config.target.eta_entropy, target_exp, model)
                            : std::numeric_limits<double>::quiet_NaN();
        row.max_abs_error = max_err;
        row.grad_norm = exact_grad.norm();
        row.gamma = last ? 0.0 : lr_schedule(config.schedule, sp, t);
        if (config.keep_theta) row.theta = theta;
        if (t % config.record_every == 0 || last) {
            if (max_err < trace.best_max_error) {
                trace.best_max_error = max_err;
                trace.best_t = t;
            }
            trace.rows.push_back(std::move(row));
        }
        if (last) {
            trace.converged = converged;
            trace.iterations = t;
            break;
        }

        std::seed_seq seq{static_cast<std::uint32_t>(config.seed), static_cast<std::uint32_t>(config.seed >> 32),
                          static_cast<std::uint32_t>(t), static_cast<std::uint32_t>(static_cast<std::uint64_t>(t) >> 32)};
        std::mt19937_64 rng(seq);
        const double gamma = lr_schedule(config.schedule, sp, t);
        const RVector g = config.noise.kind == NoiseKind::exact
                              ? exact_grad
                              : stochastic_gradient(model, config.target, target_exp, config.noise, rng);
        theta -= gamma * g;
        if (!theta.allFinite()) {
            throw NumericalAbort("non-finite parameters after step " + std::to_string(t) + " (learning rate " +
                                 std::to_string(gamma) + " too large?)");
        }
    }
    trace.final_theta = theta;
    return trace;
}

BoundsRecord theorem_bounds(const BoundsInput& in) {
    if (in.m == 0) throw ConfigError("m must be positive");
    if (!(in.epsilon > 0.0)) throw ConfigError("epsilon must be positive");
    if (!(in.lambda_success > 0.0 && in.lambda_success < 1.0)) throw ConfigError("lambda must be in (0, 1)");
    BoundsRecord out;
    const double m = static_cast<double>(in.m);
    const double v = in.kappa * in.kappa + in.xi * in.xi;
    const double eps = in.epsilon;
    out.precondition_met = v >= eps / (2.0 * m);
    if (!out.precondition_met) out.warnings.push_back("kappa^2 + xi^2 < epsilon / (2m): thm1 precondition not met");
    out.T_thm1 = 48.0 * in.delta0 * m * m * v / std::pow(eps, 4);
    out.gamma_thm1 = v > 0.0 ? std::min(1.0 / smoothness_constant(in.m), eps / (4.0 * m * m * v))
                             : 1.0 / smoothness_constant(in.m);
    if (in.alpha) {
        if (!(*in.alpha > 0.0)) throw ConfigError("alpha must be positive");
        out.T_thm2 = 18.0 * m * m * v / (*in.alpha * *in.alpha * eps * eps);
    }
    // log(m / (1 - lambda^(1/T))) with unit constants; order of magnitude only.
    const double horizon = std::max(out.T_thm1, 1.0);
    const double failure = -std::expm1(std::log(in.lambda_success) / horizon);
    const double log_term = std::log(m / failure);
    if (in.kappa > 0.0) {
        out.N_pauli = log_term / std::pow(in.kappa, 4);
    } else {
        out.N_pauli = std::numeric_limits<double>::infinity();
        out.warnings.push_back("kappa = 0 needs unbounded shots");
    }
    if (in.k_locality) {
        out.N_klocal = in.kappa > 0.0 ? std::pow(3.0, *in.k_locality) / (in.kappa * in.kappa) * log_term
                                      : std::numeric_limits<double>::infinity();
    }
    return out;
}

}  // namespace qbm

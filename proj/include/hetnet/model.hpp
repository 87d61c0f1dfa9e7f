#pragma once

// Domain vocabulary: fading laws, tiers, scenarios, connectivity models and
// the coverage report record. All value types, immutable in spirit; the
// operations here are pure.

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "specfun.hpp"

namespace hetnet {

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

enum class FadingKind { Exponential, LogNormalDb, Constant };

// Shadow-fading law. param is the mean (Exponential), the dB standard
// deviation of the zero-dB-mean variable (LogNormalDb), or the constant value.
// The dB convention is Psi = 10^{X/10}, X ~ N(0, sigma_db^2), so the
// log-domain deviation is sigma_db * ln(10)/10.
struct FadingDistribution {
    FadingKind kind = FadingKind::Exponential;
    double param = 1.0;

    static FadingDistribution exponential(double mean) { return {FadingKind::Exponential, mean}; }
    static FadingDistribution lognormal_db(double sigma_db) { return {FadingKind::LogNormalDb, sigma_db}; }
    static FadingDistribution constant(double value) { return {FadingKind::Constant, value}; }

    double sigma_ln() const { return param * std::log(10.0) / 10.0; }

    bool valid() const {
        switch (kind) {
            case FadingKind::Exponential: return param > 0.0;
            case FadingKind::LogNormalDb: return param >= 0.0;
            case FadingKind::Constant: return param > 0.0;
        }
        return false;
    }

    bool operator==(const FadingDistribution&) const = default;
};

// E[Psi^s] for s in (0,1]. Exponential(m): m^s Gamma(1+s);
// LogNormalDb(sigma): exp(s^2 sigma_ln^2 / 2); Constant(c): c^s.
inline double fading_moment(const FadingDistribution& dist, double s) {
    if (!(s > 0.0 && s <= 1.0))
        throw std::domain_error("fading_moment: order must lie in (0,1]");
    if (!dist.valid()) throw std::domain_error("fading_moment: invalid distribution");
    switch (dist.kind) {
        case FadingKind::Exponential:
            return std::pow(dist.param, s) * gamma_fn(1.0 + s);
        case FadingKind::LogNormalDb: {
            double sl = dist.sigma_ln();
            return std::exp(0.5 * s * s * sl * sl);
        }
        case FadingKind::Constant:
            return std::pow(dist.param, s);
    }
    throw std::logic_error("fading_moment: unreachable");
}

// First and second moments, used by the biased-association rule and by the
// simulator's guard-radius policy.
inline double fading_mean(const FadingDistribution& dist) {
    switch (dist.kind) {
        case FadingKind::Exponential: return dist.param;
        case FadingKind::LogNormalDb: {
            double sl = dist.sigma_ln();
            return std::exp(0.5 * sl * sl);
        }
        case FadingKind::Constant: return dist.param;
    }
    throw std::logic_error("fading_mean: unreachable");
}

inline double fading_second_moment(const FadingDistribution& dist) {
    switch (dist.kind) {
        case FadingKind::Exponential: return 2.0 * dist.param * dist.param;
        case FadingKind::LogNormalDb: {
            double sl = dist.sigma_ln();
            return std::exp(2.0 * sl * sl);
        }
        case FadingKind::Constant: return dist.param * dist.param;
    }
    throw std::logic_error("fading_second_moment: unreachable");
}

// Quantile transform; drives both the simulator and fading expectations.
inline double fading_quantile(const FadingDistribution& dist, double q) {
    switch (dist.kind) {
        case FadingKind::Exponential: return -dist.param * std::log1p(-q);
        case FadingKind::LogNormalDb: return std::exp(dist.sigma_ln() * inverse_normal_cdf(q));
        case FadingKind::Constant: return dist.param;
    }
    throw std::logic_error("fading_quantile: unreachable");
}

// gamma = 1 + 1/beta, the factor turning an SINR-threshold event into a
// signal-versus-total-power comparison.
inline double gamma_factor(double beta) {
    if (!(beta > 0.0)) throw std::domain_error("gamma_factor: threshold must be positive");
    return 1.0 + 1.0 / beta;
}

enum class Access { Open, Closed };

// One network tier. Thresholds and biases are linear and meaningful for open
// tiers only; closed tiers contribute interference and carry none.
struct TierConfig {
    double density = 1.0;        // BSs per unit area, >= 0
    double power = 1.0;          // linear transmit power, > 0
    double pathloss_exp = 4.0;   // > 2
    FadingDistribution fading{};
    double sinr_threshold = 1.0; // linear, open tiers
    double bias = 1.0;           // linear, open tiers (biased association)
    Access access = Access::Open;
};

struct HetNetScenario {
    std::vector<TierConfig> open_tiers;
    std::vector<TierConfig> closed_tiers;
    double noise = 0.0;  // linear power, >= 0
};

struct ConnectivityModel {
    enum class Kind { MaxSinr, NearestBs, Mirp, Mbrp };
    Kind kind = Kind::MaxSinr;
    std::vector<double> biases;  // Mbrp only, one positive entry per open tier

    static ConnectivityModel max_sinr() { return {Kind::MaxSinr, {}}; }
    static ConnectivityModel nearest_bs() { return {Kind::NearestBs, {}}; }
    static ConnectivityModel mirp() { return {Kind::Mirp, {}}; }
    static ConnectivityModel mbrp(std::vector<double> b) { return {Kind::Mbrp, std::move(b)}; }
};

inline const char* model_name(ConnectivityModel::Kind k) {
    switch (k) {
        case ConnectivityModel::Kind::MaxSinr: return "maxsinr";
        case ConnectivityModel::Kind::NearestBs: return "nearest";
        case ConnectivityModel::Kind::Mirp: return "mirp";
        case ConnectivityModel::Kind::Mbrp: return "mbrp";
    }
    return "?";
}

enum class CoverageMethod { Analytic, MonteCarlo };

struct CoverageReport {
    double probability = 0.0;
    CoverageMethod method = CoverageMethod::Analytic;
    double stderr_est = 0.0;  // sampling stderr or quadrature error estimate
    std::vector<double> tier_serving_prob;  // P(served by tier k and covered)
    std::optional<double> conditional_rate; // bits per channel use
};

// Returns every violated invariant; empty means the scenario is usable by
// all downstream operations.
inline std::vector<std::string> validate_scenario(const HetNetScenario& sc) {
    std::vector<std::string> v;
    if (sc.open_tiers.empty()) v.push_back("at least one open tier");
    auto check_tier = [&](const TierConfig& t, const std::string& label, bool open) {
        if (!(t.density >= 0.0)) v.push_back(label + ": density must be nonnegative");
        if (!(t.power > 0.0)) v.push_back(label + ": power must be positive");
        if (!(t.pathloss_exp > 2.0)) v.push_back(label + ": pathloss_exp must exceed 2");
        if (!t.fading.valid()) v.push_back(label + ": invalid fading parameters");
        if (open) {
            if (!(t.sinr_threshold > 0.0)) v.push_back(label + ": sinr_threshold must be positive");
            if (!(t.bias > 0.0)) v.push_back(label + ": bias must be positive");
            if (t.access != Access::Open) v.push_back(label + ": open tier marked closed");
        } else if (t.access != Access::Closed) {
            v.push_back(label + ": closed tier marked open");
        }
        // fractional-moment finiteness, checked by evaluation
        if (t.fading.valid() && t.pathloss_exp > 2.0) {
            double m = fading_moment(t.fading, 2.0 / t.pathloss_exp);
            if (!std::isfinite(m) || !(m > 0.0))
                v.push_back(label + ": fractional fading moment not finite");
        }
    };
    for (std::size_t i = 0; i < sc.open_tiers.size(); ++i)
        check_tier(sc.open_tiers[i], "open_tiers[" + std::to_string(i) + "]", true);
    for (std::size_t i = 0; i < sc.closed_tiers.size(); ++i)
        check_tier(sc.closed_tiers[i], "closed_tiers[" + std::to_string(i) + "]", false);
    if (!(sc.noise >= 0.0)) v.push_back("noise must be nonnegative");
    return v;
}

inline void require_valid(const HetNetScenario& sc) {
    auto v = validate_scenario(sc);
    if (!v.empty()) {
        std::string msg = "invalid scenario:";
        for (const auto& s : v) msg += " [" + s + "]";
        throw std::invalid_argument(msg);
    }
}

}  // namespace hetnet

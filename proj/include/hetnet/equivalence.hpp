#pragma once

// Stochastic-equivalence reductions: collapsing closed tiers into one
// non-homogeneous 1-D process, trading arbitrary fading for unit-mean
// exponential fading (max-power association family), and the 1-D equivalent
// densities behind the max-power and biased-association analyses.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "model.hpp"

namespace hetnet {

struct RadialDensityTerm {
    double coef = 0.0;  // >= 0
    double expo = 0.0;  // > -1
};

// lambda(r) = sum_i coef_i r^{expo_i}, r >= 0.
struct RadialDensity {
    std::vector<RadialDensityTerm> terms;

    double operator()(double r) const {
        double s = 0.0;
        for (const auto& t : terms) s += t.coef * std::pow(r, t.expo);
        return s;
    }

    // int_0^r lambda(v) dv, exact antiderivative.
    double integral_to(double r) const {
        double s = 0.0;
        for (const auto& t : terms) s += t.coef * std::pow(r, t.expo + 1.0) / (t.expo + 1.0);
        return s;
    }
};

struct EquivalentTwoTier {
    double open_density = 0.0;
    double closed_density = 0.0;
    double noise = 0.0;
};

namespace detail {

// Mapping a homogeneous planar tier through r -> (P E[Psi^{2/e}]-weighted)
// power ordering gives a 1-D density (2 pi / e) * scale^{2/e} * lambda *
// r^{2/e - 1}; `scale` is the per-tier product entering the map.
inline RadialDensityTerm one_d_term(double lambda, double scale, double eps) {
    double a = 2.0 / eps;
    return {lambda * (2.0 * M_PI / eps) * std::pow(scale, a), a - 1.0};
}

}  // namespace detail

// Single equivalent closed tier: unit power/fading/path-loss BSs on a 1-D
// non-homogeneous process whose interference sum matches the closed-tier
// interference in distribution. The coefficient carries the 2 pi / eps factor
// required for the Laplace transform of sum R~^{-1} to reproduce the closed
// interference transform (checked by the Laplace-match tests).
inline RadialDensity collapse_closed_tiers(const HetNetScenario& sc) {
    require_valid(sc);
    RadialDensity out;
    for (const auto& t : sc.closed_tiers) {
        if (t.density == 0.0) continue;
        double a = 2.0 / t.pathloss_exp;
        double scale = t.power * std::pow(fading_moment(t.fading, a), t.pathloss_exp / 2.0);
        out.terms.push_back(detail::one_d_term(t.density, scale, t.pathloss_exp));
    }
    return out;
}

// Replaces every fading law by unit-mean exponential while scaling each
// density by E[Psi^{2/e}] / Gamma(1 + 2/e); thresholds, powers, exponents and
// noise are untouched. Coverage under max-power association is invariant.
inline HetNetScenario exponentialize(const HetNetScenario& sc) {
    require_valid(sc);
    HetNetScenario out = sc;
    auto convert = [](TierConfig& t) {
        double a = 2.0 / t.pathloss_exp;
        t.density *= fading_moment(t.fading, a) / gamma_fn(1.0 + a);
        t.fading = FadingDistribution::exponential(1.0);
    };
    for (auto& t : out.open_tiers) convert(t);
    for (auto& t : out.closed_tiers) convert(t);
    return out;
}

struct Mirp1dDensities {
    std::vector<RadialDensity> open;  // one per open tier
    RadialDensity closed;             // all closed tiers combined
};

// 1-D equivalent of the max-instantaneous-power view: per-tier density
// lambda_k (2 pi / e_k) (P_k E[Psi^{2/e_k}])^{2/e_k} r^{2/e_k - 1}
// written with the fading moment folded into the power-like scale.
inline Mirp1dDensities mirp_1d_densities(const HetNetScenario& sc) {
    require_valid(sc);
    Mirp1dDensities out;
    for (const auto& t : sc.open_tiers) {
        RadialDensity d;
        double a = 2.0 / t.pathloss_exp;
        double scale = t.power * std::pow(fading_moment(t.fading, a), t.pathloss_exp / 2.0);
        if (t.density > 0.0) d.terms.push_back(detail::one_d_term(t.density, scale, t.pathloss_exp));
        out.open.push_back(std::move(d));
    }
    out.closed = collapse_closed_tiers(sc);
    return out;
}

struct Mbrp1dDensities {
    std::vector<RadialDensity> open;
    RadialDensity closed;
    std::vector<double> equivalent_powers;  // (E[Psi_k] B_k)^{-1} per open tier
};

// Biased-association equivalent: distances ordered by averaged biased power,
// fading kept as marks (original laws), per-tier equivalent transmit power
// (E[Psi] B)^{-1}, closed tier mapped by power only.
inline Mbrp1dDensities mbrp_1d_densities(const HetNetScenario& sc, const std::vector<double>& biases) {
    require_valid(sc);
    if (biases.size() != sc.open_tiers.size())
        throw std::invalid_argument("mbrp_1d_densities: need one bias per open tier");
    for (double b : biases)
        if (!(b > 0.0)) throw std::invalid_argument("mbrp_1d_densities: biases must be positive");
    Mbrp1dDensities out;
    for (std::size_t k = 0; k < sc.open_tiers.size(); ++k) {
        const auto& t = sc.open_tiers[k];
        RadialDensity d;
        double scale = t.power * fading_mean(t.fading) * biases[k];
        if (t.density > 0.0) d.terms.push_back(detail::one_d_term(t.density, scale, t.pathloss_exp));
        out.open.push_back(std::move(d));
        out.equivalent_powers.push_back(1.0 / (fading_mean(t.fading) * biases[k]));
    }
    for (const auto& t : sc.closed_tiers) {
        if (t.density == 0.0) continue;
        out.closed.terms.push_back(detail::one_d_term(t.density, t.power, t.pathloss_exp));
    }
    return out;
}

// Common-exponent normalization to a two-tier network with unit open density:
// closed density and noise rescale by the total open weight
// W = sum_l lambda_l P_l^{2/e} E[Psi_l^{2/e}].
inline EquivalentTwoTier same_eps_reduction(const HetNetScenario& sc) {
    require_valid(sc);
    double eps = sc.open_tiers.front().pathloss_exp;
    for (const auto& t : sc.open_tiers)
        if (t.pathloss_exp != eps)
            throw std::invalid_argument("same_eps_reduction: mixed path-loss exponents");
    for (const auto& t : sc.closed_tiers)
        if (t.pathloss_exp != eps)
            throw std::invalid_argument("same_eps_reduction: mixed path-loss exponents");
    double a = 2.0 / eps;
    double w_open = 0.0, w_closed = 0.0;
    for (const auto& t : sc.open_tiers)
        w_open += t.density * std::pow(t.power, a) * fading_moment(t.fading, a);
    for (const auto& t : sc.closed_tiers)
        w_closed += t.density * std::pow(t.power, a) * fading_moment(t.fading, a);
    if (w_open == 0.0)
        throw std::invalid_argument("same_eps_reduction: zero total open weight");
    return {1.0, w_closed / w_open, sc.noise * std::pow(w_open, -eps / 2.0)};
}

}  // namespace hetnet

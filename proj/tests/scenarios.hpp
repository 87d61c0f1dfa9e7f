#pragma once

// Scenario builders shared across the test suites.

#include "hetnet/model.hpp"

namespace scenarios {

using namespace hetnet;

inline TierConfig open_tier(double density, double power, double eps, FadingDistribution fading,
                            double beta, double bias = 1.0) {
    TierConfig t;
    t.density = density;
    t.power = power;
    t.pathloss_exp = eps;
    t.fading = fading;
    t.sinr_threshold = beta;
    t.bias = bias;
    t.access = Access::Open;
    return t;
}

inline TierConfig closed_tier(double density, double power, double eps,
                              FadingDistribution fading) {
    TierConfig t;
    t.density = density;
    t.power = power;
    t.pathloss_exp = eps;
    t.fading = fading;
    t.access = Access::Closed;
    return t;
}

inline HetNetScenario single_tier(double density, double power, double eps,
                                  FadingDistribution fading, double beta, double noise = 0.0) {
    HetNetScenario sc;
    sc.open_tiers.push_back(open_tier(density, power, eps, fading, beta));
    sc.noise = noise;
    return sc;
}

// The macro/femto study configuration: lambda2 = 5 lambda1, P1 = 25 P2,
// eps = 3 on both tiers.
inline HetNetScenario two_tier_study(double beta1, double beta2, FadingDistribution f1,
                                     FadingDistribution f2, double noise = 0.0) {
    HetNetScenario sc;
    sc.open_tiers.push_back(open_tier(1.0, 25.0, 3.0, f1, beta1));
    sc.open_tiers.push_back(open_tier(5.0, 1.0, 3.0, f2, beta2));
    sc.noise = noise;
    return sc;
}

// Closed-access variant: the femto tier only interferes.
inline HetNetScenario two_tier_study_closed(double beta1, FadingDistribution f1,
                                            FadingDistribution f2, double noise = 0.0) {
    HetNetScenario sc;
    sc.open_tiers.push_back(open_tier(1.0, 25.0, 3.0, f1, beta1));
    sc.closed_tiers.push_back(closed_tier(5.0, 1.0, 3.0, f2));
    sc.noise = noise;
    return sc;
}

}  // namespace scenarios

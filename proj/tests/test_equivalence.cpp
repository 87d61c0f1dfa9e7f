#include <doctest.h>

#include <cmath>

#include "hetnet/analytic.hpp"
#include "hetnet/equivalence.hpp"
#include "oracles.hpp"
#include "scenarios.hpp"

using namespace hetnet;
using doctest::Approx;

namespace {
HetNetScenario with_closed(std::vector<TierConfig> closed) {
    HetNetScenario sc;
    sc.open_tiers.push_back(
        scenarios::open_tier(1.0, 1.0, 4.0, FadingDistribution::exponential(1.0), 1.0));
    sc.closed_tiers = std::move(closed);
    return sc;
}
}  // namespace

TEST_CASE("collapse_closed_tiers: empty, shape, linearity") {
    auto none = with_closed({});
    CHECK(collapse_closed_tiers(none).terms.empty());

    auto one = with_closed(
        {scenarios::closed_tier(1.0, 1.0, 4.0, FadingDistribution::constant(1.0))});
    auto d1 = collapse_closed_tiers(one);
    REQUIRE(d1.terms.size() == 1);
    CHECK(d1.terms[0].expo == Approx(-0.5).epsilon(1e-15));

    auto two = with_closed(
        {scenarios::closed_tier(1.0, 1.0, 4.0, FadingDistribution::constant(1.0)),
         scenarios::closed_tier(1.0, 1.0, 4.0, FadingDistribution::constant(1.0))});
    auto d2 = collapse_closed_tiers(two);
    double r = 0.7;
    CHECK(d2(r) == Approx(2.0 * d1(r)).epsilon(1e-14));
}

TEST_CASE("Laplace match: collapsed density reproduces the closed-tier transform") {
    // mixed closed tiers, arbitrary fading; checked at s in {0.1, 1, 10}
    auto sc = with_closed(
        {scenarios::closed_tier(0.8, 2.0, 3.0, FadingDistribution::lognormal_db(5.0)),
         scenarios::closed_tier(1.5, 0.5, 4.5, FadingDistribution::exponential(1.7))});
    auto dens = collapse_closed_tiers(sc);
    for (double s : {0.1, 1.0, 10.0}) {
        double direct = laplace_closed_interference(sc, cplx(s, 0.0)).real();
        double mapped = oracles::radial_interference_transform(dens, s);
        CHECK(mapped == Approx(direct).epsilon(1e-8));
    }
}

TEST_CASE("one-tier Laplace match fixes the collapsed coefficient") {
    // lambda=1, P=1, Constant(1), eps=4: single term with exponent -1/2 whose
    // coefficient must reproduce the closed-form transform at several s
    auto sc = with_closed(
        {scenarios::closed_tier(1.0, 1.0, 4.0, FadingDistribution::constant(1.0))});
    auto dens = collapse_closed_tiers(sc);
    for (double s : {0.5, 1.0, 2.0}) {
        double direct = laplace_closed_interference(sc, cplx(s, 0.0)).real();
        CHECK(oracles::radial_interference_transform(dens, s) == Approx(direct).epsilon(1e-8));
    }
    // the 2 pi / eps factor is part of the match: dropping it fails by far
    auto wrong = dens;
    wrong.terms[0].coef /= 2.0 * M_PI / 4.0;
    CHECK(std::abs(oracles::radial_interference_transform(wrong, 1.0) -
                   laplace_closed_interference(sc, cplx(1.0, 0.0)).real()) > 1e-2);
}

TEST_CASE("exponentialize: identity and scale factors") {
    auto expsc = scenarios::single_tier(2.0, 3.0, 4.0, FadingDistribution::exponential(1.0), 1.0);
    auto same = exponentialize(expsc);
    CHECK(same.open_tiers[0].density == Approx(2.0).epsilon(1e-14));

    auto sc = scenarios::single_tier(1.0, 1.0, 4.0, FadingDistribution::constant(1.0), 1.0);
    auto out = exponentialize(sc);
    CHECK(out.open_tiers[0].density == Approx(1.0 / 0.8862269254527580).epsilon(1e-12));
    CHECK(out.open_tiers[0].fading.kind == FadingKind::Exponential);
    CHECK(out.open_tiers[0].fading.param == 1.0);

    auto ln = scenarios::single_tier(1.0, 1.0, 3.0, FadingDistribution::lognormal_db(6.0), 1.0);
    auto out2 = exponentialize(ln);
    double expect = fading_moment(FadingDistribution::lognormal_db(6.0), 2.0 / 3.0) /
                    gamma_fn(1.0 + 2.0 / 3.0);
    CHECK(expect == Approx(1.692938).epsilon(1e-5));
    CHECK(out2.open_tiers[0].density == Approx(expect).epsilon(1e-12));
    // thresholds, powers, exponents, noise untouched
    CHECK(out2.open_tiers[0].power == 1.0);
    CHECK(out2.open_tiers[0].sinr_threshold == 1.0);
}

TEST_CASE("mirp_1d_densities: direct substitution and linearity") {
    auto sc = scenarios::single_tier(1.0, 1.0, 4.0, FadingDistribution::constant(1.0), 1.0);
    auto d = mirp_1d_densities(sc);
    REQUIRE(d.open.size() == 1);
    REQUIRE(d.open[0].terms.size() == 1);
    CHECK(d.open[0].terms[0].coef == Approx(M_PI / 2.0).epsilon(1e-14));
    CHECK(d.open[0].terms[0].expo == Approx(-0.5).epsilon(1e-15));

    auto sc2 = sc;
    sc2.open_tiers[0].density = 3.0;
    auto d2 = mirp_1d_densities(sc2);
    CHECK(d2.open[0].terms[0].coef == Approx(3.0 * M_PI / 2.0).epsilon(1e-14));

    // integral of the 1-D density reproduces lambda pi (P E[Psi^{2/e}])^{2/e} t^{2/e}
    double t = 1.7;
    double expect = 1.0 * M_PI * std::pow(1.0, 0.5) * std::pow(t, 0.5);
    CHECK(d.open[0].integral_to(t) == Approx(expect).epsilon(1e-12));
}

TEST_CASE("mbrp_1d_densities: bias handling and equivalent powers") {
    auto sc = scenarios::two_tier_study(2.0, 2.0, FadingDistribution::exponential(2.0),
                                        FadingDistribution::exponential(1.0));
    // B_k = 1/(P_k E[Psi_k]) reduces each density to lambda (2pi/e) r^{2/e-1}
    std::vector<double> b = {1.0 / (25.0 * 2.0), 1.0 / (1.0 * 1.0)};
    auto d = mbrp_1d_densities(sc, b);
    REQUIRE(d.open.size() == 2);
    CHECK(d.open[0].terms[0].coef == Approx(1.0 * (2.0 * M_PI / 3.0)).epsilon(1e-13));
    CHECK(d.open[1].terms[0].coef == Approx(5.0 * (2.0 * M_PI / 3.0)).epsilon(1e-13));
    CHECK(d.equivalent_powers[0] == Approx(25.0).epsilon(1e-13));
    CHECK(d.equivalent_powers[1] == Approx(1.0).epsilon(1e-13));

    // doubling a bias multiplies that tier's coefficient by 2^{2/e}
    auto b2 = b;
    b2[0] *= 2.0;
    auto d2 = mbrp_1d_densities(sc, b2);
    CHECK(d2.open[0].terms[0].coef ==
          Approx(d.open[0].terms[0].coef * std::pow(2.0, 2.0 / 3.0)).epsilon(1e-13));
    CHECK(d2.open[1].terms[0].coef == Approx(d.open[1].terms[0].coef).epsilon(1e-14));
}

TEST_CASE("same_eps_reduction: substitution cases and scaling structure") {
    auto sc = scenarios::single_tier(1.0, 1.0, 3.0, FadingDistribution::constant(1.0), 1.0);
    auto r = same_eps_reduction(sc);
    CHECK(r.open_density == 1.0);
    CHECK(r.closed_density == 0.0);
    CHECK(r.noise == 0.0);

    sc.closed_tiers.push_back(
        scenarios::closed_tier(2.0, 1.0, 3.0, FadingDistribution::constant(1.0)));
    auto r2 = same_eps_reduction(sc);
    CHECK(r2.closed_density == Approx(2.0).epsilon(1e-14));

    // scaling all open densities by c scales the reduced noise by c^{-eps/2}
    auto sc3 = sc;
    sc3.noise = 0.7;
    auto r3 = same_eps_reduction(sc3);
    auto sc4 = sc3;
    double c = 4.0;
    sc4.open_tiers[0].density *= c;
    auto r4 = same_eps_reduction(sc4);
    CHECK(r4.noise == Approx(r3.noise * std::pow(c, -1.5)).epsilon(1e-12));
    CHECK(r4.closed_density == Approx(r3.closed_density / c).epsilon(1e-12));

    auto mixed = sc;
    mixed.open_tiers[0].pathloss_exp = 3.5;
    CHECK_THROWS_AS(same_eps_reduction(mixed), std::invalid_argument);
}

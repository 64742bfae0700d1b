#include "multicav/couplings.hpp"
#include "multicav/errors.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace multicav;

namespace {

constexpr double pi = std::numbers::pi;

Resonance first_resonance(const CavityStack& s, double lo, double hi)
{
    const auto r = find_resonances(s, lo, hi);
    REQUIRE(!r.empty());
    return r.front();
}

} // namespace

TEST_CASE("end-mirror displacement of a two-mirror cavity gives G = c k0 / L")
{
    // k0 L = const, so dk0/dL = -k0/L exactly.
    for (const double L : {pi, 2.0, 7.5}) {
        const CavityStack s({{10.0, 0.0}, {10.0, L}});
        const auto r = first_resonance(s, 3.0 / L, 7.0 / L);
        const auto om = om_coupling(s, r, 1);
        CHECK(om.G == doctest::Approx(r.k0 / L).epsilon(1e-5));
        CHECK_FALSE(om.nonlinear);
        const auto left = om_coupling(s, r, 0);
        CHECK(left.G == doctest::Approx(om.G).epsilon(1e-5));
    }
}

TEST_CASE("om_coupling rejects bad requests")
{
    const CavityStack s({{10.0, 0.0}, {10.0, pi}});
    auto r = first_resonance(s, 0.5, 1.5);
    CHECK_THROWS_AS((void)om_coupling(s, r, 2), InvalidInput);
    CHECK_THROWS_AS((void)om_coupling(s, r, 1, 1.0), InvalidInput);
    r.overlap_flag = OverlapFlag::Overlapping;
    CHECK_THROWS_AS((void)om_coupling(s, r, 1), InvalidInput);
}

TEST_CASE("JC coupling of a single cavity is beta / sqrt(L)")
{
    const double L = 3.0;
    const CavityStack s({{8.0, 0.0}, {8.0, L}});
    const auto r = first_resonance(s, 0.5, 2.0);
    const auto jc = jc_coupling(s, r, {2.0, 1.0});
    REQUIRE(jc.g_per_gap.size() == 1);
    CHECK(jc.g_per_gap[0] == doctest::Approx(2.0 / std::sqrt(L)).epsilon(1e-12));
    CHECK_FALSE(jc.zero_field[0]);
    CHECK_THROWS_AS((void)jc_coupling(s, r, {0.0, 1.0}), InvalidInput);
}

TEST_CASE("g ratios between gaps follow the field-amplitude ratio")
{
    const CavityStack s({{6.0, 0.0}, {2.0, 5.0}, {6.0, 6.3}});
    const auto r = first_resonance(s, 2.0, 2.7);
    const auto jc = jc_coupling(s, r, {});
    const double field_ratio = std::sqrt(jc.mean_intensity[0] / jc.mean_intensity[1]);
    CHECK(jc.g_per_gap[0] / jc.g_per_gap[1] == doctest::Approx(field_ratio).epsilon(1e-12));
    // sum_i l_i g_i^2 = beta^2 by construction
    const double norm = 5.0 * jc.g_per_gap[0] * jc.g_per_gap[0] + 1.3 * jc.g_per_gap[1] * jc.g_per_gap[1];
    CHECK(norm == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("cooperativities from G, g and kappa")
{
    CouplingReport rep;
    rep.resonance.kappa_curvature = 0.5;
    rep.G = 3.0;
    rep.g_per_gap = {1.0, 2.0};
    const auto out = cooperativities(rep, {1.0, 4.0});
    CHECK(out.C_om == doctest::Approx(18.0));
    CHECK(out.C_jc_per_gap[0] == doctest::Approx(0.5));
    CHECK(out.C_jc_per_gap[1] == doctest::Approx(2.0));
    rep.resonance.kappa_curvature = 0.0;
    CHECK_THROWS_AS((void)cooperativities(rep, {}), InvalidInput);
}

TEST_CASE("evaluate_couplings bundles the pieces")
{
    const CavityStack s({{10.0, 0.0}, {10.0, pi}});
    const auto r = first_resonance(s, 0.5, 1.5);
    const auto rep = evaluate_couplings(s, r, 1, {});
    CHECK(rep.C_om == doctest::Approx(rep.G * rep.G / r.kappa_curvature));
    CHECK(rep.g_per_gap.size() == 1);
}

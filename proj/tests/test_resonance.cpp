#include "multicav/errors.hpp"
#include "multicav/resonance.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace multicav;

namespace {

constexpr double pi = std::numbers::pi;

CavityStack two(double z1, double z2, double L)
{
    return CavityStack({{z1, 0.0}, {z2, L}});
}

// Brute-force local minima of D on a dense grid, for comparison with the
// scan-and-refine engine.
std::vector<double> dense_minima(const CavityStack& s, double lo, double hi, int n)
{
    std::vector<double> d(static_cast<std::size_t>(n) + 1);
    const double h = (hi - lo) / n;
    for (int i = 0; i <= n; ++i) {
        d[static_cast<std::size_t>(i)] = denominator(s, lo + i * h);
    }
    std::vector<double> out;
    for (int i = 1; i < n; ++i) {
        const auto u = static_cast<std::size_t>(i);
        if (d[u] < d[u - 1] && d[u] <= d[u + 1]) {
            out.push_back(lo + i * h);
        }
    }
    return out;
}

} // namespace

TEST_CASE("scan_spectrum samples uniformly at the requested density")
{
    const auto s = two(5.0, 5.0, 2.0);
    const auto spec = scan_spectrum(s, 1.0, 1.0 + pi / 2.0, 32);
    REQUIRE(spec.size() >= 33);
    CHECK(spec.front().k == doctest::Approx(1.0));
    CHECK(spec.back().k == doctest::Approx(1.0 + pi / 2.0));
    for (const auto& p : spec) {
        CHECK(p.transmission * p.denominator == doctest::Approx(1.0));
    }
    CHECK_THROWS_AS((void)scan_spectrum(s, 1.0, 2.0, 8), InvalidInput);
    CHECK_THROWS_AS((void)scan_spectrum(s, 2.0, 1.0, 64), InvalidInput);
}

TEST_CASE("two-mirror resonances sit at theta0 + n pi")
{
    const double z = 5.0, zp = 2.0, L = pi;
    const auto s = two(z, zp, L);
    const auto res = find_resonances(s, 0.5, 6.5);
    REQUIRE(res.size() == 6);
    const double theta0 = -0.5 * std::atan((z + zp) / (1.0 - z * zp));
    for (const auto& r : res) {
        const double n = std::round((r.k0 * L - theta0) / pi);
        CHECK(r.k0 * L == doctest::Approx(theta0 + n * pi).epsilon(1e-11));
        CHECK(r.overlap_flag == OverlapFlag::WellResolved);
        CHECK(r.neighbor_spacing == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("engine finds the same minima as a dense brute-force scan")
{
    const CavityStack s({{4.0, 0.0}, {2.5, 3.0}, {4.0, 3.7}, {1.0, 5.2}});
    const double lo = 2.0, hi = 6.0;
    const auto brute = dense_minima(s, lo, hi, 400000);
    const auto res = find_resonances(s, lo, hi);
    REQUIRE(res.size() == brute.size());
    for (std::size_t i = 0; i < res.size(); ++i) {
        CHECK(res[i].k0 == doctest::Approx(brute[i]).epsilon(1e-5));
        CHECK(denominator(s, res[i].k0) <= denominator(s, brute[i]) * (1.0 + 1e-12));
    }
}

TEST_CASE("refined minimum has vanishing slope")
{
    const CavityStack s({{10.0, 0.0}, {3.0, 10.0}, {10.0, 11.0}});
    for (const auto& r : find_resonances(s, 5.0, 6.0)) {
        const auto jet = denominator_jet(s, r.k0);
        const double h = 1e-7 * r.k0;
        const double scale = std::abs(denominator(s, r.k0 + h) - jet.value) / h;
        CHECK(std::abs(jet.slope) <= 1e-3 * scale + 1e-12);
    }
}

TEST_CASE("curvature and half-max linewidths agree for a Lorentzian-like peak")
{
    const auto s = two(20.0, 20.0, pi);
    const auto res = find_resonances(s, 0.5, 3.5);
    REQUIRE(res.size() == 3);
    for (const auto& r : res) {
        REQUIRE(r.kappa_halfmax.has_value());
        CHECK(*r.kappa_halfmax == doctest::Approx(r.kappa_curvature).epsilon(1e-3));
    }
}

TEST_CASE("linewidth scales with the speed of light")
{
    const auto s = two(3.0, 3.0, 1.0);
    const auto res = find_resonances(s, 0.5, 4.0);
    REQUIRE(!res.empty());
    EngineOptions o;
    o.speed_of_light = 3.0;
    CHECK(linewidth_curvature(s, res[0].k0, o) ==
          doctest::Approx(3.0 * linewidth_curvature(s, res[0].k0)).epsilon(1e-12));
}

TEST_CASE("overlap classification uses half the local spacing")
{
    Resonance a, b;
    a.k0 = 1.0;
    b.k0 = 1.1;
    a.neighbor_spacing = b.neighbor_spacing = 0.1;
    a.kappa_curvature = 0.049;
    b.kappa_curvature = 0.051;
    const auto out = classify_overlap({a, b});
    CHECK(out[0].overlap_flag == OverlapFlag::WellResolved);
    CHECK(out[1].overlap_flag == OverlapFlag::Overlapping);
}

TEST_CASE("family recognition")
{
    CHECK(classify_family(two(1.0, 2.0, 1.0)) == StackFamily::TwoMirror);
    CHECK(classify_family(CavityStack({{5.0, 0.0}, {2.0, 3.0}, {5.0, 3.5}})) == StackFamily::ThreeMirror);
    CHECK(classify_family(CavityStack({{5.0, 0.0}, {2.0, 1.0}, {2.0, 4.0}, {5.0, 5.0}})) ==
          StackFamily::FourMirrorSymmetric);
    CHECK(classify_family(CavityStack({{5.0, 0.0}, {2.0, 2.0}, {2.0, 4.0}, {5.0, 5.0}})) ==
          StackFamily::FourMirrorAsymmetric);
    CHECK(classify_family(CavityStack({{5.0, 0.0}, {2.0, 2.0}, {3.0, 4.0}})) == StackFamily::Other);
}

TEST_CASE("analytic overlap inequalities")
{
    const auto t = three_mirror_nonoverlap(10.0, 10.0, 1000.0 * pi, pi);
    CHECK(t.lhs == doctest::Approx(std::sqrt(2.0 / 1000.0)));
    CHECK(t.rhs == doctest::Approx(0.1));
    CHECK_FALSE(t.satisfied);
    const auto f = four_mirror_single_mode(20.0, 5.0, 100.0 * pi, pi);
    CHECK(f.lhs == doctest::Approx(0.01 + 0.02));
    CHECK(f.rhs == doctest::Approx(1.0 / 400.0));
    CHECK(f.satisfied);
}

TEST_CASE("common-resonance design puts both subcavities on resonance")
{
    for (const auto fam : {CommonFamily::ThreeMirror, CommonFamily::FourMirrorSymmetric}) {
        const auto d = design_common_resonance(fam, 20.0, 5.0, 590.0, {100, 1});
        const auto ph = common_resonance_phases(fam, 20.0, 5.0);
        CHECK(d.k0 == doctest::Approx(d.target_k).epsilon(1e-6));
        CHECK(d.L * d.target_k == doctest::Approx(ph.theta0 + 100.0 * pi).epsilon(1e-14));
        CHECK(d.l * d.target_k == doctest::Approx(ph.phi0 + pi).epsilon(1e-14));
        if (fam == CommonFamily::FourMirrorSymmetric) {
            CHECK(transmission(d.stack(), d.k0) > 0.99); // mirror-symmetric stack
        }
    }
    CHECK_THROWS_AS((void)design_common_resonance(CommonFamily::ThreeMirror, 20.0, 5.0, 1.0, {-5, 1}),
                    InvalidInput);
}

TEST_CASE("nearest_resonance")
{
    std::vector<Resonance> v(3);
    v[0].k0 = 1.0;
    v[1].k0 = 2.0;
    v[2].k0 = 3.0;
    CHECK(nearest_resonance(v, 2.4).k0 == 2.0);
    CHECK_THROWS_AS((void)nearest_resonance({}, 1.0), InvalidInput);
}

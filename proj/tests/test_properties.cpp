#include "properties.hpp"

#include <doctest.h>

TEST_CASE("randomized invariants over 1000 stacks")
{
    const auto rep = props::run(1000, 20261017);
    for (const auto* c : rep.checks()) {
        if (c == &rep.unimodular) {
            continue; // absolute bound is below double-precision resolution; see acceptance
        }
        INFO(c->name << ": worst " << c->worst << " over " << c->samples << " samples");
        CHECK(c->samples > 0);
        CHECK(c->violations == 0);
    }
    CHECK(rep.scaling_G.samples >= 500);
}

TEST_CASE("composed matrices keep the lossless structure")
{
    std::mt19937_64 rng(7);
    for (int t = 0; t < 200; ++t) {
        const auto s = props::random_stack(rng);
        const auto m = props::compose(s, 1.0 + t * 0.01);
        const double scale = std::abs(m.m22);
        CHECK(std::abs(m.m11 - std::conj(m.m22)) <= 1e-14 * scale);
        CHECK(std::abs(m.m12 - std::conj(m.m21)) <= 1e-14 * scale);
    }
}

TEST_CASE("resonance count is stable when the scan density doubles")
{
    std::mt19937_64 rng(11);
    multicav::EngineOptions coarse, fine;
    fine.samples_per_fsr = 2 * coarse.samples_per_fsr;
    for (int t = 0; t < 100; ++t) {
        const auto s = props::random_stack(rng);
        const double fsr = std::numbers::pi / s.total_length();
        const double lo = 3.0 * fsr;
        const auto a = multicav::find_resonances(s, lo, lo + 4.0 * fsr, coarse);
        const auto b = multicav::find_resonances(s, lo, lo + 4.0 * fsr, fine);
        CHECK(a.size() == b.size());
    }
}

TEST_CASE("refined minima are local minima at ten times the tolerance")
{
    std::mt19937_64 rng(13);
    for (int t = 0; t < 100; ++t) {
        const auto s = props::random_stack(rng);
        const double fsr = std::numbers::pi / s.total_length();
        for (const auto& r : multicav::find_resonances(s, 2.0 * fsr, 4.0 * fsr)) {
            const double d = multicav::denominator(s, r.k0);
            const double delta = 10.0 * 1e-12 * r.k0;
            CHECK(multicav::denominator(s, r.k0 + delta) >= d);
            CHECK(multicav::denominator(s, r.k0 - delta) >= d);
        }
    }
}

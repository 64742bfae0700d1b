#include "multicav/resonance.hpp"

#include "multicav/errors.hpp"

#include <boost/math/tools/roots.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace multicav {

namespace {

constexpr double pi = std::numbers::pi;

double fsr_estimate(const CavityStack& stack)
{
    const double len = stack.total_length();
    return len > 0.0 ? pi / len : std::numeric_limits<double>::infinity();
}

void require_range(double k_min, double k_max)
{
    if (!std::isfinite(k_min) || !std::isfinite(k_max) || k_min <= 0.0 || k_max <= k_min) {
        throw InvalidInput("wavenumber range must satisfy 0 < k_min < k_max");
    }
}

bool nearly_equal(double a, double b, double rel)
{
    return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b));
}

double golden_section(const CavityStack& stack, double a, double b, double rel_width)
{
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - invphi * (b - a);
    double d = a + invphi * (b - a);
    double fc = denominator(stack, c);
    double fd = denominator(stack, d);
    for (int it = 0; it < 400 && (b - a) > rel_width * std::abs(0.5 * (a + b)); ++it) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = denominator(stack, c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = denominator(stack, d);
        }
    }
    return 0.5 * (a + b);
}

} // namespace

std::vector<SpectrumSample> scan_spectrum(const CavityStack& stack, double k_min, double k_max,
                                          int samples_per_fsr)
{
    require_range(k_min, k_max);
    if (samples_per_fsr < 16) {
        throw InvalidInput("samples_per_fsr must be at least 16");
    }
    const double fsr = fsr_estimate(stack);
    const double max_step = fsr / samples_per_fsr;
    const double span = k_max - k_min;
    const auto intervals = std::isfinite(max_step)
                               ? static_cast<std::size_t>(std::ceil(span / max_step))
                               : static_cast<std::size_t>(samples_per_fsr);
    const std::size_t n = std::max<std::size_t>(intervals, 2);

    std::vector<SpectrumSample> out(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        const double k = (i == n) ? k_max : k_min + span * static_cast<double>(i) / n;
        const double d = denominator(stack, k);
        out[i] = {k, 1.0 / d, d};
    }
    return out;
}

double refine_minimum(const CavityStack& stack, double lo, double hi, double k_rel_tol)
{
    const double k_gold = golden_section(stack, lo, hi, 1e-9);

    // Polish on the exact derivative: find a bracket around k_gold with
    // dD/dk < 0 on the left and > 0 on the right, staying inside [lo, hi].
    auto slope = [&](double k) { return denominator_jet(stack, k).slope; };
    double w = std::max(1e-9 * k_gold, 4.0 * std::numeric_limits<double>::epsilon() * k_gold);
    for (int grow = 0; grow < 60; ++grow, w *= 2.0) {
        const double a = std::max(lo, k_gold - w);
        const double b = std::min(hi, k_gold + w);
        const double sa = slope(a);
        const double sb = slope(b);
        if (sa == 0.0) {
            return a;
        }
        if (sb == 0.0) {
            return b;
        }
        if (sa < 0.0 && sb > 0.0) {
            const int bits = std::clamp(
                static_cast<int>(std::ceil(-std::log2(std::max(k_rel_tol, 1e-16)))) + 2, 10, 52);
            boost::math::tools::eps_tolerance<double> tol(bits);
            std::uintmax_t iters = 200;
            const auto [r0, r1] = boost::math::tools::toms748_solve(slope, a, b, sa, sb, tol, iters);
            return 0.5 * (r0 + r1);
        }
        if (a == lo && b == hi) {
            break;
        }
    }
    return k_gold;
}

double linewidth_curvature(const CavityStack& stack, double k0, const EngineOptions& opts)
{
    const auto jet = denominator_jet(stack, k0);
    if (!(jet.curvature > 0.0)) {
        throw DegenerateResonance("non-positive curvature of D at k0 = " + std::to_string(k0));
    }
    return opts.speed_of_light * std::sqrt(2.0 * jet.value / jet.curvature);
}

double linewidth_curvature(const CavityStack& stack, const Resonance& resonance,
                           const EngineOptions& opts)
{
    return linewidth_curvature(stack, resonance.k0, opts);
}

double linewidth_halfmax(const CavityStack& stack, const Resonance& resonance,
                         const EngineOptions& opts)
{
    const double k0 = resonance.k0;
    const double peak = transmission(stack, k0);
    const double half = 0.5 * peak;
    const double kappa_k = (resonance.kappa_curvature > 0.0)
                               ? resonance.kappa_curvature / opts.speed_of_light
                               : linewidth_curvature(stack, k0, opts) / opts.speed_of_light;
    const double fsr = fsr_estimate(stack);
    double max_reach = std::isfinite(fsr) ? fsr : 1e3 * kappa_k;
    double max_step = std::numeric_limits<double>::infinity();
    if (resonance.neighbor_spacing > 0.0) {
        max_reach = std::min(max_reach, resonance.neighbor_spacing);
        max_step = resonance.neighbor_spacing / 16.0;
    }

    auto side = [&](double dir) {
        double k_prev = k0;
        double t_prev = peak;
        double step = std::min(0.25 * kappa_k, max_step);
        while (std::abs(k_prev - k0) < max_reach) {
            const double k_next = k_prev + dir * step;
            const double t_next = transmission(stack, k_next);
            if (t_next < half) {
                auto f = [&](double k) { return transmission(stack, k) - half; };
                boost::math::tools::eps_tolerance<double> tol(40);
                const auto [a, b] = boost::math::tools::bisect(f, std::min(k_prev, k_next),
                                                               std::max(k_prev, k_next), tol);
                return 0.5 * (a + b);
            }
            if (t_next > t_prev) {
                break;
            }
            k_prev = k_next;
            t_prev = t_next;
            step = std::min(step * 1.25, max_step);
        }
        throw OverlappingResonance("half-maximum not reached before the neighbouring resonance "
                                   "near k0 = " +
                                   std::to_string(k0));
    };

    const double right = side(+1.0);
    const double left = side(-1.0);
    return opts.speed_of_light * 0.5 * (right - left);
}

std::vector<Resonance> classify_overlap(std::vector<Resonance> resonances, const EngineOptions& opts)
{
    for (auto& r : resonances) {
        r.overlap_flag = (r.kappa_curvature < 0.5 * opts.speed_of_light * r.neighbor_spacing)
                             ? OverlapFlag::WellResolved
                             : OverlapFlag::Overlapping;
    }
    return resonances;
}

StackFamily classify_family(const CavityStack& stack)
{
    const auto e = stack.elements();
    switch (e.size()) {
    case 2:
        return StackFamily::TwoMirror;
    case 3:
        return e[0].zeta == e[2].zeta ? StackFamily::ThreeMirror : StackFamily::Other;
    case 4:
        if (e[0].zeta != e[3].zeta || e[1].zeta != e[2].zeta) {
            return StackFamily::Other;
        }
        return nearly_equal(stack.gap(0), stack.gap(2), 1e-9) ? StackFamily::FourMirrorSymmetric
                                                               : StackFamily::FourMirrorAsymmetric;
    default:
        return StackFamily::Other;
    }
}

AnalyticOverlapCriterion three_mirror_nonoverlap(double zeta, double zeta_prime, double L, double l)
{
    AnalyticOverlapCriterion c;
    c.family = StackFamily::ThreeMirror;
    c.expression = "sqrt(2l/L) > zeta'/zeta^2";
    c.lhs = std::sqrt(2.0 * l / L);
    c.rhs = zeta_prime / (zeta * zeta);
    c.satisfied = c.lhs > c.rhs;
    return c;
}

AnalyticOverlapCriterion four_mirror_single_mode(double zeta, double zeta_prime, double L, double l)
{
    AnalyticOverlapCriterion c;
    c.family = StackFamily::FourMirrorSymmetric;
    c.expression = "1/(4 zeta'^2) + 2l/L > 1/zeta^2";
    c.lhs = 1.0 / (4.0 * zeta_prime * zeta_prime) + 2.0 * l / L;
    c.rhs = 1.0 / (zeta * zeta);
    c.satisfied = c.lhs > c.rhs;
    return c;
}

OverlapReport classify_overlap(const CavityStack& stack, std::vector<Resonance> resonances,
                               const EngineOptions& opts)
{
    OverlapReport report{classify_overlap(std::move(resonances), opts), std::nullopt};
    const auto e = stack.elements();
    switch (classify_family(stack)) {
    case StackFamily::ThreeMirror: {
        const double a = stack.gap(0);
        const double b = stack.gap(1);
        report.analytic =
            three_mirror_nonoverlap(e[0].zeta, e[1].zeta, std::max(a, b), std::min(a, b));
        break;
    }
    case StackFamily::FourMirrorSymmetric:
        report.analytic = four_mirror_single_mode(e[0].zeta, e[1].zeta, stack.gap(1), stack.gap(0));
        break;
    default:
        break;
    }
    return report;
}

std::vector<Resonance> find_resonances(const CavityStack& stack, double k_min, double k_max,
                                       const EngineOptions& opts)
{
    const auto samples = scan_spectrum(stack, k_min, k_max, opts.samples_per_fsr);
    const double step = samples[1].k - samples[0].k;

    // A minimum lies wherever dD/dk turns from negative to non-negative
    // between neighbouring samples.
    std::vector<double> found;
    auto collect = [&](const std::vector<double>& ks) {
        std::vector<double> slope(ks.size());
        for (std::size_t i = 0; i < ks.size(); ++i) {
            slope[i] = denominator_jet(stack, ks[i]).slope;
        }
        for (std::size_t i = 0; i + 1 < ks.size(); ++i) {
            if (slope[i] < 0.0 && slope[i + 1] >= 0.0) {
                found.push_back(refine_minimum(stack, ks[i], ks[i + 1], opts.k_rel_tol));
            }
        }
    };
    std::vector<double> grid(samples.size());
    std::transform(samples.begin(), samples.end(), grid.begin(), [](const auto& p) { return p.k; });
    collect(grid);

    // A minimum-maximum pair inside one sample interval leaves no sign
    // change; such pairs only occur next to another minimum, so each one
    // found is re-examined at 16x density over two intervals either side.
    const std::size_t coarse = found.size();
    for (std::size_t j = 0; j < coarse; ++j) {
        const double lo = std::max(k_min, found[j] - 2.0 * step);
        const double hi = std::min(k_max, found[j] + 2.0 * step);
        constexpr int fine = 64;
        std::vector<double> ks(fine + 1);
        for (int i = 0; i <= fine; ++i) {
            ks[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / fine;
        }
        collect(ks);
    }

    std::sort(found.begin(), found.end());
    std::vector<Resonance> out;
    for (const double k0 : found) {
        if (k0 <= k_min || k0 >= k_max) {
            continue;
        }
        if (!out.empty() && nearly_equal(out.back().k0, k0, 1e-10)) {
            continue;
        }
        Resonance r;
        r.k0 = k0;
        r.transmission_peak = transmission(stack, k0);
        out.push_back(r);
    }

    const double fsr = fsr_estimate(stack);
    for (std::size_t i = 0; i < out.size(); ++i) {
        double spacing = std::numeric_limits<double>::infinity();
        if (i > 0) {
            spacing = std::min(spacing, out[i].k0 - out[i - 1].k0);
        }
        if (i + 1 < out.size()) {
            spacing = std::min(spacing, out[i + 1].k0 - out[i].k0);
        }
        out[i].neighbor_spacing = std::isfinite(spacing) ? spacing : fsr;
        out[i].kappa_curvature = linewidth_curvature(stack, out[i].k0, opts);
    }
    out = classify_overlap(std::move(out), opts);
    for (auto& r : out) {
        try {
            r.kappa_halfmax = linewidth_halfmax(stack, r, opts);
        } catch (const OverlappingResonance&) {
            r.kappa_halfmax.reset();
        }
    }
    return out;
}

CommonResonancePhases common_resonance_phases(CommonFamily family, double zeta, double zeta_prime)
{
    const double outer = -0.5 * std::atan((zeta + zeta_prime) / (1.0 - zeta * zeta_prime));
    if (family == CommonFamily::ThreeMirror) {
        return {outer + 0.5 * pi, outer};
    }
    const double middle =
        -0.5 * std::atan(2.0 * zeta_prime / (1.0 - zeta_prime * zeta_prime));
    return {middle, outer};
}

CavityStack CommonResonanceDesign::stack() const
{
    if (family == CommonFamily::ThreeMirror) {
        const double z[] = {zeta, zeta_prime, zeta};
        const double g[] = {L, l};
        return CavityStack::from_gaps(z, g);
    }
    const double z[] = {zeta, zeta_prime, zeta_prime, zeta};
    const double g[] = {l, L, l};
    return CavityStack::from_gaps(z, g);
}

CommonResonanceDesign design_common_resonance(CommonFamily family, double zeta, double zeta_prime,
                                              double target_k, ModeIndices indices,
                                              const EngineOptions& opts)
{
    if (!std::isfinite(target_k) || target_k <= 0.0) {
        throw InvalidInput("target wavenumber must be positive");
    }
    if (!std::isfinite(zeta) || !std::isfinite(zeta_prime)) {
        throw InvalidInput("polarizabilities must be finite");
    }
    const auto phases = common_resonance_phases(family, zeta, zeta_prime);
    CommonResonanceDesign d;
    d.family = family;
    d.zeta = zeta;
    d.zeta_prime = zeta_prime;
    d.target_k = target_k;
    d.L = (phases.theta0 + static_cast<double>(indices.long_gap) * pi) / target_k;
    d.l = (phases.phi0 + static_cast<double>(indices.short_gap) * pi) / target_k;
    if (!(d.L > 0.0) || !(d.l > 0.0)) {
        throw InvalidInput("mode indices give a non-positive gap (L = " + std::to_string(d.L) +
                           ", l = " + std::to_string(d.l) + ")");
    }

    const auto stack = d.stack();
    const double fsr = fsr_estimate(stack);
    const auto found = find_resonances(stack, target_k - 0.5 * fsr, target_k + 0.5 * fsr, opts);
    if (found.empty()) {
        throw DesignFailure("no resonance near the target wavenumber");
    }
    d.k0 = nearest_resonance(found, target_k).k0;
    if (!nearly_equal(d.k0, target_k, 1e-6)) {
        throw DesignFailure("constructed stack resonates at " + std::to_string(d.k0) +
                            " instead of " + std::to_string(target_k));
    }
    return d;
}

const Resonance& nearest_resonance(const std::vector<Resonance>& resonances, double k)
{
    if (resonances.empty()) {
        throw InvalidInput("no resonances to choose from");
    }
    return *std::min_element(resonances.begin(), resonances.end(),
                             [k](const Resonance& a, const Resonance& b) {
                                 return std::abs(a.k0 - k) < std::abs(b.k0 - k);
                             });
}

const char* to_string(OverlapFlag flag)
{
    return flag == OverlapFlag::WellResolved ? "WellResolved" : "Overlapping";
}

const char* to_string(StackFamily family)
{
    switch (family) {
    case StackFamily::TwoMirror:
        return "two-mirror";
    case StackFamily::ThreeMirror:
        return "three-mirror";
    case StackFamily::FourMirrorSymmetric:
        return "four-mirror-symmetric";
    case StackFamily::FourMirrorAsymmetric:
        return "four-mirror-asymmetric";
    case StackFamily::Other:
        break;
    }
    return "other";
}

} // namespace multicav

#include "multicav/couplings.hpp"

#include "multicav/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace multicav {

namespace {

double smallest_adjacent_gap(const CavityStack& stack, std::size_t index)
{
    double g = std::numeric_limits<double>::infinity();
    if (index > 0) {
        g = std::min(g, stack.gap(index - 1));
    }
    if (index < stack.gap_count()) {
        g = std::min(g, stack.gap(index));
    }
    return g;
}

// Central difference of the refined resonance under +-dx displacement.
double displacement_slope(const CavityStack& stack, double k0, std::size_t index, double dx,
                          double spacing, const EngineOptions& opts)
{
    const double window = 0.5 * spacing;
    auto shifted_k0 = [&](double sign) {
        const auto moved = stack.displaced(index, sign * dx);
        // full double precision: the shift under displacement is a small fraction of k0
        const double k = refine_minimum(moved, k0 - window, k0 + window, 1e-16);
        if (std::abs(k - k0) > 0.25 * spacing) {
            throw BranchJump("resonance at k0 = " + std::to_string(k0) +
                             " jumped to another branch under displacement");
        }
        return k;
    };
    return opts.speed_of_light * std::abs(shifted_k0(+1.0) - shifted_k0(-1.0)) / (2.0 * dx);
}

} // namespace

OmCoupling om_coupling(const CavityStack& stack, const Resonance& resonance,
                       std::size_t movable_index, double delta_x, const EngineOptions& opts)
{
    if (movable_index >= stack.size()) {
        throw InvalidInput("movable element index out of range");
    }
    if (stack.size() < 2) {
        throw InvalidInput("optomechanical coupling needs at least two elements");
    }
    if (resonance.overlap_flag != OverlapFlag::WellResolved) {
        throw InvalidInput("optomechanical coupling requires a well-resolved resonance");
    }
    const double gap = smallest_adjacent_gap(stack, movable_index);
    const double k0 = resonance.k0;
    const double spacing = resonance.neighbor_spacing;
    if (delta_x <= 0.0) {
        // The shift G dx stays below ~1e-3 of the mode spacing, where k0(x)
        // is still linear even next to an avoided crossing.
        delta_x = std::min(1e-6, 1e-3 * spacing / k0) * gap;
    } else if (delta_x > 1e-4 * gap) {
        throw InvalidInput("delta_x must not exceed 1e-4 of the smallest adjacent gap");
    }

    OmCoupling out;
    out.delta_x = delta_x;
    out.G = displacement_slope(stack, k0, movable_index, delta_x, spacing, opts);
    out.G_half_step = displacement_slope(stack, k0, movable_index, 0.5 * delta_x, spacing, opts);
    out.nonlinear = std::abs(out.G_half_step - out.G) > 0.01 * std::abs(out.G);
    return out;
}

JcCoupling jc_coupling(const CavityStack& stack, const Resonance& resonance,
                       const EmitterParams& emitter)
{
    if (!(emitter.beta > 0.0) || !(emitter.gamma > 0.0)) {
        throw InvalidInput("emitter beta and gamma must be positive");
    }
    const auto segments = field_segments(stack, resonance.k0);
    const std::size_t n = stack.gap_count();

    JcCoupling out;
    out.mean_intensity.resize(n);
    double weighted = 0.0; // sum_j l_j |E_j|^2
    for (std::size_t j = 0; j < n; ++j) {
        out.mean_intensity[j] = segments[j + 1].mean_intensity;
        weighted += stack.gap(j) * out.mean_intensity[j];
    }
    out.g_per_gap.resize(n);
    out.zero_field.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double intensity = out.mean_intensity[i];
        if (!(intensity > 0.0)) {
            out.g_per_gap[i] = 0.0;
            out.zero_field[i] = true;
            continue;
        }
        out.g_per_gap[i] = emitter.beta / std::sqrt(weighted / intensity);
    }
    return out;
}

CouplingReport cooperativities(CouplingReport report, const EmitterParams& emitter)
{
    const double kappa = report.resonance.kappa_curvature;
    if (!(kappa > 0.0)) {
        throw InvalidInput("linewidth must be positive to form cooperativities");
    }
    if (!(emitter.gamma > 0.0)) {
        throw InvalidInput("emitter gamma must be positive");
    }
    report.C_om = report.G * report.G / kappa;
    report.C_jc_per_gap.resize(report.g_per_gap.size());
    for (std::size_t i = 0; i < report.g_per_gap.size(); ++i) {
        report.C_jc_per_gap[i] = report.g_per_gap[i] * report.g_per_gap[i] / (kappa * emitter.gamma);
    }
    return report;
}

CouplingReport evaluate_couplings(const CavityStack& stack, const Resonance& resonance,
                                  std::size_t movable_index, const EmitterParams& emitter,
                                  const EngineOptions& opts)
{
    CouplingReport report;
    report.resonance = resonance;
    const auto om = om_coupling(stack, resonance, movable_index, 0.0, opts);
    report.G = om.G;
    report.nonlinearity_warning = om.nonlinear;
    report.g_per_gap = jc_coupling(stack, resonance, emitter).g_per_gap;
    return cooperativities(std::move(report), emitter);
}

} // namespace multicav

#pragma once

#include "multicav/core_tmm.hpp"

#include <optional>
#include <string>
#include <vector>

namespace multicav {

/// Numerical settings shared by the resonance and coupling engines.
struct EngineOptions
{
    double speed_of_light = 1.0; ///< reporting scale for kappa and G
    int samples_per_fsr = 64;    ///< coarse-scan density per compound FSR (pi / total length)
    double k_rel_tol = 1e-12;    ///< refinement tolerance on k0
};

enum class OverlapFlag { WellResolved, Overlapping };

struct SpectrumSample
{
    double k = 0.0;
    double transmission = 0.0;
    double denominator = 0.0;
};

struct Resonance
{
    double k0 = 0.0;
    double transmission_peak = 0.0;
    double kappa_curvature = 0.0;
    std::optional<double> kappa_halfmax; ///< empty when the half-max points are not bracketed
    OverlapFlag overlap_flag = OverlapFlag::WellResolved;
    double neighbor_spacing = 0.0;
};

/// Uniform scan of T(k) and D(k) over [k_min, k_max].
[[nodiscard]] std::vector<SpectrumSample> scan_spectrum(const CavityStack& stack, double k_min,
                                                        double k_max, int samples_per_fsr);

/// Refines the minimum of D inside [lo, hi] (golden section followed by a
/// bracketed root solve on the exact dD/dk).
[[nodiscard]] double refine_minimum(const CavityStack& stack, double lo, double hi,
                                    double k_rel_tol = 1e-12);

/**
 * Every local minimum of D in (k_min, k_max), refined, sorted ascending,
 * with curvature linewidth, neighbour spacing and overlap flag filled in.
 * The half-max linewidth is attempted for every resonance and left empty
 * where it cannot be bracketed.
 */
[[nodiscard]] std::vector<Resonance> find_resonances(const CavityStack& stack, double k_min,
                                                     double k_max,
                                                     const EngineOptions& opts = {});

/// c * sqrt(2 D(k0) / D''(k0)) with the exact second derivative of D.
[[nodiscard]] double linewidth_curvature(const CavityStack& stack, double k0,
                                         const EngineOptions& opts = {});
[[nodiscard]] double linewidth_curvature(const CavityStack& stack, const Resonance& resonance,
                                         const EngineOptions& opts = {});

/// Half the distance between the two half-transmission points around k0.
/// Throws OverlappingResonance when a point is not reached before the
/// spectrum turns back up toward a neighbouring resonance.
[[nodiscard]] double linewidth_halfmax(const CavityStack& stack, const Resonance& resonance,
                                       const EngineOptions& opts = {});

enum class StackFamily { TwoMirror, ThreeMirror, FourMirrorSymmetric, FourMirrorAsymmetric, Other };

/// Shape recognition used to decide which analytic criterion applies.
[[nodiscard]] StackFamily classify_family(const CavityStack& stack);

struct AnalyticOverlapCriterion
{
    StackFamily family = StackFamily::Other;
    std::string expression;
    double lhs = 0.0;
    double rhs = 0.0;
    bool satisfied = false; ///< lhs > rhs means single-mode description valid
};

/// sqrt(2l/L) vs zeta'/zeta^2 (three mirrors, l the shorter gap).
[[nodiscard]] AnalyticOverlapCriterion three_mirror_nonoverlap(double zeta, double zeta_prime,
                                                               double L, double l);
/// 1/(4 zeta'^2) + 2l/L vs 1/zeta^2 (symmetric four mirrors).
[[nodiscard]] AnalyticOverlapCriterion four_mirror_single_mode(double zeta, double zeta_prime,
                                                               double L, double l);

struct OverlapReport
{
    std::vector<Resonance> resonances;
    std::optional<AnalyticOverlapCriterion> analytic;
};

/// Sets overlap_flag: WellResolved iff kappa_curvature < c * spacing / 2.
[[nodiscard]] std::vector<Resonance> classify_overlap(std::vector<Resonance> resonances,
                                                      const EngineOptions& opts = {});
/// Same, plus the analytic criterion when the stack has a recognised shape.
[[nodiscard]] OverlapReport classify_overlap(const CavityStack& stack,
                                             std::vector<Resonance> resonances,
                                             const EngineOptions& opts = {});

enum class CommonFamily { ThreeMirror, FourMirrorSymmetric };

struct ModeIndices
{
    long long long_gap = 0;  ///< n: integer multiple of pi added to theta0
    long long short_gap = 0; ///< m: integer multiple of pi added to phi0
};

struct CommonResonancePhases
{
    double theta0 = 0.0; ///< phase of the gap of length L
    double phi0 = 0.0;   ///< phase of each gap of length l
};

[[nodiscard]] CommonResonancePhases common_resonance_phases(CommonFamily family, double zeta,
                                                            double zeta_prime);

struct CommonResonanceDesign
{
    CommonFamily family = CommonFamily::ThreeMirror;
    double zeta = 0.0;
    double zeta_prime = 0.0;
    double target_k = 0.0;
    double L = 0.0;
    double l = 0.0;
    double k0 = 0.0; ///< refined resonance of the constructed stack

    /// zeta, zeta', zeta at 0, L, L+l; or zeta, zeta', zeta', zeta at 0, l, l+L, L+2l.
    [[nodiscard]] CavityStack stack() const;
};

/// Gap lengths putting every subcavity on its resonance condition at
/// target_k. Throws InvalidInput for non-positive gaps and DesignFailure
/// if the built stack has no resonance within 1e-6 relative of target_k.
[[nodiscard]] CommonResonanceDesign design_common_resonance(CommonFamily family, double zeta,
                                                            double zeta_prime, double target_k,
                                                            ModeIndices indices,
                                                            const EngineOptions& opts = {});

/// Resonance nearest to k in the list (InvalidInput if empty).
[[nodiscard]] const Resonance& nearest_resonance(const std::vector<Resonance>& resonances,
                                                 double k);

[[nodiscard]] const char* to_string(OverlapFlag flag);
[[nodiscard]] const char* to_string(StackFamily family);

} // namespace multicav

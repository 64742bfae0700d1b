#pragma once

#include "multicav/core_tmm.hpp"
#include "multicav/resonance.hpp"

#include <optional>
#include <string>
#include <vector>

namespace multicav {

/// Quantum emitter: beta folds (d/hbar) sqrt(hbar omega / (eps0 A)) into one
/// constant (frequency x sqrt(length)); gamma is the spontaneous-emission rate.
struct EmitterParams
{
    double beta = 1.0;
    double gamma = 1.0;
};

struct OmCoupling
{
    double G = 0.0;
    double G_half_step = 0.0; ///< same estimate with delta_x / 2
    double delta_x = 0.0;
    bool nonlinear = false; ///< the two estimates differ by more than 1 %
};

/**
 * Dispersive optomechanical coupling G = c |dk0/dx| of element
 * `movable_index`, by symmetric displacement and re-refinement of the
 * resonance. A non-positive `delta_x` selects the default
 * min(1e-6, 1e-3 spacing/k0) x smallest adjacent gap.
 *
 * Throws InvalidInput for an overlapping resonance or an oversized step,
 * BranchJump when the displaced minimum moves by more than spacing/4.
 */
[[nodiscard]] OmCoupling om_coupling(const CavityStack& stack, const Resonance& resonance,
                                     std::size_t movable_index, double delta_x = 0.0,
                                     const EngineOptions& opts = {});

struct JcCoupling
{
    std::vector<double> g_per_gap;
    std::vector<bool> zero_field; ///< gaps whose mean intensity vanishes (g reported as 0)
    std::vector<double> mean_intensity;
};

/// g_i = beta / sqrt(sum_j l_j |E_j / E_i|^2) from the gap-mean intensities at k0.
[[nodiscard]] JcCoupling jc_coupling(const CavityStack& stack, const Resonance& resonance,
                                     const EmitterParams& emitter);

struct NormalizationNote
{
    std::string name;
    double value = 0.0;
};

struct CouplingReport
{
    Resonance resonance;
    double G = 0.0;
    std::vector<double> g_per_gap;
    double C_om = 0.0;
    std::vector<double> C_jc_per_gap;
    std::vector<NormalizationNote> normalization_notes;
    bool nonlinearity_warning = false;
};

/// Fills C_om = G^2 / kappa and C_jc,i = g_i^2 / (kappa gamma) from the
/// report's G, g and resonance.kappa_curvature.
[[nodiscard]] CouplingReport cooperativities(CouplingReport report, const EmitterParams& emitter);

/// G, g per gap and both cooperativities for one resonance.
[[nodiscard]] CouplingReport evaluate_couplings(const CavityStack& stack,
                                                const Resonance& resonance,
                                                std::size_t movable_index,
                                                const EmitterParams& emitter,
                                                const EngineOptions& opts = {});

} // namespace multicav

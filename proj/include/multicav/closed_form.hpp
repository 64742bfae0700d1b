#pragma once

// Analytic results for two-, three- and four-mirror resonators, written
// independently of the transfer-matrix engine so each can check the other.
// All linewidths are HWHM in units of c / length, couplings G in
// c / length^2, and g in units of beta.

namespace multicav::closed_form {

enum class LengthFamily { ThreeMirror, FourMirrorSymmetric, FourMirrorAsymmetric };

struct EffectiveLength
{
    double value = 0.0;
    LengthFamily family = LengthFamily::ThreeMirror;
};

/// |r'| = zeta' / sqrt(1 + zeta'^2)
[[nodiscard]] double reflectivity(double zeta);

/// L(1 - r') + l(1 + r')
[[nodiscard]] EffectiveLength effective_length_three(double zeta_prime, double L, double l);
/// 2l + L (sqrt(1 + zeta'^2) - zeta')^2
[[nodiscard]] EffectiveLength effective_length_four(double zeta_prime, double L, double l);
/// l1 + l2 + L (sqrt(1 + zeta'^2) - zeta')^2
[[nodiscard]] EffectiveLength effective_length_four(double zeta_prime, double L, double l1,
                                                    double l2);

struct TwoMirror
{
    double theta0 = 0.0;
    double k0 = 0.0;
    double kappa_exact = 0.0;
    double kappa_highR = 0.0;
    double intensity = 0.0;
    double G = 0.0;
    double g_over_beta = 0.0;
};

/**
 * Mirrors zeta (left) and zeta' (right) a distance L apart. theta0 is the
 * principal solution of tan(2 theta0) = -(zeta + zeta')/(1 - zeta zeta'),
 * shifted by pi/2 when zeta zeta' < 1 (where the principal value is a
 * transmission minimum), plus mode_index * pi.
 *
 * Throws DomainError for zeta zeta' <= 0 (kappa_exact needs sqrt(zeta zeta')).
 */
[[nodiscard]] TwoMirror two_mirror(double zeta, double zeta_prime, double L, long long mode_index,
                                   double c = 1.0);

struct Criterion
{
    double lhs = 0.0;
    double rhs = 0.0;
    [[nodiscard]] bool satisfied() const { return lhs > rhs; }
};

struct ThreeMirrorCommon
{
    double theta0 = 0.0;
    double phi0 = 0.0;
    double kappa_exact = 0.0;
    double kappa_highR = 0.0;
    EffectiveLength L_eff;
    double E_L_sq = 0.0;
    double E_l_sq = 0.0;
    double ratio = 0.0; ///< |E_L / E_l|^2
    Criterion nonoverlap;
    double G_highR = 0.0;
    double G_m = 0.0; ///< membrane-in-the-middle reference, total length L + l
};

/// Common resonance of zeta | L | zeta' | l | zeta at wavenumber k.
[[nodiscard]] ThreeMirrorCommon three_mirror_common(double zeta, double zeta_prime, double L,
                                                    double l, double k, double c = 1.0);

struct FourMirrorCommon
{
    double theta0 = 0.0;
    double phi0 = 0.0;
    double kappa_exact = 0.0;
    double kappa_highR = 0.0;
    EffectiveLength L_eff;
    double E_l_sq = 0.0;
    double E_L_sq = 0.0;
    double ratio = 0.0; ///< |E_L / E_l|^2
    Criterion single_mode;
    double G_exact = 0.0;
    double G_highR = 0.0; ///< c k / L_eff
    double g_l_over_beta = 0.0;
    double g_L_over_beta = 0.0;
};

/**
 * Common resonance of zeta | l | zeta' | L | zeta' | l | zeta at wavenumber k.
 * Throws OutsideValidity when the radicand of kappa_exact is not positive.
 */
[[nodiscard]] FourMirrorCommon four_mirror_symmetric_common(double zeta, double zeta_prime,
                                                            double L, double l, double k,
                                                            double c = 1.0);

/// kappa_exact alone (the radicand check included).
[[nodiscard]] double four_mirror_kappa_exact(double zeta, double zeta_prime, double L, double l,
                                             double c = 1.0);
[[nodiscard]] double three_mirror_kappa_exact(double zeta, double zeta_prime, double L, double l,
                                              double c = 1.0);

/// G / G_m ~ 1 / (1 - r' + (l/L)(1 + r')), strongly asymmetric three-mirror cavity.
[[nodiscard]] double membrane_at_end_enhancement(double zeta_prime, double L, double l);

} // namespace multicav::closed_form

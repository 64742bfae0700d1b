#include "multicav/closed_form.hpp"

#include "multicav/errors.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace multicav::closed_form {

namespace {

constexpr double pi = std::numbers::pi;

void require_lengths(double L, double l)
{
    if (!(L > 0.0) || !(l > 0.0)) {
        throw InvalidInput("subcavity lengths must be positive");
    }
}

// -(1/2) arctan((z + z') / (1 - z z')), principal branch
double half_arctan_phase(double zeta, double zeta_prime)
{
    return -0.5 * std::atan((zeta + zeta_prime) / (1.0 - zeta * zeta_prime));
}

} // namespace

double reflectivity(double zeta)
{
    return zeta / std::sqrt(1.0 + zeta * zeta);
}

EffectiveLength effective_length_three(double zeta_prime, double L, double l)
{
    const double r = reflectivity(zeta_prime);
    return {L * (1.0 - r) + l * (1.0 + r), LengthFamily::ThreeMirror};
}

EffectiveLength effective_length_four(double zeta_prime, double L, double l)
{
    const double s = std::sqrt(1.0 + zeta_prime * zeta_prime) - zeta_prime;
    return {2.0 * l + L * s * s, LengthFamily::FourMirrorSymmetric};
}

EffectiveLength effective_length_four(double zeta_prime, double L, double l1, double l2)
{
    const double s = std::sqrt(1.0 + zeta_prime * zeta_prime) - zeta_prime;
    return {l1 + l2 + L * s * s, LengthFamily::FourMirrorAsymmetric};
}

TwoMirror two_mirror(double zeta, double zeta_prime, double L, long long mode_index, double c)
{
    if (!(L > 0.0)) {
        throw InvalidInput("cavity length must be positive");
    }
    if (!(zeta * zeta_prime > 0.0)) {
        throw DomainError("two-mirror linewidth needs zeta * zeta' > 0");
    }
    TwoMirror out;
    out.theta0 = half_arctan_phase(zeta, zeta_prime) + static_cast<double>(mode_index) * pi;
    if (zeta * zeta_prime < 1.0) {
        out.theta0 += 0.5 * pi;
    }
    out.k0 = out.theta0 / L;

    const double prod = (1.0 + zeta * zeta) * (1.0 + zeta_prime * zeta_prime);
    const double root = std::sqrt(prod);
    out.kappa_exact = (c / (2.0 * L)) * (root - zeta * zeta_prime) /
                      (std::sqrt(zeta * zeta_prime) * std::sqrt(root));
    out.kappa_highR =
        (c / (4.0 * L)) * (1.0 / (zeta * zeta) + 1.0 / (zeta_prime * zeta_prime));
    const double dmin = root - zeta * zeta_prime;
    out.intensity = (1.0 + 2.0 * zeta_prime * zeta_prime) / (dmin * dmin);
    out.G = c * out.k0 / L;
    out.g_over_beta = 1.0 / std::sqrt(L);
    return out;
}

double three_mirror_kappa_exact(double zeta, double zeta_prime, double L, double l, double c)
{
    require_lengths(L, l);
    const double z = zeta;
    const double zp = zeta_prime;
    const double root = std::sqrt((1.0 + z * z) * (1.0 + zp * zp));
    const double bracket = (l * l + L * L) * z * (1.0 + z * z) * (1.0 + 2.0 * zp * zp) +
                           2.0 * L * l * z * (1.0 + z * z) +
                           (l * l - L * L) * zp * (1.0 + 2.0 * z * z) * root;
    const double ratio = (1.0 + zp * zp) / (z * bracket);
    if (!(ratio > 0.0)) {
        throw OutsideValidity("three-mirror linewidth radicand is not positive");
    }
    return (c / 2.0) * std::sqrt(ratio);
}

ThreeMirrorCommon three_mirror_common(double zeta, double zeta_prime, double L, double l, double k,
                                      double c)
{
    require_lengths(L, l);
    ThreeMirrorCommon out;
    out.phi0 = half_arctan_phase(zeta, zeta_prime);
    out.theta0 = out.phi0 + 0.5 * pi;
    out.kappa_exact = three_mirror_kappa_exact(zeta, zeta_prime, L, l, c);
    out.L_eff = effective_length_three(zeta_prime, L, l);
    out.kappa_highR = c / (2.0 * zeta * zeta * out.L_eff.value);

    const double zp2 = zeta_prime * zeta_prime;
    const double s = std::sqrt(1.0 + zp2) - zeta_prime;
    out.E_L_sq = 2.0 * zeta * zeta * s * s / (1.0 + zp2);
    out.E_l_sq = 2.0 * zeta * zeta / (1.0 + zp2);
    out.ratio = s * s;
    out.nonoverlap = {std::sqrt(2.0 * l / L), zeta_prime / (zeta * zeta)};

    const double r = reflectivity(zeta_prime);
    out.G_highR = 2.0 * c * k * r / out.L_eff.value;
    out.G_m = 2.0 * c * k * r / (L + l);
    return out;
}

double four_mirror_kappa_exact(double zeta, double zeta_prime, double L, double l, double c)
{
    require_lengths(L, l);
    const double z = zeta;
    const double zp = zeta_prime;
    const double root = std::sqrt((1.0 + z * z) * (1.0 + zp * zp));
    // The 2l(1 + 2 zeta^2) term enters with a + sign: with it the zeta >> 1
    // limit is c / (2 zeta^2 L_eff) and the engine agrees to ~1e-9.
    const double bracket =
        L * ((1.0 + 2.0 * z * z) * (1.0 + 2.0 * zp * zp) - 4.0 * z * zp * root) +
        2.0 * l * (1.0 + 2.0 * z * z);
    const double radicand = bracket * bracket - (2.0 * l + L) * (2.0 * l + L) - 8.0 * l * L * zp * zp;
    if (!(radicand > 0.0)) {
        throw OutsideValidity("four-mirror linewidth radicand is not positive (" +
                              std::to_string(radicand) + ")");
    }
    return c / std::sqrt(radicand);
}

FourMirrorCommon four_mirror_symmetric_common(double zeta, double zeta_prime, double L, double l,
                                              double k, double c)
{
    require_lengths(L, l);
    FourMirrorCommon out;
    out.theta0 = -0.5 * std::atan(2.0 * zeta_prime / (1.0 - zeta_prime * zeta_prime));
    out.phi0 = half_arctan_phase(zeta, zeta_prime);
    out.kappa_exact = four_mirror_kappa_exact(zeta, zeta_prime, L, l, c);
    out.L_eff = effective_length_four(zeta_prime, L, l);
    out.kappa_highR = c / (2.0 * zeta * zeta * out.L_eff.value);

    const double s = std::sqrt(1.0 + zeta_prime * zeta_prime) - zeta_prime;
    out.E_l_sq = 2.0 * zeta * zeta;
    out.E_L_sq = 2.0 * zeta * zeta * s * s;
    out.ratio = s * s;
    out.single_mode = {1.0 / (4.0 * zeta_prime * zeta_prime) + 2.0 * l / L, 1.0 / (zeta * zeta)};

    const double cross = zeta * std::sqrt(1.0 + zeta_prime * zeta_prime) -
                         zeta_prime * std::sqrt(1.0 + zeta * zeta);
    out.G_exact = c * k * zeta * zeta / (2.0 * l * zeta * zeta + L * cross * cross);
    out.G_highR = c * k / out.L_eff.value;
    out.g_l_over_beta = 1.0 / std::sqrt(2.0 * l + L * out.ratio);
    out.g_L_over_beta = 1.0 / std::sqrt(L + 2.0 * l / out.ratio);
    return out;
}

double membrane_at_end_enhancement(double zeta_prime, double L, double l)
{
    require_lengths(L, l);
    const double r = reflectivity(zeta_prime);
    return 1.0 / (1.0 - r + (l / L) * (1.0 + r));
}

} // namespace multicav::closed_form

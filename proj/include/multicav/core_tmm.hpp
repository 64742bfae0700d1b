#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace multicav {

using complex = std::complex<double>;

/// Infinitely thin lossless mirror: real polarizability and axial position.
struct OpticalElement
{
    double zeta = 0.0;
    double position = 0.0;
};

enum class Incidence { FromLeft, FromRight };

/**
 * 2x2 transfer matrix acting on (backward, forward) amplitude pairs.
 *
 * The amplitudes on the left of an element or gap are obtained by applying
 * the matrix to the amplitudes on its right. Every matrix built here is
 * unimodular and has the lossless structure m11 = conj(m22),
 * m12 = conj(m21).
 */
struct TransferMatrix
{
    complex m11{1.0, 0.0};
    complex m12{0.0, 0.0};
    complex m21{0.0, 0.0};
    complex m22{1.0, 0.0};

    [[nodiscard]] static TransferMatrix identity() { return {}; }

    [[nodiscard]] complex determinant() const { return m11 * m22 - m12 * m21; }

    friend TransferMatrix operator*(const TransferMatrix& a, const TransferMatrix& b)
    {
        return {a.m11 * b.m11 + a.m12 * b.m21, a.m11 * b.m12 + a.m12 * b.m22,
                a.m21 * b.m11 + a.m22 * b.m21, a.m21 * b.m12 + a.m22 * b.m22};
    }
};

/**
 * Ordered set of thin mirrors along the optical axis.
 *
 * Positions must be finite and strictly increasing; the polarizabilities
 * must be finite. A single element is a valid stack with no gaps.
 */
class CavityStack
{
public:
    explicit CavityStack(std::vector<OpticalElement> elements,
                         Incidence incidence = Incidence::FromLeft);

    [[nodiscard]] std::span<const OpticalElement> elements() const { return elements_; }
    [[nodiscard]] std::size_t size() const { return elements_.size(); }
    [[nodiscard]] std::size_t gap_count() const { return elements_.size() - 1; }
    [[nodiscard]] Incidence incidence() const { return incidence_; }

    [[nodiscard]] double gap(std::size_t i) const
    {
        return elements_[i + 1].position - elements_[i].position;
    }
    [[nodiscard]] std::vector<double> gaps() const;
    [[nodiscard]] double total_length() const
    {
        return elements_.back().position - elements_.front().position;
    }

    /// Copy with element `index` shifted by `dx` along the axis.
    [[nodiscard]] CavityStack displaced(std::size_t index, double dx) const;
    /// Copy with every position multiplied by `s`.
    [[nodiscard]] CavityStack scaled(double s) const;
    [[nodiscard]] CavityStack with_incidence(Incidence incidence) const;

    /// Builds a stack from polarizabilities and the gaps between them,
    /// with the first element at the origin.
    [[nodiscard]] static CavityStack from_gaps(std::span<const double> zetas,
                                               std::span<const double> gaps,
                                               Incidence incidence = Incidence::FromLeft);

private:
    std::vector<OpticalElement> elements_;
    Incidence incidence_;
};

enum class Region { LeftOuter, Gap, RightOuter };

/// Field in one region: E(x) = c_plus e^{ik(x-x0)} + c_minus e^{-ik(x-x0)},
/// with x0 the left boundary of the region (right boundary for the left
/// outer region).
struct FieldSegment
{
    Region region = Region::Gap;
    int gap_index = 0; ///< -1 for the left outer region, gap_count() for the right one
    complex c_plus;
    complex c_minus;
    double mean_intensity = 0.0;
};

[[nodiscard]] TransferMatrix mirror_matrix(double zeta);
[[nodiscard]] TransferMatrix propagation_matrix(double theta);

/// Left-to-right product M(z0) Mfs(k g0) M(z1) ... M(z_{n-1}).
[[nodiscard]] TransferMatrix compose(const CavityStack& stack, double k);

/// D(k) = |m22|^2 of the composed matrix; transmission is 1/D.
[[nodiscard]] double denominator(const CavityStack& stack, double k);

struct DenominatorJet
{
    double value = 0.0;
    double slope = 0.0;     ///< dD/dk, exact
    double curvature = 0.0; ///< d2D/dk2, exact
};
/// D(k) together with its exact first and second derivatives in k.
[[nodiscard]] DenominatorJet denominator_jet(const CavityStack& stack, double k);

[[nodiscard]] double transmission(const CavityStack& stack, double k);
[[nodiscard]] double reflection(const CavityStack& stack, double k);

/**
 * Field amplitudes in every region for a unit-amplitude plane wave on the
 * incidence side. The result holds the left outer region, one segment per
 * gap in order, then the right outer region.
 */
[[nodiscard]] std::vector<FieldSegment> field_segments(const CavityStack& stack, double k);

} // namespace multicav

#include "multicav/core_tmm.hpp"

#include "multicav/errors.hpp"

#include <cmath>
#include <string>

namespace multicav {

namespace {

constexpr complex I{0.0, 1.0};

void require_finite(double v, const char* what)
{
    if (!std::isfinite(v)) {
        throw InvalidInput(std::string(what) + " must be finite");
    }
}

void require_wavenumber(double k)
{
    if (!std::isfinite(k) || k <= 0.0) {
        throw InvalidInput("wavenumber must be finite and positive");
    }
}

// Products and phases are accumulated in extended precision: gaps are
// formed from positions without rounding and the phase sums stay accurate
// near sharp resonances, where D is very sensitive to them.
using real_x = long double;
using complex_x = std::complex<real_x>;

struct MatrixX
{
    complex_x m11{1.0L, 0.0L}, m12, m21, m22{1.0L, 0.0L};

    friend MatrixX operator*(const MatrixX& a, const MatrixX& b)
    {
        return {a.m11 * b.m11 + a.m12 * b.m21, a.m11 * b.m12 + a.m12 * b.m22,
                a.m21 * b.m11 + a.m22 * b.m21, a.m21 * b.m12 + a.m22 * b.m22};
    }
};

MatrixX mirror_x(double zeta)
{
    const complex_x iz(0.0L, static_cast<real_x>(zeta));
    return {1.0L + iz, iz, -iz, 1.0L - iz};
}

real_x gap_x(const CavityStack& stack, std::size_t i)
{
    const auto e = stack.elements();
    return static_cast<real_x>(e[i + 1].position) - static_cast<real_x>(e[i].position);
}

complex_x phase_x(real_x theta)
{
    return {std::cos(theta), std::sin(theta)};
}

MatrixX compose_x(const CavityStack& stack, double k)
{
    const auto elems = stack.elements();
    MatrixX m = mirror_x(elems[0].zeta);
    for (std::size_t i = 1; i < elems.size(); ++i) {
        const complex_x ep = phase_x(static_cast<real_x>(k) * gap_x(stack, i - 1));
        const MatrixX p{ep, 0.0L, 0.0L, std::conj(ep)};
        m = m * p * mirror_x(elems[i].zeta);
    }
    return m;
}

complex to_double(const complex_x& z)
{
    return {static_cast<double>(z.real()), static_cast<double>(z.imag())};
}

// Second row (m21, m22) of the product with its first two k-derivatives.
struct RowJet
{
    complex_x a, b;
    complex_x da, db;
    complex_x d2a, d2b;
};

RowJet row_jet(const CavityStack& stack, double k)
{
    const auto elems = stack.elements();
    const auto first = mirror_x(elems[0].zeta);
    RowJet r{first.m21, first.m22, 0.0L, 0.0L, 0.0L, 0.0L};
    for (std::size_t i = 1; i < elems.size(); ++i) {
        const real_x g = gap_x(stack, i - 1);
        const complex_x ep = phase_x(static_cast<real_x>(k) * g);
        const complex_x em = std::conj(ep);
        const complex_x ig(0.0L, g);
        // row * diag(ep, em); d/dk ep = ig ep, d/dk em = -ig em
        const RowJet p{r.a * ep,
                       r.b * em,
                       (r.da + ig * r.a) * ep,
                       (r.db - ig * r.b) * em,
                       (r.d2a + 2.0L * ig * r.da + ig * ig * r.a) * ep,
                       (r.d2b - 2.0L * ig * r.db + ig * ig * r.b) * em};
        const auto mm = mirror_x(elems[i].zeta);
        r = {p.a * mm.m11 + p.b * mm.m21,     p.a * mm.m12 + p.b * mm.m22,
             p.da * mm.m11 + p.db * mm.m21,   p.da * mm.m12 + p.db * mm.m22,
             p.d2a * mm.m11 + p.d2b * mm.m21, p.d2a * mm.m12 + p.d2b * mm.m22};
    }
    return r;
}

} // namespace

CavityStack::CavityStack(std::vector<OpticalElement> elements, Incidence incidence)
    : elements_(std::move(elements)), incidence_(incidence)
{
    if (elements_.empty()) {
        throw InvalidInput("stack must contain at least one element");
    }
    for (std::size_t i = 0; i < elements_.size(); ++i) {
        require_finite(elements_[i].zeta, "polarizability");
        require_finite(elements_[i].position, "position");
        if (i > 0 && !(elements_[i].position > elements_[i - 1].position)) {
            throw InvalidInput("element positions must be strictly increasing (element " +
                               std::to_string(i) + ")");
        }
    }
}

std::vector<double> CavityStack::gaps() const
{
    std::vector<double> out(gap_count());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = gap(i);
    }
    return out;
}

CavityStack CavityStack::displaced(std::size_t index, double dx) const
{
    if (index >= elements_.size()) {
        throw InvalidInput("element index out of range");
    }
    auto moved = elements_;
    moved[index].position += dx;
    return CavityStack(std::move(moved), incidence_);
}

CavityStack CavityStack::scaled(double s) const
{
    if (!std::isfinite(s) || s <= 0.0) {
        throw InvalidInput("scale factor must be positive");
    }
    auto out = elements_;
    for (auto& e : out) {
        e.position *= s;
    }
    return CavityStack(std::move(out), incidence_);
}

CavityStack CavityStack::with_incidence(Incidence incidence) const
{
    return CavityStack(elements_, incidence);
}

CavityStack CavityStack::from_gaps(std::span<const double> zetas, std::span<const double> gaps,
                                   Incidence incidence)
{
    if (zetas.empty() || gaps.size() + 1 != zetas.size()) {
        throw InvalidInput("need exactly one gap fewer than elements");
    }
    std::vector<OpticalElement> elems;
    elems.reserve(zetas.size());
    double x = 0.0;
    for (std::size_t i = 0; i < zetas.size(); ++i) {
        if (i > 0) {
            if (!(gaps[i - 1] > 0.0)) {
                throw InvalidInput("gap lengths must be positive");
            }
            x += gaps[i - 1];
        }
        elems.push_back({zetas[i], x});
    }
    return CavityStack(std::move(elems), incidence);
}

TransferMatrix mirror_matrix(double zeta)
{
    require_finite(zeta, "polarizability");
    return {1.0 + I * zeta, I * zeta, -I * zeta, 1.0 - I * zeta};
}

TransferMatrix propagation_matrix(double theta)
{
    require_finite(theta, "phase");
    return {std::polar(1.0, theta), 0.0, 0.0, std::polar(1.0, -theta)};
}

TransferMatrix compose(const CavityStack& stack, double k)
{
    require_wavenumber(k);
    const auto m = compose_x(stack, k);
    return {to_double(m.m11), to_double(m.m12), to_double(m.m21), to_double(m.m22)};
}

double denominator(const CavityStack& stack, double k)
{
    require_wavenumber(k);
    return static_cast<double>(std::norm(compose_x(stack, k).m22));
}

DenominatorJet denominator_jet(const CavityStack& stack, double k)
{
    require_wavenumber(k);
    const auto r = row_jet(stack, k);
    // D = |b|^2, D' = 2 Re(b* b'), D'' = 2 |b'|^2 + 2 Re(b* b'')
    return {static_cast<double>(std::norm(r.b)),
            static_cast<double>(2.0L * std::real(std::conj(r.b) * r.db)),
            static_cast<double>(2.0L * std::norm(r.db) + 2.0L * std::real(std::conj(r.b) * r.d2b))};
}

double transmission(const CavityStack& stack, double k)
{
    return 1.0 / denominator(stack, k);
}

double reflection(const CavityStack& stack, double k)
{
    require_wavenumber(k);
    const auto m = compose_x(stack, k);
    return static_cast<double>(std::norm(m.m21 / m.m22));
}

namespace {

// Left-incidence walk from the right outer region, where only the
// transmitted wave is present; no cancellation occurs along the way.
std::vector<FieldSegment> walk_from_left(const CavityStack& stack, double k)
{
    const auto m = compose_x(stack, k);
    const auto elems = stack.elements();
    const int ngaps = static_cast<int>(stack.gap_count());

    // Amplitudes (backward, forward) just right of the last element.
    complex_x back = 0.0L;
    complex_x fwd = 1.0L / m.m22;

    auto segment = [](Region region, int index, const complex_x& f, const complex_x& b) {
        return FieldSegment{region, index, to_double(f), to_double(b),
                            static_cast<double>(std::norm(f) + std::norm(b))};
    };

    std::vector<FieldSegment> out(static_cast<std::size_t>(ngaps) + 2);
    out.back() = segment(Region::RightOuter, ngaps, fwd, back);

    for (int j = static_cast<int>(elems.size()) - 1; j >= 0; --j) {
        const auto mm = mirror_x(elems[static_cast<std::size_t>(j)].zeta);
        const complex_x nb = mm.m11 * back + mm.m12 * fwd;
        const complex_x nf = mm.m21 * back + mm.m22 * fwd;
        back = nb;
        fwd = nf;
        if (j == 0) {
            break;
        }
        // (back, fwd) now sit at the right end of gap j-1; carry them to its left end.
        const complex_x ep = phase_x(static_cast<real_x>(k) * gap_x(stack, static_cast<std::size_t>(j - 1)));
        back = ep * back;
        fwd = std::conj(ep) * fwd;
        out[static_cast<std::size_t>(j)] = segment(Region::Gap, j - 1, fwd, back);
    }
    out.front() = segment(Region::LeftOuter, -1, fwd, back);
    return out;
}

} // namespace

std::vector<FieldSegment> field_segments(const CavityStack& stack, double k)
{
    require_wavenumber(k);
    if (stack.incidence() == Incidence::FromLeft) {
        return walk_from_left(stack, k);
    }
    // Right incidence: solve the mirror-image stack (x -> -x) from the left
    // and map each region back. A gap's reference point moves from one end
    // to the other, which costs a phase e^{+-ikg}.
    std::vector<OpticalElement> flipped;
    for (auto it = stack.elements().rbegin(); it != stack.elements().rend(); ++it) {
        flipped.push_back({it->zeta, -it->position});
    }
    const auto mirror = walk_from_left(CavityStack(std::move(flipped)), k);
    const int ngaps = static_cast<int>(stack.gap_count());
    std::vector<FieldSegment> out(mirror.size());
    for (std::size_t i = 0; i < mirror.size(); ++i) {
        const auto& src = mirror[mirror.size() - 1 - i];
        FieldSegment& dst = out[i];
        dst.mean_intensity = src.mean_intensity;
        if (i == 0) {
            dst.region = Region::LeftOuter;
            dst.gap_index = -1;
            dst.c_plus = src.c_minus;
            dst.c_minus = src.c_plus;
        } else if (i + 1 == mirror.size()) {
            dst.region = Region::RightOuter;
            dst.gap_index = ngaps;
            dst.c_plus = src.c_minus;
            dst.c_minus = src.c_plus;
        } else {
            const auto g = static_cast<std::size_t>(i - 1);
            const complex ep = to_double(phase_x(static_cast<real_x>(k) * gap_x(stack, g)));
            dst.region = Region::Gap;
            dst.gap_index = static_cast<int>(g);
            dst.c_plus = src.c_minus * std::conj(ep);
            dst.c_minus = src.c_plus * ep;
        }
    }
    return out;
}

} // namespace multicav

#pragma once

#include <memory>
#include <string>
#include <vector>

namespace symosc {

/// A 2*pi-periodic scalar interaction function with an exact analytic
/// derivative. Implementations reduce the argument with remainder(phi, 2*pi)
/// first, so evaluation is bit-stable under exact 2*pi shifts.
class Coupling {
public:
    virtual ~Coupling() = default;
    virtual double value(double phi) const = 0;
    virtual double deriv(double phi) const = 0;
};

using CouplingPtr = std::shared_ptr<const Coupling>;

struct FourierTerm {
    int harmonic;   // r >= 0
    double amp;     // c_r
    double phase;   // xi_r, radians
};

/// Trigonometric polynomial sum_r c_r cos(r*phi + xi_r). Evaluated with a
/// complex rotation recurrence instead of per-term cos calls.
class FourierCoupling final : public Coupling {
public:
    explicit FourierCoupling(std::vector<FourierTerm> terms);
    double value(double phi) const override;
    double deriv(double phi) const override;
    const std::vector<FourierTerm>& terms() const { return terms_; }

private:
    std::vector<FourierTerm> terms_;  // sorted by harmonic
    int max_harmonic_ = 0;
};

class ConstantCoupling final : public Coupling {
public:
    explicit ConstantCoupling(double c) : c_(c) {}
    double value(double) const override { return c_; }
    double deriv(double) const override { return 0.0; }

private:
    double c_;
};

/// C-infinity bump a*exp(-1/(1-(phi/b)^2)) on (-b, b) mod 2*pi, zero outside.
/// Maximum a/e at phi = 0.
class BumpFunction final : public Coupling {
public:
    BumpFunction(double amplitude, double half_width);
    double value(double phi) const override;
    double deriv(double phi) const override;
    double amplitude() const { return a_; }
    double half_width() const { return b_; }

private:
    double a_, b_;
};

/// base + modulator * bump; equals base exactly outside the bump support.
class BumpModulatedCoupling final : public Coupling {
public:
    BumpModulatedCoupling(CouplingPtr base, CouplingPtr modulator, BumpFunction bump);
    double value(double phi) const override;
    double deriv(double phi) const override;
    const Coupling& base() const { return *base_; }
    const Coupling& modulator() const { return *mod_; }
    const BumpFunction& bump() const { return bump_; }

private:
    CouplingPtr base_, mod_;
    BumpFunction bump_;
};

struct IntervalOffset {
    double lo, hi;   // arc [lo, hi] on the circle, hi may exceed lo by < 2*pi
    double offset;   // a_l added on the arc
    double blend;    // transition width outside the arc
};

/// inner + piecewise offsets: exactly inner(phi) + a_l on each arc, exactly
/// inner(phi) outside the arcs expanded by their blend width, with a
/// C-infinity exponential smoothstep across the blend zones (blend = 0 gives
/// a hard, discontinuous window).
class OffsetCoupling final : public Coupling {
public:
    OffsetCoupling(CouplingPtr inner, std::vector<IntervalOffset> offsets);
    double value(double phi) const override;
    double deriv(double phi) const override;
    const Coupling& inner() const { return *inner_; }
    const std::vector<IntervalOffset>& offsets() const { return offsets_; }

private:
    CouplingPtr inner_;
    std::vector<IntervalOffset> offsets_;
};

struct ArcOffsetSpec {
    double lo, hi, offset;
};

/// Throws std::invalid_argument if the arcs (expanded by blend) are not
/// pairwise disjoint with 2*blend clearance.
CouplingPtr offset_on_intervals(CouplingPtr f, const std::vector<ArcOffsetSpec>& offsets,
                                double blend = 0.05);

/// Named couplings:
///   g_chaos — 4-harmonic coupling generating a chaotic attractor for n = 4;
///   g_tilde — the 10-term high-harmonic perturbation polynomial;
///   g_hat   — g_chaos + g_tilde * bump(2.5, 0.25).
CouplingPtr preset(const std::string& name);

/// Plain-text serialization. Lines:
///   fourier r c xi      (base term; after a `bump` line: modulator term)
///   bump a b            (declares the bump; subsequent fourier lines modulate)
///   offset lo hi a blend
///   constant c
/// Parsing is whitespace-tolerant; '#' starts a comment.
std::string serialize_coupling(const Coupling& f);
CouplingPtr parse_coupling(const std::string& text);

}  // namespace symosc

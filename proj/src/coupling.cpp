#include "symosc/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace symosc {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// Reduce to [-pi, pi]; identical reduced arguments give bit-identical values.
double reduce(double phi) { return std::remainder(phi, kTwoPi); }

double mod_2pi(double x) {
    double m = std::fmod(x, kTwoPi);
    return m < 0 ? m + kTwoPi : m;
}

// exp(-1/t) for t > 0, 0 otherwise. Underflows cleanly to 0 near t = 0.
double expk(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }

// C-infinity step: 0 at t <= 0, 1 at t >= 1.
double smoothstep(double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    const double h = expk(t), g = expk(1.0 - t);
    return h / (h + g);
}

double smoothstep_deriv(double t) {
    if (t <= 0.0 || t >= 1.0) return 0.0;
    const double h = expk(t), g = expk(1.0 - t);
    if (h + g == 0.0) return 0.0;
    const double dh = h / (t * t), dg = g / ((1.0 - t) * (1.0 - t));
    return (dh * g + h * dg) / ((h + g) * (h + g));
}

}  // namespace

// --- FourierCoupling ----------------------------------------------------

FourierCoupling::FourierCoupling(std::vector<FourierTerm> terms) : terms_(std::move(terms)) {
    for (const auto& t : terms_)
        if (t.harmonic < 0) throw std::invalid_argument("FourierCoupling: harmonic must be >= 0");
    std::sort(terms_.begin(), terms_.end(),
              [](const FourierTerm& a, const FourierTerm& b) { return a.harmonic < b.harmonic; });
    for (const auto& t : terms_) max_harmonic_ = std::max(max_harmonic_, t.harmonic);
}

double FourierCoupling::value(double phi) const {
    const double x = reduce(phi);
    const double c1 = std::cos(x), s1 = std::sin(x);
    double cr = 1.0, sr = 0.0;  // cos(r x), sin(r x) by rotation
    double sum = 0.0;
    std::size_t ti = 0;
    for (int r = 0; r <= max_harmonic_; ++r) {
        if (r > 0) {
            const double c = cr * c1 - sr * s1;
            sr = sr * c1 + cr * s1;
            cr = c;
        }
        while (ti < terms_.size() && terms_[ti].harmonic == r) {
            const double a = terms_[ti].amp, xi = terms_[ti].phase;
            sum += a * (std::cos(xi) * cr - std::sin(xi) * sr);
            ++ti;
        }
    }
    return sum;
}

double FourierCoupling::deriv(double phi) const {
    const double x = reduce(phi);
    const double c1 = std::cos(x), s1 = std::sin(x);
    double cr = 1.0, sr = 0.0;
    double sum = 0.0;
    std::size_t ti = 0;
    for (int r = 0; r <= max_harmonic_; ++r) {
        if (r > 0) {
            const double c = cr * c1 - sr * s1;
            sr = sr * c1 + cr * s1;
            cr = c;
        }
        while (ti < terms_.size() && terms_[ti].harmonic == r) {
            const double a = terms_[ti].amp, xi = terms_[ti].phase;
            // d/dphi [a cos(r phi + xi)] = -a r sin(r phi + xi)
            sum += -a * r * (std::sin(xi) * cr + std::cos(xi) * sr);
            ++ti;
        }
    }
    return sum;
}

// --- BumpFunction -------------------------------------------------------

BumpFunction::BumpFunction(double amplitude, double half_width) : a_(amplitude), b_(half_width) {
    if (!(b_ > 0.0 && b_ < 3.14159265358979323846))
        throw std::invalid_argument("BumpFunction: half width must lie in (0, pi)");
}

double BumpFunction::value(double phi) const {
    const double u = reduce(phi) / b_;
    const double t = 1.0 - u * u;
    if (t <= 1.0 / 745.0) return 0.0;  // exp(-1/t) underflows; avoid 0*inf in deriv
    return a_ * std::exp(-1.0 / t);
}

double BumpFunction::deriv(double phi) const {
    const double u = reduce(phi) / b_;
    const double t = 1.0 - u * u;
    if (t <= 1.0 / 745.0) return 0.0;
    return a_ * std::exp(-1.0 / t) * (-2.0 * u / (t * t)) / b_;
}

// --- BumpModulatedCoupling ------------------------------------------------

BumpModulatedCoupling::BumpModulatedCoupling(CouplingPtr base, CouplingPtr modulator,
                                             BumpFunction bump)
    : base_(std::move(base)), mod_(std::move(modulator)), bump_(bump) {
    if (!base_ || !mod_) throw std::invalid_argument("BumpModulatedCoupling: null coupling");
}

double BumpModulatedCoupling::value(double phi) const {
    const double b = bump_.value(phi);
    double v = base_->value(phi);
    if (b != 0.0) v += mod_->value(phi) * b;
    return v;
}

double BumpModulatedCoupling::deriv(double phi) const {
    const double b = bump_.value(phi);
    const double db = bump_.deriv(phi);
    double d = base_->deriv(phi);
    if (b != 0.0 || db != 0.0) d += mod_->deriv(phi) * b + mod_->value(phi) * db;
    return d;
}

// --- OffsetCoupling -------------------------------------------------------

namespace {

// Smooth window: 1 on the arc, 0 outside the arc expanded by blend.
// Returns (w, dw/dphi).
struct WindowEval {
    double w, dw;
};

WindowEval eval_window(const IntervalOffset& o, double phi) {
    const double len = mod_2pi(o.hi - o.lo);
    const double bl = o.blend;
    const double total = len + 2.0 * bl;
    const double u = mod_2pi(phi - (o.lo - bl));
    if (u >= total) return {0.0, 0.0};
    if (bl <= 0.0) return {u <= len ? 1.0 : 0.0, 0.0};
    if (u < bl) return {smoothstep(u / bl), smoothstep_deriv(u / bl) / bl};
    if (u <= total - bl) return {1.0, 0.0};
    return {smoothstep((total - u) / bl), -smoothstep_deriv((total - u) / bl) / bl};
}

}  // namespace

OffsetCoupling::OffsetCoupling(CouplingPtr inner, std::vector<IntervalOffset> offsets)
    : inner_(std::move(inner)), offsets_(std::move(offsets)) {
    if (!inner_) throw std::invalid_argument("OffsetCoupling: null inner coupling");
}

double OffsetCoupling::value(double phi) const {
    double v = inner_->value(phi);
    for (const auto& o : offsets_) v += o.offset * eval_window(o, phi).w;
    return v;
}

double OffsetCoupling::deriv(double phi) const {
    double d = inner_->deriv(phi);
    for (const auto& o : offsets_) d += o.offset * eval_window(o, phi).dw;
    return d;
}

CouplingPtr offset_on_intervals(CouplingPtr f, const std::vector<ArcOffsetSpec>& offsets,
                                double blend) {
    if (blend < 0) throw std::invalid_argument("offset_on_intervals: blend must be >= 0");
    std::vector<IntervalOffset> normalized;
    for (const auto& s : offsets) {
        double lo = mod_2pi(s.lo);
        double len = mod_2pi(s.hi - s.lo);
        if (len == 0.0 && s.hi != s.lo) len = kTwoPi;
        normalized.push_back({lo, lo + len, s.offset, blend});
    }
    // Disjointness with 2*blend clearance, checked circularly.
    std::vector<IntervalOffset> sorted = normalized;
    std::sort(sorted.begin(), sorted.end(),
              [](const IntervalOffset& a, const IntervalOffset& b) { return a.lo < b.lo; });
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const auto& cur = sorted[i];
        const auto& nxt = sorted[(i + 1) % sorted.size()];
        if (sorted.size() == 1) {
            if (cur.hi - cur.lo + 2.0 * blend >= kTwoPi)
                throw std::invalid_argument("offset_on_intervals: arc plus blend covers the circle");
            break;
        }
        double gap = mod_2pi(nxt.lo - cur.hi);
        if (cur.hi - cur.lo >= kTwoPi || gap <= 2.0 * blend)
            throw std::invalid_argument("offset_on_intervals: arcs overlap or lack blend clearance");
    }
    return std::make_shared<OffsetCoupling>(std::move(f), std::move(normalized));
}

// --- Presets --------------------------------------------------------------

namespace {

CouplingPtr make_g_chaos() {
    const double eta1 = 0.138;
    const double xi34 = 0.195511;  // eta1 + eta2, eta2 = 0.057511
    return std::make_shared<FourierCoupling>(std::vector<FourierTerm>{
        {1, -2.0, eta1},
        {2, -2.0, -eta1},
        {3, -1.0, xi34},
        {4, -0.88, xi34},
    });
}

CouplingPtr make_g_tilde() {
    return std::make_shared<FourierCoupling>(std::vector<FourierTerm>{
        {6, -0.676135392447403, 0.846647746060342},
        {8, 0.844660333390606, 0.954985847962987},
        {10, 0.087624615584542, 0.212748482509925},
        {12, -0.644961491438887, 0.025296512718163},
        {14, -0.459724407978054, 0.180050952622569},
        {16, -1.175355598611419, 0.835173783095831},
        {18, 0.799302873723814, 0.850732311209280},
        {20, -1.303832930713680, 0.863697094160152},
        {22, 0.094742514998172, 0.355260772731067},
        {24, -2.293749915528502, 0.463364388737488},
    });
}

}  // namespace

CouplingPtr preset(const std::string& name) {
    if (name == "g_chaos") return make_g_chaos();
    if (name == "g_tilde") return make_g_tilde();
    if (name == "g_hat")
        return std::make_shared<BumpModulatedCoupling>(make_g_chaos(), make_g_tilde(),
                                                       BumpFunction(2.5, 0.25));
    throw std::invalid_argument("unknown coupling preset: " + name);
}

// --- Serialization ----------------------------------------------------------

namespace {

void emit_fourier(std::ostringstream& out, const FourierCoupling& f) {
    for (const auto& t : f.terms()) {
        out.precision(17);
        out << "fourier " << t.harmonic << " " << t.amp << " " << t.phase << "\n";
    }
}

void serialize_core(std::ostringstream& out, const Coupling& f) {
    if (auto* fc = dynamic_cast<const FourierCoupling*>(&f)) {
        emit_fourier(out, *fc);
    } else if (auto* cc = dynamic_cast<const ConstantCoupling*>(&f)) {
        out.precision(17);
        out << "constant " << cc->value(0.0) << "\n";
    } else if (auto* bm = dynamic_cast<const BumpModulatedCoupling*>(&f)) {
        serialize_core(out, bm->base());
        out.precision(17);
        out << "bump " << bm->bump().amplitude() << " " << bm->bump().half_width() << "\n";
        auto* mod = dynamic_cast<const FourierCoupling*>(&bm->modulator());
        if (!mod)
            throw std::invalid_argument("serialize_coupling: modulator must be a Fourier polynomial");
        emit_fourier(out, *mod);
    } else {
        throw std::invalid_argument("serialize_coupling: unsupported coupling composition");
    }
}

}  // namespace

std::string serialize_coupling(const Coupling& f) {
    std::ostringstream out;
    if (auto* oc = dynamic_cast<const OffsetCoupling*>(&f)) {
        serialize_core(out, oc->inner());
        for (const auto& o : oc->offsets()) {
            out.precision(17);
            out << "offset " << o.lo << " " << o.hi << " " << o.offset << " " << o.blend << "\n";
        }
    } else {
        serialize_core(out, f);
    }
    return out.str();
}

CouplingPtr parse_coupling(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::vector<FourierTerm> base, modulator;
    double constant = 0.0;
    bool have_constant = false;
    bool have_bump = false;
    double bump_a = 0.0, bump_b = 0.0;
    std::vector<IntervalOffset> offsets;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string kw;
        if (!(ls >> kw)) continue;
        auto fail = [&](const std::string& why) {
            throw std::invalid_argument("coupling spec line " + std::to_string(lineno) + ": " + why);
        };
        if (kw == "fourier") {
            FourierTerm t{};
            if (!(ls >> t.harmonic >> t.amp >> t.phase)) fail("expected: fourier r c xi");
            (have_bump ? modulator : base).push_back(t);
        } else if (kw == "bump") {
            if (have_bump) fail("duplicate bump line");
            if (!(ls >> bump_a >> bump_b)) fail("expected: bump a b");
            have_bump = true;
        } else if (kw == "offset") {
            IntervalOffset o{};
            if (!(ls >> o.lo >> o.hi >> o.offset >> o.blend)) fail("expected: offset lo hi a blend");
            offsets.push_back(o);
        } else if (kw == "constant") {
            if (!(ls >> constant)) fail("expected: constant c");
            have_constant = true;
        } else {
            fail("unknown keyword '" + kw + "'");
        }
    }
    if (have_constant) base.push_back({0, constant, 0.0});
    CouplingPtr result;
    if (base.empty() && !have_bump) {
        result = std::make_shared<ConstantCoupling>(0.0);
    } else {
        result = std::make_shared<FourierCoupling>(std::move(base));
    }
    if (have_bump) {
        result = std::make_shared<BumpModulatedCoupling>(
            result, std::make_shared<FourierCoupling>(std::move(modulator)),
            BumpFunction(bump_a, bump_b));
    }
    if (!offsets.empty()) {
        // Reuse the validation in offset_on_intervals per distinct blend width.
        std::vector<ArcOffsetSpec> specs;
        specs.reserve(offsets.size());
        double blend = offsets.front().blend;
        for (const auto& o : offsets) {
            if (o.blend != blend)
                throw std::invalid_argument("coupling spec: offsets must share one blend width");
            specs.push_back({o.lo, o.hi, o.offset});
        }
        result = offset_on_intervals(std::move(result), specs, blend);
    }
    return result;
}

}  // namespace symosc

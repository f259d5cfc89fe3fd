#include "symosc/permgroup.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>

namespace symosc {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

std::uint64_t factorial_u64(int n) {
    std::uint64_t f = 1;
    for (int i = 2; i <= n; ++i) f *= static_cast<std::uint64_t>(i);
    return f;
}

double circle_dist(double a, double b) {
    return std::abs(std::remainder(a - b, kTwoPi));
}

}  // namespace

Permutation::Permutation(std::vector<int> images) : img_(std::move(images)) {
    const int n = degree();
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    for (int x : img_) {
        if (x < 0 || x >= n || seen[static_cast<std::size_t>(x)])
            throw std::invalid_argument("Permutation: images must be a bijection of 0..N-1");
        seen[static_cast<std::size_t>(x)] = 1;
    }
}

Permutation Permutation::identity(int degree) {
    std::vector<int> img(static_cast<std::size_t>(degree));
    for (int i = 0; i < degree; ++i) img[static_cast<std::size_t>(i)] = i;
    return Permutation(std::move(img));
}

Permutation Permutation::transposition(int degree, int i, int j) {
    auto p = identity(degree);
    std::swap(p.img_[static_cast<std::size_t>(i)], p.img_[static_cast<std::size_t>(j)]);
    return p;
}

Permutation Permutation::cycle(int degree) {
    std::vector<int> img(static_cast<std::size_t>(degree));
    for (int i = 0; i < degree; ++i) img[static_cast<std::size_t>(i)] = (i + 1) % degree;
    return Permutation(std::move(img));
}

Permutation Permutation::compose(const Permutation& other) const {
    const int n = degree();
    if (other.degree() != n) throw std::invalid_argument("Permutation: degree mismatch");
    std::vector<int> img(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) img[static_cast<std::size_t>(i)] = (*this)(other(i));
    return Permutation(std::move(img));
}

Permutation Permutation::inverse() const {
    const int n = degree();
    std::vector<int> img(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) img[static_cast<std::size_t>((*this)(i))] = i;
    return Permutation(std::move(img));
}

bool Permutation::is_identity() const {
    for (int i = 0; i < degree(); ++i)
        if ((*this)(i) != i) return false;
    return true;
}

std::vector<double> Permutation::apply(const std::vector<double>& v) const {
    const auto n = static_cast<std::size_t>(degree());
    if (v.size() != n) throw std::invalid_argument("Permutation::apply: dimension mismatch");
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[static_cast<std::size_t>(img_[i])] = v[i];
    return out;
}

std::uint64_t Permutation::key() const {
    if (degree() > 16) throw std::runtime_error("Permutation::key: degree > 16");
    std::uint64_t k = 0;
    for (int i = 0; i < degree(); ++i)
        k |= static_cast<std::uint64_t>((*this)(i)) << (4 * i);
    return k;
}

// --- PermGroup ---------------------------------------------------------

namespace {

// Orbit enumeration from generators. Returns empty vector if the closure
// exceeds `cap` elements.
std::vector<Permutation> enumerate_closure(int degree, const std::vector<Permutation>& gens,
                                           std::uint64_t cap) {
    std::vector<Permutation> elems;
    std::unordered_set<std::uint64_t> seen;
    std::deque<Permutation> queue;
    auto id = Permutation::identity(degree);
    elems.push_back(id);
    seen.insert(id.key());
    queue.push_back(id);
    while (!queue.empty()) {
        Permutation cur = queue.front();
        queue.pop_front();
        for (const auto& g : gens) {
            Permutation next = g.compose(cur);
            if (seen.insert(next.key()).second) {
                if (elems.size() + 1 > cap) return {};
                elems.push_back(next);
                queue.push_back(std::move(next));
            }
        }
    }
    std::sort(elems.begin(), elems.end(),
              [](const Permutation& a, const Permutation& b) { return a.key() < b.key(); });
    return elems;
}

std::vector<Permutation> derive_generators(int degree, const std::vector<Permutation>& elements) {
    std::vector<Permutation> gens;
    std::unordered_set<std::uint64_t> closure;
    closure.insert(Permutation::identity(degree).key());
    for (const auto& e : elements) {
        if (closure.count(e.key())) continue;
        gens.push_back(e);
        auto closed = enumerate_closure(degree, gens, elements.size() + 1);
        closure.clear();
        for (const auto& c : closed) closure.insert(c.key());
        if (closure.size() == elements.size()) break;
    }
    return gens;
}

}  // namespace

PermGroup PermGroup::from_generators(int degree, std::vector<Permutation> gens,
                                     std::string label, std::uint64_t cap) {
    PermGroup g;
    g.degree_ = degree;
    g.label_ = std::move(label);
    g.generators_ = std::move(gens);
    g.elements_ = enumerate_closure(degree, g.generators_, cap);
    if (g.elements_.empty())
        throw std::invalid_argument("group too large: enumeration cap exceeded for " + g.label_);
    g.order_ = g.elements_.size();
    for (const auto& e : g.elements_) g.keys_.insert(e.key());
    return g;
}

PermGroup PermGroup::block_product(int degree, const std::vector<std::vector<int>>& blocks,
                                   std::string label, std::uint64_t cap) {
    PermGroup g;
    g.degree_ = degree;
    g.label_ = std::move(label);
    g.blocks_ = blocks;
    g.order_ = 1;
    bool overflow = false;
    for (const auto& b : blocks) {
        std::uint64_t f = factorial_u64(static_cast<int>(b.size()));
        if (g.order_ > (~std::uint64_t{0}) / f) overflow = true;
        g.order_ *= f;
    }
    for (const auto& b : blocks) {
        if (b.size() < 2) continue;
        g.generators_.push_back(Permutation::transposition(degree, b[0], b[1]));
        if (b.size() > 2) {
            auto img = Permutation::identity(degree).images();
            for (std::size_t i = 0; i < b.size(); ++i)
                img[static_cast<std::size_t>(b[i])] = b[(i + 1) % b.size()];
            g.generators_.push_back(Permutation(std::move(img)));
        }
    }
    if (!overflow && g.order_ <= cap && degree <= 16) {
        g.elements_ = enumerate_closure(degree, g.generators_, cap);
        for (const auto& e : g.elements_) g.keys_.insert(e.key());
    }
    return g;
}

PermGroup PermGroup::from_elements(int degree, std::vector<Permutation> elements,
                                   std::string label) {
    PermGroup g;
    g.degree_ = degree;
    g.label_ = std::move(label);
    std::sort(elements.begin(), elements.end(),
              [](const Permutation& a, const Permutation& b) { return a.key() < b.key(); });
    g.elements_ = std::move(elements);
    g.order_ = g.elements_.size();
    for (const auto& e : g.elements_) g.keys_.insert(e.key());
    // Closure and inverse checks: elements come from filtering, so verify.
    // Full pairwise closure above ~2000 elements is quadratic; sample there.
    if (!g.keys_.count(Permutation::identity(degree).key()))
        throw std::logic_error("subgroup check failed: identity missing");
    const std::size_t sz = g.elements_.size();
    const std::size_t step = sz > 2000 ? sz / 64 : 1;
    for (const auto& a : g.elements_) {
        if (!g.keys_.count(a.inverse().key()))
            throw std::logic_error("subgroup check failed: inverse missing");
        for (std::size_t j = 0; j < sz; j += step)
            if (!g.keys_.count(a.compose(g.elements_[j]).key()))
                throw std::logic_error("subgroup check failed: not closed under composition");
    }
    g.generators_ = derive_generators(degree, g.elements_);
    return g;
}

const std::vector<Permutation>& PermGroup::elements() const {
    if (elements_.empty())
        throw std::runtime_error("group too large: " + label_ + " is not enumerated");
    return elements_;
}

bool PermGroup::contains(const Permutation& p) const {
    if (p.degree() != degree_) return false;
    if (!elements_.empty()) return keys_.count(p.key()) > 0;
    if (!blocks_.empty()) {
        // Block product: p must fix the partition blockwise.
        std::vector<int> block_of(static_cast<std::size_t>(degree_), -1);
        for (std::size_t b = 0; b < blocks_.size(); ++b)
            for (int i : blocks_[b]) block_of[static_cast<std::size_t>(i)] = static_cast<int>(b);
        for (int i = 0; i < degree_; ++i)
            if (block_of[static_cast<std::size_t>(i)] != block_of[static_cast<std::size_t>(p(i))])
                return false;
        return true;
    }
    return p.is_identity();
}

bool PermGroup::is_subgroup_of(const PermGroup& other) const {
    for (const auto& e : elements())
        if (!other.contains(e)) return false;
    return true;
}

nlohmann::json PermGroup::summary() const {
    nlohmann::json gens = nlohmann::json::array();
    for (const auto& g : generators_) gens.push_back(g.images());
    return {{"order", order_}, {"degree", degree_}, {"label", label_}, {"generators", gens}};
}

PermGroup make_group(GroupKind kind, int n, std::uint64_t cap) {
    if (n < 1) throw std::invalid_argument("make_group: n must be >= 1");
    switch (kind) {
        case GroupKind::symmetric: {
            if (factorial_u64(n) > cap || n > 16)
                throw std::invalid_argument("group too large: |S_n| exceeds enumeration cap");
            std::vector<Permutation> gens;
            if (n >= 2) gens.push_back(Permutation::transposition(n, 0, 1));
            if (n >= 3) gens.push_back(Permutation::cycle(n));
            return PermGroup::from_generators(n, std::move(gens), "S" + std::to_string(n), cap);
        }
        case GroupKind::cyclic: {
            if (static_cast<std::uint64_t>(n) > cap)
                throw std::invalid_argument("group too large: |Z_n| exceeds enumeration cap");
            std::vector<Permutation> gens;
            if (n >= 2) gens.push_back(Permutation::cycle(n));
            return PermGroup::from_generators(n, std::move(gens), "Z" + std::to_string(n), cap);
        }
        case GroupKind::wreath_s2: {
            const std::uint64_t fn = factorial_u64(n);
            if (n > 8 || 2 * fn * fn > cap)
                throw std::invalid_argument("group too large: |S_n wr S_2| exceeds enumeration cap");
            const int d = 2 * n;
            std::vector<Permutation> gens;
            if (n >= 2) {
                gens.push_back(Permutation::transposition(d, 0, 1));
                gens.push_back(Permutation::transposition(d, n, n + 1));
            }
            if (n >= 3) {
                auto img1 = Permutation::identity(d).images();
                auto img2 = img1;
                for (int i = 0; i < n; ++i) {
                    img1[static_cast<std::size_t>(i)] = (i + 1) % n;
                    img2[static_cast<std::size_t>(n + i)] = n + (i + 1) % n;
                }
                gens.push_back(Permutation(std::move(img1)));
                gens.push_back(Permutation(std::move(img2)));
            }
            std::vector<int> swap_img(static_cast<std::size_t>(d));
            for (int i = 0; i < n; ++i) {
                swap_img[static_cast<std::size_t>(i)] = n + i;
                swap_img[static_cast<std::size_t>(n + i)] = i;
            }
            gens.push_back(Permutation(std::move(swap_img)));
            return PermGroup::from_generators(d, std::move(gens),
                                              "S" + std::to_string(n) + "wrS2", cap);
        }
    }
    throw std::logic_error("make_group: unknown kind");
}

PermGroup isotropy_subgroup(const PermGroup& group, const std::vector<double>& v, double tol) {
    if (tol < 0) throw std::invalid_argument("isotropy_subgroup: tol must be >= 0");
    if (static_cast<int>(v.size()) != group.degree())
        throw std::invalid_argument("isotropy_subgroup: vector length != group degree");
    std::vector<Permutation> fixed;
    for (const auto& g : group.elements()) {
        bool ok = true;
        for (int k = 0; k < group.degree() && ok; ++k)
            ok = std::abs(v[static_cast<std::size_t>(g(k))] - v[static_cast<std::size_t>(k)]) <= tol;
        if (ok) fixed.push_back(g);
    }
    return PermGroup::from_elements(group.degree(), std::move(fixed),
                                    "stab_" + group.label());
}

PermGroup theta_set(const std::vector<double>& v, double tol, std::uint64_t cap) {
    const int n = static_cast<int>(v.size());
    // Cluster sorted values, breaking at gaps > tol. Tolerance equality is not
    // transitive; gap clustering gives a well-defined partition.
    std::vector<int> idx(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
    std::sort(idx.begin(), idx.end(), [&](int a, int b) {
        return v[static_cast<std::size_t>(a)] < v[static_cast<std::size_t>(b)];
    });
    std::vector<std::vector<int>> blocks;
    for (int r = 0; r < n; ++r) {
        const int i = idx[static_cast<std::size_t>(r)];
        if (r == 0 || v[static_cast<std::size_t>(i)] -
                              v[static_cast<std::size_t>(idx[static_cast<std::size_t>(r - 1)])] >
                          tol)
            blocks.emplace_back();
        blocks.back().push_back(i);
    }
    return PermGroup::block_product(n, blocks, "Theta", cap);
}

SetwiseEstimate setwise_symmetry_estimate(const PermGroup& group,
                                          const std::vector<std::vector<double>>& samples,
                                          double tol, std::size_t cap_points) {
    if (samples.empty())
        throw std::invalid_argument("setwise_symmetry_estimate: empty sample cloud");
    const int n = group.degree();
    // Deterministic subsample by stride.
    std::vector<const std::vector<double>*> pts;
    const std::size_t stride = std::max<std::size_t>(1, samples.size() / cap_points);
    for (std::size_t i = 0; i < samples.size(); i += stride) {
        if (static_cast<int>(samples[i].size()) != n)
            throw std::invalid_argument("setwise_symmetry_estimate: point dimension != degree");
        pts.push_back(&samples[i]);
    }
    const std::size_t m = pts.size();
    const double band_hi = 10.0 * tol;

    // One-sided Hausdorff with early exits; distances are exact up to the
    // point where they exceed the ambiguity band, after which only the class
    // (">10 tol") matters.
    auto one_sided = [&](const std::vector<std::vector<double>>& from,
                         const std::vector<std::vector<double>>& to) {
        double worst = 0.0;
        for (std::size_t a = 0; a < m; ++a) {
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t b = 0; b < m; ++b) {
                double d = 0.0;
                for (int k = 0; k < n; ++k)
                    d = std::max(d, circle_dist(from[a][static_cast<std::size_t>(k)],
                                                to[b][static_cast<std::size_t>(k)]));
                best = std::min(best, d);
                if (best <= worst) break;  // cannot raise the max
            }
            worst = std::max(worst, best);
            if (worst > band_hi) return worst;  // clearly not a symmetry
        }
        return worst;
    };

    std::vector<std::vector<double>> cloud(m);
    for (std::size_t i = 0; i < m; ++i) cloud[i] = *pts[i];

    std::vector<Permutation> members;
    SetwiseEstimate out{PermGroup::from_elements(n, {Permutation::identity(n)}, "Sigma_est"), {}, {}};
    std::vector<std::vector<double>> image(m);
    for (const auto& g : group.elements()) {
        for (std::size_t i = 0; i < m; ++i) image[i] = g.apply(cloud[i]);
        double d = one_sided(image, cloud);
        if (d <= band_hi) d = std::max(d, one_sided(cloud, image));
        out.distances.push_back(d);
        if (d <= tol)
            members.push_back(g);
        else if (d <= band_hi)
            out.ambiguous.push_back(g);
    }
    out.group = PermGroup::from_elements(n, std::move(members), "Sigma_est");
    return out;
}

}  // namespace symosc

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include <json.hpp>

namespace symosc {

/// A permutation of {0..N-1}, stored as the image array: i -> images[i].
class Permutation {
public:
    explicit Permutation(std::vector<int> images);
    static Permutation identity(int degree);
    static Permutation transposition(int degree, int i, int j);
    static Permutation cycle(int degree);  // i -> i+1 mod degree

    int degree() const { return static_cast<int>(img_.size()); }
    int operator()(int i) const { return img_[static_cast<std::size_t>(i)]; }
    const std::vector<int>& images() const { return img_; }

    /// Composition acting left-to-right on points: (a.compose(b))(i) = a(b(i)).
    Permutation compose(const Permutation& other) const;
    Permutation inverse() const;
    bool is_identity() const;

    /// Left action on coordinate vectors: (g.apply(v))[g(i)] = v[i].
    std::vector<double> apply(const std::vector<double>& v) const;

    /// Packed key for hashing; requires degree <= 16.
    std::uint64_t key() const;

    bool operator==(const Permutation& other) const { return img_ == other.img_; }

private:
    std::vector<int> img_;
};

enum class GroupKind { symmetric, cyclic, wreath_s2 };

/// A finite permutation group given by generators, with the element list
/// enumerated whenever the order fits under the cap. Groups produced by the
/// value-class construction (theta_set) may instead carry a block partition
/// that answers membership without enumeration.
class PermGroup {
public:
    static constexpr std::uint64_t kDefaultCap = 1'000'000;

    static PermGroup from_generators(int degree, std::vector<Permutation> gens,
                                     std::string label,
                                     std::uint64_t cap = kDefaultCap);

    /// Product of full symmetric groups on the given index blocks (blocks of
    /// size 1 may be omitted). Enumerates only if the order fits the cap.
    static PermGroup block_product(int degree, const std::vector<std::vector<int>>& blocks,
                                   std::string label, std::uint64_t cap = kDefaultCap);

    /// Subgroup wrapper around an explicit element list (assumed closed;
    /// verified). Generators are re-derived greedily.
    static PermGroup from_elements(int degree, std::vector<Permutation> elements,
                                   std::string label);

    int degree() const { return degree_; }
    std::uint64_t order() const { return order_; }
    const std::string& label() const { return label_; }
    const std::vector<Permutation>& generators() const { return generators_; }

    bool enumerated() const { return !elements_.empty() || order_ == 1; }
    /// Full element list; throws std::runtime_error("group too large") if the
    /// order exceeded the enumeration cap at construction.
    const std::vector<Permutation>& elements() const;

    bool contains(const Permutation& p) const;
    bool is_subgroup_of(const PermGroup& other) const;
    bool is_trivial() const { return order_ == 1; }

    /// {order, degree, label, generators} summary.
    nlohmann::json summary() const;

private:
    PermGroup() = default;

    int degree_ = 0;
    std::uint64_t order_ = 1;
    std::string label_;
    std::vector<Permutation> generators_;
    std::vector<Permutation> elements_;           // empty if not enumerated
    std::unordered_set<std::uint64_t> keys_;      // membership index
    std::vector<std::vector<int>> blocks_;        // set for block products
};

/// S_n, Z_n (degree n) or S_n wr S_2 (degree 2n). Throws std::invalid_argument
/// ("group too large") if the order exceeds the cap.
PermGroup make_group(GroupKind kind, int n, std::uint64_t cap = PermGroup::kDefaultCap);

/// { g in G : max_k |v[g(k)] - v[k]| <= tol }, closure-checked.
PermGroup isotropy_subgroup(const PermGroup& group, const std::vector<double>& v, double tol);

/// { g in S_N : g.v = v within tol }, built from the partition of indices into
/// equal-value classes (sorted values clustered at gaps > tol), not by
/// enumerating S_N.
PermGroup theta_set(const std::vector<double>& v, double tol,
                    std::uint64_t cap = PermGroup::kDefaultCap);

struct SetwiseEstimate {
    PermGroup group;
    /// Elements whose Hausdorff distance landed in the ambiguous band
    /// (tol, 10*tol); empty when the dichotomy is clean.
    std::vector<Permutation> ambiguous;
    std::vector<double> distances;  // per group element, in element order
};

/// Estimate of the setwise symmetries of a sampled invariant set: elements g
/// with Hausdorff distance(g.samples, samples) <= tol under the per-coordinate
/// circle metric. Points beyond `cap_points` are subsampled deterministically.
SetwiseEstimate setwise_symmetry_estimate(const PermGroup& group,
                                          const std::vector<std::vector<double>>& samples,
                                          double tol, std::size_t cap_points = 5000);

}  // namespace symosc

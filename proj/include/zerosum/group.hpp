#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "zerosum/errors.hpp"

namespace zerosum {

/// Search and table-building limits. Exceeding one is an explicit
/// CapExceeded error, never a silent truncation.
struct Caps {
    std::size_t arithmetic_max_order = 256;
    std::size_t automorphism_max_order = 64;
    std::size_t enumeration_max_order = 36;
    std::size_t davenport_max_order = 64;
};

/// The integer in [0, m) congruent to k.
inline std::int64_t reduce_mod(std::int64_t k, std::int64_t m) {
    const std::int64_t r = k % m;
    return r < 0 ? r + m : r;
}

struct GroupElement {
    std::vector<std::int64_t> residues;

    auto operator<=>(const GroupElement&) const = default;
    bool operator==(const GroupElement&) const = default;

    bool is_zero() const {
        return std::all_of(residues.begin(), residues.end(), [](std::int64_t r) { return r == 0; });
    }

    std::string to_string() const {
        std::string out = "[";
        for (std::size_t i = 0; i < residues.size(); ++i) {
            if (i) out += ',';
            out += std::to_string(residues[i]);
        }
        out += ']';
        return out;
    }
};

/// A finite abelian group C_{n1} + ... + C_{nr} in invariant-factor form.
class GroupSpec {
public:
    /// The trivial group.
    GroupSpec() = default;

    static GroupSpec make(std::vector<std::int64_t> factors) {
        for (auto f : factors) {
            if (f < 2) throw Error(ErrorCode::BadFactor, "invariant factor " + std::to_string(f) + " < 2");
        }
        for (std::size_t i = 1; i < factors.size(); ++i) {
            if (factors[i] % factors[i - 1] != 0) {
                throw Error(ErrorCode::ChainViolation, std::to_string(factors[i - 1]) + " does not divide " +
                                                           std::to_string(factors[i]));
            }
        }
        GroupSpec g;
        g.factors_ = std::move(factors);
        for (auto f : g.factors_) g.order_ *= f;
        return g;
    }

    /// C_m + C_{mn}.
    static GroupSpec rank_two(std::int64_t m, std::int64_t n) {
        if (m < 2 || n < 1) throw Error(ErrorCode::BadParams, "rank-two group needs m >= 2 and n >= 1");
        return make({m, m * n});
    }

    /// Parses "2,4"; the empty string is the trivial group.
    static GroupSpec parse(std::string_view text) {
        std::vector<std::int64_t> factors;
        if (text.empty()) return make(factors);
        std::size_t pos = 0;
        while (pos <= text.size()) {
            const auto comma = text.find(',', pos);
            const auto token = text.substr(pos, comma == std::string_view::npos ? text.npos : comma - pos);
            if (token.empty() || token.find_first_not_of("0123456789") != std::string_view::npos || token.size() > 12) {
                throw Error(ErrorCode::SyntaxError, "bad group factor '" + std::string(token) + "'");
            }
            factors.push_back(std::stoll(std::string(token)));
            if (comma == std::string_view::npos) break;
            pos = comma + 1;
        }
        return make(std::move(factors));
    }

    const std::vector<std::int64_t>& invariant_factors() const { return factors_; }
    std::size_t rank() const { return factors_.size(); }
    std::int64_t order() const { return order_; }
    std::int64_t exponent() const { return factors_.empty() ? 1 : factors_.back(); }

    /// (m, n) with G = C_m + C_{mn}, when the rank is two.
    std::optional<std::pair<std::int64_t, std::int64_t>> rank_two_params() const {
        if (rank() != 2) return std::nullopt;
        return std::pair{factors_[0], factors_[1] / factors_[0]};
    }

    GroupElement zero() const { return GroupElement{std::vector<std::int64_t>(rank(), 0)}; }

    /// Reduces arbitrary integers into canonical residues.
    GroupElement element(std::vector<std::int64_t> raw) const {
        if (raw.size() != rank()) {
            throw Error(ErrorCode::DimensionMismatch,
                        "element has " + std::to_string(raw.size()) + " coordinates, group rank is " +
                            std::to_string(rank()));
        }
        for (std::size_t i = 0; i < raw.size(); ++i) raw[i] = reduce_mod(raw[i], factors_[i]);
        return GroupElement{std::move(raw)};
    }

    bool contains(const GroupElement& g) const {
        if (g.residues.size() != rank()) return false;
        for (std::size_t i = 0; i < rank(); ++i) {
            if (g.residues[i] < 0 || g.residues[i] >= factors_[i]) return false;
        }
        return true;
    }

    void check(const GroupElement& g) const {
        if (g.residues.size() != rank()) {
            throw Error(ErrorCode::DimensionMismatch, "element " + g.to_string() + " has wrong rank for group " +
                                                          to_string());
        }
        if (!contains(g)) throw Error(ErrorCode::DimensionMismatch, "element " + g.to_string() + " not reduced");
    }

    /// Mixed-radix index, first coordinate most significant, so index order
    /// equals lexicographic residue order.
    std::size_t index_of(const GroupElement& g) const {
        std::size_t idx = 0;
        for (std::size_t i = 0; i < rank(); ++i) {
            idx = idx * static_cast<std::size_t>(factors_[i]) + static_cast<std::size_t>(g.residues[i]);
        }
        return idx;
    }

    GroupElement element_at(std::size_t idx) const {
        GroupElement g{std::vector<std::int64_t>(rank(), 0)};
        for (std::size_t i = rank(); i-- > 0;) {
            const auto f = static_cast<std::size_t>(factors_[i]);
            g.residues[i] = static_cast<std::int64_t>(idx % f);
            idx /= f;
        }
        return g;
    }

    std::vector<GroupElement> elements() const {
        std::vector<GroupElement> out;
        out.reserve(static_cast<std::size_t>(order_));
        for (std::size_t i = 0; i < static_cast<std::size_t>(order_); ++i) out.push_back(element_at(i));
        return out;
    }

    std::string to_string() const {
        std::string out;
        for (std::size_t i = 0; i < factors_.size(); ++i) {
            if (i) out += ',';
            out += std::to_string(factors_[i]);
        }
        return out;
    }

    bool operator==(const GroupSpec&) const = default;

private:
    std::vector<std::int64_t> factors_;
    std::int64_t order_ = 1;
};

inline GroupSpec make_group(std::vector<std::int64_t> invariant_factors) {
    return GroupSpec::make(std::move(invariant_factors));
}

inline GroupElement add(const GroupSpec& G, const GroupElement& g, const GroupElement& h) {
    G.check(g);
    G.check(h);
    GroupElement out = g;
    const auto& f = G.invariant_factors();
    for (std::size_t i = 0; i < G.rank(); ++i) out.residues[i] = (g.residues[i] + h.residues[i]) % f[i];
    return out;
}

inline GroupElement scale(const GroupSpec& G, std::int64_t k, const GroupElement& g) {
    G.check(g);
    GroupElement out = g;
    const auto& f = G.invariant_factors();
    for (std::size_t i = 0; i < G.rank(); ++i) {
        out.residues[i] = reduce_mod(reduce_mod(k, f[i]) * g.residues[i], f[i]);
    }
    return out;
}

inline GroupElement negate(const GroupSpec& G, const GroupElement& g) { return scale(G, -1, g); }

inline std::int64_t order(const GroupSpec& G, const GroupElement& g) {
    G.check(g);
    std::int64_t result = 1;
    const auto& f = G.invariant_factors();
    for (std::size_t i = 0; i < G.rank(); ++i) {
        result = std::lcm(result, f[i] / std::gcd(f[i], g.residues[i]));
    }
    return result;
}

namespace detail {

/// Calls visit(coeffs) for every coefficient vector in the box prod [0, bounds[i]).
template <typename Visit>
bool for_each_in_box(std::span<const std::int64_t> bounds, Visit&& visit) {
    std::vector<std::int64_t> coeffs(bounds.size(), 0);
    for (auto b : bounds) {
        if (b <= 0) return true;
    }
    while (true) {
        if (!visit(std::as_const(coeffs))) return false;
        std::size_t i = 0;
        for (; i < coeffs.size(); ++i) {
            if (++coeffs[i] < bounds[i]) break;
            coeffs[i] = 0;
        }
        if (i == coeffs.size()) return true;
    }
}

inline GroupElement combination(const GroupSpec& G, std::span<const GroupElement> elems,
                                std::span<const std::int64_t> coeffs) {
    GroupElement acc = G.zero();
    const auto& f = G.invariant_factors();
    for (std::size_t k = 0; k < elems.size(); ++k) {
        for (std::size_t i = 0; i < G.rank(); ++i) {
            acc.residues[i] = reduce_mod(acc.residues[i] + coeffs[k] * elems[k].residues[i], f[i]);
        }
    }
    return acc;
}

} // namespace detail

/// Exhaustive over the box prod [0, ord g_i): inside the box m_i g_i = 0
/// forces m_i = 0, so independence means the all-zero vector is the only
/// vanishing combination.
inline bool is_independent(const GroupSpec& G, std::span<const GroupElement> elems) {
    std::vector<std::int64_t> bounds;
    for (const auto& g : elems) {
        G.check(g);
        if (g.is_zero()) throw Error(ErrorCode::ZeroElement, "independence is defined for nonzero elements");
        bounds.push_back(order(G, g));
    }
    return detail::for_each_in_box(bounds, [&](const std::vector<std::int64_t>& c) {
        const bool trivial = std::all_of(c.begin(), c.end(), [](std::int64_t v) { return v == 0; });
        return trivial || !detail::combination(G, elems, c).is_zero();
    });
}

inline bool is_basis(const GroupSpec& G, std::span<const GroupElement> elems) {
    if (!is_independent(G, elems)) return false;
    std::int64_t prod = 1;
    for (const auto& g : elems) prod *= order(G, g);
    return prod == G.order();
}

inline bool is_basis(const GroupSpec& G, std::initializer_list<GroupElement> elems) {
    return is_basis(G, std::span<const GroupElement>(elems.begin(), elems.size()));
}

inline bool is_independent(const GroupSpec& G, std::initializer_list<GroupElement> elems) {
    return is_independent(G, std::span<const GroupElement>(elems.begin(), elems.size()));
}

/// Sorted list of the elements of <elems>.
inline std::vector<GroupElement> subgroup_generated(const GroupSpec& G, std::span<const GroupElement> elems) {
    std::vector<GroupElement> members{G.zero()};
    std::vector<bool> seen(static_cast<std::size_t>(G.order()), false);
    seen[G.index_of(G.zero())] = true;
    for (std::size_t head = 0; head < members.size(); ++head) {
        for (const auto& g : elems) {
            auto next = add(G, members[head], g);
            const auto idx = G.index_of(next);
            if (!seen[idx]) {
                seen[idx] = true;
                members.push_back(std::move(next));
            }
        }
    }
    std::sort(members.begin(), members.end());
    return members;
}

inline std::vector<GroupElement> subgroup_generated(const GroupSpec& G, std::initializer_list<GroupElement> elems) {
    return subgroup_generated(G, std::span<const GroupElement>(elems.begin(), elems.size()));
}

inline bool generates(const GroupSpec& G, std::span<const GroupElement> elems) {
    return static_cast<std::int64_t>(subgroup_generated(G, elems).size()) == G.order();
}

/// A group homomorphism given by the images of the standard generators.
class Homomorphism {
public:
    static Homomorphism make(GroupSpec source, GroupSpec target, std::vector<GroupElement> images) {
        if (images.size() != source.rank()) {
            throw Error(ErrorCode::DimensionMismatch, "need one image per standard generator of the source");
        }
        for (std::size_t i = 0; i < images.size(); ++i) {
            target.check(images[i]);
            if (!scale(target, source.invariant_factors()[i], images[i]).is_zero()) {
                throw Error(ErrorCode::BadParams, "image " + images[i].to_string() + " of generator " +
                                                      std::to_string(i + 1) + " is not killed by its order");
            }
        }
        Homomorphism f;
        f.source_ = std::move(source);
        f.target_ = std::move(target);
        f.images_ = std::move(images);
        return f;
    }

    const GroupSpec& source() const { return source_; }
    const GroupSpec& target() const { return target_; }
    const std::vector<GroupElement>& images() const { return images_; }

    GroupElement operator()(const GroupElement& g) const {
        source_.check(g);
        std::vector<std::int64_t> coeffs(g.residues.begin(), g.residues.end());
        return detail::combination(target_, images_, coeffs);
    }

    /// (*this) after inner.
    Homomorphism after(const Homomorphism& inner) const {
        if (!(inner.target_ == source_)) throw Error(ErrorCode::GroupMismatch, "cannot compose homomorphisms");
        std::vector<GroupElement> imgs;
        for (const auto& img : inner.images_) imgs.push_back((*this)(img));
        return make(inner.source_, target_, std::move(imgs));
    }

    bool operator==(const Homomorphism& o) const {
        return source_ == o.source_ && target_ == o.target_ && images_ == o.images_;
    }
    bool operator<(const Homomorphism& o) const { return images_ < o.images_; }

private:
    GroupSpec source_;
    GroupSpec target_;
    std::vector<GroupElement> images_;
};

/// The quotient map C_m + C_{mn} -> C_m + C_m with kernel {m g} = <(0, m)>.
inline Homomorphism inductive_quotient(std::int64_t m, std::int64_t n) {
    if (m < 2 || n < 1) throw Error(ErrorCode::BadParams, "inductive quotient needs m >= 2, n >= 1");
    const auto source = GroupSpec::rank_two(m, n);
    const auto target = GroupSpec::rank_two(m, 1);
    return Homomorphism::make(source, target, {GroupElement{{1, 0}}, GroupElement{{0, 1}}});
}

/// Projection of G onto <basis[axis-1]> along the remaining basis elements.
inline Homomorphism projection(const GroupSpec& G, std::span<const GroupElement> basis, std::size_t axis) {
    bool ok = false;
    try {
        ok = !basis.empty() && is_basis(G, basis);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::ZeroElement) throw;
    }
    if (!ok) throw Error(ErrorCode::NotABasis, "projection needs a basis of " + G.to_string());
    if (axis < 1 || axis > basis.size()) throw Error(ErrorCode::BadParams, "projection axis out of range");

    std::vector<std::int64_t> bounds;
    for (const auto& b : basis) bounds.push_back(order(G, b));
    std::vector<GroupElement> images;
    for (std::size_t i = 0; i < G.rank(); ++i) {
        GroupElement unit = G.zero();
        unit.residues[i] = 1 % G.invariant_factors()[i];
        GroupElement image;
        detail::for_each_in_box(bounds, [&](const std::vector<std::int64_t>& c) {
            if (detail::combination(G, basis, c) != unit) return true;
            image = scale(G, c[axis - 1], basis[axis - 1]);
            return false;
        });
        images.push_back(std::move(image));
    }
    return Homomorphism::make(G, G, std::move(images));
}

inline Homomorphism projection(const GroupSpec& G, std::initializer_list<GroupElement> basis, std::size_t axis) {
    return projection(G, std::span<const GroupElement>(basis.begin(), basis.size()), axis);
}

/// Dense index tables for the hot loops of search and sequence code.
class IndexedGroup {
public:
    IndexedGroup(GroupSpec group, std::size_t cap) : group_(std::move(group)) {
        if (static_cast<std::size_t>(group_.order()) > cap) {
            throw Error(ErrorCode::CapExceeded, "group of order " + std::to_string(group_.order()) +
                                                    " exceeds arithmetic cap " + std::to_string(cap));
        }
        size_ = static_cast<std::size_t>(group_.order());
        const auto elems = group_.elements();
        add_.resize(size_ * size_);
        neg_.resize(size_);
        order_.resize(size_);
        for (std::size_t a = 0; a < size_; ++a) {
            for (std::size_t b = 0; b < size_; ++b) {
                add_[a * size_ + b] = static_cast<std::uint32_t>(group_.index_of(zerosum::add(group_, elems[a], elems[b])));
            }
            neg_[a] = static_cast<std::uint32_t>(group_.index_of(negate(group_, elems[a])));
            order_[a] = order(group_, elems[a]);
        }
    }

    const GroupSpec& group() const { return group_; }
    std::size_t size() const { return size_; }
    std::size_t add(std::size_t a, std::size_t b) const { return add_[a * size_ + b]; }
    std::size_t neg(std::size_t a) const { return neg_[a]; }
    std::int64_t order_of(std::size_t a) const { return order_[a]; }

private:
    GroupSpec group_;
    std::size_t size_ = 1;
    std::vector<std::uint32_t> add_;
    std::vector<std::uint32_t> neg_;
    std::vector<std::int64_t> order_;
};

namespace detail {

constexpr std::size_t kAutomorphismCandidateLimit = 20'000'000;

inline std::vector<Homomorphism> enumerate_automorphisms(const GroupSpec& G) {
    const auto elems = G.elements();
    const auto& f = G.invariant_factors();
    std::vector<std::vector<std::size_t>> candidates(G.rank());
    double combos = 1;
    for (std::size_t i = 0; i < G.rank(); ++i) {
        for (std::size_t idx = 0; idx < elems.size(); ++idx) {
            if (order(G, elems[idx]) == f[i]) candidates[i].push_back(idx);
        }
        combos *= static_cast<double>(candidates[i].size());
    }
    if (combos > static_cast<double>(kAutomorphismCandidateLimit)) {
        throw Error(ErrorCode::CapExceeded, "too many generator-image candidates for automorphisms of " + G.to_string());
    }

    std::vector<Homomorphism> out;
    std::vector<std::int64_t> bounds;
    for (const auto& c : candidates) bounds.push_back(static_cast<std::int64_t>(c.size()));
    // Rightmost coordinate varies fastest so the output is sorted by image tuple.
    std::vector<std::int64_t> rev(bounds.rbegin(), bounds.rend());
    std::vector<GroupElement> imgs(G.rank());
    std::vector<bool> hit(elems.size());
    for_each_in_box(rev, [&](const std::vector<std::int64_t>& c) {
        for (std::size_t i = 0; i < G.rank(); ++i) imgs[i] = elems[candidates[i][static_cast<std::size_t>(c[G.rank() - 1 - i])]];
        std::fill(hit.begin(), hit.end(), false);
        for (const auto& g : elems) {
            const auto idx = G.index_of(combination(G, imgs, g.residues));
            if (hit[idx]) return true;
            hit[idx] = true;
        }
        out.push_back(Homomorphism::make(G, G, imgs));
        return true;
    });
    return out;
}

inline std::shared_mutex& automorphism_cache_mutex() {
    static std::shared_mutex mu;
    return mu;
}

inline std::map<std::vector<std::int64_t>, std::shared_ptr<const std::vector<Homomorphism>>>& automorphism_cache() {
    static std::map<std::vector<std::int64_t>, std::shared_ptr<const std::vector<Homomorphism>>> cache;
    return cache;
}

} // namespace detail

/// All automorphisms of G, sorted by generator-image tuple. Cached per group;
/// concurrent callers may compute the same list, the first insert wins.
inline std::shared_ptr<const std::vector<Homomorphism>> automorphisms(const GroupSpec& G, const Caps& caps = {}) {
    if (static_cast<std::size_t>(G.order()) > caps.automorphism_max_order) {
        throw Error(ErrorCode::CapExceeded, "automorphism enumeration capped at order " +
                                                std::to_string(caps.automorphism_max_order));
    }
    {
        std::shared_lock lock(detail::automorphism_cache_mutex());
        auto it = detail::automorphism_cache().find(G.invariant_factors());
        if (it != detail::automorphism_cache().end()) return it->second;
    }
    auto computed = std::make_shared<const std::vector<Homomorphism>>(detail::enumerate_automorphisms(G));
    std::unique_lock lock(detail::automorphism_cache_mutex());
    auto [it, inserted] = detail::automorphism_cache().emplace(G.invariant_factors(), computed);
    return it->second;
}

/// Automorphisms as permutations of element indices.
inline std::vector<std::vector<std::uint32_t>> automorphism_permutations(const GroupSpec& G, const Caps& caps = {}) {
    const auto auts = automorphisms(G, caps);
    const auto elems = G.elements();
    std::vector<std::vector<std::uint32_t>> perms;
    perms.reserve(auts->size());
    for (const auto& a : *auts) {
        std::vector<std::uint32_t> p(elems.size());
        for (std::size_t i = 0; i < elems.size(); ++i) p[i] = static_cast<std::uint32_t>(G.index_of(a(elems[i])));
        perms.push_back(std::move(p));
    }
    return perms;
}

} // namespace zerosum

#pragma once

#include <algorithm>
#include <charconv>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "zerosum/errors.hpp"
#include "zerosum/group.hpp"

namespace zerosum {

struct Term {
    GroupElement element;
    std::size_t multiplicity = 0;

    bool operator==(const Term&) const = default;
};

/// A finite multiset over G, stored as sorted unique (element, multiplicity)
/// pairs. The sorted form is the single canonical encoding.
class Sequence {
public:
    Sequence() = default;
    explicit Sequence(GroupSpec group) : group_(std::move(group)) {}

    static Sequence from_elements(const GroupSpec& G, std::span<const GroupElement> elems) {
        std::map<GroupElement, std::size_t> counts;
        for (const auto& g : elems) {
            G.check(g);
            ++counts[g];
        }
        Sequence s(G);
        for (auto& [g, k] : counts) s.terms_.push_back(Term{g, k});
        return s;
    }

    static Sequence from_elements(const GroupSpec& G, std::initializer_list<GroupElement> elems) {
        return from_elements(G, std::span<const GroupElement>(elems.begin(), elems.size()));
    }

    /// Indices in any order, as produced by IndexedGroup arithmetic.
    static Sequence from_indices(const GroupSpec& G, std::span<const std::size_t> indices) {
        std::vector<std::size_t> sorted(indices.begin(), indices.end());
        std::sort(sorted.begin(), sorted.end());
        Sequence s(G);
        for (std::size_t i = 0; i < sorted.size();) {
            std::size_t j = i;
            while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
            s.terms_.push_back(Term{G.element_at(sorted[i]), j - i});
            i = j;
        }
        return s;
    }

    const GroupSpec& group() const { return group_; }
    const std::vector<Term>& terms() const { return terms_; }
    bool empty() const { return terms_.empty(); }

    std::size_t length() const {
        std::size_t n = 0;
        for (const auto& t : terms_) n += t.multiplicity;
        return n;
    }

    std::size_t multiplicity(const GroupElement& g) const {
        auto it = std::lower_bound(terms_.begin(), terms_.end(), g,
                                   [](const Term& t, const GroupElement& x) { return t.element < x; });
        return (it != terms_.end() && it->element == g) ? it->multiplicity : 0;
    }

    std::vector<GroupElement> support() const {
        std::vector<GroupElement> out;
        for (const auto& t : terms_) out.push_back(t.element);
        return out;
    }

    /// Terms with repetition, in canonical order.
    std::vector<GroupElement> expanded() const {
        std::vector<GroupElement> out;
        for (const auto& t : terms_) out.insert(out.end(), t.multiplicity, t.element);
        return out;
    }

    std::vector<std::size_t> indices() const {
        std::vector<std::size_t> out;
        for (const auto& t : terms_) out.insert(out.end(), t.multiplicity, group_.index_of(t.element));
        return out;
    }

    /// Product in the free monoid (multiset union).
    Sequence operator*(const Sequence& other) const {
        require_same_group(other);
        auto idx = indices();
        const auto more = other.indices();
        idx.insert(idx.end(), more.begin(), more.end());
        return from_indices(group_, idx);
    }

    bool divides(const Sequence& other) const {
        if (!(group_ == other.group_)) return false;
        return std::all_of(terms_.begin(), terms_.end(),
                           [&](const Term& t) { return other.multiplicity(t.element) >= t.multiplicity; });
    }

    /// The co-divisor T^{-1} S of a subsequence T of *this.
    Sequence without(const Sequence& sub) const {
        require_same_group(sub);
        if (!sub.divides(*this)) throw Error(ErrorCode::BadParams, sub.to_string() + " does not divide " + to_string());
        Sequence out(group_);
        for (const auto& t : terms_) {
            const auto k = t.multiplicity - sub.multiplicity(t.element);
            if (k) out.terms_.push_back(Term{t.element, k});
        }
        return out;
    }

    std::string to_string() const {
        std::string out;
        for (const auto& t : terms_) {
            if (!out.empty()) out += ' ';
            out += t.element.to_string();
            if (t.multiplicity != 1) out += '^' + std::to_string(t.multiplicity);
        }
        return out;
    }

    bool operator==(const Sequence& o) const { return group_ == o.group_ && terms_ == o.terms_; }

    /// Lexicographic on the expanded term lists.
    bool operator<(const Sequence& o) const { return expanded() < o.expanded(); }

private:
    void require_same_group(const Sequence& other) const {
        if (!(group_ == other.group_)) throw Error(ErrorCode::GroupMismatch, "sequences over different groups");
    }

    GroupSpec group_;
    std::vector<Term> terms_;
};

inline std::string format_sequence(const Sequence& S) { return S.to_string(); }

namespace detail {

inline std::int64_t parse_int(std::string_view tok, std::string_view context) {
    std::int64_t v = 0;
    const auto* first = tok.data();
    const auto* last = tok.data() + tok.size();
    if (!tok.empty() && tok.front() == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (tok.empty() || ec != std::errc() || ptr != last) {
        throw Error(ErrorCode::SyntaxError, "bad integer '" + std::string(tok) + "' in " + std::string(context));
    }
    return v;
}

} // namespace detail

/// Parses `[r1,...,rr]` with residues reduced into range.
inline GroupElement parse_element(const GroupSpec& G, std::string_view text) {
    if (text.size() < 2 || text.front() != '[' || text.back() != ']') {
        throw Error(ErrorCode::SyntaxError, "element must look like [r1,...,rr]: '" + std::string(text) + "'");
    }
    const auto body = text.substr(1, text.size() - 2);
    std::vector<std::int64_t> raw;
    if (!body.empty()) {
        std::size_t pos = 0;
        while (true) {
            const auto comma = body.find(',', pos);
            raw.push_back(detail::parse_int(body.substr(pos, comma == body.npos ? body.npos : comma - pos), text));
            if (comma == body.npos) break;
            pos = comma + 1;
        }
    }
    return G.element(std::move(raw));
}

/// Grammar: terms separated by whitespace, term = `[r1,...,rr]` or `[r1,...,rr]^k` with k >= 1.
inline Sequence parse_sequence(const GroupSpec& G, std::string_view text) {
    std::vector<GroupElement> elems;
    std::size_t pos = 0;
    while (pos < text.size()) {
        if (text[pos] == ' ' || text[pos] == '\t' || text[pos] == '\n' || text[pos] == '\r') {
            ++pos;
            continue;
        }
        auto end = text.find_first_of(" \t\r\n", pos);
        if (end == text.npos) end = text.size();
        const auto token = text.substr(pos, end - pos);
        pos = end;

        const auto close = token.find(']');
        if (close == token.npos) throw Error(ErrorCode::SyntaxError, "unterminated term '" + std::string(token) + "'");
        const auto g = parse_element(G, token.substr(0, close + 1));
        std::int64_t k = 1;
        const auto rest = token.substr(close + 1);
        if (!rest.empty()) {
            if (rest.front() != '^') throw Error(ErrorCode::SyntaxError, "unexpected '" + std::string(rest) + "'");
            k = detail::parse_int(rest.substr(1), token);
            if (k < 1) throw Error(ErrorCode::SyntaxError, "multiplicity must be >= 1 in '" + std::string(token) + "'");
        }
        elems.insert(elems.end(), static_cast<std::size_t>(k), g);
    }
    return Sequence::from_elements(G, elems);
}

inline GroupElement sigma(const Sequence& S) {
    const auto& G = S.group();
    GroupElement acc = G.zero();
    for (const auto& t : S.terms()) {
        acc = add(G, acc, scale(G, static_cast<std::int64_t>(t.multiplicity), t.element));
    }
    return acc;
}

inline Sequence apply_hom(const Homomorphism& f, const Sequence& S) {
    if (!(S.group() == f.source())) {
        throw Error(ErrorCode::GroupMismatch, "sequence over " + S.group().to_string() + ", map from " +
                                                  f.source().to_string());
    }
    std::vector<GroupElement> images;
    for (const auto& t : S.terms()) images.insert(images.end(), t.multiplicity, f(t.element));
    return Sequence::from_elements(f.target(), images);
}

/// Reachable sums of nonempty subsequences.
struct SumSet {
    GroupSpec group;
    std::vector<bool> reachable;

    bool contains(const GroupElement& g) const { return reachable[group.index_of(g)]; }

    std::size_t count() const { return static_cast<std::size_t>(std::count(reachable.begin(), reachable.end(), true)); }

    std::vector<GroupElement> elements() const {
        std::vector<GroupElement> out;
        for (std::size_t i = 0; i < reachable.size(); ++i) {
            if (reachable[i]) out.push_back(group.element_at(i));
        }
        return out;
    }
};

namespace detail {

/// R <- R u {g} u (R + g), one term copy at a time.
inline void extend_reachable(const IndexedGroup& T, std::vector<bool>& R, std::size_t g) {
    std::vector<bool> next = R;
    next[g] = true;
    for (std::size_t r = 0; r < R.size(); ++r) {
        if (R[r]) next[T.add(r, g)] = true;
    }
    R.swap(next);
}

inline std::vector<bool> reachable_from_indices(const IndexedGroup& T, std::span<const std::size_t> idx) {
    std::vector<bool> R(T.size(), false);
    for (auto g : idx) extend_reachable(T, R, g);
    return R;
}

} // namespace detail

inline SumSet reachable_subsums(const Sequence& S, const Caps& caps = {}) {
    const IndexedGroup T(S.group(), caps.arithmetic_max_order);
    return SumSet{S.group(), detail::reachable_from_indices(T, S.indices())};
}

inline bool is_zero_sum_free(const Sequence& S, const Caps& caps = {}) {
    const auto R = reachable_subsums(S, caps);
    return !R.reachable[0];
}

/// Nonempty, sums to zero, and no proper nonempty zero-sum subsequence.
/// Removing one copy of the least term suffices: a proper zero-sum
/// subsequence either avoids that copy, or its complement does and is
/// itself a proper zero-sum subsequence.
inline bool is_mzss(const Sequence& S, const Caps& caps = {}) {
    if (S.empty() || !sigma(S).is_zero()) return false;
    const IndexedGroup T(S.group(), caps.arithmetic_max_order);
    const auto idx = S.indices();
    const auto rest = std::span<const std::size_t>(idx).subspan(1);
    return !detail::reachable_from_indices(T, rest)[0];
}

namespace detail {

/// Enumerates the sub-multisets of length `len` of the sorted position list
/// whose weights sum to zero in H, in lexicographic order of positions'
/// values. `values[i]` orders positions (sorted ascending); `weights[i]` is
/// the H-index used for the sum. Visitor gets chosen positions, returns
/// false to stop. Returns false if stopped early.
class FixedLengthZeroSums {
public:
    FixedLengthZeroSums(const IndexedGroup& H, std::span<const std::size_t> values, std::span<const std::size_t> weights,
                        std::size_t len)
        : H_(H), values_(values), weights_(weights), len_(len) {
        const auto L = values.size();
        const auto size = H.size();
        feasible_.assign((L + 1) * (len + 1) * size, false);
        at(L, 0, 0) = true;
        for (std::size_t i = L; i-- > 0;) {
            for (std::size_t c = 0; c <= len; ++c) {
                for (std::size_t s = 0; s < size; ++s) {
                    bool ok = at(i + 1, c, s);
                    if (!ok && c > 0) ok = at(i + 1, c - 1, H.add(s, H.neg(weights[i])));
                    at(i, c, s) = ok;
                }
            }
        }
    }

    bool possible() const { return len_ <= values_.size() && cat(0, len_, 0); }

    template <typename Visit>
    bool for_each(Visit&& visit) const {
        if (!possible()) return true;
        std::vector<std::size_t> chosen;
        return walk(0, len_, 0, chosen, visit);
    }

private:
    template <typename Visit>
    bool walk(std::size_t from, std::size_t need, std::size_t target, std::vector<std::size_t>& chosen,
              Visit& visit) const {
        if (need == 0) return visit(std::as_const(chosen));
        for (std::size_t j = from; j < values_.size(); ++j) {
            if (j > from && values_[j] == values_[j - 1]) continue;
            const auto rest = H_.add(target, H_.neg(weights_[j]));
            if (!cat(j + 1, need - 1, rest)) continue;
            chosen.push_back(j);
            if (!walk(j + 1, need - 1, rest, chosen, visit)) return false;
            chosen.pop_back();
        }
        return true;
    }

    std::vector<bool>::reference at(std::size_t i, std::size_t c, std::size_t s) {
        return feasible_[(i * (len_ + 1) + c) * H_.size() + s];
    }
    bool cat(std::size_t i, std::size_t c, std::size_t s) const {
        return feasible_[(i * (len_ + 1) + c) * H_.size() + s];
    }

    const IndexedGroup& H_;
    std::span<const std::size_t> values_;
    std::span<const std::size_t> weights_;
    std::size_t len_;
    std::vector<bool> feasible_;
};

} // namespace detail

/// The lexicographically least T | S with |T| = len and sigma(T) = 0, if any.
inline std::optional<Sequence> extract_zero_sum_of_length(const Sequence& S, std::size_t len, const Caps& caps = {}) {
    if (len < 1) throw Error(ErrorCode::BadLength, "extraction length must be >= 1");
    const IndexedGroup T(S.group(), caps.arithmetic_max_order);
    const auto idx = S.indices();
    if (len > idx.size()) return std::nullopt;
    const detail::FixedLengthZeroSums search(T, idx, idx, len);
    std::optional<Sequence> found;
    search.for_each([&](const std::vector<std::size_t>& pos) {
        std::vector<std::size_t> picked;
        for (auto p : pos) picked.push_back(idx[p]);
        found = Sequence::from_indices(S.group(), picked);
        return false;
    });
    return found;
}

namespace detail {

class MaxFactorSolver {
public:
    explicit MaxFactorSolver(const IndexedGroup& T) : T_(T) {}

    /// counts[x] = multiplicity of element index x; sum must be zero.
    int solve(std::vector<std::uint32_t> counts) {
        auto first = std::find_if(counts.begin(), counts.end(), [](std::uint32_t c) { return c > 0; });
        if (first == counts.end()) return 0;
        if (auto it = memo_.find(counts); it != memo_.end()) return it->second;

        const auto key = counts;
        const auto x0 = static_cast<std::size_t>(first - counts.begin());
        --counts[x0];
        // Every factorization refines to one into minimal zero-sum pieces, and
        // one piece holds this copy of x0: pick that piece as x0 * R with R
        // zero-sum free and sigma(R) = -x0.
        int best = 0;
        std::vector<bool> R(T_.size(), false);
        std::vector<std::uint32_t> taken(counts.size(), 0);
        extend(counts, taken, 0, T_.neg(x0), 0, R, [&](const std::vector<std::uint32_t>& t) {
            std::vector<std::uint32_t> rest = counts;
            for (std::size_t i = 0; i < rest.size(); ++i) rest[i] -= t[i];
            best = std::max(best, 1 + solve(std::move(rest)));
        });
        memo_.emplace(key, best);
        return best;
    }

private:
    template <typename Emit>
    void extend(const std::vector<std::uint32_t>& avail, std::vector<std::uint32_t>& taken, std::size_t from,
                std::size_t target, std::size_t sum, const std::vector<bool>& R, Emit&& emit) {
        if (sum == target) emit(std::as_const(taken));
        for (std::size_t x = from; x < avail.size(); ++x) {
            if (taken[x] >= avail[x] || x == 0) continue;
            if (R[T_.neg(x)]) continue;  // adding x would create a zero sum
            std::vector<bool> next = R;
            extend_reachable(T_, next, x);
            ++taken[x];
            extend(avail, taken, x, target, T_.add(sum, x), next, emit);
            --taken[x];
        }
    }

    const IndexedGroup& T_;
    std::map<std::vector<std::uint32_t>, int> memo_;
};

} // namespace detail

/// Largest k with S = S_1 ... S_k, each S_i a nonempty zero-sum sequence.
inline int zss_max_factors(const Sequence& S, const Caps& caps = {}) {
    if (!sigma(S).is_zero()) throw Error(ErrorCode::NotZeroSum, "sequence " + S.to_string() + " does not sum to zero");
    const IndexedGroup T(S.group(), caps.arithmetic_max_order);
    std::vector<std::uint32_t> counts(T.size(), 0);
    for (auto i : S.indices()) ++counts[i];
    detail::MaxFactorSolver solver(T);
    return solver.solve(std::move(counts));
}

} // namespace zerosum

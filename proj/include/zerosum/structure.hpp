#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "zerosum/errors.hpp"
#include "zerosum/group.hpp"
#include "zerosum/search.hpp"
#include "zerosum/sequence.hpp"
#include "zerosum/verification.hpp"

namespace zerosum {

/// e_j^{ord e_j - 1} * prod_i (-x_i e_j + e_k) over a basis {e1, e2} with ord e2 = mn.
struct Type1Witness {
    GroupElement e1;
    GroupElement e2;
    int j = 1;
    std::vector<std::int64_t> x;  // in [0, ord e_j), nondecreasing when produced by classify

    bool operator==(const Type1Witness&) const = default;
};

/// g1^{sm - 1} * prod_i (-x_i g1 + g2) over a generating pair with ord g2 = mn.
struct Type2Witness {
    GroupElement g1;
    GroupElement g2;
    std::int64_t s = 1;
    std::vector<std::int64_t> x;  // in [0, m), summing to exactly m - 1

    bool operator==(const Type2Witness&) const = default;
};

struct ClassificationResult {
    bool is_type1 = false;
    std::vector<Type1Witness> type1_witnesses;
    bool is_type2 = false;
    std::vector<Type2Witness> type2_witnesses;
};

/// Over C_m^2: f1^{sm-1} * prod_{i=1}^{(t-s)m} (a_i f1 + f2), sum a_i = 1 mod m.
struct Struc1Witness {
    GroupElement f1;
    GroupElement f2;
    std::int64_t s = 1;
    std::vector<std::int64_t> a;

    bool operator==(const Struc1Witness&) const = default;
};

/// Over C_m^2: f1^{s1 m} f2^{s2 m - 1} (b f1 + f2)^{s3 m - 1} (b f1 + 2 f2), gcd(b, m) = 1.
struct Struc2Witness {
    GroupElement f1;
    GroupElement f2;
    std::int64_t s1 = 1;
    std::int64_t s2 = 1;
    std::int64_t s3 = 1;
    std::int64_t b = 1;

    bool operator==(const Struc2Witness&) const = default;
};

namespace detail {

inline std::pair<std::int64_t, std::int64_t> require_rank_two(const GroupSpec& G) {
    const auto mn = G.rank_two_params();
    if (!mn) throw Error(ErrorCode::BadParams, "group " + G.to_string() + " is not of rank two");
    return *mn;
}

inline Error bad_witness(const std::string& why) { return Error(ErrorCode::BadWitness, why); }

inline std::vector<GroupElement> repeat(const GroupElement& g, std::int64_t k) {
    return std::vector<GroupElement>(static_cast<std::size_t>(std::max<std::int64_t>(k, 0)), g);
}

/// Index-level generating set test via breadth-first closure.
inline bool generates_pair(const IndexedGroup& T, std::size_t a, std::size_t b) {
    std::vector<bool> seen(T.size(), false);
    std::vector<std::size_t> queue{0};
    seen[0] = true;
    for (std::size_t h = 0; h < queue.size(); ++h) {
        for (auto g : {a, b}) {
            const auto nxt = T.add(queue[h], g);
            if (!seen[nxt]) {
                seen[nxt] = true;
                queue.push_back(nxt);
            }
        }
    }
    return queue.size() == T.size();
}

inline std::size_t scale_index(const IndexedGroup& T, std::int64_t k, std::size_t g) {
    const auto ord = T.order_of(g);
    k = reduce_mod(k, ord);
    std::size_t acc = 0;
    for (std::int64_t i = 0; i < k; ++i) acc = T.add(acc, g);
    return acc;
}

/// Visits nondecreasing vectors of `len` values in [0, bound) whose sum
/// satisfies `accept(sum)`.
template <typename Accept, typename Visit>
void for_each_nondecreasing(std::size_t len, std::int64_t bound, Accept&& accept, Visit&& visit) {
    std::vector<std::int64_t> v;
    v.reserve(len);
    std::function<void(std::int64_t, std::int64_t)> rec = [&](std::int64_t lo, std::int64_t sum) {
        if (v.size() == len) {
            if (accept(sum)) visit(std::as_const(v));
            return;
        }
        for (std::int64_t x = lo; x < bound; ++x) {
            v.push_back(x);
            rec(x, sum + x);
            v.pop_back();
        }
    };
    rec(0, 0);
}

} // namespace detail

inline Sequence gen_type1(const GroupSpec& G, const Type1Witness& w) {
    const auto [m, n] = detail::require_rank_two(G);
    G.check(w.e1);
    G.check(w.e2);
    if (w.e1.is_zero() || w.e2.is_zero() || !is_basis(G, {w.e1, w.e2})) {
        throw detail::bad_witness("{" + w.e1.to_string() + ", " + w.e2.to_string() + "} is not a basis");
    }
    if (order(G, w.e2) != m * n) throw detail::bad_witness("ord e2 must be " + std::to_string(m * n));
    if (w.j != 1 && w.j != 2) throw detail::bad_witness("j must be 1 or 2");
    const auto& ej = w.j == 1 ? w.e1 : w.e2;
    const auto& ek = w.j == 1 ? w.e2 : w.e1;
    const auto oj = order(G, ej);
    const auto ok = order(G, ek);
    if (static_cast<std::int64_t>(w.x.size()) != ok) {
        throw detail::bad_witness("x must have ord e_k = " + std::to_string(ok) + " entries");
    }
    std::int64_t total = 0;
    for (auto xi : w.x) {
        if (xi < 0 || xi >= oj) throw detail::bad_witness("x_i must lie in [0, ord e_j)");
        total += xi;
    }
    if (reduce_mod(total + 1, oj) != 0) throw detail::bad_witness("sum of x_i must be -1 mod ord e_j");

    auto terms = detail::repeat(ej, oj - 1);
    for (auto xi : w.x) terms.push_back(add(G, scale(G, -xi, ej), ek));
    return Sequence::from_elements(G, terms);
}

inline Sequence gen_type2(const GroupSpec& G, const Type2Witness& w) {
    const auto [m, n] = detail::require_rank_two(G);
    G.check(w.g1);
    G.check(w.g2);
    const std::vector<GroupElement> pair{w.g1, w.g2};
    if (!generates(G, pair)) {
        throw detail::bad_witness("{" + w.g1.to_string() + ", " + w.g2.to_string() + "} does not generate G");
    }
    if (order(G, w.g2) != m * n) throw detail::bad_witness("ord g2 must be " + std::to_string(m * n));
    if (w.s < 1 || w.s > n) throw detail::bad_witness("s must lie in [1, n]");
    const auto len = (n + 1 - w.s) * m;
    if (static_cast<std::int64_t>(w.x.size()) != len) {
        throw detail::bad_witness("x must have (n+1-s)m = " + std::to_string(len) + " entries");
    }
    std::int64_t total = 0;
    for (auto xi : w.x) {
        if (xi < 0 || xi >= m) throw detail::bad_witness("x_i must lie in [0, m)");
        total += xi;
    }
    if (total != m - 1) throw detail::bad_witness("sum of x_i must be exactly m - 1");
    if (w.s != 1 && scale(G, m, w.g1) != scale(G, m, w.g2)) {
        throw Error(ErrorCode::MissingCosetCondition, "s != 1 requires m*g1 = m*g2");
    }

    auto terms = detail::repeat(w.g1, w.s * m - 1);
    for (auto xi : w.x) terms.push_back(add(G, scale(G, -xi, w.g1), w.g2));
    return Sequence::from_elements(G, terms);
}

/// Exhaustive witness search for the two rank-two families. Candidate pairs
/// are computed once per group.
class Classifier {
public:
    explicit Classifier(const GroupSpec& G, const Caps& caps = {})
        : group_(G), table_(G, caps.arithmetic_max_order) {
        std::tie(m_, n_) = detail::require_rank_two(G);
        const auto size = table_.size();
        for (std::size_t a = 0; a < size; ++a) {
            for (std::size_t b = 0; b < size; ++b) {
                if (a == 0 || b == 0 || table_.order_of(b) != m_ * n_) continue;
                if (!detail::generates_pair(table_, a, b)) continue;
                generating_pairs_.emplace_back(a, b);
                // A generating pair is a basis iff the orders multiply to |G|.
                if (table_.order_of(a) * table_.order_of(b) == G.order()) bases_.emplace_back(a, b);
            }
        }
    }

    const GroupSpec& group() const { return group_; }

    ClassificationResult classify(const Sequence& S, const Caps& caps = {}) const {
        if (!(S.group() == group_)) throw Error(ErrorCode::GroupMismatch, "sequence is not over " + group_.to_string());
        const auto D = static_cast<std::size_t>(m_ + m_ * n_ - 1);
        if (S.length() != D || !is_mzss(S, caps)) {
            throw Error(ErrorCode::NotMlMzss, "'" + S.to_string() + "' is not a minimal zero-sum sequence of length " +
                                                  std::to_string(D));
        }
        std::vector<std::uint32_t> counts(table_.size(), 0);
        for (auto i : S.indices()) ++counts[i];

        ClassificationResult out;
        for (const auto& [a, b] : bases_) {
            for (int j : {1, 2}) {
                if (auto x = match_coset_family(counts, j == 1 ? a : b, j == 1 ? b : a)) {
                    out.type1_witnesses.push_back(Type1Witness{group_.element_at(a), group_.element_at(b), j, *x});
                }
            }
        }
        for (const auto& [g1, g2] : generating_pairs_) {
            if (auto w = match_type2(counts, g1, g2)) out.type2_witnesses.push_back(std::move(*w));
        }
        out.is_type1 = !out.type1_witnesses.empty();
        out.is_type2 = !out.type2_witnesses.empty();
        return out;
    }

private:
    /// Type 1 shape with e_j = base, e_k = shift: counts must be
    /// base^{ord base - 1} and ord shift terms in shift + <base>.
    std::optional<std::vector<std::int64_t>> match_coset_family(const std::vector<std::uint32_t>& counts,
                                                                 std::size_t base, std::size_t shift) const {
        const auto oj = table_.order_of(base);
        if (counts[base] != static_cast<std::uint32_t>(oj - 1)) return std::nullopt;
        std::map<std::size_t, std::int64_t> coset;  // -x*base + shift -> x
        std::size_t term = shift;
        for (std::int64_t x = 0; x < oj; ++x) {
            coset.emplace(term, x);
            term = table_.add(term, table_.neg(base));
        }
        std::vector<std::int64_t> xs;
        std::int64_t total = 0;
        for (std::size_t g = 0; g < counts.size(); ++g) {
            if (!counts[g] || g == base) continue;
            auto it = coset.find(g);
            if (it == coset.end()) return std::nullopt;
            xs.insert(xs.end(), counts[g], it->second);
            total += it->second * counts[g];
        }
        if (static_cast<std::int64_t>(xs.size()) != table_.order_of(shift)) return std::nullopt;
        if (reduce_mod(total + 1, oj) != 0) return std::nullopt;
        std::sort(xs.begin(), xs.end());
        return xs;
    }

    std::optional<Type2Witness> match_type2(const std::vector<std::uint32_t>& counts, std::size_t g1,
                                            std::size_t g2) const {
        const std::int64_t v = counts[g1];
        if ((v + 1) % m_ != 0) return std::nullopt;
        const auto s = (v + 1) / m_;
        if (s < 1 || s > n_) return std::nullopt;
        if (s != 1 && detail::scale_index(table_, m_, g1) != detail::scale_index(table_, m_, g2)) return std::nullopt;
        // G/<g2> is cyclic of order m generated by g1, so m | ord g1 and
        // x -> -x g1 + g2 is injective on [0, m).
        if (table_.order_of(g1) % m_ != 0) {
            throw Error(ErrorCode::BadParams, "generating pair with ord g2 = mn but m does not divide ord g1");
        }
        std::map<std::size_t, std::int64_t> lookup;
        std::size_t term = g2;
        for (std::int64_t x = 0; x < m_; ++x) {
            lookup.emplace(term, x);
            term = table_.add(term, table_.neg(g1));
        }
        std::vector<std::int64_t> xs;
        std::int64_t total = 0;
        for (std::size_t g = 0; g < counts.size(); ++g) {
            if (!counts[g] || g == g1) continue;
            auto it = lookup.find(g);
            if (it == lookup.end()) return std::nullopt;
            xs.insert(xs.end(), counts[g], it->second);
            total += it->second * counts[g];
        }
        if (total != m_ - 1) return std::nullopt;
        std::sort(xs.begin(), xs.end());
        return Type2Witness{group_.element_at(g1), group_.element_at(g2), s, std::move(xs)};
    }

    GroupSpec group_;
    IndexedGroup table_;
    std::int64_t m_ = 0;
    std::int64_t n_ = 0;
    std::vector<std::pair<std::size_t, std::size_t>> bases_;
    std::vector<std::pair<std::size_t, std::size_t>> generating_pairs_;
};

/// Rejects anything that is not a minimal zero-sum sequence of length m + mn - 1.
inline ClassificationResult classify(const GroupSpec& G, const Sequence& S, const Caps& caps = {}) {
    return Classifier(G, caps).classify(S, caps);
}

/// Every valid Type 1 witness, x taken as nondecreasing vectors.
template <typename Visit>
void for_each_type1_witness(const GroupSpec& G, Visit&& visit) {
    const auto [m, n] = detail::require_rank_two(G);
    const IndexedGroup T(G, static_cast<std::size_t>(G.order()));
    for (std::size_t a = 1; a < T.size(); ++a) {
        for (std::size_t b = 1; b < T.size(); ++b) {
            if (T.order_of(b) != m * n || T.order_of(a) * T.order_of(b) != G.order()) continue;
            if (!detail::generates_pair(T, a, b)) continue;
            for (int j : {1, 2}) {
                const auto oj = T.order_of(j == 1 ? a : b);
                const auto ok = T.order_of(j == 1 ? b : a);
                detail::for_each_nondecreasing(
                    static_cast<std::size_t>(ok), oj, [&](std::int64_t s) { return reduce_mod(s + 1, oj) == 0; },
                    [&](const std::vector<std::int64_t>& x) {
                        visit(Type1Witness{G.element_at(a), G.element_at(b), j, x});
                    });
            }
        }
    }
}

/// Every valid Type 2 witness, x taken as nondecreasing vectors.
template <typename Visit>
void for_each_type2_witness(const GroupSpec& G, Visit&& visit) {
    const auto [m, n] = detail::require_rank_two(G);
    const IndexedGroup T(G, static_cast<std::size_t>(G.order()));
    for (std::size_t a = 1; a < T.size(); ++a) {
        for (std::size_t b = 1; b < T.size(); ++b) {
            if (T.order_of(b) != m * n || !detail::generates_pair(T, a, b)) continue;
            const bool coset = detail::scale_index(T, m, a) == detail::scale_index(T, m, b);
            for (std::int64_t s = 1; s <= n; ++s) {
                if (s != 1 && !coset) continue;
                detail::for_each_nondecreasing(
                    static_cast<std::size_t>((n + 1 - s) * m), m, [&](std::int64_t sum) { return sum == m - 1; },
                    [&](const std::vector<std::int64_t>& x) {
                        visit(Type2Witness{G.element_at(a), G.element_at(b), s, x});
                    });
            }
        }
    }
}

/// Enumerates every minimal zero-sum sequence of maximal length over G and
/// reports those matching neither family.
inline VerificationReport verify_theorem(const GroupSpec& G, const EnumerationOptions& opts = {}) {
    const Stopwatch clock;
    const Classifier classifier(G, opts.caps);
    VerificationReport rep;
    rep.check = "theorem";
    rep.params["group"] = G.to_string();
    std::uint64_t only1 = 0, only2 = 0, both = 0;
    const auto stats = enumerate_ml_mzss(
        G,
        [&](const Sequence& S) {
            const auto c = classifier.classify(S, opts.caps);
            ++rep.checked;
            if (c.is_type1 && c.is_type2) ++both;
            else if (c.is_type1) ++only1;
            else if (c.is_type2) ++only2;
            else rep.violations.push_back(S.to_string());
        },
        opts);
    rep.verdict = rep.violations.empty();
    rep.details["D"] = stats.D;
    rep.details["type1_only"] = only1;
    rep.details["type2_only"] = only2;
    rep.details["both"] = both;
    rep.elapsed = clock.elapsed();
    return rep;
}

/// Every maximal-length minimal zero-sum sequence over C_m^2 must contain
/// some element at least m - 1 times. Records g and the cofactor T per sequence.
inline VerificationReport check_property_b(std::int64_t m, const EnumerationOptions& opts = {}) {
    const Stopwatch clock;
    if (m < 2) throw Error(ErrorCode::BadParams, "property B check needs m >= 2");
    const auto G = GroupSpec::rank_two(m, 1);
    VerificationReport rep;
    rep.check = "property-b";
    rep.params["m"] = m;
    auto witnesses = nlohmann::ordered_json::array();
    const auto stats = enumerate_ml_mzss(
        G,
        [&](const Sequence& S) {
            ++rep.checked;
            const auto& terms = S.terms();
            auto it = std::find_if(terms.begin(), terms.end(), [&](const Term& t) {
                return static_cast<std::int64_t>(t.multiplicity) >= m - 1;
            });
            if (it == terms.end()) {
                rep.violations.push_back(S.to_string());
                return;
            }
            const auto g_part = Sequence::from_elements(G, detail::repeat(it->element, m - 1));
            nlohmann::ordered_json w;
            w["sequence"] = S.to_string();
            w["g"] = it->element.to_string();
            w["T"] = S.without(g_part).to_string();
            witnesses.push_back(std::move(w));
        },
        opts);
    rep.verdict = rep.violations.empty();
    rep.details["D"] = stats.D;
    rep.details["witnesses"] = std::move(witnesses);
    rep.elapsed = clock.elapsed();
    return rep;
}

/// Over C_n the maximal-length minimal zero-sum sequences are exactly e^n
/// with e a generator.
inline VerificationReport check_cyclic_inverse(std::int64_t n, const EnumerationOptions& opts = {}) {
    const Stopwatch clock;
    if (n < 2) throw Error(ErrorCode::BadParams, "cyclic inverse check needs n >= 2");
    const auto G = make_group({n});
    std::set<std::string> expected;
    for (std::int64_t e = 1; e < n; ++e) {
        if (std::gcd(e, n) == 1) expected.insert(Sequence::from_elements(G, detail::repeat(GroupElement{{e}}, n)).to_string());
    }
    VerificationReport rep;
    rep.check = "cyclic";
    rep.params["n"] = n;
    std::set<std::string> found;
    enumerate_ml_mzss(
        G,
        [&](const Sequence& S) {
            ++rep.checked;
            auto text = S.to_string();
            if (!expected.count(text)) rep.violations.push_back("unexpected: " + text);
            found.insert(std::move(text));
        },
        opts);
    for (const auto& e : expected) {
        if (!found.count(e)) rep.violations.push_back("missing: " + e);
    }
    rep.verdict = rep.violations.empty();
    rep.details["count"] = rep.checked;
    rep.details["expected_count"] = expected.size();
    rep.elapsed = clock.elapsed();
    return rep;
}

/// Seeded random sequences of length 2n - 1 over C_n always hold n terms
/// summing to zero; 0^{n-1} 1^{n-1} shows 2n - 2 is not enough.
inline VerificationReport egz_property(std::int64_t n, std::uint64_t trials, std::uint64_t seed, const Caps& caps = {}) {
    const Stopwatch clock;
    if (n < 2) throw Error(ErrorCode::BadParams, "EGZ check needs n >= 2");
    const auto G = make_group({n});
    const auto len = static_cast<std::size_t>(n);
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::int64_t> pick(0, n - 1);

    VerificationReport rep;
    rep.check = "egz";
    rep.params["n"] = n;
    rep.params["trials"] = trials;
    rep.params["seed"] = seed;
    std::vector<GroupElement> terms(2 * len - 1);
    for (std::uint64_t t = 0; t < trials; ++t) {
        for (auto& g : terms) g = GroupElement{{pick(rng)}};
        const auto S = Sequence::from_elements(G, terms);
        ++rep.checked;
        if (!extract_zero_sum_of_length(S, len, caps)) rep.violations.push_back(S.to_string());
    }
    auto tight = detail::repeat(GroupElement{{0}}, n - 1);
    const auto ones = detail::repeat(GroupElement{{1}}, n - 1);
    tight.insert(tight.end(), ones.begin(), ones.end());
    const auto tight_seq = Sequence::from_elements(G, tight);
    ++rep.checked;
    const bool tight_ok = !extract_zero_sum_of_length(tight_seq, len, caps).has_value();
    if (!tight_ok) rep.violations.push_back("tightness: " + tight_seq.to_string());
    rep.verdict = rep.violations.empty();
    rep.details["tightness_witness"] = tight_seq.to_string();
    rep.details["tightness_holds"] = tight_ok;
    rep.elapsed = clock.elapsed();
    return rep;
}

inline Sequence gen_struc1(std::int64_t m, std::int64_t t, const Struc1Witness& w) {
    const auto G = GroupSpec::rank_two(m, 1);
    G.check(w.f1);
    G.check(w.f2);
    if (w.f1.is_zero() || w.f2.is_zero() || !is_basis(G, {w.f1, w.f2})) throw detail::bad_witness("f1, f2 not a basis");
    if (w.s < 1 || w.s > t - 1) throw detail::bad_witness("s must lie in [1, t-1]");
    if (static_cast<std::int64_t>(w.a.size()) != (t - w.s) * m) throw detail::bad_witness("a must have (t-s)m entries");
    std::int64_t total = 0;
    for (auto ai : w.a) {
        if (ai < 0 || ai >= m) throw detail::bad_witness("a_i must lie in [0, m)");
        total += ai;
    }
    if (reduce_mod(total, m) != 1 % m) throw detail::bad_witness("sum of a_i must be 1 mod m");
    auto terms = detail::repeat(w.f1, w.s * m - 1);
    for (auto ai : w.a) terms.push_back(add(G, scale(G, ai, w.f1), w.f2));
    return Sequence::from_elements(G, terms);
}

inline Sequence gen_struc2(std::int64_t m, std::int64_t t, const Struc2Witness& w) {
    const auto G = GroupSpec::rank_two(m, 1);
    G.check(w.f1);
    G.check(w.f2);
    if (w.f1.is_zero() || w.f2.is_zero() || !is_basis(G, {w.f1, w.f2})) throw detail::bad_witness("f1, f2 not a basis");
    if (t < 3) throw detail::bad_witness("second structure needs t >= 3");
    if (w.s1 < 1 || w.s2 < 1 || w.s3 < 1 || w.s1 + w.s2 + w.s3 != t) {
        throw detail::bad_witness("s1, s2, s3 must be positive with sum t");
    }
    if (w.b < 1 || w.b >= m || std::gcd(w.b, m) != 1) throw detail::bad_witness("b must be a unit in [1, m)");
    const auto bf1 = scale(G, w.b, w.f1);
    auto terms = detail::repeat(w.f1, w.s1 * m);
    const auto f2s = detail::repeat(w.f2, w.s2 * m - 1);
    const auto mids = detail::repeat(add(G, bf1, w.f2), w.s3 * m - 1);
    terms.insert(terms.end(), f2s.begin(), f2s.end());
    terms.insert(terms.end(), mids.begin(), mids.end());
    terms.push_back(add(G, bf1, scale(G, 2, w.f2)));
    return Sequence::from_elements(G, terms);
}

/// Matches a sequence over C_m^2 of length tm - 1 against both structures
/// by exhaustive basis search.
class Tm1Matcher {
public:
    Tm1Matcher(std::int64_t m, std::int64_t t) : m_(m), t_(t), group_(GroupSpec::rank_two(m, 1)), table_(group_, 1u << 20) {
        if (t < 2) throw Error(ErrorCode::BadParams, "t must be >= 2");
        for (std::size_t a = 1; a < table_.size(); ++a) {
            for (std::size_t b = 1; b < table_.size(); ++b) {
                if (table_.order_of(a) * table_.order_of(b) == group_.order() && detail::generates_pair(table_, a, b)) {
                    bases_.emplace_back(a, b);
                }
            }
        }
    }

    std::pair<std::vector<Struc1Witness>, std::vector<Struc2Witness>> match(const std::vector<std::size_t>& idx) const {
        std::vector<std::uint32_t> counts(table_.size(), 0);
        for (auto i : idx) ++counts[i];
        std::vector<Struc1Witness> s1;
        std::vector<Struc2Witness> s2;
        for (const auto& [f1, f2] : bases_) {
            if (auto w = match1(counts, f1, f2)) s1.push_back(std::move(*w));
            if (t_ >= 3) match2(counts, f1, f2, s2);
        }
        return {std::move(s1), std::move(s2)};
    }

private:
    std::optional<Struc1Witness> match1(const std::vector<std::uint32_t>& counts, std::size_t f1, std::size_t f2) const {
        const std::int64_t v = counts[f1];
        if ((v + 1) % m_ != 0) return std::nullopt;
        const auto s = (v + 1) / m_;
        if (s < 1 || s > t_ - 1) return std::nullopt;
        std::map<std::size_t, std::int64_t> coset;
        std::size_t term = f2;
        for (std::int64_t a = 0; a < m_; ++a) {
            coset.emplace(term, a);
            term = table_.add(term, f1);
        }
        std::vector<std::int64_t> as;
        std::int64_t total = 0;
        for (std::size_t g = 0; g < counts.size(); ++g) {
            if (!counts[g] || g == f1) continue;
            auto it = coset.find(g);
            if (it == coset.end()) return std::nullopt;
            as.insert(as.end(), counts[g], it->second);
            total += it->second * counts[g];
        }
        if (static_cast<std::int64_t>(as.size()) != (t_ - s) * m_ || reduce_mod(total, m_) != 1 % m_) return std::nullopt;
        return Struc1Witness{group_.element_at(f1), group_.element_at(f2), s, std::move(as)};
    }

    void match2(const std::vector<std::uint32_t>& counts, std::size_t f1, std::size_t f2,
                std::vector<Struc2Witness>& out) const {
        for (std::int64_t b = 1; b < m_; ++b) {
            if (std::gcd(b, m_) != 1) continue;
            const auto bf1 = detail::scale_index(table_, b, f1);
            const auto mid = table_.add(bf1, f2);
            const auto last = table_.add(mid, f2);
            for (std::int64_t s1 = 1; s1 <= t_ - 2; ++s1) {
                for (std::int64_t s2 = 1; s1 + s2 <= t_ - 1; ++s2) {
                    const auto s3 = t_ - s1 - s2;
                    std::vector<std::uint32_t> want(counts.size(), 0);
                    want[f1] += static_cast<std::uint32_t>(s1 * m_);
                    want[f2] += static_cast<std::uint32_t>(s2 * m_ - 1);
                    want[mid] += static_cast<std::uint32_t>(s3 * m_ - 1);
                    want[last] += 1;
                    if (want == counts) {
                        out.push_back(Struc2Witness{group_.element_at(f1), group_.element_at(f2), s1, s2, s3, b});
                    }
                }
            }
        }
    }

    std::int64_t m_;
    std::int64_t t_;
    GroupSpec group_;
    IndexedGroup table_;
    std::vector<std::pair<std::size_t, std::size_t>> bases_;
};

namespace detail {

constexpr double kTm1MultisetLimit = 5e6;

/// Nondecreasing index sequences of length len over T summing to zero.
template <typename Visit>
void for_each_zero_sum_multiset(const IndexedGroup& T, std::size_t len, Visit&& visit) {
    std::vector<std::size_t> path;
    std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t lo, std::size_t sum) {
        if (path.size() + 1 == len) {
            const auto closing = T.neg(sum);
            if (closing >= lo) {
                path.push_back(closing);
                visit(std::as_const(path));
                path.pop_back();
            }
            return;
        }
        for (std::size_t g = lo; g < T.size(); ++g) {
            path.push_back(g);
            rec(g, T.add(sum, g));
            path.pop_back();
        }
    };
    if (len == 0) {
        visit(path);
        return;
    }
    rec(0, 0);
}

} // namespace detail

/// Every zero-sum sequence of length tm - 1 over C_m^2 that does not split
/// into t nonempty zero-sum sequences must match one of the two structures
/// (the second only for t >= 3).
inline VerificationReport tm1_structure_check(std::int64_t m, std::int64_t t, const Caps& caps = {}) {
    const Stopwatch clock;
    if (m < 2 || t < 2) throw Error(ErrorCode::BadParams, "tm1 check needs m >= 2 and t >= 2");
    const auto G = GroupSpec::rank_two(m, 1);
    const auto len = static_cast<std::size_t>(t * m - 1);
    if (static_cast<std::size_t>(G.order()) > caps.enumeration_max_order) {
        throw Error(ErrorCode::CapExceeded, "tm1 check capped at order " + std::to_string(caps.enumeration_max_order));
    }
    // Number of multisets of size len - 1 over |G| elements.
    double multisets = 1;
    for (std::size_t i = 1; i < len; ++i) {
        multisets = multisets * static_cast<double>(G.order() - 1 + static_cast<std::int64_t>(i)) / static_cast<double>(i);
    }
    if (multisets > detail::kTm1MultisetLimit) {
        throw Error(ErrorCode::CapExceeded, "tm1 search space too large for m=" + std::to_string(m) + ", t=" + std::to_string(t));
    }

    const IndexedGroup T(G, caps.arithmetic_max_order);
    const Tm1Matcher matcher(m, t);
    VerificationReport rep;
    rep.check = "tm1";
    rep.params["m"] = m;
    rep.params["t"] = t;
    std::uint64_t zss = 0, struc1 = 0, struc2 = 0, struc2_only = 0;
    detail::for_each_zero_sum_multiset(T, len, [&](const std::vector<std::size_t>& idx) {
        ++zss;
        const auto S = Sequence::from_indices(G, idx);
        if (zss_max_factors(S, caps) >= t) return;
        ++rep.checked;
        const auto [w1, w2] = matcher.match(idx);
        if (!w1.empty()) ++struc1;
        if (!w2.empty()) ++struc2;
        if (w1.empty() && !w2.empty()) ++struc2_only;
        if (w1.empty() && w2.empty()) rep.violations.push_back(S.to_string());
    });
    rep.verdict = rep.violations.empty();
    rep.details["zero_sum_sequences"] = zss;
    rep.details["struc1_matches"] = struc1;
    rep.details["struc2_matches"] = struc2;
    rep.details["struc2_only"] = struc2_only;
    rep.elapsed = clock.elapsed();
    return rep;
}

/// T = S_0 S_1 ... S_{n-s} with |S_i| = m and phi(S_i) zero-sum for i >= 1,
/// phi the quotient onto C_m^2. Returned as [S_0, S_1, ...]. Candidates for
/// each S_i are tried in lexicographic order with backtracking.
inline std::optional<std::vector<Sequence>> find_admissible_factorization(std::int64_t m, std::int64_t n, std::int64_t s,
                                                                         const Sequence& T, const Caps& caps = {}) {
    const auto G = GroupSpec::rank_two(m, n);
    if (!(T.group() == G)) throw Error(ErrorCode::GroupMismatch, "sequence must be over " + G.to_string());
    if (s < 1 || s > n) throw Error(ErrorCode::BadLength, "s must lie in [1, n]");
    if (static_cast<std::int64_t>(T.length()) != (n + 1 - s) * m) {
        throw Error(ErrorCode::BadLength, "|T| must be (n+1-s)m = " + std::to_string((n + 1 - s) * m));
    }
    if (n == s) return std::vector<Sequence>{T};

    const auto phi = inductive_quotient(m, n);
    const IndexedGroup Q(phi.target(), caps.arithmetic_max_order);
    std::vector<std::size_t> image(static_cast<std::size_t>(G.order()));
    for (std::size_t i = 0; i < image.size(); ++i) image[i] = phi.target().index_of(phi(G.element_at(i)));

    const auto blocks = static_cast<std::size_t>(n - s);
    const auto len = static_cast<std::size_t>(m);
    std::vector<std::vector<std::size_t>> chosen;
    std::set<std::vector<std::size_t>> dead;

    std::function<bool(const std::vector<std::size_t>&)> solve = [&](const std::vector<std::size_t>& rest) -> bool {
        if (chosen.size() == blocks) {
            chosen.insert(chosen.begin(), rest);
            return true;
        }
        if (dead.count(rest)) return false;
        std::vector<std::size_t> weights;
        for (auto v : rest) weights.push_back(image[v]);
        const detail::FixedLengthZeroSums search(Q, rest, weights, len);
        bool ok = false;
        search.for_each([&](const std::vector<std::size_t>& pos) {
            std::vector<std::size_t> block, remaining;
            std::size_t p = 0;
            for (std::size_t i = 0; i < rest.size(); ++i) {
                if (p < pos.size() && pos[p] == i) {
                    block.push_back(rest[i]);
                    ++p;
                } else {
                    remaining.push_back(rest[i]);
                }
            }
            chosen.push_back(std::move(block));
            if (solve(remaining)) {
                ok = true;
                return false;
            }
            chosen.pop_back();
            return true;
        });
        if (!ok) dead.insert(rest);
        return ok;
    };

    if (!solve(T.indices())) return std::nullopt;
    std::vector<Sequence> out;
    for (const auto& block : chosen) out.push_back(Sequence::from_indices(G, block));
    return out;
}

} // namespace zerosum

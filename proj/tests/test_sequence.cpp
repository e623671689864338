#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "zerosum/search.hpp"
#include "zerosum/sequence.hpp"

using namespace zerosum;

namespace {

Sequence seq(const GroupSpec& G, std::string_view text) { return parse_sequence(G, text); }

std::vector<oracle::Elem> terms_of(const Sequence& S) {
    std::vector<oracle::Elem> out;
    for (const auto& g : S.expanded()) out.push_back(g.residues);
    return out;
}

Sequence random_sequence(const GroupSpec& G, std::size_t len, std::mt19937_64& rng) {
    std::uniform_int_distribution<std::size_t> pick(0, static_cast<std::size_t>(G.order()) - 1);
    std::vector<std::size_t> idx(len);
    for (auto& i : idx) i = pick(rng);
    return Sequence::from_indices(G, idx);
}

std::vector<GroupSpec> small_groups() {
    std::vector<GroupSpec> out;
    for (auto f : std::vector<std::vector<std::int64_t>>{
             {2}, {3}, {4}, {5}, {6}, {7}, {8}, {9}, {10}, {12}, {16}, {2, 2}, {2, 4}, {2, 6}, {2, 8}, {3, 3}, {4, 4}, {2, 2, 2}, {2, 2, 4}, {2, 2, 2, 2}}) {
        out.push_back(make_group(f));
    }
    return out;
}

void for_each_index_multiset(std::size_t n, std::size_t len, const std::function<void(const std::vector<std::size_t>&)>& visit) {
    std::vector<std::size_t> cur;
    std::function<void(std::size_t)> rec = [&](std::size_t lo) {
        if (cur.size() == len) {
            visit(cur);
            return;
        }
        for (std::size_t i = lo; i < n; ++i) {
            cur.push_back(i);
            rec(i);
            cur.pop_back();
        }
    };
    rec(0);
}

double multiset_count(std::size_t n, std::size_t len) {
    double c = 1;
    for (std::size_t i = 1; i <= len; ++i) c = c * static_cast<double>(n - 1 + i) / static_cast<double>(i);
    return c;
}

} // namespace

TEST(ParseSequence, Examples) {
    const auto G = make_group({2, 4});
    const auto S = seq(G, "[0,1]^3 [1,2] [1,3]");
    EXPECT_EQ(S.length(), 5u);
    EXPECT_EQ(S.multiplicity(GroupElement{{0, 1}}), 3u);
    EXPECT_EQ(seq(G, "[1,5]").to_string(), "[1,1]");
    const auto E = seq(G, "");
    EXPECT_TRUE(E.empty());
    EXPECT_EQ(E.length(), 0u);
    EXPECT_EQ(seq(G, "[1,3] [0,1] [0,1]^2 [1,2]").to_string(), "[0,1]^3 [1,2] [1,3]");
}

TEST(ParseSequence, Errors) {
    const auto G = make_group({2, 4});
    for (const char* bad : {"[0,1", "0,1]", "[0,a]", "[0,1]^0", "[0,1]^x", "[0,1]x"}) {
        try {
            seq(G, bad);
            FAIL() << bad;
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), ErrorCode::SyntaxError) << bad;
        }
    }
    try {
        seq(G, "[0,1,1]");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
    }
}

TEST(ParseSequence, RoundTrip) {
    std::mt19937_64 rng(3);
    for (const auto& G : small_groups()) {
        for (int i = 0; i < 50; ++i) {
            const auto S = random_sequence(G, rng() % 14, rng);
            EXPECT_EQ(seq(G, format_sequence(S)), S);
        }
    }
}

TEST(Sigma, Examples) {
    const auto G = make_group({2, 4});
    const auto S = seq(G, "[0,1]^3 [1,2] [1,3]");
    EXPECT_EQ(sigma(S), GroupElement{oracle::sum_of({2, 4}, terms_of(S))});
    EXPECT_TRUE(sigma(S).is_zero());
    EXPECT_TRUE(sigma(seq(G, "")).is_zero());
    EXPECT_TRUE(sigma(seq(make_group({6}), "[1]^6")).is_zero());
}

TEST(ApplyHom, Examples) {
    const auto phi = inductive_quotient(2, 2);
    const auto& G = phi.source();
    EXPECT_EQ(apply_hom(phi, seq(G, "[0,1]^3 [1,2] [1,3]")).to_string(), "[0,1]^3 [1,0] [1,1]");
    EXPECT_TRUE(apply_hom(phi, seq(G, "")).empty());
    EXPECT_EQ(apply_hom(phi, seq(G, "[0,2]^2")).to_string(), "[0,0]^2");
    try {
        apply_hom(phi, seq(make_group({2, 2}), "[1,1]"));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::GroupMismatch);
    }
}

TEST(ApplyHom, CommutesWithSigma) {
    std::mt19937_64 rng(5);
    std::vector<Homomorphism> maps{inductive_quotient(2, 2), inductive_quotient(3, 2), inductive_quotient(2, 4)};
    for (const auto& G : {make_group({2, 4}), make_group({3, 6}), make_group({4, 4})}) {
        const auto auts = automorphisms(G);
        for (int i = 0; i < 5; ++i) maps.push_back(auts->at(rng() % auts->size()));
    }
    for (const auto& f : maps) {
        for (int i = 0; i < 50; ++i) {
            const auto S = random_sequence(f.source(), rng() % 12, rng);
            EXPECT_EQ(sigma(apply_hom(f, S)), f(sigma(S)));
        }
    }
}

TEST(ReachableSubsums, Examples) {
    const auto C4 = make_group({4});
    EXPECT_EQ(reachable_subsums(seq(C4, "[1]^2")).elements(), (std::vector<GroupElement>{GroupElement{{1}}, GroupElement{{2}}}));
    const auto K = make_group({2, 2});
    EXPECT_EQ(reachable_subsums(seq(K, "[1,0] [0,1]")).elements(),
              (std::vector<GroupElement>{GroupElement{{0, 1}}, GroupElement{{1, 0}}, GroupElement{{1, 1}}}));
    EXPECT_EQ(reachable_subsums(seq(make_group({3}), "[1] [2]")).count(), 3u);
    EXPECT_EQ(reachable_subsums(seq(C4, "")).count(), 0u);
}

TEST(ReachableSubsums, MatchesSubsetOracle) {
    std::mt19937_64 rng(9);
    for (const auto& G : small_groups()) {
        for (int i = 0; i < 30; ++i) {
            const auto S = random_sequence(G, rng() % 11, rng);
            const auto sums = oracle::subset_sums(G.invariant_factors(), terms_of(S));
            std::set<GroupElement> expected;
            for (std::size_t m = 1; m < sums.size(); ++m) expected.insert(GroupElement{sums[m]});
            const auto got = reachable_subsums(S).elements();
            EXPECT_EQ(std::set<GroupElement>(got.begin(), got.end()), expected);
        }
    }
}

TEST(ReachableSubsums, MonotoneUnderDivision) {
    std::mt19937_64 rng(13);
    for (const auto& G : small_groups()) {
        for (int i = 0; i < 40; ++i) {
            const auto S = random_sequence(G, 1 + rng() % 12, rng);
            auto idx = S.indices();
            std::vector<std::size_t> sub;
            for (auto x : idx) {
                if (rng() % 2) sub.push_back(x);
            }
            const auto T = Sequence::from_indices(G, sub);
            ASSERT_TRUE(T.divides(S));
            const auto RS = reachable_subsums(S);
            for (const auto& g : reachable_subsums(T).elements()) EXPECT_TRUE(RS.contains(g));
        }
    }
}

TEST(ZeroSumFree, Examples) {
    const auto C5 = make_group({5});
    EXPECT_TRUE(is_zero_sum_free(seq(C5, "[1]^4")));
    EXPECT_FALSE(is_zero_sum_free(seq(C5, "[1]^5")));
    const auto G = make_group({2, 4});
    const auto S = seq(G, "[0,1]^3 [1,2]");
    EXPECT_EQ(is_zero_sum_free(S), oracle::zero_sum_free({2, 4}, terms_of(S)));
    EXPECT_TRUE(is_zero_sum_free(S));
    EXPECT_TRUE(is_zero_sum_free(seq(G, "")));
}

TEST(Mzss, Examples) {
    const auto K = make_group({2, 2});
    EXPECT_TRUE(is_mzss(seq(K, "[1,0] [0,1] [1,1]")));
    const auto C4 = make_group({4});
    EXPECT_TRUE(is_mzss(seq(C4, "[1]^4")));
    EXPECT_TRUE(is_mzss(seq(C4, "[2] [1] [1]")));
    EXPECT_TRUE(oracle::minimal_zero_sum({4}, {{2}, {1}, {1}}));
    EXPECT_TRUE(is_mzss(seq(C4, "[2]^2")));
    EXPECT_FALSE(is_mzss(seq(C4, "[1]^2 [2] [0]")));
    EXPECT_TRUE(is_mzss(seq(C4, "[0]")));
    EXPECT_FALSE(is_mzss(seq(C4, "")));
}

// Exhaustive where the multiset count is small, sampled beyond that.
TEST(OracleEquivalence, ZeroSumFreeAndMzss) {
    std::mt19937_64 rng(17);
    for (const auto& G : small_groups()) {
        if (G.order() > 16) continue;
        const auto f = G.invariant_factors();
        const auto n = static_cast<std::size_t>(G.order());
        auto check = [&](const std::vector<std::size_t>& idx) {
            const auto S = Sequence::from_indices(G, idx);
            const auto t = terms_of(S);
            ASSERT_EQ(is_zero_sum_free(S), oracle::zero_sum_free(f, t)) << G.to_string() << " " << S.to_string();
            ASSERT_EQ(is_mzss(S), oracle::minimal_zero_sum(f, t)) << G.to_string() << " " << S.to_string();
        };
        for (std::size_t len = 0; len <= 12; ++len) {
            if (multiset_count(n, len) <= 3000) {
                for_each_index_multiset(n, len, check);
            } else {
                std::uniform_int_distribution<std::size_t> pick(0, n - 1);
                for (int i = 0; i < 300; ++i) {
                    std::vector<std::size_t> idx(len);
                    for (auto& x : idx) x = pick(rng);
                    check(idx);
                }
            }
        }
    }
}

// Sampling uniformly rarely hits a minimal sequence; build near-misses from
// ml-mzss by replacing one term.
TEST(OracleEquivalence, FastMzssPathOnPerturbedLongSequences) {
    std::mt19937_64 rng(19);
    for (const auto& G : {make_group({2, 4}), make_group({3, 3}), make_group({4, 4}), make_group({2, 8})}) {
        const auto all = enumerate_ml_mzss(G);
        for (const auto& S : all) {
            auto idx = S.indices();
            ASSERT_TRUE(oracle::minimal_zero_sum(G.invariant_factors(), terms_of(S)));
            idx[rng() % idx.size()] = rng() % static_cast<std::size_t>(G.order());
            const auto P = Sequence::from_indices(G, idx);
            ASSERT_EQ(is_mzss(P), oracle::minimal_zero_sum(G.invariant_factors(), terms_of(P))) << P.to_string();
        }
    }
}

TEST(ZssMaxFactors, Examples) {
    EXPECT_EQ(zss_max_factors(seq(make_group({3}), "[1]^6")), 2);
    EXPECT_EQ(zss_max_factors(seq(make_group({2, 2}), "[1,0] [0,1] [1,1]")), 1);
    EXPECT_EQ(zss_max_factors(seq(make_group({2}), "[0]^3")), 3);
    EXPECT_EQ(zss_max_factors(seq(make_group({2}), "")), 0);
    try {
        zss_max_factors(seq(make_group({3}), "[1]"));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NotZeroSum);
    }
}

TEST(ZssMaxFactors, MatchesPartitionOracle) {
    std::mt19937_64 rng(23);
    for (const auto& G : {make_group({2, 2}), make_group({3, 3}), make_group({2, 4}), make_group({6}), make_group({2, 2, 2})}) {
        const auto f = G.invariant_factors();
        int done = 0;
        while (done < 60) {
            auto S = random_sequence(G, 1 + rng() % 9, rng);
            // close to a zero sum with one extra term
            auto idx = S.indices();
            idx.push_back(G.index_of(negate(G, sigma(S))));
            S = Sequence::from_indices(G, idx);
            ASSERT_EQ(zss_max_factors(S), oracle::max_zero_sum_blocks(f, terms_of(S))) << S.to_string();
            ++done;
        }
    }
}

TEST(ExtractZeroSum, Examples) {
    const auto C3 = make_group({3});
    const auto w = extract_zero_sum_of_length(seq(C3, "[0] [1]^2 [2]^2"), 3);
    ASSERT_TRUE(w.has_value());
    EXPECT_EQ(w->to_string(), "[0] [1] [2]");
    EXPECT_TRUE(sigma(*w).is_zero());
    EXPECT_EQ(extract_zero_sum_of_length(seq(make_group({2}), "[1]^3"), 2)->to_string(), "[1]^2");
    EXPECT_FALSE(extract_zero_sum_of_length(seq(C3, "[1]^2"), 3).has_value());
    EXPECT_FALSE(extract_zero_sum_of_length(seq(make_group({4}), "[0]^3 [1]^3"), 4).has_value());
    try {
        extract_zero_sum_of_length(seq(C3, "[1]"), 0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::BadLength);
    }
}

TEST(ExtractZeroSum, LeastWitnessMatchesOracle) {
    std::mt19937_64 rng(29);
    for (const auto& G : {make_group({5}), make_group({2, 4}), make_group({3, 3}), make_group({7})}) {
        for (int i = 0; i < 100; ++i) {
            const auto S = random_sequence(G, 1 + rng() % 12, rng);
            const std::size_t len = 1 + rng() % S.length();
            const auto got = extract_zero_sum_of_length(S, len);
            const auto want = oracle::least_zero_sum_of_length(G.invariant_factors(), terms_of(S), len);
            ASSERT_EQ(got.has_value(), want.has_value()) << S.to_string() << " len " << len;
            if (got) {
                EXPECT_EQ(terms_of(*got), *want);
            }
        }
    }
}

TEST(ExtractZeroSum, ErdosGinzburgZivRandom) {
    std::mt19937_64 rng(31);
    for (std::int64_t n = 2; n <= 10; ++n) {
        const auto G = make_group({n});
        for (int i = 0; i < 10000; ++i) {
            const auto S = random_sequence(G, static_cast<std::size_t>(2 * n - 1), rng);
            const auto T = extract_zero_sum_of_length(S, static_cast<std::size_t>(n));
            ASSERT_TRUE(T.has_value()) << S.to_string();
            ASSERT_TRUE(sigma(*T).is_zero());
            ASSERT_TRUE(T->divides(S));
        }
    }
}

// Every zero-sum free U of length D - 1 closes to a minimal zero-sum sequence.
TEST(MaximalityLink, ZeroSumFreeOfLengthDMinusOneCloses) {
    for (auto f : std::vector<std::vector<std::int64_t>>{{2, 2}, {2, 4}, {3, 3}, {2, 6}, {4, 4}, {3, 6}, {2, 2, 2}, {7}, {12}}) {
        const auto G = make_group(f);
        const auto D = davenport(G).D;
        const IndexedGroup T(G, 1024);
        std::size_t closed = 0;
        std::vector<std::size_t> cur;
        std::function<void(std::size_t)> rec = [&](std::size_t lo) {
            if (cur.size() + 1 == D) {
                const auto U = Sequence::from_indices(G, cur);
                auto idx = cur;
                idx.push_back(G.index_of(negate(G, sigma(U))));
                const auto S = Sequence::from_indices(G, idx);
                ASSERT_TRUE(is_mzss(S)) << S.to_string();
                ASSERT_TRUE(oracle::minimal_zero_sum(f, terms_of(S))) << S.to_string();
                ++closed;
                return;
            }
            for (std::size_t x = std::max<std::size_t>(lo, 1); x < T.size(); ++x) {
                cur.push_back(x);
                if (is_zero_sum_free(Sequence::from_indices(G, cur))) rec(x);
                cur.pop_back();
            }
        };
        rec(1);
        EXPECT_GT(closed, 0u) << G.to_string();
    }
}

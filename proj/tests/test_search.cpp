#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "zerosum/search.hpp"

using namespace zerosum;

namespace {

Sequence seq(const GroupSpec& G, std::string_view text) { return parse_sequence(G, text); }

std::vector<oracle::Elem> terms_of(const Sequence& S) {
    std::vector<oracle::Elem> out;
    for (const auto& g : S.expanded()) out.push_back(g.residues);
    return out;
}

std::set<std::vector<oracle::Elem>> as_oracle_set(const std::vector<Sequence>& v) {
    std::set<std::vector<oracle::Elem>> out;
    for (const auto& S : v) out.insert(terms_of(S));
    return out;
}

} // namespace

TEST(Davenport, Examples) {
    EXPECT_EQ(davenport(make_group({2, 2})).D, 3u);
    EXPECT_EQ(davenport(make_group({2, 4})).D, 5u);
    EXPECT_EQ(davenport(make_group({3, 6})).D, 8u);
    EXPECT_EQ(davenport(make_group({10})).D, 10u);
    EXPECT_EQ(davenport(make_group({})).D, 1u);
}

TEST(Davenport, WitnessIsMinimalOfLengthD) {
    for (auto f : std::vector<std::vector<std::int64_t>>{{2, 2}, {2, 4}, {3, 3}, {3, 6}, {4, 4}, {9}, {2, 2, 2}}) {
        const auto G = make_group(f);
        const auto r = davenport(G);
        EXPECT_EQ(r.witness.length(), r.D);
        EXPECT_TRUE(is_mzss(r.witness));
        EXPECT_TRUE(oracle::minimal_zero_sum(f, terms_of(r.witness)));
        EXPECT_GT(r.nodes_explored, 0u);
    }
}

TEST(Davenport, CyclicUpTo64) {
    for (std::int64_t n = 2; n <= 64; ++n) EXPECT_EQ(davenport(make_group({n})).D, static_cast<std::size_t>(n)) << n;
}

TEST(Davenport, RankTwoFormulaUpTo64) {
    for (std::int64_t m = 2; m * m <= 64; ++m) {
        for (std::int64_t n = 1; m * m * n <= 64; ++n) {
            EXPECT_EQ(davenport(GroupSpec::rank_two(m, n)).D, static_cast<std::size_t>(m + m * n - 1)) << m << "," << m * n;
        }
    }
}

TEST(Davenport, MatchesLengthScanOracle) {
    for (auto f : std::vector<std::vector<std::int64_t>>{{2, 2}, {2, 4}, {3, 3}, {6}, {2, 6}, {2, 2, 2}, {2, 2, 4}}) {
        EXPECT_EQ(davenport(make_group(f)).D, oracle::davenport(f));
    }
}

TEST(Davenport, CapExceeded) {
    try {
        davenport(make_group({2, 34}));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::CapExceeded);
    }
    Caps raised;
    raised.davenport_max_order = 80;
    EXPECT_EQ(davenport(make_group({80}), raised).D, 80u);
}

TEST(Enumerate, Examples) {
    const auto K = make_group({2, 2});
    const auto all = enumerate_ml_mzss(K);
    ASSERT_EQ(all.size(), 1u);
    EXPECT_EQ(all[0].to_string(), "[0,1] [1,0] [1,1]");

    std::vector<std::string> c6;
    for (const auto& S : enumerate_ml_mzss(make_group({6}))) c6.push_back(S.to_string());
    EXPECT_EQ(c6, (std::vector<std::string>{"[1]^6", "[5]^6"}));
}

TEST(Enumerate, MatchesBruteForceOracle) {
    for (auto f : std::vector<std::vector<std::int64_t>>{{2, 2}, {2, 4}, {3, 3}, {6}, {8}, {2, 6}, {2, 2, 2}, {4, 4}, {2, 8}}) {
        const auto G = make_group(f);
        const auto D = davenport(G).D;
        const auto got = enumerate_ml_mzss(G);
        const auto want = oracle::ml_mzss(f, D);
        EXPECT_EQ(got.size(), want.size()) << G.to_string();
        EXPECT_EQ(as_oracle_set(got), want) << G.to_string();
    }
}

TEST(Enumerate, FrozenCounts) {
    // Values computed by the brute-force oracle over all multisets of length D.
    EXPECT_EQ(oracle::ml_mzss({2, 4}, 5).size(), 8u);
    EXPECT_EQ(enumerate_ml_mzss(make_group({2, 4})).size(), 8u);
    EXPECT_EQ(oracle::ml_mzss({3, 3}, 5).size(), 24u);
    EXPECT_EQ(enumerate_ml_mzss(make_group({3, 3})).size(), 24u);
    EXPECT_EQ(enumerate_ml_mzss(make_group({4, 4})).size(), 144u);
    EXPECT_EQ(enumerate_ml_mzss(make_group({3, 6})).size(), 240u);
}

TEST(Enumerate, EverySequenceIsMinimalOfLengthDWithoutDuplicates) {
    for (auto f : std::vector<std::vector<std::int64_t>>{{3, 6}, {2, 10}, {5, 5}, {2, 2, 4}}) {
        const auto G = make_group(f);
        const auto D = davenport(G).D;
        const auto all = enumerate_ml_mzss(G);
        std::set<Sequence> seen;
        std::size_t k = 0;
        for (const auto& S : all) {
            EXPECT_EQ(S.length(), D);
            EXPECT_TRUE(is_mzss(S)) << S.to_string();
            if (k++ % 7 == 0) {
                EXPECT_TRUE(oracle::minimal_zero_sum(f, terms_of(S))) << S.to_string();
            }
            EXPECT_TRUE(seen.insert(S).second) << "duplicate " << S.to_string();
        }
    }
}

TEST(Enumerate, IdenticalAcrossWorkerCounts) {
    for (auto f : std::vector<std::vector<std::int64_t>>{{3, 6}, {4, 4}, {2, 12}}) {
        const auto G = make_group(f);
        EnumerationOptions base;
        const auto ref = enumerate_ml_mzss(G, base);
        for (std::size_t w : {2u, 4u, 7u, 64u}) {
            EnumerationOptions o;
            o.workers = w;
            EXPECT_EQ(enumerate_ml_mzss(G, o), ref) << G.to_string() << " workers " << w;
        }
        EXPECT_EQ(enumerate_ml_mzss(G, base), ref);
    }
}

TEST(Enumerate, ClosedUnderAutomorphisms) {
    for (auto f : std::vector<std::vector<std::int64_t>>{{2, 2}, {2, 4}, {3, 3}, {2, 6}, {2, 8}, {4, 4}, {3, 6}, {12}, {18}, {2, 2, 2}}) {
        const auto G = make_group(f);
        const auto all = enumerate_ml_mzss(G);
        const std::set<Sequence> set(all.begin(), all.end());
        for (const auto& a : *automorphisms(G)) {
            for (const auto& S : all) ASSERT_TRUE(set.count(apply_hom(a, S))) << G.to_string() << " " << S.to_string();
        }
    }
}

TEST(Enumerate, CapExceeded) {
    try {
        enumerate_ml_mzss(make_group({6, 12}));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::CapExceeded);
    }
}

TEST(Canonicalize, Examples) {
    const auto K = make_group({2, 2});
    const auto S = seq(K, "[0,1] [1,0] [1,1]");
    EXPECT_EQ(canonicalize(K, S), S);
    const auto C6 = make_group({6});
    EXPECT_EQ(canonicalize(C6, seq(C6, "[5]^6")).to_string(), "[1]^6");
}

TEST(Canonicalize, ConstantOnOrbitsAndIdempotent) {
    std::mt19937_64 rng(41);
    for (auto f : std::vector<std::vector<std::int64_t>>{{2, 4}, {3, 6}, {4, 4}}) {
        const auto G = make_group(f);
        const Canonicalizer canon(G);
        const auto auts = automorphisms(G);
        const auto all = enumerate_ml_mzss(G);
        for (int i = 0; i < 100; ++i) {
            const auto& S = all[rng() % all.size()];
            const auto& a = auts->at(rng() % auts->size());
            const auto c = canon(S);
            EXPECT_EQ(canon(apply_hom(a, S)), c);
            EXPECT_EQ(canon(c), c);
            EXPECT_FALSE(S < c);
        }
    }
}

TEST(CountMlMzss, Examples) {
    const auto r = count_ml_mzss(make_group({2, 2}));
    EXPECT_EQ(r.total_count, 1u);
    EXPECT_EQ(r.orbit_count, 1u);
    EXPECT_EQ(r.length, 3u);
    const auto b = count_ml_mzss(make_group({2, 4}));
    EXPECT_EQ(b.total_count, 8u);
    EXPECT_EQ(b.orbit_representatives.size(), b.orbit_count);
}

TEST(CountMlMzss, CyclicTotalsAreEulerPhi) {
    for (std::int64_t n = 2; n <= 12; ++n) {
        const auto r = count_ml_mzss(make_group({n}));
        EXPECT_EQ(static_cast<std::int64_t>(r.total_count), oracle::euler_phi(n)) << n;
        EXPECT_EQ(r.orbit_count, 1u) << n;
        ASSERT_EQ(r.orbit_representatives.size(), 1u);
        EXPECT_EQ(r.orbit_representatives[0].to_string(), "[1]^" + std::to_string(n));
    }
}

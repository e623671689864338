#pragma once

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <optional>
#include <set>
#include <thread>
#include <vector>

#include "zerosum/errors.hpp"
#include "zerosum/group.hpp"
#include "zerosum/sequence.hpp"

namespace zerosum {

struct DavenportResult {
    GroupSpec group;
    std::size_t D = 0;
    Sequence witness;  // a minimal zero-sum sequence of length D
    std::chrono::milliseconds elapsed{0};
    std::uint64_t nodes_explored = 0;
};

struct EnumerationOptions {
    std::size_t workers = 1;
    Caps caps;
    std::optional<std::size_t> davenport;  // skip recomputing D(G) when known
};

struct EnumerationStats {
    std::size_t D = 0;
    std::uint64_t total = 0;
    std::uint64_t nodes = 0;
};

struct EnumerationReport {
    GroupSpec group;
    std::size_t length = 0;  // D(G)
    std::uint64_t total_count = 0;
    std::uint64_t orbit_count = 0;
    std::vector<Sequence> orbit_representatives;
    std::chrono::milliseconds elapsed{0};
    std::uint64_t nodes = 0;
};

namespace detail {

/// Fixed-width bitset over element indices, one block per DFS depth.
class MaskStack {
public:
    MaskStack(std::size_t bits, std::size_t depth) : words_((bits + 63) / 64), data_(words_ * (depth + 1), 0) {}

    std::uint64_t* level(std::size_t d) { return data_.data() + d * words_; }
    std::size_t words() const { return words_; }

    static bool test(const std::uint64_t* m, std::size_t i) { return (m[i >> 6] >> (i & 63)) & 1u; }
    static void set(std::uint64_t* m, std::size_t i) { m[i >> 6] |= std::uint64_t{1} << (i & 63); }

    std::size_t count(const std::uint64_t* m) const {
        std::size_t c = 0;
        for (std::size_t w = 0; w < words_; ++w) c += static_cast<std::size_t>(std::popcount(m[w]));
        return c;
    }

    /// dst = src | {g} | (src + g)
    void extend(const IndexedGroup& T, const std::uint64_t* src, std::uint64_t* dst, std::size_t g) const {
        std::copy(src, src + words_, dst);
        set(dst, g);
        for (std::size_t w = 0; w < words_; ++w) {
            for (std::uint64_t bits = src[w]; bits; bits &= bits - 1) {
                const auto r = w * 64 + static_cast<std::size_t>(std::countr_zero(bits));
                set(dst, T.add(r, g));
            }
        }
    }

private:
    std::size_t words_;
    std::vector<std::uint64_t> data_;
};

/// Automorphisms as index permutations, or none when the group is too large
/// to enumerate them (the search then runs without symmetry breaking).
inline std::vector<std::vector<std::uint32_t>> symmetry_permutations(const GroupSpec& G, const Caps& caps) {
    if (static_cast<std::size_t>(G.order()) > caps.automorphism_max_order) return {};
    try {
        return automorphism_permutations(G, caps);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::CapExceeded) throw;
        return {};
    }
}

/// Longest zero-sum free sequence by DFS over nondecreasing index sequences.
///
/// Only prefixes P with sorted(a(P)) >= P for every automorphism a are
/// extended, checked up to a fixed depth. This loses nothing: the least
/// sorted image S of any sequence has that property for each of its
/// prefixes, since the first |P| terms of sorted(a(S)) are termwise at most
/// those of sorted(a(P)).
class LongestZeroSumFree {
public:
    static constexpr std::size_t kSymmetryDepth = 4;

    LongestZeroSumFree(const IndexedGroup& T, std::vector<std::vector<std::uint32_t>> perms)
        : T_(T), perms_(std::move(perms)), masks_(T.size(), T.size()) {}

    void run() {
        std::uint64_t* root = masks_.level(0);
        std::fill(root, root + masks_.words(), 0);
        for (std::size_t x = 1; x < T_.size(); ++x) descend(0, x);
    }

    const std::vector<std::size_t>& best() const { return best_; }
    std::uint64_t nodes() const { return nodes_; }

private:
    bool least_in_orbit() {
        image_.resize(path_.size());
        for (const auto& p : perms_) {
            for (std::size_t i = 0; i < path_.size(); ++i) image_[i] = p[path_[i]];
            std::sort(image_.begin(), image_.end());
            if (image_ < path_) return false;
        }
        return true;
    }

    void descend(std::size_t depth, std::size_t g) {
        std::uint64_t* cur = masks_.level(depth);
        std::uint64_t* next = masks_.level(depth + 1);
        masks_.extend(T_, cur, next, g);
        // Each further term grows the sumset by at least one and zero is never in it.
        const auto reach = masks_.count(next);
        if (depth + 1 + (T_.size() - 1 - reach) <= best_.size()) return;
        path_.push_back(g);
        if (path_.size() <= kSymmetryDepth && !least_in_orbit()) {
            path_.pop_back();
            return;
        }
        ++nodes_;
        if (path_.size() > best_.size()) best_ = path_;
        for (std::size_t h = g; h < T_.size(); ++h) {
            if (MaskStack::test(next, T_.neg(h))) continue;
            descend(depth + 1, h);
        }
        path_.pop_back();
    }

    const IndexedGroup& T_;
    std::vector<std::vector<std::uint32_t>> perms_;
    MaskStack masks_;
    std::vector<std::size_t> path_;
    std::vector<std::size_t> image_;
    std::vector<std::size_t> best_;
    std::uint64_t nodes_ = 0;
};

/// Zero-sum free nondecreasing sequences of a fixed length starting with a
/// given element; each one closed by minus its sum when that is >= its max.
class MlMzssWalker {
public:
    MlMzssWalker(const IndexedGroup& T, std::size_t free_length)
        : T_(T), L_(free_length), masks_(T.size(), free_length + 1) {}

    template <typename Emit>
    void run_from(std::size_t first, Emit&& emit) {
        std::uint64_t* root = masks_.level(0);
        std::fill(root, root + masks_.words(), 0);
        path_.clear();
        descend(0, first, 0, emit);
    }

    std::uint64_t nodes() const { return nodes_; }

private:
    template <typename Emit>
    void descend(std::size_t depth, std::size_t g, std::size_t sum, Emit& emit) {
        std::uint64_t* next = masks_.level(depth + 1);
        masks_.extend(T_, masks_.level(depth), next, g);
        if (depth + 1 + (T_.size() - 1 - masks_.count(next)) < L_) return;
        ++nodes_;
        path_.push_back(g);
        sum = T_.add(sum, g);
        if (path_.size() == L_) {
            const auto closing = T_.neg(sum);
            if (closing >= g) {
                path_.push_back(closing);
                emit(std::as_const(path_));
                path_.pop_back();
            }
        } else {
            for (std::size_t h = g; h < T_.size(); ++h) {
                if (MaskStack::test(next, T_.neg(h))) continue;
                descend(depth + 1, h, sum, emit);
            }
        }
        path_.pop_back();
    }

    const IndexedGroup& T_;
    std::size_t L_;
    MaskStack masks_;
    std::vector<std::size_t> path_;
    std::uint64_t nodes_ = 0;
};

} // namespace detail

/// D(G) as one more than the longest zero-sum free sequence.
inline DavenportResult davenport(const GroupSpec& G, const Caps& caps = {}) {
    const auto start = std::chrono::steady_clock::now();
    if (static_cast<std::size_t>(G.order()) > caps.davenport_max_order) {
        throw Error(ErrorCode::CapExceeded, "davenport search capped at order " + std::to_string(caps.davenport_max_order));
    }
    const IndexedGroup T(G, std::max(caps.arithmetic_max_order, caps.davenport_max_order));
    detail::LongestZeroSumFree search(T, detail::symmetry_permutations(G, caps));
    search.run();

    std::vector<std::size_t> witness = search.best();
    std::size_t sum = 0;
    for (auto g : witness) sum = T.add(sum, g);
    witness.push_back(T.neg(sum));

    DavenportResult out;
    out.group = G;
    out.D = witness.size();
    out.witness = Sequence::from_indices(G, witness);
    out.nodes_explored = search.nodes();
    out.elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
    return out;
}

/// Streams every minimal zero-sum sequence of length D(G) exactly once, in
/// lexicographic order, as element-index lists.
///
/// Each such S is produced from U = S minus one copy of max(S): U is zero-sum
/// free (a zero-sum subsequence of U would be a proper one of S), and
/// closing U with -sigma(U) = max(S) >= max(U) is accepted. Conversely any
/// closed U is minimal by the complement argument, and a given S has exactly
/// one such U. Output order is the DFS order, independent of worker count.
inline EnumerationStats enumerate_ml_mzss_indices(const GroupSpec& G,
                                                  const std::function<void(const std::vector<std::size_t>&)>& sink,
                                                  const EnumerationOptions& opts = {}) {
    if (static_cast<std::size_t>(G.order()) > opts.caps.enumeration_max_order) {
        throw Error(ErrorCode::CapExceeded, "enumeration capped at order " + std::to_string(opts.caps.enumeration_max_order));
    }
    EnumerationStats stats;
    stats.D = opts.davenport ? *opts.davenport : davenport(G, opts.caps).D;
    const IndexedGroup T(G, std::max(opts.caps.arithmetic_max_order, opts.caps.enumeration_max_order));
    const std::size_t free_length = stats.D - 1;

    if (free_length == 0) {
        sink(std::vector<std::size_t>{0});
        stats.total = 1;
        return stats;
    }

    const std::size_t tasks = T.size() - 1;  // first element 1..size-1
    const std::size_t workers = std::max<std::size_t>(1, std::min(opts.workers, tasks));

    if (workers == 1) {
        detail::MlMzssWalker walker(T, free_length);
        for (std::size_t first = 1; first < T.size(); ++first) {
            walker.run_from(first, [&](const std::vector<std::size_t>& s) {
                ++stats.total;
                sink(s);
            });
        }
        stats.nodes = walker.nodes();
        return stats;
    }

    std::vector<std::vector<std::vector<std::size_t>>> results(tasks);
    std::vector<char> done(tasks, 0);
    std::atomic<std::size_t> next{0};
    std::atomic<std::uint64_t> nodes{0};
    std::mutex mu;
    std::condition_variable cv;
    std::exception_ptr failure;

    auto work = [&] {
        detail::MlMzssWalker walker(T, free_length);
        for (std::size_t t; (t = next.fetch_add(1)) < tasks;) {
            std::vector<std::vector<std::size_t>> local;
            try {
                walker.run_from(t + 1, [&](const std::vector<std::size_t>& s) { local.push_back(s); });
            } catch (...) {
                std::lock_guard lock(mu);
                if (!failure) failure = std::current_exception();
            }
            {
                std::lock_guard lock(mu);
                results[t] = std::move(local);
                done[t] = 1;
            }
            cv.notify_all();
        }
        nodes += walker.nodes();
    };

    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);

    for (std::size_t t = 0; t < tasks; ++t) {
        std::vector<std::vector<std::size_t>> batch;
        {
            std::unique_lock lock(mu);
            cv.wait(lock, [&] { return done[t] != 0; });
            batch = std::move(results[t]);
            if (failure) break;
        }
        for (const auto& s : batch) {
            ++stats.total;
            sink(s);
        }
    }
    pool.clear();
    if (failure) std::rethrow_exception(failure);
    stats.nodes = nodes.load();
    return stats;
}

inline EnumerationStats enumerate_ml_mzss(const GroupSpec& G, const std::function<void(const Sequence&)>& sink,
                                          const EnumerationOptions& opts = {}) {
    return enumerate_ml_mzss_indices(
        G, [&](const std::vector<std::size_t>& s) { sink(Sequence::from_indices(G, s)); }, opts);
}

inline std::vector<Sequence> enumerate_ml_mzss(const GroupSpec& G, const EnumerationOptions& opts = {}) {
    std::vector<Sequence> out;
    enumerate_ml_mzss(G, [&](const Sequence& s) { out.push_back(s); }, opts);
    return out;
}

/// Least image of a sequence under Aut(G).
class Canonicalizer {
public:
    explicit Canonicalizer(const GroupSpec& G, const Caps& caps = {})
        : group_(G), perms_(automorphism_permutations(G, caps)) {}

    std::vector<std::size_t> canonical_indices(std::span<const std::size_t> idx) const {
        std::vector<std::size_t> best(idx.begin(), idx.end());
        std::sort(best.begin(), best.end());
        std::vector<std::size_t> img(idx.size());
        for (const auto& p : perms_) {
            for (std::size_t i = 0; i < idx.size(); ++i) img[i] = p[idx[i]];
            std::sort(img.begin(), img.end());
            if (img < best) best = img;
        }
        return best;
    }

    Sequence operator()(const Sequence& S) const {
        if (!(S.group() == group_)) throw Error(ErrorCode::GroupMismatch, "canonicalize: wrong group");
        return Sequence::from_indices(group_, canonical_indices(S.indices()));
    }

private:
    GroupSpec group_;
    std::vector<std::vector<std::uint32_t>> perms_;
};

inline Sequence canonicalize(const GroupSpec& G, const Sequence& S, const Caps& caps = {}) {
    return Canonicalizer(G, caps)(S);
}

inline EnumerationReport count_ml_mzss(const GroupSpec& G, const EnumerationOptions& opts = {}) {
    const auto start = std::chrono::steady_clock::now();
    const Canonicalizer canon(G, opts.caps);
    std::set<std::vector<std::size_t>> orbits;
    const auto stats = enumerate_ml_mzss_indices(
        G, [&](const std::vector<std::size_t>& s) { orbits.insert(canon.canonical_indices(s)); }, opts);

    EnumerationReport rep;
    rep.group = G;
    rep.length = stats.D;
    rep.total_count = stats.total;
    rep.orbit_count = orbits.size();
    for (const auto& o : orbits) rep.orbit_representatives.push_back(Sequence::from_indices(G, o));
    rep.nodes = stats.nodes;
    rep.elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
    return rep;
}

} // namespace zerosum

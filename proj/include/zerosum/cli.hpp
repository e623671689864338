#pragma once

#include <cstdlib>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "zerosum/io.hpp"
#include "zerosum/search.hpp"
#include "zerosum/sequence.hpp"
#include "zerosum/structure.hpp"

namespace zerosum::cli {

enum ExitCode : int {
    kOk = 0,
    kViolations = 1,
    kUsage = 2,
    kCapExceeded = 3,
};

struct CliConfig {
    GroupSpec group;
    Caps caps;
    std::size_t workers = 1;
    std::uint64_t seed = 0;
    OutputFormat output = OutputFormat::Json;
    bool include_timing = true;
};

namespace detail {

inline std::optional<std::size_t> env_cap() {
    const char* raw = std::getenv("ZEROSUM_CAP_ORDER");
    if (!raw || !*raw) return std::nullopt;
    try {
        std::size_t used = 0;
        const auto v = std::stoull(raw, &used);
        if (used != std::string(raw).size() || v == 0) throw std::invalid_argument(raw);
        return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
        throw Error(ErrorCode::BadParams, std::string("ZEROSUM_CAP_ORDER must be a positive integer, got '") + raw + "'");
    }
}

} // namespace detail

/// Entry point shared by the binary and the tests. Data goes to `out`,
/// diagnostics to `err`.
inline int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Davenport constants and maximal-length minimal zero-sum sequences over finite abelian groups",
                 "zerosum"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string group_text, sequence_text, output_text = "json";
    std::size_t workers = 1;
    std::optional<std::size_t> cap;
    bool no_timing = false, canonical = false;
    std::int64_t m = 0, n = 0, t = 0;
    std::uint64_t trials = 10000, seed = 0;

    app.add_option("--workers", workers, "Worker threads for enumeration")->check(CLI::PositiveNumber);
    app.add_option("--cap", cap, "Override the group-order caps for enumeration and davenport")
        ->check(CLI::PositiveNumber);
    app.add_option("--output", output_text, "Report format")->check(CLI::IsMember({"json", "csv", "text"}));
    app.add_flag("--no-timing", no_timing, "Write elapsed_ms as 0 (for golden comparisons)");

    auto* dav = app.add_subcommand("davenport", "Compute D(G) by exhaustive search");
    dav->add_option("--group", group_text, "Invariant factors, e.g. 2,4")->required();

    auto* en = app.add_subcommand("enumerate", "Stream every maximal-length minimal zero-sum sequence");
    en->add_option("--group", group_text, "Invariant factors")->required();
    en->add_flag("--canonical", canonical, "Emit one canonical representative per automorphism orbit");

    auto* cl = app.add_subcommand("classify", "Match a sequence against the two rank-two families");
    cl->add_option("--group", group_text, "Invariant factors")->required();
    cl->add_option("--sequence", sequence_text, "Sequence text, e.g. \"[0,1]^3 [1,2] [1,3]\"")->required();

    auto* ver = app.add_subcommand("verify", "Exhaustive and randomized checks");
    ver->require_subcommand(1);
    auto* vb = ver->add_subcommand("property-b", "Every ml-mzss over C_m^2 has an element of multiplicity >= m-1");
    vb->add_option("--m", m)->required();
    auto* vc = ver->add_subcommand("cyclic", "ml-mzss over C_n are exactly e^n with e a generator");
    vc->add_option("--n", n)->required();
    auto* ve = ver->add_subcommand("egz", "Random 2n-1 term sequences over C_n hold n terms summing to zero");
    ve->add_option("--n", n)->required();
    ve->add_option("--trials", trials);
    ve->add_option("--seed", seed);
    auto* vt = ver->add_subcommand("theorem", "Enumerate and classify every ml-mzss over a rank-two group");
    vt->add_option("--group", group_text, "Invariant factors")->required();
    auto* vm = ver->add_subcommand("tm1", "Structure of zero-sum sequences of length tm-1 over C_m^2");
    vm->add_option("--m", m)->required();
    vm->add_option("--t", t)->required();

    std::vector<std::string> reversed(argv.rbegin(), argv.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        CliConfig cfg;
        cfg.workers = workers;
        cfg.seed = seed;
        cfg.include_timing = !no_timing;
        cfg.output = output_text == "csv" ? OutputFormat::Csv : output_text == "text" ? OutputFormat::Text : OutputFormat::Json;
        if (auto e = detail::env_cap()) cfg.caps.enumeration_max_order = *e;
        if (cap) {
            cfg.caps.enumeration_max_order = *cap;
            cfg.caps.davenport_max_order = *cap;
            cfg.caps.arithmetic_max_order = std::max(cfg.caps.arithmetic_max_order, *cap);
            cfg.caps.automorphism_max_order = std::max(cfg.caps.automorphism_max_order, *cap);
        }
        const RenderOptions render_opts{cfg.output, cfg.include_timing};
        EnumerationOptions enum_opts;
        enum_opts.workers = cfg.workers;
        enum_opts.caps = cfg.caps;

        auto emit_report = [&](const VerificationReport& rep) {
            out << render(to_json(rep, render_opts), cfg.output);
            return rep.verdict ? kOk : kViolations;
        };

        if (dav->parsed()) {
            cfg.group = GroupSpec::parse(group_text);
            out << render(to_json(davenport(cfg.group, cfg.caps), render_opts), cfg.output);
            return kOk;
        }
        if (en->parsed()) {
            cfg.group = GroupSpec::parse(group_text);
            const Stopwatch clock;
            if (static_cast<std::size_t>(cfg.group.order()) > cfg.caps.enumeration_max_order) {
                throw Error(ErrorCode::CapExceeded,
                            "enumeration capped at order " + std::to_string(cfg.caps.enumeration_max_order));
            }
            const Canonicalizer canon(cfg.group, cfg.caps);
            std::set<std::vector<std::size_t>> orbits;
            const auto stats = enumerate_ml_mzss_indices(
                cfg.group,
                [&](const std::vector<std::size_t>& s) {
                    if (!canonical) out << Sequence::from_indices(cfg.group, s).to_string() << '\n';
                    orbits.insert(canon.canonical_indices(s));
                },
                enum_opts);
            EnumerationReport rep;
            rep.group = cfg.group;
            rep.length = stats.D;
            rep.total_count = stats.total;
            rep.orbit_count = orbits.size();
            for (const auto& o : orbits) rep.orbit_representatives.push_back(Sequence::from_indices(cfg.group, o));
            if (canonical) {
                for (const auto& r : rep.orbit_representatives) out << r.to_string() << '\n';
            }
            rep.nodes = stats.nodes;
            rep.elapsed = clock.elapsed();
            out << render(to_json(rep, render_opts), cfg.output);
            return kOk;
        }
        if (cl->parsed()) {
            cfg.group = GroupSpec::parse(group_text);
            const auto S = parse_sequence(cfg.group, sequence_text);
            const auto result = classify(cfg.group, S, cfg.caps);
            out << render(to_json(cfg.group, S, result), cfg.output);
            return kOk;
        }
        if (vb->parsed()) return emit_report(check_property_b(m, enum_opts));
        if (vc->parsed()) return emit_report(check_cyclic_inverse(n, enum_opts));
        if (ve->parsed()) return emit_report(egz_property(n, trials, cfg.seed, cfg.caps));
        if (vt->parsed()) {
            cfg.group = GroupSpec::parse(group_text);
            return emit_report(verify_theorem(cfg.group, enum_opts));
        }
        if (vm->parsed()) return emit_report(tm1_structure_check(m, t, cfg.caps));
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return e.code() == ErrorCode::CapExceeded ? kCapExceeded : kUsage;
    }
    err << app.help();
    return kUsage;
}

inline int run(int argc, char** argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args, out, err);
}

} // namespace zerosum::cli

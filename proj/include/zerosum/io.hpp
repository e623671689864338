#pragma once

#include <string>
#include <string_view>

#include "json.hpp"
#include "zerosum/search.hpp"
#include "zerosum/structure.hpp"
#include "zerosum/verification.hpp"

namespace zerosum {

using Json = nlohmann::ordered_json;

enum class OutputFormat { Json, Csv, Text };

/// Timing is the only nondeterministic field; golden comparisons drop it by
/// rendering with include_timing = false, which pins elapsed_ms to 0.
struct RenderOptions {
    OutputFormat format = OutputFormat::Json;
    bool include_timing = true;
};

inline std::int64_t timing_ms(std::chrono::milliseconds ms, const RenderOptions& opts) {
    return opts.include_timing ? static_cast<std::int64_t>(ms.count()) : 0;
}

inline Json to_json(const DavenportResult& r, const RenderOptions& opts = {}) {
    Json j;
    j["group"] = r.group.to_string();
    j["D"] = r.D;
    j["witness"] = r.witness.to_string();
    j["elapsed_ms"] = timing_ms(r.elapsed, opts);
    j["nodes"] = r.nodes_explored;
    return j;
}

inline Json to_json(const EnumerationReport& r, const RenderOptions& opts = {}) {
    Json j;
    j["group"] = r.group.to_string();
    j["D"] = r.length;
    j["total"] = r.total_count;
    j["orbits"] = r.orbit_count;
    auto reps = Json::array();
    for (const auto& s : r.orbit_representatives) reps.push_back(s.to_string());
    j["representatives"] = std::move(reps);
    j["elapsed_ms"] = timing_ms(r.elapsed, opts);
    j["nodes"] = r.nodes;
    return j;
}

inline Json to_json(const VerificationReport& r, const RenderOptions& opts = {}) {
    Json j;
    j["check"] = r.check;
    j["params"] = r.params;
    j["checked"] = r.checked;
    j["violations"] = r.violations;
    j["verdict"] = r.verdict;
    j["elapsed_ms"] = timing_ms(r.elapsed, opts);
    j["details"] = r.details;
    return j;
}

inline Json to_json(const Type1Witness& w) {
    Json j;
    j["e1"] = w.e1.to_string();
    j["e2"] = w.e2.to_string();
    j["j"] = w.j;
    j["x"] = w.x;
    return j;
}

inline Json to_json(const Type2Witness& w) {
    Json j;
    j["g1"] = w.g1.to_string();
    j["g2"] = w.g2.to_string();
    j["s"] = w.s;
    j["x"] = w.x;
    return j;
}

inline Json to_json(const GroupSpec& G, const Sequence& S, const ClassificationResult& r) {
    Json j;
    j["group"] = G.to_string();
    j["sequence"] = S.to_string();
    j["is_type1"] = r.is_type1;
    auto w1 = Json::array();
    for (const auto& w : r.type1_witnesses) w1.push_back(to_json(w));
    j["type1_witnesses"] = std::move(w1);
    j["is_type2"] = r.is_type2;
    auto w2 = Json::array();
    for (const auto& w : r.type2_witnesses) w2.push_back(to_json(w));
    j["type2_witnesses"] = std::move(w2);
    return j;
}

namespace detail {

inline std::string scalar_text(const Json& v) {
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
}

inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

} // namespace detail

/// CSV: a header row of the report's top-level keys, then one row of values.
/// Nested arrays and objects are written as compact JSON. CRLF line ends.
inline std::string render_csv(const Json& j) {
    std::string header, row;
    bool first = true;
    for (const auto& [key, value] : j.items()) {
        if (!first) {
            header += ',';
            row += ',';
        }
        first = false;
        header += detail::csv_field(key);
        row += detail::csv_field(detail::scalar_text(value));
    }
    return header + "\r\n" + row + "\r\n";
}

inline std::string render_text(const Json& j) {
    std::string out;
    for (const auto& [key, value] : j.items()) out += key + ": " + detail::scalar_text(value) + "\n";
    return out;
}

inline std::string render(const Json& j, OutputFormat format) {
    switch (format) {
    case OutputFormat::Csv: return render_csv(j);
    case OutputFormat::Text: return render_text(j);
    case OutputFormat::Json: break;
    }
    return j.dump() + "\n";
}

} // namespace zerosum

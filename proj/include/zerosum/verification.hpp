#pragma once

#include <chrono>
#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace zerosum {

/// Outcome of an exhaustive or randomized check. `details` holds
/// check-specific data (per-sequence witnesses, match counts, ...).
struct VerificationReport {
    std::string check;
    nlohmann::ordered_json params = nlohmann::ordered_json::object();
    std::uint64_t checked = 0;
    std::vector<std::string> violations;
    bool verdict = true;
    std::chrono::milliseconds elapsed{0};
    nlohmann::ordered_json details = nlohmann::ordered_json::object();
};

class Stopwatch {
public:
    std::chrono::milliseconds elapsed() const {
        return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start_);
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

} // namespace zerosum

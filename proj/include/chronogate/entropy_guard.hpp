#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace chronogate::entropy {

struct EntropyReport {
    double bits_per_byte = 0.0;  // in [0, 8]
    std::size_t length = 0;
    bool flagged = false;
    double threshold = 0.0;
    std::size_t offset = 0;
};

struct StreamReport {
    std::vector<EntropyReport> windows;
    EntropyReport overall;
};

constexpr double kDefaultThreshold = 7.0;
constexpr std::size_t kDefaultWindow = 4096;

// Frequency-based Shannon entropy over byte values; empty input is 0.
double shannon_entropy(std::span<const std::uint8_t> data);

// Tumbling windows. A final partial window is reported but only flagged when
// it is at least half a window long.
StreamReport classify_stream(std::span<const std::uint8_t> data,
                             double threshold = kDefaultThreshold,
                             std::size_t window = kDefaultWindow);

}  // namespace chronogate::entropy

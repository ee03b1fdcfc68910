#include "chronogate/entropy_guard.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace chronogate::entropy {

double shannon_entropy(std::span<const std::uint8_t> data) {
    if (data.empty()) return 0.0;
    std::array<std::size_t, 256> counts{};
    for (std::uint8_t b : data) ++counts[b];
    const double n = static_cast<double>(data.size());
    double h = 0.0;
    for (std::size_t c : counts) {
        if (c == 0) continue;
        const double p = static_cast<double>(c) / n;
        h -= p * std::log2(p);
    }
    return h;
}

StreamReport classify_stream(std::span<const std::uint8_t> data, double threshold,
                             std::size_t window) {
    if (window < 256) throw std::invalid_argument("window must be at least 256 bytes");
    StreamReport report;
    for (std::size_t off = 0; off < data.size(); off += window) {
        const std::size_t len = std::min(window, data.size() - off);
        EntropyReport w;
        w.offset = off;
        w.length = len;
        w.threshold = threshold;
        w.bits_per_byte = shannon_entropy(data.subspan(off, len));
        w.flagged = w.bits_per_byte >= threshold && len >= window / 2;
        report.windows.push_back(w);
    }
    report.overall.length = data.size();
    report.overall.threshold = threshold;
    report.overall.bits_per_byte = shannon_entropy(data);
    report.overall.flagged =
        report.overall.bits_per_byte >= threshold && data.size() >= window / 2;
    return report;
}

}  // namespace chronogate::entropy

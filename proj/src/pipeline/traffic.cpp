#include <istream>
#include <ostream>
#include <stdexcept>

#include "rollbreak/pipeline.hpp"

namespace rollbreak {

SegmentTrace segment_requests(std::span<const std::uint64_t> request_sizes, std::uint32_t mss) {
    if (mss == 0) throw std::invalid_argument("mss must be positive");
    SegmentTrace t;
    t.mss = mss;
    for (auto r : request_sizes) {
        if (r == 0) throw std::invalid_argument("request sizes must be positive");
        t.sizes.insert(t.sizes.end(), r / mss, mss);
        if (r % mss) t.sizes.push_back(static_cast<std::uint32_t>(r % mss));
    }
    return t;
}

std::vector<RecoveredRequest> recover_request_sizes(const SegmentTrace& trace) {
    std::vector<RecoveredRequest> out;
    std::uint64_t acc = 0;
    for (auto s : trace.sizes) {
        acc += s;
        if (s < trace.mss) {
            out.push_back({acc, true, {}});
            acc = 0;
        }
    }
    if (acc) {
        RecoveredRequest r{acc, false, {}};
        for (std::uint64_t c = trace.mss; c <= acc; c += trace.mss) r.candidates.push_back(c);
        out.push_back(std::move(r));
    }
    return out;
}

void write_trace(std::ostream& os, const SegmentTrace& trace) {
    os << "mss=" << trace.mss << '\n';
    for (auto s : trace.sizes) os << s << '\n';
}

SegmentTrace read_trace(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line.rfind("mss=", 0) != 0) throw FormatError("trace: missing mss header");
    auto num = [](const std::string& s) -> std::uint64_t {
        if (s.empty() || s.size() > 10 || s.find_first_not_of("0123456789") != std::string::npos)
            throw FormatError("trace: bad integer '" + s + "'");
        return std::stoull(s);
    };
    SegmentTrace t;
    const auto mss = num(line.substr(4));
    if (mss == 0 || mss > UINT32_MAX) throw FormatError("trace: mss out of range");
    t.mss = static_cast<std::uint32_t>(mss);
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto v = num(line);
        if (v == 0 || v > t.mss) throw FormatError("trace: segment size outside (0, mss]");
        t.sizes.push_back(static_cast<std::uint32_t>(v));
    }
    return t;
}

}  // namespace rollbreak

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>

#include "rollbreak/leakage.hpp"

namespace rollbreak {
namespace {

std::uint64_t parse_u64(const std::string& s) {
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
        throw FormatError("fingerprint: expected unsigned integer, got '" + s + "'");
    try {
        return std::stoull(s);
    } catch (const std::exception&) {
        throw FormatError("fingerprint: integer out of range: " + s);
    }
}

}  // namespace

FingerprintIndex fingerprint_build(const ObservationLog& corpus, std::size_t depth) {
    if (depth == 0) throw std::invalid_argument("fingerprint depth must be positive");
    FingerprintIndex idx;
    idx.depth = depth;
    std::map<std::uint64_t, LengthKey> keys;
    for (const auto& r : corpus.records) {
        auto& k = keys[r.archive_id];
        if (r.index < depth) {
            if (k.size() <= r.index) k.resize(r.index + 1, 0);
            k[r.index] = r.clen;
        }
    }
    for (auto& [id, k] : keys) idx.keys[k].push_back(id);
    for (auto& [k, ids] : idx.keys) std::sort(ids.begin(), ids.end());
    return idx;
}

std::vector<std::uint64_t> fingerprint_match(const FingerprintIndex& index, std::span<const std::uint64_t> observed) {
    LengthKey k(observed.begin(), observed.begin() + static_cast<std::ptrdiff_t>(std::min(observed.size(), index.depth)));
    auto it = index.keys.find(k);
    if (it == index.keys.end()) return {};
    return it->second;
}

FingerprintStats fingerprint_stats(const FingerprintIndex& index) {
    FingerprintStats s;
    s.keys = index.keys.size();
    for (const auto& [k, ids] : index.keys) {
        s.files += ids.size();
        if (ids.size() == 1) ++s.singleton_files;
    }
    return s;
}

void write_fingerprint_csv(std::ostream& os, const FingerprintIndex& index) {
    os << "lengths,file\n";
    for (const auto& [k, ids] : index.keys) {
        std::string key;
        for (std::size_t i = 0; i < k.size(); ++i) {
            if (i) key += ':';
            key += std::to_string(k[i]);
        }
        for (auto id : ids) os << key << ',' << id << '\n';
    }
}

FingerprintIndex read_fingerprint_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line != "lengths,file") throw FormatError("fingerprint: missing header");
    FingerprintIndex idx;
    idx.depth = 0;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        auto comma = line.find(',');
        if (comma == std::string::npos) throw FormatError("fingerprint: bad line '" + line + "'");
        LengthKey k;
        std::istringstream ks(line.substr(0, comma));
        std::string part;
        while (std::getline(ks, part, ':')) k.push_back(parse_u64(part));
        if (k.empty()) throw FormatError("fingerprint: empty key");
        idx.depth = std::max(idx.depth, k.size());
        idx.keys[k].push_back(parse_u64(line.substr(comma + 1)));
    }
    for (auto& [k, ids] : idx.keys) std::sort(ids.begin(), ids.end());
    if (idx.depth == 0) idx.depth = 1;
    return idx;
}

}  // namespace rollbreak

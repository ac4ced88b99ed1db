#include <algorithm>
#include <istream>
#include <map>
#include <ostream>
#include <set>

#include "rollbreak/pipeline.hpp"

namespace rollbreak {
namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::size_t from = 0;
    for (;;) {
        auto at = s.find(sep, from);
        out.push_back(s.substr(from, at == std::string::npos ? std::string::npos : at - from));
        if (at == std::string::npos) break;
        from = at + 1;
    }
    return out;
}

std::uint64_t parse_u64(const std::string& s, const char* what) {
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos || s.size() > 19)
        throw FormatError(std::string("observations: bad ") + what + " '" + s + "'");
    return std::stoull(s);
}

}  // namespace

std::vector<Observation> ObservationLog::archive(std::uint64_t archive_id) const {
    std::vector<Observation> out;
    for (const auto& r : records) {
        if (r.archive_id == archive_id) out.push_back(r);
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.index < b.index; });
    return out;
}

std::vector<std::uint64_t> ObservationLog::archive_ids() const {
    std::vector<std::uint64_t> ids;
    for (const auto& r : records) {
        if (std::find(ids.begin(), ids.end(), r.archive_id) == ids.end()) ids.push_back(r.archive_id);
    }
    return ids;
}

Bytes encrypt_stub(ByteView data, std::uint64_t key, std::uint64_t nonce) {
    // NOT encryption: a keyed XOR mask that only preserves length.
    Rng rng(derive_seed(key, nonce));
    Bytes out(data.begin(), data.end());
    std::uint64_t word = 0;
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (i % 8 == 0) word = rng();
        out[i] ^= static_cast<std::uint8_t>(word >> (8 * (i % 8)));
    }
    return out;
}

std::vector<ChunkRecord> observe_archive(ObservationLog& log, const ChunkerParams& params,
                                         const CompressionModel& model, ByteView stream, std::uint64_t archive_id,
                                         const ObserveOptions& opts) {
    if (log.records.empty()) {
        log.scheme = scheme_of(params);
        log.compressor = std::string(model.name());
    } else if (log.scheme != scheme_of(params) || log.compressor != model.name()) {
        throw std::invalid_argument("observe: log already holds a different scheme or compressor");
    }
    for (const auto& r : log.records) {
        if (r.archive_id == archive_id) throw std::invalid_argument("observe: archive id already present");
    }
    auto recs = chunk(params, stream);
    for (std::size_t i = 0; i < recs.size(); ++i) {
        const auto piece = stream.subspan(recs[i].start, recs[i].length());
        const auto sealed = encrypt_stub(model.compress(piece), opts.key, (archive_id << 32) ^ i);
        Observation o{archive_id, i, sealed.size(), std::nullopt};
        if (opts.record_ulen) o.ulen = piece.size();
        log.records.push_back(o);
    }
    return recs;
}

void write_observations(std::ostream& os, const ObservationLog& log) {
    os << "archive=" << log.label << ",scheme=" << to_string(log.scheme) << ",profile=" << log.profile
       << ",compressor=" << log.compressor << '\n';
    for (const auto& r : log.records) {
        os << r.archive_id << ',' << r.index << ',' << r.clen;
        if (r.ulen) os << ',' << *r.ulen;
        os << '\n';
    }
}

ObservationLog read_observations(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw FormatError("observations: missing header");
    ObservationLog log;
    std::set<std::string> seen;
    for (const auto& kv : split(line, ',')) {
        auto eq = kv.find('=');
        if (eq == std::string::npos) throw FormatError("observations: malformed header field '" + kv + "'");
        auto key = kv.substr(0, eq), val = kv.substr(eq + 1);
        if (key == "archive") {
            log.label = val;
        } else if (key == "scheme") {
            try {
                log.scheme = parse_scheme(val);
            } catch (const std::invalid_argument& e) {
                throw FormatError(e.what());
            }
        } else if (key == "profile") {
            log.profile = val;
        } else if (key == "compressor") {
            try {
                log.compressor = std::string(compression_model(val).name());
            } catch (const std::invalid_argument& e) {
                throw FormatError(e.what());
            }
        } else {
            throw FormatError("observations: unknown header field '" + key + "'");
        }
        seen.insert(key);
    }
    if (seen.size() != 4) throw FormatError("observations: incomplete header");
    std::map<std::uint64_t, std::uint64_t> next_index;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        auto parts = split(line, ',');
        if (parts.size() != 3 && parts.size() != 4) throw FormatError("observations: bad line '" + line + "'");
        Observation o;
        o.archive_id = parse_u64(parts[0], "archive id");
        o.index = parse_u64(parts[1], "index");
        o.clen = parse_u64(parts[2], "length");
        if (parts.size() == 4) o.ulen = parse_u64(parts[3], "length");
        if (o.clen == 0) throw FormatError("observations: zero compressed length");
        if (o.index != next_index[o.archive_id]++) throw FormatError("observations: indices not dense");
        log.records.push_back(o);
    }
    return log;
}

}  // namespace rollbreak

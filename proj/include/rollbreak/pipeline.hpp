#pragma once
// The client-to-server data path: chunk, compress, length-preserving
// encrypt; plus what an observer sees (length logs, TCP segment traces,
// storage growth under deduplication).

#include <cstring>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <unordered_set>

#include "rollbreak/chunkers.hpp"
#include "rollbreak/util.hpp"

namespace rollbreak {

// ---------------------------------------------------------------------------
// Compression

class CompressionModel {
public:
    virtual ~CompressionModel() = default;
    virtual std::string_view name() const = 0;
    virtual Bytes compress(ByteView data) const = 0;
    /// Throws FormatError on malformed input.
    virtual Bytes decompress(ByteView data) const = 0;
    virtual std::uint64_t compressed_size(ByteView data) const { return compress(data).size(); }
    /// sizes[L] = |compress(data[0..L))| for L in [0, data.size()].
    virtual std::vector<std::uint64_t> prefix_sizes(ByteView data) const = 0;
    /// Bound on how far a prefix's compressed size can drop when the prefix
    /// grows; lets scans stop once the size exceeds target + slack.
    virtual std::uint64_t prefix_slack() const = 0;
    /// All L in [lmin, min(lmax, data.size())] with |compress(data[0..L))| = clen, ascending.
    virtual std::vector<std::uint64_t> matching_prefixes(ByteView data, std::uint64_t clen, std::uint64_t lmin,
                                                         std::uint64_t lmax) const = 0;
};

/// "identity" or "toy-rle". Throws std::invalid_argument otherwise.
const CompressionModel& compression_model(std::string_view name);
std::vector<std::string_view> compression_model_names();

Bytes compress_toy_rle(ByteView data);
Bytes decompress_toy_rle(ByteView data);

/// Candidate uncompressed lengths of the chunk starting at `start` whose
/// compressed length is `observed_clen`. Empty when nothing fits.
std::vector<std::uint64_t> enumerate_prefix_lengths(ByteView known, std::uint64_t start, std::uint64_t observed_clen,
                                                    const CompressionModel& model, std::uint64_t lmin,
                                                    std::uint64_t lmax);

// ---------------------------------------------------------------------------
// Observation

struct Observation {
    std::uint64_t archive_id = 0;
    std::uint64_t index = 0;
    std::uint64_t clen = 0;
    std::optional<std::uint64_t> ulen;
    bool operator==(const Observation&) const = default;
};

struct ObservationLog {
    std::string label = "a";
    Scheme scheme = Scheme::borg;
    std::string profile;
    std::string compressor = "identity";
    std::vector<Observation> records;

    /// Records of one archive, in index order.
    std::vector<Observation> archive(std::uint64_t archive_id) const;
    std::vector<std::uint64_t> archive_ids() const;
};

struct ObserveOptions {
    /// Include uncompressed lengths (server with plaintext-length metadata).
    bool record_ulen = false;
    std::uint64_t key = 0x5eed;
};

/// Insecure keyed byte mask; stands in for length-preserving encryption.
Bytes encrypt_stub(ByteView data, std::uint64_t key, std::uint64_t nonce);

/// Appends the archive's observations to `log` and returns the chunk records.
std::vector<ChunkRecord> observe_archive(ObservationLog& log, const ChunkerParams& params,
                                         const CompressionModel& model, ByteView stream, std::uint64_t archive_id,
                                         const ObserveOptions& opts = {});

void write_observations(std::ostream& os, const ObservationLog& log);
/// Throws FormatError.
ObservationLog read_observations(std::istream& is);

// ---------------------------------------------------------------------------
// Traffic

struct SegmentTrace {
    std::uint32_t mss = 1460;
    std::vector<std::uint32_t> sizes;
};

struct RecoveredRequest {
    std::uint64_t size = 0;
    bool exact = true;
    /// For inexact groups: every multiple of mss up to `size` that the final
    /// request could have had.
    std::vector<std::uint64_t> candidates;
    bool operator==(const RecoveredRequest&) const = default;
};

/// Throws std::invalid_argument for zero sizes or mss.
SegmentTrace segment_requests(std::span<const std::uint64_t> request_sizes, std::uint32_t mss);
std::vector<RecoveredRequest> recover_request_sizes(const SegmentTrace& trace);

void write_trace(std::ostream& os, const SegmentTrace& trace);
SegmentTrace read_trace(std::istream& is);

// ---------------------------------------------------------------------------
// Deduplication

struct DigestHash {
    std::size_t operator()(const Digest& d) const noexcept {
        std::size_t h;
        std::memcpy(&h, d.data(), sizeof h);
        return h;
    }
};

class DedupStore {
public:
    explicit DedupStore(std::uint64_t per_chunk_overhead = 0) : overhead_(per_chunk_overhead) {}
    /// Returns the storage growth caused by this chunk.
    std::uint64_t put(ByteView chunk);
    bool contains(ByteView chunk) const;
    /// False means no stored chunk has this length; true is inconclusive.
    bool may_contain_length(std::uint64_t length) const { return lengths_.count(length) != 0; }
    std::uint64_t total() const { return total_; }
    std::uint64_t overhead() const { return overhead_; }
    std::size_t chunk_count() const { return digests_.size(); }

private:
    std::uint64_t overhead_;
    std::uint64_t total_ = 0;
    std::unordered_set<Digest, DigestHash> digests_;
    std::unordered_set<std::uint64_t> lengths_;
};

/// Stores every chunk; returns the new bytes accepted.
std::uint64_t dedup_archive(DedupStore& store, std::span<const Bytes> chunks);
/// Chunks `stream` with `params`, then stores the pieces.
std::uint64_t dedup_archive(DedupStore& store, const ChunkerParams& params, ByteView stream);

struct DedupOracleResult {
    std::optional<std::uint64_t> boundary;
    std::uint64_t probes = 0;
};

/// Archives query||X for queries builder[0..l), l = 1, 2, ..., against
/// copies of `primed` (which already holds X), and reports the first l at
/// which X deduplicates, i.e. a chunk ends exactly at the end of the query.
/// `builder` must supply at least max_chunk bytes. X must be shorter than
/// min_clash_length so that it always remains a single chunk.
DedupOracleResult dedup_boundary_oracle(const DedupStore& primed, const ChunkerParams& params, ByteView x,
                                        ByteView builder);

}  // namespace rollbreak

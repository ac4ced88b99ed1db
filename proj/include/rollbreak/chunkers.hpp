#pragma once
// The three content-defined chunkers: Tarsnap-style running hash, Borg
// Buzhash and Restic Rabin fingerprint. Each is a streaming state machine
// (feed bytes, drain records) with a one-shot convenience wrapper.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "rollbreak/gf2.hpp"

namespace rollbreak {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

enum class Scheme { tarsnap, borg, restic };
std::string_view to_string(Scheme s);
/// Throws std::invalid_argument for unknown names.
Scheme parse_scheme(std::string_view name);

struct ScaleProfile {
    std::string name;
    unsigned prime_bits;
    std::uint32_t tarsnap_mu;
    std::uint32_t tarsnap_max;
    unsigned rabin_degree;
    std::uint32_t rabin_window;
    unsigned buzhash_width;
    std::uint32_t buzhash_window;
    unsigned mask_bits;
    std::uint64_t min_chunk;
    std::uint64_t max_chunk;
};

/// "full", "desk" or "tiny". Throws std::invalid_argument otherwise.
const ScaleProfile& profile(std::string_view name);
std::vector<std::string_view> profile_names();

/// The 17 largest primes <= 2^bits, descending.
std::vector<std::uint32_t> canonical_primes(unsigned bits);
bool is_prime_u32(std::uint32_t n);

enum class Cause { clash, max_size, end_of_data };
std::string_view to_string(Cause c);
Cause parse_cause(std::string_view s);

struct ChunkRecord {
    std::uint64_t start = 0;
    std::uint64_t end = 0;  // exclusive
    Cause cause = Cause::end_of_data;
    /// Tarsnap clashes: chunk-relative position K of the matched earlier hash.
    std::optional<std::uint64_t> matched;

    std::uint64_t length() const { return end - start; }
    bool operator==(const ChunkRecord&) const = default;
};

struct TarsnapParams {
    std::uint32_t p = 0;
    std::uint32_t alpha = 0;
    std::array<std::uint32_t, 256> x{};
    std::uint32_t mu = 0;
    std::uint32_t max_chunk = 0;
    bool operator==(const TarsnapParams&) const = default;
};

struct BuzhashParams {
    std::array<std::uint64_t, 256> table{};
    unsigned width = 32;
    std::uint32_t window = 4095;
    unsigned mask_bits = 21;
    std::uint64_t min_chunk = std::uint64_t{1} << 19;
    std::uint64_t max_chunk = std::uint64_t{1} << 23;
    bool operator==(const BuzhashParams&) const = default;
};

struct RabinParams {
    GF2Poly poly;
    std::uint32_t window_bytes = 64;
    unsigned mask_bits = 21;
    std::uint64_t min_chunk = std::uint64_t{1} << 19;
    std::uint64_t max_chunk = std::uint64_t{1} << 23;
    bool operator==(const RabinParams&) const = default;
};

using ChunkerParams = std::variant<TarsnapParams, BuzhashParams, RabinParams>;

Scheme scheme_of(const ChunkerParams& p);
std::uint64_t max_chunk_of(const ChunkerParams& p);
/// Smallest chunk length at which a clash can fire.
std::uint64_t min_clash_length(const ChunkerParams& p);

/// Throws std::invalid_argument when an invariant is violated.
void validate(const TarsnapParams& p);
void validate(const BuzhashParams& p);
void validate(const RabinParams& p);
void validate(const ChunkerParams& p);

/// Multiplicative order of alpha mod p is greater than `bound`.
bool order_exceeds(std::uint32_t alpha, std::uint32_t p, std::uint32_t bound);

TarsnapParams tarsnap_keygen(std::uint64_t seed, const ScaleProfile& prof);
BuzhashParams borg_keygen(std::uint64_t seed, const ScaleProfile& prof);
RabinParams restic_keygen(std::uint64_t seed, const ScaleProfile& prof);
ChunkerParams keygen(Scheme scheme, std::uint64_t seed, const ScaleProfile& prof);

/// Window width of the rolling hash (0 for Tarsnap, which has none).
std::uint32_t window_of(const ChunkerParams& p);

// ---------------------------------------------------------------------------
// Hash primitives (direct, non-rolling forms)

/// XOR of rotated table entries; the oldest byte is rotated the most.
std::uint64_t buzhash(ByteView window, const std::array<std::uint64_t, 256>& table, unsigned width);
/// The window bytes as a polynomial, first bit of the first byte highest.
GF2Poly rabin_window_poly(ByteView window);
std::uint64_t rabin_fingerprint(ByteView window, const GF2Poly& poly);
/// Sum_{i} alpha^i x[b_i] mod p over the string, exponents starting at `first_exp`.
std::uint32_t tarsnap_sum(ByteView s, const TarsnapParams& p, std::uint64_t first_exp);
std::uint32_t powmod_u32(std::uint32_t base, std::uint64_t exp, std::uint32_t mod);

// ---------------------------------------------------------------------------
// Streaming chunkers

class Chunker {
public:
    virtual ~Chunker() = default;
    virtual void feed(ByteView data) = 0;
    /// Records completed so far; clears the internal queue.
    std::vector<ChunkRecord> drain();
    /// Flushes the end-of-data tail and returns all undrained records.
    std::vector<ChunkRecord> finish();
    std::uint64_t position() const { return pos_; }

protected:
    void emit(Cause c, std::optional<std::uint64_t> matched = std::nullopt);
    std::uint64_t pos_ = 0;
    std::uint64_t chunk_start_ = 0;
    std::vector<ChunkRecord> out_;
};

std::unique_ptr<Chunker> make_chunker(const ChunkerParams& p);

std::vector<ChunkRecord> tarsnap_chunk(const TarsnapParams& p, ByteView stream);
std::vector<ChunkRecord> borg_chunk(const BuzhashParams& p, ByteView stream);
std::vector<ChunkRecord> restic_chunk(const RabinParams& p, ByteView stream);
std::vector<ChunkRecord> chunk(const ChunkerParams& p, ByteView stream);
std::vector<std::uint64_t> chunk_lengths(std::span<const ChunkRecord> records);

/// Boundary reached by a chunk starting at `start`, given that a boundary sits
/// at `start`. Window schemes warm up from the bytes before `start`. Returns
/// end-of-data when the data runs out first. Scans at most to `limit` (absolute
/// offset) if provided, returning nullopt past it.
std::optional<ChunkRecord> next_boundary(const ChunkerParams& p, ByteView data, std::uint64_t start,
                                         std::optional<std::uint64_t> limit = std::nullopt);

// ---------------------------------------------------------------------------
// Text formats

struct ParamsFile {
    std::string profile;
    ChunkerParams params;
};

/// Versioned key=value text; byte-identical for identical inputs.
std::string serialize_params(const ChunkerParams& p, std::string_view profile_name);
/// Throws FormatError.
ParamsFile parse_params(std::string_view text);
/// Hex SHA-256 prefix of the serialized params.
std::string params_fingerprint(const ChunkerParams& p);

void write_records(std::ostream& os, Scheme scheme, std::string_view profile_name,
                   std::string_view fingerprint, std::span<const ChunkRecord> records);
struct RecordsFile {
    Scheme scheme;
    std::string profile;
    std::string fingerprint;
    std::vector<ChunkRecord> records;
};
RecordsFile read_records(std::istream& is);

class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace rollbreak

#pragma once
// Parameter extraction: clash extraction from length observations, the
// clash consistency check, and the six search procedures.

#include <functional>
#include <map>
#include <mutex>
#include <thread>

#include "rollbreak/chunkers.hpp"
#include "rollbreak/pipeline.hpp"

namespace rollbreak {

struct Span {
    std::uint64_t start = 0;
    std::uint64_t end = 0;
    std::uint64_t length() const { return end - start; }
    auto operator<=>(const Span&) const = default;
};

/// A chunk that ended by a clash, with every (start, end) interpretation that
/// survived extraction. Singleton under identity compression.
struct ClashSite {
    std::uint64_t archive_id = 0;
    std::uint64_t index = 0;
    Scheme scheme = Scheme::borg;
    std::vector<Span> spans;

    /// Distinct candidate ends, ascending.
    std::vector<std::uint64_t> ends() const;
    bool exact() const { return spans.size() == 1; }
};

/// Chunk-size constants the observer needs to classify chunks.
struct ChunkLimits {
    Scheme scheme = Scheme::borg;
    std::uint64_t min_clash = 1;
    std::uint64_t max_chunk = 0;
};
ChunkLimits limits_of(const ChunkerParams& p);
ChunkLimits limits_of(Scheme s, const ScaleProfile& prof);

struct ExtractResult {
    bool consistent = true;
    std::string diagnostic;
    std::vector<ClashSite> sites;
    std::uint64_t chunks = 0;
    std::uint64_t max_size_chunks = 0;
    /// Chunks whose interpretations disagree on the cause; never sites.
    std::uint64_t ambiguous_chunks = 0;
    /// Set when a layer had more than max_candidates starts and was cut.
    bool truncated = false;
};

/// Walks one archive's log over the known plaintext, forking on every
/// compressed length that admits several uncompressed lengths and pruning
/// forks that cannot reach the end of the plaintext.
ExtractResult extract_clashes(const ObservationLog& log, std::uint64_t archive_id, ByteView known,
                              const CompressionModel& model, const ChunkLimits& limits,
                              std::size_t max_candidates = 4096);

using KnownMap = std::map<std::uint64_t, ByteView>;

/// Simulates candidate params from each interpretation's start and accepts
/// when the induced clash boundary lands on one of that start's ends.
bool site_consistent(const ChunkerParams& cand, const ClashSite& site, ByteView known);
bool clash_consistency_check(const ChunkerParams& cand, std::span<const ClashSite> sites, const KnownMap& known);

/// i.i.d. uniform choice between two byte values.
Bytes gen_two_valued_plaintext(std::uint8_t a, std::uint8_t b, std::uint64_t length, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Sharded search

struct ShardSpec {
    std::uint32_t index = 0;
    std::uint32_t total = 1;
};
/// Throws std::invalid_argument unless "i/N" with i < N.
ShardSpec parse_shard(std::string_view text);
/// Contiguous slice of [0, n) owned by the shard.
std::pair<std::uint64_t, std::uint64_t> shard_range(std::uint64_t n, ShardSpec s);

struct Accepted {
    std::uint64_t index = 0;
    std::string candidate;
    bool operator==(const Accepted&) const = default;
};

struct RangeResult {
    std::uint64_t work = 0;
    std::uint64_t passed = 0;
    std::uint64_t failed = 0;
    std::vector<Accepted> accepted;
};

/// Evaluates kernel(begin, end, result) over [begin, end) on up to `jobs`
/// threads. Accepted candidates are merged by ascending index.
RangeResult run_range(std::uint64_t begin, std::uint64_t end, unsigned jobs,
                      const std::function<void(std::uint64_t, std::uint64_t, RangeResult&)>& kernel);

// ---------------------------------------------------------------------------
// Reports

struct AttackReport {
    std::string attack;
    Scheme scheme = Scheme::borg;
    std::string profile;
    bool success = false;
    std::string diagnostic;

    ShardSpec shard;
    std::uint64_t index_space = 0;
    std::uint64_t range_begin = 0;
    std::uint64_t range_end = 0;

    std::uint64_t clashes_used = 0;
    /// Candidates enumerated by the sharded main loop.
    std::uint64_t work = 0;
    /// Closed-form size of the main loop over this shard's range.
    std::uint64_t work_closed_form = 0;
    /// Work done after the main loop for the winning candidate.
    std::uint64_t work_followup = 0;
    std::uint64_t checks_passed = 0;
    std::uint64_t checks_failed = 0;
    std::vector<Accepted> accepted;
    std::optional<std::uint64_t> winner;
    std::optional<ChunkerParams> params;
    /// Attack-specific measurements, printed in insertion order.
    std::vector<std::pair<std::string, std::string>> extra;
    /// Not serialized: wall-clock varies between runs.
    double seconds = 0;

    void set_extra(const std::string& key, const std::string& value);
    std::optional<std::string> get_extra(const std::string& key) const;
};

std::string serialize_report(const AttackReport& r);
/// Throws FormatError.
AttackReport parse_report(std::string_view text);
/// Combines shard reports into the report an unsharded run would produce.
/// Throws std::invalid_argument if the shards do not tile one index space.
AttackReport merge_reports(std::vector<AttackReport> shards);

struct AttackOptions {
    ShardSpec shard;
    unsigned jobs = 1;
    /// Number of held-out clashes used to confirm a candidate.
    unsigned amplification = 3;
};

/// Known plaintext with extracted sites (one or more archives).
struct KnownInput {
    ScaleProfile prof;
    std::string compressor = "identity";
    std::vector<ClashSite> sites;
    KnownMap known;
};

/// Chosen two-valued plaintexts: for each byte value v, sites from a
/// plaintext over {0, v}.
struct TwoValuedInput {
    ScaleProfile prof;
    std::string compressor = "identity";
    std::map<std::uint8_t, std::vector<ClashSite>> sites;
    KnownMap known;
};

/// Extracts sites from every archive of the log against its plaintext in
/// `known`, using the log's scheme and compressor. Throws FormatError when
/// an archive's log cannot be explained by its plaintext.
KnownInput make_known_input(const ObservationLog& log, const KnownMap& known, const ScaleProfile& prof,
                            std::size_t max_candidates = 4096);
/// As make_known_input, grouping archives by the nonzero byte value of their
/// two-valued plaintext. Throws std::invalid_argument for other plaintexts.
TwoValuedInput make_two_valued_input(const ObservationLog& log, const KnownMap& known, const ScaleProfile& prof,
                                     std::size_t max_candidates = 4096);

// Tarsnap
AttackReport attack_tarsnap_naive(const TwoValuedInput& in, const AttackOptions& opt = {});
AttackReport attack_tarsnap_clashes(const TwoValuedInput& in, const AttackOptions& opt = {});
/// Number of clash lengths d admissible for a chunk of length j.
std::uint64_t tarsnap_d_count(std::uint64_t j, std::uint32_t mu);
/// Closed-form size of the (p, alpha, d) loop on the first two sites.
std::uint64_t tarsnap_clashes_closed_form(const TwoValuedInput& in, std::uint64_t begin, std::uint64_t end);

// Borg
AttackReport attack_borg_linear(const KnownInput& in, const AttackOptions& opt = {});
AttackReport attack_borg_poly(const TwoValuedInput& in, const AttackOptions& opt = {});
/// One clash as a ring relation: U*P0 + Q*P' = h with h's low mask bits zero.
RingElem borg_window_q(ByteView known, std::uint64_t end, std::uint32_t window, unsigned width, std::uint8_t value);

// Restic
AttackReport attack_restic_solve(const KnownInput& in, const AttackOptions& opt = {});
AttackReport attack_restic_gcd(const KnownInput& in, const AttackOptions& opt = {});

struct GcdRarity {
    std::uint64_t guesses = 0;
    /// Guesses whose gcd holds two or more degree-D irreducible factors.
    std::uint64_t unexpected = 0;
    /// Guesses whose gcd degree falls outside {0, 1, D, D+1}.
    std::uint64_t outside_degree_set = 0;
    double expected_rate = 0;
};
/// Runs the guess loop's gcd step over `guesses` random windows with the
/// given modulus degree, counting unusual gcds.
GcdRarity measure_gcd_rarity(unsigned degree, std::uint64_t guesses, std::uint64_t seed);

/// Work estimates for the full-scale parameters (reported, not executed).
std::vector<std::pair<std::string, std::string>> full_scale_estimates();

}  // namespace rollbreak

#pragma once
// What chunk lengths reveal once the chunking parameters are known: size
// entropy and leakage rates, known-file fingerprinting, leakage from sparse
// variants of a public reference, and chosen-suffix recovery of a secret slot.

#include <iosfwd>
#include <map>
#include <optional>

#include "rollbreak/chunk_state.hpp"
#include "rollbreak/pipeline.hpp"

namespace rollbreak {

// ---------------------------------------------------------------------------
// Generic random chunking

/// Hash values live in a ring of `ring_size` values; a chunk ends when the
/// value lands in a clash subset of `clash_size` values.
struct GenericChunkModel {
    std::uint64_t ring_size = std::uint64_t{1} << 32;
    std::uint64_t clash_size = std::uint64_t{1} << 20;
    unsigned alphabet = 256;
    std::uint64_t min_chunk = 1;
    std::uint64_t max_chunk = std::uint64_t{1} << 17;

    double clash_probability() const { return static_cast<double>(clash_size) / static_cast<double>(ring_size); }
    /// Throws std::invalid_argument unless 0 < clash_size < ring_size and 1 <= min < max.
    void validate() const;
};

/// Chunk lengths covering `length` bytes, boundaries i.i.d. per byte with
/// the model's clash probability (sampled as geometric gaps); the last
/// length is the end-of-data remainder.
std::vector<std::uint64_t> generic_chunk(const GenericChunkModel& model, std::uint64_t length, std::uint64_t seed);

/// Content-driven emulator of the model: a keyed random function on
/// (state, byte) with the same clash probability.
class GenericState {
public:
    GenericState(const GenericChunkModel& model, std::uint64_t key);
    void warm(ByteView, std::uint64_t) { reset(); }
    std::optional<Cause> push(std::uint8_t b);
    bool would_clash(std::uint8_t b) const;
    void reset();
    std::uint64_t length() const { return since_; }

private:
    std::uint64_t next(std::uint8_t b) const;
    const GenericChunkModel* m_;
    std::uint64_t key_;
    std::uint64_t h_ = 0;
    std::uint64_t since_ = 0;
};

/// Chunks `data` with the emulator.
std::vector<ChunkRecord> generic_chunk_content(const GenericChunkModel& model, std::uint64_t key, ByteView data);

// ---------------------------------------------------------------------------
// Entropy and rates

/// Plug-in Shannon entropy (bits) of the empirical distribution.
double chunk_size_entropy(std::span<const std::uint64_t> lengths);
/// Entropy (bits) of a geometric distribution with success probability p.
double geometric_entropy(double p);
/// entropy_bits / (8 * mean_chunk_bytes). Throws std::invalid_argument if mean <= 0.
double leakage_rate(double entropy_bits, double mean_chunk_bytes);

// ---------------------------------------------------------------------------
// Fingerprinting

using LengthKey = std::vector<std::uint64_t>;

struct FingerprintIndex {
    std::size_t depth = 2;
    std::map<LengthKey, std::vector<std::uint64_t>> keys;
};

/// Keys each file by its first `depth` compressed chunk lengths (all of
/// them for files with fewer chunks).
FingerprintIndex fingerprint_build(const ObservationLog& corpus, std::size_t depth);
/// File ids whose key matches the observed prefix; empty if none.
std::vector<std::uint64_t> fingerprint_match(const FingerprintIndex& index, std::span<const std::uint64_t> observed);

struct FingerprintStats {
    std::uint64_t files = 0;
    std::uint64_t keys = 0;
    std::uint64_t singleton_files = 0;
    double singleton_fraction() const { return files ? static_cast<double>(singleton_files) / files : 0.0; }
};
FingerprintStats fingerprint_stats(const FingerprintIndex& index);

/// Sorted CSV: "lengths,file" header, then "l1:l2:...,id" per file.
void write_fingerprint_csv(std::ostream& os, const FingerprintIndex& index);
FingerprintIndex read_fingerprint_csv(std::istream& is);

// ---------------------------------------------------------------------------
// Variants of a public reference

struct VariantSlot {
    std::uint64_t offset = 0;
    /// Every value the slot may take (the reference value included or not).
    std::vector<std::uint8_t> values;
};

struct VariantOutcome {
    std::uint64_t offset = 0;
    std::size_t values = 0;
    /// Some value moves a chunk boundary.
    bool boundaries_change = false;
    /// Boundaries never move but compressed lengths still separate values.
    bool compressed_only = false;
    /// Distinct observables over the values.
    std::size_t classes = 0;
    /// Entropy of the observable under a uniform prior on the values.
    double bits = 0;
};

struct VariantLeakReport {
    std::vector<VariantOutcome> variants;
    double leaked_bits = 0;
    double total_bits = 0;
    std::size_t boundary_changing = 0;
    std::size_t compressed_only = 0;
    double leaked_fraction() const { return total_bits > 0 ? leaked_bits / total_bits : 0.0; }
};

/// Enumerates each slot's values (the others left at the reference) and
/// compares the chunk boundaries and compressed lengths an observer sees.
VariantLeakReport variant_leak_assessment(ByteView reference, std::span<const VariantSlot> variants,
                                          const ChunkerParams& params, const CompressionModel& model);

/// For slots sharing one chunk, the number of value tuples producing each
/// total compressed length of the affected region: (length, count), ascending.
std::vector<std::pair<std::uint64_t, std::uint64_t>> variant_tuple_histogram(
    ByteView reference, std::span<const std::uint64_t> offsets, std::span<const std::uint8_t> alphabet,
    const ChunkerParams& params, const CompressionModel& model);

/// Uniform i.i.d. sequence over `alphabet`.
Bytes gen_small_alphabet(std::span<const std::uint8_t> alphabet, std::uint64_t length, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Chosen suffix against a secret slot

struct SecretSlotSpec {
    Bytes prefix;
    std::size_t width = 1;
    std::vector<Bytes> candidates;
    /// Suffix bytes are drawn from [0, alphabet).
    unsigned alphabet = 256;
    /// Give up a crafting attempt beyond this suffix length.
    std::uint64_t max_suffix = std::uint64_t{1} << 20;
    /// Throws std::invalid_argument on an invalid spec.
    void validate() const;
};

struct DecisionMap {
    Bytes suffix;
    /// Per candidate: end of its first chunk that ends after the prefix's
    /// last boundary, measured from the start of prefix||c||suffix.
    std::vector<std::uint64_t> offsets;
    /// Per candidate: compressed chunk lengths an observer would log.
    std::vector<std::vector<std::uint64_t>> observations;
    std::vector<Bytes> candidates;
    std::string compressor = "identity";
    bool complete = false;
    /// Attempts abandoned at a forced max-size boundary or a length cap.
    std::uint64_t restarts = 0;
    /// Bytes appended before the last candidate was separated (the
    /// trailing guard byte excluded).
    std::uint64_t crafted_length = 0;
};

/// Crafts a suffix s so that each candidate c yields a distinct first
/// boundary in prefix||c||s. Bytes that end a chunk for exactly one active
/// candidate are taken; otherwise a seeded random byte that ends no active
/// candidate's chunk is appended.
DecisionMap craft_partial_chosen(const ChunkerParams& params, const SecretSlotSpec& spec,
                                 const CompressionModel& model, std::uint64_t seed);
DecisionMap craft_partial_chosen(const GenericChunkModel& gm, std::uint64_t key, const SecretSlotSpec& spec,
                                 const CompressionModel& model, std::uint64_t seed);

/// Index of the unique candidate whose observation matches; nullopt if none.
std::optional<std::size_t> identify_secret(const DecisionMap& map, std::span<const std::uint64_t> observed);

/// Expected suffix length when each byte ends a given candidate's chunk with
/// probability q: sum over r = 2..|C| of 1 / P_r, where
/// P_r = 1 - (1 - r q (1 - q)^(r - 1))^|B| is the chance that some byte ends
/// exactly one of r active candidates.
double expected_suffix_length(std::size_t candidates, unsigned alphabet, double q);

void write_decision_map(std::ostream& os, const DecisionMap& map);
DecisionMap read_decision_map(std::istream& is);

}  // namespace rollbreak

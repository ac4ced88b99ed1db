#pragma once
// Per-byte chunker state machines. The streaming chunkers, the attack
// simulators and the Attack-7 emulator all drive these directly.

#include <optional>

#include "rollbreak/chunkers.hpp"

namespace rollbreak {

class TarsnapState {
public:
    explicit TarsnapState(const TarsnapParams& p);
    /// Starts a new chunk.
    void reset();
    /// Consumes one byte; returns the cause if the chunk ends after it.
    std::optional<Cause> push(std::uint8_t b);
    /// Whether pushing b would end the chunk by a clash. Does not mutate.
    bool would_clash(std::uint8_t b) const;
    std::uint64_t length() const { return j_; }
    /// K of the last clash returned by push().
    std::uint64_t last_match() const { return last_k_; }
    /// Width of the admissible match window at chunk length j.
    static std::uint64_t window_at(std::uint64_t j, std::uint32_t mu);

private:
    std::optional<std::uint64_t> lookup(std::uint32_t y) const;
    void insert(std::uint32_t y, std::uint32_t pos);

    const TarsnapParams* p_;
    std::uint64_t j_ = 0;
    std::uint32_t y_ = 0;
    std::uint32_t apow_ = 1;  // alpha^j
    std::uint64_t w_ = 0;
    std::uint64_t last_k_ = 0;
    std::uint32_t epoch_ = 1;
    std::size_t mask_;
    std::vector<std::uint32_t> keys_;
    std::vector<std::uint32_t> vals_;
    std::vector<std::uint32_t> epochs_;
};

class BuzhashState {
public:
    explicit BuzhashState(const BuzhashParams& p);
    /// Positions the state just after `pos` bytes of `data`, with a boundary there.
    void warm(ByteView data, std::uint64_t pos);
    std::optional<Cause> push(std::uint8_t b);
    bool would_clash(std::uint8_t b) const;
    void reset() { since_ = 0; }
    /// Sets the length of the current chunk.
    void set_length(std::uint64_t n) { since_ = n; }
    std::uint64_t hash() const { return h_; }
    std::uint64_t length() const { return since_; }

private:
    std::uint64_t rolled(std::uint8_t b) const;
    const BuzhashParams* p_;
    std::uint64_t wmask_;
    std::uint64_t cmask_;
    unsigned out_rot_;
    std::uint64_t h_ = 0;
    std::uint64_t seen_ = 0;
    std::uint64_t since_ = 0;
    std::size_t ring_pos_ = 0;
    Bytes ring_;
};

class RabinState {
public:
    explicit RabinState(const RabinParams& p);
    void warm(ByteView data, std::uint64_t pos);
    std::optional<Cause> push(std::uint8_t b);
    bool would_clash(std::uint8_t b) const;
    void reset() { since_ = 0; }
    void set_length(std::uint64_t n) { since_ = n; }
    std::uint64_t fingerprint() const { return h_; }
    std::uint64_t length() const { return since_; }

private:
    std::uint64_t rolled(std::uint8_t b) const;
    const RabinParams* p_;
    unsigned deg_;
    std::uint64_t dmask_;
    std::uint64_t cmask_;
    std::array<std::uint64_t, 256> mod_table_{};
    std::array<std::uint64_t, 256> out_table_{};
    std::uint64_t h_ = 0;
    std::uint64_t seen_ = 0;
    std::uint64_t since_ = 0;
    std::size_t ring_pos_ = 0;
    Bytes ring_;
};

/// Type-erased holder over the three states, used where the scheme is a
/// runtime choice.
class AnyState {
public:
    explicit AnyState(const ChunkerParams& p);
    void warm(ByteView data, std::uint64_t pos);
    std::optional<Cause> push(std::uint8_t b);
    bool would_clash(std::uint8_t b) const;
    void reset();
    /// Window schemes only; Tarsnap state depends on the whole chunk.
    void set_length(std::uint64_t n);
    std::uint64_t length() const;
    std::uint64_t last_match() const;

private:
    std::variant<TarsnapState, BuzhashState, RabinState> s_;
};

}  // namespace rollbreak

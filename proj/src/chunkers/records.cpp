#include <istream>
#include <ostream>
#include <sstream>

#include "rollbreak/chunk_state.hpp"

namespace rollbreak {
namespace {

template <class... Fs>
struct overloaded : Fs... {
    using Fs::operator()...;
};
template <class... Fs>
overloaded(Fs...) -> overloaded<Fs...>;

template <class Params, class State>
class StateChunker final : public Chunker {
public:
    explicit StateChunker(const Params& p) : params_(p), state_(params_) {
        if constexpr (!std::is_same_v<State, TarsnapState>) state_.warm({}, 0);
    }

    void feed(ByteView data) override {
        for (auto b : data) {
            ++pos_;
            if (auto c = state_.push(b)) {
                std::optional<std::uint64_t> k;
                if constexpr (std::is_same_v<State, TarsnapState>) {
                    if (*c == Cause::clash) k = state_.last_match();
                }
                emit(*c, k);
                state_.reset();
            }
        }
    }

private:
    Params params_;
    State state_;
};

template <class Params>
std::vector<ChunkRecord> run(const Params& p, ByteView stream) {
    auto c = make_chunker(ChunkerParams{p});
    c->feed(stream);
    return c->finish();
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t from = 0;
    for (;;) {
        auto at = s.find(sep, from);
        out.emplace_back(s.substr(from, at == std::string_view::npos ? std::string_view::npos : at - from));
        if (at == std::string_view::npos) break;
        from = at + 1;
    }
    return out;
}

std::uint64_t parse_u64(const std::string& s) {
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
        throw FormatError("expected unsigned integer, got '" + s + "'");
    try {
        return std::stoull(s);
    } catch (const std::exception&) {
        throw FormatError("integer out of range: " + s);
    }
}

}  // namespace

void Chunker::emit(Cause c, std::optional<std::uint64_t> matched) {
    out_.push_back(ChunkRecord{chunk_start_, pos_, c, matched});
    chunk_start_ = pos_;
}

std::vector<ChunkRecord> Chunker::drain() {
    std::vector<ChunkRecord> r;
    r.swap(out_);
    return r;
}

std::vector<ChunkRecord> Chunker::finish() {
    if (pos_ > chunk_start_) emit(Cause::end_of_data);
    return drain();
}

std::unique_ptr<Chunker> make_chunker(const ChunkerParams& p) {
    validate(p);
    return std::visit(overloaded{
                          [](const TarsnapParams& t) -> std::unique_ptr<Chunker> {
                              return std::make_unique<StateChunker<TarsnapParams, TarsnapState>>(t);
                          },
                          [](const BuzhashParams& b) -> std::unique_ptr<Chunker> {
                              return std::make_unique<StateChunker<BuzhashParams, BuzhashState>>(b);
                          },
                          [](const RabinParams& r) -> std::unique_ptr<Chunker> {
                              return std::make_unique<StateChunker<RabinParams, RabinState>>(r);
                          },
                      },
                      p);
}

std::vector<ChunkRecord> tarsnap_chunk(const TarsnapParams& p, ByteView stream) { return run(p, stream); }
std::vector<ChunkRecord> borg_chunk(const BuzhashParams& p, ByteView stream) { return run(p, stream); }
std::vector<ChunkRecord> restic_chunk(const RabinParams& p, ByteView stream) { return run(p, stream); }

std::vector<ChunkRecord> chunk(const ChunkerParams& p, ByteView stream) {
    auto c = make_chunker(p);
    c->feed(stream);
    return c->finish();
}

std::vector<std::uint64_t> chunk_lengths(std::span<const ChunkRecord> records) {
    std::vector<std::uint64_t> out;
    out.reserve(records.size());
    for (const auto& r : records) out.push_back(r.length());
    return out;
}

Scheme scheme_of(const ChunkerParams& p) {
    return std::visit(overloaded{
                          [](const TarsnapParams&) { return Scheme::tarsnap; },
                          [](const BuzhashParams&) { return Scheme::borg; },
                          [](const RabinParams&) { return Scheme::restic; },
                      },
                      p);
}

std::uint64_t max_chunk_of(const ChunkerParams& p) {
    return std::visit([](const auto& v) -> std::uint64_t { return v.max_chunk; }, p);
}

std::uint64_t min_clash_length(const ChunkerParams& p) {
    return std::visit(overloaded{
                          [](const TarsnapParams& t) -> std::uint64_t { return t.mu / 4 + 1; },
                          [](const BuzhashParams& b) -> std::uint64_t { return b.min_chunk; },
                          [](const RabinParams& r) -> std::uint64_t { return r.min_chunk; },
                      },
                      p);
}

std::uint32_t window_of(const ChunkerParams& p) {
    return std::visit(overloaded{
                          [](const TarsnapParams&) -> std::uint32_t { return 0; },
                          [](const BuzhashParams& b) -> std::uint32_t { return b.window; },
                          [](const RabinParams& r) -> std::uint32_t { return r.window_bytes; },
                      },
                      p);
}

void validate(const ChunkerParams& p) {
    std::visit([](const auto& v) { validate(v); }, p);
}

ChunkerParams keygen(Scheme scheme, std::uint64_t seed, const ScaleProfile& prof) {
    switch (scheme) {
        case Scheme::tarsnap: return tarsnap_keygen(seed, prof);
        case Scheme::borg: return borg_keygen(seed, prof);
        case Scheme::restic: return restic_keygen(seed, prof);
    }
    throw std::invalid_argument("unknown scheme");
}

// ---------------------------------------------------------------------------

AnyState::AnyState(const ChunkerParams& p)
    : s_(std::visit(
          [](const auto& v) -> std::variant<TarsnapState, BuzhashState, RabinState> {
              using T = std::decay_t<decltype(v)>;
              if constexpr (std::is_same_v<T, TarsnapParams>) return TarsnapState(v);
              else if constexpr (std::is_same_v<T, BuzhashParams>) return BuzhashState(v);
              else return RabinState(v);
          },
          p)) {}

void AnyState::warm(ByteView data, std::uint64_t pos) {
    std::visit(overloaded{
                   [](TarsnapState& t) { t.reset(); },
                   [&](auto& s) { s.warm(data, pos); },
               },
               s_);
}

std::optional<Cause> AnyState::push(std::uint8_t b) {
    return std::visit([b](auto& s) { return s.push(b); }, s_);
}

bool AnyState::would_clash(std::uint8_t b) const {
    return std::visit([b](const auto& s) { return s.would_clash(b); }, s_);
}

void AnyState::reset() {
    std::visit([](auto& s) { s.reset(); }, s_);
}

void AnyState::set_length(std::uint64_t n) {
    std::visit(overloaded{
                   [](TarsnapState&) { throw std::logic_error("set_length: not a window scheme"); },
                   [n](auto& s) { s.set_length(n); },
               },
               s_);
}

std::uint64_t AnyState::length() const {
    return std::visit([](const auto& s) { return s.length(); }, s_);
}

std::uint64_t AnyState::last_match() const {
    if (auto* t = std::get_if<TarsnapState>(&s_)) return t->last_match();
    return 0;
}

std::optional<ChunkRecord> next_boundary(const ChunkerParams& p, ByteView data, std::uint64_t start,
                                         std::optional<std::uint64_t> limit) {
    AnyState st(p);
    st.warm(data, start);
    for (std::uint64_t i = start; i < data.size(); ++i) {
        if (limit && i >= *limit) return std::nullopt;
        if (auto c = st.push(data[i])) {
            ChunkRecord r{start, i + 1, *c, std::nullopt};
            if (*c == Cause::clash && scheme_of(p) == Scheme::tarsnap) r.matched = st.last_match();
            return r;
        }
    }
    if (limit && data.size() > *limit) return std::nullopt;
    return ChunkRecord{start, data.size(), Cause::end_of_data, std::nullopt};
}

// ---------------------------------------------------------------------------

void write_records(std::ostream& os, Scheme scheme, std::string_view profile_name, std::string_view fingerprint,
                   std::span<const ChunkRecord> records) {
    os << "scheme=" << to_string(scheme) << ",profile=" << profile_name << ",params=" << fingerprint << '\n';
    for (const auto& r : records) {
        os << r.start << ',' << r.end << ',' << to_string(r.cause);
        if (r.matched) os << ',' << *r.matched;
        os << '\n';
    }
}

RecordsFile read_records(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw FormatError("records: missing header");
    RecordsFile f{};
    bool have_scheme = false, have_profile = false, have_fp = false;
    for (const auto& kv : split(line, ',')) {
        auto eq = kv.find('=');
        if (eq == std::string::npos) throw FormatError("records: malformed header field '" + kv + "'");
        auto key = kv.substr(0, eq), val = kv.substr(eq + 1);
        if (key == "scheme") {
            try {
                f.scheme = parse_scheme(val);
            } catch (const std::invalid_argument& e) {
                throw FormatError(e.what());
            }
            have_scheme = true;
        } else if (key == "profile") {
            f.profile = val;
            have_profile = true;
        } else if (key == "params") {
            f.fingerprint = val;
            have_fp = true;
        } else {
            throw FormatError("records: unknown header field '" + key + "'");
        }
    }
    if (!have_scheme || !have_profile || !have_fp) throw FormatError("records: incomplete header");
    std::uint64_t expect = 0;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        auto parts = split(line, ',');
        if (parts.size() != 3 && parts.size() != 4) throw FormatError("records: bad line '" + line + "'");
        ChunkRecord r;
        r.start = parse_u64(parts[0]);
        r.end = parse_u64(parts[1]);
        r.cause = parse_cause(parts[2]);
        if (parts.size() == 4) r.matched = parse_u64(parts[3]);
        if (r.start != expect || r.end <= r.start) throw FormatError("records: records do not tile");
        expect = r.end;
        f.records.push_back(r);
    }
    return f;
}

}  // namespace rollbreak

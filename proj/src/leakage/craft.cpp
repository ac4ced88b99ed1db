#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "rollbreak/leakage.hpp"
#include "rollbreak/util.hpp"

namespace rollbreak {
namespace {

constexpr std::uint64_t kMaxAttempts = 1000;

template <class State, class ChunkFn>
DecisionMap craft(const State& fresh, ChunkFn chunk_fn, const SecretSlotSpec& spec, const CompressionModel& model,
                  std::uint64_t seed) {
    spec.validate();
    Rng rng(derive_seed(seed, 0xa7));
    const std::size_t n = spec.candidates.size();
    DecisionMap map;
    map.candidates = spec.candidates;
    map.compressor = std::string(model.name());

    State base = fresh;
    for (auto b : spec.prefix) {
        if (base.push(b)) base.reset();
    }
    // States right after each candidate; a boundary inside the slot fixes the offset.
    const std::uint64_t slot_end = spec.prefix.size() + spec.width;
    std::vector<State> after(n, base);
    std::vector<std::optional<std::uint64_t>> fixed(n);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < spec.width; ++i) {
            if (after[j].push(spec.candidates[j][i])) {
                fixed[j] = spec.prefix.size() + i + 1;
                break;
            }
        }
    }

    // Unresolved candidates end at the end of their data.
    std::uint64_t restarts = 0;
    auto build = [&](const Bytes& s, const std::vector<std::optional<std::uint64_t>>& off, std::uint64_t crafted) {
        DecisionMap cand = map;
        cand.restarts = restarts;
        cand.suffix = s;
        cand.crafted_length = crafted;
        cand.offsets.clear();
        cand.observations.clear();
        for (std::size_t j = 0; j < n; ++j) {
            Bytes full = spec.prefix;
            full.insert(full.end(), spec.candidates[j].begin(), spec.candidates[j].end());
            full.insert(full.end(), s.begin(), s.end());
            std::vector<std::uint64_t> obs;
            for (const auto& r : chunk_fn(ByteView(full)))
                obs.push_back(model.compressed_size(ByteView(full).subspan(r.start, r.length())));
            cand.offsets.push_back(off[j] ? *off[j] : full.size());
            cand.observations.push_back(std::move(obs));
        }
        return cand;
    };

    std::vector<unsigned> order(spec.alphabet);
    DecisionMap last = build({}, fixed, 0);
    for (std::uint64_t attempt = 0; attempt < kMaxAttempts; ++attempt) {
        if (attempt) ++restarts;
        std::vector<State> st = after;
        std::vector<std::optional<std::uint64_t>> off = fixed;
        std::vector<std::size_t> active;
        for (std::size_t j = 0; j < n; ++j) {
            if (!off[j]) active.push_back(j);
        }
        Bytes s;
        bool abandoned = false;
        while (active.size() >= 2) {
            if (s.size() >= spec.max_suffix) {
                abandoned = true;
                break;
            }
            std::iota(order.begin(), order.end(), 0u);
            for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[uniform_below(rng, i)]);
            int pick = -1, quiet = -1;
            for (auto b : order) {
                std::size_t hits = 0;
                for (auto j : active) hits += st[j].would_clash(static_cast<std::uint8_t>(b));
                if (hits == 1) {
                    pick = static_cast<int>(b);
                    break;
                }
                if (hits == 0 && quiet < 0) quiet = static_cast<int>(b);
            }
            if (pick < 0) pick = quiet >= 0 ? quiet : static_cast<int>(order[0]);
            const auto byte = static_cast<std::uint8_t>(pick);
            s.push_back(byte);
            const std::uint64_t pos = slot_end + s.size();
            std::vector<std::size_t> still;
            std::size_t forced = 0;
            for (auto j : active) {
                if (auto c = st[j].push(byte)) {
                    off[j] = pos;
                    if (*c == Cause::max_size) ++forced;
                } else {
                    still.push_back(j);
                }
            }
            if (forced >= 2) {
                abandoned = true;
                break;
            }
            active = std::move(still);
        }
        if (abandoned) {
            last = build(s, off, s.size());
            continue;
        }
        const std::uint64_t crafted = s.size();
        if (active.size() == 1) {
            // Guard byte so the last candidate's chunk outlives every recorded boundary.
            const auto j = active[0];
            for (;;) {
                const auto b = static_cast<std::uint8_t>(uniform_below(rng, spec.alphabet));
                if (!st[j].would_clash(b)) {
                    s.push_back(b);
                    break;
                }
            }
            off[j] = slot_end + s.size();
        }
        DecisionMap cand = build(s, off, crafted);
        auto offs = cand.offsets;
        std::sort(offs.begin(), offs.end());
        auto obs = cand.observations;
        std::sort(obs.begin(), obs.end());
        const bool distinct = std::adjacent_find(offs.begin(), offs.end()) == offs.end() &&
                              std::adjacent_find(obs.begin(), obs.end()) == obs.end();
        cand.complete = distinct;
        if (distinct) return cand;
        // A boundary inside the slot that collides cannot be undone by any suffix.
        bool stuck = false;
        for (std::size_t a = 0; a < n; ++a) {
            for (std::size_t b = a + 1; b < n; ++b) stuck |= fixed[a] && fixed[b] && *fixed[a] == *fixed[b];
        }
        last = std::move(cand);
        if (stuck) return last;
    }
    last.complete = false;
    return last;
}

std::string hex(ByteView b) { return b.empty() ? "-" : to_hex(b); }

Bytes unhex(const std::string& s) {
    if (s == "-") return {};
    if (s.size() % 2) throw FormatError("decision map: odd-length hex");
    Bytes out;
    for (std::size_t i = 0; i < s.size(); i += 2) {
        unsigned v = 0;
        for (std::size_t k = 0; k < 2; ++k) {
            const char c = s[i + k];
            v <<= 4;
            if (c >= '0' && c <= '9') v |= static_cast<unsigned>(c - '0');
            else if (c >= 'a' && c <= 'f') v |= static_cast<unsigned>(c - 'a' + 10);
            else throw FormatError("decision map: bad hex digit");
        }
        out.push_back(static_cast<std::uint8_t>(v));
    }
    return out;
}

std::uint64_t parse_u64(const std::string& s) {
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
        throw FormatError("decision map: expected unsigned integer, got '" + s + "'");
    return std::stoull(s);
}

}  // namespace

void SecretSlotSpec::validate() const {
    if (candidates.size() < 2) throw std::invalid_argument("secret slot needs at least 2 candidates");
    if (width == 0) throw std::invalid_argument("secret slot width must be positive");
    if (alphabet == 0 || alphabet > 256) throw std::invalid_argument("suffix alphabet must be in [1, 256]");
    for (const auto& c : candidates) {
        if (c.size() != width) throw std::invalid_argument("every candidate must have the slot width");
    }
}

DecisionMap craft_partial_chosen(const ChunkerParams& params, const SecretSlotSpec& spec,
                                 const CompressionModel& model, std::uint64_t seed) {
    validate(params);
    if (spec.width >= max_chunk_of(params)) throw std::invalid_argument("slot width exceeds the maximum chunk size");
    AnyState fresh(params);
    fresh.warm({}, 0);
    return craft(fresh, [&](ByteView d) { return chunk(params, d); }, spec, model, seed);
}

DecisionMap craft_partial_chosen(const GenericChunkModel& gm, std::uint64_t key, const SecretSlotSpec& spec,
                                 const CompressionModel& model, std::uint64_t seed) {
    gm.validate();
    if (spec.width >= gm.max_chunk) throw std::invalid_argument("slot width exceeds the maximum chunk size");
    GenericState fresh(gm, key);
    return craft(fresh, [&](ByteView d) { return generic_chunk_content(gm, key, d); }, spec, model, seed);
}

std::optional<std::size_t> identify_secret(const DecisionMap& map, std::span<const std::uint64_t> observed) {
    std::optional<std::size_t> hit;
    for (std::size_t j = 0; j < map.observations.size(); ++j) {
        const auto& o = map.observations[j];
        if (o.size() == observed.size() && std::equal(o.begin(), o.end(), observed.begin())) {
            if (hit) return std::nullopt;
            hit = j;
        }
    }
    return hit;
}

double expected_suffix_length(std::size_t candidates, unsigned alphabet, double q) {
    double total = 0;
    for (std::size_t r = 2; r <= candidates; ++r) {
        const double one = static_cast<double>(r) * q * std::pow(1 - q, static_cast<double>(r - 1));
        total += 1.0 / (1.0 - std::pow(1.0 - one, alphabet));
    }
    return total;
}

void write_decision_map(std::ostream& os, const DecisionMap& map) {
    os << "rollbreak-decision-map v1\n"
       << "compressor=" << map.compressor << '\n'
       << "complete=" << (map.complete ? 1 : 0) << '\n'
       << "restarts=" << map.restarts << '\n'
       << "crafted_length=" << map.crafted_length << '\n'
       << "suffix=" << hex(map.suffix) << '\n';
    for (std::size_t j = 0; j < map.candidates.size(); ++j) {
        os << "candidate=" << hex(map.candidates[j]) << ' ' << map.offsets[j] << ' ';
        for (std::size_t i = 0; i < map.observations[j].size(); ++i) os << (i ? ":" : "") << map.observations[j][i];
        os << '\n';
    }
}

DecisionMap read_decision_map(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line != "rollbreak-decision-map v1")
        throw FormatError("decision map: missing or unsupported version tag");
    DecisionMap m;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) throw FormatError("decision map: malformed line '" + line + "'");
        const std::string key = line.substr(0, eq), v = line.substr(eq + 1);
        if (key == "compressor") m.compressor = v;
        else if (key == "complete") m.complete = parse_u64(v) != 0;
        else if (key == "restarts") m.restarts = parse_u64(v);
        else if (key == "crafted_length") m.crafted_length = parse_u64(v);
        else if (key == "suffix") m.suffix = unhex(v);
        else if (key == "candidate") {
            std::istringstream ls(v);
            std::string c, off, obs;
            if (!(ls >> c >> off >> obs)) throw FormatError("decision map: malformed candidate line");
            m.candidates.push_back(unhex(c));
            m.offsets.push_back(parse_u64(off));
            std::vector<std::uint64_t> o;
            std::istringstream os(obs);
            std::string part;
            while (std::getline(os, part, ':')) o.push_back(parse_u64(part));
            m.observations.push_back(std::move(o));
        } else {
            throw FormatError("decision map: unknown key " + key);
        }
    }
    if (m.candidates.size() < 2) throw FormatError("decision map: fewer than 2 candidates");
    return m;
}

}  // namespace rollbreak

#include <algorithm>
#include <charconv>
#include <map>
#include <sstream>

#include "rollbreak/chunkers.hpp"
#include "rollbreak/util.hpp"

namespace rollbreak {
namespace {

constexpr std::string_view kMagic = "rollbreak-params v1";

template <class T>
std::string join(const T& values, bool hex) {
    std::ostringstream os;
    if (hex) os << std::hex;
    bool first = true;
    for (auto v : values) {
        if (!first) os << ',';
        os << v;
        first = false;
    }
    return os.str();
}

std::uint64_t to_u64(std::string_view s, int base, std::string_view key) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v, base);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size())
        throw FormatError("params: bad value for " + std::string(key) + ": '" + std::string(s) + "'");
    return v;
}

template <std::size_t N, class T>
void parse_list(std::string_view s, int base, std::string_view key, std::array<T, N>& out) {
    std::size_t i = 0, from = 0;
    for (;;) {
        auto at = s.find(',', from);
        auto item = s.substr(from, at == std::string_view::npos ? std::string_view::npos : at - from);
        if (i >= N) throw FormatError("params: too many entries in " + std::string(key));
        out[i++] = static_cast<T>(to_u64(item, base, key));
        if (at == std::string_view::npos) break;
        from = at + 1;
    }
    if (i != N) throw FormatError("params: expected " + std::to_string(N) + " entries in " + std::string(key));
}

class Fields {
public:
    explicit Fields(std::map<std::string, std::string> kv) : kv_(std::move(kv)) {}
    std::string_view take(const std::string& key) {
        auto it = kv_.find(key);
        if (it == kv_.end()) throw FormatError("params: missing key " + key);
        used_.push_back(key);
        return it->second;
    }
    std::uint64_t num(const std::string& key) { return to_u64(take(key), 10, key); }
    void check_all_used() const {
        for (const auto& [k, v] : kv_) {
            if (std::find(used_.begin(), used_.end(), k) == used_.end())
                throw FormatError("params: unknown key " + k);
        }
    }

private:
    std::map<std::string, std::string> kv_;
    std::vector<std::string> used_;
};

}  // namespace

std::string serialize_params(const ChunkerParams& p, std::string_view profile_name) {
    std::ostringstream os;
    os << kMagic << '\n' << "scheme=" << to_string(scheme_of(p)) << '\n' << "profile=" << profile_name << '\n';
    if (auto* t = std::get_if<TarsnapParams>(&p)) {
        os << "p=" << t->p << '\n'
           << "alpha=" << t->alpha << '\n'
           << "mu=" << t->mu << '\n'
           << "max_chunk=" << t->max_chunk << '\n'
           << "x=" << join(t->x, false) << '\n';
    } else if (auto* b = std::get_if<BuzhashParams>(&p)) {
        os << "width=" << b->width << '\n'
           << "window=" << b->window << '\n'
           << "mask_bits=" << b->mask_bits << '\n'
           << "min_chunk=" << b->min_chunk << '\n'
           << "max_chunk=" << b->max_chunk << '\n'
           << "table=" << join(b->table, true) << '\n';
    } else {
        const auto& r = std::get<RabinParams>(p);
        os << "poly=" << r.poly.to_hex() << '\n'
           << "window=" << r.window_bytes << '\n'
           << "mask_bits=" << r.mask_bits << '\n'
           << "min_chunk=" << r.min_chunk << '\n'
           << "max_chunk=" << r.max_chunk << '\n';
    }
    return os.str();
}

ParamsFile parse_params(std::string_view text) {
    std::istringstream is{std::string(text)};
    std::string line;
    if (!std::getline(is, line) || line != kMagic) throw FormatError("params: missing or unsupported version tag");
    std::map<std::string, std::string> kv;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) throw FormatError("params: malformed line '" + line + "'");
        if (!kv.emplace(line.substr(0, eq), line.substr(eq + 1)).second)
            throw FormatError("params: duplicate key " + line.substr(0, eq));
    }
    Fields f(std::move(kv));
    ParamsFile out;
    Scheme scheme;
    try {
        scheme = parse_scheme(f.take("scheme"));
    } catch (const std::invalid_argument& e) {
        throw FormatError(std::string("params: ") + e.what());
    }
    out.profile = std::string(f.take("profile"));
    switch (scheme) {
        case Scheme::tarsnap: {
            TarsnapParams t;
            t.p = static_cast<std::uint32_t>(f.num("p"));
            t.alpha = static_cast<std::uint32_t>(f.num("alpha"));
            t.mu = static_cast<std::uint32_t>(f.num("mu"));
            t.max_chunk = static_cast<std::uint32_t>(f.num("max_chunk"));
            parse_list(f.take("x"), 10, "x", t.x);
            out.params = t;
            break;
        }
        case Scheme::borg: {
            BuzhashParams b;
            b.width = static_cast<unsigned>(f.num("width"));
            b.window = static_cast<std::uint32_t>(f.num("window"));
            b.mask_bits = static_cast<unsigned>(f.num("mask_bits"));
            b.min_chunk = f.num("min_chunk");
            b.max_chunk = f.num("max_chunk");
            parse_list(f.take("table"), 16, "table", b.table);
            out.params = b;
            break;
        }
        case Scheme::restic: {
            RabinParams r;
            try {
                r.poly = GF2Poly::from_hex(f.take("poly"));
            } catch (const std::invalid_argument& e) {
                throw FormatError(std::string("params: ") + e.what());
            }
            r.window_bytes = static_cast<std::uint32_t>(f.num("window"));
            r.mask_bits = static_cast<unsigned>(f.num("mask_bits"));
            r.min_chunk = f.num("min_chunk");
            r.max_chunk = f.num("max_chunk");
            out.params = r;
            break;
        }
    }
    f.check_all_used();
    try {
        validate(out.params);
    } catch (const std::invalid_argument& e) {
        throw FormatError(std::string("params: ") + e.what());
    }
    if (auto* t = std::get_if<TarsnapParams>(&out.params)) {
        try {
            const auto primes = canonical_primes(profile(out.profile).prime_bits);
            if (std::find(primes.begin(), primes.end(), t->p) == primes.end())
                throw FormatError("params: p is not in the profile's prime list");
        } catch (const std::invalid_argument&) {
            // unknown profile names are allowed for hand-built parameter sets
        }
    }
    return out;
}

std::string params_fingerprint(const ChunkerParams& p) {
    const auto text = serialize_params(p, "");
    const auto d = sha256({reinterpret_cast<const std::uint8_t*>(text.data()), text.size()});
    return to_hex(d).substr(0, 16);
}

}  // namespace rollbreak

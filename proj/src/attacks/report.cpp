#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "rollbreak/attacks.hpp"
#include "rollbreak/chunk_state.hpp"

namespace rollbreak {
namespace {

constexpr std::string_view kMagic = "rollbreak-report v1";

std::string one_line(std::string s) {
    std::replace(s.begin(), s.end(), '\n', ' ');
    return s;
}

std::uint64_t num(const std::string& key, const std::string& v) {
    if (v.empty() || v.find_first_not_of("0123456789") != std::string::npos)
        throw FormatError("report: bad value for " + key + ": '" + v + "'");
    try {
        return std::stoull(v);
    } catch (const std::exception&) {
        throw FormatError("report: value out of range for " + key);
    }
}

std::string log2_str(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "2^%.1f", std::log2(v));
    return buf;
}

}  // namespace

void AttackReport::set_extra(const std::string& key, const std::string& value) {
    for (auto& [k, v] : extra) {
        if (k == key) {
            v = value;
            return;
        }
    }
    extra.emplace_back(key, value);
}

std::optional<std::string> AttackReport::get_extra(const std::string& key) const {
    for (const auto& [k, v] : extra) {
        if (k == key) return v;
    }
    return std::nullopt;
}

std::string serialize_report(const AttackReport& r) {
    std::ostringstream os;
    os << kMagic << '\n'
       << "attack=" << r.attack << '\n'
       << "scheme=" << to_string(r.scheme) << '\n'
       << "profile=" << r.profile << '\n'
       << "success=" << (r.success ? 1 : 0) << '\n'
       << "diagnostic=" << one_line(r.diagnostic) << '\n'
       << "shard=" << r.shard.index << '/' << r.shard.total << '\n'
       << "index_space=" << r.index_space << '\n'
       << "range_begin=" << r.range_begin << '\n'
       << "range_end=" << r.range_end << '\n'
       << "clashes_used=" << r.clashes_used << '\n'
       << "work=" << r.work << '\n'
       << "work_closed_form=" << r.work_closed_form << '\n'
       << "work_followup=" << r.work_followup << '\n'
       << "checks_passed=" << r.checks_passed << '\n'
       << "checks_failed=" << r.checks_failed << '\n'
       << "accepted=" << r.accepted.size() << '\n';
    for (const auto& a : r.accepted) os << "candidate=" << a.index << ' ' << one_line(a.candidate) << '\n';
    os << "winner=" << (r.winner ? std::to_string(*r.winner) : "none") << '\n';
    for (const auto& [k, v] : r.extra) os << "extra." << k << '=' << one_line(v) << '\n';
    if (r.params) {
        std::istringstream ps(serialize_params(*r.params, r.profile));
        std::string line;
        while (std::getline(ps, line)) os << "params:" << line << '\n';
    }
    return os.str();
}

AttackReport parse_report(std::string_view text) {
    std::istringstream is{std::string(text)};
    std::string line;
    if (!std::getline(is, line) || line != kMagic) throw FormatError("report: missing or unsupported version tag");
    AttackReport r;
    std::string params_text;
    std::uint64_t declared = 0;
    bool have_attack = false, have_count = false;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (line.rfind("params:", 0) == 0) {
            params_text += line.substr(7) + '\n';
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos) throw FormatError("report: malformed line '" + line + "'");
        const std::string key = line.substr(0, eq), v = line.substr(eq + 1);
        if (key == "attack") {
            r.attack = v;
            have_attack = true;
        } else if (key == "scheme") {
            try {
                r.scheme = parse_scheme(v);
            } catch (const std::invalid_argument& e) {
                throw FormatError(std::string("report: ") + e.what());
            }
        } else if (key == "profile") {
            r.profile = v;
        } else if (key == "success") {
            r.success = num(key, v) != 0;
        } else if (key == "diagnostic") {
            r.diagnostic = v;
        } else if (key == "shard") {
            try {
                r.shard = parse_shard(v);
            } catch (const std::invalid_argument& e) {
                throw FormatError(std::string("report: ") + e.what());
            }
        } else if (key == "index_space") {
            r.index_space = num(key, v);
        } else if (key == "range_begin") {
            r.range_begin = num(key, v);
        } else if (key == "range_end") {
            r.range_end = num(key, v);
        } else if (key == "clashes_used") {
            r.clashes_used = num(key, v);
        } else if (key == "work") {
            r.work = num(key, v);
        } else if (key == "work_closed_form") {
            r.work_closed_form = num(key, v);
        } else if (key == "work_followup") {
            r.work_followup = num(key, v);
        } else if (key == "checks_passed") {
            r.checks_passed = num(key, v);
        } else if (key == "checks_failed") {
            r.checks_failed = num(key, v);
        } else if (key == "accepted") {
            declared = num(key, v);
            have_count = true;
        } else if (key == "candidate") {
            auto sp = v.find(' ');
            if (sp == std::string::npos) throw FormatError("report: malformed candidate '" + v + "'");
            r.accepted.push_back({num(key, v.substr(0, sp)), v.substr(sp + 1)});
        } else if (key == "winner") {
            if (v != "none") r.winner = num(key, v);
        } else if (key.rfind("extra.", 0) == 0) {
            r.extra.emplace_back(key.substr(6), v);
        } else {
            throw FormatError("report: unknown key " + key);
        }
    }
    if (!have_attack || !have_count) throw FormatError("report: incomplete report");
    if (declared != r.accepted.size()) throw FormatError("report: candidate count mismatch");
    if (!params_text.empty()) r.params = parse_params(params_text).params;
    return r;
}

AttackReport merge_reports(std::vector<AttackReport> shards) {
    if (shards.empty()) throw std::invalid_argument("no reports to merge");
    std::sort(shards.begin(), shards.end(),
              [](const AttackReport& a, const AttackReport& b) {
                  return std::pair(a.range_begin, a.range_end) < std::pair(b.range_begin, b.range_end);
              });
    const auto& first = shards.front();
    std::uint64_t expect = 0;
    for (const auto& s : shards) {
        if (s.attack != first.attack || s.scheme != first.scheme || s.profile != first.profile ||
            s.index_space != first.index_space)
            throw std::invalid_argument("reports come from different attack runs");
        if (s.range_begin != expect) throw std::invalid_argument("shard ranges do not tile the index space");
        expect = s.range_end;
    }
    if (expect != first.index_space) throw std::invalid_argument("shard ranges do not cover the index space");

    AttackReport m;
    m.attack = first.attack;
    m.scheme = first.scheme;
    m.profile = first.profile;
    m.index_space = first.index_space;
    m.range_begin = 0;
    m.range_end = first.index_space;
    m.extra = first.extra;
    const AttackReport* win = nullptr;
    for (const auto& s : shards) {
        m.work += s.work;
        m.work_closed_form += s.work_closed_form;
        m.checks_passed += s.checks_passed;
        m.checks_failed += s.checks_failed;
        m.clashes_used = std::max(m.clashes_used, s.clashes_used);
        m.accepted.insert(m.accepted.end(), s.accepted.begin(), s.accepted.end());
        if (s.success && s.winner && (!win || *s.winner < *win->winner)) win = &s;
    }
    std::stable_sort(m.accepted.begin(), m.accepted.end(),
                     [](const Accepted& a, const Accepted& b) { return a.index < b.index; });
    if (win) {
        m.success = true;
        m.winner = win->winner;
        m.params = win->params;
        m.work_followup = win->work_followup;
        for (const auto& [k, v] : win->extra) m.set_extra(k, v);
    } else {
        const AttackReport* d = &first;
        for (const auto& s : shards) {
            if (!s.accepted.empty()) {
                d = &s;
                break;
            }
        }
        m.diagnostic = d->diagnostic;
        m.work_followup = 0;
    }
    for (const auto& s : shards) m.seconds += s.seconds;
    return m;
}

std::vector<std::pair<std::string, std::string>> full_scale_estimates() {
    const auto& full = profile("full");
    double naive = 0, alpha = 0;
    for (auto p : canonical_primes(full.prime_bits)) {
        naive += static_cast<double>(p - 2) * (p - 1);
        alpha += p - 2;
    }
    // Typical full-scale clash length is about mu.
    const std::uint64_t d = tarsnap_d_count(full.tarsnap_mu, full.tarsnap_mu);
    std::vector<std::pair<std::string, std::string>> out;
    out.emplace_back("tarsnap-naive.loop", log2_str(naive));
    out.emplace_back("tarsnap-clashes.d_per_clash", std::to_string(d));
    out.emplace_back("tarsnap-clashes.loop", log2_str(alpha * d));
    out.emplace_back("tarsnap.keyspace", "2^" + std::to_string(4 + full.prime_bits + 256 * full.prime_bits));
    out.emplace_back("borg-linear.unknowns", "2^13");
    out.emplace_back("borg-linear.clashes", "391");
    out.emplace_back("borg-poly.residual_loop", "2^" + std::to_string(full.buzhash_width - full.mask_bits));
    out.emplace_back("restic-solve.clashes", std::to_string(512 - full.rabin_degree));
    out.emplace_back("restic-solve.residual_loop", "2^" + std::to_string(full.rabin_degree - full.mask_bits));
    out.emplace_back("restic-gcd.gcds", "2^" + std::to_string(full.rabin_degree - full.mask_bits));
    return out;
}

}  // namespace rollbreak

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "rollbreak/attacks.hpp"
#include "rollbreak/leakage.hpp"

using namespace rollbreak;

namespace {

enum Exit { kOk = 0, kNoMatch = 1, kUsage = 2, kFormat = 3 };

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Opts {
    std::string scheme;
    std::string profile;
    std::uint64_t seed = 0;
    std::string compressor = "identity";
    std::string shard = "0/1";
    unsigned jobs = 1;
    std::vector<std::string> in;
    std::string out;
    std::vector<std::string> known;
    std::size_t max_candidates = 4096;

    std::string params;
    std::string attack;
    unsigned amplification = 3;
    bool ulen = false;
    std::string kind = "random";
    std::uint64_t length = 1 << 20;
    unsigned value = 1;
    std::string alphabet;
    std::size_t depth = 2;
    std::string index;
    double bits = 0;
    double mean = 0;
    unsigned clash_bits = 12;
    std::vector<std::string> slots;
    bool histogram = false;
    std::string prefix;
    std::vector<std::string> candidates;
    unsigned suffix_alphabet = 256;
    std::uint64_t max_suffix = std::uint64_t{1} << 20;
    std::string map;
    std::string observed;
    std::uint64_t archive = 0;
    std::string x;
    std::vector<std::uint64_t> sizes;
    std::uint32_t mss = 1460;
    std::string report_action = "table";
};

Bytes read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw UsageError("cannot open " + path);
    return Bytes(std::istreambuf_iterator<char>(f), {});
}

std::string read_text(const std::string& path) {
    auto b = read_file(path);
    return std::string(b.begin(), b.end());
}

std::ifstream open_in(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw UsageError("cannot open " + path);
    return f;
}

void emit(const Opts& o, const std::string& text) {
    if (o.out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(o.out, std::ios::binary);
    if (!f) throw UsageError("cannot write " + o.out);
    f << text;
}

void emit_bytes(const Opts& o, ByteView data) {
    if (o.out.empty()) {
        std::cout.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
        return;
    }
    std::ofstream f(o.out, std::ios::binary);
    if (!f) throw UsageError("cannot write " + o.out);
    f.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
}

const std::string& single_in(const Opts& o) {
    if (o.in.size() != 1) throw UsageError("exactly one --in is required");
    return o.in[0];
}

ParamsFile load_params(const Opts& o) {
    if (o.params.empty()) throw UsageError("--params is required");
    auto pf = parse_params(read_text(o.params));
    if (!o.profile.empty() && o.profile != pf.profile)
        throw FormatError("params file is for profile " + pf.profile + ", not " + o.profile);
    return pf;
}

ObservationLog load_log(const std::string& path) {
    auto f = open_in(path);
    return read_observations(f);
}

std::vector<std::uint64_t> split_u64(const std::string& s, char sep) {
    std::vector<std::uint64_t> out;
    std::istringstream is(s);
    std::string part;
    while (std::getline(is, part, sep)) {
        if (part.empty() || part.find_first_not_of("0123456789") != std::string::npos)
            throw UsageError("expected unsigned integers separated by '" + std::string(1, sep) + "': " + s);
        out.push_back(std::stoull(part));
    }
    return out;
}

std::vector<std::uint8_t> parse_byte_list(const std::string& s) {
    std::vector<std::uint8_t> out;
    for (auto v : split_u64(s, ',')) {
        if (v > 255) throw UsageError("byte value out of range: " + std::to_string(v));
        out.push_back(static_cast<std::uint8_t>(v));
    }
    return out;
}

Bytes parse_hex(const std::string& s) {
    if (s.size() % 2) throw UsageError("odd-length hex: " + s);
    Bytes out;
    for (std::size_t i = 0; i < s.size(); i += 2) {
        unsigned v = 0;
        if (std::sscanf(s.substr(i, 2).c_str(), "%2x", &v) != 1 ||
            s.substr(i, 2).find_first_not_of("0123456789abcdefABCDEF") != std::string::npos)
            throw UsageError("bad hex: " + s);
        out.push_back(static_cast<std::uint8_t>(v));
    }
    return out;
}

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

KnownMap known_map(const Opts& o, std::vector<Bytes>& storage) {
    if (o.known.empty()) throw UsageError("--known is required");
    storage.clear();
    for (const auto& k : o.known) storage.push_back(read_file(k));
    KnownMap m;
    for (std::size_t i = 0; i < storage.size(); ++i) m[i] = ByteView(storage[i]);
    return m;
}

const ScaleProfile& log_profile(const Opts& o, const ObservationLog& log) {
    if (!o.profile.empty() && o.profile != log.profile)
        throw FormatError("observation log is for profile " + log.profile + ", not " + o.profile);
    try {
        return profile(log.profile);
    } catch (const std::invalid_argument&) {
        throw FormatError("observation log names unknown profile " + log.profile);
    }
}

// ---------------------------------------------------------------------------

int cmd_keygen(const Opts& o) {
    const auto& prof = profile(o.profile.empty() ? "desk" : o.profile);
    emit(o, serialize_params(keygen(parse_scheme(o.scheme), o.seed, prof), prof.name));
    return kOk;
}

int cmd_gen(const Opts& o) {
    Bytes data;
    if (o.kind == "random") {
        Rng rng(derive_seed(o.seed, 0x6e));
        data.resize(o.length);
        for (auto& b : data) b = static_cast<std::uint8_t>(rng());
    } else if (o.kind == "two-valued") {
        if (o.value == 0 || o.value > 255) throw UsageError("--value must be in [1, 255]");
        data = gen_two_valued_plaintext(0, static_cast<std::uint8_t>(o.value), o.length, o.seed);
    } else {
        data = gen_small_alphabet(parse_byte_list(o.alphabet.empty() ? "65,67,71,84" : o.alphabet), o.length, o.seed);
    }
    emit_bytes(o, data);
    return kOk;
}

int cmd_chunk(const Opts& o) {
    auto pf = load_params(o);
    auto data = read_file(single_in(o));
    std::ostringstream os;
    write_records(os, scheme_of(pf.params), pf.profile, params_fingerprint(pf.params), chunk(pf.params, data));
    emit(o, os.str());
    return kOk;
}

int cmd_observe(const Opts& o) {
    auto pf = load_params(o);
    if (o.in.empty()) throw UsageError("at least one --in is required");
    ObservationLog log;
    log.scheme = scheme_of(pf.params);
    log.profile = pf.profile;
    log.compressor = o.compressor;
    const auto& model = compression_model(o.compressor);
    ObserveOptions opts;
    opts.record_ulen = o.ulen;
    opts.key = derive_seed(o.seed, 0x0b5);
    for (std::size_t i = 0; i < o.in.size(); ++i) observe_archive(log, pf.params, model, read_file(o.in[i]), i, opts);
    std::ostringstream os;
    write_observations(os, log);
    emit(o, os.str());
    return kOk;
}

int cmd_clashes(const Opts& o) {
    auto log = load_log(single_in(o));
    const auto& prof = log_profile(o, log);
    std::vector<Bytes> storage;
    auto known = known_map(o, storage);
    auto in = make_known_input(log, known, prof, o.max_candidates);
    std::ostringstream os;
    os << "sites=" << in.sites.size() << '\n';
    for (const auto& s : in.sites) {
        os << "site=" << s.archive_id << ',' << s.index << ' ';
        for (std::size_t i = 0; i < s.spans.size(); ++i)
            os << (i ? "|" : "") << s.spans[i].start << '-' << s.spans[i].end;
        os << '\n';
    }
    emit(o, os.str());
    return in.sites.empty() ? kNoMatch : kOk;
}

int cmd_attack(const Opts& o) {
    auto log = load_log(single_in(o));
    const auto& prof = log_profile(o, log);
    const Scheme want = o.attack.rfind("tarsnap", 0) == 0 ? Scheme::tarsnap
                        : o.attack.rfind("borg", 0) == 0  ? Scheme::borg
                                                          : Scheme::restic;
    if (log.scheme != want)
        throw FormatError("attack " + o.attack + " needs a " + std::string(to_string(want)) + " observation log");
    std::vector<Bytes> storage;
    auto known = known_map(o, storage);
    AttackOptions opt;
    opt.shard = parse_shard(o.shard);
    opt.jobs = std::max(1u, o.jobs);
    opt.amplification = o.amplification;
    AttackReport rep;
    if (o.attack == "tarsnap-naive" || o.attack == "tarsnap-clashes" || o.attack == "borg-poly") {
        auto in = make_two_valued_input(log, known, prof, o.max_candidates);
        rep = o.attack == "tarsnap-naive"     ? attack_tarsnap_naive(in, opt)
              : o.attack == "tarsnap-clashes" ? attack_tarsnap_clashes(in, opt)
                                              : attack_borg_poly(in, opt);
    } else {
        auto in = make_known_input(log, known, prof, o.max_candidates);
        rep = o.attack == "borg-linear"    ? attack_borg_linear(in, opt)
              : o.attack == "restic-solve" ? attack_restic_solve(in, opt)
                                           : attack_restic_gcd(in, opt);
    }
    emit(o, serialize_report(rep));
    if (!rep.success && !rep.diagnostic.empty()) std::cerr << rep.diagnostic << '\n';
    return rep.success ? kOk : kNoMatch;
}

int cmd_report(const Opts& o) {
    if (o.report_action == "estimates") {
        std::ostringstream os;
        for (const auto& [k, v] : full_scale_estimates()) os << k << '=' << v << '\n';
        emit(o, os.str());
        return kOk;
    }
    if (o.in.empty()) throw UsageError("at least one --in is required");
    std::vector<AttackReport> reps;
    for (const auto& p : o.in) reps.push_back(parse_report(read_text(p)));
    if (o.report_action == "merge") {
        auto merged = merge_reports(std::move(reps));
        emit(o, serialize_report(merged));
        return merged.success ? kOk : kNoMatch;
    }
    std::ostringstream os;
    os << "attack\tshard\tsuccess\tclashes\twork\tclosed_form\tfollowup\tpassed\tfailed\twinner\n";
    for (const auto& r : reps) {
        os << r.attack << '\t' << r.shard.index << '/' << r.shard.total << '\t' << r.success << '\t' << r.clashes_used
           << '\t' << r.work << '\t' << r.work_closed_form << '\t' << r.work_followup << '\t' << r.checks_passed
           << '\t' << r.checks_failed << '\t' << (r.winner ? std::to_string(*r.winner) : "-") << '\n';
    }
    emit(o, os.str());
    return kOk;
}

int cmd_leak_entropy(const Opts& o) {
    std::vector<std::uint64_t> lengths;
    std::ostringstream os;
    if (!o.in.empty()) {
        for (const auto& p : o.in) {
            for (const auto& r : load_log(p).records) lengths.push_back(r.clen);
        }
    } else {
        if (o.clash_bits == 0 || o.clash_bits >= 32) throw UsageError("--clash-bits must be in [1, 31]");
        GenericChunkModel gm;
        gm.clash_size = gm.ring_size >> o.clash_bits;
        gm.max_chunk = std::uint64_t{1} << 40;
        lengths = generic_chunk(gm, o.length, o.seed);
        if (!lengths.empty()) lengths.pop_back();
        os << "geometric_entropy=" << fmt_double(geometric_entropy(gm.clash_probability())) << '\n';
    }
    if (lengths.empty()) throw UsageError("no chunk lengths to measure");
    double mean = 0;
    for (auto l : lengths) mean += static_cast<double>(l);
    mean /= static_cast<double>(lengths.size());
    const double h = chunk_size_entropy(lengths);
    os << "samples=" << lengths.size() << "\nmean=" << fmt_double(mean) << "\nentropy=" << fmt_double(h)
       << "\nleakage_rate=" << fmt_double(leakage_rate(h, mean)) << '\n';
    emit(o, os.str());
    return kOk;
}

int cmd_leak_rate(const Opts& o) {
    const double r = leakage_rate(o.bits, o.mean);
    emit(o, "leakage_rate=" + fmt_double(r) + "\nlog2=" + fmt_double(r > 0 ? std::log2(r) : -INFINITY) + '\n');
    return kOk;
}

int cmd_leak_fingerprint(const Opts& o) {
    if (o.index.empty()) {
        auto idx = fingerprint_build(load_log(single_in(o)), o.depth);
        auto st = fingerprint_stats(idx);
        std::ostringstream os;
        write_fingerprint_csv(os, idx);
        emit(o, os.str());
        std::cerr << "files=" << st.files << " keys=" << st.keys << " singleton_fraction=" << st.singleton_fraction()
                  << '\n';
        return kOk;
    }
    auto f = open_in(o.index);
    auto idx = read_fingerprint_csv(f);
    auto log = load_log(single_in(o));
    std::ostringstream os;
    bool all = true;
    for (auto id : log.archive_ids()) {
        std::vector<std::uint64_t> obs;
        for (const auto& r : log.archive(id)) obs.push_back(r.clen);
        auto hits = fingerprint_match(idx, obs);
        all &= !hits.empty();
        os << "archive=" << id << " matches=";
        for (std::size_t i = 0; i < hits.size(); ++i) os << (i ? "," : "") << hits[i];
        if (hits.empty()) os << '-';
        os << '\n';
    }
    emit(o, os.str());
    return all ? kOk : kNoMatch;
}

int cmd_leak_variants(const Opts& o) {
    auto pf = load_params(o);
    auto ref = read_file(single_in(o));
    const auto& model = compression_model(o.compressor);
    std::vector<VariantSlot> slots;
    for (const auto& s : o.slots) {
        auto eq = s.find('=');
        if (eq == std::string::npos) throw UsageError("--slot expects offset=v1,v2,...");
        auto off = split_u64(s.substr(0, eq), ',');
        if (off.size() != 1) throw UsageError("--slot expects one offset");
        slots.push_back({off[0], parse_byte_list(s.substr(eq + 1))});
    }
    std::ostringstream os;
    if (o.histogram) {
        if (slots.empty()) throw UsageError("--histogram needs at least one --slot");
        std::vector<std::uint64_t> offs;
        for (const auto& s : slots) offs.push_back(s.offset);
        for (const auto& [len, count] : variant_tuple_histogram(ref, offs, slots[0].values, pf.params, model))
            os << "length=" << len << " tuples=" << count << '\n';
        emit(o, os.str());
        return kOk;
    }
    auto rep = variant_leak_assessment(ref, slots, pf.params, model);
    for (const auto& v : rep.variants) {
        os << "offset=" << v.offset << " values=" << v.values << " classes=" << v.classes
           << " boundaries_change=" << v.boundaries_change << " compressed_only=" << v.compressed_only
           << " bits=" << fmt_double(v.bits) << '\n';
    }
    os << "boundary_changing=" << rep.boundary_changing << "\ncompressed_only=" << rep.compressed_only
       << "\nleaked_bits=" << fmt_double(rep.leaked_bits) << "\ntotal_bits=" << fmt_double(rep.total_bits)
       << "\nleaked_fraction=" << fmt_double(rep.leaked_fraction()) << '\n';
    emit(o, os.str());
    return kOk;
}

int cmd_leak_craft(const Opts& o) {
    SecretSlotSpec spec;
    if (!o.prefix.empty()) spec.prefix = read_file(o.prefix);
    for (const auto& c : o.candidates) spec.candidates.push_back(parse_hex(c));
    if (spec.candidates.empty()) throw UsageError("at least two --candidate values are required");
    spec.width = spec.candidates[0].size();
    spec.alphabet = o.suffix_alphabet;
    spec.max_suffix = o.max_suffix;
    const auto& model = compression_model(o.compressor);
    DecisionMap map;
    if (!o.params.empty()) {
        map = craft_partial_chosen(load_params(o).params, spec, model, o.seed);
    } else {
        if (o.clash_bits == 0 || o.clash_bits >= 32) throw UsageError("--clash-bits must be in [1, 31]");
        GenericChunkModel gm;
        gm.clash_size = gm.ring_size >> o.clash_bits;
        map = craft_partial_chosen(gm, derive_seed(o.seed, 0x4e7), spec, model, o.seed);
    }
    std::ostringstream os;
    write_decision_map(os, map);
    emit(o, os.str());
    return map.complete ? kOk : kNoMatch;
}

int cmd_leak_identify(const Opts& o) {
    if (o.map.empty()) throw UsageError("--map is required");
    auto f = open_in(o.map);
    auto map = read_decision_map(f);
    std::vector<std::uint64_t> obs;
    if (!o.observed.empty()) {
        obs = split_u64(o.observed, ':');
    } else {
        for (const auto& r : load_log(single_in(o)).archive(o.archive)) obs.push_back(r.clen);
    }
    auto hit = identify_secret(map, obs);
    if (!hit) {
        std::cerr << "no candidate matches the observation\n";
        return kNoMatch;
    }
    emit(o, "candidate=" + std::to_string(*hit) + ' ' + to_hex(map.candidates[*hit]) + '\n');
    return kOk;
}

int cmd_dedup_oracle(const Opts& o) {
    auto pf = load_params(o);
    if (o.x.empty()) throw UsageError("--x is required");
    auto x = read_file(o.x);
    auto builder = read_file(single_in(o));
    DedupStore store;
    store.put(x);
    auto res = dedup_boundary_oracle(store, pf.params, x, builder);
    emit(o, "boundary=" + (res.boundary ? std::to_string(*res.boundary) : std::string("-")) +
                "\nprobes=" + std::to_string(res.probes) + '\n');
    return res.boundary ? kOk : kNoMatch;
}

int cmd_traffic_segment(const Opts& o) {
    std::vector<std::uint64_t> sizes = o.sizes;
    for (const auto& p : o.in) {
        auto f = open_in(p);
        std::string line;
        while (std::getline(f, line)) {
            if (line.empty()) continue;
            auto v = split_u64(line, ',');
            sizes.insert(sizes.end(), v.begin(), v.end());
        }
    }
    std::ostringstream os;
    write_trace(os, segment_requests(sizes, o.mss));
    emit(o, os.str());
    return kOk;
}

int cmd_traffic_recover(const Opts& o) {
    auto f = open_in(single_in(o));
    auto trace = read_trace(f);
    std::ostringstream os;
    for (const auto& r : recover_request_sizes(trace)) {
        os << r.size;
        if (!r.exact) {
            os << " inexact ";
            for (std::size_t i = 0; i < r.candidates.size(); ++i) os << (i ? "," : "") << r.candidates[i];
        }
        os << '\n';
    }
    emit(o, os.str());
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    Opts o;
    CLI::App app{"Parameter extraction and length leakage for content-defined chunking"};
    app.require_subcommand(1);
    const std::vector<std::string> schemes{"tarsnap", "borg", "restic"};
    const std::vector<std::string> profiles{"full", "desk", "tiny"};
    const std::vector<std::string> compressors{"identity", "toy-rle"};

    auto add_out = [&](CLI::App* s) { s->add_option("--out", o.out, "Output path (default stdout)"); };
    auto add_params = [&](CLI::App* s) { s->add_option("--params", o.params, "Params file from keygen"); };
    auto add_profile = [&](CLI::App* s) {
        s->add_option("--profile", o.profile, "Scale profile")->check(CLI::IsMember(profiles));
    };
    auto add_compressor = [&](CLI::App* s) {
        s->add_option("--compressor", o.compressor, "Compression model")->check(CLI::IsMember(compressors));
    };

    auto* keygen = app.add_subcommand("keygen", "Generate chunker parameters");
    keygen->add_option("--scheme", o.scheme)->required()->check(CLI::IsMember(schemes));
    add_profile(keygen);
    keygen->add_option("--seed", o.seed);
    add_out(keygen);

    auto* gen = app.add_subcommand("gen", "Generate a plaintext");
    gen->add_option("--kind", o.kind)->check(CLI::IsMember({"random", "two-valued", "small-alphabet"}));
    gen->add_option("--length", o.length);
    gen->add_option("--seed", o.seed);
    gen->add_option("--value", o.value, "Nonzero byte of a two-valued plaintext");
    gen->add_option("--alphabet", o.alphabet, "Comma-separated byte values");
    add_out(gen);

    auto* chunk_cmd = app.add_subcommand("chunk", "Chunk a file and print its records");
    add_params(chunk_cmd);
    add_profile(chunk_cmd);
    chunk_cmd->add_option("--in", o.in)->required();
    add_out(chunk_cmd);

    auto* observe = app.add_subcommand("observe", "Write the length log an observer sees");
    add_params(observe);
    add_profile(observe);
    observe->add_option("--in", o.in, "Archives, ids 0, 1, ... in order")->required();
    add_compressor(observe);
    observe->add_option("--seed", o.seed);
    observe->add_flag("--ulen", o.ulen, "Record uncompressed lengths");
    add_out(observe);

    auto* clashes = app.add_subcommand("clashes", "Extract clash sites from a log and known plaintexts");
    clashes->add_option("--in", o.in)->required();
    clashes->add_option("--known", o.known, "Plaintext of archive 0, 1, ...")->required();
    add_profile(clashes);
    clashes->add_option("--max-candidates", o.max_candidates);
    add_out(clashes);

    auto* attack = app.add_subcommand("attack", "Recover chunker parameters");
    attack->add_option("name", o.attack)
        ->required()
        ->check(CLI::IsMember({"tarsnap-naive", "tarsnap-clashes", "borg-linear", "borg-poly", "restic-solve",
                               "restic-gcd"}));
    attack->add_option("--in", o.in)->required();
    attack->add_option("--known", o.known, "Plaintext of archive 0, 1, ...")->required();
    add_profile(attack);
    attack->add_option("--shard", o.shard, "i/N");
    attack->add_option("--jobs", o.jobs);
    attack->add_option("--max-candidates", o.max_candidates);
    attack->add_option("--amplification", o.amplification, "Held-out clashes per check");
    attack->add_option("--seed", o.seed);
    add_out(attack);

    auto* report = app.add_subcommand("report", "Tabulate or merge attack reports");
    report->add_option("action", o.report_action)->check(CLI::IsMember({"table", "merge", "estimates"}));
    report->add_option("--in", o.in);
    add_out(report);

    auto* leak = app.add_subcommand("leak", "Leakage analyses");
    leak->require_subcommand(1);
    auto* entropy = leak->add_subcommand("entropy", "Chunk-size entropy of a log or of the generic model");
    entropy->add_option("--in", o.in);
    entropy->add_option("--clash-bits", o.clash_bits);
    entropy->add_option("--length", o.length);
    entropy->add_option("--seed", o.seed);
    add_out(entropy);
    auto* rate = leak->add_subcommand("rate", "Leakage rate from entropy and mean chunk size");
    rate->add_option("--bits", o.bits)->required();
    rate->add_option("--mean", o.mean)->required();
    add_out(rate);
    auto* fp = leak->add_subcommand("fingerprint", "Build a length index, or match a log against one");
    fp->add_option("--in", o.in)->required();
    fp->add_option("--depth", o.depth);
    fp->add_option("--index", o.index, "Match against this index");
    add_out(fp);
    auto* variants = leak->add_subcommand("variants", "Leakage from variants of a reference");
    add_params(variants);
    add_profile(variants);
    variants->add_option("--in", o.in)->required();
    variants->add_option("--slot", o.slots, "offset=v1,v2,...");
    variants->add_flag("--histogram", o.histogram, "Length histogram over value tuples");
    add_compressor(variants);
    add_out(variants);
    auto* craft = leak->add_subcommand("craft", "Craft a suffix that separates secret candidates");
    add_params(craft);
    add_profile(craft);
    craft->add_option("--prefix", o.prefix, "Known prefix file");
    craft->add_option("--candidate", o.candidates, "Hex candidate")->required();
    craft->add_option("--alphabet", o.suffix_alphabet);
    craft->add_option("--max-suffix", o.max_suffix);
    craft->add_option("--clash-bits", o.clash_bits, "Generic model when no params are given");
    add_compressor(craft);
    craft->add_option("--seed", o.seed);
    add_out(craft);
    auto* identify = leak->add_subcommand("identify", "Read a secret off a decision map");
    identify->add_option("--map", o.map)->required();
    identify->add_option("--observed", o.observed, "c1:c2:...");
    identify->add_option("--in", o.in);
    identify->add_option("--archive", o.archive);
    add_out(identify);

    auto* dedup = app.add_subcommand("dedup-oracle", "Locate a boundary through storage growth");
    add_params(dedup);
    add_profile(dedup);
    dedup->add_option("--x", o.x, "Chunk already in the store")->required();
    dedup->add_option("--in", o.in, "Query builder bytes")->required();
    add_out(dedup);

    auto* traffic = app.add_subcommand("traffic", "TCP segment traces");
    traffic->require_subcommand(1);
    auto* segment = traffic->add_subcommand("segment", "Segment request sizes");
    segment->add_option("--in", o.in, "Files of request sizes");
    segment->add_option("--sizes", o.sizes)->delimiter(',');
    segment->add_option("--mss", o.mss);
    add_out(segment);
    auto* recover = traffic->add_subcommand("recover", "Recover request sizes from a trace");
    recover->add_option("--in", o.in)->required();
    add_out(recover);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }

    try {
        if (*keygen) return cmd_keygen(o);
        if (*gen) return cmd_gen(o);
        if (*chunk_cmd) return cmd_chunk(o);
        if (*observe) return cmd_observe(o);
        if (*clashes) return cmd_clashes(o);
        if (*attack) return cmd_attack(o);
        if (*report) return cmd_report(o);
        if (*entropy) return cmd_leak_entropy(o);
        if (*rate) return cmd_leak_rate(o);
        if (*fp) return cmd_leak_fingerprint(o);
        if (*variants) return cmd_leak_variants(o);
        if (*craft) return cmd_leak_craft(o);
        if (*identify) return cmd_leak_identify(o);
        if (*dedup) return cmd_dedup_oracle(o);
        if (*segment) return cmd_traffic_segment(o);
        if (*recover) return cmd_traffic_recover(o);
    } catch (const FormatError& e) {
        std::cerr << "format error: " << e.what() << '\n';
        return kFormat;
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kUsage;
    }
    return kUsage;
}

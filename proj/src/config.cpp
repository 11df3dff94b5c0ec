#include "cmlab/config.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "cmlab/constructions.hpp"
#include "cmlab/figures.hpp"
#include "cmlab/kolmogorov.hpp"
#include "cmlab/oracle.hpp"

namespace cmlab {

using nlohmann::json;

namespace {

std::string line_col(const std::string& text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

// Typed field access with path-qualified errors.
class Node {
public:
    Node(const json& j, std::string path) : j_(j), path_(std::move(path)) {}

    const std::string& path() const { return path_; }
    const json& raw() const { return j_; }
    bool has(const std::string& key) const { return j_.is_object() && j_.contains(key); }

    Node at(const std::string& key) const {
        if (!j_.is_object()) fail("expected an object");
        if (!j_.contains(key)) throw ConfigError(join(key), "required field missing");
        return Node(j_.at(key), join(key));
    }
    Node at(std::size_t i) const { return Node(j_.at(i), path_ + "[" + std::to_string(i) + "]"); }

    std::string str() const {
        if (!j_.is_string()) fail("expected a string");
        return j_.get<std::string>();
    }
    std::uint64_t uint(std::uint64_t max = UINT64_MAX) const {
        if (!j_.is_number_unsigned() && !(j_.is_number_integer() && j_.get<std::int64_t>() >= 0))
            fail("expected a nonnegative integer");
        auto v = j_.get<std::uint64_t>();
        if (v > max) fail("value " + std::to_string(v) + " exceeds the limit " + std::to_string(max));
        return v;
    }
    std::int64_t integer() const {
        if (!j_.is_number_integer()) fail("expected an integer");
        return j_.get<std::int64_t>();
    }
    BitString bits() const {
        try {
            return BitString(str());
        } catch (const std::invalid_argument&) {
            fail("expected a binary string");
        }
    }
    Dyadic dyadic() const {
        if (j_.is_number_integer()) return Dyadic(static_cast<long>(j_.get<std::int64_t>()));
        try {
            return Dyadic::parse(str());
        } catch (const std::invalid_argument& e) {
            fail(e.what());
        }
    }
    std::size_t size() const {
        if (!j_.is_array()) fail("expected an array");
        return j_.size();
    }

    [[noreturn]] void fail(const std::string& what) const { throw ConfigError(path_, what); }

private:
    std::string join(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
    const json& j_;
    std::string path_;
};

std::vector<BitString> bit_list(const Node& n) {
    std::vector<BitString> out;
    for (std::size_t i = 0; i < n.size(); ++i) out.push_back(n.at(i).bits());
    return out;
}

LanguageView language(const Node& n) {
    const std::uint64_t horizon = n.has("horizon") ? n.at("horizon").uint() : (std::uint64_t{1} << 20);
    if (n.has("all")) return LanguageView::everything(horizon);
    if (n.has("members")) return LanguageView::from_members(bit_list(n.at("members")), horizon);
    if (n.has("indices")) {
        Node idx = n.at("indices");
        std::vector<std::uint64_t> v;
        for (std::size_t i = 0; i < idx.size(); ++i) v.push_back(idx.at(i).uint());
        return LanguageView::from_indices(v, horizon);
    }
    n.fail("language needs one of 'all', 'members' or 'indices'");
}

WitnessRelation relation(const Node& n) {
    const std::string type = n.at("type").str();
    if (type == "ksat") return ksat_relation(n.at("vars").uint(8));
    if (type == "finite_set") return finite_set_relation(bit_list(n.at("members")));
    n.at("type").fail("unknown relation type '" + type + "' (ksat | finite_set)");
}

CoverMembership membership(const Node& n) {
    const std::string m = n.str();
    if (m == "unique") return CoverMembership::Unique;
    if (m == "nondeterministic") return CoverMembership::Nondeterministic;
    if (m == "gap") return CoverMembership::GapIndicator;
    n.fail("unknown membership '" + m + "' (unique | nondeterministic | gap)");
}

std::size_t level(const Node& c) { return c.at("n").uint(kDefaultWitnessCap); }

}  // namespace

ExperimentConfig parse_config(const std::string& text, const std::string& source) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(source + ": " + line_col(text, e.byte == 0 ? 0 : e.byte - 1), e.what());
    }
    Node root(j, "");
    if (!j.is_object()) throw ConfigError(source, "top level must be an object");
    ExperimentConfig cfg;
    cfg.version = static_cast<int>(root.at("version").integer());
    if (cfg.version != kConfigVersion)
        root.at("version").fail("unsupported version " + std::to_string(cfg.version) + " (expected " +
                                std::to_string(kConfigVersion) + ")");
    static const std::vector<std::string> known = {"version", "name",     "construction", "family", "depth",
                                                   "format",  "precision", "seed",        "success", "point"};
    for (auto it = j.begin(); it != j.end(); ++it)
        if (std::find(known.begin(), known.end(), it.key()) == known.end())
            throw ConfigError(it.key(), "unknown top-level field");
    if (root.has("name")) cfg.name = root.at("name").str();
    if (root.has("construction")) {
        cfg.construction = j.at("construction");
        if (!cfg.construction.is_object()) root.at("construction").fail("expected an object");
        root.at("construction").at("type").str();
    }
    if (root.has("family")) {
        cfg.family = j.at("family");
        root.at("family").at("type").str();
    }
    if (root.has("depth")) cfg.depth = root.at("depth").uint(24);
    if (root.has("format")) {
        cfg.format = root.at("format").str();
        if (cfg.format != "csv" && cfg.format != "json" && cfg.format != "dot")
            root.at("format").fail("format must be csv, json or dot");
    }
    if (root.has("precision")) cfg.precision = static_cast<unsigned>(root.at("precision").uint(64));
    if (root.has("seed")) cfg.seed = root.at("seed").uint();
    if (root.has("success")) {
        Node s = root.at("success");
        cfg.sequence = s.at("sequence").bits();
        if (s.has("s")) cfg.s = s.at("s").dyadic();
    }
    if (root.has("point")) cfg.point = root.at("point").bits();
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path, "cannot open config file");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path);
}

Martingale build_construction(const ExperimentConfig& cfg) {
    if (cfg.construction.is_null()) throw ConfigError("construction", "required field missing");
    Node c(cfg.construction, "construction");
    const std::string type = c.at("type").str();
    if (type == "figure") {
        const auto id = c.at("id").uint();
        if (id < 1 || id > 5) c.at("id").fail("figure id must be 1..5");
        return figures::figure(static_cast<int>(id)).martingale;
    }
    if (type == "cover") {
        const std::size_t n = level(c);
        CoverSpec spec;
        if (c.has("members")) {
            auto members = bit_list(c.at("members"));
            for (std::size_t i = 0; i < members.size(); ++i)
                if (members[i].size() != n) c.at("members").at(i).fail("member length differs from n");
            spec = cover_from_set(n, members);
        } else {
            CoverMembership how = c.has("membership") ? membership(c.at("membership")) : CoverMembership::Nondeterministic;
            spec = cover_from_relation(relation(c.at("relation")), n, how);
        }
        return cover_martingale(spec);
    }
    if (type == "condexp") {
        const std::size_t n = level(c);
        if (c.has("values")) {
            Node v = c.at("values");
            if (!v.raw().is_object()) v.fail("expected an object mapping strings to counts");
            std::map<std::string, std::int64_t> values;
            for (auto it = v.raw().begin(); it != v.raw().end(); ++it) {
                Node e = v.at(it.key());
                BitString x;
                try {
                    x = BitString(it.key());
                } catch (const std::invalid_argument&) {
                    e.fail("key is not a binary string");
                }
                if (x.size() != n) e.fail("key length differs from n");
                const auto val = e.integer();
                if (val < 0) e.fail("counts must be nonnegative");
                values[it.key()] = val;
            }
            return condexp_martingale(
                [values](const BitString& x) {
                    auto it = values.find(x.str());
                    return it == values.end() ? std::int64_t{0} : it->second;
                },
                n);
        }
        const CountMode mode = c.has("mode") ? parse_count_mode(c.at("mode").str()) : CountMode::WitnessCount;
        const char* cls = mode == CountMode::WitnessCount ? "#P" : mode == CountMode::DistinctOutputCount ? "SpanP" : "GapP";
        return condexp_martingale(counting_function(relation(c.at("relation")), mode), n, cls);
    }
    if (type == "subset") return subset_martingale(language(c.at("language")), level(c));
    if (type == "biimmunity") return biimmunity_martingale(language(c.at("language")));
    if (type == "acceptance") {
        const auto q = c.at("q").uint(62);
        const auto correct = c.at("correct").uint();
        if (correct > (std::uint64_t{1} << q)) c.at("correct").fail("correct count exceeds 2^q");
        return acceptance_martingale(AcceptanceSpec::bounded_error(
            language(c.at("language")), [correct](std::size_t) { return mpz_class(static_cast<unsigned long>(correct)); },
            [q](std::size_t) { return static_cast<std::size_t>(q); }));
    }
    if (type == "kt_cover") {
        const std::size_t n = c.at("n").uint(20);
        const long f = static_cast<long>(c.at("f").integer());
        const Budget t = c.has("budget") ? Budget::parse(c.at("budget").str()) : Budget{};
        return kt_cover_martingale(n, [f](std::size_t) { return f; }, t);
    }
    c.at("type").fail("unknown construction type '" + type +
                      "' (figure | cover | condexp | subset | biimmunity | acceptance | kt_cover)");
}

FamilyBundle build_family(const ExperimentConfig& cfg) {
    if (!cfg.family) throw ConfigError("family", "required field missing");
    Node fam(*cfg.family, "family");
    const std::string type = fam.at("type").str();
    const std::size_t first = fam.has("first") ? fam.at("first").uint(1u << 20) : 1;
    std::optional<std::size_t> last;
    if (fam.has("last")) last = fam.at("last").uint(1u << 20);
    if (last && *last < first) fam.at("last").fail("last precedes first");

    if (type == "geometric") {
        // d_n = constant 2^{-k n}
        const long k = static_cast<long>(fam.has("k") ? fam.at("k").uint(32) : 1);
        if (k == 0) fam.at("k").fail("k must be positive");
        MartingaleFamily f(
            "geometric(2^-" + std::to_string(k) + "n)",
            [k](std::size_t n) { return constant_martingale(Dyadic::pow2(-k * static_cast<long>(n))); },
            [k](std::size_t n) { return Dyadic::pow2(-k * static_cast<long>(n)); }, first, last);
        // Tail past M is at most 2^{-kM}.
        ConvergenceModulus mod{"m(w, i) = ceil(i / k)", [k, first](const BitString&, unsigned i) {
                                   return std::max<std::size_t>(first, static_cast<std::size_t>((i + k - 1) / k));
                               }};
        auto closed = [k, first, last](const BitString&) -> std::optional<Dyadic> {
            if (last) {
                Dyadic s;
                for (std::size_t n = first; n <= *last; ++n) s += Dyadic::pow2(-k * static_cast<long>(n));
                return s;
            }
            if (k == 1) return Dyadic::pow2(-(static_cast<long>(first) - 1));
            return std::nullopt;
        };
        return FamilyBundle{f, mod, closed};
    }
    if (type == "prefix_cover") {
        // A_{=n} = strings of length n that begin with 1^{k(n)}, k(n) = min(n, ceil(a n)).
        const Dyadic a = fam.has("a") ? fam.at("a").dyadic() : Dyadic::make(1, 1);
        if (a.sign() <= 0 || a > Dyadic(1)) fam.at("a").fail("a must lie in (0, 1]");
        auto k_of = [a](std::size_t n) {
            auto k = (a * Dyadic(static_cast<long>(n))).ceil().get_ui();
            return std::min<std::size_t>(n, k);
        };
        MartingaleFamily f(
            "prefix-cover(a = " + a.fraction() + ")",
            [k_of](std::size_t n) {
                const std::size_t k = k_of(n);
                CoverSpec spec;
                spec.name = "1^" + std::to_string(k) + "-prefixed, n = " + std::to_string(n);
                spec.n = n;
                spec.member = [k](const BitString& x) { return x.prefix(k) == BitString::ones(k); };
                spec.counter = ExtensionCounter{n, [n, k](const BitString& w) {
                    const std::size_t m = std::min(w.size(), k);
                    if (w.prefix(m) != BitString::ones(m)) return mpz_class(0);
                    return mpz_class(mpz_class(1) << static_cast<mp_bitcnt_t>(n - std::max(w.size(), k)));
                }};
                return cover_martingale(spec);
            },
            [k_of](std::size_t n) { return Dyadic::pow2(-static_cast<long>(k_of(n))); }, first, last);
        // d_n(w) <= 2^{|w| - a n} and sum_{n > M} 2^{-a n} <= 2^{-a M} * 2 / a.
        long c = 2;
        if (a < Dyadic(1)) c += -floor_log2(a.to_rational());
        ConvergenceModulus mod{"m(w, i) = ceil((|w| + i + " + std::to_string(c) + ") / a)",
                               [a, c, first](const BitString& w, unsigned i) {
                                   Dyadic num(static_cast<long>(w.size() + i) + c);
                                   mpq_class q = num.to_rational() / a.to_rational();
                                   mpz_class m;
                                   mpz_cdiv_q(m.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
                                   return std::max<std::size_t>(first, m.get_ui());
                               }};
        auto closed = [f = f, last](const BitString& w) -> std::optional<Dyadic> {
            if (!last) return std::nullopt;
            Dyadic s;
            for (std::size_t n = f.first(); n <= *last; ++n) s += f.at(n).value(w);
            return s;
        };
        return FamilyBundle{f, mod, closed};
    }
    fam.at("type").fail("unknown family type '" + type + "' (geometric | prefix_cover)");
}

}  // namespace cmlab

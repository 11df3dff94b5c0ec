#include "cmlab/kolmogorov.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cmlab/constructions.hpp"

namespace cmlab {

std::uint64_t Budget::operator()(std::size_t n) const {
    std::uint64_t p = 1;
    for (std::uint64_t i = 0; i < k; ++i) p *= n;
    return a * p + b;
}

std::string Budget::str() const {
    return std::to_string(a) + "*n^" + std::to_string(k) + "+" + std::to_string(b);
}

Budget Budget::parse(const std::string& text) {
    Budget t;
    char c1 = 0, c2 = 0;
    std::istringstream is(text);
    if (!(is >> t.a >> c1 >> t.k >> c2 >> t.b) || c1 != ',' || c2 != ',' || !is.eof())
        throw std::invalid_argument("budget must be 'a,k,b', got '" + text + "'");
    return t;
}

Budget pairing_budget(const Budget& t) {
    // A pair of programs for x and y spends at most 2n + 6 steps on its header
    // (|γ(ℓ)| <= 2 log2(n + 1) + 1) plus t(|x|) + t(|y|) <= 2 t(n).
    if (t.k >= 1) return Budget{2 * t.a + 2, t.k, 2 * t.b + 6};
    return Budget{2, 1, 2 * (t.a + t.b) + 6};
}

std::optional<std::size_t> kt(const BitString& x, const Budget& t, std::size_t max_length) {
    if (x.size() > max_length)
        throw CapExceeded("K^t search limited to |x| <= " + std::to_string(max_length));
    const std::uint64_t budget = t(x.size());
    const std::size_t limit = x.size() + machine::kLiteralOverhead;
    for (std::size_t len = 1; len <= limit; ++len) {
        BitString p = BitString::zeros(len);
        do {
            auto r = machine::run(p, budget);
            if (r.halted && r.output == x) return len;
        } while (p.increment());
    }
    return std::nullopt;
}

KtTable KtTable::build(std::size_t L, const Budget& t) {
    if (L > 18) throw CapExceeded("K^t tables limited to L <= 18");
    KtTable tab;
    tab.L_ = L;
    tab.t_ = t;
    tab.entries_.assign((std::size_t{1} << (L + 1)) - 1, -1);
    const std::uint64_t budget = t(L);
    for (std::size_t len = 1; len <= L + machine::kLiteralOverhead; ++len) {
        BitString p = BitString::zeros(len);
        do {
            auto r = machine::run(p, budget);
            if (!r.halted || r.output.size() > L) continue;
            const std::size_t n = r.output.size();
            if (r.steps > t(n) || len > n + machine::kLiteralOverhead) continue;
            int& e = tab.entries_[index_of(r.output)];
            if (e < 0 || static_cast<std::size_t>(e) > len) e = static_cast<int>(len);
        } while (p.increment());
    }
    return tab;
}

std::optional<std::size_t> KtTable::at(const BitString& x) const {
    if (x.size() > L_) throw CapExceeded("string longer than the table's L = " + std::to_string(L_));
    int e = entries_[index_of(x)];
    if (e < 0) return std::nullopt;
    return static_cast<std::size_t>(e);
}

std::string KtTable::to_csv() const {
    std::ostringstream os;
    os << "# machine=" << machine::version_tag() << " t=" << t_.a << ',' << t_.k << ',' << t_.b << " L=" << L_ << "\n";
    os << "string,kt\n";
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        os << string_index(i).str() << ',';
        if (entries_[i] >= 0) os << entries_[i];
        os << '\n';
    }
    return os.str();
}

KtTable KtTable::from_csv(const std::string& csv) {
    std::istringstream is(csv);
    std::string header, cols;
    std::getline(is, header);
    std::getline(is, cols);
    const std::string tag = "# machine=" + machine::version_tag() + " t=";
    if (header.rfind(tag, 0) != 0) throw std::invalid_argument("K^t table header does not match " + machine::version_tag());
    std::istringstream hs(header.substr(tag.size()));
    std::string budget, lpart;
    hs >> budget >> lpart;
    KtTable tab;
    tab.t_ = Budget::parse(budget);
    if (lpart.rfind("L=", 0) != 0) throw std::invalid_argument("K^t table header lacks L");
    tab.L_ = std::stoul(lpart.substr(2));
    if (tab.L_ > 18) throw CapExceeded("K^t tables limited to L <= 18");
    tab.entries_.assign((std::size_t{1} << (tab.L_ + 1)) - 1, -1);
    std::string line;
    while (std::getline(is, line)) {
        auto comma = line.find(',');
        if (comma == std::string::npos) throw std::invalid_argument("bad K^t row '" + line + "'");
        BitString x(line.substr(0, comma));
        std::string v = line.substr(comma + 1);
        if (x.size() > tab.L_) throw std::invalid_argument("row beyond L: '" + line + "'");
        tab.entries_[index_of(x)] = v.empty() ? -1 : std::stoi(v);
    }
    return tab;
}

bool KtTable::literal_bound_holds() const {
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        std::size_t n = length_of_index(i);
        if (entries_[i] < 0 || static_cast<std::size_t>(entries_[i]) > n + machine::kLiteralOverhead) return false;
    }
    return true;
}

KtTable load_or_build_kt_table(std::size_t L, const Budget& t, const std::string& cache_dir) {
    if (cache_dir.empty()) return KtTable::build(L, t);
    const auto path = std::filesystem::path(cache_dir) /
                      ("kt_" + machine::version_tag() + "_t" + std::to_string(t.a) + "-" + std::to_string(t.k) + "-" +
                       std::to_string(t.b) + "_L" + std::to_string(L) + ".csv");
    if (std::filesystem::exists(path)) {
        std::ifstream in(path);
        std::stringstream ss;
        ss << in.rdbuf();
        return KtTable::from_csv(ss.str());
    }
    KtTable tab = KtTable::build(L, t);
    std::filesystem::create_directories(cache_dir);
    std::ofstream(path) << tab.to_csv();
    return tab;
}

WitnessRelation kolmogorov_relation(std::size_t bound, const Budget& t) {
    WitnessRelation rel;
    rel.name = "kolmogorov(<" + std::to_string(bound) + ", " + t.str() + ")";
    rel.witness_length = [bound](std::size_t) { return bound; };
    rel.verify = [t](const BitString& x, const BitString& y) {
        // y = 0^j 1 π encodes each program π of length < |y| exactly once.
        std::size_t first = y.str().find('1');
        if (first == std::string::npos) return false;
        auto r = machine::run(y.suffix_from(first + 1), t(x.size()));
        return r.halted && r.output == x;
    };
    rel.emit = [](const BitString& x, const BitString&) { return x; };
    return rel;
}

Martingale kt_cover_martingale(std::size_t n, const std::function<long(std::size_t)>& f, const Budget& t) {
    if (n > 20) throw CapExceeded("K^t cover martingale limited to n <= 20");
    const long bound = static_cast<long>(n) - f(n);
    std::vector<std::int64_t> g(std::size_t{1} << n, 0);
    const std::uint64_t budget = t(n);
    for (long len = 1; len < bound; ++len) {
        BitString p = BitString::zeros(static_cast<std::size_t>(len));
        do {
            auto r = machine::run(p, budget);
            if (r.halted && r.output.size() == n) ++g[r.output.to_uint()];
        } while (p.increment());
    }
    auto counter = tabulate_leaves(n, [&g](const BitString& x) { return g[x.to_uint()]; }, 22);
    Martingale m = leveled_martingale("kt-cover(n = " + std::to_string(n) + ", bound " + std::to_string(bound) + ")", "#P",
                                      std::move(counter));
    m.metadata = "budget " + t.str() + ", " + machine::version_tag();
    return m;
}

KRate k_rate(const BitString& S, const Budget& t, std::size_t max_length) {
    if (S.empty()) throw std::invalid_argument("k_rate needs a nonempty sequence prefix");
    if (S.size() > max_length) throw CapExceeded("k_rate limited to |S| <= " + std::to_string(max_length));
    KRate out;
    for (std::size_t n = 1; n <= S.size(); ++n) {
        auto k = kt(S.prefix(n), t, max_length);
        if (!k) throw std::domain_error("budget " + t.str() + " too small for the literal program at n = " + std::to_string(n));
        out.kt.push_back(*k);
        mpq_class r(static_cast<long>(*k), static_cast<long>(n));
        r.canonicalize();
        if (out.ratio.empty() || r < out.min) out.min = r;
        if (out.ratio.empty() || r > out.max) out.max = r;
        out.ratio.push_back(r);
    }
    return out;
}

}  // namespace cmlab

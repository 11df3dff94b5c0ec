#include "cmlab/figures.hpp"

#include <map>

#include "cmlab/constructions.hpp"

namespace cmlab::figures {

namespace {

// Level-order node tables, transcribed from the reference trees.
const std::vector<GoldenNode> kCover = {
    {"", "5/16"},  {"0", "1/2"},   {"1", "1/8"},   {"00", "3/4"},  {"01", "1/4"},  {"10", "0"},
    {"11", "1/4"}, {"000", "1/2"}, {"001", "1"},   {"010", "0"},   {"011", "1/2"}, {"100", "0"},
    {"101", "0"},  {"110", "1/2"}, {"111", "0"},   {"0000", "0"},  {"0001", "1"},  {"0010", "1"},
    {"0011", "1"}, {"0100", "0"},  {"0101", "0"},  {"0110", "1"},  {"0111", "0"},  {"1000", "0"},
    {"1001", "0"}, {"1010", "0"},  {"1011", "0"},  {"1100", "0"},  {"1101", "1"},  {"1110", "0"},
    {"1111", "0"},
};

const std::vector<GoldenNode> kCondexp = {
    {"", "7/8"},   {"0", "5/4"},   {"1", "1/2"},   {"00", "7/4"},  {"01", "3/4"},  {"10", "0"},
    {"11", "1"},   {"000", "1"},   {"001", "5/2"}, {"010", "0"},   {"011", "3/2"}, {"100", "0"},
    {"101", "0"},  {"110", "2"},   {"111", "0"},   {"0000", "0"},  {"0001", "2"},  {"0010", "1"},
    {"0011", "4"}, {"0100", "0"},  {"0101", "0"},  {"0110", "3"},  {"0111", "0"},  {"1000", "0"},
    {"1001", "0"}, {"1010", "0"},  {"1011", "0"},  {"1100", "0"},  {"1101", "4"},  {"1110", "0"},
    {"1111", "0"},
};

const std::vector<GoldenNode> kSubset = {
    {"", "1/4"},   {"0", "1/2"},  {"1", "0"},    {"00", "1/2"}, {"01", "1/2"}, {"10", "0"},   {"11", "0"},
    {"000", "1"},  {"001", "0"},  {"010", "1"},  {"011", "0"},  {"100", "0"},  {"101", "0"},  {"110", "0"},
    {"111", "0"},  {"0000", "1"}, {"0001", "1"}, {"0010", "0"}, {"0011", "0"}, {"0100", "1"}, {"0101", "1"},
    {"0110", "0"}, {"0111", "0"}, {"1000", "0"}, {"1001", "0"}, {"1010", "0"}, {"1011", "0"}, {"1100", "0"},
    {"1101", "0"}, {"1110", "0"}, {"1111", "0"},
};

const std::vector<GoldenNode> kAcceptance = {
    {"", "1"},         {"0", "3/2"},      {"1", "1/2"},      {"00", "3/4"},     {"01", "9/4"},
    {"10", "1/4"},     {"11", "3/4"},     {"000", "9/8"},    {"001", "3/8"},    {"010", "27/8"},
    {"011", "9/8"},    {"100", "3/8"},    {"101", "1/8"},    {"110", "9/8"},    {"111", "3/8"},
    {"0000", "9/16"},  {"0001", "27/16"}, {"0010", "3/16"},  {"0011", "9/16"},  {"0100", "27/16"},
    {"0101", "81/16"}, {"0110", "9/16"},  {"0111", "27/16"}, {"1000", "3/16"},  {"1001", "9/16"},
    {"1010", "1/16"},  {"1011", "3/16"},  {"1100", "9/16"},  {"1101", "27/16"}, {"1110", "3/16"},
    {"1111", "9/16"},
};

const std::vector<GoldenNode> kBiimmunity = {
    {"", "1"},     {"0", "1"},    {"1", "1"},    {"00", "0"},   {"01", "2"},   {"10", "0"},   {"11", "2"},
    {"000", "0"},  {"001", "0"},  {"010", "2"},  {"011", "2"},  {"100", "0"},  {"101", "0"},  {"110", "2"},
    {"111", "2"},  {"0000", "0"}, {"0001", "0"}, {"0010", "0"}, {"0011", "0"}, {"0100", "0"}, {"0101", "4"},
    {"0110", "0"}, {"0111", "4"}, {"1000", "0"}, {"1001", "0"}, {"1010", "0"}, {"1011", "0"}, {"1100", "0"},
    {"1101", "4"}, {"1110", "0"}, {"1111", "4"},
};

std::vector<BitString> strings(std::initializer_list<const char*> xs) {
    std::vector<BitString> out;
    for (auto x : xs) out.emplace_back(x);
    return out;
}

}  // namespace

LanguageView reference_language(std::uint64_t horizon) {
    return LanguageView::from_indices({1, 3}, horizon, "{s1,s3}");
}

Figure figure(int id) {
    Figure f;
    f.id = id;
    switch (id) {
        case 1: {
            f.title = "cover martingale";
            f.martingale = cover_martingale(cover_from_set(4, strings({"0001", "0010", "0011", "0110", "1101"})));
            f.golden = kCover;
            break;
        }
        case 2: {
            f.title = "conditional expectation martingale";
            std::map<std::string, std::int64_t> values = {
                {"0001", 2}, {"0010", 1}, {"0011", 4}, {"0110", 3}, {"1101", 4}};
            f.martingale = condexp_martingale(
                [values](const BitString& x) {
                    auto it = values.find(x.str());
                    return it == values.end() ? std::int64_t{0} : it->second;
                },
                4);
            f.golden = kCondexp;
            break;
        }
        case 3: {
            f.title = "subset martingale";
            f.martingale = subset_martingale(reference_language(4), 4);
            f.golden = kSubset;
            break;
        }
        case 4: {
            f.title = "acceptance probability martingale";
            // Correct with probability 3/4 on every string.
            f.martingale = acceptance_martingale(AcceptanceSpec::bounded_error(
                reference_language(1u << 20), [](std::size_t) { return mpz_class(3); },
                [](std::size_t) { return std::size_t{2}; }));
            f.golden = kAcceptance;
            f.highlight = BitString("0101");
            break;
        }
        case 5: {
            f.title = "bi-immunity martingale";
            f.martingale = biimmunity_martingale(reference_language(1u << 20));
            f.golden = kBiimmunity;
            break;
        }
        default:
            throw std::invalid_argument("figure id must be 1..5, got " + std::to_string(id));
    }
    f.martingale.name = "figure " + std::to_string(id) + ": " + f.title;
    return f;
}

std::vector<Mismatch> compare(const Figure& f) {
    std::vector<Mismatch> out;
    for (const auto& g : f.golden) {
        BitString w(g.node);
        Dyadic expected = Dyadic::parse(g.value);
        Dyadic actual = f.martingale.value(w);
        if (!(expected == actual)) out.push_back({w.display(), expected.fraction(), actual.fraction()});
    }
    if (f.golden.size() != 31) out.push_back({"(table)", "31 nodes", std::to_string(f.golden.size()) + " nodes"});
    return out;
}

}  // namespace cmlab::figures

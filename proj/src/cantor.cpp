#include "cmlab/cantor.hpp"

#include <algorithm>
#include <bit>
#include <set>

namespace cmlab {

BitString::BitString(std::string bits) : bits_(std::move(bits)) {
    for (char c : bits_)
        if (c != '0' && c != '1') throw std::invalid_argument("bit string contains '" + std::string(1, c) + "'");
}

BitString BitString::from_uint(std::uint64_t value, std::size_t len) {
    std::string s(len, '0');
    for (std::size_t i = 0; i < len && i < 64; ++i)
        if ((value >> i) & 1u) s[len - 1 - i] = '1';
    return BitString(std::move(s), Trusted{});
}

BitString BitString::prefix(std::size_t n) const {
    if (n >= bits_.size()) return *this;
    return BitString(bits_.substr(0, n), Trusted{});
}

BitString BitString::suffix_from(std::size_t start) const {
    if (start >= bits_.size()) return {};
    return BitString(bits_.substr(start), Trusted{});
}

BitString BitString::child(int bit) const {
    BitString r = *this;
    r.push_back(bit);
    return r;
}

bool BitString::increment() {
    for (std::size_t i = bits_.size(); i-- > 0;) {
        if (bits_[i] == '0') {
            bits_[i] = '1';
            return true;
        }
        bits_[i] = '0';
    }
    return false;
}

bool BitString::is_prefix_of(const BitString& o) const {
    return bits_.size() <= o.bits_.size() && std::equal(bits_.begin(), bits_.end(), o.bits_.begin());
}

std::size_t BitString::count_ones() const { return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), '1')); }

std::uint64_t BitString::to_uint() const {
    if (bits_.size() > 64) throw std::length_error("bit string longer than 64 bits");
    std::uint64_t v = 0;
    for (char c : bits_) v = (v << 1) | static_cast<std::uint64_t>(c == '1');
    return v;
}

std::vector<BitString> all_strings(std::size_t n) {
    if (n > 30) throw std::length_error("refusing to enumerate 2^" + std::to_string(n) + " strings");
    std::vector<BitString> out;
    out.reserve(std::size_t{1} << n);
    for (std::uint64_t v = 0; v < (std::uint64_t{1} << n); ++v) out.push_back(BitString::from_uint(v, n));
    return out;
}

std::size_t length_of_index(std::uint64_t i) {
    return static_cast<std::size_t>(std::bit_width(i + 1) - 1);
}

BitString string_index(std::uint64_t i) {
    // s_i is the binary expansion of i + 1 with its leading 1 removed.
    std::size_t len = length_of_index(i);
    return BitString::from_uint((i + 1) - (std::uint64_t{1} << len), len);
}

std::uint64_t index_of(const BitString& x) {
    if (x.size() >= 63) throw std::length_error("string too long for a 64-bit index");
    return ((std::uint64_t{1} << x.size()) | x.to_uint()) - 1;
}

LanguageView::LanguageView(std::string name, Predicate member, std::uint64_t horizon)
    : name_(std::move(name)), member_(std::move(member)), horizon_(horizon) {}

LanguageView LanguageView::from_members(const std::vector<BitString>& members, std::uint64_t horizon,
                                        std::string name) {
    auto set = std::make_shared<std::set<BitString>>(members.begin(), members.end());
    return LanguageView(std::move(name), [set](const BitString& x) { return set->count(x) > 0; }, horizon);
}

LanguageView LanguageView::from_indices(const std::vector<std::uint64_t>& indices, std::uint64_t horizon,
                                        std::string name) {
    std::vector<BitString> m;
    for (auto i : indices) m.push_back(string_index(i));
    return from_members(m, horizon, std::move(name));
}

LanguageView LanguageView::everything(std::uint64_t horizon) {
    return LanguageView("everything", [](const BitString&) { return true; }, horizon);
}

LanguageView LanguageView::nothing(std::uint64_t horizon) {
    return LanguageView("nothing", [](const BitString&) { return false; }, horizon);
}

bool LanguageView::contains_index(std::uint64_t i) const {
    if (i >= horizon_)
        throw HorizonExceeded("query s_" + std::to_string(i) + " beyond horizon " + std::to_string(horizon_) +
                              " of language '" + name_ + "'");
    return member_(string_index(i));
}

bool LanguageView::contains(const BitString& x) const { return contains_index(index_of(x)); }

std::vector<BitString> LanguageView::members() const {
    std::vector<BitString> out;
    for (std::uint64_t i = 0; i < horizon_; ++i)
        if (contains_index(i)) out.push_back(string_index(i));
    return out;
}

std::uint64_t census(const LanguageView& B, std::uint64_t n) {
    if (n > B.horizon())
        throw HorizonExceeded("census at " + std::to_string(n) + " beyond horizon " + std::to_string(B.horizon()));
    std::uint64_t c = 0;
    for (std::uint64_t i = 0; i < n; ++i) c += B.contains_index(i);
    return c;
}

LanguageView language_of(const BitString& w) {
    return LanguageView("L(" + w.str() + ")",
                        [w](const BitString& x) {
                            std::uint64_t i = index_of(x);
                            return i < w.size() && w[i] == 1;
                        },
                        w.size());
}

BitString char_prefix(const LanguageView& A, std::uint64_t n) {
    if (n > A.horizon())
        throw HorizonExceeded("prefix of length " + std::to_string(n) + " beyond horizon " +
                              std::to_string(A.horizon()));
    BitString out;
    for (std::uint64_t i = 0; i < n; ++i) out.push_back(A.contains_index(i));
    return out;
}

}  // namespace cmlab

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cmlab/martingale.hpp"

namespace cmlab::figures {

struct GoldenNode {
    const char* node;   // "" is the root
    const char* value;  // p/q text
};

struct Figure {
    int id = 0;
    std::string title;
    std::size_t depth = 4;
    Martingale martingale;
    std::vector<GoldenNode> golden;      // every node of depth <= 4
    std::optional<BitString> highlight;  // path drawn in the rendered tree
};

struct Mismatch {
    std::string node, expected, actual;
};

// Exact parameterizations behind the five reference trees.
Figure figure(int id);
std::vector<Mismatch> compare(const Figure& f);

// The target language {s_1, s_3} shared by figures 3, 4 and 5.
LanguageView reference_language(std::uint64_t horizon);

}  // namespace cmlab::figures

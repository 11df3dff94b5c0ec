#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "cmlab/cantor.hpp"
#include "cmlab/combinators.hpp"
#include "cmlab/dyadic.hpp"
#include "cmlab/martingale.hpp"

namespace cmlab {

// Parse and schema errors. `where` is "line L, column C" for syntax errors
// and a field path such as "construction.members[2]" for schema errors.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string where, const std::string& what)
        : std::runtime_error(where + ": " + what), where_(std::move(where)) {}
    const std::string& where() const { return where_; }

private:
    std::string where_;
};

inline constexpr int kConfigVersion = 1;

struct ExperimentConfig {
    int version = kConfigVersion;
    std::string name;
    nlohmann::json construction;  // object with a "type" field
    std::optional<nlohmann::json> family;
    std::size_t depth = 4;
    std::string format = "csv";  // csv | json | dot
    unsigned precision = 20;
    std::uint64_t seed = 1;
    std::optional<BitString> sequence;  // success scans
    Dyadic s = Dyadic::make(1, 1);      // success scans
    std::optional<BitString> point;     // sum queries
};

ExperimentConfig parse_config(const std::string& text, const std::string& source = "<config>");
ExperimentConfig load_config(const std::string& path);

Martingale build_construction(const ExperimentConfig& cfg);

struct FamilyBundle {
    MartingaleFamily family;
    ConvergenceModulus modulus;
    // Closed-form value of the full sum at a point, when known.
    std::function<std::optional<Dyadic>(const BitString&)> closed_form;
};
FamilyBundle build_family(const ExperimentConfig& cfg);

}  // namespace cmlab

#pragma once

#include <stdexcept>
#include <string>

namespace nfl {

struct NonSquare : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct DimensionMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct EmptyInput : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct InvalidDimension : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct RankOutOfRange : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct OrthonormalOverflow : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct InvalidArgs : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct DegenerateSplit : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Configuration rejected; `field` names the offending key.
struct ConfigInvalid : std::invalid_argument {
    ConfigInvalid(std::string field_name, const std::string& what)
        : std::invalid_argument("config field '" + field_name + "': " + what),
          field(std::move(field_name)) {}
    std::string field;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace nfl

#pragma once

#include <stdexcept>
#include <string>

namespace wsis {

// Invalid or inconsistent configuration values (bad bounds, unknown keys, ...).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed external input: CSV rows, checkpoint files, wind series gaps.
struct IngestionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A caller broke an API precondition (wrong cadence, missing action, ...).
struct ContractError : std::logic_error {
    using std::logic_error::logic_error;
};

} // namespace wsis

#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace varsel {

// Domain error carrying a stable machine-readable code next to the message.
// Codes are the ones named in the per-operation contracts (MODEL_TOO_LARGE,
// RAGGED_ROW, UNDEFINED_METRIC, ...).
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(code + ": " + message), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

}  // namespace varsel

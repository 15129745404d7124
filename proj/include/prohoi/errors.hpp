#pragma once

#include <stdexcept>
#include <string>

namespace prohoi {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NoPriorsError : std::runtime_error {
    NoPriorsError() : std::runtime_error("prior library is empty") {}
};

struct InvalidEndpointError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UnreachableError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct StreamError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InsufficientHistoryError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NoContactPhaseError : std::runtime_error {
    NoContactPhaseError() : std::runtime_error("object never exceeds the velocity threshold") {}
};

struct StageError : std::runtime_error {
    std::string stage;
    StageError(std::string stage_name, const std::string& what)
        : std::runtime_error(stage_name + ": " + what), stage(std::move(stage_name)) {}
};

}  // namespace prohoi

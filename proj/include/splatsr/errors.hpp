#pragma once

#include <stdexcept>
#include <string>

namespace splatsr {

// Base class for everything this library throws on purpose.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad arguments, violated preconditions, mismatched dimensions.
class ValueError : public Error {
public:
    using Error::Error;
};

// Invalid or inconsistent configuration (maps to CLI exit code 2).
class ConfigError : public Error {
public:
    using Error::Error;
};

// File system and serialization failures.
class IoError : public Error {
public:
    using Error::Error;
};

// External plugin process failed or violated its directory contract.
class PluginError : public Error {
public:
    using Error::Error;
};

// A pipeline stage aborted; carries the stage name (maps to CLI exit code 3).
class StageError : public Error {
public:
    StageError(std::string stage, const std::string& what)
        : Error("stage '" + stage + "': " + what), stage_(std::move(stage)) {}
    const std::string& stage() const { return stage_; }

private:
    std::string stage_;
};

}  // namespace splatsr

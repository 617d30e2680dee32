/**
 * @file error.hpp
 * @brief Exception type shared by every ssvep module.
 */

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ssvep {

enum class ErrorKind {
    invalid_input,
    out_of_range,
    lookup,
    decomposition,
    degenerate_denominator,
    undefined_correlation,
    aliasing,
    insufficient_data,
    numerical_failure,
    invalid_dataset,
    configuration,
    corrupt_file,
    version,
    parse,
    io,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// All library failures are reported as ssvep::Error; kind() tells them apart.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what)
        , kind_(kind)
    {
    }

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what)
{
    throw Error(kind, what);
}

} // namespace ssvep

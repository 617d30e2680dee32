#include "ssvep/error.hpp"

namespace ssvep {

std::string_view to_string(ErrorKind kind) noexcept
{
    switch (kind) {
    case ErrorKind::invalid_input: return "invalid input";
    case ErrorKind::out_of_range: return "out of range";
    case ErrorKind::lookup: return "lookup error";
    case ErrorKind::decomposition: return "decomposition error";
    case ErrorKind::degenerate_denominator: return "degenerate denominator";
    case ErrorKind::undefined_correlation: return "undefined correlation";
    case ErrorKind::aliasing: return "aliasing";
    case ErrorKind::insufficient_data: return "insufficient data";
    case ErrorKind::numerical_failure: return "numerical failure";
    case ErrorKind::invalid_dataset: return "invalid dataset";
    case ErrorKind::configuration: return "configuration error";
    case ErrorKind::corrupt_file: return "corrupt file";
    case ErrorKind::version: return "version error";
    case ErrorKind::parse: return "parse error";
    case ErrorKind::io: return "i/o error";
    }
    return "error";
}

} // namespace ssvep

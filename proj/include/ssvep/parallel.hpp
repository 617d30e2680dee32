/**
 * @file parallel.hpp
 * @brief Execution policy for the data-parallel loops (per stimulus, per trial, per fold).
 *
 * Every parallel entry point also runs serially; the serial path is the
 * reference the tests compare against. Iterations must write only to their
 * own output slot so both paths produce bitwise-identical results.
 */

#pragma once

#include <cstddef>
#include <exception>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ssvep {

enum class Execution { serial, parallel };

/// Number of worker threads used by Execution::parallel.
int worker_count() noexcept;

/// Sets the worker count; n <= 0 restores the default (available parallelism).
void set_worker_count(int n) noexcept;

/// Runs body(i) for i in [0, n). Exceptions are collected per index and the
/// one with the lowest index is rethrown, so error reporting does not depend
/// on thread scheduling.
template <class Body>
void for_each_index(Execution exec, std::size_t n, Body&& body)
{
    if (exec == Execution::serial || n < 2) {
        for (std::size_t i = 0; i < n; ++i)
            body(i);
        return;
    }

    std::vector<std::exception_ptr> errors(n);
    const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
        try {
            body(static_cast<std::size_t>(i));
        } catch (...) {
            errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
    }
    for (const auto& e : errors)
        if (e)
            std::rethrow_exception(e);
}

} // namespace ssvep

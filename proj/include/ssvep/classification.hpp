/**
 * @file classification.hpp
 * @brief Decision type shared by the spatial-filter recognizers.
 */

#pragma once

#include "ssvep/dataset.hpp"

namespace ssvep {

struct Classification {
    int predicted = 0;
    Vector features; ///< one score per stimulus
};

/// Index of the largest entry; ties resolve to the lowest index.
int argmax_lowest(const Vector& features);

} // namespace ssvep

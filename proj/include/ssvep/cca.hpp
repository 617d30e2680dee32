/**
 * @file cca.hpp
 * @brief Training-free CCA frequency detection.
 */

#pragma once

#include "ssvep/dataset.hpp"
#include "ssvep/parallel.hpp"
#include "ssvep/reference.hpp"

namespace ssvep {

/// Principal canonical correlation between a (centralized) trial and a template, in [0, 1].
double cca_rho(const Trial& trial, const ReferenceTemplate& reference);

struct CcaResult {
    int predicted = 0;
    Vector rho; ///< one value per stimulus
};

/// argmax over stimuli of cca_rho; ties go to the lowest index.
CcaResult cca_classify(const Trial& trial,
                       const ReferenceDictionary& dictionary,
                       Execution exec = Execution::serial);

} // namespace ssvep

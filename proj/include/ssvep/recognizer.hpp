/**
 * @file recognizer.hpp
 * @brief Uniform fit/classify front end over CCA, TRCA and adTRCA.
 */

#pragma once

#include "ssvep/adtrca.hpp"
#include "ssvep/cca.hpp"
#include "ssvep/classification.hpp"
#include "ssvep/trca.hpp"

#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace ssvep {

enum class Method { cca, trca, trca_ensemble, adtrca, adtrca_ensemble };

std::string_view method_name(Method method) noexcept;
/// Accepts the names produced by method_name. Throws configuration error otherwise.
Method parse_method(std::string_view name);
std::vector<Method> all_methods();
bool uses_ensemble(Method method) noexcept;

/// CCA needs no calibration; the dictionary is rebuilt from ModelInfo.
struct CcaModel {};

using FittedModel = std::variant<CcaModel, TrcaModel, AdTrcaModel>;

/// Everything needed to window and classify new data the way the model was trained.
struct ModelInfo {
    Method method = Method::trca;
    double fs = 0.0;
    std::vector<double> frequencies_hz;
    std::vector<std::string> channel_names;
    double window_s = 0.0;
    int n_harmonics = kDefaultHarmonics;
};

struct RecognizerConfig {
    int n_harmonics = kDefaultHarmonics;
    ArdConfig ard;
    TestFiltering test_filtering = TestFiltering::class_specific;
    bool identity_filter = false;
};

/// Fits `method` on windowed, centralized training trials.
FittedModel fit_model(const Dataset& train, Method method, const RecognizerConfig& config, Execution exec = Execution::serial);

/// Classifies one windowed, centralized trial.
Classification classify(const FittedModel& model, const ModelInfo& info, const Trial& trial);

std::vector<Classification> classify_all(const FittedModel& model,
                                         const ModelInfo& info,
                                         std::span<const Trial> trials,
                                         Execution exec = Execution::serial);

} // namespace ssvep

#include "ssvep/recognizer.hpp"

#include "ssvep/error.hpp"

#include <array>

namespace ssvep {

namespace {

constexpr std::array<std::pair<Method, std::string_view>, 5> kNames{{
    {Method::cca, "cca"},
    {Method::trca, "trca"},
    {Method::trca_ensemble, "trca-ensemble"},
    {Method::adtrca, "adtrca"},
    {Method::adtrca_ensemble, "adtrca-ensemble"},
}};

} // namespace

std::string_view method_name(Method method) noexcept
{
    for (const auto& [m, name] : kNames)
        if (m == method)
            return name;
    return "unknown";
}

Method parse_method(std::string_view name)
{
    for (const auto& [m, n] : kNames)
        if (n == name)
            return m;
    fail(ErrorKind::configuration,
         "unknown method '" + std::string(name) + "' (expected cca, trca, trca-ensemble, adtrca, adtrca-ensemble)");
}

std::vector<Method> all_methods()
{
    std::vector<Method> out;
    for (const auto& [m, name] : kNames)
        out.push_back(m);
    return out;
}

bool uses_ensemble(Method method) noexcept
{
    return method == Method::trca_ensemble || method == Method::adtrca_ensemble;
}

FittedModel fit_model(const Dataset& train, Method method, const RecognizerConfig& config, Execution exec)
{
    switch (method) {
    case Method::cca:
        return CcaModel{};
    case Method::trca:
    case Method::trca_ensemble:
        return trca_fit(train, exec);
    case Method::adtrca:
    case Method::adtrca_ensemble: {
        AdTrcaConfig ad;
        ad.ard = config.ard;
        ad.n_harmonics = config.n_harmonics;
        ad.test_filtering = config.test_filtering;
        ad.identity_filter = config.identity_filter;
        return adtrca_fit(train, ad, exec);
    }
    }
    fail(ErrorKind::configuration, "fit_model: unknown method");
}

Classification classify(const FittedModel& model, const ModelInfo& info, const Trial& trial)
{
    const bool ensemble = uses_ensemble(info.method);
    if (const auto* trca = std::get_if<TrcaModel>(&model))
        return trca_classify(*trca, trial, ensemble);
    if (const auto* ad = std::get_if<AdTrcaModel>(&model))
        return adtrca_classify(*ad, trial, ensemble);

    const ReferenceDictionary dictionary =
        build_dictionary(info.frequencies_hz, info.n_harmonics, info.fs, trial.n_samples());
    const CcaResult r = cca_classify(trial, dictionary);
    return {r.predicted, r.rho};
}

std::vector<Classification> classify_all(const FittedModel& model,
                                         const ModelInfo& info,
                                         std::span<const Trial> trials,
                                         Execution exec)
{
    std::vector<Classification> out(trials.size());
    for_each_index(exec, trials.size(), [&](std::size_t i) { out[i] = classify(model, info, trials[i]); });
    return out;
}

} // namespace ssvep

#include "ssvep/adtrca.hpp"

#include "ssvep/error.hpp"
#include "ssvep/trca.hpp"

#include <sstream>

namespace ssvep {

AdTrcaModel adtrca_fit(const Dataset& train,
                       const ReferenceDictionary& dictionary,
                       const AdTrcaConfig& config,
                       Execution exec)
{
    if (dictionary.matrix.rows() != train.n_samples()) {
        std::ostringstream msg;
        msg << "adtrca_fit: dictionary has " << dictionary.matrix.rows() << " rows, trials have " << train.n_samples()
            << " samples";
        fail(ErrorKind::invalid_input, msg.str());
    }

    const auto grouped = detail::trials_by_stimulus(train, 2);
    const auto n_stimuli = grouped.size();
    const Eigen::Index n_samples = train.n_samples();

    AdTrcaModel model;
    model.config = config;
    model.temporal_filters.resize(n_stimuli);
    model.filters.resize(n_stimuli);
    model.templates.resize(n_stimuli);
    if (!config.identity_filter) {
        model.ard_iterations.resize(n_stimuli);
        model.ard_active.resize(n_stimuli);
    }

    for_each_index(exec, n_stimuli, [&](std::size_t s) {
        const std::vector<Matrix>& trials = grouped[s];
        Matrix temporal;
        if (config.identity_filter) {
            temporal = Matrix::Identity(n_samples, n_samples);
        } else {
            try {
                const ArdModel ard = ard_fit(build_problem(std::span<const Matrix>(trials), dictionary), config.ard);
                temporal = temporal_filter(ard, dictionary).filter;
                model.ard_iterations[s] = ard.n_iters;
                model.ard_active[s] = ard.n_active();
            } catch (const Error& e) {
                std::ostringstream msg;
                msg << "adtrca_fit: stimulus " << s << ": " << e.what();
                throw Error(e.kind(), msg.str());
            }
        }

        std::vector<Matrix> filtered;
        filtered.reserve(trials.size());
        for (const Matrix& x : trials)
            filtered.push_back(x * temporal);
        auto fit = detail::fit_stimulus_filter(filtered);
        model.filters[s] = std::move(fit.filter);
        model.templates[s] = std::move(fit.mean);
        model.temporal_filters[s] = std::move(temporal);
    });

    model.ensemble.resize(train.n_channels(), static_cast<Eigen::Index>(n_stimuli));
    for (std::size_t s = 0; s < n_stimuli; ++s)
        model.ensemble.col(static_cast<Eigen::Index>(s)) = model.filters[s];
    return model;
}

AdTrcaModel adtrca_fit(const Dataset& train, const AdTrcaConfig& config, Execution exec)
{
    const ReferenceDictionary dictionary = build_dictionary(
        train.stimulus_frequencies_hz(), config.n_harmonics, train.sampling_rate_hz(), train.n_samples());
    return adtrca_fit(train, dictionary, config, exec);
}

Classification adtrca_classify(const AdTrcaModel& model, const Trial& test, bool ensemble)
{
    if (test.n_channels() != model.n_channels()) {
        std::ostringstream msg;
        msg << "adtrca_classify: test trial has " << test.n_channels() << " channels, model expects "
            << model.n_channels();
        fail(ErrorKind::invalid_input, msg.str());
    }
    if (model.n_stimuli() > 0 && test.n_samples() != model.temporal_filters.front().rows())
        fail(ErrorKind::invalid_input, "adtrca_classify: test trial length differs from the temporal filters");

    const Matrix* bank = ensemble ? &model.ensemble : nullptr;
    Classification out;
    out.features.resize(model.n_stimuli());

    if (model.config.test_filtering == TestFiltering::shared_mean) {
        Matrix mean_filter = Matrix::Zero(test.n_samples(), test.n_samples());
        for (const Matrix& f : model.temporal_filters)
            mean_filter += f;
        mean_filter /= static_cast<double>(model.n_stimuli());
        const Matrix filtered = test.samples * mean_filter;
        for (int s = 0; s < model.n_stimuli(); ++s) {
            const auto idx = static_cast<std::size_t>(s);
            out.features(s) = detail::spatial_feature(model.filters[idx], bank, filtered, model.templates[idx]);
        }
    } else {
        for (int s = 0; s < model.n_stimuli(); ++s) {
            const auto idx = static_cast<std::size_t>(s);
            const Matrix filtered = test.samples * model.temporal_filters[idx];
            out.features(s) = detail::spatial_feature(model.filters[idx], bank, filtered, model.templates[idx]);
        }
    }
    out.predicted = argmax_lowest(out.features);
    return out;
}

std::vector<Classification> adtrca_classify_all(const AdTrcaModel& model,
                                                std::span<const Trial> tests,
                                                bool ensemble,
                                                Execution exec)
{
    std::vector<Classification> out(tests.size());
    for_each_index(exec, tests.size(), [&](std::size_t i) { out[i] = adtrca_classify(model, tests[i], ensemble); });
    return out;
}

linalg::SymmetricPencil filtered_pencil(std::span<const Matrix> trials, const Matrix& temporal)
{
    std::vector<Matrix> filtered;
    filtered.reserve(trials.size());
    for (const Matrix& x : trials)
        filtered.push_back(x * temporal);
    return reproducibility_pencil(filtered);
}

linalg::SymmetricPencil temporal_pencil(std::span<const Matrix> trials, const Matrix& c)
{
    if (trials.empty())
        fail(ErrorKind::insufficient_data, "temporal_pencil: no trials");
    const Eigen::Index channels = trials.front().rows();
    Matrix mean = Matrix::Zero(channels, trials.front().cols());
    Matrix scatter = Matrix::Zero(channels, channels);
    for (const Matrix& x : trials) {
        mean += x;
        scatter.noalias() += x * c * x.transpose();
    }
    mean /= static_cast<double>(trials.size());

    linalg::SymmetricPencil pencil;
    pencil.numerator = mean * c * mean.transpose();
    pencil.denominator = 0.5 * (scatter + scatter.transpose());
    pencil.numerator = (0.5 * (pencil.numerator + pencil.numerator.transpose())).eval();
    return pencil;
}

} // namespace ssvep

#include "ssvep/trca.hpp"

#include "ssvep/error.hpp"

#include <sstream>

namespace ssvep {

int argmax_lowest(const Vector& features)
{
    if (features.size() == 0)
        fail(ErrorKind::invalid_input, "argmax_lowest: empty feature vector");
    Eigen::Index best = 0;
    for (Eigen::Index s = 1; s < features.size(); ++s)
        if (features(s) > features(best))
            best = s;
    return static_cast<int>(best);
}

linalg::SymmetricPencil reproducibility_pencil(std::span<const Matrix> trials)
{
    if (trials.empty())
        fail(ErrorKind::insufficient_data, "reproducibility_pencil: no trials");
    const Eigen::Index channels = trials.front().rows();
    Matrix mean = Matrix::Zero(channels, trials.front().cols());
    Matrix scatter = Matrix::Zero(channels, channels);
    for (const Matrix& x : trials) {
        if (x.rows() != channels || x.cols() != mean.cols())
            fail(ErrorKind::invalid_input, "reproducibility_pencil: trials differ in shape");
        mean += x;
        scatter.noalias() += x * x.transpose();
    }
    mean /= static_cast<double>(trials.size());

    linalg::SymmetricPencil pencil;
    pencil.numerator = mean * mean.transpose();
    pencil.denominator = std::move(scatter);
    return pencil;
}

namespace detail {

StimulusFilter fit_stimulus_filter(std::span<const Matrix> trials)
{
    StimulusFilter out;
    const linalg::SymmetricPencil pencil = reproducibility_pencil(trials);
    out.filter = linalg::gen_eig_max(pencil).w;
    out.mean = Matrix::Zero(trials.front().rows(), trials.front().cols());
    for (const Matrix& x : trials)
        out.mean += x;
    out.mean /= static_cast<double>(trials.size());
    return out;
}

double spatial_feature(const Vector& filter, const Matrix* ensemble, const Matrix& test, const Matrix& reference)
{
    if (ensemble != nullptr)
        return linalg::matrix_corr(ensemble->transpose() * test, ensemble->transpose() * reference);
    const Vector projected_test = test.transpose() * filter;
    const Vector projected_ref = reference.transpose() * filter;
    return linalg::pearson(projected_test, projected_ref);
}

std::vector<std::vector<Matrix>> trials_by_stimulus(const Dataset& train, std::size_t minimum)
{
    std::vector<std::vector<Matrix>> out(static_cast<std::size_t>(train.n_stimuli()));
    for (const Trial& t : train.trials())
        out[static_cast<std::size_t>(t.stimulus)].push_back(t.samples);
    for (std::size_t s = 0; s < out.size(); ++s) {
        if (out[s].size() < minimum) {
            std::ostringstream msg;
            msg << "stimulus " << s << " has " << out[s].size() << " training trials; at least " << minimum
                << " required";
            fail(ErrorKind::insufficient_data, msg.str());
        }
    }
    return out;
}

} // namespace detail

TrcaModel trca_fit(const Dataset& train, Execution exec)
{
    const auto grouped = detail::trials_by_stimulus(train, 2);
    const auto n_stimuli = grouped.size();

    TrcaModel model;
    model.filters.resize(n_stimuli);
    model.templates.resize(n_stimuli);
    for_each_index(exec, n_stimuli, [&](std::size_t s) {
        auto fit = detail::fit_stimulus_filter(grouped[s]);
        model.filters[s] = std::move(fit.filter);
        model.templates[s] = std::move(fit.mean);
    });

    model.ensemble.resize(train.n_channels(), static_cast<Eigen::Index>(n_stimuli));
    for (std::size_t s = 0; s < n_stimuli; ++s)
        model.ensemble.col(static_cast<Eigen::Index>(s)) = model.filters[s];
    return model;
}

Classification trca_classify(const TrcaModel& model, const Trial& test, bool ensemble)
{
    if (test.n_channels() != model.n_channels()) {
        std::ostringstream msg;
        msg << "trca_classify: test trial has " << test.n_channels() << " channels, model expects "
            << model.n_channels();
        fail(ErrorKind::invalid_input, msg.str());
    }
    if (model.n_stimuli() > 0 && test.n_samples() != model.templates.front().cols())
        fail(ErrorKind::invalid_input, "trca_classify: test trial length differs from the templates");

    Classification out;
    out.features.resize(model.n_stimuli());
    const Matrix* bank = ensemble ? &model.ensemble : nullptr;
    for (int s = 0; s < model.n_stimuli(); ++s) {
        const auto idx = static_cast<std::size_t>(s);
        out.features(s) = detail::spatial_feature(model.filters[idx], bank, test.samples, model.templates[idx]);
    }
    out.predicted = argmax_lowest(out.features);
    return out;
}

std::vector<Classification> trca_classify_all(const TrcaModel& model,
                                              std::span<const Trial> tests,
                                              bool ensemble,
                                              Execution exec)
{
    std::vector<Classification> out(tests.size());
    for_each_index(exec, tests.size(), [&](std::size_t i) { out[i] = trca_classify(model, tests[i], ensemble); });
    return out;
}

} // namespace ssvep

#include "ssvep/ard.hpp"

#include "ssvep/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

namespace ssvep {

namespace {

constexpr double kEvidenceSlack = 1e-6;
constexpr double kMinPrecision = 1e-12;
// Cap on the (normalized) noise precision; an exact fit otherwise sends a0 to infinity.
constexpr double kMaxNoisePrecision = 1e12;

struct Posterior {
    Matrix sigma_active; // |J| x |J|
    Matrix mu_active;    // |J| x L
    double evidence = 0.0;
};

[[noreturn]] void diverged(int iteration, const std::string& what)
{
    std::ostringstream msg;
    msg << "ard_fit: " << what << " at iteration " << iteration;
    fail(ErrorKind::numerical_failure, msg.str());
}

// Posterior over the active components and the evidence of (a, a0), both in
// normalized units. Uses the P-space form of the marginal likelihood:
//   log|C| = -N_t log a0 - sum_J log a_j + log|Sigma_J^-1|
//   sum_i y_i^T C^-1 y_i = a0 ||Y||^2 - a0 sum_i h_i^T mu_i
Posterior posterior(const Matrix& gram,
                    const Matrix& cross,
                    double total_energy,
                    std::span<const Eigen::Index> active,
                    const Vector& a,
                    double a0,
                    Eigen::Index n_samples,
                    int iteration)
{
    const auto n_active = static_cast<Eigen::Index>(active.size());
    const auto n_tasks = cross.cols();
    const double log_2pi = std::log(2.0 * std::numbers::pi);

    Posterior out;
    double log_det_c = -static_cast<double>(n_samples) * std::log(a0);
    double quad = a0 * total_energy;
    if (n_active > 0) {
        Matrix precision(n_active, n_active);
        Matrix h(n_active, n_tasks);
        for (Eigen::Index r = 0; r < n_active; ++r) {
            for (Eigen::Index c = 0; c < n_active; ++c)
                precision(r, c) = a0 * gram(active[r], active[c]);
            precision(r, r) += a(active[r]);
            h.row(r) = cross.row(active[r]);
        }
        Eigen::LLT<Matrix> llt(precision);
        if (llt.info() != Eigen::Success)
            diverged(iteration, "posterior precision is not positive definite");
        out.sigma_active = llt.solve(Matrix::Identity(n_active, n_active));
        out.sigma_active = (0.5 * (out.sigma_active + out.sigma_active.transpose())).eval();
        out.mu_active = a0 * (out.sigma_active * h);

        const Matrix l = llt.matrixL();
        log_det_c += 2.0 * l.diagonal().array().log().sum();
        for (Eigen::Index r = 0; r < n_active; ++r)
            log_det_c -= std::log(a(active[r]));
        quad -= a0 * (h.array() * out.mu_active.array()).sum();
    }
    out.evidence = -0.5 * (static_cast<double>(n_tasks) * (static_cast<double>(n_samples) * log_2pi + log_det_c) + quad);
    return out;
}

} // namespace

Eigen::Index ArdModel::n_active() const noexcept
{
    return static_cast<Eigen::Index>(std::count(pruned.begin(), pruned.end(), false));
}

MtlProblem build_problem(std::span<const Matrix> trials, const ReferenceDictionary& dictionary)
{
    if (trials.empty())
        fail(ErrorKind::invalid_input, "build_problem: no trials");
    const Eigen::Index n_channels = trials.front().rows();
    const Eigen::Index n_samples = dictionary.matrix.rows();

    MtlProblem problem;
    problem.dictionary = dictionary.matrix;
    problem.targets.resize(n_samples, n_channels * static_cast<Eigen::Index>(trials.size()));
    for (std::size_t m = 0; m < trials.size(); ++m) {
        const Matrix& x = trials[m];
        if (x.cols() != n_samples) {
            std::ostringstream msg;
            msg << "build_problem: trial " << m << " has " << x.cols() << " samples, dictionary has " << n_samples;
            fail(ErrorKind::invalid_input, msg.str());
        }
        if (x.rows() != n_channels)
            fail(ErrorKind::invalid_input, "build_problem: trials differ in channel count");
        problem.targets.middleCols(static_cast<Eigen::Index>(m) * n_channels, n_channels) = x.transpose();
    }
    return problem;
}

MtlProblem build_problem(std::span<const Trial> trials, const ReferenceDictionary& dictionary)
{
    std::vector<Matrix> matrices;
    matrices.reserve(trials.size());
    for (const Trial& t : trials)
        matrices.push_back(t.samples);
    return build_problem(std::span<const Matrix>(matrices), dictionary);
}

ArdModel ard_fit(const MtlProblem& problem, const ArdConfig& config)
{
    const Matrix& phi = problem.dictionary;
    const Eigen::Index n_samples = problem.n_samples();
    const Eigen::Index n_coef = problem.n_coefficients();
    const Eigen::Index n_tasks = problem.n_tasks();

    if (n_tasks < 1)
        fail(ErrorKind::invalid_input, "ard_fit: no tasks");
    if (phi.rows() != n_samples)
        fail(ErrorKind::invalid_input, "ard_fit: dictionary and targets differ in sample count");
    if (!phi.allFinite() || !problem.targets.allFinite())
        fail(ErrorKind::invalid_input, "ard_fit: non-finite dictionary or targets");
    if (config.max_iters < 0 || !(config.tol > 0.0) || !(config.a_init > 0.0) || !(config.prune_threshold > 0.0))
        fail(ErrorKind::configuration, "ard_fit: invalid configuration");

    ArdModel model;
    model.pruned.assign(static_cast<std::size_t>(n_coef), false);
    model.sigma = Matrix::Zero(n_coef, n_coef);
    model.mu = Matrix::Zero(n_coef, n_tasks);

    const double mean_square = problem.targets.squaredNorm() / static_cast<double>(problem.targets.size());
    if (mean_square == 0.0) {
        // Nothing to explain: every component is pruned and every mean is zero.
        model.a = Vector::Constant(n_coef, std::numeric_limits<double>::infinity());
        model.a0 = config.a0_init.value_or(1.0);
        model.pruned.assign(static_cast<std::size_t>(n_coef), true);
        model.converged = true;
        return model;
    }

    const double scale = std::sqrt(mean_square);
    const Matrix targets = problem.targets / scale;
    const Matrix gram = phi.transpose() * phi;
    const Matrix cross = phi.transpose() * targets;
    const double total_energy = targets.squaredNorm();

    const double variance =
        (problem.targets.array() - problem.targets.mean()).square().sum() / static_cast<double>(problem.targets.size());
    double a0 = config.a0_init ? *config.a0_init * mean_square : 10.0 * mean_square / (variance > 0.0 ? variance : mean_square);
    if (!(a0 > 0.0) || !std::isfinite(a0))
        fail(ErrorKind::configuration, "ard_fit: a0_init must be positive");
    a0 = std::min(a0, kMaxNoisePrecision);
    Vector a = Vector::Constant(n_coef, config.a_init);

    std::vector<Eigen::Index> active(static_cast<std::size_t>(n_coef));
    for (Eigen::Index j = 0; j < n_coef; ++j)
        active[static_cast<std::size_t>(j)] = j;

    const double tasks = static_cast<double>(n_tasks);
    Posterior post;
    for (int iter = 0;; ++iter) {
        post = posterior(gram, cross, total_energy, active, a, a0, n_samples, iter);
        if (!std::isfinite(post.evidence))
            diverged(iter, "marginal likelihood is not finite");
        if (!model.evidence_trace.empty() && post.evidence < model.evidence_trace.back() - kEvidenceSlack)
            ++model.evidence_decreases;
        model.evidence_trace.push_back(post.evidence);
        model.n_iters = iter;
        if (model.converged || iter >= config.max_iters)
            break;

        const auto n_active = static_cast<Eigen::Index>(active.size());
        double explained = 0.0; // sum of gamma_j
        double max_change = 0.0;
        std::vector<Eigen::Index> still_active;
        still_active.reserve(active.size());
        for (Eigen::Index r = 0; r < n_active; ++r) {
            const Eigen::Index j = active[static_cast<std::size_t>(r)];
            const double gamma = std::clamp(1.0 - a(j) * post.sigma_active(r, r), 0.0, 1.0);
            explained += gamma;
            const double energy = post.mu_active.row(r).squaredNorm();
            double next = energy > 0.0 ? tasks * gamma / energy : std::numeric_limits<double>::infinity();
            if (std::isnan(next))
                diverged(iter, "precision a_" + std::to_string(j) + " is NaN");
            next = std::max(next, kMinPrecision);
            if (next > config.prune_threshold) {
                model.pruned[static_cast<std::size_t>(j)] = true;
                max_change = std::numeric_limits<double>::infinity();
            } else {
                still_active.push_back(j);
                max_change = std::max(max_change, std::abs(next - a(j)) / a(j));
            }
            a(j) = next;
        }

        Matrix residual = targets;
        if (n_active > 0) {
            Matrix phi_active(n_samples, n_active);
            for (Eigen::Index r = 0; r < n_active; ++r)
                phi_active.col(r) = phi.col(active[static_cast<std::size_t>(r)]);
            residual.noalias() -= phi_active * post.mu_active;
        }
        const double residual_energy = residual.squaredNorm();
        double next_a0 = tasks * (static_cast<double>(n_samples) - explained) / residual_energy;
        if (std::isnan(next_a0))
            diverged(iter, "noise precision a0 is NaN");
        if (!(next_a0 > 0.0))
            diverged(iter, "noise precision a0 is not positive");
        next_a0 = std::min(next_a0, kMaxNoisePrecision);
        a0 = next_a0;

        active = std::move(still_active);
        model.converged = max_change < config.tol;
    }

    // Back to the original units: a, a0 scale by 1/scale^2, Sigma by scale^2, mu by scale.
    const double scale2 = scale * scale;
    model.a = a / scale2;
    for (Eigen::Index j = 0; j < n_coef; ++j)
        if (model.pruned[static_cast<std::size_t>(j)])
            model.a(j) = std::numeric_limits<double>::infinity();
    model.a0 = a0 / scale2;
    for (std::size_t r = 0; r < active.size(); ++r) {
        for (std::size_t c = 0; c < active.size(); ++c)
            model.sigma(active[r], active[c]) = post.sigma_active(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) * scale2;
        model.mu.row(active[r]) = post.mu_active.row(static_cast<Eigen::Index>(r)) * scale;
    }
    const double shift = static_cast<double>(n_samples) * tasks * std::log(scale);
    for (double& e : model.evidence_trace)
        e -= shift;
    return model;
}

double marginal_log_likelihood(const Vector& a, double a0, const MtlProblem& problem)
{
    const Matrix& phi = problem.dictionary;
    if (a.size() != phi.cols())
        fail(ErrorKind::invalid_input, "marginal_log_likelihood: precision count differs from dictionary width");
    if (!(a0 > 0.0) || !std::isfinite(a0) || (a.array() <= 0.0).any() || a.hasNaN())
        fail(ErrorKind::invalid_input, "marginal_log_likelihood: precisions must be positive");

    const Eigen::Index n = problem.n_samples();
    const Vector prior_var = a.unaryExpr([](double v) { return std::isinf(v) ? 0.0 : 1.0 / v; });
    Matrix c = phi * prior_var.asDiagonal() * phi.transpose();
    c = (0.5 * (c + c.transpose())).eval();
    c.diagonal().array() += 1.0 / a0;

    Eigen::LLT<Matrix> llt(c);
    if (llt.info() != Eigen::Success)
        fail(ErrorKind::numerical_failure, "marginal_log_likelihood: marginal covariance is not positive definite");
    const Matrix l = llt.matrixL();
    const double log_det = 2.0 * l.diagonal().array().log().sum();
    const Matrix whitened = l.triangularView<Eigen::Lower>().solve(problem.targets);

    const double tasks = static_cast<double>(problem.n_tasks());
    const double log_2pi = std::log(2.0 * std::numbers::pi);
    return -0.5 * (tasks * (static_cast<double>(n) * log_2pi + log_det) + whitened.squaredNorm());
}

double marginal_log_likelihood(const ArdModel& model, const MtlProblem& problem)
{
    return marginal_log_likelihood(model.a, model.a0, problem);
}

TemporalFilter temporal_filter(const ArdModel& model, const ReferenceDictionary& dictionary)
{
    const Matrix& phi = dictionary.matrix;
    if (model.sigma.rows() != phi.cols() || model.sigma.cols() != phi.cols())
        fail(ErrorKind::invalid_input, "temporal_filter: posterior covariance does not match the dictionary");

    TemporalFilter out;
    out.filter = model.a0 * (phi * model.sigma * phi.transpose());
    out.filter = (0.5 * (out.filter + out.filter.transpose())).eval();
    out.c = out.filter * out.filter.transpose();
    out.c = (0.5 * (out.c + out.c.transpose())).eval();
    return out;
}

void write_evidence_csv(const ArdModel& model, std::ostream& out)
{
    out << "iteration,evidence\n";
    const auto precision = out.precision(17);
    for (std::size_t i = 0; i < model.evidence_trace.size(); ++i)
        out << i << ',' << model.evidence_trace[i] << '\n';
    out.precision(precision);
}

} // namespace ssvep

// End-to-end acceptance checks. Prints one PASS/FAIL/SKIP line per criterion
// and exits non-zero if any criterion fails.

#include "commands.hpp"
#include "oracles.hpp"
#include "support.hpp"

#include "ssvep/ard.hpp"
#include "ssvep/cca.hpp"
#include "ssvep/dataio.hpp"
#include "ssvep/error.hpp"
#include "ssvep/eval.hpp"
#include "ssvep/linalg.hpp"
#include "ssvep/recognizer.hpp"
#include "ssvep/synth.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace ssvep;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    enum class Status { pass, fail, skip } status = Status::fail;
    std::string detail;
};

Outcome pass(std::string d) { return {Outcome::Status::pass, std::move(d)}; }
Outcome failed(std::string d) { return {Outcome::Status::fail, std::move(d)}; }
Outcome skip(std::string d) { return {Outcome::Status::skip, std::move(d)}; }

std::string fmt(const char* f, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

const std::vector<ChannelSet> kAllChannels{{"all", {}}};

// 1. adTRCA with identity temporal filters predicts exactly what TRCA predicts.
Outcome degeneracy_equivalence()
{
    const auto t0 = std::chrono::steady_clock::now();
    std::size_t compared = 0, mismatches = 0;
    for (int seed = 0; seed < 20; ++seed) {
        SynthConfig c = testing_support::small_config(static_cast<std::uint64_t>(seed), 4, 4, -15.0 + 0.75 * seed);
        c.duration_s = 1.0;
        const Dataset ds = generate(c);
        const std::vector<Method> methods{Method::trca, Method::adtrca, Method::trca_ensemble, Method::adtrca_ensemble};
        const std::vector<double> tw{1.0};
        const std::vector<int> n_train{3};
        BenchConfig cfg;
        cfg.recognizer.identity_filter = true;
        const BenchReport r = run_benchmark(ds, methods, tw, kAllChannels, n_train, cfg);
        auto find = [&](Method m, int block) -> const FoldResult& {
            for (const FoldResult& f : r.folds)
                if (f.method == m && f.test_block == block)
                    return f;
            fail(ErrorKind::lookup, "missing fold");
        };
        for (int block = 0; block < 4; ++block) {
            for (auto [plain, adaptive] : {std::pair{Method::trca, Method::adtrca},
                                           std::pair{Method::trca_ensemble, Method::adtrca_ensemble}}) {
                const FoldResult& trca = find(plain, block);
                const FoldResult& ad = find(adaptive, block);
                compared += trca.predictions.size();
                for (std::size_t i = 0; i < trca.predictions.size(); ++i)
                    mismatches += trca.predictions[i] != ad.predictions[i] || trca.truths[i] != ad.truths[i];
            }
        }
    }
    const double elapsed = seconds_since(t0);
    const std::string d =
        fmt("%zu/%zu predictions identical over 20 datasets (plain and ensemble), %.1f s", compared - mismatches, compared, elapsed);
    return mismatches == 0 && compared > 0 && elapsed < 60.0 ? pass(d) : failed(d);
}

// 2. ARD posterior mean against a brute-force EM oracle, plus exact support.
Outcome ard_oracle()
{
    const auto t0 = std::chrono::steady_clock::now();
    const Eigen::Index n = 32, p = 8, l = 4;
    const std::vector<Eigen::Index> support{2, 5};
    double worst = 0.0;
    int support_ok = 0;
    int pruned = 0;
    const int problems = 5;
    for (int k = 0; k < problems; ++k) {
        const auto seed = static_cast<std::uint64_t>(100 + 10 * k);
        MtlProblem prob;
        prob.dictionary = testing_support::random_matrix(n, p, seed);
        Matrix w = Matrix::Zero(p, l);
        const Matrix draw = testing_support::random_matrix(2, l, seed + 1);
        for (std::size_t i = 0; i < support.size(); ++i)
            w.row(support[i]) = draw.row(static_cast<Eigen::Index>(i)).array().sign() +
                                0.5 * draw.row(static_cast<Eigen::Index>(i)).array();
        const Matrix clean = prob.dictionary * w;
        const double noise_power = clean.squaredNorm() / static_cast<double>(clean.size()) / 100.0; // 20 dB
        prob.targets = clean + std::sqrt(noise_power) * testing_support::random_matrix(n, l, seed + 2);

        const ArdConfig cfg;
        const ArdModel model = ard_fit(prob, cfg);
        const double ms = prob.targets.squaredNorm() / static_cast<double>(prob.targets.size());
        const double var = (prob.targets.array() - prob.targets.mean()).square().sum() / static_cast<double>(prob.targets.size());
        const oracle::EmResult em =
            oracle::ard_em(prob.dictionary, prob.targets, 10 * cfg.max_iters, 1e-8, cfg.a_init / ms, 10.0 / var);
        worst = std::max(worst, (model.mu - em.mu).norm() / em.mu.norm());

        // Off-support precisions can stay finite at the evidence optimum, so a
        // component counts as recovered when its prior signal variance per
        // sample exceeds the noise variance. Pruned ones must be off-support.
        bool exact = true;
        for (Eigen::Index j = 0; j < p; ++j) {
            const bool in_support = std::find(support.begin(), support.end(), j) != support.end();
            const double prior_var = prob.dictionary.col(j).squaredNorm() / static_cast<double>(n) / model.a(j);
            const bool relevant = !model.pruned[static_cast<std::size_t>(j)] && prior_var > 1.0 / model.a0;
            exact = exact && relevant == in_support;
            if (model.pruned[static_cast<std::size_t>(j)])
                ++pruned;
        }
        support_ok += exact;
    }
    const double elapsed = seconds_since(t0);
    const std::string d = fmt("worst relative mu error %.2e over %d problems (P=8, N_t=32, L=4, 20 dB), exact support "
                              "%d/%d (%d columns pruned), %.2f s",
                              worst, problems, support_ok, problems, pruned, elapsed);
    return worst <= 1e-3 && support_ok == problems && elapsed < 10.0 ? pass(d) : failed(d);
}

// 3. cca_rho against an SVD-based CCA.
Outcome cca_oracle()
{
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> freq(6.0, 15.0);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const Trial t{testing_support::random_matrix(4, 64, 1000 + static_cast<std::uint64_t>(i)), 0, 0};
        const ReferenceTemplate ref = build_template(freq(rng), 3, 128.0, 64);
        worst = std::max(worst, std::abs(cca_rho(t, ref) - oracle::cca_rho(t.samples, ref.matrix)));
    }
    const double elapsed = seconds_since(t0);
    const std::string d = fmt("max |rho - oracle| = %.2e over 100 trials (4 x 64), %.2f s", worst, elapsed);
    return worst <= 1e-8 && elapsed < 10.0 ? pass(d) : failed(d);
}

// 4. Every generalized eigen solve in a benchmark run meets the residual bound.
Outcome eigen_residuals()
{
    SynthConfig c = testing_support::small_config(11, 6, 5, -8.0);
    c.duration_s = 2.0;
    c.noise = StructuredNoise::pink;
    const Dataset ds = generate(c);
    const std::vector<Method> methods = all_methods();
    const std::vector<double> tw{0.5, 1.0, 2.0};
    const std::vector<ChannelSet> sets{{"all", {}}, {"O1+O2", {"O1", "O2"}}};
    const std::vector<int> n_train{2, 4};
    linalg::reset_residual_audit();
    try {
        run_benchmark(ds, methods, tw, sets, n_train, BenchConfig{});
    } catch (const Error& e) {
        return failed(std::string("benchmark aborted: ") + e.what());
    }
    const linalg::ResidualAudit audit = linalg::residual_audit();
    const std::string d = fmt("%llu solves, %llu violations, worst relative residual %.2e (bound %.0e)",
                              static_cast<unsigned long long>(audit.solves),
                              static_cast<unsigned long long>(audit.violations), audit.worst_relative_residual,
                              linalg::kGenEigResidualTol);
    return audit.solves > 0 && audit.violations == 0 && audit.worst_relative_residual <= linalg::kGenEigResidualTol
               ? pass(d)
               : failed(d);
}

// 5. ITR closed form, chance level and the time scaling.
Outcome itr_formula()
{
    const double full = itr(40, 1.0, 1.0);
    bool chance_zero = true;
    for (double t : {0.5, 1.0, 2.0, 4.0})
        chance_zero = chance_zero && itr(40, 1.0 / 40.0, t) == 0.0;
    double worst_halving = 0.0;
    double worst_oracle = 0.0;
    for (int k : {2, 5, 12, 40})
        for (double p : {0.3, 0.5, 0.75, 0.9, 1.0})
            for (double t : {0.5, 1.0, 3.0}) {
                const double a = itr(k, p, t);
                const double b = itr(k, p, t / 2.0);
                if (a > 0.0)
                    worst_halving = std::max(worst_halving, std::abs(b - 2.0 * a) / b);
                if (p > 1.0 / k)
                    worst_oracle = std::max(worst_oracle, std::abs(a - oracle::itr(k, p, t)));
            }
    const std::string d = fmt("itr(40,1,1) = %.4f, chance gives 0: %s, halving error %.1e, max |itr - closed form| %.1e",
                              full, chance_zero ? "yes" : "no", worst_halving, worst_oracle);
    return std::abs(full - 319.316) <= 1e-3 && chance_zero && worst_halving <= 1e-10 && worst_oracle <= 1e-9 ? pass(d)
                                                                                                         : failed(d);
}

// 6. Low-data regime: adTRCA beats TRCA on EPOC-like synthetic data.
Outcome low_data_direction()
{
    const auto t0 = std::chrono::steady_clock::now();
    const int seeds = 100;
    double sum_trca = 0.0, sum_ad = 0.0;
    int wins = 0;
    for (int seed = 0; seed < seeds; ++seed) {
        SynthConfig c;
        c.n_channels = 2;
        c.n_blocks = 4;
        c.duration_s = 1.0;
        c.snr_db = -10.0;
        c.noise = StructuredNoise::shared_profile;
        c.mixing_seed = 1000 + static_cast<std::uint64_t>(seed);
        c.noise_seed = 5000 + static_cast<std::uint64_t>(seed);
        const Dataset ds = generate(c);
        const std::vector<Method> methods{Method::trca, Method::adtrca};
        const std::vector<double> tw{1.0};
        const std::vector<int> n_train{3};
        const auto cells = run_benchmark(ds, methods, tw, kAllChannels, n_train, BenchConfig{}).summarize();
        sum_trca += cells[0].mean_accuracy;
        sum_ad += cells[1].mean_accuracy;
        wins += cells[1].mean_accuracy > cells[0].mean_accuracy;
    }
    const double elapsed = seconds_since(t0);
    const double mean_trca = sum_trca / seeds, mean_ad = sum_ad / seeds;
    const std::string d = fmt("mean accuracy TRCA %.3f, adTRCA %.3f; adTRCA wins %d/%d seeds; %.1f s", mean_trca, mean_ad,
                              wins, seeds, elapsed);
    return mean_ad > mean_trca && wins >= 60 && elapsed < 900.0 ? pass(d) : failed(d);
}

// 7. Shuffled labels give chance accuracy for every method. Each of 100
// independent datasets contributes one held-out block, so test trials from
// different datasets share no training data.
Outcome chance_control()
{
    const std::vector<Method> methods = all_methods();
    std::vector<int> correct(methods.size(), 0), total(methods.size(), 0);
    for (int seed = 0; seed < 100; ++seed) {
        SynthConfig c = testing_support::small_config(200 + static_cast<std::uint64_t>(seed), 4, 5, 0.0);
        const Dataset ds = shuffle_labels(generate(c), 300 + static_cast<std::uint64_t>(seed));
        const std::array<int, 1> test_block{seed % 5};
        std::vector<int> train_blocks;
        for (int b = 0; b < 5; ++b)
            if (b != test_block[0])
                train_blocks.push_back(b);
        const Dataset train = extract_windows(select_blocks(ds, train_blocks), 1.0);
        const Dataset test = extract_windows(select_blocks(ds, test_block), 1.0);
        ModelInfo info;
        info.fs = ds.sampling_rate_hz();
        info.frequencies_hz = ds.stimulus_frequencies_hz();
        info.channel_names = ds.channel_names();
        info.window_s = 1.0;
        for (std::size_t m = 0; m < methods.size(); ++m) {
            info.method = methods[m];
            const FittedModel model = fit_model(train, methods[m], RecognizerConfig{});
            const auto results = classify_all(model, info, test.trials());
            for (std::size_t i = 0; i < results.size(); ++i)
                correct[m] += results[i].predicted == test.trials()[i].stimulus;
            total[m] += static_cast<int>(results.size());
        }
    }
    bool ok = true;
    std::string d;
    for (std::size_t m = 0; m < methods.size(); ++m) {
        const double n = total[m];
        const double acc = correct[m] / n;
        const double sigma = std::sqrt(0.2 * 0.8 / n);
        ok = ok && total[m] == 500 && std::abs(acc - 0.2) <= 3.0 * sigma;
        d += fmt("%s%s %.3f", m ? ", " : "", std::string(method_name(methods[m])).c_str(), acc);
    }
    d += fmt(" on %d trials each (3 sigma = %.3f)", total[0], 3.0 * std::sqrt(0.2 * 0.8 / total[0]));
    return ok ? pass(d) : failed(d);
}

// 8. Real EPOC recordings, if present: one converted dataset directory per subject.
Outcome epoc_reproduction()
{
    const char* root = std::getenv("SSVEP_EPOC_DIR");
    if (!root || !*root)
        return skip("SSVEP_EPOC_DIR not set");
    std::vector<fs::path> subjects;
    for (const auto& entry : fs::directory_iterator(root))
        if (entry.is_directory() && fs::exists(entry.path() / "manifest.json"))
            subjects.push_back(entry.path());
    std::sort(subjects.begin(), subjects.end());
    if (subjects.empty())
        return failed(std::string("no dataset directories under ") + root);

    // TRCA accuracy implied by a reference ITR of 34.8970 bits/min (O1+O2, 1 s, K = 5).
    double lo = 0.2, hi = 1.0;
    for (int i = 0; i < 100; ++i) {
        const double mid = 0.5 * (lo + hi);
        (itr(5, mid, 1.0) < 34.8970 ? lo : hi) = mid;
    }
    const double published_trca = 0.5 * (lo + hi);

    std::vector<BenchReport> reports;
    const std::vector<Method> methods{Method::trca, Method::adtrca};
    const std::vector<double> tw{1.0};
    const std::vector<ChannelSet> sets{{"O1+O2", {"O1", "O2"}}};
    for (const fs::path& dir : subjects) {
        const Dataset ds = load_dataset(dir);
        const std::vector<int> n_train{ds.n_blocks() - 1};
        reports.push_back(run_benchmark(ds, methods, tw, sets, n_train, BenchConfig{}, dir.filename().string()));
    }
    const auto cells = merge_reports(reports).summarize();
    const double trca = cells[0].mean_accuracy, ad = cells[1].mean_accuracy;
    const std::string d = fmt("%zu subjects: TRCA %.3f (published %.3f), adTRCA %.3f", subjects.size(), trca,
                              published_trca, ad);
    return ad >= trca && std::abs(trca - published_trca) <= 0.05 ? pass(d) : failed(d);
}

// 9. Two identical bench invocations write byte-identical files.
Outcome determinism()
{
    testing_support::TempDir dir("acceptance_det");
    std::ostringstream sink;
    const std::string data = (dir.path() / "data").string();
    std::vector<std::string> synth{"ssvep", "synth", "--out", data, "--n-channels", "3", "--blocks", "5", "--duration", "1.5",
                                   "--snr-db", "-8", "--noise", "shared-profile", "--noise-seed", "77"};
    if (app::run_cli(synth, sink, sink) != 0)
        return failed("synth failed: " + sink.str());

    std::vector<std::string> outputs;
    for (int run = 0; run < 2; ++run) {
        const std::string out = (dir.path() / ("run" + std::to_string(run))).string();
        std::vector<std::string> bench{"ssvep", "bench", "--data", data, "--tw", "0.5:1.5:0.5", "--channels", "all",
                                       "--channels", "O1,O2", "--n-train", "2,4", "--seed", "5", "--out", out};
        if (app::run_cli(bench, sink, sink) != 0)
            return failed("bench failed: " + sink.str());
        outputs.push_back(out);
    }
    int identical = 0;
    const std::vector<std::string> files{"folds.csv", "curve.csv", "predictions.csv", "summary.json"};
    for (const std::string& f : files) {
        const std::string a = slurp(fs::path(outputs[0]) / f);
        identical += !a.empty() && a == slurp(fs::path(outputs[1]) / f);
    }
    const std::string d = fmt("%d/%zu output files byte-identical across two runs", identical, files.size());
    return identical == static_cast<int>(files.size()) ? pass(d) : failed(d);
}

} // namespace

int main()
{
    // Any generalized eigen solve above the residual bound aborts the run.
    linalg::set_strict_residual_checks(true);

    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"1 degeneracy equivalence", degeneracy_equivalence},
        {"2 ARD oracle equivalence", ard_oracle},
        {"3 CCA oracle", cca_oracle},
        {"4 eigen residuals", eigen_residuals},
        {"5 ITR formula", itr_formula},
        {"6 low-data direction", low_data_direction},
        {"7 chance-level control", chance_control},
        {"8 EPOC reproduction (optional)", epoc_reproduction},
        {"9 determinism", determinism},
    };

    int failures = 0;
    for (const auto& [name, check] : criteria) {
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o = failed(std::string("exception: ") + e.what());
        }
        const char* tag = o.status == Outcome::Status::pass ? "PASS" : o.status == Outcome::Status::skip ? "SKIP" : "FAIL";
        failures += o.status == Outcome::Status::fail;
        std::cout << tag << "  " << name << ": " << o.detail << std::endl;
    }
    std::cout << (failures == 0 ? "all criteria met" : std::to_string(failures) + " criteria failed") << std::endl;
    return failures == 0 ? 0 : 1;
}

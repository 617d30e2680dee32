#pragma once

#include "ssvep/dataset.hpp"
#include "ssvep/synth.hpp"

#include <filesystem>
#include <random>
#include <string>

#include <unistd.h>

namespace testing_support {

using ssvep::Matrix;

inline Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j)
            m(i, j) = normal(rng);
    return m;
}

inline ssvep::SynthConfig small_config(std::uint64_t seed, int channels = 4, int blocks = 4, double snr_db = -5.0)
{
    ssvep::SynthConfig c;
    c.n_channels = channels;
    c.n_blocks = blocks;
    c.duration_s = 1.0;
    c.snr_db = snr_db;
    c.mixing_seed = 100 + seed;
    c.noise_seed = 900 + seed;
    return c;
}

/// Removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag)
    {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("ssvep_test_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() { std::filesystem::remove_all(path_); }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

} // namespace testing_support

#define EXPECT_SSVEP_ERROR(stmt, expected_kind)                                                                        \
    do {                                                                                                               \
        try {                                                                                                          \
            stmt;                                                                                                      \
            ADD_FAILURE() << "expected ssvep::Error";                                                                  \
        } catch (const ssvep::Error& e) {                                                                              \
            EXPECT_EQ(e.kind(), expected_kind) << e.what();                                                            \
        }                                                                                                              \
    } while (0)

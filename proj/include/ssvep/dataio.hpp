/**
 * @file dataio.hpp
 * @brief On-disk formats: dataset directories, CSV import and model files.
 *
 * A dataset directory holds manifest.json and a raw tensor of little-endian
 * float32 samples in [block][target][channel][sample] order. Cells listed in
 * the manifest's missing_cells are stored as zeros and skipped on load.
 *
 * A model file is "SSVF", a version byte, a u32 LE header length, a JSON
 * header and float64 LE row-major matrices in header order.
 */

#pragma once

#include "ssvep/dataset.hpp"
#include "ssvep/recognizer.hpp"

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace ssvep {

inline constexpr int kDatasetFormatVersion = 1;
inline constexpr int kModelFormatVersion = 1;

struct DatasetManifest {
    int format_version = kDatasetFormatVersion;
    double sampling_rate_hz = 0.0;
    std::vector<double> stimulus_frequencies_hz;
    std::vector<std::string> channel_names;
    int n_blocks = 0;
    int n_targets = 0;
    Eigen::Index n_samples = 0;
    double latency_s = 0.0;
    std::string tensor_file = "tensor.f32";
    std::string byte_order = "little";
    std::string sample_type = "float32";
    std::vector<std::pair<int, int>> missing_cells; ///< (block, target)
};

/// Reads and validates a manifest JSON file. Import manifests may omit the
/// tensor fields and n_samples (0 = take it from the data).
DatasetManifest read_manifest(const std::filesystem::path& file);
void write_manifest(const DatasetManifest& manifest, const std::filesystem::path& file);

/// Writes manifest.json and the tensor into `dir` (created if needed).
/// Samples are stored as float32.
void save_dataset(const Dataset& dataset, const std::filesystem::path& dir);
Dataset load_dataset(const std::filesystem::path& dir);

/// Assembles block{b}_target{t}.csv files (0-based, rows = samples,
/// columns = channels, optional header row) described by `manifest`.
Dataset import_csv(const std::filesystem::path& dir, const DatasetManifest& manifest);

/// Writes one trial in the import_csv layout, with a header of channel names.
void export_trial_csv(const Trial& trial, std::span<const std::string> channel_names, const std::filesystem::path& file);

struct ModelFile {
    ModelInfo info;
    RecognizerConfig config;
    FittedModel model;
};

void save_model(const ModelFile& model, const std::filesystem::path& file);
ModelFile load_model(const std::filesystem::path& file);

/// Typed loaders; a file holding another method family is a version error.
TrcaModel load_trca_model(const std::filesystem::path& file);
AdTrcaModel load_adtrca_model(const std::filesystem::path& file);

/// Writes to a sibling temporary file then renames over `file`.
void write_file_atomic(const std::filesystem::path& file, const std::string& contents);

} // namespace ssvep

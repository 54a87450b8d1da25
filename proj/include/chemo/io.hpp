#pragma once

#include "chemo/engine.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace chemo {

inline constexpr const char* kVersion = "1.0.0";

struct RunManifest {
    std::vector<std::pair<std::string, std::string>> config;
    std::string version = kVersion;
    std::string started_at;
    double wall_seconds = 0;
    std::vector<long> sample_ids;
    std::vector<std::uint64_t> seeds;
    std::vector<std::string> files;
};

/// Writes counts.csv, msd.csv, hist_{alpha,beta}_t<k>.csv, field_t<k>.csv
/// and manifest.json into `dir` (created if missing). Floats use 17
/// significant digits. Fills manifest.files; throws std::ios_base::failure
/// if the directory is not writable.
void write_outputs(const EnsembleObservables& obs, RunManifest& manifest, const SimConfig& config,
                   const std::filesystem::path& dir);

struct SeriesTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

SeriesTable read_series_csv(const std::filesystem::path& path);

struct GridTable {
    double t = 0;
    long bins = 0;
    double min = 0;
    double max = 0;
    Eigen::MatrixXd values;
};

GridTable read_grid_csv(const std::filesystem::path& path);

}  // namespace chemo

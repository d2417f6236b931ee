#pragma once

#include "gridflex/simulation.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gridflex {

inline constexpr std::string_view kArtifactVersion = "0.1.0";

/// 64-bit FNV-1a as 16 hex digits.
std::string content_hash(std::string_view bytes);

struct RunArtifacts {
    std::filesystem::path dir;
    std::string run_id;
    SweepOutput output;
};

/// Runs the sweep described by `config_text` and writes
/// `<out_root>/<run_id>/` with per-cell CSVs, aggregate.csv, failures.csv
/// and manifest.json. The run id depends only on the config text and the
/// seed, so repeating a run replaces its directory.
RunArtifacts execute_run(const std::filesystem::path& out_root, const std::string& config_text,
                         const std::filesystem::path& config_dir, std::optional<std::uint64_t> seed_override,
                         std::size_t jobs = 1);

enum class FigureKind { Carbon, Quota, PlanLength, Price, Variation };

std::string_view to_string(FigureKind kind) noexcept;
std::optional<FigureKind> parse_figure(std::string_view text) noexcept;

struct FigureRow {
    double x = 0.0;
    std::string series;
    double mean = 0.0;
    double stddev = 0.0;
};

/// Plot data from a results directory. Throws Error when the directory has
/// no manifest or no aggregate rows for the figure.
std::vector<FigureRow> figure_data(const std::filesystem::path& results_dir, FigureKind kind);

/// Writes `figure_<kind>.csv` (x,series,mean,stddev) into the results
/// directory and returns its path. Nothing is written on error.
std::filesystem::path write_figure(const std::filesystem::path& results_dir, FigureKind kind);

}  // namespace gridflex

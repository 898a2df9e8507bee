#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "lsboost/datagen.hpp"
#include "lsboost/dataset.hpp"
#include "lsboost/model.hpp"
#include "lsboost/train.hpp"

namespace lsboost::io {

/// Raw numeric CSV: header names and row-major cells.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;
  std::size_t rows() const noexcept { return columns.empty() ? 0 : columns.front().size(); }
  std::size_t column_index(const std::string& name) const;  // throws DataError
};

/// Parses a header row plus numeric cells. LF or CRLF line ends. Errors name
/// the row and column of the offending cell.
CsvTable read_csv(const std::filesystem::path& path);
CsvTable parse_csv(const std::string& text, const std::string& source = "<memory>");

enum class Rescale { Auto, MinMax, None };
Rescale parse_rescale(const std::string& text);

struct PreprocessSpec {
  std::string label = "y";
  std::optional<double> cap;
  Rescale rescale = Rescale::Auto;
  std::vector<std::string> exclude;  // extra columns that are not features
};

struct LoadedData {
  Dataset data;
  Normalization normalization;
  std::vector<std::string> feature_names;
};

/// Labels are clamped at `cap`, then min-max rescaled into [0,1].
LoadedData load_csv(const std::filesystem::path& path, const PreprocessSpec& spec);
LoadedData load_table(const CsvTable& table, const PreprocessSpec& spec);

/// Uses the stored normalization and feature order (e.g. from a model file).
LoadedData load_with(const CsvTable& table, const std::string& label,
                     const std::vector<std::string>& feature_names, const Normalization& norm);
/// Feature matrix only; the label column may be absent.
std::vector<double> feature_matrix(const CsvTable& table, const std::vector<std::string>& feature_names);

/// FNV-1a over the binary64 bytes of features then labels.
std::uint64_t fingerprint(const Dataset& data);

struct ModelMetadata {
  std::string label = "y";
  std::vector<std::string> feature_names;
  Normalization normalization;
  double alpha = 0.0;
  double bound_B = 1.0;
  std::string oracle;
  std::size_t min_level_size = 1;
  std::uint64_t dataset_fingerprint = 0;
  bool operator==(const ModelMetadata&) const = default;
};

struct ModelFile {
  static constexpr int kSchemaVersion = 1;
  LevelSetModel model;
  ModelMetadata metadata;
};

std::string serialize_model(const ModelFile& file);
/// Rejects unknown fields and version mismatches with DataError.
ModelFile parse_model(const std::string& text);
void write_model(const std::filesystem::path& path, const ModelFile& file);
ModelFile read_model(const std::filesystem::path& path);

/// round,mse,msce,nonempty_levels,oracle_calls,millis; one row per retained model.
std::string report_csv(const TrainReport& report);
void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

/// Shortest decimal that round-trips to the same binary64.
std::string format_double(double v);

}  // namespace lsboost::io

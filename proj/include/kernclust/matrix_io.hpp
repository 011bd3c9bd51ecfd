#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "kernclust/common.hpp"
#include "kernclust/model_gen.hpp"

namespace kernclust {

// Square matrix file: little-endian uint64 m, then m*m row-major float64.
void write_square_binary(const std::string& path, const Matrix& A);
Matrix read_square_binary(const std::string& path);

// Data matrix file: little-endian uint64 rows, uint64 cols, then row-major float64.
void write_data_binary(const std::string& path, const Matrix& A);
Matrix read_data_binary(const std::string& path);

// Comma-separated, one matrix row per line, 17 significant digits.
void write_csv(const std::string& path, const Matrix& A);
Matrix read_csv(const std::string& path);

bool has_csv_extension(const std::string& path);

// Chooses CSV for *.csv paths, otherwise the binary square format.
void write_matrix(const std::string& path, const Matrix& A);
Matrix read_matrix(const std::string& path);

nlohmann::json params_to_json(const ModelParams& p);
ModelParams params_from_json(const nlohmann::json& j);

// Writes the points to `path` (CSV or data binary by extension) and a JSON
// sidecar `path + ".json"` with params, truth labels and centers.
void save_dataset(const std::string& path, const Dataset& ds);
Dataset load_dataset(const std::string& path);

}  // namespace kernclust

#include "kernclust/matrix_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <vector>

namespace kernclust {

namespace {

template <typename T>
T to_little(T v) {
  if constexpr (std::endian::native == std::endian::big) {
    unsigned char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(b[i], b[sizeof(T) - 1 - i]);
    std::memcpy(&v, b, sizeof(T));
  }
  return v;
}

template <typename T>
void put(std::ostream& os, T v) {
  v = to_little(v);
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& is, const std::string& path) {
  T v{};
  if (!is.read(reinterpret_cast<char*>(&v), sizeof(T))) throw InvalidInput("truncated matrix file: " + path);
  return to_little(v);
}

std::ofstream open_out(const std::string& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream os(path, mode);
  if (!os) throw InvalidInput("cannot open for writing: " + path);
  return os;
}

std::ifstream open_in(const std::string& path, std::ios::openmode mode = std::ios::in) {
  std::ifstream is(path, mode);
  if (!is) throw InvalidInput("cannot open: " + path);
  return is;
}

void write_body(std::ostream& os, const Matrix& A) {
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    for (Eigen::Index j = 0; j < A.cols(); ++j) put<double>(os, A(i, j));
  }
}

Matrix read_body(std::istream& is, std::uint64_t rows, std::uint64_t cols, const std::string& path) {
  Matrix A(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    for (Eigen::Index j = 0; j < A.cols(); ++j) A(i, j) = get<double>(is, path);
  }
  return A;
}

}  // namespace

void write_square_binary(const std::string& path, const Matrix& A) {
  if (A.rows() != A.cols()) throw InvalidInput("write_square_binary: matrix is not square");
  auto os = open_out(path, std::ios::binary);
  put<std::uint64_t>(os, static_cast<std::uint64_t>(A.rows()));
  write_body(os, A);
}

Matrix read_square_binary(const std::string& path) {
  auto is = open_in(path, std::ios::binary);
  const auto m = get<std::uint64_t>(is, path);
  if (m > (1u << 20)) throw InvalidInput("implausible matrix size in " + path);
  return read_body(is, m, m, path);
}

void write_data_binary(const std::string& path, const Matrix& A) {
  auto os = open_out(path, std::ios::binary);
  put<std::uint64_t>(os, static_cast<std::uint64_t>(A.rows()));
  put<std::uint64_t>(os, static_cast<std::uint64_t>(A.cols()));
  write_body(os, A);
}

Matrix read_data_binary(const std::string& path) {
  auto is = open_in(path, std::ios::binary);
  const auto rows = get<std::uint64_t>(is, path);
  const auto cols = get<std::uint64_t>(is, path);
  if (rows > (1u << 24) || cols > (1u << 24)) throw InvalidInput("implausible matrix size in " + path);
  return read_body(is, rows, cols, path);
}

void write_csv(const std::string& path, const Matrix& A) {
  auto os = open_out(path);
  os << std::setprecision(17);
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    for (Eigen::Index j = 0; j < A.cols(); ++j) {
      if (j > 0) os << ',';
      os << A(i, j);
    }
    os << '\n';
  }
}

Matrix read_csv(const std::string& path) {
  auto is = open_in(path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw InvalidInput("non-numeric CSV cell '" + cell + "' in " + path);
      }
    }
    if (!rows.empty() && row.size() != rows.front().size()) throw InvalidInput("ragged CSV rows in " + path);
    rows.push_back(std::move(row));
  }
  Matrix A(static_cast<Eigen::Index>(rows.size()), rows.empty() ? 0 : static_cast<Eigen::Index>(rows[0].size()));
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    for (Eigen::Index j = 0; j < A.cols(); ++j) A(i, j) = rows[i][j];
  }
  return A;
}

bool has_csv_extension(const std::string& path) {
  return path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0;
}

void write_matrix(const std::string& path, const Matrix& A) {
  if (has_csv_extension(path)) {
    write_csv(path, A);
  } else {
    write_square_binary(path, A);
  }
}

Matrix read_matrix(const std::string& path) {
  return has_csv_extension(path) ? read_csv(path) : read_square_binary(path);
}

nlohmann::json params_to_json(const ModelParams& p) {
  return {{"k", p.k},         {"p", p.p},   {"alpha", p.alpha}, {"rho", p.rho},          {"seed", p.seed},
          {"c0", p.c0},       {"c_gamma", p.c_gamma},           {"c_sdp", p.c_sdp},      {"m", p.sample_count()}};
}

ModelParams params_from_json(const nlohmann::json& j) {
  ModelParams p;
  p.k = j.value("k", p.k);
  p.p = j.value("p", p.p);
  p.alpha = j.value("alpha", p.alpha);
  p.rho = j.value("rho", p.rho);
  p.seed = j.value("seed", p.seed);
  p.c0 = j.value("c0", p.c0);
  p.c_gamma = j.value("c_gamma", p.c_gamma);
  p.c_sdp = j.value("c_sdp", p.c_sdp);
  return p;
}

void save_dataset(const std::string& path, const Dataset& ds) {
  const Matrix points = ds.points;
  if (has_csv_extension(path)) {
    write_csv(path, points);
  } else {
    write_data_binary(path, points);
  }
  nlohmann::json side;
  side["params"] = params_to_json(ds.params);
  side["truth"] = ds.truth.labels;
  side["format"] = has_csv_extension(path) ? "csv" : "binary";
  nlohmann::json centers = nlohmann::json::array();
  for (Eigen::Index s = 0; s < ds.centers.rows(); ++s) {
    std::vector<double> row(ds.centers.cols());
    for (Eigen::Index d = 0; d < ds.centers.cols(); ++d) row[d] = ds.centers(s, d);
    centers.push_back(row);
  }
  side["centers"] = centers;
  auto os = open_out(path + ".json");
  os << side.dump(1) << '\n';
}

Dataset load_dataset(const std::string& path) {
  auto is = open_in(path + ".json");
  nlohmann::json side;
  try {
    is >> side;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput("bad dataset sidecar " + path + ".json: " + e.what());
  }
  Dataset ds;
  ds.params = params_from_json(side.at("params"));
  ds.points = has_csv_extension(path) ? read_csv(path) : read_data_binary(path);
  const auto labels = side.at("truth").get<std::vector<int>>();
  ds.truth = Partition{labels, ds.params.k};
  const auto centers = side.at("centers").get<std::vector<std::vector<double>>>();
  ds.centers.resize(static_cast<Eigen::Index>(centers.size()), ds.points.cols());
  for (Eigen::Index s = 0; s < ds.centers.rows(); ++s) {
    if (static_cast<Eigen::Index>(centers[s].size()) != ds.points.cols()) throw InvalidInput("center dimension mismatch");
    for (Eigen::Index d = 0; d < ds.centers.cols(); ++d) ds.centers(s, d) = centers[s][d];
  }
  if (ds.truth.size() != ds.m()) throw InvalidInput("truth labels do not match the point count");
  return ds;
}

}  // namespace kernclust

#include "mfpca/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace mfpca {

namespace fs = std::filesystem;

namespace {

std::ofstream open_out(const fs::path& file) {
  if (file.has_parent_path()) fs::create_directories(file.parent_path());
  std::ofstream out(file);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + file.string());
  return out;
}

std::ifstream open_in(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw Error(ErrorKind::kIo, "cannot read " + file.string());
  return in;
}

std::vector<double> parse_row(const std::string& line, const fs::path& file) {
  std::vector<double> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(cell, &used));
    } catch (const std::exception&) {
      throw Error(ErrorKind::kIo, "bad number '" + cell + "' in " + file.string());
    }
  }
  return out;
}

std::vector<std::vector<double>> read_rows(std::istream& in, const fs::path& file) {
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    rows.push_back(parse_row(line, file));
  }
  return rows;
}

template <typename Row>
void write_row(std::ostream& out, const Row& row) {
  for (Index i = 0; i < row.size(); ++i) {
    if (i) out << ',';
    out << format_double(row(i));
  }
  out << '\n';
}

Matrix to_matrix(const std::vector<std::vector<double>>& rows, Index cols, const fs::path& file) {
  Matrix m(static_cast<Index>(rows.size()), cols);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (static_cast<Index>(rows[r].size()) != cols) {
      throw Error(ErrorKind::kIo, "row " + std::to_string(r) + " of " + file.string() + " has the wrong length");
    }
    for (Index c = 0; c < cols; ++c) m(static_cast<Index>(r), c) = rows[r][static_cast<std::size_t>(c)];
  }
  return m;
}

// Reads "key=value" pairs of a header line.
std::string header_value(const std::string& header, const std::string& key, const fs::path& file) {
  std::stringstream ss(header);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq != std::string::npos && item.substr(0, eq) == key) return item.substr(eq + 1);
  }
  throw Error(ErrorKind::kIo, "missing '" + key + "' in the header of " + file.string());
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_dataset(const fs::path& dir, const Dataset& ds) {
  fs::create_directories(dir);
  for (Index p = 0; p < ds.n_features(); ++p) {
    const FeatureBlock& f = ds.feature(p);
    const std::string tag = std::to_string(p);
    {
      std::ofstream out = open_out(dir / ("grid_" + tag + ".csv"));
      for (Index d = 0; d < f.grid().dimension(); ++d) write_row(out, f.grid().axis(d));
    }
    {
      std::ofstream out = open_out(dir / ("feature_" + tag + ".csv"));
      out << "N=" << f.n_obs() << ",axes=";
      const std::vector<Index> shape = f.grid().shape();
      for (std::size_t d = 0; d < shape.size(); ++d) out << (d ? "x" : "") << shape[d];
      out << '\n';
      for (Index n = 0; n < f.n_obs(); ++n) write_row(out, f.values().row(n));
    }
    {
      std::ofstream out = open_out(dir / ("mask_" + tag + ".csv"));
      for (Index n = 0; n < f.n_obs(); ++n) {
        for (Index m = 0; m < f.grid().size(); ++m) out << (m ? "," : "") << (f.mask()(n, m) ? 1 : 0);
        out << '\n';
      }
    }
  }
  std::ofstream out = open_out(dir / "weights.csv");
  for (Index n = 0; n < ds.n_obs(); ++n) out << format_double(ds.obs_weights()(n)) << '\n';
}

Dataset read_dataset(const fs::path& dir) {
  std::vector<FeatureBlock> blocks;
  for (Index p = 0;; ++p) {
    const std::string tag = std::to_string(p);
    const fs::path values_file = dir / ("feature_" + tag + ".csv");
    if (!fs::exists(values_file)) break;
    std::ifstream grid_in = open_in(dir / ("grid_" + tag + ".csv"));
    std::vector<Vector> axes;
    for (const auto& row : read_rows(grid_in, dir / ("grid_" + tag + ".csv"))) {
      axes.push_back(Eigen::Map<const Vector>(row.data(), static_cast<Index>(row.size())));
    }
    DomainGrid grid(std::move(axes));

    std::ifstream in = open_in(values_file);
    std::string header;
    std::getline(in, header);
    const Index n = std::stol(header_value(header, "N", values_file));
    Matrix values = to_matrix(read_rows(in, values_file), grid.size(), values_file);
    if (values.rows() != n) throw Error(ErrorKind::kIo, values_file.string() + " holds a different N than its header");

    const fs::path mask_file = dir / ("mask_" + tag + ".csv");
    if (fs::exists(mask_file)) {
      std::ifstream min = open_in(mask_file);
      const Matrix m = to_matrix(read_rows(min, mask_file), grid.size(), mask_file);
      blocks.emplace_back(grid, std::move(values), Mask(m.array() != 0.0));
    } else {
      blocks.emplace_back(grid, std::move(values));
    }
  }
  if (blocks.empty()) throw Error(ErrorKind::kIo, "no feature_0.csv in " + dir.string());
  const fs::path wfile = dir / "weights.csv";
  if (!fs::exists(wfile)) return Dataset(std::move(blocks));
  std::ifstream win = open_in(wfile);
  const Matrix w = to_matrix(read_rows(win, wfile), 1, wfile);
  return Dataset(std::move(blocks), w.col(0));
}

void write_gram(const fs::path& file, const Matrix& m) {
  std::ofstream out = open_out(file);
  out << "N=" << m.rows() << '\n';
  for (Index i = 0; i < m.rows(); ++i) write_row(out, m.row(i));
}

Matrix read_gram(const fs::path& file) {
  std::ifstream in = open_in(file);
  std::string header;
  std::getline(in, header);
  const Index n = std::stol(header_value(header, "N", file));
  Matrix m = to_matrix(read_rows(in, file), n, file);
  if (m.rows() != n) throw Error(ErrorKind::kIo, file.string() + " is not " + std::to_string(n) + " x " + std::to_string(n));
  return m;
}

void write_model(const fs::path& dir, const MfpcaModel& model) {
  fs::create_directories(dir);
  {
    std::ofstream out = open_out(dir / "eigenvalues.csv");
    out << "k,lambda,explained\n";
    for (Index k = 0; k < model.n_components(); ++k) {
      out << k + 1 << ',' << format_double(model.eigenvalues(k)) << ',' << format_double(model.explained(k)) << '\n';
    }
  }
  {
    std::ofstream out = open_out(dir / "scores.csv");
    for (Index n = 0; n < model.scores.rows(); ++n) write_row(out, model.scores.row(n));
  }
  for (std::size_t p = 0; p < model.eigenfunctions.size(); ++p) {
    std::ofstream out = open_out(dir / ("eigenfunctions_" + std::to_string(p) + ".csv"));
    for (Index k = 0; k < model.n_components(); ++k) write_row(out, model.eigenfunctions[p].row(k));
    std::ofstream mean = open_out(dir / ("mean_" + std::to_string(p) + ".csv"));
    write_row(mean, model.mean[p].transpose());
  }
}

void write_coefficients(const fs::path& file, const CoefficientMatrix& c) {
  std::ofstream out = open_out(file);
  out << "blocks=";
  for (std::size_t p = 0; p < c.block_sizes.size(); ++p) out << (p ? ";" : "") << c.block_sizes[p];
  out << '\n';
  for (Index n = 0; n < c.values.rows(); ++n) write_row(out, c.values.row(n));
}

CoefficientMatrix read_coefficients(const fs::path& file) {
  std::ifstream in = open_in(file);
  std::string header;
  std::getline(in, header);
  if (header.rfind("blocks=", 0) != 0) throw Error(ErrorKind::kIo, "missing blocks header in " + file.string());
  CoefficientMatrix c;
  std::stringstream ss(header.substr(7));
  std::string item;
  Index total = 0;
  while (std::getline(ss, item, ';')) {
    c.block_sizes.push_back(std::stol(item));
    total += c.block_sizes.back();
  }
  c.values = to_matrix(read_rows(in, file), total, file);
  return c;
}

void write_kl_model(const fs::path& file, const KLModel& model) {
  std::ofstream out = open_out(file);
  out << "k,lambda,alpha\n";
  for (Index k = 0; k < model.n_components(); ++k) {
    out << k + 1 << ',' << format_double(model.eigenvalues(k)) << ',' << format_double(model.alpha(k)) << '\n';
  }
}

}  // namespace mfpca

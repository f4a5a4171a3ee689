// Flat-file readers and writers. Formats are line-oriented and documented
// in the README; all floating-point output uses "%.17g".
#include "shapedist/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace shapedist {

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);  // fixed '\n' line endings
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  return in;
}

bool next_content_line(std::istream& in, std::string& line) {
  while (std::getline(in, line)) {
    std::size_t pos = line.find_first_not_of(" \t\r");
    if (pos == std::string::npos || line[pos] == '#') continue;
    return true;
  }
  return false;
}

double parse_double(const std::string& tok, const std::string& where) {
  try {
    std::size_t used = 0;
    const double v = std::stod(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw IoError(where + ": bad number '" + tok + "'");
  }
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string tok;
  std::istringstream is(line);
  while (std::getline(is, tok, sep)) {
    while (!tok.empty() && (tok.back() == '\r' || tok.back() == ' '))
      tok.pop_back();
    out.push_back(tok);
  }
  return out;
}

// "key value" header line with an expected key.
std::string header_value(std::istream& in, const std::string& key,
                         const std::string& path) {
  std::string line;
  if (!next_content_line(in, line))
    throw IoError(path + ": missing header field '" + key + "'");
  std::istringstream is(line);
  std::string k, v;
  is >> k >> v;
  if (k != key)
    throw IoError(path + ": expected header field '" + key + "', got '" + k +
                  "'");
  return v;
}

}  // namespace

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_dataset(const std::string& path, const Dataset& ds) {
  ds.validate_configs();
  std::ofstream out = open_out(path);
  out << "# shapedist dataset: one configuration per row, landmark-major\n";
  out << "d " << ds.d << "\n";
  out << "m " << ds.m << "\n";
  out << "n " << ds.n() << "\n";
  out << "sigma " << format_double(ds.sigma) << "\n";
  for (const LandmarkConfig& c : ds.configs) {
    for (int i = 0; i < c.dim(); ++i) {
      if (i) out << ' ';
      out << format_double(c.coords[i]);
    }
    out << "\n";
  }
}

Dataset read_dataset(const std::string& path) {
  std::ifstream in = open_in(path);
  Dataset ds;
  ds.d = static_cast<int>(parse_double(header_value(in, "d", path), path));
  ds.m = static_cast<int>(parse_double(header_value(in, "m", path), path));
  const int n =
      static_cast<int>(parse_double(header_value(in, "n", path), path));
  ds.sigma = parse_double(header_value(in, "sigma", path), path);
  if (ds.d < 1 || ds.m < 1 || n < 1) throw IoError(path + ": bad header");
  const int dim = ds.d * ds.m;
  std::string line;
  for (int row = 0; row < n; ++row) {
    if (!next_content_line(in, line))
      throw IoError(path + ": expected " + std::to_string(n) + " rows");
    std::istringstream is(line);
    LandmarkConfig c;
    c.d = ds.d;
    c.m = ds.m;
    c.coords = Vector(dim);
    std::string tok;
    for (int i = 0; i < dim; ++i) {
      if (!(is >> tok)) throw IoError(path + ": short row " + std::to_string(row));
      c.coords[i] = parse_double(tok, path);
    }
    ds.configs.push_back(std::move(c));
  }
  ds.validate_configs();
  return ds;
}

void write_distance_matrix_csv(const std::string& path,
                               const DistanceMatrix& dm) {
  std::ofstream out = open_out(path);
  out << "# method=" << method_name(dm.method) << " n=" << dm.n
      << " bvp_count=" << dm.bvp_count
      << " nonconverged_pairs=" << dm.count_nonconverged();
  if (dm.method == DistanceMethod::Taylor2)
    out << " negative_pairs=" << dm.count_negativity();
  out << "\n";
  for (int i = 0; i < dm.n; ++i) {
    for (int j = 0; j < dm.n; ++j) {
      if (j) out << ',';
      out << format_double(dm.values(i, j));
    }
    out << "\n";
  }
}

DistanceMatrix read_distance_matrix_csv(const std::string& path) {
  std::ifstream in = open_in(path);
  DistanceMatrix dm;
  std::string line;
  // Header comment: "# method=<name> n=<n> bvp_count=<c> ..."
  if (!std::getline(in, line) || line.rfind("# ", 0) != 0)
    throw IoError(path + ": missing matrix header");
  {
    std::istringstream is(line.substr(2));
    std::string field;
    while (is >> field) {
      const std::size_t eq = field.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = field.substr(0, eq);
      const std::string val = field.substr(eq + 1);
      if (key == "method") dm.method = method_from_name(val);
      if (key == "n") dm.n = static_cast<int>(parse_double(val, path));
      if (key == "bvp_count")
        dm.bvp_count = static_cast<std::uint64_t>(parse_double(val, path));
    }
  }
  if (dm.n < 1) throw IoError(path + ": bad matrix header");
  dm.values = Matrix::Zero(dm.n, dm.n);
  for (int i = 0; i < dm.n; ++i) {
    if (!next_content_line(in, line))
      throw IoError(path + ": expected " + std::to_string(dm.n) + " rows");
    const std::vector<std::string> toks = split(line, ',');
    if (static_cast<int>(toks.size()) != dm.n)
      throw IoError(path + ": row " + std::to_string(i) + " has " +
                    std::to_string(toks.size()) + " columns");
    for (int j = 0; j < dm.n; ++j) dm.values(i, j) = parse_double(toks[j], path);
  }
  dm.validate();
  return dm;
}

void write_embedding_csv(const std::string& path, const Embedding& e) {
  std::ofstream out = open_out(path);
  out << "# mds embedding n=" << e.n << " dim=" << e.dim << " eigenvalues=";
  for (int j = 0; j < e.dim; ++j) {
    if (j) out << ';';
    out << format_double(e.eigenvalues[j]);
  }
  out << " clamped=" << e.clamped << "\n";
  for (int i = 0; i < e.n; ++i) {
    for (int j = 0; j < e.dim; ++j) {
      if (j) out << ',';
      out << format_double(e.points(i, j));
    }
    out << "\n";
  }
}

void write_histogram_csv(const std::string& path, const HistogramSpec& h,
                         const std::string& comment) {
  std::ofstream out = open_out(path);
  if (!comment.empty()) out << "# " << comment << "\n";
  out << "bin_lo,bin_hi,count\n";
  for (int i = 0; i < h.bin_count; ++i)
    out << format_double(h.edges[i]) << ',' << format_double(h.edges[i + 1])
        << ',' << h.counts[i] << "\n";
}

}  // namespace shapedist

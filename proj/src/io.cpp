#include "rlpp/io.hpp"

#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace rlpp::io {

namespace {

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open file: " + path);
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot open file for writing: " + path);
  return out;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  fields.push_back(cur);
  return fields;
}

bool parse_double(const std::string& s, double& out) {
  std::size_t pos = 0;
  try {
    out = std::stod(s, &pos);
  } catch (...) {
    return false;
  }
  while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  return pos == s.size();
}

}  // namespace

PointSet read_points_csv(const std::string& path) {
  auto in = open_in(path);
  std::vector<std::vector<double>> rows;
  std::string line;
  int lineno = 0;
  int cols = -1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto fields = split_csv_line(line);
    std::vector<double> row;
    bool numeric = true;
    for (const auto& f : fields) {
      double v;
      if (!parse_double(f, v)) {
        numeric = false;
        break;
      }
      row.push_back(v);
    }
    if (!numeric) {
      if (lineno == 1 && rows.empty()) continue;  // header row
      throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                               ": non-numeric field");
    }
    if (cols < 0) cols = static_cast<int>(row.size());
    if (static_cast<int>(row.size()) != cols)
      throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                               ": inconsistent column count");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::invalid_argument(path + ": no data rows");
  PointSet ps;
  ps.points.resize(rows.size(), cols);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (int j = 0; j < cols; ++j) ps.points(i, j) = rows[i][j];
  ps.validate();
  return ps;
}

void write_points_csv(const std::string& path, const PointSet& points) {
  auto out = open_out(path);
  out.precision(17);
  for (int i = 0; i < points.size(); ++i) {
    for (int j = 0; j < points.dim(); ++j) {
      if (j) out << ',';
      out << points.points(i, j);
    }
    out << '\n';
  }
}

gran::BinaryImage read_pbm(const std::string& path) {
  auto in = open_in(path);
  std::string magic;
  in >> magic;
  if (magic != "P1") throw std::invalid_argument(path + ": not a plain PBM (P1) file");

  auto next_token = [&in](std::string& tok) -> bool {
    while (in >> tok) {
      if (tok[0] == '#') {
        std::string rest;
        std::getline(in, rest);
        continue;
      }
      return true;
    }
    return false;
  };

  std::string tok;
  if (!next_token(tok)) throw std::invalid_argument(path + ": missing width");
  const int w = std::stoi(tok);
  if (!next_token(tok)) throw std::invalid_argument(path + ": missing height");
  const int h = std::stoi(tok);
  if (w <= 0 || h <= 0) throw std::invalid_argument(path + ": invalid dimensions");

  gran::BinaryImage img;
  img.width = w;
  img.height = h;
  img.pixels.reserve(static_cast<std::size_t>(w) * h);
  char c;
  while (img.pixels.size() < static_cast<std::size_t>(w) * h && in.get(c)) {
    if (c == '0') img.pixels.push_back(0);
    else if (c == '1') img.pixels.push_back(1);
    else if (c == '#') {
      std::string rest;
      std::getline(in, rest);
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      throw std::invalid_argument(path + ": invalid PBM character");
    }
  }
  if (img.pixels.size() != static_cast<std::size_t>(w) * h)
    throw std::invalid_argument(path + ": truncated PBM data");
  while (in.get(c)) {
    if (!std::isspace(static_cast<unsigned char>(c)))
      throw std::invalid_argument(path + ": trailing garbage after PBM data");
  }
  return img;
}

void write_pbm(const std::string& path, const gran::BinaryImage& img) {
  auto out = open_out(path);
  out << "P1\n" << img.width << ' ' << img.height << '\n';
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      out << (img.at(x, y) ? '1' : '0');
      out << ((x + 1 == img.width) ? '\n' : ' ');
    }
  }
}

std::string partition_to_structured(const Partition& p) {
  std::ostringstream os;
  os << '[';
  const auto blocks = p.blocks();
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    if (b) os << ',';
    os << '[';
    for (std::size_t i = 0; i < blocks[b].size(); ++i) {
      if (i) os << ',';
      os << blocks[b][i];
    }
    os << ']';
  }
  os << ']';
  return os.str();
}

Partition read_partition_file(const std::string& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument(path + ": empty partition file");
  return Partition::from_line(line);
}

ModelSpec read_model_spec(const std::string& path) {
  auto in = open_in(path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(path + ": invalid JSON: " + e.what());
  }

  ModelSpec spec;
  const int d = j.at("dimension").get<int>();
  for (const auto& lab : j.at("labels")) {
    NiwLabelParams p;
    const auto mv = lab.at("m").get<std::vector<double>>();
    if (static_cast<int>(mv.size()) != d)
      throw std::invalid_argument(path + ": label mean dimension mismatch");
    p.m = Eigen::Map<const Eigen::VectorXd>(mv.data(), d);
    p.nu = lab.at("nu").get<double>();
    p.kappa = lab.at("kappa").get<double>();
    const auto rows = lab.at("psi").get<std::vector<std::vector<double>>>();
    if (static_cast<int>(rows.size()) != d)
      throw std::invalid_argument(path + ": Psi dimension mismatch");
    p.psi.resize(d, d);
    for (int r = 0; r < d; ++r) {
      if (static_cast<int>(rows[r].size()) != d)
        throw std::invalid_argument(path + ": Psi dimension mismatch");
      for (int c = 0; c < d; ++c) p.psi(r, c) = rows[r][c];
    }
    spec.model.labels.push_back(std::move(p));
  }
  spec.model.validate();

  const auto& prior = j.at("prior");
  const auto kind = prior.at("kind").get<std::string>();
  if (kind == "fixed-sizes-uniform") {
    spec.prior = LabelPrior::fixed_sizes(prior.at("sizes").get<std::vector<int>>());
  } else {
    throw std::invalid_argument(path + ": unsupported prior kind: " + kind);
  }
  if (spec.prior.label_count() != spec.model.label_count())
    throw std::invalid_argument(path + ": prior sizes and label count mismatch");
  return spec;
}

}  // namespace rlpp::io

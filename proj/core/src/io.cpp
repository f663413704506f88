// Copyright 2026 The deeptherm Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "deeptherm/io.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace deeptherm {

namespace {

using nlohmann::json;

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// Quotes a CSV field when it holds a separator or quote.
std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

json record_json(const ResultRecord& r) {
  json j;
  j["config"] = json::parse(to_json(r.config));
  j["fingerprint"] = r.fingerprint;
  j["plateau"] = {{"mean", r.plateau.mean},
                  {"spread", r.plateau.spread},
                  {"points", r.plateau.points},
                  {"window", {r.window.t_begin, r.window.t_end}}};
  j["target"] = {{"trace_defect", r.target_trace_defect}, {"samples", r.target_samples}};
  j["realizations"] = r.realizations.size();
  json failures = json::array();
  for (const auto& [idx, msg] : r.failures) failures.push_back({{"realization", idx}, {"error", msg}});
  j["failures"] = failures;
  return j;
}

}  // namespace

void write_results_csv(std::ostream& out, std::span<const ResultRecord> records) {
  out << kCsvHeader << "\n";
  for (const ResultRecord& rec : records) {
    const std::string prefix = std::to_string(rec.config.n) + "," + std::to_string(rec.config.n_a) +
                               "," + std::to_string(rec.config.k) + "," +
                               csv_field(rec.config.basis.to_string()) + "," +
                               csv_field(to_string(rec.config.target)) + ",";
    for (const TimeSeries& s : rec.realizations) {
      for (std::size_t i = 0; i < s.times.size(); ++i) {
        out << prefix << s.realization << "," << s.times[i] << "," << format_double(s.values[i])
            << "\n";
      }
    }
  }
}

std::vector<CsvRow> read_results_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) {
    throw std::invalid_argument("results CSV: missing or unexpected header");
  }
  std::vector<CsvRow> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 8) {
      throw std::invalid_argument("results CSV line " + std::to_string(line_no) + ": expected 8 fields");
    }
    try {
      CsvRow r;
      r.n = std::stoi(f[0]);
      r.n_a = std::stoi(f[1]);
      r.k = std::stoi(f[2]);
      r.basis = f[3];
      r.target = f[4];
      r.realization = std::stoi(f[5]);
      r.t = std::stoi(f[6]);
      r.delta = std::stod(f[7]);
      rows.push_back(std::move(r));
    } catch (const std::logic_error&) {
      throw std::invalid_argument("results CSV line " + std::to_string(line_no) + ": bad number");
    }
  }
  return rows;
}

std::string metadata_json(const ResultRecord& record) { return record_json(record).dump(2); }

std::string metadata_json(const SweepResult& sweep) {
  json j;
  json records = json::array();
  for (const ResultRecord& r : sweep.records) records.push_back(record_json(r));
  j["records"] = records;
  j["sizes"] = sweep.sizes;
  j["plateaus"] = sweep.plateaus;
  j["degenerate"] = sweep.degenerate;
  if (sweep.exponential) {
    j["fit"] = {{"kind", "exponential"},
                {"rate", sweep.exponential->rate},
                {"prefactor", sweep.exponential->prefactor},
                {"residual", sweep.exponential->residual}};
  } else if (sweep.power) {
    j["fit"] = {{"kind", "power"},
                {"exponent", sweep.power->exponent},
                {"prefactor", sweep.power->prefactor},
                {"residual", sweep.power->residual}};
  } else {
    j["fit"] = nullptr;
  }
  return j.dump(2);
}

void write_matrix(std::ostream& out, const CMatrix& matrix,
                  const std::map<std::string, std::string>& meta) {
  out << "# deeptherm-matrix 1\n";
  out << "# rows " << matrix.rows() << " cols " << matrix.cols() << "\n";
  for (const auto& [key, value] : meta) {
    if (key.find_first_of(" \n") != std::string::npos || value.find('\n') != std::string::npos) {
      throw std::invalid_argument("write_matrix: metadata keys must be single words");
    }
    out << "# " << key << " " << value << "\n";
  }
  for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
    for (Eigen::Index j = 0; j < matrix.cols(); ++j) {
      if (j) out << ' ';
      out << format_double(matrix(i, j).real()) << ' ' << format_double(matrix(i, j).imag());
    }
    out << "\n";
  }
}

void write_moment(std::ostream& out, const MomentOperator& moment) {
  write_matrix(out, moment.matrix,
               {{"local_dim", std::to_string(moment.local_dim)}, {"k", std::to_string(moment.k)}});
}

MatrixDump read_matrix(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "# deeptherm-matrix 1") {
    throw std::invalid_argument("matrix file: missing format header");
  }
  long rows = -1, cols = -1;
  if (!std::getline(in, line) || std::sscanf(line.c_str(), "# rows %ld cols %ld", &rows, &cols) != 2 ||
      rows < 0 || cols < 0) {
    throw std::invalid_argument("matrix file: missing shape line");
  }
  MatrixDump dump;
  while (in.peek() == '#') {
    std::getline(in, line);
    std::istringstream hs(line.substr(1));
    std::string key, value;
    hs >> key;
    std::getline(hs >> std::ws, value);
    if (!key.empty()) dump.meta[key] = value;
  }
  dump.matrix.resize(rows, cols);
  for (long i = 0; i < rows; ++i) {
    if (!std::getline(in, line)) throw std::invalid_argument("matrix file: truncated");
    std::istringstream ls(line);
    for (long j = 0; j < cols; ++j) {
      std::string re, im;
      if (!(ls >> re >> im)) {
        throw std::invalid_argument("matrix file: row " + std::to_string(i) + " is short");
      }
      try {
        dump.matrix(i, j) = Complex(std::stod(re), std::stod(im));
      } catch (const std::logic_error&) {
        throw std::invalid_argument("matrix file: bad number in row " + std::to_string(i));
      }
    }
  }
  return dump;
}

MomentOperator read_moment(std::istream& in) {
  MatrixDump dump = read_matrix(in);
  MomentOperator m;
  try {
    m.local_dim = std::stoi(dump.meta.at("local_dim"));
    m.k = std::stoi(dump.meta.at("k"));
  } catch (const std::exception&) {
    throw std::invalid_argument("matrix file: local_dim / k header missing");
  }
  m.matrix = std::move(dump.matrix);
  return m;
}

}  // namespace deeptherm

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

// CSV results, JSON metadata and the text matrix format.
//
// Matrix files look like
//
//   # deeptherm-matrix 1
//   # rows 16 cols 16
//   # local_dim 4
//   # k 2
//   <re> <im> <re> <im> ...      one line per row
//
// Header lines after the first two are free-form "# key value" pairs.
// Numbers are written with 17 significant digits, so a dump reads back
// bit-identically.

#ifndef DEEPTHERM_IO_HPP
#define DEEPTHERM_IO_HPP

#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "deeptherm/harness.hpp"
#include "deeptherm/replicas.hpp"

namespace deeptherm {

/// Column order of the results CSV.
inline constexpr const char* kCsvHeader = "N,N_A,k,basis,target,realization,t,delta";

/// One CSV row per (record, realization, t), header first.
void write_results_csv(std::ostream& out, std::span<const ResultRecord> records);

struct CsvRow {
  int n = 0;
  int n_a = 0;
  int k = 0;
  std::string basis;
  std::string target;
  int realization = 0;
  int t = 0;
  double delta = 0.0;
};

/// Throws std::invalid_argument on a bad header or malformed row.
std::vector<CsvRow> read_results_csv(std::istream& in);

/// Config, fingerprint, plateau, target diagnostics and failures.
std::string metadata_json(const ResultRecord& record);
/// Per-size metadata plus the scaling fit.
std::string metadata_json(const SweepResult& sweep);

struct MatrixDump {
  CMatrix matrix;
  std::map<std::string, std::string> meta;
};

void write_matrix(std::ostream& out, const CMatrix& matrix,
                  const std::map<std::string, std::string>& meta = {});
void write_moment(std::ostream& out, const MomentOperator& moment);
MatrixDump read_matrix(std::istream& in);
/// Reads a dump written by write_moment.
MomentOperator read_moment(std::istream& in);

}  // namespace deeptherm

#endif  // DEEPTHERM_IO_HPP

#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace jumpstop {

/// Nine significant digits, shortest of fixed/scientific ("%.9g").
std::string format_number(double v);

std::uint64_t fnv1a64(std::string_view bytes);

/// Provenance record written next to every output set.
struct RunManifest {
  std::string command;
  std::string input;
  nlohmann::json model;
  nlohmann::json flags;  // result-affecting flags only
  std::string version;
  std::string timestamp;
  std::uint64_t seed = 0;
  std::vector<std::string> outputs;

  /// Hash over the fields that determine the outputs: command, model,
  /// flags, version and seed. Paths and timestamp are excluded.
  std::string hash() const;
  nlohmann::json to_json() const;
};

/// RFC-4180 CSV. The first line is a comment carrying the manifest hash.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& file, std::string_view manifest_hash,
            const std::vector<std::string>& header);

  void row(const std::vector<std::string>& fields);

 private:
  void write_fields(const std::vector<std::string>& fields);
  std::ofstream out_;
  std::size_t columns_;
};

std::string csv_escape(std::string_view field);

}  // namespace jumpstop

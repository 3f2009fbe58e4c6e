#include "jumpstop/report.hpp"

#include <fmt/format.h>

#include "jumpstop/errors.hpp"

namespace jumpstop {

std::string format_number(double v) { return fmt::format("{:.9g}", v); }

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (const unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string RunManifest::hash() const {
  const nlohmann::json key = {
      {"command", command}, {"model", model}, {"flags", flags}, {"version", version}, {"seed", seed}};
  return fmt::format("{:016x}", fnv1a64(key.dump()));
}

nlohmann::json RunManifest::to_json() const {
  return {{"command", command}, {"input", input},         {"model", model},     {"flags", flags},
          {"version", version}, {"timestamp", timestamp}, {"seed", seed},       {"outputs", outputs},
          {"hash", hash()}};
}

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (const char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

CsvWriter::CsvWriter(const std::filesystem::path& file, std::string_view manifest_hash,
                     const std::vector<std::string>& header)
    : out_(file, std::ios::binary | std::ios::trunc), columns_(header.size()) {
  if (!out_) throw Error("cannot write " + file.string());
  out_ << "# manifest " << manifest_hash << "\r\n";
  write_fields(header);
}

void CsvWriter::row(const std::vector<std::string>& fields) {
  if (fields.size() != columns_) throw Error("csv row has the wrong number of fields");
  write_fields(fields);
}

void CsvWriter::write_fields(const std::vector<std::string>& fields) {
  for (std::size_t k = 0; k < fields.size(); ++k) {
    if (k) out_ << ',';
    out_ << csv_escape(fields[k]);
  }
  out_ << "\r\n";
  if (!out_) throw Error("csv write failed");
}

}  // namespace jumpstop

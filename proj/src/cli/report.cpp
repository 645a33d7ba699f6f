#include "torus/cli/report.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "torus/errors.hpp"

namespace torus::cli {

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

Csv::Csv(std::vector<std::string> header) : header_(std::move(header)) {}

void Csv::row(std::vector<std::string> cells) {
  if (cells.size() != header_.size()) throw InvalidArgument("CSV row width does not match the header");
  rows_.push_back(std::move(cells));
}

std::string Csv::str() const {
  std::ostringstream os;
  const auto line = [&os](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
    os << '\n';
  };
  line(header_);
  for (const auto& r : rows_) line(r);
  return os.str();
}

Json report_header(const std::string& command, const ExperimentConfig* config) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["tool"] = "torusctl";
  j["tool_version"] = kToolVersion;
  j["command"] = command;
  if (config) {
    j["config_sha256"] = config->sha256;
    j["seed"] = config->seed;
  }
  return j;
}

OutputDir::OutputDir(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec || !std::filesystem::is_directory(dir_))
    throw InvalidArgument("cannot create output directory '" + dir_.string() + "'");
  const auto probe = dir_ / ".torusctl_probe";
  {
    std::ofstream f(probe);
    if (!f) throw InvalidArgument("output directory '" + dir_.string() + "' is not writable");
  }
  std::filesystem::remove(probe, ec);
}

void OutputDir::write(const std::string& name, const std::string& content) {
  std::ofstream f(dir_ / name, std::ios::binary | std::ios::trunc);
  f << content;
  if (!f) throw InvalidArgument("failed writing '" + (dir_ / name).string() + "'");
  written_.push_back(name);
}

void OutputDir::write(const std::string& name, const Json& j) { write(name, j.dump(2) + "\n"); }

Json complex_json(cplx z) {
  Json j;
  j["re"] = z.real();
  j["im"] = z.imag();
  return j;
}

}  // namespace torus::cli

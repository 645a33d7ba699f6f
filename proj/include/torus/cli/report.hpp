#pragma once

#include <filesystem>
#include <initializer_list>
#include <string>
#include <vector>

#include <json.hpp>

#include "torus/cli/config.hpp"

namespace torus::cli {

inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr int kSchemaVersion = 1;

using Json = nlohmann::ordered_json;

/// %.17g, so every double round-trips.
std::string fmt(double x);

class Csv {
 public:
  explicit Csv(std::vector<std::string> header);
  void row(std::vector<std::string> cells);
  std::string str() const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// Common header of every JSON report.
Json report_header(const std::string& command, const ExperimentConfig* config);

class OutputDir {
 public:
  /// Creates the directory; throws InvalidArgument when it cannot be written.
  explicit OutputDir(std::filesystem::path dir);
  const std::filesystem::path& path() const noexcept { return dir_; }
  void write(const std::string& name, const std::string& content);
  void write(const std::string& name, const Json& j);
  const std::vector<std::string>& written() const noexcept { return written_; }

 private:
  std::filesystem::path dir_;
  std::vector<std::string> written_;
};

/// Complex number as {"re": ..., "im": ...}.
Json complex_json(cplx z);

}  // namespace torus::cli

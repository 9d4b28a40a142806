#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "shadowlab/models.hpp"
#include "shadowlab/shadowing.hpp"

namespace shadowlab::cli {

/// Everything replay needs besides the pseudo-orbit.
struct CertificateFile {
  std::string model;
  ModelParams params;
  double eps = 0.0;
  ShadowingCertificate cert;
  std::optional<double> max_step;  // time step the search used
};

nlohmann::ordered_json search_log_json(const SearchLog& log);

nlohmann::ordered_json certificate_json(const std::string& model, const ModelParams& params,
                                        double eps, const ShadowingCertificate& cert,
                                        const SearchLog& log, const std::string& orbit_file);

/// Throws std::runtime_error on malformed input.
CertificateFile parse_certificate(const std::string& text);

/// Quotes a CSV field when it contains a comma, quote or line break.
std::string csv_field(const std::string& s);

/// Files of one run, written together by write_all.
class ArtifactSet {
 public:
  void add(const std::string& relative_path, std::string content);
  bool empty() const { return files_.empty(); }
  const std::map<std::string, std::string>& files() const { return files_; }
  /// Clears earlier run artifacts under dir, then writes every file.
  void write_all(const std::filesystem::path& dir) const;

 private:
  std::map<std::string, std::string> files_;
};

}  // namespace shadowlab::cli

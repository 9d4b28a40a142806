#include "artifacts.hpp"

#include <fstream>
#include <stdexcept>

namespace shadowlab::cli {

using nlohmann::ordered_json;

namespace {

const char* kCertificateFormat = "shadowlab-certificate";

ordered_json point_json(const Point& p) {
  ordered_json a = ordered_json::array();
  for (double v : p.coords()) a.push_back(v);
  return a;
}

template <class T>
T field(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) throw std::runtime_error(std::string("certificate: missing '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw std::runtime_error(std::string("certificate: bad value for '") + key + "'");
  }
}

}  // namespace

ordered_json search_log_json(const SearchLog& log) {
  return ordered_json{
      {"eps", log.eps},
      {"eps_lo", log.eps_lo},
      {"eps_hi", log.eps_hi},
      {"dt", log.dt},
      {"grid_spacing", log.grid_spacing},
      {"band", log.band},
      {"horizon_begin", log.horizon_begin},
      {"horizon_end", log.horizon_end},
      {"forward_only", log.forward_only},
      {"candidates", log.candidates},
      {"candidates_with_path", log.candidates_with_path},
      {"candidates_certified", log.candidates_certified},
      {"candidates_over_budget", log.candidates_over_budget},
      {"cells_evaluated", log.cells_evaluated},
      {"best_candidate", log.best_candidate},
  };
}

ordered_json certificate_json(const std::string& model, const ModelParams& params, double eps,
                              const ShadowingCertificate& cert, const SearchLog& log,
                              const std::string& orbit_file) {
  ordered_json p = ordered_json::object();
  for (const auto& [k, v] : params) p[k] = v;
  ordered_json anchors = ordered_json::array();
  for (const auto& [t, u] : cert.h.anchors()) anchors.push_back({t, u});
  return ordered_json{
      {"format", kCertificateFormat},
      {"version", 1},
      {"model", model},
      {"params", p},
      {"eps", eps},
      {"pseudo_orbit", orbit_file},
      {"y", point_json(cert.y)},
      {"h",
       {{"anchors", anchors},
        {"left_slope", cert.h.left_slope()},
        {"right_slope", cert.h.right_slope()}}},
      {"grid", {{"start", cert.grid.start}, {"end", cert.grid.end}, {"step", cert.grid.step}}},
      {"achieved_sup", cert.achieved_sup},
      {"search", search_log_json(log)},
  };
}

CertificateFile parse_certificate(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error(std::string("certificate: ") + e.what());
  }
  if (!j.is_object() || field<std::string>(j, "format") != kCertificateFormat)
    throw std::runtime_error("certificate: not a shadowlab certificate");
  CertificateFile f;
  f.model = field<std::string>(j, "model");
  f.params = field<std::map<std::string, double>>(j, "params");
  f.eps = field<double>(j, "eps");
  const auto y = field<std::vector<double>>(j, "y");
  if (y.empty() || y.size() > Point::kMaxDim) throw std::runtime_error("certificate: bad 'y'");
  f.cert.y = Point(std::span<const double>(y));
  const auto h = field<nlohmann::json>(j, "h");
  try {
    f.cert.h = Reparam(field<std::vector<Reparam::Anchor>>(h, "anchors"),
                       field<double>(h, "left_slope"), field<double>(h, "right_slope"));
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(std::string("certificate: ") + e.what());
  }
  const auto g = field<nlohmann::json>(j, "grid");
  f.cert.grid = {field<double>(g, "start"), field<double>(g, "end"), field<double>(g, "step")};
  if (!(f.cert.grid.step > 0.0) || !(f.cert.grid.end >= f.cert.grid.start))
    throw std::runtime_error("certificate: bad 'grid'");
  f.cert.achieved_sup = field<double>(j, "achieved_sup");
  if (j.contains("search")) {
    const auto s = field<nlohmann::json>(j, "search");
    if (s.contains("dt")) f.max_step = field<double>(s, "dt");
  }
  return f;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

void ArtifactSet::add(const std::string& relative_path, std::string content) {
  files_[relative_path] = std::move(content);
}

void ArtifactSet::write_all(const std::filesystem::path& dir) const {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  for (const char* stale : {"witnesses", "certificates", "plotdata"}) fs::remove_all(dir / stale);
  for (const char* stale : {"results.csv", "report.json", "config.toml"}) fs::remove(dir / stale);
  for (const auto& [rel, content] : files_) {
    const fs::path p = dir / rel;
    fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    out << content;
    if (!out) throw std::runtime_error("cannot write " + p.string());
  }
}

}  // namespace shadowlab::cli

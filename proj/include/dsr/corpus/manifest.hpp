#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dsr/corpus/types.hpp"

namespace dsr {

inline constexpr int kManifestFormatVersion = 1;

/// Loads a session manifest (JSON key/value tree). Relative paths are
/// resolved against the manifest's directory; every referenced file must
/// exist.
inline std::vector<SessionManifest> load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  if (!doc.contains("format_version"))
    throw ParseError(path + ": missing format_version");
  if (doc["format_version"].get<int>() != kManifestFormatVersion)
    throw ParseError(path + ": unsupported format_version " + doc["format_version"].dump());

  const auto base = std::filesystem::path(path).parent_path();
  auto resolve = [&](const std::string& p) {
    std::filesystem::path fp(p);
    if (fp.is_relative()) fp = base / fp;
    return fp.string();
  };
  auto require_file = [&](const std::string& p, const std::string& sid) {
    if (!std::filesystem::exists(p))
      throw ValidationError(path + ": session " + sid + " references missing file " + p);
    return p;
  };

  std::vector<SessionManifest> sessions;
  for (const auto& s : doc.at("sessions")) {
    SessionManifest m;
    m.session_id = s.at("session_id").get<std::string>();
    m.duration = s.at("duration").get<double>();
    if (m.duration <= 0.0) throw ValidationError(path + ": session " + m.session_id + " has non-positive duration");
    m.landmark_path = require_file(resolve(s.at("landmarks").get<std::string>()), m.session_id);
    m.au_gaze_pose_path = require_file(resolve(s.at("au_gaze_pose").get<std::string>()), m.session_id);
    m.lld_path = require_file(resolve(s.at("lld").get<std::string>()), m.session_id);
    m.transcript_path = require_file(resolve(s.at("transcript").get<std::string>()), m.session_id);
    if (s.contains("labels") && !s["labels"].is_null())
      m.labels_path = require_file(resolve(s["labels"].get<std::string>()), m.session_id);
    m.split = split_from_string(s.at("split").get<std::string>());
    sessions.push_back(std::move(m));
  }
  return sessions;
}

inline void save_manifest(const std::string& path, const std::vector<SessionManifest>& sessions) {
  nlohmann::json doc;
  doc["format_version"] = kManifestFormatVersion;
  doc["sessions"] = nlohmann::json::array();
  const auto base = std::filesystem::path(path).parent_path();
  auto relativize = [&](const std::string& p) {
    return std::filesystem::relative(p, base).generic_string();
  };
  for (const auto& m : sessions) {
    nlohmann::json s;
    s["session_id"] = m.session_id;
    s["duration"] = m.duration;
    s["landmarks"] = relativize(m.landmark_path);
    s["au_gaze_pose"] = relativize(m.au_gaze_pose_path);
    s["lld"] = relativize(m.lld_path);
    s["transcript"] = relativize(m.transcript_path);
    if (!m.labels_path.empty()) s["labels"] = relativize(m.labels_path);
    s["split"] = to_string(m.split);
    doc["sessions"].push_back(std::move(s));
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << doc.dump(2) << "\n";
}

}  // namespace dsr

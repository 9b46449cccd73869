#include <httplib.h>

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "dvkit/metadata.hpp"

namespace dvkit::metadata {

namespace {

const std::map<std::string, std::string, std::less<>>& synonyms() {
  static const std::map<std::string, std::string, std::less<>> table{
      {"crimson", "red"},      {"scarlet", "red"},     {"maroon", "red"},
      {"burgundy", "red"},     {"ruby", "red"},        {"cherry", "red"},
      {"vermilion", "red"},    {"reddish", "red"},     {"orangish", "orange"},
      {"tangerine", "orange"}, {"amber", "orange"},    {"coral", "orange"},
      {"lemon", "yellow"},     {"mustard", "yellow"},  {"yellowish", "yellow"},
      {"lime", "green"},       {"olive", "green"},     {"emerald", "green"},
      {"mint", "green"},       {"greenish", "green"},  {"jade", "green"},
      {"navy", "blue"},        {"azure", "blue"},      {"cyan", "blue"},
      {"turquoise", "blue"},   {"teal", "blue"},       {"cobalt", "blue"},
      {"indigo", "blue"},      {"bluish", "blue"},     {"violet", "purple"},
      {"lavender", "purple"},  {"lilac", "purple"},    {"plum", "purple"},
      {"mauve", "purple"},     {"magenta", "pink"},    {"fuchsia", "pink"},
      {"rose", "pink"},        {"salmon", "pink"},     {"pinkish", "pink"},
      {"tan", "brown"},        {"chocolate", "brown"}, {"wooden", "brown"},
      {"bronze", "brown"},     {"copper", "brown"},    {"brownish", "brown"},
      {"ebony", "black"},      {"jet", "black"},
      {"ivory", "white"},      {"cream", "white"},     {"snow", "white"},
      {"grey", "gray"},        {"charcoal", "gray"},   {"slate", "gray"},
      {"metallic", "silver"},  {"chrome", "silver"},   {"steel", "silver"},
      {"golden", "gold"},      {"khaki", "beige"},     {"sand", "beige"},
      {"taupe", "beige"},      {"tan-colored", "brown"}};
  return table;
}

std::string env_or(const char* name, const std::string& fallback) {
  const char* v = std::getenv(name);
  return v && *v ? std::string(v) : fallback;
}

}  // namespace

const std::set<std::string>& canonical_palette() {
  static const std::set<std::string> palette{"red",   "orange", "yellow", "green", "blue",
                                             "purple", "pink",  "brown",  "black", "white",
                                             "gray",  "silver", "gold",   "beige"};
  return palette;
}

std::string canonical_color(std::string_view raw) {
  // Answers are meant to be one adjective, but tolerate "It is Crimson."
  std::vector<std::string> words;
  std::string cur;
  for (char c : raw) {
    const auto u = static_cast<unsigned char>(c);
    if (std::isalpha(u) || c == '-') {
      cur.push_back(static_cast<char>(std::tolower(u)));
    } else if (!cur.empty()) {
      words.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) words.push_back(std::move(cur));
  for (const auto& w : words) {
    if (canonical_palette().count(w)) return w;
    if (auto it = synonyms().find(w); it != synonyms().end()) return it->second;
  }
  throw UnrecognizedColor(std::string(raw));
}

OfflineColorAnnotator OfflineColorAnnotator::from_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("IoError", "cannot open " + path.string());
  std::map<std::string, std::string> table;
  try {
    const auto j = nlohmann::json::parse(in);
    for (const auto& [id, color] : j.items()) table[id] = color.get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw Error("ConfigError", "color table " + path.string() + ": " + e.what());
  }
  return OfflineColorAnnotator(std::move(table));
}

std::string OfflineColorAnnotator::raw_color(const DemoRecord& record, const std::string&) const {
  auto it = table_.find(record.id);
  if (it == table_.end()) throw AnnotatorUnavailable("no offline color for id '" + record.id + "'");
  return it->second;
}

HttpColorAnnotator::HttpColorAnnotator(std::string url, int timeout_ms, int retries)
    : url_(std::move(url)), timeout_ms_(timeout_ms), retries_(retries) {
  const auto scheme_end = url_.find("://");
  const auto path_start = url_.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
  host_ = url_.substr(0, path_start);
  path_ = path_start == std::string::npos ? "/" : url_.substr(path_start);
}

std::unique_ptr<HttpColorAnnotator> HttpColorAnnotator::from_env() {
  const std::string url = env_or("DVC_ANNOTATOR_URL", "");
  if (url.empty()) return nullptr;
  const int timeout = std::stoi(env_or("DVC_ANNOTATOR_TIMEOUT_MS", "5000"));
  const int retries = std::stoi(env_or("DVC_ANNOTATOR_RETRIES", "2"));
  return std::make_unique<HttpColorAnnotator>(url, timeout, retries);
}

std::string HttpColorAnnotator::raw_color(const DemoRecord& record,
                                          const std::string& object) const {
  const nlohmann::json body{
      {"id", record.id}, {"image_ref", record.id + "#0"}, {"object", object}};
  const std::string payload = body.dump();
  std::string last_error = "no attempt made";
  for (int attempt = 0; attempt <= retries_; ++attempt) {
    httplib::Client client(host_);
    const auto timeout = std::chrono::milliseconds(timeout_ms_);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);
    auto res = client.Post(path_, payload, "application/json");
    if (!res) {
      last_error = httplib::to_string(res.error());
      continue;
    }
    if (res->status != 200) {
      last_error = "HTTP " + std::to_string(res->status);
      if (res->status >= 400 && res->status < 500) break;
      continue;
    }
    try {
      return nlohmann::json::parse(res->body).at("color").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      last_error = std::string("bad response: ") + e.what();
      break;
    }
  }
  throw AnnotatorUnavailable("color annotator at " + url_ + ": " + last_error);
}

std::string annotate_color(const DemoRecord& record, const ColorAnnotator& annotator) {
  std::string object;
  if (record.annotations && record.annotations->target_object)
    object = *record.annotations->target_object;
  return canonical_color(annotator.raw_color(record, object));
}

}  // namespace dvkit::metadata

#include "bscope/citation_provider.h"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "bscope/error.h"
#include "bscope/text.h"

namespace bscope {
namespace {

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t t = line.find('\t', pos);
    out.push_back(line.substr(pos, t == std::string_view::npos ? line.npos : t - pos));
    if (t == std::string_view::npos) break;
    pos = t + 1;
  }
  return out;
}

std::optional<std::int64_t> parse_int(std::string_view s) {
  if (s.empty()) return std::nullopt;
  std::int64_t v = 0;
  bool neg = false;
  std::size_t i = 0;
  if (s[0] == '-') {
    neg = true;
    i = 1;
    if (s.size() == 1) return std::nullopt;
  }
  for (; i < s.size(); ++i) {
    if (s[i] < '0' || s[i] > '9') return std::nullopt;
    v = v * 10 + (s[i] - '0');
  }
  return neg ? -v : v;
}

std::int64_t now_seconds() {
  return std::chrono::duration_cast<std::chrono::seconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

}  // namespace

std::string citation_cache_key(std::string_view title, std::optional<int> year) {
  std::string norm;
  bool space = false;
  for (char c : title) {
    const bool alnum = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
    if (!alnum) {
      space = !norm.empty();
      continue;
    }
    if (space) norm.push_back(' ');
    space = false;
    norm.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : c);
  }
  return norm + "|" + (year ? std::to_string(*year) : std::string());
}

std::filesystem::path default_cache_dir() {
  if (const char* env = std::getenv("BASELINE_SCOPE_CACHE"); env != nullptr && *env != '\0') {
    return env;
  }
  if (const char* home = std::getenv("HOME"); home != nullptr && *home != '\0') {
    return std::filesystem::path(home) / ".cache" / "baselinescope";
  }
  return std::filesystem::temp_directory_path() / "baselinescope-cache";
}

StubCitationProvider StubCitationProvider::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  StubCitationProvider stub;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto fields = split_tabs(line);
    const auto count = fields.size() == 3 ? parse_int(fields[2]) : std::nullopt;
    std::optional<std::int64_t> year;
    if (fields.size() == 3 && !fields[1].empty()) year = parse_int(fields[1]);
    if (!count || *count < 0 || (fields.size() == 3 && !fields[1].empty() && !year)) {
      throw ParseError(path.string() + " line " + std::to_string(line_no) +
                       ": expected title<TAB>year<TAB>count");
    }
    stub.add(fields[0], year ? std::optional<int>(static_cast<int>(*year)) : std::nullopt, *count);
  }
  return stub;
}

void StubCitationProvider::add(std::string_view title, std::optional<int> year,
                               std::int64_t count) {
  counts_[citation_cache_key(title, year)] = count;
}

CountResponse StubCitationProvider::lookup(const CountQuery& query) {
  ++calls_;
  if (offline_) return {CountResponse::Status::kUnavailable, 0, "stub offline"};
  auto it = counts_.find(citation_cache_key(query.title, query.year));
  if (it == counts_.end()) return {CountResponse::Status::kNotFound, 0, {}};
  return {CountResponse::Status::kFound, it->second, {}};
}

HttpCitationProvider::HttpCitationProvider(Options options) : options_(std::move(options)) {}

CountResponse HttpCitationProvider::parse_match_response(std::string_view body,
                                                         std::optional<int> year) {
  nlohmann::json j = nlohmann::json::parse(body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    return {CountResponse::Status::kUnavailable, 0, "malformed response body"};
  }
  if (!j.contains("data") || !j["data"].is_array() || j["data"].empty()) {
    return {CountResponse::Status::kNotFound, 0, {}};
  }
  const auto& best = j["data"][0];
  if (year && best.contains("year") && best["year"].is_number_integer() &&
      best["year"].get<int>() != *year) {
    return {CountResponse::Status::kNotFound, 0, "year mismatch"};
  }
  if (!best.contains("citationCount") || !best["citationCount"].is_number_integer()) {
    return {CountResponse::Status::kNotFound, 0, "no citationCount"};
  }
  const auto count = best["citationCount"].get<std::int64_t>();
  if (count < 0) return {CountResponse::Status::kUnavailable, 0, "negative citationCount"};
  return {CountResponse::Status::kFound, count, {}};
}

CountResponse HttpCitationProvider::lookup(const CountQuery& query) {
  try {
    httplib::Client client(options_.base_url);
    client.set_connection_timeout(options_.timeout_seconds, 0);
    client.set_read_timeout(options_.timeout_seconds, 0);
    httplib::Headers headers;
    if (!options_.api_key.empty()) headers.emplace("x-api-key", options_.api_key);
    httplib::Params params{{"query", query.title}, {"fields", "title,year,citationCount"}};
    auto res = client.Get("/graph/v1/paper/search/match", params, headers);
    if (!res) {
      return {CountResponse::Status::kUnavailable, 0,
              "transport error: " + httplib::to_string(res.error())};
    }
    if (res->status == 404) return {CountResponse::Status::kNotFound, 0, {}};
    if (res->status != 200) {
      return {CountResponse::Status::kUnavailable, 0, "HTTP " + std::to_string(res->status)};
    }
    return parse_match_response(res->body, query.year);
  } catch (const std::exception& e) {
    return {CountResponse::Status::kUnavailable, 0, e.what()};
  }
}

CitationCache::CitationCache(std::filesystem::path dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create cache directory " + dir.string());
  file_ = dir / kFileName;
  std::ifstream in(file_);
  std::string line;
  while (std::getline(in, line)) {
    const auto fields = split_tabs(line);
    if (fields.size() != 3) continue;
    Entry e;
    if (fields[1] != "-") {
      e.count = parse_int(fields[1]);
      if (!e.count) continue;
    }
    e.timestamp = parse_int(fields[2]).value_or(0);
    entries_[std::string(fields[0])] = e;
  }
}

std::optional<CitationCache::Entry> CitationCache::get(const std::string& key) const {
  std::lock_guard lock(mutex_);
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void CitationCache::put(const std::string& key, std::optional<std::int64_t> count) {
  std::lock_guard lock(mutex_);
  Entry e{count, now_seconds()};
  entries_[key] = e;
  std::ofstream out(file_, std::ios::app);
  if (!out) throw IoError("cannot append to " + file_.string());
  out << key << '\t' << (count ? std::to_string(*count) : std::string("-")) << '\t'
      << e.timestamp << '\n';
}

std::size_t CitationCache::size() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

std::string_view to_string(FetchReport::Outcome outcome) {
  switch (outcome) {
    case FetchReport::Outcome::kFetched: return "fetched";
    case FetchReport::Outcome::kCached: return "cached";
    case FetchReport::Outcome::kNotFound: return "not_found";
    case FetchReport::Outcome::kFailed: return "failed";
  }
  return "failed";
}

std::size_t FetchReport::count(Outcome outcome) const {
  std::size_t n = 0;
  for (const auto& item : items) n += item.outcome == outcome ? 1 : 0;
  return n;
}

std::string FetchReport::to_tsv() const {
  std::string out = "ref_id\tkey\toutcome\tdetail\n";
  for (const auto& item : items) {
    out += item.ref_id + '\t' + item.key + '\t' + std::string(to_string(item.outcome)) + '\t' +
           item.detail + '\n';
  }
  return out;
}

FetchReport fetch_citation_counts(std::vector<Reference>& refs, CitationCountProvider& provider,
                                  CitationCache* cache) {
  FetchReport report;
  for (auto& ref : refs) {
    FetchReport::Item item;
    item.ref_id = ref.ref_id;
    item.key = citation_cache_key(ref.cited_title, ref.cited_year);
    if (item.key.front() == '|') {
      item.outcome = FetchReport::Outcome::kNotFound;
      item.detail = "no cited title";
      report.items.push_back(std::move(item));
      continue;
    }
    if (cache != nullptr) {
      if (auto hit = cache->get(item.key)) {
        ref.citation_count = hit->count;
        item.outcome = hit->count ? FetchReport::Outcome::kCached : FetchReport::Outcome::kNotFound;
        item.detail = "cache";
        report.items.push_back(std::move(item));
        continue;
      }
    }
    ++report.provider_calls;
    const CountResponse res = provider.lookup({ref.cited_title, ref.cited_year});
    switch (res.status) {
      case CountResponse::Status::kFound:
        ref.citation_count = res.count;
        item.outcome = FetchReport::Outcome::kFetched;
        if (cache != nullptr) cache->put(item.key, res.count);
        break;
      case CountResponse::Status::kNotFound:
        ref.citation_count.reset();
        item.outcome = FetchReport::Outcome::kNotFound;
        if (cache != nullptr) cache->put(item.key, std::nullopt);
        break;
      case CountResponse::Status::kUnavailable:
        item.outcome = FetchReport::Outcome::kFailed;
        break;
    }
    item.detail = res.detail;
    report.items.push_back(std::move(item));
  }
  return report;
}

}  // namespace bscope

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bscope/types.h"

namespace bscope {

struct CountQuery {
  std::string title;
  std::optional<int> year;
};

struct CountResponse {
  enum class Status : std::uint8_t { kFound, kNotFound, kUnavailable };
  Status status = Status::kNotFound;
  std::int64_t count = 0;
  std::string detail;
};

// Source of global citation counts for cited papers.
class CitationCountProvider {
 public:
  virtual ~CitationCountProvider() = default;
  virtual CountResponse lookup(const CountQuery& query) = 0;
  virtual std::string name() const = 0;
};

// Lookup table keyed by cache_key(title, year); reads
// `title<TAB>year<TAB>count` lines (year may be empty). Counts calls.
class StubCitationProvider : public CitationCountProvider {
 public:
  StubCitationProvider() = default;
  static StubCitationProvider load(const std::filesystem::path& path);

  void add(std::string_view title, std::optional<int> year,
           std::int64_t count);
  // Every lookup reports kUnavailable while offline.
  void set_offline(bool offline) { offline_ = offline; }

  CountResponse lookup(const CountQuery& query) override;
  std::string name() const override { return "stub"; }
  std::size_t calls() const { return calls_; }

 private:
  std::map<std::string, std::int64_t> counts_;
  std::size_t calls_ = 0;
  bool offline_ = false;
};

// Client for a scholarly-graph title-match endpoint:
//   GET {base}/graph/v1/paper/search/match?query=<title>&fields=title,year,citationCount
// answering {"data": [{"citationCount": N, "year": Y, ...}]}; HTTP 404 means
// not found. Transport failures map to kUnavailable.
class HttpCitationProvider : public CitationCountProvider {
 public:
  struct Options {
    std::string base_url = "https://api.semanticscholar.org";
    std::string api_key;  // sent as x-api-key when non-empty
    int timeout_seconds = 10;
  };

  explicit HttpCitationProvider(Options options);

  CountResponse lookup(const CountQuery& query) override;
  std::string name() const override { return "http:" + options_.base_url; }

  // Response body -> count; exposed for tests.
  static CountResponse parse_match_response(std::string_view body,
                                            std::optional<int> year);

 private:
  Options options_;
};

// Normalized title (lowercase alphanumerics, single spaces) + "|" + year.
std::string citation_cache_key(std::string_view title, std::optional<int> year);

// Directory from BASELINE_SCOPE_CACHE, else $HOME/.cache/baselinescope.
std::filesystem::path default_cache_dir();

// Disk cache of provider answers, one `key<TAB>count<TAB>timestamp` line per
// record; count is "-" for a cached not-found. Later lines win on reload.
// Writes are serialized.
class CitationCache {
 public:
  static constexpr std::string_view kFileName = "citation_counts.tsv";

  explicit CitationCache(std::filesystem::path dir);

  struct Entry {
    std::optional<std::int64_t> count;
    std::int64_t timestamp = 0;
  };

  std::optional<Entry> get(const std::string& key) const;
  void put(const std::string& key, std::optional<std::int64_t> count);
  std::size_t size() const;
  const std::filesystem::path& file() const { return file_; }

 private:
  std::filesystem::path file_;
  mutable std::mutex mutex_;
  std::map<std::string, Entry> entries_;
};

struct FetchReport {
  enum class Outcome : std::uint8_t { kFetched, kCached, kNotFound, kFailed };
  struct Item {
    std::string ref_id;
    std::string key;
    Outcome outcome = Outcome::kNotFound;
    std::string detail;
  };
  std::vector<Item> items;
  std::size_t provider_calls = 0;

  std::size_t count(Outcome outcome) const;
  std::string to_tsv() const;
};

std::string_view to_string(FetchReport::Outcome outcome);

// Fills citation_count where resolvable; unresolved references keep an absent
// count. Provider failures are recorded per reference and never thrown.
// `cache` may be null.
FetchReport fetch_citation_counts(std::vector<Reference>& refs,
                                  CitationCountProvider& provider,
                                  CitationCache* cache);

}  // namespace bscope

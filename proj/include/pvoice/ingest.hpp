#pragma once

#include <chrono>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pvoice/corpus.hpp"

namespace pvoice::ingest {

// Transient acquisition failure; retried by fetch_all before surfacing.
struct TransportError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SearchConfig {
    std::vector<std::string> communities;  // e.g. subreddit names
    std::vector<std::string> terms;        // drug/therapy search terms
    corpus::Domain domain;
    corpus::Source source;
    std::size_t page_size = 100;
    std::size_t max_pages = 10;

    void validate() const;  // terms nonempty, page_size >= 1, max_pages >= 1
};

// One page of raw records. Records are JSON object strings in the record-file
// schema; an absent next_cursor terminates pagination.
struct FetchPage {
    std::vector<std::string> records;
    std::optional<std::string> next_cursor;
};

// Abstract paginated search endpoint. Implementations may throw
// TransportError for transient failures.
class PageFetcher {
  public:
    virtual ~PageFetcher() = default;
    virtual FetchPage fetch(const SearchConfig& config,
                            const std::optional<std::string>& cursor) = 0;
};

struct FetchStats {
    std::size_t pages = 0;
    std::size_t skipped_records = 0;  // malformed raw records
    std::size_t retries = 0;
    std::size_t removed_duplicates = 0;
};

struct FetchResult {
    std::vector<corpus::Post> posts;
    FetchStats stats;
};

using Sleeper = std::function<void(std::chrono::milliseconds)>;

// Follows cursors up to max_pages, stamping config.source/domain onto every
// post and deduplicating before returning. Transport errors are retried up to
// 3 times with 100ms * 2^k backoff, then surfaced with the cursor position.
// Never yields more than page_size * max_pages posts.
FetchResult fetch_all(const SearchConfig& config, PageFetcher& client, Sleeper sleeper = {});

// Filesystem-backed fetcher: the cursor is a file name inside a directory,
// each page file holding {"records": [...], "next_cursor": "..."?}. The first
// page is read from `first_page` (default "page-000.json").
class DirectoryPageClient : public PageFetcher {
  public:
    explicit DirectoryPageClient(std::filesystem::path dir,
                                 std::string first_page = "page-000.json");
    FetchPage fetch(const SearchConfig& config,
                    const std::optional<std::string>& cursor) override;

  private:
    std::filesystem::path dir_;
    std::string first_page_;
};

}  // namespace pvoice::ingest

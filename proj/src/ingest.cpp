#include "pvoice/ingest.hpp"

#include <sstream>
#include <thread>

#include <json.hpp>

#include "pvoice/util.hpp"

namespace pvoice::ingest {

using nlohmann::json;

void SearchConfig::validate() const {
    if (terms.empty()) throw DataError("search config: terms must be nonempty");
    if (page_size < 1) throw DataError("search config: page_size must be >= 1");
    if (max_pages < 1) throw DataError("search config: max_pages must be >= 1");
}

FetchResult fetch_all(const SearchConfig& config, PageFetcher& client, Sleeper sleeper) {
    config.validate();
    if (!sleeper)
        sleeper = [](std::chrono::milliseconds ms) { std::this_thread::sleep_for(ms); };

    FetchResult out;
    FetchStats& stats = out.stats;
    std::vector<corpus::Post> collected;
    std::optional<std::string> cursor;

    for (std::size_t page_no = 0; page_no < config.max_pages; ++page_no) {
        FetchPage page;
        for (int attempt = 0;; ++attempt) {
            try {
                page = client.fetch(config, cursor);
                break;
            } catch (const TransportError& e) {
                if (attempt >= 3)
                    throw TransportError("fetch failed after 3 retries at cursor=" +
                                         cursor.value_or("<start>") + ": " + e.what());
                ++stats.retries;
                sleeper(std::chrono::milliseconds(100) * (1 << attempt));
            }
        }
        ++stats.pages;

        if (page.records.size() > config.page_size) page.records.resize(config.page_size);
        std::string lines;
        for (const std::string& r : page.records) {
            lines += r;
            lines += '\n';
        }
        corpus::ParseResult parsed = corpus::parse_records(lines);
        stats.skipped_records += parsed.errors.size();
        for (corpus::Post& p : parsed.posts) {
            p.source = config.source;
            p.domain = config.domain;
            collected.push_back(std::move(p));
        }

        if (!page.next_cursor) break;
        cursor = page.next_cursor;
    }

    corpus::DedupResult deduped =
        corpus::dedup(std::move(collected), {config.source, config.domain, corpus::Split::unsplit});
    stats.removed_duplicates = deduped.removed;
    out.posts = std::move(deduped.slice.posts);
    return out;
}

DirectoryPageClient::DirectoryPageClient(std::filesystem::path dir, std::string first_page)
    : dir_(std::move(dir)), first_page_(std::move(first_page)) {}

FetchPage DirectoryPageClient::fetch(const SearchConfig& config,
                                     const std::optional<std::string>& cursor) {
    (void)config;
    const std::filesystem::path p = dir_ / cursor.value_or(first_page_);
    if (!std::filesystem::exists(p))
        throw DataError("page file not found: " + p.string());
    const json j = json::parse(util::read_file(p), nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("records") ||
        !j.at("records").is_array())
        throw DataError("malformed page file: " + p.string());

    FetchPage page;
    for (const json& rec : j.at("records")) page.records.push_back(rec.dump());
    if (j.contains("next_cursor") && j.at("next_cursor").is_string())
        page.next_cursor = j.at("next_cursor").get<std::string>();
    return page;
}

}  // namespace pvoice::ingest

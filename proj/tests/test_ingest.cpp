#include <doctest.h>

#include <filesystem>

#include <json.hpp>

#include "pvoice/ingest.hpp"
#include "pvoice/util.hpp"

using namespace pvoice;
using namespace pvoice::ingest;

namespace {

std::string record_json(const std::string& id, const std::string& text) {
    nlohmann::json j;
    j["id"] = id;
    j["source"] = "ignored";  // fetch stamps the config source
    j["domain"] = "ignored";
    j["text"] = text;
    return j.dump();
}

SearchConfig test_config(std::size_t page_size = 10, std::size_t max_pages = 5) {
    SearchConfig c;
    c.terms = {"eliquis", "warfarin"};
    c.communities = {"r/anticoagulation"};
    c.source = corpus::Source::reddit();
    c.domain = corpus::Domain::cardiovascular();
    c.page_size = page_size;
    c.max_pages = max_pages;
    return c;
}

// Scripted fetcher: pages plus an optional number of leading failures.
class StubFetcher : public PageFetcher {
  public:
    std::vector<FetchPage> pages;
    int failures_remaining = 0;
    int fetch_calls = 0;

    FetchPage fetch(const SearchConfig&, const std::optional<std::string>& cursor) override {
        ++fetch_calls;
        if (failures_remaining > 0) {
            --failures_remaining;
            throw TransportError("stub transport failure");
        }
        const std::size_t idx = cursor ? std::stoul(*cursor) : 0;
        REQUIRE(idx < pages.size());
        return pages[idx];
    }
};

Sleeper no_sleep() {
    return [](std::chrono::milliseconds) {};
}

}  // namespace

TEST_CASE("fetch_all concatenates pages across cursors") {
    StubFetcher stub;
    FetchPage p1, p2;
    for (int i = 0; i < 5; ++i) p1.records.push_back(record_json("a" + std::to_string(i), "text a" + std::to_string(i)));
    p1.next_cursor = "1";
    for (int i = 0; i < 5; ++i) p2.records.push_back(record_json("b" + std::to_string(i), "text b" + std::to_string(i)));
    stub.pages = {p1, p2};

    const auto r = fetch_all(test_config(), stub, no_sleep());
    CHECK(r.posts.size() == 10);
    CHECK(r.stats.pages == 2);
    CHECK(r.stats.retries == 0);
    // Posts are stamped with the config source and domain.
    for (const auto& p : r.posts) {
        CHECK(p.source == corpus::Source::reddit());
        CHECK(p.domain == corpus::Domain::cardiovascular());
    }
}

TEST_CASE("fetch_all deduplicates across pages") {
    StubFetcher stub;
    FetchPage p1, p2;
    p1.records = {record_json("dup", "same text"), record_json("x", "unique one")};
    p1.next_cursor = "1";
    p2.records = {record_json("dup", "different text"), record_json("y", "unique two")};
    stub.pages = {p1, p2};

    const auto r = fetch_all(test_config(), stub, no_sleep());
    CHECK(r.posts.size() == 3);
    CHECK(r.stats.removed_duplicates == 1);
}

TEST_CASE("fetch_all retries transport errors with backoff then succeeds") {
    StubFetcher stub;
    stub.failures_remaining = 2;
    FetchPage p1;
    p1.records = {record_json("a", "text")};
    stub.pages = {p1};

    std::vector<std::chrono::milliseconds> sleeps;
    const auto r = fetch_all(test_config(), stub,
                             [&](std::chrono::milliseconds ms) { sleeps.push_back(ms); });
    CHECK(r.posts.size() == 1);
    CHECK(r.stats.retries == 2);
    REQUIRE(sleeps.size() == 2);  // backoff 100ms * 2^k
    CHECK(sleeps[0].count() == 100);
    CHECK(sleeps[1].count() == 200);
}

TEST_CASE("fetch_all surfaces the error after three retries") {
    StubFetcher stub;
    stub.failures_remaining = 4;
    FetchPage p1;
    p1.records = {record_json("a", "text")};
    stub.pages = {p1};
    CHECK_THROWS_AS(fetch_all(test_config(), stub, no_sleep()), TransportError);
    CHECK(stub.fetch_calls == 4);  // initial try + 3 retries
}

TEST_CASE("fetch_all stops at max_pages and caps page size") {
    StubFetcher stub;
    for (int page = 0; page < 10; ++page) {
        FetchPage p;
        for (int i = 0; i < 7; ++i)
            p.records.push_back(
                record_json("p" + std::to_string(page) + "r" + std::to_string(i),
                            "text " + std::to_string(page) + " " + std::to_string(i)));
        p.next_cursor = std::to_string(page + 1);
        stub.pages.push_back(std::move(p));
    }
    const auto cfg = test_config(/*page_size=*/3, /*max_pages=*/4);
    const auto r = fetch_all(cfg, stub, no_sleep());
    CHECK(r.stats.pages == 4);
    CHECK(r.posts.size() <= cfg.page_size * cfg.max_pages);
    CHECK(r.posts.size() == 12);
}

TEST_CASE("fetch_all never exceeds page_size * max_pages on random stubs") {
    util::Rng rng(777);
    for (int trial = 0; trial < 20; ++trial) {
        StubFetcher stub;
        const std::size_t n_pages = 1 + rng.below(6);
        for (std::size_t page = 0; page < n_pages; ++page) {
            FetchPage p;
            const std::size_t n_records = rng.below(12);
            for (std::size_t i = 0; i < n_records; ++i)
                p.records.push_back(record_json("t" + std::to_string(trial) + "p" +
                                                    std::to_string(page) + "r" + std::to_string(i),
                                                "body " + std::to_string(rng.next_u64())));
            if (page + 1 < n_pages) p.next_cursor = std::to_string(page + 1);
            stub.pages.push_back(std::move(p));
        }
        const auto cfg = test_config(1 + rng.below(6), 1 + rng.below(5));
        const auto r = fetch_all(cfg, stub, no_sleep());
        CHECK(r.posts.size() <= cfg.page_size * cfg.max_pages);
    }
}

TEST_CASE("fetch_all skips malformed records and counts them") {
    StubFetcher stub;
    FetchPage p1;
    p1.records = {record_json("good", "fine text"), "{\"id\":\"\",\"text\":\"no id\"}",
                  "not even json"};
    stub.pages = {p1};
    const auto r = fetch_all(test_config(), stub, no_sleep());
    CHECK(r.posts.size() == 1);
    CHECK(r.stats.skipped_records == 2);
}

TEST_CASE("search config validation") {
    SearchConfig c = test_config();
    c.terms.clear();
    CHECK_THROWS_AS(c.validate(), DataError);
    c = test_config();
    c.page_size = 0;
    CHECK_THROWS_AS(c.validate(), DataError);
}

TEST_CASE("directory page client follows file cursors") {
    const auto dir = std::filesystem::temp_directory_path() / "pvoice_pages_test";
    std::filesystem::create_directories(dir);
    nlohmann::json page0;
    page0["records"] = {nlohmann::json::parse(record_json("a", "first text"))};
    page0["next_cursor"] = "page-001.json";
    nlohmann::json page1;
    page1["records"] = {nlohmann::json::parse(record_json("b", "second text"))};
    util::write_file(dir / "page-000.json", page0.dump());
    util::write_file(dir / "page-001.json", page1.dump());

    DirectoryPageClient client(dir);
    const auto r = fetch_all(test_config(), client, no_sleep());
    CHECK(r.posts.size() == 2);
    CHECK(r.stats.pages == 2);

    DirectoryPageClient missing(dir / "nope");
    CHECK_THROWS_AS(fetch_all(test_config(), missing, no_sleep()), DataError);
    std::filesystem::remove_all(dir);
}

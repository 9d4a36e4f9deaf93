#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace pvoice {

// Malformed input data (bad record file, unknown slice, contract violation
// on caller-supplied data). CLI maps this to exit code 2.
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Numerical failure (non-finite loss, invalid metric domain). Exit code 3.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace util {

// Deterministic 64-bit PRNG (splitmix64). Used everywhere a seed appears so
// that identical seeds give identical byte streams on every platform; the
// std <random> distributions are implementation-defined and unusable here.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform integer in [0, n). n must be > 0.
    std::uint64_t below(std::uint64_t n) {
        // Rejection sampling to remove modulo bias.
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t v;
        do {
            v = next_u64();
        } while (v >= limit);
        return v % n;
    }

    // Uniform double in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform double in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Standard normal via Box-Muller (deterministic, no cached spare).
    double gaussian();

    template <typename T>
    void shuffle(std::vector<T>& v) {
        if (v.size() < 2) return;
        for (std::size_t i = v.size() - 1; i > 0; --i) {
            const std::size_t j = static_cast<std::size_t>(below(i + 1));
            std::swap(v[i], v[j]);
        }
    }

  private:
    std::uint64_t state_;
};

// FNV-1a 64-bit. Fingerprints identify content; they are not cryptographic.
std::uint64_t fnv1a64(std::string_view data, std::uint64_t h = 0xcbf29ce484222325ULL);
std::string hex64(std::uint64_t v);

// Incremental fingerprint over a sequence of strings (length-prefixed so that
// ["ab","c"] and ["a","bc"] hash differently).
class Fingerprint {
  public:
    void add(std::string_view s);
    std::string str() const { return hex64(h_); }
    std::uint64_t value() const { return h_; }

  private:
    std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

// Fixed-point decimal formatting ("%.6f" style) without locale surprises.
std::string to_fixed(double v, int decimals);
// Shortest reasonable representation for reports ("%.6g").
std::string to_compact(double v);

// CSV field quoting per RFC 4180 (quotes fields containing , " or newline).
std::string csv_escape(const std::string& field);
std::string csv_row(const std::vector<std::string>& fields);
// Parses one CSV line (no embedded newlines in fields).
std::vector<std::string> csv_parse_line(std::string_view line);

std::string read_file(const std::filesystem::path& p);
void write_file(const std::filesystem::path& p, std::string_view content);

}  // namespace util
}  // namespace pvoice

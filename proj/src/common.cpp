#include "qgauss/common.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>

#include "qgauss/parallel.hpp"
#include "qgauss/rng.hpp"

#include <mutex>
#include <thread>
#include <vector>

namespace qgauss {

namespace {

constexpr std::size_t kDefaultMaxDim = std::size_t{1} << 24;

std::size_t env_max_dim() {
  const char* raw = std::getenv("QGAUSS_MAX_DIM");
  if (raw == nullptr || *raw == '\0') return kDefaultMaxDim;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(raw, &end, 10);
  if (end == raw || v == 0) return kDefaultMaxDim;
  return static_cast<std::size_t>(v);
}

unsigned g_threads = 1;

}  // namespace

std::size_t max_vector_dim() { return env_max_dim(); }

std::size_t max_verify_dim() {
  return std::min<std::size_t>(std::size_t{1} << 14, max_vector_dim());
}

std::size_t max_dense_dim() {
  return std::min<std::size_t>(std::size_t{1} << 12, max_vector_dim());
}

void set_thread_count(unsigned threads) { g_threads = std::max(1u, threads); }

unsigned thread_count() { return g_threads; }

void parallel_for(std::size_t n,
                  const std::function<void(std::size_t, std::size_t)>& body) {
  const unsigned workers = g_threads;
  // Small loops are not worth a thread launch.
  if (workers <= 1 || n < (std::size_t{1} << 14)) {
    body(0, n);
    return;
  }
  const std::size_t chunk = (n + workers - 1) / workers;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    if (begin >= n) break;
    const std::size_t end = std::min(n, begin + chunk);
    pool.emplace_back([&body, begin, end] { body(begin, end); });
  }
  for (auto& t : pool) t.join();
}

// ---------------------------------------------------------------------------
// Philox4x32-10 (Salmon et al., SC'11).

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& lo,
                    std::uint32_t& hi) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  lo = static_cast<std::uint32_t>(p);
  hi = static_cast<std::uint32_t>(p >> 32);
}

}  // namespace

Philox4x32::Counter Philox4x32::operator()(Counter ctr) const {
  Key key = key_;
  for (int round = 0; round < 10; ++round) {
    std::uint32_t lo0, hi0, lo1, hi1;
    mulhilo(kPhiloxM0, ctr[0], lo0, hi0);
    mulhilo(kPhiloxM1, ctr[2], lo1, hi1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kPhiloxW0;
    key[1] += kPhiloxW1;
  }
  return ctr;
}

std::uint64_t Philox4x32::bits(std::uint64_t a, std::uint64_t b,
                               std::uint32_t c) const {
  // The stream selector c is folded into the high word of b.
  const Counter out = (*this)({static_cast<std::uint32_t>(a),
                               static_cast<std::uint32_t>(a >> 32),
                               static_cast<std::uint32_t>(b),
                               static_cast<std::uint32_t>(b >> 32) ^ (c * kPhiloxW1)});
  return (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
}

double Philox4x32::uniform(std::uint64_t a, std::uint64_t b,
                           std::uint32_t c) const {
  return static_cast<double>(bits(a, b, c) >> 11) * 0x1.0p-53;
}

}  // namespace qgauss

#ifndef CONVSDF_METRICS_HPP
#define CONVSDF_METRICS_HPP

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "convsdf/errors.hpp"
#include "convsdf/grid.hpp"

namespace convsdf {

/// How nodes with exact distance 0 enter the average.
///  exclude:       left out of both the sum and the node count.
///  count_as_zero: kept in the node count with zero error.
enum class ZeroPolicy { exclude, count_as_zero };

inline ZeroPolicy parse_zero_policy(std::string_view s) {
  if (s == "exclude") return ZeroPolicy::exclude;
  if (s == "count_as_zero") return ZeroPolicy::count_as_zero;
  throw ValidationError("zero policy must be exclude or count_as_zero, got '" + std::string(s) + "'");
}

inline const char* to_string(ZeroPolicy p) { return p == ZeroPolicy::exclude ? "exclude" : "count_as_zero"; }

struct ErrorStats {
  double mean = 0.0;
  double max = 0.0;
  std::size_t nodes = 0;  // nodes in the denominator
  ScalarField per_node;   // 100 |computed - exact| / exact, NaN where excluded
};

/// 100/N sum |computed - exact| / exact over the counted nodes, plus the
/// largest single-node value.
inline ErrorStats percentage_error(const ScalarField& computed, const ScalarField& exact,
                                   ZeroPolicy policy = ZeroPolicy::exclude) {
  if (!(computed.grid() == exact.grid())) throw ValidationError("fields are on different grids");
  const std::size_t n = exact.size();
  std::vector<double> per(n, std::numeric_limits<double>::quiet_NaN());
  long double sum = 0;
  std::size_t count = 0;
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (exact[i] < 0.0 || !std::isfinite(exact[i])) throw ValidationError("exact distance must be finite and >= 0");
    if (exact[i] == 0.0) {
      if (policy == ZeroPolicy::count_as_zero) {
        per[i] = 0.0;
        ++count;
      }
      continue;
    }
    double e = 100.0 * std::abs(computed[i] - exact[i]) / exact[i];
    per[i] = e;
    sum += e;
    ++count;
    worst = std::max(worst, e);
  }
  if (count == 0) throw ValidationError("no nodes left to average over");
  return {static_cast<double>(sum / count), worst, count, ScalarField(exact.grid(), std::move(per))};
}

/// 64-bit Mersenne Twister with platform-independent derived draws:
/// bounded integers use Lemire's multiply-shift with rejection and reals use
/// the top 53 bits. Trial seeds come from splitmix64 of (seed, trial).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [0, n).
  std::uint64_t bounded(std::uint64_t n) {
    if (n == 0) throw ValidationError("bounded draw needs n > 0");
    unsigned __int128 m = static_cast<unsigned __int128>(next()) * n;
    auto low = static_cast<std::uint64_t>(m);
    if (low < n) {
      std::uint64_t threshold = (0 - n) % n;
      while (low < threshold) {
        m = static_cast<unsigned __int128>(next()) * n;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  /// Uniform real in [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  static std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

  static std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial) {
    return splitmix64(splitmix64(seed) ^ (trial + 1) * 0xd1b54a32d192ed03ULL);
  }

 private:
  std::mt19937_64 engine_;
};

/// k node indices in [0, n); with replacement repeats are allowed, without
/// it a partial Fisher-Yates shuffle is used (k <= n).
inline std::vector<std::size_t> sample_nodes(Rng& rng, std::size_t n, std::size_t k, bool with_replacement) {
  std::vector<std::size_t> out;
  out.reserve(k);
  if (with_replacement) {
    for (std::size_t i = 0; i < k; ++i) out.push_back(static_cast<std::size_t>(rng.bounded(n)));
    return out;
  }
  if (k > n) throw ValidationError("cannot draw more distinct nodes than the grid has");
  std::vector<std::size_t> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = i;
  for (std::size_t i = 0; i < k; ++i) {
    std::size_t j = i + static_cast<std::size_t>(rng.bounded(n - i));
    std::swap(all[i], all[j]);
    out.push_back(all[i]);
  }
  return out;
}

}  // namespace convsdf

#endif  // CONVSDF_METRICS_HPP

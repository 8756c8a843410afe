#include "spdc/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fmt/format.h>
#include <limits>
#include <mutex>
#include <thread>
#include <vector>

#include "spdc/errors.hpp"

namespace spdc {

namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Largest coherent mean the sequential Poisson sampler accepts (exp(-mean)
// must stay a normal double).
constexpr double kMaxPoissonMean = 500.0;

constexpr std::uint64_t kMaxPulses = std::uint64_t{1} << 62;

void checked_add(std::uint64_t& total, std::uint64_t value) {
  if (__builtin_add_overflow(total, value, &total)) {
    throw ResourceError("Monte Carlo tally overflowed 64 bits");
  }
}

bool any_detected(std::uint64_t photons, double eta, PulseStream& rng) {
  for (std::uint64_t i = 0; i < photons; ++i) {
    if (rng.next_uniform() < eta) return true;
  }
  return false;
}

void run_pulse(const SimConfig& config, std::uint64_t index, SimCounts& tally) {
  PulseStream rng(config.seed, index);
  const double eta1 = config.chain.eta1.value();
  const double eta2 = config.chain.eta2.value();
  const double eta3 = config.chain.eta3.value();

  switch (config.mode) {
    case SimMode::two_arm: {
      const std::uint64_t n = geometric_sampler(config.x.value(), rng);
      if (n == 0) return;
      const bool d1 = any_detected(n, eta1, rng);
      const bool d2 = any_detected(n, eta2, rng);
      tally.clicks1 += d1;
      tally.clicks2 += d2;
      tally.pair12 += d1 && d2;
      return;
    }
    case SimMode::heralded_split: {
      const std::uint64_t n = geometric_sampler(config.x.value(), rng);
      if (n == 0) return;
      const bool d1 = any_detected(n, eta1, rng);
      bool d2 = false;
      bool d3 = false;
      for (std::uint64_t i = 0; i < n; ++i) {
        const bool to_third = (rng.next_u64() >> 63) != 0;
        const double u = rng.next_uniform();
        if (to_third) {
          d3 = d3 || u < eta3;
        } else {
          d2 = d2 || u < eta2;
        }
      }
      tally.clicks1 += d1;
      tally.clicks2 += d2;
      tally.clicks3 += d3;
      tally.pair12 += d1 && d2;
      tally.pair13 += d1 && d3;
      tally.triple123 += d1 && d2 && d3;
      return;
    }
    case SimMode::saturation: {
      const double mean = config.saturation.mean;
      const std::uint64_t n =
          config.saturation.kind == SourceKind::coherent
              ? poisson_sampler(mean, rng)
              : geometric_sampler(mean / (1.0 + mean), rng);
      if (n == 0 || !any_detected(n, eta1, rng)) return;
      tally.clicks1 += 1;
      checked_add(tally.photons_on_click1, n);
      std::uint64_t square = 0;
      if (__builtin_mul_overflow(n, n, &square)) {
        throw ResourceError("Monte Carlo photon tally overflowed 64 bits");
      }
      checked_add(tally.photons_on_click1_sq, square);
      return;
    }
  }
}

SimCounts run_chunk(const SimConfig& config, std::uint64_t begin, std::uint64_t end) {
  SimCounts tally;
  tally.pulses = end - begin;
  for (std::uint64_t i = begin; i < end; ++i) run_pulse(config, i, tally);
  return tally;
}

}  // namespace

PulseStream::PulseStream(std::uint64_t seed, std::uint64_t pulse_index) noexcept
    : state_(mix64(seed + mix64(pulse_index ^ 0x243f6a8885a308d3ULL))) {}

std::uint64_t PulseStream::next_u64() noexcept {
  state_ += kGolden;
  return mix64(state_);
}

double PulseStream::next_uniform() noexcept {
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

std::uint64_t geometric_sampler(double x, PulseStream& rng) {
  const double u = rng.next_uniform();
  // u > x is exactly the n = 0 branch of floor(ln u / ln x)
  if (x <= 0.0 || u > x) return 0;
  return static_cast<std::uint64_t>(std::floor(std::log(u) / std::log(x)));
}

std::uint64_t poisson_sampler(double mean, PulseStream& rng) {
  if (mean <= 0.0) return 0;
  const double u = rng.next_uniform();
  double p = std::exp(-mean);
  double cdf = p;
  std::uint64_t k = 0;
  while (u > cdf && p > 0.0) {
    ++k;
    p *= mean / static_cast<double>(k);
    cdf += p;
  }
  return k;
}

SimCounts& SimCounts::operator+=(const SimCounts& other) {
  checked_add(pulses, other.pulses);
  checked_add(clicks1, other.clicks1);
  checked_add(clicks2, other.clicks2);
  checked_add(clicks3, other.clicks3);
  checked_add(pair12, other.pair12);
  checked_add(pair13, other.pair13);
  checked_add(triple123, other.triple123);
  checked_add(photons_on_click1, other.photons_on_click1);
  checked_add(photons_on_click1_sq, other.photons_on_click1_sq);
  return *this;
}

unsigned default_workers() {
  if (const char* env = std::getenv("SPDC_STATS_THREADS")) {
    char* end = nullptr;
    const unsigned long value = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && value > 0) return static_cast<unsigned>(value);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

SimCounts simulate(const SimConfig& config) {
  if (config.pulses == 0) throw DomainError("simulation needs at least one pulse");
  if (config.pulses > kMaxPulses) {
    throw ResourceError(fmt::format("{} pulses would overflow the 64-bit tallies",
                                    config.pulses));
  }
  if (config.chunk_pulses == 0) throw DomainError("chunk size must be positive");
  if (config.mode == SimMode::saturation) {
    const double mean = config.saturation.mean;
    if (!(mean >= 0.0) || !std::isfinite(mean)) {
      throw DomainError(fmt::format("saturation mean {} must be finite and >= 0", mean));
    }
    if (config.saturation.kind == SourceKind::coherent && mean > kMaxPoissonMean) {
      throw DomainError(fmt::format("coherent mean {} above the sampler limit {}", mean,
                                    kMaxPoissonMean));
    }
  }

  const std::uint64_t chunks = (config.pulses + config.chunk_pulses - 1) / config.chunk_pulses;
  const unsigned workers = static_cast<unsigned>(
      std::min<std::uint64_t>(chunks, config.workers ? config.workers : default_workers()));

  std::vector<SimCounts> partial(chunks);
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto worker = [&] {
    try {
      for (std::uint64_t c = next++; c < chunks; c = next++) {
        const std::uint64_t begin = c * config.chunk_pulses;
        const std::uint64_t end = std::min(config.pulses, begin + config.chunk_pulses);
        partial[c] = run_chunk(config, begin, end);
      }
    } catch (...) {
      const std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next = chunks;
    }
  };

  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  SimCounts total;
  for (const SimCounts& p : partial) total += p;
  return total;
}

Estimate frequency(std::uint64_t count, std::uint64_t pulses) {
  if (pulses == 0) throw DomainError("frequency of zero pulses");
  const double p = static_cast<double>(count) / static_cast<double>(pulses);
  return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(pulses))};
}

Estimate rate(std::uint64_t count, std::uint64_t pulses, double rep_rate_hz) {
  const Estimate f = frequency(count, pulses);
  return {f.value * rep_rate_hz, f.std_error * rep_rate_hz};
}

std::optional<Estimate> g2_estimate(const SimCounts& counts) {
  const std::uint64_t twofold = counts.pair12 + counts.pair13;
  if (counts.pulses == 0 || twofold == 0) return std::nullopt;
  const double n = static_cast<double>(counts.pulses);
  const double ms = counts.clicks1 / n;
  const double mt = counts.triple123 / n;
  const double mp = twofold / n;

  // Per-pulse indicators: s = click on 1, t = triple, p = (1,2) + (1,3) pair
  // indicators. t implies s, p > 0 implies s, and p^2 = p + 2t.
  const double var_s = ms * (1.0 - ms);
  const double var_t = mt * (1.0 - mt);
  const double var_p = mp + 2.0 * mt - mp * mp;
  const double cov_st = mt - ms * mt;
  const double cov_sp = mp - ms * mp;
  const double cov_tp = 2.0 * mt - mt * mp;

  const double g = 2.0 * ms * mt / (mp * mp);
  const double ds = 2.0 * mt / (mp * mp);
  const double dt = 2.0 * ms / (mp * mp);
  const double dp = -4.0 * ms * mt / (mp * mp * mp);
  const double variance = ds * ds * var_s + dt * dt * var_t + dp * dp * var_p +
                          2.0 * (ds * dt * cov_st + ds * dp * cov_sp + dt * dp * cov_tp);
  return Estimate{g, std::sqrt(std::max(0.0, variance) / n)};
}

Estimate photon_weighted_detection(const SimCounts& counts) {
  if (counts.pulses == 0) throw DomainError("photon-weighted detection of zero pulses");
  const double n = static_cast<double>(counts.pulses);
  const double mean = static_cast<double>(counts.photons_on_click1) / n;
  const double second = static_cast<double>(counts.photons_on_click1_sq) / n;
  return {mean, std::sqrt(std::max(0.0, second - mean * mean) / n)};
}

double sigma_distance(std::uint64_t count, std::uint64_t pulses, double expected_probability) {
  if (pulses == 0) throw DomainError("sigma distance of zero pulses");
  const double n = static_cast<double>(pulses);
  const double observed = static_cast<double>(count) / n;
  const double sigma = std::sqrt(expected_probability * (1.0 - expected_probability) / n);
  if (sigma == 0.0) {
    return observed == expected_probability ? 0.0 : std::numeric_limits<double>::infinity();
  }
  return (observed - expected_probability) / sigma;
}

}  // namespace spdc

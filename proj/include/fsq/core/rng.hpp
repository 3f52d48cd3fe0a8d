#pragma once

#include <cstdint>
#include <random>

namespace fsq {

/// SplitMix64 finalizer; used to derive independent stream seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Named purposes for derived streams so that, e.g., the motional draw of a
/// trial never shares bits with its Rabi-frequency draw.
enum class StreamTag : std::uint64_t {
  motion = 1,
  rabi = 2,
  detuning = 3,
  angle = 4,
  resample = 5,
  generic = 99,
};

/// Random stream for one (master seed, index, tag) triple. Streams are fully
/// determined by their triple, so trials can be evaluated in any order.
class RandomStream {
 public:
  using engine_type = std::mt19937_64;

  RandomStream(std::uint64_t master_seed, std::uint64_t index,
               StreamTag tag = StreamTag::generic)
      : engine_(derive(master_seed, index, tag)) {}

  static std::uint64_t derive(std::uint64_t master_seed, std::uint64_t index,
                              StreamTag tag) {
    std::uint64_t s = splitmix64(master_seed);
    s = splitmix64(s ^ splitmix64(index + 0x632be59bd9b4e019ULL));
    return splitmix64(s ^ static_cast<std::uint64_t>(tag));
  }

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }
  engine_type& engine() { return engine_; }

 private:
  engine_type engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace fsq

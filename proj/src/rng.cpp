#include "rfmatch/rng.hpp"

#include "rfmatch/stats.hpp"

namespace rfmatch {

namespace {

constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;

// splitmix64 finalizer
std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::uint64_t fold_in(std::uint64_t key, std::uint64_t data) {
  return mix64(key ^ mix64(data + kGamma));
}

}  // namespace

std::uint64_t Stream::next_u64() {
  ++counter_;
  return mix64(key_ + counter_ * kGamma);
}

double Stream::next_double() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Stream::next_normal() { return normal_quantile(next_double()); }

Eigen::MatrixXd Stream::uniform_block(int s, int m) {
  if (s < 1 || m < 1) throw InputError("uniform block needs s >= 1 and m >= 1");
  Eigen::MatrixXd block(s, m);
  for (int r = 0; r < s; ++r)
    for (int j = 0; j < m; ++j) block(r, j) = next_double();
  return block;
}

Stream Stream::child(std::uint32_t label) const {
  return Stream(fold_in(key_, label));
}

Stream derive_stream(const SeedSpec& spec) {
  if (spec.path.empty()) throw ConfigError("SeedSpec path must be non-empty");
  std::uint64_t key = mix64(spec.master_seed + kGamma);
  for (std::uint32_t label : spec.path) key = fold_in(key, label);
  return Stream(key);
}

Eigen::MatrixXd draw_uniform_block(Stream& stream, int s, int m) {
  return stream.uniform_block(s, m);
}

}  // namespace rfmatch

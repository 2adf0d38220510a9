#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "rfmatch/errors.hpp"

namespace rfmatch {

/// Root of all randomness in a run: one master seed plus an ordered list of
/// 32-bit labels. Distinct (seed, path) pairs give statistically unrelated
/// streams, and any stream can be derived directly without generating its
/// siblings first.
struct SeedSpec {
  std::uint64_t master_seed = 0;
  std::vector<std::uint32_t> path;
};

/// Counter-based uniform generator (splitmix64 finalizer over key + counter).
/// Copyable value type; copies continue independently from the same state.
class Stream {
 public:
  explicit Stream(std::uint64_t key) : key_(key) {}

  std::uint64_t next_u64();
  /// Uniform in [0,1), 53 random bits.
  double next_double();
  /// Standard normal via inverse CDF of next_double().
  double next_normal();

  /// s x m matrix of uniforms, filled row by row; consumes exactly s*m values.
  Eigen::MatrixXd uniform_block(int s, int m);

  /// Child stream keyed off (key, label). Pure: the same label always gives
  /// the same child regardless of how much the parent has been consumed.
  Stream child(std::uint32_t label) const;

  std::uint64_t key() const { return key_; }
  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Stream for a (master_seed, path); throws ConfigError on an empty path.
Stream derive_stream(const SeedSpec& spec);

/// Free-function form used throughout the estimator: block of s replicates,
/// m base draws each.
Eigen::MatrixXd draw_uniform_block(Stream& stream, int s, int m);

// Fixed labels for the first path element so independent concerns never
// share a stream.
namespace purpose {
inline constexpr std::uint32_t bank = 1;
inline constexpr std::uint32_t data = 2;
inline constexpr std::uint32_t estimate = 3;
inline constexpr std::uint32_t holdout_bank = 4;
inline constexpr std::uint32_t sandwich = 5;
inline constexpr std::uint32_t bootstrap = 6;
inline constexpr std::uint32_t null_sim = 7;
inline constexpr std::uint32_t diagnostic = 8;
}  // namespace purpose

}  // namespace rfmatch

#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "lar/core.hpp"
#include "lar/learners.hpp"
#include "lar/rng.hpp"

namespace lar {

// A source of per-round cost vectors in [0,1]^d. Adaptive streams may read
// the learner's current distribution; oblivious ones ignore it.
class CostStream {
 public:
  virtual ~CostStream() = default;
  virtual int actions() const = 0;
  virtual std::vector<double> next(const ActionDistribution& w) = 0;
};

enum class StreamKind {
  IidUniform,       // every coordinate fresh U[0,1]
  BernoulliArms,    // fixed random per-arm means, 0/1 draws
  GapDrift,         // deterministic slow rotation of the cheap action
  GreedyAdversary,  // cost 1 on the learner's heaviest action
};

inline constexpr int kStreamKindCount = 4;

std::unique_ptr<CostStream> make_stream(StreamKind kind, int d, std::uint64_t seed);

// Bernoulli arms with explicit means (used where the best arm must be known
// a priori, e.g. oblivious bandit comparators).
std::unique_ptr<CostStream> make_bernoulli_stream(std::vector<double> means,
                                                  std::uint64_t seed);

// Piecewise regime stream: `shifts`+1 segments of near-equal length over
// `horizon_t` rounds; each segment plants one cheap action, everything else
// is expensive, so the best shifting comparator uses about `shifts` changes.
std::unique_ptr<CostStream> make_shifted_stream(int shifts, int d, int horizon_t,
                                                std::uint64_t seed);

struct StreamRun {
  double learner_total = 0.0;            // sum_t <w^t, c^t>
  double played_total = 0.0;             // sum_t c^t[a^t] (bandit runs only)
  std::vector<double> action_totals;     // per-action cumulative cost
  std::vector<CostVector> history;       // populated when keep_history is set
};

// Drives one learner against one stream for horizon_t rounds. Bandit
// learners sample their action from w via `rng` and see only that scalar;
// full-information learners see the whole vector.
StreamRun run_stream(Learner& learner, CostStream& stream, int horizon_t, Rng& rng,
                     bool keep_history);

}  // namespace lar

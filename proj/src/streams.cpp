#include "lar/streams.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "lar/errors.hpp"

namespace lar {
namespace {

constexpr double kPi = 3.14159265358979323846;

void check_actions(int d) {
  if (d < 1) throw DomainError("stream needs at least one action");
}

// ---------------------------------------------------------------- streams --

class IidUniformStream final : public CostStream {
 public:
  IidUniformStream(int d, std::uint64_t seed) : d_(d), rng_(seed) { check_actions(d); }

  int actions() const override { return d_; }

  std::vector<double> next(const ActionDistribution&) override {
    std::vector<double> c(d_);
    for (double& x : c) x = rng_.uniform01();
    return c;
  }

 private:
  int d_;
  Rng rng_;
};

class BernoulliArmsStream final : public CostStream {
 public:
  BernoulliArmsStream(std::vector<double> means, std::uint64_t seed)
      : means_(std::move(means)), rng_(seed) {
    check_actions(static_cast<int>(means_.size()));
    for (double m : means_) {
      if (!(m >= 0.0 && m <= 1.0)) throw DomainError("bernoulli arm mean outside [0, 1]");
    }
  }

  int actions() const override { return static_cast<int>(means_.size()); }

  std::vector<double> next(const ActionDistribution&) override {
    std::vector<double> c(means_.size());
    for (std::size_t j = 0; j < means_.size(); ++j) {
      c[j] = rng_.bernoulli(means_[j]) ? 1.0 : 0.0;
    }
    return c;
  }

 private:
  std::vector<double> means_;
  Rng rng_;
};

// Cheap action rotates once every `kPeriod` rounds; fully deterministic.
class GapDriftStream final : public CostStream {
 public:
  explicit GapDriftStream(int d) : d_(d) { check_actions(d); }

  int actions() const override { return d_; }

  std::vector<double> next(const ActionDistribution&) override {
    std::vector<double> c(d_);
    const double phase = static_cast<double>(t_) / kPeriod;
    for (int j = 0; j < d_; ++j) {
      const double v = 0.5 + 0.45 * std::sin(2.0 * kPi * (phase + static_cast<double>(j) / d_));
      c[j] = std::clamp(v, 0.0, 1.0);
    }
    ++t_;
    return c;
  }

 private:
  static constexpr double kPeriod = 500.0;
  int d_;
  long long t_ = 0;
};

// Charges full cost on the learner's current favorite, nothing elsewhere.
class GreedyAdversaryStream final : public CostStream {
 public:
  explicit GreedyAdversaryStream(int d) : d_(d) { check_actions(d); }

  int actions() const override { return d_; }

  std::vector<double> next(const ActionDistribution& w) override {
    if (w.size() != d_) throw DomainError("adversary stream saw mismatched distribution");
    int heaviest = 0;
    for (int j = 1; j < d_; ++j) {
      if (w[j] > w[heaviest]) heaviest = j;
    }
    std::vector<double> c(d_, 0.0);
    c[heaviest] = 1.0;
    return c;
  }

 private:
  int d_;
};

class PiecewiseShiftStream final : public CostStream {
 public:
  PiecewiseShiftStream(int shifts, int d, int horizon_t, std::uint64_t seed)
      : d_(d), horizon_t_(horizon_t), rng_(seed) {
    check_actions(d);
    if (shifts < 0) throw DomainError("planted shift count must be nonnegative");
    if (horizon_t < 1) throw DomainError("shifted stream needs a positive horizon");
    const int segments = shifts + 1;
    if (segments > horizon_t) throw DomainError("more planted shifts than rounds");
    cheap_.resize(segments);
    cheap_[0] = rng_.below(d);
    for (int k = 1; k < segments; ++k) {
      // Force a genuine regime change when there is more than one action.
      cheap_[k] = d == 1 ? 0 : rng_.below(d - 1);
      if (d > 1 && cheap_[k] >= cheap_[k - 1]) ++cheap_[k];
    }
  }

  int actions() const override { return d_; }

  std::vector<double> next(const ActionDistribution&) override {
    const int segments = static_cast<int>(cheap_.size());
    int seg = static_cast<int>((static_cast<long long>(t_) * segments) / horizon_t_);
    seg = std::min(seg, segments - 1);
    std::vector<double> c(d_);
    for (int j = 0; j < d_; ++j) {
      c[j] = j == cheap_[seg] ? 0.25 * rng_.uniform01() : 0.5 + 0.5 * rng_.uniform01();
    }
    ++t_;
    return c;
  }

 private:
  int d_;
  int horizon_t_;
  Rng rng_;
  std::vector<int> cheap_;
  long long t_ = 0;
};

}  // namespace

// -------------------------------------------------------------- factories --

std::unique_ptr<CostStream> make_stream(StreamKind kind, int d, std::uint64_t seed) {
  switch (kind) {
    case StreamKind::IidUniform:
      return std::make_unique<IidUniformStream>(d, seed);
    case StreamKind::BernoulliArms: {
      Rng rng(derive_seed({seed, 0x6d65616e}));
      std::vector<double> means(static_cast<std::size_t>(d));
      for (double& m : means) m = 0.2 + 0.6 * rng.uniform01();
      return std::make_unique<BernoulliArmsStream>(std::move(means), seed);
    }
    case StreamKind::GapDrift:
      return std::make_unique<GapDriftStream>(d);
    case StreamKind::GreedyAdversary:
      return std::make_unique<GreedyAdversaryStream>(d);
  }
  throw DomainError("unknown stream kind");
}

std::unique_ptr<CostStream> make_bernoulli_stream(std::vector<double> means,
                                                  std::uint64_t seed) {
  return std::make_unique<BernoulliArmsStream>(std::move(means), seed);
}

std::unique_ptr<CostStream> make_shifted_stream(int shifts, int d, int horizon_t,
                                                std::uint64_t seed) {
  return std::make_unique<PiecewiseShiftStream>(shifts, d, horizon_t, seed);
}

// ----------------------------------------------------------------- runner --

StreamRun run_stream(Learner& learner, CostStream& stream, int horizon_t, Rng& rng,
                     bool keep_history) {
  if (horizon_t < 1) throw DomainError("stream run needs a positive horizon");
  if (learner.config().d != stream.actions()) {
    throw DomainError("learner and stream disagree on the action count");
  }
  const bool bandit = learner.config().kind == LearnerKind::LogBarrierBandit;
  const int d = stream.actions();

  StreamRun out;
  out.action_totals.assign(static_cast<std::size_t>(d), 0.0);
  if (keep_history) out.history.reserve(static_cast<std::size_t>(horizon_t));

  for (int t = 0; t < horizon_t; ++t) {
    const ActionDistribution& w = learner.distribution();
    std::vector<double> c = stream.next(w);
    for (int j = 0; j < d; ++j) {
      out.learner_total += w[j] * c[j];
      out.action_totals[static_cast<std::size_t>(j)] += c[j];
    }
    if (keep_history) out.history.emplace_back(c);
    if (bandit) {
      const int played = rng.sample(w.span());
      out.played_total += c[static_cast<std::size_t>(played)];
      learner.observe(BanditFeedback{played, c[static_cast<std::size_t>(played)]});
    } else {
      learner.observe(FullFeedback{CostVector(std::move(c))});
    }
  }
  return out;
}

}  // namespace lar

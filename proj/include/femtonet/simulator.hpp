#pragma once
// Monte Carlo engine: per-trial link pipeline (quantize at the feedback
// instant, age the channel, sample the interferer field, compare transmitted
// vs supported rate), empirical outage and goodput estimators, and a
// deterministic block-parallel trial runner.

#include <cstdint>
#include <functional>
#include <vector>

#include "femtonet/analytics.hpp"
#include "femtonet/backoff.hpp"
#include "femtonet/codebook.hpp"
#include "femtonet/params.hpp"
#include "femtonet/rng.hpp"

namespace femtonet {
namespace simulator {

struct TrialResult {
  double sir_tx = 0.0;          // transmitter estimate (after backoff)
  double sir_rx = 0.0;          // realized at the receiver
  double rate_tx = 0.0;         // bits/s/Hz
  double rate_supported = 0.0;  // bits/s/Hz
  double goodput = 0.0;         // rate_tx when decodable, else 0
  bool outage = false;
};

// Immutable per-sweep-point context: derived constants and the frozen
// long-term SIR statistic.
struct TrialContext {
  SystemParams p;
  analytics::DerivedConstants k;
  double rho_bar = 0.0;
  double eta = 1.0;
  double field_radius = 0.0;  // interferer sampling radius (0 when no field)
};

// rho_bar from the closed-form long-term mean.
TrialContext make_context(const SystemParams& p);
// rho_bar frozen externally (e.g. from a large Monte Carlo estimate).
TrialContext make_context(const SystemParams& p, double rho_bar);

struct TrialState {
  double z_tx = 0.0;          // effective power at the feedback instant
  double z_rx = 0.0;          // effective power after aging
  double interference = 0.0;  // aggregate field power (0 when no field)
};

// Channel + quantizer + aging + field sampling. With random_beam the
// beamformer is an isotropic draw independent of the channel.
TrialState draw_trial_state(const TrialContext& ctx, const Codebook& cb,
                            RandomStream& rng, bool random_beam = false);

// Rates and the goodput indicator for one drawn state and backoff factor.
TrialResult resolve_trial(const TrialContext& ctx, const TrialState& s,
                          double beta);

// Single-call convenience composing the two steps.
TrialResult run_trial(const SystemParams& p, const Codebook& cb, double beta,
                      RandomStream& rng);

struct OutageEstimate {
  double outage = 0.0;      // fraction of trials below the threshold
  double half_width = 0.0;  // 95% binomial confidence half-width
};

// Empirical P[sir_rx < upsilon] with a fresh quantization codebook per trial
// (ensemble-averaged model validation).
OutageEstimate estimate_outage(const SystemParams& p, double upsilon,
                               int trials, RandomStream& rng);
OutageEstimate estimate_outage(const TrialContext& ctx, double upsilon,
                               int trials, RandomStream& rng);

enum class GoodputMode {
  kNoBackoff,
  kBackoffExact,
  kBackoffPoly,
  kRandomBeamforming,
  kThroughput,
};

// Mean per-trial rate for the mode, with a fixed seeded codebook shared by
// all trials.
double estimate_goodput(const SystemParams& p, int trials, GoodputMode mode,
                        RandomStream& rng);
double estimate_goodput(const TrialContext& ctx, int trials, GoodputMode mode,
                        RandomStream& rng);

// Worker cap: FEMTONET_THREADS when set, else hardware concurrency.
int worker_count();

namespace detail {

// Runs fn(trial) for trial in [0, total) and returns the sum, accumulated
// per fixed-size block and reduced in block order so the result is
// bit-identical for any worker count.
double ordered_trial_sum(int total, const std::function<double(int)>& fn);

// Same scheduling, but keeps every per-trial value (index-addressed, so the
// output is worker-count independent too).
std::vector<double> ordered_trial_values(int total,
                                         const std::function<double(int)>& fn);

}  // namespace detail

}  // namespace simulator
}  // namespace femtonet

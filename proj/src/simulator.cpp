#include "femtonet/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <thread>
#include <vector>

#include "femtonet/channel.hpp"
#include "femtonet/geometry.hpp"

namespace femtonet {
namespace simulator {

namespace {

// Distinct trial key for the shared codebook draw so it never collides with
// a trial stream.
constexpr std::uint64_t kCodebookTrialKey = ~0ULL;

ChannelVector random_unit_vector(int n, RandomStream& rng) {
  ChannelVector f = channel::sample_channel(n, rng);
  double norm2 = 0.0;
  for (const auto& c : f) norm2 += std::norm(c);
  const double inv = 1.0 / std::sqrt(norm2);
  for (auto& c : f) c *= inv;
  return f;
}

}  // namespace

TrialContext make_context(const SystemParams& p, double rho_bar) {
  p.validate();
  TrialContext ctx;
  ctx.p = p;
  ctx.k = analytics::derive_constants(p);
  ctx.rho_bar = rho_bar;
  ctx.eta = channel::correlation_coefficient(p.mobility);
  ctx.field_radius =
      p.density > 0.0 ? geometry::kFieldRadiusFactor * p.cell_radius : 0.0;
  return ctx;
}

TrialContext make_context(const SystemParams& p) {
  return make_context(p, geometry::rho_bar_analytic(p));
}

TrialState draw_trial_state(const TrialContext& ctx, const Codebook& cb,
                            RandomStream& rng, bool random_beam) {
  TrialState s;
  const ChannelVector h_old =
      channel::sample_channel(ctx.p.n_b, rng);
  ChannelVector f;
  if (random_beam) {
    f = random_unit_vector(ctx.p.n_b, rng);
  } else {
    f = cb.vectors[codebook::quantize(h_old, cb)];
  }
  s.z_tx = channel::effective_power(h_old, f);
  const ChannelVector h_new =
      channel::evolve_gauss_markov(h_old, ctx.eta, rng);
  s.z_rx = channel::effective_power(h_new, f);
  if (ctx.p.density > 0.0) {
    const InterfererField field = geometry::sample_ppp_disc(
        ctx.p.density, ctx.field_radius, ctx.p.pathloss.d_min, rng);
    s.interference =
        geometry::interference_power(field, ctx.p.pathloss.alpha_f);
  }
  return s;
}

TrialResult resolve_trial(const TrialContext& ctx, const TrialState& s,
                          double beta) {
  if (beta < 0.0 || beta > 1.0)
    throw std::domain_error("resolve_trial: beta must be in [0, 1]");
  TrialResult r;
  r.sir_tx = beta * ctx.rho_bar * s.z_tx;
  if (ctx.p.density > 0.0) {
    r.sir_rx = s.interference > 0.0
                   ? s.z_rx / (ctx.k.q_d * s.interference)
                   : std::numeric_limits<double>::infinity();
  } else {
    r.sir_rx = ctx.rho_bar * s.z_rx;
  }
  r.rate_tx = std::log2(1.0 + r.sir_tx);
  r.rate_supported = std::log2(1.0 + r.sir_rx);
  r.goodput = (r.rate_tx <= r.rate_supported) ? r.rate_tx : 0.0;
  r.outage = (r.goodput == 0.0) && (r.rate_tx > 0.0);
  return r;
}

TrialResult run_trial(const SystemParams& p, const Codebook& cb, double beta,
                      RandomStream& rng) {
  const TrialContext ctx = make_context(p);
  return resolve_trial(ctx, draw_trial_state(ctx, cb, rng), beta);
}

int worker_count() {
  if (const char* env = std::getenv("FEMTONET_THREADS")) {
    const long n = std::strtol(env, nullptr, 10);
    if (n >= 1) return static_cast<int>(n);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

namespace detail {

double ordered_trial_sum(int total, const std::function<double(int)>& fn) {
  if (total <= 0) throw std::domain_error("ordered_trial_sum: total <= 0");
  constexpr int kBlock = 1024;
  const int blocks = (total + kBlock - 1) / kBlock;
  std::vector<double> block_sums(blocks, 0.0);

  const int workers = std::min(worker_count(), blocks);
  std::atomic<int> next{0};
  auto work = [&]() {
    for (;;) {
      const int b = next.fetch_add(1);
      if (b >= blocks) return;
      const int lo = b * kBlock;
      const int hi = std::min(total, lo + kBlock);
      double sum = 0.0;
      for (int t = lo; t < hi; ++t) sum += fn(t);
      block_sums[b] = sum;
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  double total_sum = 0.0;
  for (int b = 0; b < blocks; ++b) total_sum += block_sums[b];
  return total_sum;
}

std::vector<double> ordered_trial_values(int total,
                                         const std::function<double(int)>& fn) {
  if (total <= 0) throw std::domain_error("ordered_trial_values: total <= 0");
  constexpr int kBlock = 1024;
  const int blocks = (total + kBlock - 1) / kBlock;
  std::vector<double> values(total, 0.0);

  const int workers = std::min(worker_count(), blocks);
  std::atomic<int> next{0};
  auto work = [&]() {
    for (;;) {
      const int b = next.fetch_add(1);
      if (b >= blocks) return;
      const int lo = b * kBlock;
      const int hi = std::min(total, lo + kBlock);
      for (int t = lo; t < hi; ++t) values[t] = fn(t);
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  return values;
}

}  // namespace detail

OutageEstimate estimate_outage(const TrialContext& ctx, double upsilon,
                               int trials, RandomStream& rng) {
  if (trials < 1) throw std::domain_error("estimate_outage: trials < 1");
  if (!(upsilon >= 0.0))
    throw std::domain_error("estimate_outage: upsilon must be >= 0");
  const double fails = detail::ordered_trial_sum(trials, [&](int t) {
    RandomStream trial_rng = rng.substream(0, static_cast<std::uint64_t>(t));
    // Fresh quantization codebook per trial: the analytic model describes
    // the codebook ensemble, not one realization.
    const Codebook cb =
        codebook::generate_rvq(ctx.p.n_b, ctx.p.bits, trial_rng);
    const TrialState s = draw_trial_state(ctx, cb, trial_rng);
    const TrialResult r = resolve_trial(ctx, s, 1.0);
    return r.sir_rx < upsilon ? 1.0 : 0.0;
  });
  OutageEstimate est;
  est.outage = fails / trials;
  est.half_width =
      1.959963984540054 *
      std::sqrt(std::max(0.0, est.outage * (1.0 - est.outage) / trials));
  return est;
}

OutageEstimate estimate_outage(const SystemParams& p, double upsilon,
                               int trials, RandomStream& rng) {
  return estimate_outage(make_context(p), upsilon, trials, rng);
}

double estimate_goodput(const TrialContext& ctx, int trials, GoodputMode mode,
                        RandomStream& rng) {
  if (trials < 1) throw std::domain_error("estimate_goodput: trials < 1");
  RandomStream cb_rng = rng.substream(0, kCodebookTrialKey);
  const Codebook cb = codebook::generate_rvq(ctx.p.n_b, ctx.p.bits, cb_rng);

  // Backoff lookup spans the bulk of the transmitter-side power law.
  const backoff::BetaTable* table = nullptr;
  backoff::BetaTable table_storage = [&]() -> backoff::BetaTable {
    if (mode != GoodputMode::kBackoffExact &&
        mode != GoodputMode::kBackoffPoly) {
      // Trivial placeholder; never consulted.
      return backoff::BetaTable(ctx.k, ctx.p.n_b, 1.0, 0.0, false, 1.0, 2.0,
                                2);
    }
    const analytics::DerivedConstants kt = analytics::derive_constants_raw(
        ctx.p.n_b, ctx.k.delta, 1.0, ctx.p.pathloss.alpha_f, ctx.k.q_d);
    const double z_lo = std::max(
        1e-8, 0.25 * analytics::effective_power_quantile(kt, ctx.p.n_b, 1e-5));
    const double z_hi =
        2.0 * analytics::effective_power_quantile(kt, ctx.p.n_b, 1.0 - 1e-7);
    return backoff::BetaTable(ctx.k, ctx.p.n_b, ctx.rho_bar, ctx.p.density,
                              mode == GoodputMode::kBackoffPoly, z_lo, z_hi);
  }();
  if (mode == GoodputMode::kBackoffExact || mode == GoodputMode::kBackoffPoly)
    table = &table_storage;

  const double sum = detail::ordered_trial_sum(trials, [&](int t) {
    RandomStream trial_rng = rng.substream(0, static_cast<std::uint64_t>(t));
    const bool random_beam = mode == GoodputMode::kRandomBeamforming;
    const TrialState s = draw_trial_state(ctx, cb, trial_rng, random_beam);
    if (mode == GoodputMode::kThroughput ||
        mode == GoodputMode::kRandomBeamforming) {
      // Full rate knowledge: the supported rate is always delivered.
      return resolve_trial(ctx, s, 1.0).rate_supported;
    }
    const double beta = table ? table->beta_for(s.z_tx) : 1.0;
    return resolve_trial(ctx, s, beta).goodput;
  });
  return sum / trials;
}

double estimate_goodput(const SystemParams& p, int trials, GoodputMode mode,
                        RandomStream& rng) {
  return estimate_goodput(make_context(p), trials, mode, rng);
}

}  // namespace simulator
}  // namespace femtonet

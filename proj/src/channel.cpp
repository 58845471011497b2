#include "femtonet/channel.hpp"

#include <cmath>
#include <stdexcept>

#include "femtonet/mathkit.hpp"

namespace femtonet {
namespace channel {

ChannelVector sample_channel(int n_antennas, RandomStream& rng) {
  if (n_antennas < 1)
    throw std::domain_error("sample_channel: n_antennas must be >= 1");
  ChannelVector h(static_cast<std::size_t>(n_antennas));
  const double s = 0.7071067811865476;  // 1/sqrt(2): unit total variance
  for (auto& e : h) {
    const double re = rng.gauss() * s;
    const double im = rng.gauss() * s;
    e = {re, im};
  }
  return h;
}

double correlation_coefficient(const MobilityParams& m) {
  // Unlike the full mobility validation, a static user (velocity 0) is a
  // legitimate boundary here: the fade stays perfectly coherent.
  if (m.velocity < 0.0)
    throw std::domain_error("correlation_coefficient: velocity must be >= 0");
  if (!(m.carrier_freq > 0.0) || !(m.symbol_duration > 0.0))
    throw std::domain_error(
        "correlation_coefficient: carrier and symbol duration must be > 0");
  if (m.delay_frames < 0)
    throw std::domain_error(
        "correlation_coefficient: delay_frames must be >= 0");
  const double doppler = m.velocity * m.carrier_freq / kSpeedOfLight;
  const double arg = 2.0 * 3.14159265358979323846 * m.delay_frames * doppler *
                     m.symbol_duration;
  return mathkit::bessel_j0(arg);
}

ChannelVector evolve_gauss_markov(const ChannelVector& h_old, double eta,
                                  RandomStream& rng) {
  if (eta < 0.0 || eta > 1.0)
    throw std::domain_error("evolve_gauss_markov: eta must be in [0, 1]");
  const double mix = std::sqrt(1.0 - eta * eta);
  ChannelVector e = sample_channel(static_cast<int>(h_old.size()), rng);
  ChannelVector out(h_old.size());
  for (std::size_t i = 0; i < h_old.size(); ++i)
    out[i] = eta * h_old[i] + mix * e[i];
  return out;
}

double effective_power(const ChannelVector& h, const ChannelVector& f) {
  if (h.size() != f.size())
    throw std::domain_error("effective_power: dimension mismatch");
  std::complex<double> acc(0.0, 0.0);
  for (std::size_t i = 0; i < h.size(); ++i) acc += std::conj(h[i]) * f[i];
  return std::norm(acc);
}

}  // namespace channel
}  // namespace femtonet

#pragma once
// Rayleigh MISO channel sampling, first-order Gauss-Markov aging, and the
// Clarke-model temporal correlation coefficient.

#include <complex>
#include <vector>

#include "femtonet/params.hpp"
#include "femtonet/rng.hpp"

namespace femtonet {

using ChannelVector = std::vector<std::complex<double>>;

namespace channel {

// Speed of light used for the Doppler frequency.
inline constexpr double kSpeedOfLight = 2.998e8;  // m/s

// i.i.d. circularly symmetric complex Gaussian entries, unit total variance
// per entry (real and imaginary parts each variance 1/2).
ChannelVector sample_channel(int n_antennas, RandomStream& rng);

// Clarke-model correlation over the feedback delay:
// J0(2 pi * delay_frames * (v f_c / c) * T_s).
double correlation_coefficient(const MobilityParams& m);

// h_new = eta * h_old + sqrt(1 - eta^2) * e, with e a fresh channel draw.
// The marginal law of the output equals that of sample_channel.
ChannelVector evolve_gauss_markov(const ChannelVector& h_old, double eta,
                                  RandomStream& rng);

// |<h, f>|^2 for a unit-norm beamformer f.
double effective_power(const ChannelVector& h, const ChannelVector& f);

}  // namespace channel
}  // namespace femtonet

#pragma once
// Limited-feedback codebooks: random vector quantization generation, the
// max-power quantizer, and the Gersho loss parameter.

#include <cstddef>
#include <string>
#include <vector>

#include "femtonet/channel.hpp"
#include "femtonet/rng.hpp"

namespace femtonet {

struct Codebook {
  std::vector<ChannelVector> vectors;  // 2^bits unit-norm beamformers
  int bits = 0;

  std::size_t size() const { return vectors.size(); }
};

namespace codebook {

// 2^bits independent vectors uniform on the complex unit sphere
// (normalized Gaussian draws). bits must be in [1, 16].
Codebook generate_rvq(int n_antennas, int bits, RandomStream& rng);

// Index of the codebook vector maximizing |<h, f>|^2; ties break to the
// lowest index.
std::size_t quantize(const ChannelVector& h, const Codebook& cb);

// Gersho quantization-loss parameter 2^(-bits/(n_antennas-1)).
// Requires n_antennas >= 2.
double gersho_delta(int n_antennas, int bits);

// Continuous-delta variant used by parameter sweeps that scan the loss
// parameter directly (equivalent bit count -(n_antennas-1) log2 delta).
double gersho_delta_from_bits(int n_antennas, double bits);

// JSON round-trip: array of vectors, each an array of [re, im] pairs.
std::string to_json(const Codebook& cb);
Codebook from_json(const std::string& text);

}  // namespace codebook
}  // namespace femtonet

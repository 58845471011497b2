#include "femtonet/codebook.hpp"

#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace femtonet {
namespace codebook {

Codebook generate_rvq(int n_antennas, int bits, RandomStream& rng) {
  if (n_antennas < 1)
    throw std::domain_error("generate_rvq: n_antennas must be >= 1");
  if (bits < 1 || bits > 16)
    throw std::domain_error("generate_rvq: bits must be in [1, 16]");
  Codebook cb;
  cb.bits = bits;
  const std::size_t count = std::size_t{1} << bits;
  cb.vectors.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    ChannelVector v = channel::sample_channel(n_antennas, rng);
    double norm2 = 0.0;
    for (const auto& e : v) norm2 += std::norm(e);
    const double inv = 1.0 / std::sqrt(norm2);
    for (auto& e : v) e *= inv;
    cb.vectors.push_back(std::move(v));
  }
  return cb;
}

std::size_t quantize(const ChannelVector& h, const Codebook& cb) {
  if (cb.vectors.empty()) throw std::domain_error("quantize: empty codebook");
  if (cb.vectors.front().size() != h.size())
    throw std::domain_error("quantize: dimension mismatch");
  std::size_t best = 0;
  double best_power = channel::effective_power(h, cb.vectors[0]);
  for (std::size_t k = 1; k < cb.vectors.size(); ++k) {
    const double p = channel::effective_power(h, cb.vectors[k]);
    if (p > best_power) {  // strict: ties keep the lowest index
      best_power = p;
      best = k;
    }
  }
  return best;
}

double gersho_delta(int n_antennas, int bits) {
  return gersho_delta_from_bits(n_antennas, static_cast<double>(bits));
}

double gersho_delta_from_bits(int n_antennas, double bits) {
  if (n_antennas < 2)
    throw std::domain_error("gersho_delta: n_antennas must be >= 2");
  return std::exp2(-bits / (n_antennas - 1));
}

std::string to_json(const Codebook& cb) {
  nlohmann::json j;
  j["bits"] = cb.bits;
  nlohmann::json vecs = nlohmann::json::array();
  for (const auto& v : cb.vectors) {
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& e : v) entries.push_back({e.real(), e.imag()});
    vecs.push_back(entries);
  }
  j["vectors"] = std::move(vecs);
  return j.dump(1);
}

Codebook from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  Codebook cb;
  cb.bits = j.at("bits").get<int>();
  for (const auto& jv : j.at("vectors")) {
    ChannelVector v;
    v.reserve(jv.size());
    for (const auto& je : jv)
      v.emplace_back(je.at(0).get<double>(), je.at(1).get<double>());
    cb.vectors.push_back(std::move(v));
  }
  return cb;
}

}  // namespace codebook
}  // namespace femtonet

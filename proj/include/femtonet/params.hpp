#pragma once
// Parameter bundles shared by every module: mobility, pathloss, and the full
// system configuration.  Validation lives next to the data so failures carry
// the offending field.

#include <cmath>
#include <stdexcept>
#include <string>

namespace femtonet {

// Mobility and feedback-delay description. Velocity is stored in m/s; the
// CLI converts km/h.
struct MobilityParams {
  double velocity = 20.0 / 3.6;     // m/s
  double carrier_freq = 2.0e9;      // Hz
  double symbol_duration = 1.0e-3;  // s (frame duration; documented assumption)
  int delay_frames = 2;             // feedback delay d in frames

  void validate() const {
    if (!(velocity > 0.0)) throw std::domain_error("MobilityParams.velocity must be > 0");
    if (!(carrier_freq > 0.0)) throw std::domain_error("MobilityParams.carrier_freq must be > 0");
    if (!(symbol_duration > 0.0)) throw std::domain_error("MobilityParams.symbol_duration must be > 0");
    if (delay_frames < 0) throw std::domain_error("MobilityParams.delay_frames must be >= 0");
  }
};

// Distance-based pathloss model. Gains are linear and noise-normalized
// (thermal noise absorbed into rho_m), so rho_m * D^-alpha_m is the mean SNR
// at distance D.
struct PathlossParams {
  double alpha_m = 3.8;         // outdoor exponent
  double alpha_f = 3.8;         // indoor-to-outdoor exponent
  double rho_m = 7.943e11;      // macro composite gain (SNR(1 km) = 5 dB)
  double rho_f = 7.943e11 * 3.1622776601683794e-4;  // femto gain, 35 dB below
  double wall_loss_db = 5.0;    // informational; already folded into rho_f
  double d_min = 1.0;           // interferer exclusion radius, m

  void validate() const {
    if (!(alpha_m > 2.0)) throw std::domain_error("PathlossParams.alpha_m must be > 2");
    if (!(alpha_f > 2.0)) throw std::domain_error("PathlossParams.alpha_f must be > 2");
    if (!(rho_m > 0.0) || !(rho_f > 0.0))
      throw std::domain_error("PathlossParams gains must be > 0");
    if (!(d_min > 0.0)) throw std::domain_error("PathlossParams.d_min must be > 0");
  }
};

// Full system configuration for one evaluation point.
struct SystemParams {
  int n_b = 4;                   // transmit antennas (macro)
  int n_f = 4;                   // femtocell antennas (informational)
  int bits = 5;                  // feedback bits B
  PathlossParams pathloss{};
  MobilityParams mobility{};
  double density = 0.0;          // femtocells per m^2 (0 = interference-free)
  double cell_radius = 1000.0;   // R_c, m
  double user_distance = 1000.0; // D, m
  double sir_threshold = 3.1622776601683795;  // linear (5 dB)

  void validate() const {
    if (n_b < 2) throw std::domain_error("SystemParams.n_b must be >= 2");
    if (n_f < 1) throw std::domain_error("SystemParams.n_f must be >= 1");
    if (bits < 1 || bits > 16) throw std::domain_error("SystemParams.bits must be in [1, 16]");
    pathloss.validate();
    mobility.validate();
    if (density < 0.0) throw std::domain_error("SystemParams.density must be >= 0");
    if (!(cell_radius > 0.0)) throw std::domain_error("SystemParams.cell_radius must be > 0");
    if (!(user_distance > 0.0) || user_distance > cell_radius)
      throw std::domain_error("SystemParams.user_distance must be in (0, cell_radius]");
    if (!(sir_threshold > 0.0)) throw std::domain_error("SystemParams.sir_threshold must be > 0");
  }

  // Mean SNR at the user in dB: 10 log10(rho_m D^-alpha_m).
  double snr_db() const {
    return 10.0 * std::log10(pathloss.rho_m *
                             std::pow(user_distance, -pathloss.alpha_m));
  }
};

}  // namespace femtonet

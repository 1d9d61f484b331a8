#pragma once
// key=value run configuration. '#' starts a comment; blank lines are ignored.
// Unknown and repeated keys are rejected, and every value is range-checked on load.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tiara/attention.hpp"
#include "tiara/promptblend.hpp"
#include "tiara/spectral.hpp"

namespace tiara::io {

struct Config {
  double alpha = 6.0;
  std::optional<std::size_t> corner_size;
  std::optional<double> corner_penalty;
  spectral::WindowKind window_kind = spectral::WindowKind::kBlackman;
  std::size_t window_length = 9;
  std::optional<std::size_t> phi1;
  std::optional<std::size_t> phi2;
  std::size_t k_threshold = 5;
  double eta = 0.9;
  double t1 = 0.0;
  double t2 = 400.0;
  std::size_t layer_threshold = 7;
  std::uint64_t seed = 0;

  // Synthetic theorem instances.
  std::vector<std::size_t> sizes{32, 64, 128, 256};
  double decay = 1.0;
  double value_bound = 1.0;
  double hf_amplitude = 0.5;
  std::optional<std::size_t> hf_bin;
  std::size_t frames = 64;
  std::size_t height = 1;
  std::size_t width = 1;

  static const std::vector<std::string_view>& keys();

  /// Parses and range-checks one value. Throws ParseError (with `line`) on an
  /// unknown key or a bad value.
  void set(std::string_view key, std::string_view value, std::size_t line = 0);
  /// Cross-key checks (phi1 < phi2, t1 <= t2, hf_amplitude <= value_bound).
  void validate() const;

  spectral::Window window() const;
  /// Band for an N-frame row; default thresholds fill in any unset side.
  attention::FrequencyBand band_for(std::size_t frames) const;
  attention::TiaraOptions tiara_options() const;
  promptblend::BlendSchedule schedule(std::vector<promptblend::FrameSpan> spans) const;
};

Config parse_config(std::string_view text);
Config load_config(const std::filesystem::path& path);

}  // namespace tiara::io

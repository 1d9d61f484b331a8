#include "tiara/io/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "tiara/errors.hpp"
#include "tiara/io/tensor_file.hpp"
#include "tiara/io/text_formats.hpp"

namespace tiara::io {
namespace {

std::string where(std::size_t line) {
  return line ? "line " + std::to_string(line) + ": " : std::string();
}

[[noreturn]] void bad(std::string_view key, std::string_view value, const std::string& why,
                      std::size_t line) {
  throw ParseError(where(line) + std::string(key) + "=" + std::string(value) + ": " + why, line);
}

double to_double(std::string_view key, std::string_view v, std::size_t line) {
  double out = 0.0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size() || !std::isfinite(out))
    bad(key, v, "not a finite number", line);
  return out;
}

std::uint64_t to_uint(std::string_view key, std::string_view v, std::size_t line) {
  std::uint64_t out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size() || v.empty())
    bad(key, v, "not a non-negative integer", line);
  return out;
}

double at_least(std::string_view key, std::string_view v, std::size_t line, double lo) {
  const double d = to_double(key, v, line);
  if (d < lo) bad(key, v, "must be >= " + format_double(lo), line);
  return d;
}

std::size_t positive(std::string_view key, std::string_view v, std::size_t line) {
  const auto n = to_uint(key, v, line);
  if (n == 0) bad(key, v, "must be positive", line);
  return n;
}

}  // namespace

const std::vector<std::string_view>& Config::keys() {
  static const std::vector<std::string_view> k{
      "alpha",     "corner_size", "corner_penalty", "window.kind", "window.length", "phi1",
      "phi2",      "k_threshold", "eta",            "t1",          "t2",            "layer_threshold",
      "seed",      "sizes",       "decay",          "value_bound", "hf_amplitude",  "hf_bin",
      "frames",    "height",      "width"};
  return k;
}

void Config::set(std::string_view key, std::string_view v, std::size_t line) {
  if (key == "alpha") {
    alpha = at_least(key, v, line, 0.0);
  } else if (key == "corner_size") {
    corner_size = to_uint(key, v, line);
  } else if (key == "corner_penalty") {
    corner_penalty = at_least(key, v, line, 0.0);
  } else if (key == "window.kind") {
    try {
      window_kind = spectral::parse_window_kind(v);
    } catch (const DomainError& e) {
      bad(key, v, e.what(), line);
    }
  } else if (key == "window.length") {
    window_length = positive(key, v, line);
  } else if (key == "phi1") {
    phi1 = to_uint(key, v, line);
  } else if (key == "phi2") {
    phi2 = positive(key, v, line);
  } else if (key == "k_threshold") {
    k_threshold = positive(key, v, line);
  } else if (key == "eta") {
    eta = to_double(key, v, line);
    if (!(eta > 0.0 && eta < 1.0)) bad(key, v, "must lie in (0, 1)", line);
  } else if (key == "t1") {
    t1 = to_double(key, v, line);
  } else if (key == "t2") {
    t2 = to_double(key, v, line);
  } else if (key == "layer_threshold") {
    layer_threshold = to_uint(key, v, line);
  } else if (key == "seed") {
    seed = to_uint(key, v, line);
  } else if (key == "sizes") {
    std::vector<std::size_t> parsed;
    std::string_view rest = v;
    while (true) {
      const auto comma = rest.find(',');
      const auto item = trim(rest.substr(0, comma));
      const auto n = to_uint(key, item, line);
      if (n < 2) bad(key, v, "every size must be >= 2", line);
      parsed.push_back(n);
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    sizes = std::move(parsed);
  } else if (key == "decay") {
    decay = at_least(key, v, line, 0.0);
  } else if (key == "value_bound") {
    value_bound = to_double(key, v, line);
    if (!(value_bound > 0.0)) bad(key, v, "must be positive", line);
  } else if (key == "hf_amplitude") {
    hf_amplitude = at_least(key, v, line, 0.0);
  } else if (key == "hf_bin") {
    hf_bin = to_uint(key, v, line);
  } else if (key == "frames") {
    frames = to_uint(key, v, line);
    if (frames < 2) bad(key, v, "must be >= 2", line);
  } else if (key == "height") {
    height = positive(key, v, line);
  } else if (key == "width") {
    width = positive(key, v, line);
  } else {
    throw ParseError(where(line) + "unknown key '" + std::string(key) + "'",
                     line);
  }
}

void Config::validate() const {
  if (phi1 && phi2 && !(*phi1 < *phi2))
    throw ParseError("phi1 must be < phi2, got " + std::to_string(*phi1) + " and " +
                     std::to_string(*phi2));
  if (!(t1 <= t2)) throw ParseError("t1 must be <= t2");
  if (hf_amplitude > value_bound) throw ParseError("hf_amplitude must be <= value_bound");
}

spectral::Window Config::window() const { return spectral::make_window(window_kind, window_length); }

attention::FrequencyBand Config::band_for(std::size_t n) const {
  const auto padded = attention::padded_length(n, window());
  auto band = attention::FrequencyBand::defaults(padded);
  if (phi1) band.phi1 = *phi1;
  if (phi2) band.phi2 = *phi2;
  band.validate(padded);
  return band;
}

attention::TiaraOptions Config::tiara_options() const {
  attention::TiaraOptions o;
  o.window = window();
  o.alpha = alpha;
  o.corner_size = corner_size;
  o.corner_penalty = corner_penalty;
  return o;
}

promptblend::BlendSchedule Config::schedule(std::vector<promptblend::FrameSpan> spans) const {
  promptblend::BlendSchedule s;
  s.spans = std::move(spans);
  s.t1 = t1;
  s.t2 = t2;
  s.layer_threshold = layer_threshold;
  s.validate();
  return s;
}

Config parse_config(std::string_view text) {
  Config c;
  std::set<std::string, std::less<>> seen;
  for_each_line(text, [&](std::string_view raw, std::size_t line) {
    const auto content = trim(strip_comment(raw));
    if (content.empty()) return;
    const auto eq = content.find('=');
    if (eq == std::string_view::npos)
      throw ParseError("line " + std::to_string(line) + ": expected key=value", line);
    const auto key = trim(content.substr(0, eq));
    const auto value = trim(content.substr(eq + 1));
    if (!seen.emplace(key).second)
      throw ParseError("line " + std::to_string(line) + ": duplicate key '" + std::string(key) + "'",
                       line);
    c.set(key, value, line);
  });
  c.validate();
  return c;
}

Config load_config(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  return parse_config(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

}  // namespace tiara::io

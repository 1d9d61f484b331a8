#pragma once
// Multi-prompt conditioning: align organized prompts component by component in
// token space, embed them, and blend neighbouring prompts across transition
// windows at selected denoising timesteps and U-Net layers.

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "tiara/matrix.hpp"

namespace tiara::promptblend {

using TokenId = std::uint32_t;
using TokenSequence = std::vector<TokenId>;

/// Subject, action, place, time, quality description, in that order.
inline constexpr std::size_t kComponentCount = 5;
std::string_view component_name(std::size_t component);

/// Exact-match vocabulary. Text is split on whitespace, and each of
/// , . ; : ! ? " ( ) becomes its own token.
class TokenTable {
 public:
  /// Throws ParseError on a duplicate token string.
  void add(std::string token, TokenId id);
  std::optional<TokenId> find(std::string_view token) const;
  std::size_t size() const noexcept { return ids_.size(); }

  /// Throws ParseError naming the first token missing from the table.
  TokenSequence tokenize(std::string_view text) const;

  static std::vector<std::string> split_words(std::string_view text);

 private:
  std::unordered_map<std::string, TokenId> ids_;
};

struct OrganizedPrompt {
  std::array<TokenSequence, kComponentCount> components;
  std::string raw_text;
};

/// Splits on exactly four '$' and trims whitespace around each component.
/// Throws ParseError (column = 1-based position of the offending separator,
/// or of the end of text when there are too few).
std::array<std::string, kComponentCount> split_organized(std::string_view text);

OrganizedPrompt parse_organized(std::string_view text, const TokenTable& table);

/// What to do when a component is empty in some prompts but not others.
enum class EmptyComponentPolicy {
  kBorrowLongest,  // fill with the longest instance's tokens
  kReject,         // AlignmentError naming the component
};

struct AlignedPromptSet {
  std::vector<TokenSequence> prompts;  // each of length total_length
  std::array<std::size_t, kComponentCount> component_lengths{};
  std::size_t total_length = 0;

  std::span<const TokenId> segment(std::size_t prompt, std::size_t component) const;
  /// Aligned prompts re-split into components.
  std::vector<OrganizedPrompt> as_organized() const;
};

/// Per component k, every segment is repeated cyclically to M_k, the longest
/// instance's length, and segments are concatenated in component order.
AlignedPromptSet align(std::span<const OrganizedPrompt> prompts,
                       EmptyComponentPolicy policy = EmptyComponentPolicy::kBorrowLongest);

/// One embedding row per aligned token.
struct EmbeddedPrompt {
  Matrix matrix;
  friend bool operator==(const EmbeddedPrompt&, const EmbeddedPrompt&) = default;
};

/// Per-token lookup table standing in for the text encoder (vocab x d).
class EmbeddingTable {
 public:
  explicit EmbeddingTable(Matrix table);
  std::size_t vocabulary() const noexcept { return table_.rows(); }
  std::size_t dimension() const noexcept { return table_.cols(); }
  EmbeddedPrompt embed(std::span<const TokenId> tokens) const;

 private:
  Matrix table_;
};

/// a_n = (n - n_e) / (n_s_next - n_e), for n_e <= n <= n_s_next.
double interpolation_weight(std::size_t n, std::size_t span_end, std::size_t next_span_start);

struct FrameSpan {
  std::size_t start = 0;
  std::size_t end = 0;  // inclusive
};

struct BlendSchedule {
  std::vector<FrameSpan> spans;
  double t1 = 0.0;
  double t2 = 400.0;
  std::size_t layer_threshold = 7;

  /// Frames are numbered 0 .. last span end.
  std::size_t total_frames() const noexcept { return spans.empty() ? 0 : spans.back().end + 1; }
  bool blend_active(double timestep, std::size_t layer) const noexcept {
    return (timestep >= t1 && timestep <= t2) || layer >= layer_threshold;
  }
  /// Throws DomainError unless start_i <= end_i < start_{i+1} and t1 <= t2.
  void validate() const;
};

/// Text conditioning for frame n at timestep t and layer d:
///  - inside span i (closed): prompt i;
///  - strictly between span i and span i+1: (1 - a_n) P_i + a_n P_{i+1} when the
///    blend is active, otherwise P_i;
///  - before the first span: prompt 0.
EmbeddedPrompt conditioning(const BlendSchedule& schedule, std::span<const EmbeddedPrompt> embedded,
                            std::size_t frame, double timestep, std::size_t layer);

}  // namespace tiara::promptblend

#include "tiara/promptblend.hpp"

#include <algorithm>
#include <cctype>
#include <string>

#include "tiara/errors.hpp"

namespace tiara::promptblend {
namespace {

constexpr std::string_view kPunctuation = ",.;:!?\"()";

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

void require_matching(std::span<const EmbeddedPrompt> embedded) {
  if (embedded.empty()) throw DomainError("no embedded prompts");
  const auto& first = embedded.front().matrix;
  for (std::size_t i = 1; i < embedded.size(); ++i)
    if (embedded[i].matrix.rows() != first.rows() || embedded[i].matrix.cols() != first.cols())
      throw DomainError("embedded prompt " + std::to_string(i) +
                        " has a different shape; prompts must be aligned first");
}

}  // namespace

std::string_view component_name(std::size_t component) {
  static constexpr std::array<std::string_view, kComponentCount> names{
      "subject", "action", "place", "time", "quality"};
  if (component >= kComponentCount) throw DomainError("component index out of range");
  return names[component];
}

void TokenTable::add(std::string token, TokenId id) {
  if (token.empty()) throw ParseError("empty token string");
  auto [it, inserted] = ids_.emplace(std::move(token), id);
  if (!inserted) throw ParseError("duplicate token '" + it->first + "'");
}

std::optional<TokenId> TokenTable::find(std::string_view token) const {
  auto it = ids_.find(std::string(token));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::string> TokenTable::split_words(std::string_view text) {
  std::vector<std::string> words;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) words.push_back(std::move(current));
    current.clear();
  };
  for (char ch : text) {
    if (std::isspace(static_cast<unsigned char>(ch))) {
      flush();
    } else if (kPunctuation.find(ch) != std::string_view::npos) {
      flush();
      words.emplace_back(1, ch);
    } else {
      current.push_back(ch);
    }
  }
  flush();
  return words;
}

TokenSequence TokenTable::tokenize(std::string_view text) const {
  TokenSequence out;
  for (const auto& w : split_words(text)) {
    const auto id = find(w);
    if (!id) throw ParseError("token '" + w + "' is not in the token table");
    out.push_back(*id);
  }
  return out;
}

std::array<std::string, kComponentCount> split_organized(std::string_view text) {
  std::array<std::string, kComponentCount> parts;
  std::size_t part = 0;
  std::size_t begin = 0;
  for (std::size_t pos = 0; pos < text.size(); ++pos) {
    if (text[pos] != '$') continue;
    if (part + 1 == kComponentCount)
      throw ParseError("expected 4 '$' separators, found a 5th at column " +
                           std::to_string(pos + 1),
                       0, pos + 1);
    parts[part++] = std::string(trim(text.substr(begin, pos - begin)));
    begin = pos + 1;
  }
  if (part + 1 != kComponentCount)
    throw ParseError("expected 4 '$' separators, found " + std::to_string(part) +
                         " (text ends at column " + std::to_string(text.size() + 1) + ")",
                     0, text.size() + 1);
  parts[part] = std::string(trim(text.substr(begin)));
  return parts;
}

OrganizedPrompt parse_organized(std::string_view text, const TokenTable& table) {
  const auto parts = split_organized(text);
  OrganizedPrompt p;
  p.raw_text = std::string(text);
  for (std::size_t k = 0; k < kComponentCount; ++k) p.components[k] = table.tokenize(parts[k]);
  return p;
}

std::span<const TokenId> AlignedPromptSet::segment(std::size_t prompt, std::size_t component) const {
  std::size_t offset = 0;
  for (std::size_t k = 0; k < component; ++k) offset += component_lengths[k];
  return std::span<const TokenId>(prompts.at(prompt)).subspan(offset, component_lengths.at(component));
}

std::vector<OrganizedPrompt> AlignedPromptSet::as_organized() const {
  std::vector<OrganizedPrompt> out(prompts.size());
  for (std::size_t i = 0; i < prompts.size(); ++i)
    for (std::size_t k = 0; k < kComponentCount; ++k) {
      const auto seg = segment(i, k);
      out[i].components[k].assign(seg.begin(), seg.end());
    }
  return out;
}

AlignedPromptSet align(std::span<const OrganizedPrompt> prompts, EmptyComponentPolicy policy) {
  if (prompts.empty()) throw AlignmentError("no prompts to align");
  AlignedPromptSet out;
  out.prompts.resize(prompts.size());
  for (std::size_t k = 0; k < kComponentCount; ++k) {
    std::size_t longest = 0;
    for (std::size_t i = 1; i < prompts.size(); ++i)
      if (prompts[i].components[k].size() > prompts[longest].components[k].size()) longest = i;
    const TokenSequence& donor = prompts[longest].components[k];
    const std::size_t target = donor.size();
    out.component_lengths[k] = target;
    out.total_length += target;

    for (std::size_t i = 0; i < prompts.size(); ++i) {
      const TokenSequence* source = &prompts[i].components[k];
      if (source->empty() && target > 0) {
        if (policy == EmptyComponentPolicy::kReject)
          throw AlignmentError("component '" + std::string(component_name(k)) +
                               "' is empty in prompt " + std::to_string(i) +
                               " but not in prompt " + std::to_string(longest));
        source = &donor;
      }
      for (std::size_t t = 0; t < target; ++t)
        out.prompts[i].push_back((*source)[t % source->size()]);
    }
  }
  return out;
}

EmbeddingTable::EmbeddingTable(Matrix table) : table_(std::move(table)) {
  if (table_.rows() == 0 || table_.cols() == 0) throw DomainError("embedding table is empty");
  if (!table_.all_finite()) throw DomainError("embedding table has non-finite entries");
}

EmbeddedPrompt EmbeddingTable::embed(std::span<const TokenId> tokens) const {
  Matrix out(tokens.size(), dimension());
  for (std::size_t r = 0; r < tokens.size(); ++r) {
    if (tokens[r] >= vocabulary())
      throw DomainError("token id " + std::to_string(tokens[r]) +
                        " outside embedding vocabulary of " + std::to_string(vocabulary()));
    std::ranges::copy(table_.row(tokens[r]), out.row(r).begin());
  }
  return {std::move(out)};
}

double interpolation_weight(std::size_t n, std::size_t span_end, std::size_t next_span_start) {
  if (next_span_start <= span_end)
    throw DomainError("transition window needs next start > span end, got " +
                      std::to_string(span_end) + " and " + std::to_string(next_span_start));
  if (n < span_end || n > next_span_start)
    throw DomainError("frame " + std::to_string(n) + " outside transition window [" +
                      std::to_string(span_end) + ", " + std::to_string(next_span_start) + "]");
  return static_cast<double>(n - span_end) / static_cast<double>(next_span_start - span_end);
}

void BlendSchedule::validate() const {
  if (spans.empty()) throw DomainError("schedule has no spans");
  for (std::size_t i = 0; i < spans.size(); ++i) {
    if (spans[i].start > spans[i].end)
      throw DomainError("span " + std::to_string(i) + " starts after it ends");
    if (i + 1 < spans.size() && !(spans[i].end < spans[i + 1].start))
      throw DomainError("span " + std::to_string(i + 1) + " must start after span " +
                        std::to_string(i) + " ends");
  }
  if (!(t1 <= t2)) throw DomainError("timestep window needs t1 <= t2");
}

EmbeddedPrompt conditioning(const BlendSchedule& schedule, std::span<const EmbeddedPrompt> embedded,
                            std::size_t frame, double timestep, std::size_t layer) {
  schedule.validate();
  require_matching(embedded);
  if (embedded.size() != schedule.spans.size())
    throw DomainError(std::to_string(embedded.size()) + " prompts but " +
                      std::to_string(schedule.spans.size()) + " spans");
  if (frame >= schedule.total_frames())
    throw DomainError("frame " + std::to_string(frame) + " >= total frames " +
                      std::to_string(schedule.total_frames()));

  const auto& spans = schedule.spans;
  if (frame < spans.front().start) return embedded.front();
  for (std::size_t i = 0; i < spans.size(); ++i) {
    if (frame <= spans[i].end) return embedded[i];
    if (frame < spans[i + 1].start) {  // i + 1 exists: frame < total_frames
      if (!schedule.blend_active(timestep, layer)) return embedded[i];
      const double a = interpolation_weight(frame, spans[i].end, spans[i + 1].start);
      const auto& p = embedded[i].matrix;
      const auto& q = embedded[i + 1].matrix;
      Matrix out(p.rows(), p.cols());
      const auto pd = p.data();
      const auto qd = q.data();
      auto od = out.data();
      for (std::size_t e = 0; e < od.size(); ++e) od[e] = (1.0 - a) * pd[e] + a * qd[e];
      return {std::move(out)};
    }
  }
  return embedded.back();  // unreachable: frame <= last end
}

}  // namespace tiara::promptblend

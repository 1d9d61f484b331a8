#include "tiara/io/text_formats.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <limits>

#include "tiara/errors.hpp"
#include "tiara/io/tensor_file.hpp"

namespace tiara::io {
namespace {

std::uint64_t parse_index(std::string_view s, std::size_t line, const char* what) {
  std::uint64_t out = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  if (s.empty() || ec != std::errc() || p != s.data() + s.size())
    throw ParseError("line " + std::to_string(line) + ": " + what + " '" + std::string(s) +
                         "' is not a non-negative integer",
                     line);
  return out;
}

}  // namespace

std::string_view trim(std::string_view s) noexcept {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string_view strip_comment(std::string_view line) noexcept {
  return line.substr(0, line.find('#'));
}

void for_each_line(std::string_view text,
                   const std::function<void(std::string_view, std::size_t)>& fn) {
  std::size_t number = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    auto line = text.substr(0, nl);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    fn(line, ++number);
    if (nl == std::string_view::npos) break;
    text.remove_prefix(nl + 1);
  }
}

std::string format_double(double v) {
  char buf[32];
  for (int precision = 1; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof buf, "%.*g", precision, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

std::string read_text_file(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  return std::string(bytes.begin(), bytes.end());
}

promptblend::TokenTable parse_token_table(std::string_view text) {
  promptblend::TokenTable table;
  for_each_line(text, [&](std::string_view line, std::size_t n) {
    if (trim(line).empty()) return;
    const auto tab = line.find('\t');
    if (tab == std::string_view::npos)
      throw ParseError("line " + std::to_string(n) + ": expected token<TAB>id", n);
    const auto token = line.substr(0, tab);
    const auto id = parse_index(trim(line.substr(tab + 1)), n, "token id");
    if (id > std::numeric_limits<promptblend::TokenId>::max())
      throw ParseError("line " + std::to_string(n) + ": token id too large", n);
    try {
      table.add(std::string(token), static_cast<promptblend::TokenId>(id));
    } catch (const ParseError& e) {
      throw ParseError("line " + std::to_string(n) + ": " + e.what(), n);
    }
  });
  return table;
}

std::vector<promptblend::FrameSpan> parse_spans(std::string_view text) {
  std::vector<promptblend::FrameSpan> spans;
  for_each_line(text, [&](std::string_view raw, std::size_t n) {
    auto line = trim(strip_comment(raw));
    if (line.empty()) return;
    std::size_t split = 0;
    while (split < line.size() && !std::isspace(static_cast<unsigned char>(line[split]))) ++split;
    const auto a = line.substr(0, split);
    const auto b = trim(line.substr(split));
    if (b.empty() || b.find_first_of(" \t") != std::string_view::npos)
      throw ParseError("line " + std::to_string(n) + ": expected \"start end\"", n);
    spans.push_back({parse_index(a, n, "start"), parse_index(b, n, "end")});
  });
  return spans;
}

std::vector<PromptLine> parse_prompt_lines(std::string_view text) {
  std::vector<PromptLine> out;
  for (auto& set : parse_prompt_sets(text))
    for (auto& p : set) out.push_back(std::move(p));
  return out;
}

std::vector<std::vector<PromptLine>> parse_prompt_sets(std::string_view text) {
  std::vector<std::vector<PromptLine>> sets(1);
  for_each_line(text, [&](std::string_view line, std::size_t n) {
    const auto t = trim(line);
    if (!t.empty() && t.front() == '#') return;
    if (t.empty()) {
      if (!sets.back().empty()) sets.emplace_back();
      return;
    }
    sets.back().push_back({std::string(t), n});
  });
  if (sets.back().empty()) sets.pop_back();
  return sets;
}

std::vector<promptblend::OrganizedPrompt> organize(const std::vector<PromptLine>& lines,
                                                   const promptblend::TokenTable& table) {
  std::vector<promptblend::OrganizedPrompt> out;
  for (const auto& l : lines) {
    try {
      out.push_back(promptblend::parse_organized(l.text, table));
    } catch (const ParseError& e) {
      throw ParseError("line " + std::to_string(l.line) + ": " + e.what(), l.line, e.column());
    }
  }
  return out;
}

}  // namespace tiara::io

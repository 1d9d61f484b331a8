#pragma once
// Line-oriented text inputs (token tables, spans, prompt lists) and CSV output.
// Parse errors carry 1-based line numbers.

#include <cstddef>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "tiara/promptblend.hpp"

namespace tiara::io {

std::string_view trim(std::string_view s) noexcept;
std::string_view strip_comment(std::string_view line) noexcept;
/// Calls fn(line, line_number) for every line; a trailing '\r' is dropped.
void for_each_line(std::string_view text,
                   const std::function<void(std::string_view, std::size_t)>& fn);

/// Shortest decimal form that reads back to the same double.
std::string format_double(double v);

std::string read_text_file(const std::filesystem::path& path);

/// Lines of "token<TAB>id".
promptblend::TokenTable parse_token_table(std::string_view text);

/// Lines of "start end" (inclusive frame indices, 0-based).
std::vector<promptblend::FrameSpan> parse_spans(std::string_view text);

struct PromptLine {
  std::string text;
  std::size_t line = 0;
};

/// One organized prompt per non-blank line; '#' lines are comments.
std::vector<PromptLine> parse_prompt_lines(std::string_view text);
/// Groups of prompt lines separated by blank lines.
std::vector<std::vector<PromptLine>> parse_prompt_sets(std::string_view text);

/// Tokenizes each line; errors are rethrown with the line number.
std::vector<promptblend::OrganizedPrompt> organize(const std::vector<PromptLine>& lines,
                                                   const promptblend::TokenTable& table);

}  // namespace tiara::io

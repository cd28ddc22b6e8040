// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace pagezip
{

/// System prompt for the read_text tool (source and OCR text expansion).
[[nodiscard]] std::string_view readTextSystemPrompt() noexcept;

/// System prompt for the zoom_in tool (high-resolution image expansion).
[[nodiscard]] std::string_view zoomInSystemPrompt() noexcept;

/// System prompt for the teacher model that writes synthetic traces.
[[nodiscard]] std::string_view traceGenerationSystemPrompt() noexcept;

/// Judge template with {question}, {gold_answers} and {model_answer} slots.
[[nodiscard]] std::string_view judgePromptTemplate() noexcept;

/// Fills the judge template; gold answers are joined by newlines.
[[nodiscard]] std::string judgePrompt(std::string_view question,
                                      std::vector<std::string> const& goldAnswers,
                                      std::string_view modelAnswer);

/// Text of the question part that follows the page images in the first user message.
[[nodiscard]] std::string questionText(std::string_view question);

/// Label placed before page image k in the first user message.
[[nodiscard]] std::string imageLabel(int k);

/// Instruction appended to the question for single-turn, no-tool answering.
[[nodiscard]] std::string_view directAnswerInstruction() noexcept;

} // namespace pagezip

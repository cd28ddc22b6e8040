// SPDX-License-Identifier: Apache-2.0
#include <pagezip/protocol/prompts.hpp>

namespace pagezip
{

namespace
{

constexpr std::string_view ReadTextPrompt =
    "You are a helpful assistant that answers questions based on rendered text images. You can view the images and "
    "use the read_text tool to read the actual text content of any image for detailed analysis.\n"
    "\n"
    "You have a tool called read_text that reads the text content of any image. To use it:\n"
    "\n"
    "<tool_call>{\"name\": \"read_text\", \"arguments\": {\"image\": IMAGE_NUMBER}}</tool_call>\n"
    "\n"
    "You can call read_text multiple times on different images. Always reason inside <think> and </think> tags "
    "before taking any action. If you need more detail from a specific image, call read_text to get its text "
    "content. Do not read the entire input — only read images that are likely relevant. Once you have enough "
    "information, provide your final answer.";

constexpr std::string_view ZoomInPrompt =
    "You are a helpful assistant that answers questions about multi-image documents. You can view low-resolution "
    "thumbnail images and use the zoom_in tool to get the original full-resolution image for detailed analysis.\n"
    "\n"
    "You have a tool called zoom_in that shows the original image at full resolution. Images are numbered starting "
    "from 1. To use it:\n"
    "\n"
    "<tool_call>{\"name\": \"zoom_in\", \"arguments\": {\"image\": IMAGE_NUMBER}}</tool_call>\n"
    "\n"
    "You can call zoom_in multiple times on different images. Always reason inside <think> and </think> tags "
    "before taking any action. First examine the thumbnail images to identify which ones likely contain relevant "
    "information, then call zoom_in to get the original full-resolution version. Once you have enough information, "
    "provide your final answer.";

constexpr std::string_view TracePrompt =
    "You generate training data for a document QA model. Output ONLY the requested format with ---RESPONSE{N}--- "
    "delimiters. Start your output directly with ---RESPONSE1---. No preamble.\n"
    "\n"
    "ROLEPLAY CONSTRAINT (CRITICAL): You are roleplaying a model that is solving the question from scratch by "
    "investigating the document. The <think> blocks must read as genuine first-person investigation of the image "
    "content. NEVER reference these prompt elements inside <think>: \"the answer\", \"the answer key\", \"the "
    "provided answer\", \"ground truth\", \"the prompt says/states/mentions/indicates/asks\", \"the question's "
    "premise\", \"the task says\", \"training data/example\", \"provided text snippets\", or any phrasing that "
    "implies you were told the answer or the correct image in advance. Treat the answer as something you DISCOVER "
    "by reading, not something you were given. Do not include \"wait, re-reading\" or \"there seems to be a "
    "mismatch\" style self-correction — write the reasoning as if it landed correctly the first time.\n"
    "\n"
    "STYLE: Each <think> block is 3–5 sentences. After-zoom reasoning MUST quote or cite specific words/phrases "
    "from the tool_response text. Do not fabricate text that isn't in the tool_response.";

constexpr std::string_view JudgeTemplate =
    "You are an expert evaluator. Determine if the model's answer correctly answers the question based on the gold "
    "answers.\n"
    "\n"
    "[QUESTION]\n"
    "{question}\n"
    "[/QUESTION]\n"
    "\n"
    "[GOLD ANSWERS]\n"
    "{gold_answers}\n"
    "[/GOLD ANSWERS]\n"
    "\n"
    "[MODEL ANSWER]\n"
    "{model_answer}\n"
    "[/MODEL ANSWER]\n"
    "\n"
    "Evaluation criteria:\n"
    "- The answer must convey the same core meaning as the gold answers\n"
    "- Partial matches should be marked incorrect\n"
    "- Additional correct information beyond gold answers is acceptable\n"
    "- Empty or off-topic responses are incorrect\n"
    "- Minor formatting differences (e.g., \"10:30 pm\" vs \"10:30 p.m.\") should be accepted\n"
    "\n"
    "Respond with ONLY [[YES]] if the model answer is correct, or [[NO]] if incorrect.";

} // namespace

std::string_view readTextSystemPrompt() noexcept
{
    return ReadTextPrompt;
}

std::string_view zoomInSystemPrompt() noexcept
{
    return ZoomInPrompt;
}

std::string_view traceGenerationSystemPrompt() noexcept
{
    return TracePrompt;
}

std::string_view judgePromptTemplate() noexcept
{
    return JudgeTemplate;
}

std::string judgePrompt(std::string_view question, std::vector<std::string> const& goldAnswers, std::string_view modelAnswer)
{
    auto gold = std::string {};
    for (auto const& a: goldAnswers)
    {
        if (!gold.empty())
            gold += '\n';
        gold += a;
    }
    // Fill in template order so text inside an earlier value is never
    // mistaken for a later slot.
    auto out = std::string {};
    auto const t = std::string_view(JudgeTemplate);
    auto const q = t.find("{question}");
    auto const g = t.find("{gold_answers}");
    auto const m = t.find("{model_answer}");
    out.append(t.substr(0, q)).append(question);
    out.append(t.substr(q + 10, g - q - 10)).append(gold);
    out.append(t.substr(g + 14, m - g - 14)).append(modelAnswer);
    out.append(t.substr(m + 14));
    return out;
}

std::string questionText(std::string_view question)
{
    return "\nQuestion: " + std::string(question);
}

std::string imageLabel(int k)
{
    return (k == 1 ? "Image " : "\nImage ") + std::to_string(k) + ":";
}

std::string_view directAnswerInstruction() noexcept
{
    return "\nAnswer the question directly based on the images.";
}

} // namespace pagezip

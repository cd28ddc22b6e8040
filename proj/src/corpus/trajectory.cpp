// SPDX-License-Identifier: Apache-2.0
#include <pagezip/corpus/trajectory.hpp>
#include <pagezip/error.hpp>

namespace pagezip
{

std::string_view toString(ExpandKind kind) noexcept
{
    switch (kind)
    {
        case ExpandKind::SourceText: return "source_text";
        case ExpandKind::OcrText: return "ocr_text";
        case ExpandKind::ImageZoom: return "image_zoom";
    }
    return "source_text";
}

ExpandKind expandKindFromString(std::string_view name)
{
    if (name == "source_text")
        return ExpandKind::SourceText;
    if (name == "ocr_text")
        return ExpandKind::OcrText;
    if (name == "image_zoom")
        return ExpandKind::ImageZoom;
    throw InputError("unknown expand kind '" + std::string(name) + "' (expected source_text, ocr_text or image_zoom)");
}

ToolName toolFor(ExpandKind kind) noexcept
{
    return kind == ExpandKind::ImageZoom ? ToolName::ZoomIn : ToolName::ReadText;
}

std::string_view toString(EpisodeStatus status) noexcept
{
    switch (status)
    {
        case EpisodeStatus::Answered: return "answered";
        case EpisodeStatus::BudgetExhausted: return "budget_exhausted";
        case EpisodeStatus::ProtocolError: return "protocol_error";
    }
    return "answered";
}

EpisodeStatus episodeStatusFromString(std::string_view name)
{
    if (name == "answered")
        return EpisodeStatus::Answered;
    if (name == "budget_exhausted")
        return EpisodeStatus::BudgetExhausted;
    if (name == "protocol_error")
        return EpisodeStatus::ProtocolError;
    throw InputError("unknown episode status '" + std::string(name) + "'");
}

std::size_t Trajectory::toolCallCount() const
{
    auto n = std::size_t { 0 };
    for (auto const& t: turns)
        n += t.call.has_value();
    return n;
}

std::vector<int> Trajectory::expandedPages() const
{
    auto pages = std::vector<int> {};
    for (auto const& t: turns)
        if (t.expanded && t.call)
            pages.push_back(t.call->imageIndex);
    return pages;
}

void to_json(nlohmann::json& j, TurnRecord const& turn)
{
    j = { { "turn", turn.turn }, { "reply", turn.reply }, { "reasoning", turn.reasoning }, { "expanded", turn.expanded } };
    j["tool_call"] = turn.call ? nlohmann::json { { "name", toString(turn.call->name) }, { "image", turn.call->imageIndex } }
                               : nlohmann::json(nullptr);
    j["tool_response"] = turn.toolResponse ? nlohmann::json(*turn.toolResponse) : nlohmann::json(nullptr);
    if (!turn.warnings.empty())
        j["warnings"] = turn.warnings;
}

void from_json(nlohmann::json const& j, TurnRecord& turn)
{
    turn.turn = j.at("turn").get<int>();
    turn.reply = j.at("reply").get<std::string>();
    turn.reasoning = j.value("reasoning", std::string {});
    turn.expanded = j.value("expanded", false);
    turn.call.reset();
    if (auto const& c = j.at("tool_call"); !c.is_null())
    {
        auto const name = c.at("name").get<std::string>();
        if (name != "read_text" && name != "zoom_in")
            throw InputError("unknown tool '" + name + "' in trajectory");
        turn.call = ToolCall { .name = name == "zoom_in" ? ToolName::ZoomIn : ToolName::ReadText,
                               .imageIndex = c.at("image").get<int>() };
    }
    turn.toolResponse.reset();
    if (auto const& r = j.at("tool_response"); !r.is_null())
        turn.toolResponse = r.get<std::string>();
    turn.warnings = j.value("warnings", std::vector<std::string> {});
}

void to_json(nlohmann::json& j, Trajectory const& t)
{
    j = {
        { "id", t.sampleId },
        { "dataset", t.dataset },
        { "question", t.question },
        { "preset", t.preset },
        { "expand_kind", toString(t.expandKind) },
        { "page_count", t.pageCount },
        { "max_turns", t.maxTurns },
        { "status", toString(t.status) },
        { "final_answer", t.finalAnswer },
        { "tool_calls", t.toolCallCount() },
        { "expanded_pages", t.expandedPages() },
        { "ledger", t.ledger },
        { "turns", t.turns },
        { "messages", t.messages },
    };
    if (t.status == EpisodeStatus::ProtocolError)
    {
        j["error"] = t.error;
        j["error_status"] = t.errorStatus;
    }
}

void from_json(nlohmann::json const& j, Trajectory& t)
{
    t.sampleId = j.at("id").get<std::string>();
    t.dataset = j.value("dataset", std::string {});
    t.question = j.at("question").get<std::string>();
    t.preset = j.value("preset", std::string {});
    t.expandKind = expandKindFromString(j.at("expand_kind").get<std::string>());
    t.pageCount = j.at("page_count").get<int>();
    t.maxTurns = j.value("max_turns", 6);
    t.status = episodeStatusFromString(j.at("status").get<std::string>());
    t.finalAnswer = j.at("final_answer").get<std::string>();
    t.ledger = j.at("ledger").get<TokenLedger>();
    t.turns = j.at("turns").get<std::vector<TurnRecord>>();
    t.messages = j.at("messages").get<std::vector<ChatMessage>>();
    t.error = j.value("error", std::string {});
    t.errorStatus = j.value("error_status", 0);
}

} // namespace pagezip

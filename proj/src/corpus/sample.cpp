// SPDX-License-Identifier: Apache-2.0
#include <pagezip/corpus/sample.hpp>
#include <pagezip/error.hpp>

#include <algorithm>
#include <fstream>

namespace pagezip
{

namespace
{

bool sliceHasAnswer(std::string_view slice, std::vector<std::string> const& answers)
{
    return std::ranges::any_of(answers, [&](auto const& a) { return !a.empty() && containsFolded(slice, a); });
}

std::size_t codepointsIn(std::string_view utf8)
{
    return static_cast<std::size_t>(std::ranges::count_if(utf8, [](char c) { return (static_cast<unsigned char>(c) & 0xC0) != 0x80; }));
}

} // namespace

void validateSample(Sample const& sample)
{
    if (sample.id.empty())
        throw InputError("sample has an empty id");
    if (sample.hopCount < 1)
        throw InputError("sample " + sample.id + ": hop_count must be at least 1");
    auto const text = SourceText(sample.document);
    for (auto const& span: sample.spans)
    {
        if (span.begin > span.end || span.end > text.size())
            throw InputError("sample " + sample.id + ": span [" + std::to_string(span.begin) + ", "
                             + std::to_string(span.end) + ") is outside the document");
        if (!sliceHasAnswer(text.slice(span), sample.answers))
            throw InputError("sample " + sample.id + ": span [" + std::to_string(span.begin) + ", "
                             + std::to_string(span.end) + ") does not contain a gold answer");
    }
}

std::vector<CharSpan> locateAnswerSpans(std::string const& document, std::vector<std::string> const& answers)
{
    auto const folded = foldCase(document);
    auto spans = std::vector<CharSpan> {};
    for (auto const& answer: answers)
    {
        if (answer.empty())
            continue;
        // ASCII folding keeps byte offsets, so the byte hit maps straight back.
        auto const at = folded.find(foldCase(answer));
        if (at == std::string::npos)
            continue;
        auto const begin = codepointsIn(std::string_view(document).substr(0, at));
        auto const span = CharSpan { begin, begin + codepointsIn(answer) };
        if (std::ranges::find(spans, span) == spans.end())
            spans.push_back(span);
    }
    return spans;
}

Sample sampleFromJson(nlohmann::json const& j)
{
    auto s = Sample {};
    if (!j.is_object())
        throw InputError("sample must be a JSON object");
    try
    {
        auto const& id = j.at("id");
        s.id = id.is_string() ? id.get<std::string>() : id.dump();
        s.question = j.at("question").get<std::string>();
        auto const& answers = j.at("answers");
        s.answers = answers.is_string() ? std::vector { answers.get<std::string>() } : answers.get<std::vector<std::string>>();
        s.document = j.at("document").get<std::string>();
        s.hopCount = j.value("hop_count", 1);
        s.dataset = j.value("dataset", std::string {});
        if (j.contains("num_tokens") && !j["num_tokens"].is_null())
            s.numTokens = j["num_tokens"].get<std::int64_t>();
        if (j.contains("spans") && !j["spans"].is_null())
        {
            for (auto const& span: j["spans"])
            {
                if (!span.is_array() || span.size() != 2)
                    throw InputError("sample " + s.id + ": each span must be [start, end]");
                auto const b = span[0].get<std::int64_t>();
                auto const e = span[1].get<std::int64_t>();
                if (b < 0 || e < b)
                    throw InputError("sample " + s.id + ": span [" + std::to_string(b) + ", " + std::to_string(e) + ") is invalid");
                s.spans.push_back({ static_cast<std::size_t>(b), static_cast<std::size_t>(e) });
            }
        }
        else
            s.spans = locateAnswerSpans(s.document, s.answers);
    }
    catch (nlohmann::json::exception const& e)
    {
        throw InputError(std::string("malformed sample: ") + e.what());
    }
    validateSample(s);
    return s;
}

nlohmann::json sampleToJson(Sample const& s)
{
    auto spans = nlohmann::json::array();
    for (auto const& span: s.spans)
        spans.push_back({ span.begin, span.end });
    auto j = nlohmann::json {
        { "id", s.id },           { "question", s.question },    { "answers", s.answers }, { "document", s.document },
        { "spans", spans },       { "hop_count", s.hopCount },   { "dataset", s.dataset },
    };
    if (s.numTokens)
        j["num_tokens"] = *s.numTokens;
    return j;
}

std::vector<Sample> parseSamplesJsonl(std::istream& in, std::string const& sourceName)
{
    auto samples = std::vector<Sample> {};
    auto line = std::string {};
    auto lineNo = 0;
    while (std::getline(in, line))
    {
        ++lineNo;
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        auto const j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded())
            throw InputError(sourceName + ":" + std::to_string(lineNo) + ": invalid JSON");
        try
        {
            samples.push_back(sampleFromJson(j));
        }
        catch (InputError const& e)
        {
            throw InputError(sourceName + ":" + std::to_string(lineNo) + ": " + e.what());
        }
    }
    return samples;
}

std::vector<Sample> readSamplesJsonl(std::filesystem::path const& path)
{
    auto in = std::ifstream(path);
    if (!in)
        throw InputError("cannot read '" + path.string() + "'");
    return parseSamplesJsonl(in, path.string());
}

std::set<int> mapSpansToPages(std::span<CharSpan const> spans, PageSet const& pages)
{
    auto result = std::set<int> {};
    for (auto const& span: spans)
    {
        if (span.begin > span.end || span.end > pages.sourceCharCount)
            throw RangeError("span [" + std::to_string(span.begin) + ", " + std::to_string(span.end)
                             + ") is outside [0, " + std::to_string(pages.sourceCharCount) + ")");
        if (span.empty())
            continue;
        // First page whose span ends after span.begin; walk while pages start before span.end.
        auto it = std::ranges::upper_bound(pages.pages, span.begin, {}, [](Page const& p) { return p.charSpan.end; });
        for (; it != pages.pages.end() && it->charSpan.begin < span.end; ++it)
            if (it->charSpan.intersects(span))
                result.insert(it->index);
    }
    return result;
}

bool evidenceSound(Sample const& sample, SourceText const& text, PageSet const& pages, std::set<int> const& evidence)
{
    for (auto const& span: sample.spans)
    {
        if (span.empty())
            continue;
        auto const covering = mapSpansToPages(std::span(&span, 1), pages);
        if (covering.empty())
            return false;
        if (!std::ranges::all_of(covering, [&](int k) { return evidence.contains(k); }))
            return false;
        auto const joined = CharSpan { pages.page(*covering.begin()).charSpan.begin, pages.page(*covering.rbegin()).charSpan.end };
        if (!sliceHasAnswer(text.slice(joined), sample.answers))
            return false;
    }
    return true;
}

} // namespace pagezip

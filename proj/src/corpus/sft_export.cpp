// SPDX-License-Identifier: Apache-2.0
#include <pagezip/corpus/sft_export.hpp>
#include <pagezip/error.hpp>

#include <istream>
#include <ostream>

namespace pagezip
{

nlohmann::json toSftRecord(Trajectory const& trajectory)
{
    auto messages = nlohmann::json::array();
    auto images = nlohmann::json::array();
    for (auto const& m: trajectory.messages)
    {
        auto content = std::string {};
        for (auto const& p: m.parts)
        {
            if (p.kind == ContentPart::Kind::Image)
            {
                content += ImagePlaceholder;
                images.push_back(p.text);
            }
            else
                content += p.text;
        }
        messages.push_back({ { "role", toString(m.role) },
                             { "content", std::move(content) },
                             { "loss", m.loss == LossFlag::ModelProduced } });
    }
    return { { "id", trajectory.sampleId },
             { "dataset", trajectory.dataset },
             { "messages", std::move(messages) },
             { "images", std::move(images) } };
}

Trajectory fromSftRecord(nlohmann::json const& record)
{
    auto t = Trajectory {};
    try
    {
        t.sampleId = record.at("id").get<std::string>();
        t.dataset = record.value("dataset", std::string {});
        auto const images = record.at("images").get<std::vector<std::string>>();
        auto nextImage = std::size_t { 0 };
        for (auto const& m: record.at("messages"))
        {
            auto message = ChatMessage {};
            message.role = roleFromString(m.at("role").get<std::string>());
            message.loss = m.at("loss").get<bool>() ? LossFlag::ModelProduced : LossFlag::ContextOnly;
            auto const content = m.at("content").get<std::string>();
            auto pos = std::size_t { 0 };
            while (true)
            {
                auto const at = content.find(ImagePlaceholder, pos);
                auto const text = content.substr(pos, at == std::string::npos ? std::string::npos : at - pos);
                if (!text.empty() || (at == std::string::npos && message.parts.empty()))
                    message.parts.push_back(ContentPart::makeText(text));
                if (at == std::string::npos)
                    break;
                if (nextImage >= images.size())
                    throw InputError("record " + t.sampleId + " has more <image> placeholders than images");
                message.parts.push_back(ContentPart::makeImage(images[nextImage++]));
                pos = at + ImagePlaceholder.size();
            }
            t.messages.push_back(std::move(message));
        }
        if (nextImage != images.size())
            throw InputError("record " + t.sampleId + " lists more images than placeholders");
    }
    catch (nlohmann::json::exception const& e)
    {
        throw InputError(std::string("malformed SFT record: ") + e.what());
    }
    return t;
}

ExportReport exportSftDataset(std::span<Trajectory const> trajectories, std::ostream& out)
{
    auto report = ExportReport {};
    for (auto const& t: trajectories)
    {
        if (t.status == EpisodeStatus::ProtocolError)
        {
            ++report.skippedProtocolError;
            continue;
        }
        out << toSftRecord(t).dump() << '\n';
        ++report.written;
    }
    return report;
}

std::vector<Trajectory> importSftDataset(std::istream& in)
{
    auto result = std::vector<Trajectory> {};
    auto line = std::string {};
    auto lineNo = 0;
    while (std::getline(in, line))
    {
        ++lineNo;
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        auto const j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded())
            throw InputError("SFT line " + std::to_string(lineNo) + ": invalid JSON");
        try
        {
            result.push_back(fromSftRecord(j));
        }
        catch (InputError const& e)
        {
            throw InputError("SFT line " + std::to_string(lineNo) + ": " + e.what());
        }
    }
    return result;
}

} // namespace pagezip

// SPDX-License-Identifier: Apache-2.0
#include <pagezip/error.hpp>
#include <pagezip/protocol/episode.hpp>
#include <pagezip/protocol/prompts.hpp>
#include <pagezip/render/encoder.hpp>
#include <pagezip/render/manifest.hpp>
#include <pagezip/util/parallel.hpp>

#include <cmath>

namespace pagezip
{

namespace
{

std::string imageNumberFormat(ToolName tool)
{
    return "<tool_call>{\"name\": \"" + std::string(toString(tool)) + "\", \"arguments\": {\"image\": IMAGE_NUMBER}}</tool_call>";
}

std::string textPrefix(int k)
{
    return "Text content of Image " + std::to_string(k) + ":\n";
}

} // namespace

void EpisodeConfig::validate() const
{
    if (maxTurns < 1)
        throw InputError("max_turns must be at least 1");
    if (maxTokens < 1)
        throw InputError("max_tokens must be at least 1");
    if (!(temperature >= 0))
        throw InputError("temperature must be non-negative");
    if (!(zoom.scale > 0) || zoom.minPixels < 1 || zoom.maxPixels < zoom.minPixels)
        throw InputError("zoom limits must satisfy scale > 0 and 1 <= min_pixels <= max_pixels");
}

std::shared_ptr<RenderedDocument const> makeRenderedDocument(std::string id, std::string text, RenderPreset const& preset,
                                                             std::shared_ptr<GlyphMetrics const> metrics,
                                                             TokenCounter const& counter,
                                                             std::optional<std::int64_t> injectedTokens,
                                                             EncoderProfile const& encoder, bool encodePngs)
{
    auto doc = std::make_shared<RenderedDocument>();
    doc->id = std::move(id);
    doc->sourceTokens = injectedTokens ? *injectedTokens : counter.count(text);
    doc->text = std::make_shared<SourceText const>(std::move(text));
    doc->pages = std::make_shared<PageSet const>(
        renderPages(*doc->text, preset, *metrics, RenderOptions { .encoder = encoder, .rasterize = encodePngs }));
    doc->metrics = std::move(metrics);
    if (encodePngs)
        for (auto const& page: doc->pages->pages)
            doc->pagePngs.push_back(std::make_shared<std::string const>(encodePng(*page.raster)));
    return doc;
}

std::string pageImageRef(std::string const& docId, int k)
{
    return docId + "/" + pageFileName(k);
}

std::string zoomImageRef(std::string const& docId, int k)
{
    auto name = pageFileName(k);
    name.replace(0, 4, "zoom");
    return docId + "/" + name;
}

double clampedZoomScale(int width, int height, ZoomLimits const& limits)
{
    auto const area = static_cast<double>(width) * static_cast<double>(height);
    auto scale = limits.scale;
    auto const pixels = [&](double s) {
        return static_cast<double>(std::max(1L, std::lround(width * s))) * static_cast<double>(std::max(1L, std::lround(height * s)));
    };
    if (pixels(scale) > static_cast<double>(limits.maxPixels))
    {
        scale = std::sqrt(static_cast<double>(limits.maxPixels) / area);
        // Rounding each axis can overshoot by a pixel row; shrink until it fits.
        while (scale > 0 && pixels(scale) > static_cast<double>(limits.maxPixels))
            scale *= 0.999;
    }
    else if (pixels(scale) < static_cast<double>(limits.minPixels))
    {
        scale = std::sqrt(static_cast<double>(limits.minPixels) / area);
        while (pixels(scale) < static_cast<double>(limits.minPixels))
            scale *= 1.001;
    }
    return scale;
}

ExpandResponse expand(RenderedDocument const& doc, ToolCall const& call, ExpandKind kind, EpisodeConfig const& config,
                      TokenCounter const& counter, OcrEndpoint* ocr)
{
    auto response = ExpandResponse {};
    response.kind = kind;
    auto const pageCount = static_cast<int>(doc.pages->pageCount());
    auto const k = call.imageIndex;
    if (k < 1 || k > pageCount)
    {
        response.payload.push_back(ContentPart::makeText("invalid image index " + std::to_string(k)
                                                         + "; images are numbered 1 to " + std::to_string(pageCount)));
        return response;
    }

    auto const& page = doc.pages->page(k);
    response.ok = true;
    switch (kind)
    {
        case ExpandKind::SourceText:
        {
            auto const slice = doc.text->slice(page.charSpan);
            response.tokenCost = std::max<std::int64_t>(1, counter.count(slice));
            response.payload.push_back(ContentPart::makeText(textPrefix(k) + std::string(slice)));
            break;
        }
        case ExpandKind::OcrText:
        {
            if (!ocr)
                throw EndpointError("ocr_text expansion needs an OCR endpoint");
            auto const scale = clampedZoomScale(page.width, page.height, config.zoom);
            auto const png = encodePng(rasterizePage(page, *doc.text, doc.pages->preset, *doc.metrics, scale));
            auto const text = ocr->recognize(png);
            response.tokenCost = std::max<std::int64_t>(1, counter.count(text));
            response.payload.push_back(ContentPart::makeText(textPrefix(k) + text));
            break;
        }
        case ExpandKind::ImageZoom:
        {
            auto const scale = clampedZoomScale(page.width, page.height, config.zoom);
            auto raster = rasterizePage(page, *doc.text, doc.pages->preset, *doc.metrics, scale);
            response.width = raster.width;
            response.height = raster.height;
            response.tokenCost = computeVisualTokens(raster.width, raster.height, doc.pages->encoder);
            response.payload.push_back(ContentPart::makeText("Image " + std::to_string(k) + " at full resolution:"));
            response.payload.push_back(
                ContentPart::makeImage(zoomImageRef(doc.id, k), std::make_shared<std::string const>(encodePng(raster))));
            break;
        }
    }
    return response;
}

std::vector<ChatMessage> initialMessages(RenderedDocument const& doc, std::string const& question, ExpandKind kind)
{
    auto messages = std::vector<ChatMessage> {};
    auto const system = kind == ExpandKind::ImageZoom ? zoomInSystemPrompt() : readTextSystemPrompt();
    messages.push_back(ChatMessage::makeText(Role::System, std::string(system)));

    auto parts = std::vector<ContentPart> {};
    for (auto const& page: doc.pages->pages)
    {
        parts.push_back(ContentPart::makeText(imageLabel(page.index)));
        auto png = static_cast<std::size_t>(page.index) <= doc.pagePngs.size() ? doc.pagePngs[page.index - 1] : nullptr;
        parts.push_back(ContentPart::makeImage(pageImageRef(doc.id, page.index), std::move(png)));
    }
    auto q = questionText(question);
    if (parts.empty())
        q.erase(0, 1); // no leading newline without images
    parts.push_back(ContentPart::makeText(std::move(q)));
    messages.push_back(ChatMessage::make(Role::User, std::move(parts)));
    return messages;
}

Trajectory runEpisode(RenderedDocument const& doc, std::string const& question, EpisodeConfig const& config,
                      ChatEndpoint& model, TokenCounter const& counter, OcrEndpoint* ocr)
{
    config.validate();
    auto t = Trajectory {};
    t.sampleId = doc.id;
    t.question = question;
    t.preset = doc.pages->preset.name;
    t.expandKind = config.expandKind;
    t.pageCount = static_cast<int>(doc.pages->pageCount());
    t.maxTurns = config.maxTurns;
    t.ledger = TokenLedger(doc.sourceTokens, doc.pages->totalVisualTokens());
    t.messages = initialMessages(doc, question, config.expandKind);
    t.status = EpisodeStatus::BudgetExhausted;

    auto const tool = toolFor(config.expandKind);
    for (auto turn = 1; turn <= config.maxTurns; ++turn)
    {
        auto reply = std::string {};
        try
        {
            reply = model.complete(ChatRequest { .messages = t.messages,
                                                 .temperature = config.temperature,
                                                 .maxTokens = config.maxTokens,
                                                 .seed = config.seed });
        }
        catch (EndpointError const& e)
        {
            t.status = EpisodeStatus::ProtocolError;
            t.error = e.what();
            t.errorStatus = e.httpStatus();
            return t;
        }

        t.messages.push_back(ChatMessage::makeText(Role::Assistant, reply));
        auto parsed = parseModelTurn(reply);
        auto record = TurnRecord {};
        record.turn = turn;
        record.reply = reply;
        record.reasoning = std::move(parsed.reasoning);
        record.warnings = std::move(parsed.warnings);

        if (auto const* answer = std::get_if<FinalAnswer>(&parsed.action))
        {
            t.finalAnswer = answer->text;
            t.status = EpisodeStatus::Answered;
            t.turns.push_back(std::move(record));
            return t;
        }

        auto toolParts = std::vector<ContentPart> {};
        if (auto const* call = std::get_if<ToolCall>(&parsed.action))
        {
            record.call = *call;
            if (turn == config.maxTurns)
            {
                record.warnings.push_back("turn budget exhausted; tool call not executed");
                t.turns.push_back(std::move(record));
                break;
            }
            if (call->name != tool)
                toolParts.push_back(ContentPart::makeText("unknown tool " + std::string(toString(call->name))
                                                          + "; the available tool is " + std::string(toString(tool))));
            else
            {
                try
                {
                    auto response = expand(doc, *call, config.expandKind, config, counter, ocr);
                    if (response.ok)
                    {
                        t.ledger.append({ .turn = turn,
                                          .kind = config.expandKind == ExpandKind::SourceText ? ExpansionKind::Text
                                                  : config.expandKind == ExpandKind::OcrText  ? ExpansionKind::OcrText
                                                                                              : ExpansionKind::Image,
                                          .tokens = response.tokenCost,
                                          .imageIndex = call->imageIndex });
                        record.expanded = true;
                    }
                    toolParts = std::move(response.payload);
                }
                catch (EndpointError const& e)
                {
                    t.turns.push_back(std::move(record));
                    t.status = EpisodeStatus::ProtocolError;
                    t.error = std::string("expand failed: ") + e.what();
                    t.errorStatus = e.httpStatus();
                    return t;
                }
            }
        }
        else
        {
            auto const& error = std::get<ParseError>(parsed.action);
            if (turn == config.maxTurns)
            {
                record.warnings.push_back("malformed tool call on the last turn: " + error.message);
                t.turns.push_back(std::move(record));
                break;
            }
            toolParts.push_back(ContentPart::makeText("invalid tool call (" + error.message + "). Use the format "
                                                      + imageNumberFormat(tool)));
        }

        auto message = ChatMessage::make(Role::Tool, std::move(toolParts));
        record.toolResponse = message.text();
        t.messages.push_back(std::move(message));
        t.turns.push_back(std::move(record));
    }
    return t;
}

std::vector<Trajectory> runEpisodes(std::span<EpisodeJob const> jobs, EpisodeConfig const& config,
                                    ChatEndpointFactory const& modelFactory, TokenCounter const& counter,
                                    OcrEndpointFactory const& ocrFactory, int parallelism)
{
    config.validate();
    auto results = std::vector<Trajectory>(jobs.size());
    parallelFor(jobs.size(), parallelism, [&](std::size_t i) {
        auto const& job = jobs[i];
        auto context = job.context;
        if (context.sampleId.empty())
            context.sampleId = job.doc->id;
        context.pageCount = static_cast<int>(job.doc->pages->pageCount());
        auto model = modelFactory(context);
        auto ocr = ocrFactory ? ocrFactory() : nullptr;
        results[i] = runEpisode(*job.doc, job.question, config, *model, counter, ocr.get());
        results[i].dataset = job.dataset;
    });
    return results;
}

} // namespace pagezip

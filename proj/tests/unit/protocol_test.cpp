// SPDX-License-Identifier: Apache-2.0
#include "../support/documents.hpp"

#include <pagezip/error.hpp>
#include <pagezip/protocol/endpoints.hpp>
#include <pagezip/protocol/episode.hpp>
#include <pagezip/protocol/prompts.hpp>
#include <pagezip/protocol/tool_call.hpp>
#include <pagezip/render/encoder.hpp>

#include <doctest.h>

#define CPPHTTPLIB_OPENSSL_SUPPORT // must match the library build
#include <httplib.h>

#include <cstdlib>
#include <random>
#include <thread>

using namespace pagezip;
using namespace pagezip::testing;

namespace
{

std::string call(std::string_view tool, int image)
{
    return "<tool_call>{\"name\": \"" + std::string(tool) + "\", \"arguments\": {\"image\": " + std::to_string(image)
           + "}}</tool_call>";
}

std::string pageSlice(RenderedDocument const& doc, int k)
{
    return std::string(doc.text->slice(doc.pages->page(k).charSpan));
}

Trajectory runScripted(RenderedDocument const& doc, std::vector<std::string> replies, EpisodeConfig config = {},
                       ScriptedEndpoint** keep = nullptr)
{
    static thread_local std::unique_ptr<ScriptedEndpoint> endpoint;
    endpoint = std::make_unique<ScriptedEndpoint>(std::move(replies));
    if (keep)
        *keep = endpoint.get();
    return runEpisode(doc, "Which page?", config, *endpoint, *defaultTokenCounter());
}

} // namespace

TEST_CASE("parser: canonical tool call with reasoning")
{
    auto const parsed = parseModelTurn("<think>look at 22</think>\n" + call("read_text", 22));
    REQUIRE(std::holds_alternative<ToolCall>(parsed.action));
    CHECK(std::get<ToolCall>(parsed.action) == ToolCall { ToolName::ReadText, 22 });
    CHECK(parsed.reasoning == "look at 22");
    CHECK(parsed.warnings.empty());
}

TEST_CASE("parser: serialize round-trips for both tools")
{
    for (auto const name: { ToolName::ReadText, ToolName::ZoomIn })
        for (auto const k: { 1, 2, 22, 29, 1000 })
        {
            auto const c = ToolCall { name, k };
            auto const parsed = parseModelTurn(serialize(c));
            REQUIRE(std::holds_alternative<ToolCall>(parsed.action));
            CHECK(std::get<ToolCall>(parsed.action) == c);
        }
    CHECK(serialize({ ToolName::ReadText, 22 })
          == R"(<tool_call>{"name": "read_text", "arguments": {"image": 22}}</tool_call>)");
}

TEST_CASE("parser: final answers")
{
    auto const a = parseModelTurn("<think>The page says so.</think>\n  pour moi \n");
    REQUIRE(std::holds_alternative<FinalAnswer>(a.action));
    CHECK(std::get<FinalAnswer>(a.action).text == "pour moi");

    auto const bare = parseModelTurn("Paris");
    CHECK(std::get<FinalAnswer>(bare.action).text == "Paris");

    CHECK(extractAnswerText("<think>a</think>x<think>b</think> y ") == "y");
    CHECK(extractAnswerText("  only text ") == "only text");
}

TEST_CASE("parser: the first tool call wins and extras are reported")
{
    auto const parsed = parseModelTurn(call("read_text", 3) + "\n" + call("read_text", 7));
    REQUIRE(std::holds_alternative<ToolCall>(parsed.action));
    CHECK(std::get<ToolCall>(parsed.action).imageIndex == 3);
    CHECK(parsed.warnings.size() == 1);
}

TEST_CASE("parser: malformed calls are parse errors carrying the block")
{
    auto const cases = std::vector<std::string> {
        "<tool_call>{\"name\": \"read_text\", \"arguments\": {\"image\": 22}}",         // unterminated
        "<tool_call>{name: read_text}</tool_call>",                                     // not JSON
        "<tool_call>[1, 2]</tool_call>",                                                // not an object
        "<tool_call>{\"arguments\": {\"image\": 2}}</tool_call>",                       // no name
        "<tool_call>{\"name\": \"search\", \"arguments\": {\"image\": 2}}</tool_call>", // unknown tool
        "<tool_call>{\"name\": \"read_text\"}</tool_call>",                             // no arguments
        "<tool_call>{\"name\": \"read_text\", \"arguments\": {\"image\": \"2\"}}</tool_call>",
        "<tool_call>{\"name\": \"read_text\", \"arguments\": {\"image\": 2.5}}</tool_call>",
        "<tool_call>{\"name\": \"read_text\", \"arguments\": {\"image\": 0}}</tool_call>",
        "<tool_call>{\"name\": \"read_text\", \"arguments\": {\"image\": -4}}</tool_call>",
        "answer</tool_call>", // stray close tag
    };
    for (auto const& reply: cases)
    {
        CAPTURE(reply);
        auto const parsed = parseModelTurn(reply);
        REQUIRE(std::holds_alternative<ParseError>(parsed.action));
        auto const& error = std::get<ParseError>(parsed.action);
        CHECK_FALSE(error.message.empty());
        CHECK(reply.find(error.offending) != std::string::npos);
    }
}

TEST_CASE("parser: a well-formed call after a malformed one is used")
{
    auto const parsed = parseModelTurn("<tool_call>{bad}</tool_call>" + call("zoom_in", 4));
    REQUIRE(std::holds_alternative<ToolCall>(parsed.action));
    CHECK(std::get<ToolCall>(parsed.action) == ToolCall { ToolName::ZoomIn, 4 });
    CHECK_FALSE(parsed.warnings.empty());
}

TEST_CASE("parser: random input never throws and truncations never yield a different call")
{
    auto rng = std::mt19937_64(99);
    auto const alphabet = std::string("<>/{}\":, tool_cal nmeargsi0123456789think\n");
    auto pick = std::uniform_int_distribution<std::size_t>(0, alphabet.size() - 1);
    for (auto i = 0; i < 2000; ++i)
    {
        auto s = std::string {};
        auto const n = std::uniform_int_distribution<int>(0, 80)(rng);
        for (auto j = 0; j < n; ++j)
            s += alphabet[pick(rng)];
        CHECK_NOTHROW((void) parseModelTurn(s));
    }
    auto const full = call("read_text", 22);
    for (auto cut = std::size_t { 0 }; cut < full.size(); ++cut)
    {
        auto const parsed = parseModelTurn(full.substr(0, cut));
        if (auto const* c = std::get_if<ToolCall>(&parsed.action))
            CHECK(*c == ToolCall { ToolName::ReadText, 22 });
    }
}

TEST_CASE("prompts: system prompts name their tool and the judge template is filled in order")
{
    CHECK(readTextSystemPrompt().find("read_text") != std::string_view::npos);
    CHECK(zoomInSystemPrompt().find("zoom_in") != std::string_view::npos);
    auto const filled = judgePrompt("Q?", { "a", "b" }, "ans");
    CHECK(filled.find("{question}") == std::string::npos);
    auto const q = filled.find("Q?");
    auto const g = filled.find("a\nb");
    auto const m = filled.find("ans", g + 3);
    CHECK(q < g);
    CHECK(g < m);
    CHECK(m != std::string::npos);
    CHECK(imageLabel(1) == "Image 1:");
    CHECK(imageLabel(2) == "\nImage 2:");
}

TEST_CASE("episode: initial context alternates labels and pages, then the question")
{
    auto const doc = gridDocument("d", gridText(3));
    REQUIRE(doc->pages->pageCount() == 3);
    auto const messages = initialMessages(*doc, "Which page?", ExpandKind::SourceText);
    REQUIRE(messages.size() == 2);
    CHECK((messages[0].role == Role::System));
    CHECK(messages[0].text() == std::string(readTextSystemPrompt()));
    CHECK((messages[1].role == Role::User));
    CHECK(messages[1].imageCount() == 3);
    CHECK(messages[1].parts.back().text == "\nQuestion: Which page?");
    CHECK(messages[1].parts[1].text == pageImageRef("d", 1));
}

TEST_CASE("episode: immediate answer leaves the ledger at ICR")
{
    auto const doc = gridDocument("d", gridText(4), 1000);
    auto const t = runScripted(*doc, { "<think>easy</think>\np02" });
    CHECK((t.status == EpisodeStatus::Answered));
    CHECK(t.finalAnswer == "p02");
    CHECK(t.turns.size() == 1);
    CHECK(t.toolCallCount() == 0);
    CHECK(t.ledger.expansions().empty());
    CHECK(ecr(t.ledger) == icr(t.ledger));
}

TEST_CASE("episode: one expansion is charged the page text and conditions the next turn")
{
    auto const doc = gridDocument("d", gridText(4));
    ScriptedEndpoint* endpoint = nullptr;
    auto const t = runScripted(*doc, { call("read_text", 2), "p02" }, {}, &endpoint);
    REQUIRE((t.status == EpisodeStatus::Answered));
    CHECK(t.toolCallCount() == 1);
    REQUIRE(t.ledger.expansions().size() == 1);
    auto const slice = pageSlice(*doc, 2);
    CHECK(slice.find("p02l0") != std::string::npos);
    CHECK(t.ledger.expansions()[0].tokens == defaultTokenCounter()->count(slice));
    CHECK(t.ledger.expansions()[0].imageIndex == 2);
    CHECK(t.ledger.readerTotal() == doc->pages->totalVisualTokens() + defaultTokenCounter()->count(slice));
    CHECK(t.expandedPages() == std::vector<int> { 2 });

    REQUIRE(endpoint->requests().size() == 2);
    auto const& second = endpoint->requests()[1].messages;
    REQUIRE(second.size() == 4);
    CHECK((second[2].role == Role::Assistant));
    CHECK((second[3].role == Role::Tool));
    CHECK(second[3].text() == "Text content of Image 2:\n" + slice);
    CHECK(second[3].loss == LossFlag::ContextOnly);
    CHECK(second[2].loss == LossFlag::ModelProduced);
}

TEST_CASE("episode: turn cap T=6 allows at most five expansions")
{
    auto const doc = gridDocument("d", gridText(8));
    auto endpoint = AlwaysExpandEndpoint("read_text", 8);
    auto const t = runEpisode(*doc, "q", {}, endpoint, *defaultTokenCounter());
    CHECK((t.status == EpisodeStatus::BudgetExhausted));
    CHECK(t.turns.size() == 6);
    CHECK(t.ledger.expansions().size() == 5);
    CHECK(t.toolCallCount() == 6);
    CHECK_FALSE(t.turns.back().expanded);
    CHECK_FALSE(t.turns.back().toolResponse);
    CHECK(t.finalAnswer.empty());
}

TEST_CASE("episode: smaller caps scale the same way")
{
    auto const doc = gridDocument("d", gridText(8));
    for (auto cap = 1; cap <= 8; ++cap)
    {
        auto endpoint = AlwaysExpandEndpoint("read_text", 8);
        auto config = EpisodeConfig {};
        config.maxTurns = cap;
        auto const t = runEpisode(*doc, "q", config, endpoint, *defaultTokenCounter());
        CHECK(t.turns.size() == static_cast<std::size_t>(cap));
        CHECK(t.ledger.expansions().size() == static_cast<std::size_t>(cap - 1));
    }
}

TEST_CASE("episode: two calls in one reply expand once")
{
    auto const doc = gridDocument("d", gridText(4));
    auto const t = runScripted(*doc, { call("read_text", 1) + call("read_text", 3), "x" });
    REQUIRE(t.ledger.expansions().size() == 1);
    CHECK(t.ledger.expansions()[0].imageIndex == 1);
    CHECK(t.turns[0].warnings.size() == 1);
}

TEST_CASE("episode: invalid index consumes the turn without charging")
{
    auto const doc = gridDocument("d", gridText(4));
    auto const t = runScripted(*doc, { call("read_text", 9), "x" });
    CHECK((t.status == EpisodeStatus::Answered));
    CHECK(t.ledger.expansions().empty());
    CHECK(t.toolCallCount() == 1);
    REQUIRE(t.turns[0].toolResponse);
    CHECK(t.turns[0].toolResponse->find("invalid image index 9") != std::string::npos);
    CHECK_FALSE(t.turns[0].expanded);
}

TEST_CASE("episode: wrong tool and malformed calls get corrective tool messages")
{
    auto const doc = gridDocument("d", gridText(4));
    auto const t = runScripted(*doc, { call("zoom_in", 2), "<tool_call>{oops}</tool_call>", "x" });
    CHECK((t.status == EpisodeStatus::Answered));
    CHECK(t.ledger.expansions().empty());
    REQUIRE(t.turns.size() == 3);
    CHECK(t.turns[0].toolResponse->find("unknown tool zoom_in") != std::string::npos);
    CHECK(t.turns[1].toolResponse->find("invalid tool call") != std::string::npos);
    CHECK(t.toolCallCount() == 1);
}

TEST_CASE("episode: endpoint failures end in protocol_error with the partial record")
{
    auto const doc = gridDocument("d", gridText(4));
    auto failing = FailingEndpoint(401);
    auto const a = runEpisode(*doc, "q", {}, failing, *defaultTokenCounter());
    CHECK((a.status == EpisodeStatus::ProtocolError));
    CHECK(a.errorStatus == 401);
    CHECK(a.turns.empty());

    auto const b = runScripted(*doc, { call("read_text", 1) });
    CHECK((b.status == EpisodeStatus::ProtocolError));
    CHECK(b.turns.size() == 1);
    CHECK(b.ledger.expansions().size() == 1);
}

TEST_CASE("episode: zoom is charged the visual tokens of the enlarged page")
{
    auto const doc = gridDocument("d", gridText(2));
    auto config = EpisodeConfig {};
    config.expandKind = ExpandKind::ImageZoom;
    auto const r = expand(*doc, { ToolName::ZoomIn, 1 }, ExpandKind::ImageZoom, config, *defaultTokenCounter());
    CHECK(r.ok);
    CHECK(r.width == 64 * 3);
    CHECK(r.height == 36 * 3);
    CHECK(r.tokenCost == computeVisualTokens(r.width, r.height, defaultEncoder()));
    REQUIRE(r.payload.size() == 2);
    CHECK(r.payload[1].kind == ContentPart::Kind::Image);
    CHECK(r.payload[1].png);

    config.zoom.maxPixels = 64 * 36 * 4;
    CHECK(clampedZoomScale(64, 36, config.zoom) == doctest::Approx(2.0));
}

TEST_CASE("episode: OCR expansion goes through the OCR endpoint")
{
    auto const doc = gridDocument("d", gridText(2));
    auto config = EpisodeConfig {};
    config.expandKind = ExpandKind::OcrText;
    auto ocr = makeOcrEndpointFactory({ .url = "mock:text:recognised words" })();
    auto const r = expand(*doc, { ToolName::ReadText, 2 }, ExpandKind::OcrText, config, *defaultTokenCounter(), ocr.get());
    CHECK(r.ok);
    CHECK(r.payload.front().text == "Text content of Image 2:\nrecognised words");
    CHECK(r.tokenCost == defaultTokenCounter()->count("recognised words"));
    CHECK_THROWS_AS((void) expand(*doc, { ToolName::ReadText, 2 }, ExpandKind::OcrText, config, *defaultTokenCounter()),
                    EndpointError);
}

TEST_CASE("episode: batches keep input order regardless of parallelism")
{
    auto jobs = std::vector<EpisodeJob> {};
    for (auto i = 0; i < 12; ++i)
    {
        auto job = EpisodeJob {};
        job.doc = gridDocument("doc" + std::to_string(i), gridText(2 + i % 5));
        job.question = "q" + std::to_string(i);
        job.dataset = i % 2 ? "odd" : "even";
        job.context = EpisodeContext { .sampleId = job.doc->id,
                                       .goldAnswers = { "p01" },
                                       .evidencePages = { 1 },
                                       .pageCount = static_cast<int>(job.doc->pages->pageCount()) };
        jobs.push_back(std::move(job));
    }
    auto const factory = makeChatEndpointFactory({ .url = "mock:oracle" });
    auto const serial = runEpisodes(jobs, {}, factory, *defaultTokenCounter(), {}, 1);
    auto const parallel = runEpisodes(jobs, {}, factory, *defaultTokenCounter(), {}, 4);
    REQUIRE(serial.size() == jobs.size());
    CHECK(serial == parallel);
    for (auto i = std::size_t { 0 }; i < jobs.size(); ++i)
    {
        CHECK(serial[i].sampleId == jobs[i].doc->id);
        CHECK(serial[i].dataset == jobs[i].dataset);
        CHECK(serial[i].finalAnswer == "p01");
        CHECK(serial[i].expandedPages() == std::vector<int> { 1 });
    }
}

TEST_CASE("episode: the single-hop derby trace replays end to end")
{
    auto const& derby = derbyDocument();
    CHECK(derby.doc->pages->pageCount() == 29);
    auto endpoint = ScriptedEndpoint({ derbyToolTurn(), derbyAnswerTurn() });
    auto const t = runEpisode(*derby.doc, std::string(DerbyQuestion), {}, endpoint, *defaultTokenCounter());
    REQUIRE(t.turns.size() == 2);
    CHECK(t.turns[0].call == ToolCall { ToolName::ReadText, 22 });
    REQUIRE(t.turns[0].toolResponse);
    CHECK(t.turns[0].toolResponse->rfind("Text content of Image 22:\n", 0) == 0);
    CHECK(t.turns[0].toolResponse->find("Pour Moi") != std::string::npos);
    CHECK(t.finalAnswer == "pour moi");
    CHECK(endpoint.requests().size() == 2);
}

TEST_CASE("http: chat body, auth header and reasoning folding against a local server")
{
    auto server = httplib::Server {};
    auto lastBody = std::string {};
    auto lastAuth = std::string {};
    server.Post("/v1/chat/completions", [&](httplib::Request const& req, httplib::Response& res) {
        lastBody = req.body;
        lastAuth = req.get_header_value("Authorization");
        if (lastAuth != "Bearer sekrit")
        {
            res.status = 401;
            res.set_content(R"({"error": "unauthorized"})", "application/json");
            return;
        }
        res.set_content(R"({"choices": [{"message": {"content": "pour moi", "reasoning_content": "thinking"}}]})",
                        "application/json");
    });
    server.Post("/ocr", [](httplib::Request const&, httplib::Response& res) {
        res.set_content(R"({"text": "scanned"})", "application/json");
    });
    auto const port = server.bind_to_any_port("127.0.0.1");
    auto thread = std::thread([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    ::setenv("PAGEZIP_TEST_KEY", "sekrit", 1);
    auto const base = "http://127.0.0.1:" + std::to_string(port);
    auto endpoint = HttpChatEndpoint({ .url = base + "/v1/chat/completions", .model = "m", .apiKeyEnv = "PAGEZIP_TEST_KEY" });

    auto request = ChatRequest {};
    request.messages.push_back(ChatMessage::makeText(Role::System, "sys"));
    request.messages.push_back(ChatMessage::make(
        Role::User, { ContentPart::makeText("Image 1:"),
                      ContentPart::makeImage("d/page_0001.png", std::make_shared<std::string const>("PNGDATA")) }));
    request.messages.push_back(ChatMessage::makeText(Role::Assistant, call("read_text", 1)));
    request.messages.push_back(ChatMessage::makeText(Role::Tool, "Text content of Image 1:\nabc"));

    CHECK(endpoint.complete(request) == "<think>thinking</think>\npour moi");
    CHECK(lastAuth == "Bearer sekrit");
    auto const body = nlohmann::json::parse(lastBody);
    CHECK(body["model"] == "m");
    CHECK(body["temperature"] == 0.0);
    REQUIRE(body["messages"].size() == 4);
    CHECK(body["messages"][0]["content"] == "sys");
    CHECK(body["messages"][1]["content"][1]["type"] == "image_url");
    CHECK(body["messages"][1]["content"][1]["image_url"]["url"] == "data:image/png;base64," + base64Encode("PNGDATA"));
    CHECK(body["messages"][3]["role"] == "user");
    CHECK(body["messages"][3]["content"] == "<tool_response>\nText content of Image 1:\nabc\n</tool_response>");

    auto ocr = HttpOcrEndpoint({ .url = base + "/ocr" });
    CHECK(ocr.recognize("png") == "scanned");

    ::setenv("PAGEZIP_TEST_KEY", "wrong", 1);
    try
    {
        (void) endpoint.complete(request);
        FAIL("expected an endpoint error");
    }
    catch (EndpointError const& e)
    {
        CHECK(e.httpStatus() == 401);
        CHECK(e.isAuthFailure());
    }

    server.stop();
    thread.join();
    ::unsetenv("PAGEZIP_TEST_KEY");
}

TEST_CASE("http: unreachable endpoint is an endpoint error")
{
    auto endpoint = HttpChatEndpoint({ .url = "http://127.0.0.1:1/v1/chat/completions", .model = "m", .timeoutSeconds = 2 });
    CHECK_THROWS_AS((void) endpoint.complete(ChatRequest {}), EndpointError);
}

TEST_CASE("base64 matches the RFC 4648 vectors")
{
    CHECK(base64Encode("") == "");
    CHECK(base64Encode("f") == "Zg==");
    CHECK(base64Encode("fo") == "Zm8=");
    CHECK(base64Encode("foo") == "Zm9v");
    CHECK(base64Encode("foobar") == "Zm9vYmFy");
}

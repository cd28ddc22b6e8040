// SPDX-License-Identifier: Apache-2.0
#include <pagezip/cli/cli.hpp>
#include <pagezip/cli/config.hpp>
#include <pagezip/corpus/hardness.hpp>
#include <pagezip/corpus/padding.hpp>
#include <pagezip/corpus/sample.hpp>
#include <pagezip/corpus/sft_export.hpp>
#include <pagezip/corpus/synthesis.hpp>
#include <pagezip/error.hpp>
#include <pagezip/ledger/ledger.hpp>
#include <pagezip/ledger/token_counter.hpp>
#include <pagezip/render/manifest.hpp>
#include <pagezip/render/preset.hpp>
#include <pagezip/scoring/report.hpp>
#include <pagezip/simlab/simlab.hpp>
#include <pagezip/util/parallel.hpp>
#include <pagezip/util/random.hpp>

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace pagezip
{

namespace
{

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// files

std::vector<nlohmann::json> readJsonl(fs::path const& path)
{
    auto in = std::ifstream(path, std::ios::binary);
    if (!in)
        throw InputError("cannot read " + path.string());
    auto out = std::vector<nlohmann::json> {};
    auto line = std::string {};
    auto lineNo = 0;
    while (std::getline(in, line))
    {
        ++lineNo;
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        auto j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded())
            throw InputError(path.string() + ":" + std::to_string(lineNo) + ": invalid JSON");
        out.push_back(std::move(j));
    }
    return out;
}

std::ofstream openOutput(fs::path const& path)
{
    if (path.has_parent_path())
        fs::create_directories(path.parent_path());
    auto out = std::ofstream(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw InputError("cannot write " + path.string());
    return out;
}

void writeJsonl(fs::path const& path, std::vector<nlohmann::json> const& records)
{
    auto out = openOutput(path);
    for (auto const& r: records)
        out << r.dump() << '\n';
}

void writeText(fs::path const& path, std::string const& text)
{
    auto out = openOutput(path);
    out << text;
}

std::vector<Trajectory> readTrajectories(fs::path const& path)
{
    auto out = std::vector<Trajectory> {};
    auto lineNo = 0;
    for (auto const& j: readJsonl(path))
    {
        ++lineNo;
        try
        {
            out.push_back(j.get<Trajectory>());
        }
        catch (nlohmann::json::exception const& e)
        {
            throw InputError(path.string() + ": record " + std::to_string(lineNo) + ": " + e.what());
        }
    }
    return out;
}

std::map<std::string, GoldRecord> readGold(fs::path const& path)
{
    auto out = std::map<std::string, GoldRecord> {};
    for (auto const& j: readJsonl(path))
    {
        try
        {
            auto g = j.get<GoldRecord>();
            auto const id = g.id;
            out[id] = std::move(g);
        }
        catch (nlohmann::json::exception const& e)
        {
            throw InputError(path.string() + ": bad gold record: " + e.what());
        }
    }
    return out;
}

/// Distractor pool: one passage per line, either a JSON string, a JSON
/// object with "text" (or "document"), or plain text.
std::vector<std::string> readPool(fs::path const& path)
{
    auto in = std::ifstream(path, std::ios::binary);
    if (!in)
        throw InputError("cannot read " + path.string());
    auto pool = std::vector<std::string> {};
    auto line = std::string {};
    while (std::getline(in, line))
    {
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        auto const j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_string())
            pool.push_back(j.get<std::string>());
        else if (j.is_object() && j.contains("text") && j["text"].is_string())
            pool.push_back(j["text"].get<std::string>());
        else if (j.is_object() && j.contains("document") && j["document"].is_string())
            pool.push_back(j["document"].get<std::string>());
        else
            pool.push_back(line);
    }
    return pool;
}

std::string fixed(double value, int decimals)
{
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, value);
    return buf;
}

bool isMock(EndpointDescriptor const& d)
{
    return d.url.rfind("mock:", 0) == 0;
}

// ---------------------------------------------------------------------------
// shared options

struct CommonOptions
{
    std::string config;
    std::uint64_t seed = 0;
    int parallelism = 1;
    std::vector<std::string> presets;
    std::string tokenizer;
    std::string font;
    std::string modelUrl;
    std::string modelName;
    std::string judgeUrl;
    std::string ocrUrl;
    int maxTurns = 0;
    std::string expandKind;

    std::map<std::string, CLI::Option*> given;

    void add(CLI::App* app, bool endpoints)
    {
        app->add_option("-c,--config", config, "TOML config file");
        given["seed"] = app->add_option("--seed", seed, "master seed");
        given["parallelism"] = app->add_option("-j,--parallelism", parallelism, "worker threads");
        given["preset"] = app->add_option("-p,--preset", presets, "preset name (5x, 10x, 15x)");
        given["tokenizer"] = app->add_option("--tokenizer", tokenizer, "token counter: default, chars/N, whitespace");
        given["font"] = app->add_option("--font", font, "TrueType font file");
        if (!endpoints)
            return;
        given["model-url"] = app->add_option("--model-url", modelUrl, "reader endpoint url or mock:...");
        given["model-name"] = app->add_option("--model-name", modelName, "model field sent to the reader endpoint");
        given["judge-url"] = app->add_option("--judge-url", judgeUrl, "judge endpoint url or mock:...");
        given["ocr-url"] = app->add_option("--ocr-url", ocrUrl, "OCR endpoint url or mock:text:...");
        given["max-turns"] = app->add_option("--max-turns", maxTurns, "turn cap T");
        given["expand-kind"] = app->add_option("--expand-kind", expandKind, "source_text, ocr_text or image_zoom");
    }

    [[nodiscard]] bool has(std::string const& name) const
    {
        auto const it = given.find(name);
        return it != given.end() && it->second->count() > 0;
    }

    [[nodiscard]] PipelineConfig resolve() const
    {
        auto c = config.empty() ? PipelineConfig {} : loadConfig(config);
        if (has("seed"))
            c.seed = seed;
        if (has("parallelism"))
            c.parallelism = parallelism;
        if (has("preset"))
            c.presets = presets;
        if (has("tokenizer"))
            c.tokenizer = tokenizer;
        if (has("font"))
            c.font = font;
        if (has("model-url"))
            c.model.url = modelUrl;
        if (has("model-name"))
            c.model.model = modelName;
        if (has("judge-url"))
            c.judge.url = judgeUrl;
        if (has("ocr-url"))
            c.ocr.url = ocrUrl;
        if (has("max-turns"))
            c.episode.maxTurns = maxTurns;
        if (has("expand-kind"))
            c.episode.expandKind = expandKindFromString(expandKind);
        c.validate();
        return c;
    }
};

struct Environment
{
    PipelineConfig config;
    std::shared_ptr<TokenCounter const> counter;
    std::shared_ptr<GlyphMetrics const> font;

    explicit Environment(PipelineConfig c): config(std::move(c))
    {
        counter = makeTokenCounter(config.tokenizer);
        font = loadFont(config.font);
    }

    [[nodiscard]] RenderPreset const& preset() const { return presetByName(config.presets.front()); }
};

void notePresetChoice(Environment const& env, std::ostream& err)
{
    if (env.config.presets.size() > 1)
        err << "note: using preset " << env.config.presets.front() << "; run once per preset for the others\n";
}

std::int64_t sourceTokens(Sample const& s, TokenCounter const& counter)
{
    return s.numTokens ? *s.numTokens : counter.count(s.document);
}

// Renders every sample at the run preset; PNGs only when a real endpoint will look at them.
std::vector<std::shared_ptr<RenderedDocument const>> renderSamples(std::vector<Sample> const& samples,
                                                                   Environment const& env, bool encodePngs)
{
    auto docs = std::vector<std::shared_ptr<RenderedDocument const>>(samples.size());
    parallelFor(samples.size(), env.config.parallelism, [&](std::size_t i) {
        auto const& s = samples[i];
        docs[i] = makeRenderedDocument(s.id, s.document, env.preset(), env.font, *env.counter, s.numTokens,
                                       defaultEncoder(), encodePngs);
    });
    return docs;
}

GoldRecord goldFor(Sample const& s, RenderedDocument const& doc)
{
    auto g = GoldRecord {};
    g.id = s.id;
    g.dataset = s.dataset;
    g.answers = s.answers;
    g.evidencePages = mapSpansToPages(s.spans, *doc.pages);
    g.pageCount = static_cast<int>(doc.pages->pageCount());
    return g;
}

std::string ledgerReport(std::vector<Trajectory> const& trajectories)
{
    auto ledgers = std::vector<TokenLedger> {};
    for (auto const& t: trajectories)
        if (t.ledger.readerTotal() > 0)
            ledgers.push_back(t.ledger);
    auto const s = summarize(ledgers);
    auto out = std::ostringstream {};
    out << "episodes " << s.episodes << "\n";
    out << "source tokens " << s.sourceTokens << "\n";
    out << "initial visual tokens " << s.initialVisualTokens << "\n";
    out << "reader tokens " << s.readerTokens << "\n";
    out << "expansions " << s.expansions << " (" << fixed(s.meanExpansions, 2) << " per episode)\n";
    out << "icr mean " << fixed(s.meanIcr, 2) << " pooled " << fixed(s.pooledIcr, 2) << "\n";
    out << "ecr mean " << fixed(s.meanEcr, 2) << " pooled " << fixed(s.pooledEcr, 2) << "\n";
    if (s.episodes > 0)
    {
        auto const n = static_cast<double>(s.episodes);
        auto const meanSource = static_cast<std::int64_t>(std::llround(static_cast<double>(s.sourceTokens) / n));
        auto const meanReader = static_cast<std::int64_t>(std::llround(static_cast<double>(s.readerTokens) / n));
        out << "kv cache per episode: text " << formatMiB(kvBytes(meanSource)) << " MiB, reader "
            << formatMiB(kvBytes(meanReader)) << " MiB";
        if (meanSource > 0)
            out << ", reduction " << fixed(reductionPercent(meanSource, meanReader), 1) << "%";
        out << "\n";
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// commands

int cmdRender(Environment const& env, fs::path const& input, fs::path const& outDir, bool noPng, std::ostream& out)
{
    auto const samples = readSamplesJsonl(input);
    fs::create_directories(outDir);
    for (auto const& name: env.config.presets)
    {
        auto const& preset = presetByName(name);
        auto records = std::vector<nlohmann::json>(samples.size());
        parallelFor(samples.size(), env.config.parallelism, [&](std::size_t i) {
            auto const& s = samples[i];
            auto const pages = renderPages(SourceText(s.document), preset, *env.font,
                                           RenderOptions { .encoder = defaultEncoder(), .rasterize = !noPng });
            if (!noPng)
                writeDocumentPages(outDir / name, s.id, pages);
            auto const n = sourceTokens(s, *env.counter);
            auto const visual = pages.totalVisualTokens();
            records[i] = { { "id", s.id },
                           { "preset", name },
                           { "pages", pages.pageCount() },
                           { "source_tokens", n },
                           { "visual_tokens", visual },
                           { "icr", visual > 0 ? nlohmann::json(static_cast<double>(n) / static_cast<double>(visual))
                                               : nlohmann::json(nullptr) },
                           { "evidence_pages", mapSpansToPages(s.spans, pages) } };
        });
        writeJsonl(outDir / name / "manifest.jsonl", records);

        auto pages = std::int64_t { 0 };
        auto icrSum = 0.0;
        auto icrCount = 0;
        for (auto const& r: records)
        {
            pages += r["pages"].get<std::int64_t>();
            if (!r["icr"].is_null())
            {
                icrSum += r["icr"].get<double>();
                ++icrCount;
            }
        }
        out << "preset " << name << ": docs " << samples.size() << ", pages " << pages << ", mean icr "
            << (icrCount ? fixed(icrSum / icrCount, 2) : std::string("n/a")) << "\n";
    }
    return ExitOk;
}

int cmdBuildData(Environment const& env, fs::path const& input, fs::path const& distractors, fs::path const& output,
                 std::ostream& out)
{
    auto const samples = readSamplesJsonl(input);
    auto const pool = readPool(distractors);
    auto results = std::vector<PaddingResult>(samples.size());
    parallelFor(samples.size(), env.config.parallelism, [&](std::size_t i) {
        results[i] = padWithDistractors(samples[i], pool, env.config.padding, deriveSeed(env.config.seed, i), *env.counter);
    });
    auto records = std::vector<nlohmann::json> {};
    auto above = 0;
    auto tokens = 0.0;
    for (auto const& r: results)
    {
        records.push_back(sampleToJson(r.sample));
        above += r.aboveCeiling;
        tokens += static_cast<double>(r.tokens);
    }
    writeJsonl(output, records);
    out << "samples " << samples.size() << ", above ceiling " << above << ", mean tokens "
        << (samples.empty() ? std::string("n/a") : fixed(tokens / static_cast<double>(samples.size()), 0)) << "\n";
    return ExitOk;
}

int cmdFilterHard(Environment const& env, fs::path const& input, fs::path const& outDir, double sftFraction,
                  std::ostream& out, std::ostream& err)
{
    notePresetChoice(env, err);
    auto const samples = readSamplesJsonl(input);
    auto const docs = renderSamples(samples, env, !isMock(env.config.model));
    auto const modelFactory = makeChatEndpointFactory(env.config.model, std::string(toString(toolFor(env.config.episode.expandKind))));
    auto const judgeFactory = makeChatEndpointFactory(env.config.judge);

    auto results = std::vector<HardnessResult>(samples.size());
    parallelFor(samples.size(), env.config.parallelism, [&](std::size_t i) {
        auto const gold = goldFor(samples[i], *docs[i]);
        auto const context = EpisodeContext { .sampleId = gold.id,
                                              .goldAnswers = gold.answers,
                                              .evidencePages = { gold.evidencePages.begin(), gold.evidencePages.end() },
                                              .pageCount = gold.pageCount };
        auto model = modelFactory(context);
        auto judge = judgeFactory(context);
        results[i] = classifyHardness(*docs[i], samples[i], *model, *judge, env.config.episode);
    });

    auto report = FilterReport {};
    auto hard = std::vector<nlohmann::json> {};
    auto easy = std::vector<nlohmann::json> {};
    auto labels = std::vector<nlohmann::json> {};
    auto hardIds = std::vector<std::string> {};
    auto easyIds = std::vector<std::string> {};
    auto endpointFailures = 0;
    for (auto i = std::size_t { 0 }; i < samples.size(); ++i)
    {
        auto const& s = samples[i];
        auto const& r = results[i];
        report.total.add(r.label);
        report.byDataset[s.dataset].add(r.label);
        endpointFailures += r.endpointFailure;
        labels.push_back({ { "id", s.id },
                           { "dataset", s.dataset },
                           { "label", toString(r.label) },
                           { "model_answer", r.modelAnswer },
                           { "judge_reply", r.judgeReply },
                           { "error", r.error } });
        if (r.label == Hardness::Hard)
        {
            hard.push_back(sampleToJson(s));
            hardIds.push_back(s.id);
        }
        else if (r.label == Hardness::Easy)
        {
            easy.push_back(sampleToJson(s));
            easyIds.push_back(s.id);
        }
    }
    writeJsonl(outDir / "hard.jsonl", hard);
    writeJsonl(outDir / "easy.jsonl", easy);
    writeJsonl(outDir / "hardness.jsonl", labels);

    auto counts = [](FilterCounts const& c) {
        return nlohmann::json { { "generated", c.generated },
                                { "easy", c.easy },
                                { "hard", c.hard },
                                { "unclassified", c.unclassified },
                                { "keep_rate", c.keepRate() } };
    };
    auto reportJson = nlohmann::json { { "total", counts(report.total) }, { "by_dataset", nlohmann::json::object() } };
    for (auto const& [name, c]: report.byDataset)
        reportJson["by_dataset"][name] = counts(c);
    writeText(outDir / "filter_report.json", reportJson.dump(2) + "\n");

    auto const split = splitForTraining(hardIds, easyIds, env.config.seed, sftFraction);
    writeText(outDir / "split.json", nlohmann::json { { "sft", split.sft }, { "rl", split.rl } }.dump(2) + "\n");

    out << "generated " << report.total.generated << ", hard " << report.total.hard << ", easy " << report.total.easy
        << ", unclassified " << report.total.unclassified << ", keep rate " << fixed(100.0 * report.total.keepRate(), 1)
        << "%\n";
    for (auto const& [name, c]: report.byDataset)
        out << "  " << name << ": " << c.hard << "/" << c.generated << " kept (" << fixed(100.0 * c.keepRate(), 1) << "%)\n";
    if (endpointFailures > 0)
    {
        err << "error: " << endpointFailures << " samples failed at an endpoint\n";
        return ExitEndpoint;
    }
    return ExitOk;
}

int cmdSynthRequests(Environment const& env, fs::path const& input, fs::path const& output, fs::path const& replies,
                     fs::path const& trajectoriesOut, fs::path const& sftOut, std::ostream& out, std::ostream& err)
{
    notePresetChoice(env, err);
    auto const samples = readSamplesJsonl(input);
    auto const docs = renderSamples(samples, env, false);
    auto requests = std::map<std::string, SynthesisRequest> {};
    auto records = std::vector<nlohmann::json> {};
    auto skipped = 0;
    for (auto i = std::size_t { 0 }; i < samples.size(); ++i)
    {
        auto const& s = samples[i];
        auto const gold = goldFor(s, *docs[i]);
        if (gold.evidencePages.empty() || s.answers.empty())
        {
            err << "skipped " << s.id << ": no evidence pages\n";
            ++skipped;
            continue;
        }
        auto evidence = std::vector<EvidencePage> {};
        for (auto const k: gold.evidencePages)
            evidence.push_back({ k, std::string(docs[i]->text->slice(docs[i]->pages->page(k).charSpan)) });
        auto request = buildSynthesisRequest(s, evidence, s.answers.front(), gold.pageCount, env.config.episode.expandKind);
        records.push_back(nlohmann::json(request));
        requests.emplace(s.id, std::move(request));
    }
    writeJsonl(output, records);
    out << "requests " << records.size() << ", skipped " << skipped << "\n";
    if (replies.empty())
        return ExitOk;

    auto index = std::map<std::string, std::size_t> {};
    for (auto i = std::size_t { 0 }; i < samples.size(); ++i)
        index[samples[i].id] = i;
    auto trajectories = std::vector<Trajectory> {};
    auto rejected = 0;
    for (auto const& j: readJsonl(replies))
    {
        auto const id = j.value("id", std::string {});
        auto const reply = j.value("reply", std::string {});
        auto const r = requests.find(id);
        if (r == requests.end())
            throw InputError("reply for unknown sample '" + id + "'");
        auto const v = validateSynthesizedTrace(reply, r->second);
        if (!v.ok)
        {
            err << "rejected " << id << ": " << v.reason << "\n";
            ++rejected;
            continue;
        }
        auto const i = index.at(id);
        trajectories.push_back(assembleSyntheticTrajectory(*docs[i], samples[i], v.responses, *env.counter, env.config.episode));
    }
    if (!trajectoriesOut.empty())
    {
        auto lines = std::vector<nlohmann::json> {};
        for (auto const& t: trajectories)
            lines.push_back(t);
        writeJsonl(trajectoriesOut, lines);
    }
    if (!sftOut.empty())
    {
        auto file = openOutput(sftOut);
        (void) exportSftDataset(trajectories, file);
    }
    out << "traces accepted " << trajectories.size() << ", rejected " << rejected << "\n";
    return ExitOk;
}

int cmdRunEpisodes(Environment const& env, fs::path const& input, fs::path const& output, fs::path goldPath,
                   fs::path const& reportPath, bool score, bool forceExtract, std::ostream& out, std::ostream& err)
{
    notePresetChoice(env, err);
    auto const samples = readSamplesJsonl(input);
    auto const docs = renderSamples(samples, env, !isMock(env.config.model));
    auto jobs = std::vector<EpisodeJob> {};
    auto gold = std::map<std::string, GoldRecord> {};
    auto goldLines = std::vector<nlohmann::json> {};
    for (auto i = std::size_t { 0 }; i < samples.size(); ++i)
    {
        auto const g = goldFor(samples[i], *docs[i]);
        jobs.push_back(EpisodeJob { .doc = docs[i],
                                    .question = samples[i].question,
                                    .dataset = samples[i].dataset,
                                    .context = EpisodeContext { .sampleId = g.id,
                                                                .goldAnswers = g.answers,
                                                                .evidencePages = { g.evidencePages.begin(), g.evidencePages.end() },
                                                                .pageCount = g.pageCount } });
        goldLines.push_back(g);
        gold[g.id] = g;
    }
    if (gold.size() != samples.size())
        throw InputError("sample ids must be unique");

    auto const tool = std::string(toString(toolFor(env.config.episode.expandKind)));
    auto ocrFactory = OcrEndpointFactory {};
    if (env.config.episode.expandKind == ExpandKind::OcrText)
    {
        if (env.config.ocr.url.empty())
            throw InputError("expand kind ocr_text needs an OCR endpoint");
        ocrFactory = makeOcrEndpointFactory(env.config.ocr);
    }
    auto const trajectories = runEpisodes(jobs, env.config.episode, makeChatEndpointFactory(env.config.model, tool),
                                          *env.counter, ocrFactory, env.config.parallelism);

    auto lines = std::vector<nlohmann::json> {};
    auto protocolErrors = 0;
    for (auto const& t: trajectories)
    {
        lines.push_back(t);
        protocolErrors += t.status == EpisodeStatus::ProtocolError;
    }
    writeJsonl(output, lines);
    if (goldPath.empty())
        goldPath = fs::path(output).replace_extension(".gold.jsonl");
    writeJsonl(goldPath, goldLines);
    out << ledgerReport(trajectories);

    auto status = ExitOk;
    if (protocolErrors > 0)
    {
        err << "error: " << protocolErrors << " episodes ended with an endpoint error";
        for (auto const& t: trajectories)
            if (t.status == EpisodeStatus::ProtocolError)
            {
                err << " (first: " << t.sampleId << ": " << t.error << ")";
                break;
            }
        err << "\n";
        status = ExitEndpoint;
    }
    if (score)
    {
        auto const scored = scoreTrajectories(trajectories, gold, makeChatEndpointFactory(env.config.judge),
                                              ScoreOptions { .forceExtract = forceExtract,
                                                             .parallelism = env.config.parallelism,
                                                             .reward = {} });
        auto const report = aggregateScores(scored);
        out << reportText(report);
        if (!reportPath.empty())
            writeText(reportPath, reportCsv(report));
    }
    return status;
}

int cmdScore(Environment const& env, fs::path const& trajectoriesPath, fs::path const& goldPath, fs::path const& csvPath,
             fs::path const& jsonPath, fs::path const& scoredPath, bool forceExtract, std::ostream& out)
{
    auto const trajectories = readTrajectories(trajectoriesPath);
    auto const gold = readGold(goldPath);
    auto const scored = scoreTrajectories(trajectories, gold, makeChatEndpointFactory(env.config.judge),
                                          ScoreOptions { .forceExtract = forceExtract,
                                                         .parallelism = env.config.parallelism,
                                                         .reward = {} });
    auto const report = aggregateScores(scored);
    out << reportText(report);
    if (!csvPath.empty())
        writeText(csvPath, reportCsv(report));
    if (!jsonPath.empty())
        writeText(jsonPath, reportJson(report).dump(2) + "\n");
    if (!scoredPath.empty())
    {
        auto lines = std::vector<nlohmann::json> {};
        for (auto const& e: scored)
            lines.push_back(e);
        writeJsonl(scoredPath, lines);
    }
    return ExitOk;
}

std::vector<double> parseNumberList(std::string const& text, std::string const& what)
{
    auto values = std::vector<double> {};
    auto in = std::istringstream(text);
    auto cell = std::string {};
    while (std::getline(in, cell, ','))
    {
        try
        {
            auto used = std::size_t { 0 };
            values.push_back(std::stod(cell, &used));
            if (cell.find_first_not_of(" \t\r", used) != std::string::npos)
                throw std::invalid_argument(cell);
        }
        catch (std::logic_error const&)
        {
            throw InputError("malformed number '" + cell + "' in " + what);
        }
    }
    return values;
}

RegimeCurve readCurveCsv(fs::path const& path)
{
    auto in = std::ifstream(path, std::ios::binary);
    if (!in)
        throw InputError("cannot read " + path.string());
    auto curve = RegimeCurve {};
    auto line = std::string {};
    auto lineNo = 0;
    auto columns = std::map<std::string, std::size_t> {};
    while (std::getline(in, line))
    {
        ++lineNo;
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        if (columns.empty())
        {
            auto header = std::istringstream(line);
            auto name = std::string {};
            for (auto i = std::size_t { 0 }; std::getline(header, name, ','); ++i)
            {
                name.erase(name.find_last_not_of(" \t\r") + 1);
                name.erase(0, name.find_first_not_of(" \t"));
                columns[name] = i;
            }
            for (auto const* required: { "rate", "d_no", "p" })
                if (!columns.contains(required))
                    throw InputError(path.string() + ": header must name rate, d_no and p");
            continue;
        }
        auto const values = parseNumberList(line, path.string() + ":" + std::to_string(lineNo));
        if (values.size() != columns.size())
            throw InputError(path.string() + ":" + std::to_string(lineNo) + ": expected " + std::to_string(columns.size())
                             + " columns");
        curve.rates.push_back(values[columns["rate"]]);
        curve.dNo.push_back(values[columns["d_no"]]);
        curve.pHit.push_back(values[columns["p"]]);
    }
    return curve;
}

int cmdSimulate(PipelineConfig const& config, fs::path const& curvePath, std::string const& rates, std::string const& dNo,
                std::string const& p, double errHit, double errMiss, std::uint64_t trials, fs::path const& output,
                std::ostream& out)
{
    auto curve = RegimeCurve {};
    if (!curvePath.empty())
        curve = readCurveCsv(curvePath);
    else
    {
        curve.rates = parseNumberList(rates, "--rates");
        curve.dNo = parseNumberList(dNo, "--d-no");
        curve.pHit = parseNumberList(p, "--p-hit");
    }
    auto const result = sweep(curve, errHit, errMiss);
    auto const csv = sweepCsv(result);
    if (output.empty())
        out << csv;
    else
        writeText(output, csv);
    if (result.crossoverRate)
        out << "# crossover at rate " << *result.crossoverRate << "\n";
    out << "# benefit positive at every rate: " << (result.positiveEverywhere ? "yes" : "no") << "\n";
    if (trials > 0)
    {
        for (auto i = std::size_t { 0 }; i < result.rows.size(); ++i)
        {
            auto const& row = result.rows[i];
            auto const policy = PolicySpec { .pHit = row.pHit, .errHit = errHit, .errMiss = errMiss };
            auto const sim = simulateEpisodes(policy, row.dNo, trials, deriveSeed(config.seed, i), config.parallelism);
            out << "# rate " << row.rate << ": simulated with-tool error " << fixed(sim.withToolErrorRate(), 5)
                << " vs " << fixed(row.expectedError, 5) << ", no-tool " << fixed(sim.noToolErrorRate(), 5) << " vs "
                << fixed(row.dNo, 5) << "\n";
        }
    }
    return ExitOk;
}

int cmdReport(std::vector<std::string> const& paths, fs::path const& sftOut, std::ostream& out)
{
    auto all = std::vector<Trajectory> {};
    for (auto const& path: paths)
    {
        auto t = readTrajectories(path);
        all.insert(all.end(), std::make_move_iterator(t.begin()), std::make_move_iterator(t.end()));
    }
    auto byPreset = std::map<std::string, std::vector<Trajectory>> {};
    for (auto const& t: all)
        byPreset[t.preset].push_back(t);
    for (auto const& [preset, list]: byPreset)
    {
        out << "[" << (preset.empty() ? std::string("unknown") : preset) << "]\n";
        auto statuses = std::map<std::string, int> {};
        for (auto const& t: list)
            ++statuses[std::string(toString(t.status))];
        for (auto const& [status, count]: statuses)
            out << status << " " << count << "\n";
        out << ledgerReport(list);
    }
    if (!sftOut.empty())
    {
        auto file = openOutput(sftOut);
        auto const r = exportSftDataset(all, file);
        out << "sft records " << r.written << ", skipped protocol errors " << r.skippedProtocolError << "\n";
    }
    return ExitOk;
}

} // namespace

int runCli(std::vector<std::string> const& args, std::ostream& out, std::ostream& err)
{
    auto app = CLI::App("Render long documents as compressed page images and run selective-expansion pipelines.",
                        "pagezip");
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all");

    auto common = std::map<std::string, CommonOptions> {};
    auto commonFor = [&](CLI::App* sub, bool endpoints) { common[sub->get_name()].add(sub, endpoints); };

    auto input = std::string {};
    auto output = std::string {};
    auto outDir = std::string {};

    auto* render = app.add_subcommand("render", "render samples to page images and manifests");
    commonFor(render, false);
    auto noPng = false;
    render->add_option("-i,--input", input, "samples JSONL")->required();
    render->add_option("-o,--out-dir", outDir, "output directory")->required();
    render->add_flag("--no-png", noPng, "write manifests only");

    auto* buildData = app.add_subcommand("build-data", "pad samples with distractor passages");
    commonFor(buildData, false);
    auto distractors = std::string {};
    buildData->add_option("-i,--input", input, "samples JSONL")->required();
    buildData->add_option("-d,--distractors", distractors, "distractor passages, one per line")->required();
    buildData->add_option("-o,--out", output, "padded samples JSONL")->required();

    auto* filter = app.add_subcommand("filter-hard", "keep samples the reader gets wrong without tools");
    commonFor(filter, true);
    auto sftFraction = 0.8;
    filter->add_option("-i,--input", input, "samples JSONL")->required();
    filter->add_option("-o,--out-dir", outDir, "output directory")->required();
    filter->add_option("--sft-fraction", sftFraction, "share of hard samples for SFT")->check(CLI::Range(0.0, 1.0));

    auto* synth = app.add_subcommand("synth-requests", "build trace-generation requests and assemble replies");
    commonFor(synth, false);
    auto replies = std::string {};
    auto trajectoriesOut = std::string {};
    auto sftOut = std::string {};
    synth->add_option("-i,--input", input, "samples JSONL")->required();
    synth->add_option("-o,--out", output, "requests JSONL")->required();
    synth->add_option("--replies", replies, "generator replies JSONL {id, reply}");
    synth->add_option("--trajectories-out", trajectoriesOut, "assembled trajectories JSONL");
    synth->add_option("--sft-out", sftOut, "SFT conversations JSONL");

    auto* run = app.add_subcommand("run-episodes", "run the multi-turn protocol and score it");
    commonFor(run, true);
    auto gold = std::string {};
    auto reportPath = std::string {};
    auto noScore = false;
    auto forceExtract = false;
    run->add_option("-i,--input", input, "samples JSONL")->required();
    run->add_option("-o,--out", output, "trajectories JSONL")->required();
    run->add_option("--gold", gold, "gold records JSONL (default: next to --out)");
    run->add_option("--report", reportPath, "score report CSV");
    run->add_flag("--no-score", noScore, "skip judging");
    run->add_flag("--force-extract", forceExtract, "judge the last reply of budget-exhausted episodes");

    auto* score = app.add_subcommand("score", "judge trajectories and aggregate accuracy");
    commonFor(score, true);
    auto trajectories = std::string {};
    auto jsonPath = std::string {};
    auto scoredPath = std::string {};
    score->add_option("-t,--trajectories", trajectories, "trajectories JSONL")->required();
    score->add_option("-g,--gold", gold, "gold records JSONL")->required();
    score->add_option("-o,--out", output, "report CSV");
    score->add_option("--json", jsonPath, "report JSON");
    score->add_option("--scored", scoredPath, "per-episode verdicts JSONL");
    score->add_flag("--force-extract", forceExtract, "judge the last reply of budget-exhausted episodes");

    auto* simulate = app.add_subcommand("simulate", "closed-form and Monte-Carlo expansion benefit");
    commonFor(simulate, false);
    auto curve = std::string {};
    auto rates = std::string {};
    auto dNo = std::string {};
    auto pHit = std::string {};
    auto errHit = 0.2;
    auto errMiss = 1.0;
    auto trials = std::uint64_t { 0 };
    simulate->add_option("--curve", curve, "CSV with columns rate,d_no,p");
    simulate->add_option("--rates", rates, "comma-separated compression rates");
    simulate->add_option("--d-no", dNo, "comma-separated no-tool error rates");
    simulate->add_option("--p-hit", pHit, "comma-separated selection probabilities");
    simulate->add_option("--err-hit", errHit, "error when all evidence is expanded");
    simulate->add_option("--err-miss", errMiss, "error otherwise");
    simulate->add_option("--trials", trials, "Monte-Carlo trials per rate (0: none)");
    simulate->add_option("-o,--out", output, "CSV output (default stdout)");

    auto* report = app.add_subcommand("report", "token ledger and KV-cache summary of trajectory files");
    commonFor(report, false);
    auto reportInputs = std::vector<std::string> {};
    report->add_option("trajectories", reportInputs, "trajectory JSONL files")->required();
    report->add_option("--sft-out", sftOut, "also export SFT conversations");

    auto argv = std::vector<std::string>(args.rbegin(), args.rend());
    try
    {
        app.parse(argv);
    }
    catch (CLI::CallForHelp const&)
    {
        out << app.help();
        return ExitOk;
    }
    catch (CLI::CallForAllHelp const&)
    {
        out << app.help("", CLI::AppFormatMode::All);
        return ExitOk;
    }
    catch (CLI::ParseError const& e)
    {
        err << "error: " << e.what() << "\n";
        return ExitInput;
    }

    try
    {
        auto* sub = app.get_subcommands().front();
        auto const config = common.at(sub->get_name()).resolve();
        if (sub == simulate)
        {
            if (curve.empty() && rates.empty())
                throw InputError("simulate needs --curve or --rates/--d-no/--p-hit");
            return cmdSimulate(config, curve, rates, dNo, pHit, errHit, errMiss, trials, output, out);
        }
        if (sub == report)
            return cmdReport(reportInputs, sftOut, out);
        auto const env = Environment(config);
        if (sub == render)
            return cmdRender(env, input, outDir, noPng, out);
        if (sub == buildData)
            return cmdBuildData(env, input, distractors, output, out);
        if (sub == filter)
            return cmdFilterHard(env, input, outDir, sftFraction, out, err);
        if (sub == synth)
            return cmdSynthRequests(env, input, output, replies, trajectoriesOut, sftOut, out, err);
        if (sub == run)
            return cmdRunEpisodes(env, input, output, gold, reportPath, !noScore, forceExtract, out, err);
        if (sub == score)
            return cmdScore(env, trajectories, gold, output, jsonPath, scoredPath, forceExtract, out);
        return ExitFailure;
    }
    catch (EndpointError const& e)
    {
        err << "endpoint error: " << e.what() << "\n";
        return ExitEndpoint;
    }
    catch (InputError const& e)
    {
        err << "error: " << e.what() << "\n";
        return ExitInput;
    }
    catch (InvalidDimension const& e)
    {
        err << "error: " << e.what() << "\n";
        return ExitInput;
    }
    catch (RangeError const& e)
    {
        err << "error: " << e.what() << "\n";
        return ExitInput;
    }
    catch (fs::filesystem_error const& e)
    {
        err << "error: " << e.what() << "\n";
        return ExitInput;
    }
    catch (std::exception const& e)
    {
        err << "internal error: " << e.what() << "\n";
        return ExitFailure;
    }
}

} // namespace pagezip

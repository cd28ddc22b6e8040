// SPDX-License-Identifier: Apache-2.0
#include "../support/prose.hpp"

#include <pagezip/cli/cli.hpp>
#include <pagezip/cli/config.hpp>
#include <pagezip/error.hpp>

#include <doctest.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace pagezip;
namespace fs = std::filesystem;

namespace
{

struct TempDir
{
    fs::path path;

    TempDir()
    {
        static auto counter = 0;
        path = fs::temp_directory_path() / ("pagezip_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }

    [[nodiscard]] std::string operator/(std::string const& name) const { return (path / name).string(); }
};

struct Run
{
    int code;
    std::string out;
    std::string err;
};

Run cli(std::vector<std::string> const& args)
{
    auto out = std::ostringstream {};
    auto err = std::ostringstream {};
    auto const code = runCli(args, out, err);
    return { code, out.str(), err.str() };
}

std::string slurp(std::string const& path)
{
    auto in = std::ifstream(path, std::ios::binary);
    auto s = std::ostringstream {};
    s << in.rdbuf();
    return s.str();
}

void spit(std::string const& path, std::string const& text)
{
    auto out = std::ofstream(path, std::ios::binary);
    out << text;
}

std::vector<nlohmann::json> jsonLines(std::string const& path)
{
    auto in = std::ifstream(path);
    auto lines = std::vector<nlohmann::json> {};
    for (auto line = std::string {}; std::getline(in, line);)
        lines.push_back(nlohmann::json::parse(line));
    return lines;
}

// ~10k tokens under the default counter, answer inserted near the middle.
std::string writeSamples(TempDir const& dir, int count)
{
    auto const path = dir / "samples.jsonl";
    auto out = std::ofstream(path);
    for (auto i = 0; i < count; ++i)
    {
        auto doc = testing::makeProse(40000, 100 + static_cast<std::uint64_t>(i));
        doc.insert(doc.find(". ", 20000) + 2, "The lighthouse keeper was Anna Grey. ");
        out << nlohmann::json { { "id", "s" + std::to_string(i) },
                                { "question", "Who was the lighthouse keeper?" },
                                { "answers", { "Anna Grey" } },
                                { "document", doc },
                                { "dataset", i % 2 ? "odd" : "even" } }
                   .dump()
            << '\n';
    }
    return path;
}

} // namespace

TEST_CASE("config file values and flag overrides")
{
    auto const c = parseConfig(R"(
seed = 9
parallelism = 3
presets = ["5x", "15x"]
[episode]
max_turns = 4
expand_kind = "image_zoom"
[padding]
min_tokens = 100
max_tokens = 200
[endpoints.judge]
url = "http://127.0.0.1:9/v1/chat/completions"
api_key_env = "JUDGE_KEY"
)");
    CHECK(c.seed == 9);
    CHECK(c.parallelism == 3);
    CHECK(c.presets == std::vector<std::string> { "5x", "15x" });
    CHECK(c.episode.maxTurns == 4);
    CHECK((c.episode.expandKind == ExpandKind::ImageZoom));
    CHECK(c.padding.lo == 100);
    CHECK(c.padding.hi == 200);
    CHECK(c.judge.apiKeyEnv == "JUDGE_KEY");
    CHECK(c.model.url == "mock:answer");
    CHECK_NOTHROW(c.validate());
}

TEST_CASE("config errors name the problem")
{
    auto message = [](std::string const& text) {
        try
        {
            (void) parseConfig(text, "x.toml");
        }
        catch (InputError const& e)
        {
            return std::string(e.what());
        }
        return std::string("no error");
    };
    CHECK(message("sed = 1\n").find("sed") != std::string::npos);
    CHECK(message("[episode]\nmax_turn = 3\n").find("episode.max_turn") != std::string::npos);
    CHECK(message("seed = \"one\"\n").find("integer") != std::string::npos);
    CHECK(message("seed = 1\nseed = = 2\n").find("line 2") != std::string::npos);
    CHECK(message("[episode]\nexpand_kind = \"crop\"\n") != "no error");

    auto bad = PipelineConfig {};
    bad.presets = { "7x" };
    CHECK_THROWS(bad.validate());
}

TEST_CASE("cli exit codes")
{
    auto const dir = TempDir {};
    auto const samples = writeSamples(dir, 2);

    CHECK(cli({ "--help" }).code == ExitOk);
    CHECK(cli({}).code == ExitInput);
    CHECK(cli({ "frobnicate" }).code == ExitInput);
    CHECK(cli({ "render", "-i", samples, "-o", dir / "r", "-p", "7x" }).code == ExitInput);
    CHECK(cli({ "render", "-i", dir / "missing.jsonl", "-o", dir / "r" }).code == ExitInput);
    CHECK(cli({ "render", "-i", samples, "-o", dir / "r", "-j", "0" }).code == ExitInput);
    CHECK(cli({ "run-episodes", "-i", samples, "-o", dir / "t.jsonl", "--model-url", "mock:nonsense" }).code == ExitInput);
    CHECK(cli({ "run-episodes", "-i", samples, "-o", dir / "t.jsonl", "--model-url", "ftp://x" }).code == ExitInput);

    spit(dir / "bad.toml", "[episode]\nturns = 3\n");
    auto const badConfig = cli({ "render", "-c", dir / "bad.toml", "-i", samples, "-o", dir / "r" });
    CHECK(badConfig.code == ExitInput);
    CHECK(badConfig.err.find("episode.turns") != std::string::npos);

    spit(dir / "broken.jsonl", "{\"id\": \"a\", \"question\": \n");
    CHECK(cli({ "render", "-i", dir / "broken.jsonl", "-o", dir / "r" }).code == ExitInput);

    spit(dir / "curve.csv", "rate,d_no,p\n5,0.3,zero\n");
    CHECK(cli({ "simulate", "--curve", dir / "curve.csv" }).code == ExitInput);
    spit(dir / "short.csv", "rate,d_no,p\n5,0.3\n");
    CHECK(cli({ "simulate", "--curve", dir / "short.csv" }).code == ExitInput);
    spit(dir / "empty.csv", "rate,d_no,p\n");
    CHECK(cli({ "simulate", "--curve", dir / "empty.csv" }).code == ExitInput);
    CHECK(cli({ "simulate", "--rates", "5,10", "--d-no", "0.3", "--p-hit", "0.9,0.8" }).code == ExitInput);
    CHECK(cli({ "simulate", "--rates", "5", "--d-no", "0.3", "--p-hit", "1.5" }).code == ExitInput);
    CHECK(cli({ "simulate" }).code == ExitInput);
}

TEST_CASE("endpoint failures exit 3 after writing outputs")
{
    auto const dir = TempDir {};
    auto const samples = writeSamples(dir, 3);
    auto const r = cli({ "run-episodes", "-i", samples, "-o", dir / "t.jsonl", "--model-url", "mock:fail:401" });
    CHECK(r.code == ExitEndpoint);
    CHECK(r.err.find("401") != std::string::npos);
    auto const lines = jsonLines(dir / "t.jsonl");
    REQUIRE(lines.size() == 3);
    for (auto const& t: lines)
        CHECK(t["status"] == "protocol_error");
    CHECK(fs::exists(dir / "t.gold.jsonl"));

    auto const judge = cli({ "score", "-t", dir / "t.jsonl", "-g", dir / "t.gold.jsonl", "--judge-url", "mock:fail:500" });
    CHECK(judge.code == ExitOk); // nothing reached the judge

    auto const ok = cli({ "run-episodes", "-i", samples, "-o", dir / "ok.jsonl", "--model-url", "mock:oracle", "--no-score" });
    REQUIRE(ok.code == ExitOk);
    auto const judged = cli({ "score", "-t", dir / "ok.jsonl", "-g", dir / "ok.gold.jsonl", "--judge-url", "mock:fail:503" });
    CHECK(judged.code == ExitEndpoint);

    CHECK(cli({ "filter-hard", "-i", samples, "-o", dir / "fh", "--model-url", "mock:fail:429" }).code == ExitEndpoint);
}

TEST_CASE("runs are byte-identical across reruns and thread counts")
{
    auto const dir = TempDir {};
    auto const samples = writeSamples(dir, 6);
    auto const a = cli({ "run-episodes", "-i", samples, "-o", dir / "a.jsonl", "--model-url", "mock:oracle", "-j", "1",
                         "--report", dir / "a.csv" });
    auto const b = cli({ "run-episodes", "-i", samples, "-o", dir / "b.jsonl", "--model-url", "mock:oracle", "-j", "4",
                         "--report", dir / "b.csv" });
    REQUIRE(a.code == ExitOk);
    REQUIRE(b.code == ExitOk);
    CHECK(slurp(dir / "a.jsonl") == slurp(dir / "b.jsonl"));
    CHECK(slurp(dir / "a.gold.jsonl") == slurp(dir / "b.gold.jsonl"));
    CHECK(slurp(dir / "a.csv") == slurp(dir / "b.csv"));
    CHECK(a.out == b.out);

    spit(dir / "pool.jsonl", "\"" + testing::makeProse(3000, 1) + "\"\n\"" + testing::makeProse(5000, 2) + "\"\n");
    for (auto const* name: { "p1.jsonl", "p2.jsonl" })
        REQUIRE(cli({ "build-data", "-i", samples, "-d", dir / "pool.jsonl", "-o", dir / name, "--seed", "5" }).code
                == ExitOk);
    CHECK(slurp(dir / "p1.jsonl") == slurp(dir / "p2.jsonl"));
    REQUIRE(cli({ "build-data", "-i", samples, "-d", dir / "pool.jsonl", "-o", dir / "p3.jsonl", "--seed", "6" }).code
            == ExitOk);
    CHECK(slurp(dir / "p1.jsonl") != slurp(dir / "p3.jsonl"));
}

TEST_CASE("score report fields")
{
    auto const dir = TempDir {};
    auto const samples = writeSamples(dir, 4);
    REQUIRE(cli({ "run-episodes", "-i", samples, "-o", dir / "t.jsonl", "--model-url", "mock:oracle", "--no-score" }).code
            == ExitOk);
    auto const r = cli({ "score", "-t", dir / "t.jsonl", "-g", dir / "t.gold.jsonl", "-o", dir / "r.csv", "--json",
                         dir / "r.json", "--scored", dir / "s.jsonl" });
    REQUIRE(r.code == ExitOk);
    auto const csv = slurp(dir / "r.csv");
    for (auto const* field: { "qa_acc", "sel_acc", "ecr", "avg_expand_calls" })
    {
        CHECK(csv.find(field) != std::string::npos);
        CHECK(r.out.find(field == std::string("avg_expand_calls") ? "expand" : field) != std::string::npos);
    }
    auto const json = nlohmann::json::parse(slurp(dir / "r.json"));
    CHECK(json["overall"]["qa_acc"] == 100.0);
    CHECK(json["overall"]["sel_acc"] == 100.0);
    CHECK(json["overall"]["avg_expand_calls"] == 1.0);
    CHECK(json["datasets"].size() == 2);
    CHECK(json["macro_qa_acc"] == 100.0);
    CHECK(jsonLines(dir / "s.jsonl").size() == 4);

    // gold missing for a trajectory
    spit(dir / "nogold.jsonl", "");
    CHECK(cli({ "score", "-t", dir / "t.jsonl", "-g", dir / "nogold.jsonl" }).code == ExitInput);
}

TEST_CASE("always-expand stays within the turn budget")
{
    auto const dir = TempDir {};
    auto const samples = writeSamples(dir, 3);
    auto const r = cli({ "run-episodes", "-i", samples, "-o", dir / "t.jsonl", "--model-url", "mock:always_expand",
                         "--max-turns", "6", "--no-score" });
    REQUIRE(r.code == ExitOk);
    REQUIRE(cli({ "score", "-t", dir / "t.jsonl", "-g", dir / "t.gold.jsonl", "--json", dir / "r.json" }).code == ExitOk);
    auto const json = nlohmann::json::parse(slurp(dir / "r.json"));
    CHECK(json["overall"]["avg_expand_calls"].get<double>() <= 5.0);
    CHECK(json["overall"]["avg_expand_calls"].get<double>() == 5.0);
    for (auto const& t: jsonLines(dir / "t.jsonl"))
    {
        CHECK(t["status"] == "budget_exhausted");
        CHECK(t["turns"].size() == 6);
    }
}

TEST_CASE("render manifest for a ten-thousand-token document")
{
    auto const dir = TempDir {};
    auto const samples = writeSamples(dir, 1);
    auto const r = cli({ "render", "-i", samples, "-o", dir / "r", "-p", "5x", "-p", "10x" });
    REQUIRE(r.code == ExitOk);
    auto const m5 = jsonLines(dir / "r/5x/manifest.jsonl");
    REQUIRE(m5.size() == 1);
    auto const tokens = m5[0]["source_tokens"].get<std::int64_t>();
    CHECK(tokens >= 9900);
    CHECK(tokens <= 10100);
    CHECK(m5[0]["icr"].get<double>() >= 5.0);
    CHECK(m5[0]["icr"].get<double>() <= 6.2);
    CHECK(m5[0]["pages"].get<int>() >= 22);
    CHECK(m5[0]["pages"].get<int>() <= 28);
    CHECK(m5[0]["visual_tokens"] == 72 * m5[0]["pages"].get<int>());
    CHECK(m5[0]["evidence_pages"].size() == 1);
    CHECK(fs::exists(dir / "r/5x/s0"));
    CHECK(jsonLines(dir / "r/10x/manifest.jsonl")[0]["icr"].get<double>() > 8.0);

    spit(dir / "empty.jsonl", "");
    REQUIRE(cli({ "render", "-i", dir / "empty.jsonl", "-o", dir / "e", "--no-png" }).code == ExitOk);
    CHECK(slurp(dir / "e/10x/manifest.jsonl").empty());
}

TEST_CASE("filter, synthesis requests and report commands")
{
    auto const dir = TempDir {};
    auto const samples = writeSamples(dir, 4);
    auto const f = cli({ "filter-hard", "-i", samples, "-o", dir / "fh", "--model-url", "mock:answer:Anna Grey" });
    REQUIRE(f.code == ExitOk);
    CHECK(jsonLines(dir / "fh/easy.jsonl").size() == 4);
    CHECK(slurp(dir / "fh/hard.jsonl").empty());
    auto const report = nlohmann::json::parse(slurp(dir / "fh/filter_report.json"));
    CHECK(report["total"]["easy"] == 4);
    CHECK(report["by_dataset"].size() == 2);

    auto const s = cli({ "synth-requests", "-i", samples, "-o", dir / "req.jsonl" });
    REQUIRE(s.code == ExitOk);
    CHECK(jsonLines(dir / "req.jsonl").size() == 4);

    REQUIRE(cli({ "run-episodes", "-i", samples, "-o", dir / "t.jsonl", "--model-url", "mock:oracle", "--no-score" }).code
            == ExitOk);
    auto const rep = cli({ "report", dir / "t.jsonl", "--sft-out", dir / "sft.jsonl" });
    REQUIRE(rep.code == ExitOk);
    CHECK(rep.out.find("ecr") != std::string::npos);
    CHECK(rep.out.find("MiB") != std::string::npos);
    CHECK(jsonLines(dir / "sft.jsonl").size() == 4);
}

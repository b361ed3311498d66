#include "cli.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

using nlohmann::json;

namespace {

struct CliRun {
    int code = 0;
    std::string out, err;
};

CliRun run(std::vector<std::string> args)
{
    std::ostringstream out, err;
    CliRun r;
    r.code = chowla::cli::run(args, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

std::vector<std::string> lines(const std::string& text)
{
    std::vector<std::string> out;
    std::istringstream is(text);
    for (std::string line; std::getline(is, line);) out.push_back(line);
    return out;
}

std::string slurp(const std::filesystem::path& p)
{
    std::ifstream is(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(is), {}};
}

std::filesystem::path scratch_dir()
{
    auto dir = std::filesystem::temp_directory_path() / ("chowla_cli_test_" + std::to_string(::getpid()));
    std::filesystem::create_directories(dir);
    return dir;
}

} // namespace

TEST(Cli, EnumerateCsvContract)
{
    const CliRun r = run({"enumerate", "--x", "1e6", "--format", "csv"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto ls = lines(r.out);
    ASSERT_FALSE(ls.empty());
    EXPECT_EQ(ls[0].rfind("# chowla ", 0), 0u);
    std::size_t header = 0;
    while (header < ls.size() && ls[header].starts_with("#")) ++header;
    ASSERT_LT(header, ls.size());
    EXPECT_EQ(ls[header], "m,d");
    EXPECT_EQ(ls[header + 1], "1,5");
    EXPECT_EQ(ls[header + 2], "2,17");
    unsigned long long previous = 0;
    for (std::size_t i = header + 1; i < ls.size(); ++i) {
        const auto comma = ls[i].find(',');
        const unsigned long long d = std::stoull(ls[i].substr(comma + 1));
        ASSERT_GT(d, previous);
        previous = d;
    }
    EXPECT_EQ(r.out.find('\r'), std::string::npos);
}

TEST(Cli, SaddleJsonContract)
{
    const CliRun r = run({"saddle", "--tau", "4", "--format", "json"});
    ASSERT_EQ(r.code, 0) << r.err;
    const json doc = json::parse(r.out);
    for (const char* key : {"tau", "kappa", "phi", "psi", "C0"}) EXPECT_TRUE(doc.contains(key)) << key;
    EXPECT_EQ(doc["meta"]["command"], "saddle");
    EXPECT_EQ(doc["meta"]["config"]["tau"], 4.0);
    EXPECT_EQ(doc["tau"], 4.0);
    EXPECT_GT(doc["kappa"].get<double>(), 0.0);
}

TEST(Cli, ComplexValuesInJson)
{
    const CliRun r = run({"moments", "--x", "1e5", "--z", "1+1i,2", "--format", "json"});
    ASSERT_EQ(r.code, 0) << r.err;
    const json doc = json::parse(r.out);
    ASSERT_EQ(doc["rows"].size(), 2u);
    EXPECT_EQ(doc["rows"][0]["z"]["re"], 1.0);
    EXPECT_EQ(doc["rows"][0]["z"]["im"], 1.0);
    EXPECT_TRUE(doc["rows"][1]["model"].contains("im"));
}

TEST(Cli, JacobsthalSmall)
{
    const CliRun r = run({"jacobsthal", "--pmax", "100", "--format", "json"});
    ASSERT_EQ(r.code, 0) << r.err;
    const json doc = json::parse(r.out);
    EXPECT_EQ(doc["rows"].size(), 24u); // odd primes up to 100
    for (const auto& row : doc["rows"]) EXPECT_EQ(row["sum"], -1);
}

TEST(Cli, UsageErrorsExitWithTwo)
{
    EXPECT_EQ(run({}).code, 2);
    EXPECT_EQ(run({"nosuch"}).code, 2);
    EXPECT_EQ(run({"enumerate"}).code, 2);
    EXPECT_EQ(run({"enumerate", "--x", "1e6", "--format", "xml"}).code, 2);
    EXPECT_EQ(run({"classnum", "--d", "21"}).code, 2);
    EXPECT_EQ(run({"tail", "--x", "1e5", "--tau", "0.5:1:0.1"}).code, 2);
    EXPECT_EQ(run({"count", "--H", "0"}).code, 2);
    EXPECT_EQ(run({"moments", "--x", "1e5", "--z", "banana"}).code, 2);
    const CliRun r = run({"lvalue", "--d", "17", "--mode", "bogus"});
    EXPECT_EQ(r.code, 2);
    EXPECT_FALSE(r.err.empty());
}

TEST(Cli, ComputationalErrorsExitWithOne)
{
    const CliRun r = run({"lvalue", "--d", "1000001", "--mode", "rigorous", "--target", "1e-12"});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("error"), std::string::npos);
}

TEST(Cli, OutputFileIsWrittenAtomically)
{
    const auto dir = scratch_dir();
    const auto path = dir / "enum.csv";
    const CliRun r = run({"enumerate", "--x", "1e4", "--output", path.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(slurp(path), run({"enumerate", "--x", "1e4"}).out);
    for (const auto& entry : std::filesystem::directory_iterator(dir))
        EXPECT_EQ(entry.path().filename(), "enum.csv");
    // A failing run leaves the previous file untouched.
    EXPECT_EQ(run({"enumerate", "--x", "1", "--output", path.string()}).code, 2);
    EXPECT_EQ(slurp(path), run({"enumerate", "--x", "1e4"}).out);
    std::filesystem::remove_all(dir);
}

TEST(Cli, ByteIdenticalAcrossRunsAndThreads)
{
    const std::vector<std::vector<std::string>> commands = {
        {"enumerate", "--x", "1e6"},
        {"lvalue", "--d", "101", "--mode", "fast"},
        {"classnum", "--d", "677"},
        {"char-average", "--m", "2,3", "--x", "1e6"},
        {"moments", "--x", "1e6", "--z", "1,1+1i,-1"},
        {"tail", "--x", "1e6", "--tau", "1:2:0.5", "--samples", "100000"},
        {"saddle", "--tau", "3"},
        {"model-tail", "--tau", "1:2:0.5", "--samples", "100000", "--seed", "5"},
        {"count", "--H", "10"},
    };
    for (const auto& base : commands) {
        for (const char* fmt : {"csv", "json"}) {
            auto args = base;
            args.insert(args.end(), {"--format", fmt});
            const CliRun a = run(args);
            ASSERT_EQ(a.code, 0) << base[0] << ": " << a.err;
            EXPECT_EQ(a.out, run(args).out) << base[0];
            args.insert(args.end(), {"--threads", "3"});
            EXPECT_EQ(a.out, run(args).out) << base[0] << " threads";
        }
    }
}

TEST(Cli, PerDiscriminantCsvRoundTrip)
{
    const auto dir = scratch_dir();
    const auto per_d = dir / "per_d.csv";
    const CliRun r = run({"tail", "--x", "1e6", "--tau", "1:2:0.25", "--samples", "0", "--per-d", per_d.string(),
                       "--format", "json"});
    ASSERT_EQ(r.code, 0) << r.err;
    const json doc = json::parse(r.out);

    std::vector<double> ls;
    for (const auto& line : lines(slurp(per_d))) {
        if (line.starts_with("#") || line.starts_with("m,")) continue;
        std::istringstream is(line);
        std::string m, d, l;
        std::getline(is, m, ',');
        std::getline(is, d, ',');
        std::getline(is, l, ',');
        ls.push_back(std::stod(l));
    }
    EXPECT_EQ(ls.size(), doc["n_discriminants"].get<std::size_t>());
    const double eg = 0.57721566490153286061;
    const double zeta2 = 1.6449340668482264365;
    for (const auto& row : doc["rows"]) {
        const double tau = row["tau"];
        std::uint64_t up = 0, lo = 0;
        for (double l : ls) {
            up += l > std::exp(eg) * tau;
            lo += l < zeta2 / (std::exp(eg) * tau);
        }
        EXPECT_EQ(row["upper_count"].get<std::uint64_t>(), up) << tau;
        EXPECT_EQ(row["lower_count"].get<std::uint64_t>(), lo) << tau;
    }
    std::filesystem::remove_all(dir);
}

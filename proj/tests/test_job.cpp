#include "multicav/job.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

using namespace multicav;
using namespace multicav::job;

namespace {

constexpr double pi = std::numbers::pi;

std::string slurp(const std::string& path)
{
    std::ifstream in(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int error_line(const std::string& text)
{
    try {
        (void)parse_config(text);
    } catch (const ConfigError& e) {
        return e.line();
    }
    return -1;
}

} // namespace

TEST_CASE("parse_length understands multiples of pi")
{
    CHECK(parse_length(json(2.5)) == 2.5);
    CHECK(parse_length(json("pi")) == pi);
    CHECK(parse_length(json("100pi")) == 100.0 * pi);
    CHECK(parse_length(json("9.91*pi")) == 9.91 * pi);
    CHECK(parse_length(json("-0.5 pi")) == -0.5 * pi);
    CHECK_THROWS_AS((void)parse_length(json("12 meters")), ConfigError);
    CHECK_THROWS_AS((void)parse_length(json(true)), ConfigError);
}

TEST_CASE("config errors carry line numbers")
{
    const std::string unknown = "{\n  \"stack\": {\"family\": \"two\", \"zeta\": 1, \"zeta_prime\": 1, \"L\": 1},\n"
                                "  \"bogus\": 3\n}";
    CHECK(error_line(unknown) == 3);
    const std::string malformed = "{\n  \"stack\": {\n    \"family\": \"two\",,\n  }\n}";
    CHECK(error_line(malformed) == 3);
    const std::string badfam = "{\n\"stack\": {\n\"family\": \"five\", \"zeta\": 1, \"zeta_prime\": 1, \"L\": 1}}";
    CHECK(error_line(badfam) == 3);
    const std::string unordered =
        "{\n\"stack\": {\"elements\": [{\"zeta\": 1, \"position\": 2}, {\"zeta\": 1, \"position\": 1}]}}";
    CHECK(error_line(unordered) == 2);
}

TEST_CASE("outputs require the sections they depend on")
{
    CHECK_THROWS_AS((void)parse_config(json{{"outputs", {"spectrum"}}}), ConfigError);
    CHECK_THROWS_AS((void)parse_config(json{{"outputs", {"sweep"}}}), ConfigError);
    CHECK_THROWS_AS((void)parse_config(json{{"outputs", {"plots"}}}), ConfigError);
    const json no_movable = {{"stack", {{"family", "two"}, {"zeta", 1}, {"zeta_prime", 1}, {"L", 1}}},
                             {"k_range", {{"min", 1}, {"max", 2}}},
                             {"outputs", {"couplings"}}};
    CHECK_THROWS_AS((void)parse_config(no_movable), ConfigError);
}

TEST_CASE("family stacks")
{
    const auto three = parse_config(json{{"stack", {{"family", "three"}, {"zeta", 20}, {"zeta_prime", 5},
                                                    {"L", "100pi"}, {"l", "pi"}}}});
    REQUIRE(three.stack);
    REQUIRE(three.stack->elements.size() == 3);
    CHECK(three.stack->elements[1].position == 100.0 * pi);
    CHECK(three.stack->elements[2].zeta == 20.0);

    const auto four = parse_config(json{{"stack", {{"family", "four"}, {"zeta", 20}, {"zeta_prime", 5},
                                                   {"L", "100pi"}, {"l1", "9.91pi"}, {"l2", "pi"}}}});
    const auto s = four.stack->build();
    CHECK(s.gap(0) == doctest::Approx(9.91 * pi));
    CHECK(s.gap(1) == doctest::Approx(100.0 * pi));
    CHECK(s.gap(2) == doctest::Approx(pi));
}

TEST_CASE("presets carry the caption parameters")
{
    const auto tun = preset("fig_tunnel");
    const auto s = tun.stack->build();
    CHECK(s.elements()[0].zeta == 10.0);
    CHECK(s.elements()[1].zeta == 10.0);
    CHECK(s.gap(0) == 1000.0 * pi);
    CHECK(s.gap(1) == doctest::Approx(pi).epsilon(1e-12));

    const auto f4 = preset("fig4");
    REQUIRE(f4.sweep);
    CHECK(f4.sweep->zeta == 20.0);
    CHECK(f4.sweep->total_length == 101.0 * pi);
    CHECK(f4.sweep->zeta_primes == std::vector<double>{0.5, 2.0, 10.0});

    const auto f6 = preset("fig6").stack->build();
    CHECK(f6.size() == 4);
    CHECK(f6.gap(0) == doctest::Approx(pi));
    CHECK(f6.gap(1) == doctest::Approx(100.0 * pi));

    const auto f7 = preset("fig7").stack->build();
    CHECK(f7.gap(0) == doctest::Approx(9.91 * pi));
    CHECK(f7.gap(2) == doctest::Approx(pi));

    try {
        (void)preset("fig99");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("fig3, fig_tunnel, fig4, fig6, fig7") != std::string::npos);
    }
}

TEST_CASE("two-mirror spectrum CSV smoke test")
{
    auto cfg = parse_config(json{{"stack", {{"family", "two"}, {"zeta", 20}, {"zeta_prime", 20}, {"L", "pi"}}},
                                 {"k_range", {{"min", 0.5}, {"max", 1.5}}},
                                 {"outputs", {"spectrum"}}});
    const auto result = run(cfg);
    const auto csv = to_csv(result, OutputKind::Spectrum);
    CHECK(csv.rfind("k,T,D\n", 0) == 0);
    CHECK(result.spectrum.size() >= 64);
}

TEST_CASE("JSON output round-trips bit for bit and is deterministic")
{
    namespace fs = std::filesystem;
    const auto dir = fs::temp_directory_path() / "multicav_test_job";
    fs::create_directories(dir);
    auto doc = preset_document("fig3");
    doc["outputs"] = {"resonances", "couplings"};
    doc["format"] = "json";
    doc["output"] = (dir / "a.json").string();
    const auto cfg = parse_config(doc);
    const auto result = run(cfg);
    (void)write_outputs(cfg, result);
    doc["output"] = (dir / "b.json").string();
    const auto cfg_b = parse_config(doc);
    (void)write_outputs(cfg_b, run(cfg_b));

    const auto a = json::parse(slurp((dir / "a.json").string()));
    REQUIRE(a.at("results").at("resonances").size() == result.resonances.size());
    for (std::size_t i = 0; i < result.resonances.size(); ++i) {
        const auto& j = a["results"]["resonances"][i];
        CHECK(j["k0"].get<double>() == result.resonances[i].k0);
        CHECK(j["kappa_curvature"].get<double>() == result.resonances[i].kappa_curvature);
    }
    CHECK(a.at("version") == version());
    CHECK(a.at("config").at("stack").at("elements").size() == 3);

    auto strip_path = [](json j) {
        j["config"].erase("output");
        return j;
    };
    CHECK(strip_path(a) == strip_path(json::parse(slurp((dir / "b.json").string()))));
}

TEST_CASE("CSV files carry the resolved config header")
{
    namespace fs = std::filesystem;
    const auto dir = fs::temp_directory_path() / "multicav_test_job_csv";
    fs::create_directories(dir);
    auto doc = preset_document("fig_tunnel");
    doc["output"] = (dir / "tunnel.csv").string();
    const auto cfg = parse_config(doc);
    const auto written = write_outputs(cfg, run(cfg));
    REQUIRE(written.size() == 2);
    CHECK(fs::path(written[0]).filename() == "tunnel_spectrum.csv");
    const auto text = slurp(written[1]);
    CHECK(text.rfind("# tool: multicav " + version() + "\n# config: {", 0) == 0);
    std::istringstream lines(text);
    std::string tool_line, cfg_line;
    std::getline(lines, tool_line);
    std::getline(lines, cfg_line);
    cfg_line.erase(0, std::string("# config: ").size());
    CHECK(json::parse(cfg_line) == cfg.resolved);
}

TEST_CASE("coupling rows report the reason when a coupling cannot be formed")
{
    auto cfg = preset("fig_tunnel");
    cfg.outputs = {OutputKind::Couplings};
    cfg.movable_element = 1;
    const auto result = run(cfg);
    bool any_overlap = false;
    for (const auto& row : result.couplings) {
        if (row.status == "overlapping-resonance") {
            any_overlap = true;
            CHECK_FALSE(row.report.has_value());
        }
    }
    CHECK(any_overlap);
}

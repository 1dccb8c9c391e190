#include <doctest.h>

#include <cmath>
#include <sstream>
#include <string>

#include "commands.hpp"
#include "kacm/errors.hpp"
#include "report.hpp"
#include "run_config.hpp"
#include "source_map.hpp"

using namespace kacm::cli;

namespace {

const char* kBase = R"({
  "schema": "kacm-run/1",
  "kernels": { "bm": { "family": "brownian" } },
  "measures": {
    "d0": { "atoms": [ { "at": 0, "weight": 1 } ] },
    "box": { "densities": [ { "type": "indicator", "lower": 0, "upper": 1 } ] }
  },
  "tasks": [
    { "id": "a", "operation": "moment", "kernel": "bm", "measure": "d0", "k": 2 },
    { "id": "b", "operation": "moment", "kernel": "bm", "measures": [ "d0", "box" ], "t": 0.5 },
    { "id": "c", "operation": "kato", "kernel": "bm", "measure": "d0" }
  ]
})";

std::string error_of(const std::string& text) {
    try {
        parse_run_config(text, "cfg.json");
    } catch (const kacm::ConfigError& e) {
        return e.what();
    }
    return "";
}

std::string replace(std::string s, const std::string& from, const std::string& to) {
    const auto p = s.find(from);
    REQUIRE(p != std::string::npos);
    return s.replace(p, from.size(), to);
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("source map resolves JSON pointers to lines") {
    const SourceMap m(kBase);
    CHECK(m.line_of("/kernels/bm") == 3);
    CHECK(m.line_of("/tasks/1") == 10);
    CHECK(m.line_of("/tasks/1/measures/0") == 10);
    CHECK(m.line_of("/measures/box/densities/0/upper") == 6);
    // unknown pointers fall back to the nearest ancestor
    CHECK(m.line_of("/tasks/2/nothing") == 11);
    CHECK(pointer_escape("a/b~c") == "a~1b~0c");
}

TEST_CASE("parse defaults") {
    const RunConfig c = parse_run_config(kBase, "cfg.json");
    REQUIRE(c.tasks.size() == 3);
    CHECK(c.tasks[0].measures.size() == 2);
    CHECK(c.tasks[0].mode == kacm::OrderMode::IdenticalPower);
    CHECK(c.tasks[1].mode == kacm::OrderMode::PermutationSum);
    CHECK(c.tasks[1].t == 0.5);
    CHECK(c.tasks[1].line == 10);
    CHECK_FALSE(c.mc);
    CHECK(c.output.format == "csv");
    CHECK(c.output.path == "-");
}

TEST_CASE("errors carry the line of the offending field") {
    CHECK(error_of(replace(kBase, "\"measures\": [ \"d0\", \"box\" ]", "\"measures\": [ \"d0\", \"mu9\" ]")) ==
          "cfg.json:10: task 'b' references undeclared measure \"mu9\"");
    CHECK(error_of(replace(kBase, "\"k\": 2", "\"k\": 2, \"colour\": 1")).rfind("cfg.json:9: unknown field \"colour\"", 0) == 0);
    CHECK(error_of(replace(kBase, "\"upper\": 1", "\"upper\": -1")).rfind("cfg.json:6:", 0) == 0);
    CHECK(error_of(replace(kBase, "\"kacm-run/1\"", "\"kacm-run/2\"")).rfind("cfg.json:2:", 0) == 0);
    CHECK(error_of(replace(kBase, "\"id\": \"c\"", "\"id\": \"a\"")).find("duplicate") != std::string::npos);
    CHECK(error_of(replace(kBase, "\"t\": 0.5", "\"t\": 0.5, \"mode\": \"identical-power\"")).rfind("cfg.json:10:", 0) == 0);
    CHECK(error_of(replace(kBase, "\"operation\": \"kato\"", "\"operation\": \"mc-compare\"")).find("\"mc\" block") !=
          std::string::npos);
    // malformed JSON reports a line too
    CHECK(error_of(replace(kBase, "\"tasks\": [", "\"tasks\": [[")).rfind("cfg.json:", 0) == 0);
}

TEST_CASE("normalized echo is a fixed point") {
    const RunConfig c = parse_run_config(kBase, "cfg.json");
    const auto j = c.to_json();
    const RunConfig again = parse_run_config(j.dump(2), "echo.json");
    CHECK(again.to_json() == j);
    CHECK(again.digest() == c.digest());
    const RunConfig other = parse_run_config(replace(kBase, "\"t\": 0.5", "\"t\": 0.75"));
    CHECK(other.digest() != c.digest());
    RunConfig moved = c;
    moved.output.path = "elsewhere.json";
    CHECK(moved.digest() == c.digest());
}

TEST_CASE("missing files are I/O errors") {
    CHECK_THROWS_AS(load_run_config("/nonexistent/kacm.json"), IoError);
}

TEST_CASE("task selection") {
    RunConfig c = parse_run_config(kBase);
    RunOptions o;
    o.only = Operation::Kato;
    apply_options(c, o);
    REQUIRE(c.tasks.size() == 1);
    CHECK(c.tasks[0].id == "c");

    RunConfig d = parse_run_config(kBase);
    RunOptions none;
    none.task = "zz";
    CHECK_THROWS_AS(apply_options(d, none), kacm::ConfigError);
    RunConfig e = parse_run_config(kBase);
    RunOptions bad;
    bad.only = Operation::ExpBound;
    CHECK_THROWS_AS(apply_options(e, bad), kacm::ConfigError);
}

TEST_CASE("number formatting") {
    CHECK(format_number(0.1) == "0.10000000000000001");
    CHECK(format_number(2.0) == "2");
    CHECK(format_number(INFINITY) == "inf");
    CHECK(format_number(-INFINITY) == "-inf");
    CHECK(format_number(NAN) == "nan");
}

TEST_CASE("reports") {
    RunConfig c = parse_run_config(kBase);
    RunOptions o;
    o.task = "a";
    apply_options(c, o);
    const Report r = execute(c, o);
    REQUIRE(r.rows.size() == 1);
    CHECK(r.rows[0].verdict == "n/a");
    CHECK_FALSE(r.any_fail());
    // E_0[L_1^2] = 1
    CHECK(*r.rows[0].engine_value == doctest::Approx(1.0).epsilon(1e-8));

    std::ostringstream csv;
    r.write_csv(csv);
    std::istringstream in(csv.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == std::string("# kacm ") + kToolVersion);
    std::getline(in, line);
    CHECK(line == "# schema kacm-report/1");
    std::getline(in, line);
    CHECK(line.rfind("# config-digest ", 0) == 0);
    std::getline(in, line);
    CHECK(line.rfind("# config {", 0) == 0);
    std::getline(in, line);
    CHECK(line == "task_id,operation,engine_value,engine_error,mc_mean,mc_std_error,z_score,verdict,wall_seconds");
    std::getline(in, line);
    CHECK(line.rfind("a,moment,", 0) == 0);

    std::ostringstream js;
    r.write_json(js);
    const auto j = nlohmann::json::parse(js.str());
    CHECK(j["schema"] == "kacm-report/1");
    CHECK(j["rows"].size() == 1);
    CHECK(j["rows"][0]["mc_mean"].is_null());
}

TEST_CASE("failed tasks become fail rows") {
    // start point outside the reflected space surfaces only when the task runs
    const std::string text = replace(replace(kBase, "\"t\": 0.5", "\"t\": 0.5, \"x\": -1"), "\"kernel\": \"bm\", \"measures\"",
                                     "\"kernel\": \"refl\", \"measures\"");
    RunConfig c = parse_run_config(replace(text, "{ \"bm\": { \"family\": \"brownian\" } }",
                                           "{ \"bm\": { \"family\": \"brownian\" }, \"refl\": { \"family\": \"reflected-brownian\" } }"));
    RunOptions o;
    o.task = "b";
    apply_options(c, o);
    const Report r = execute(c, o);
    REQUIRE(r.rows.size() == 1);
    CHECK(r.any_fail());
    CHECK_FALSE(r.rows[0].error.empty());
}

TEST_CASE("built-in kernel check passes") {
    RunConfig c = builtin_kernel_check_config();
    CHECK(c.tasks.size() == 8);
    const Report r = execute(c, RunOptions{});
    CHECK_FALSE(r.any_fail());
}

}

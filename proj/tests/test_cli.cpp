#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "netgen.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
    int code;
    std::string out;
};

Result run(const std::string& args)
{
    std::string cmd = std::string(TSNNC_CLI) + " " + args + " 2>/dev/null";
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    std::string out;
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, p)) > 0)
        out.append(buf, n);
    int status = pclose(p);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string config(const std::string& name) { return std::string(TSNNC_CONFIGS) + "/" + name; }

std::string write_temp(const std::string& name, const json& doc)
{
    fs::path p = fs::temp_directory_path() / ("tsnnc_cli_" + name + ".json");
    std::ofstream(p) << doc.dump();
    return p.string();
}

// e2e column of the analyze CSV, in row order.
std::vector<double> e2e(const std::string& csv)
{
    std::vector<double> v;
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line))
        v.push_back(std::stod(line.substr(line.rfind(',') + 1)));
    return v;
}

json one_port(long bits, long period_us)
{
    json doc;
    doc["nodes"] = json::array({netgen::node("a", false), netgen::node("b", false)});
    doc["links"] = json::array({netgen::link("a", "b", 100000000)});
    doc["ports"] = json::array({netgen::port("a", "b", 500, json::array(), json::array({40000000}))});
    doc["flows"] = json::array({netgen::flow("f", 1, bits, period_us, json::array({json::array({"a>b"})}))});
    return doc;
}

}  // namespace

TEST_CASE("validate the shipped examples")
{
    for (const char* name : {"minimal.json", "tc1.json", "cev.json"}) {
        CAPTURE(name);
        Result r = run("validate " + config(name));
        CHECK(r.code == 0);
        CHECK(r.out.find(": ok") != std::string::npos);
    }
}

TEST_CASE("exit codes")
{
    CHECK(run("validate /nonexistent/config.json").code == 1);
    CHECK(run("analyze " + config("minimal.json") + " --no-such-flag").code == 1);
    CHECK(run("analyze " + config("minimal.json") + " --credit-mode sideways").code == 1);
    CHECK(run("").code == 1);

    json bad = one_port(4000, 1000);
    bad["ports"][0]["st_windows"] = json::array({json::array({100, 50}), json::array({120, 10})});
    CHECK(run("validate " + write_temp("bad", bad)).code == 1);

    json hot = one_port(12000, 200);  // 60 Mb/s against a 40 Mb/s slope
    std::string path = write_temp("hot", hot);
    CHECK(run("validate " + path).code == 0);
    CHECK(run("analyze " + path).code == 2);
    CHECK(run("analyze " + write_temp("ok", one_port(4000, 1000))).code == 0);
}

TEST_CASE("analyze output is stable and shaping never hurts")
{
    std::string tc1 = config("tc1.json");
    Result full = run("analyze " + tc1 + " --output csv");
    REQUIRE(full.code == 0);
    CHECK(run("analyze " + tc1 + " --output csv").out == full.out);
    CHECK(full.out.rfind("flow,class,destination,hops_us,e2e_us\n", 0) == 0);
    Result none = run("analyze " + tc1 + " --output csv --shaping none --credit-mode frozen");
    auto a = e2e(full.out), b = e2e(none.out);
    REQUIRE(a.size() == 10);
    REQUIRE(b.size() == a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        CHECK(a[i] <= b[i]);
    Result j = run("analyze " + tc1 + " --output json --credit-mode nonfrozen");
    REQUIRE(j.code == 0);
    CHECK(json::parse(j.out)["credit_mode"] == "non_frozen");
}

TEST_CASE("compare and simulate")
{
    Result c = run("compare " + config("minimal.json") + " --output csv --phase-policy random --runs 4");
    REQUIRE(c.code == 0);
    CHECK(c.out.find("VIOLATION") == std::string::npos);
    CHECK(c.out.find(",OK,") != std::string::npos);

    fs::path trace = fs::temp_directory_path() / "tsnnc_cli_trace.csv";
    Result s = run("simulate " + config("minimal.json") + " --output json --sim-time-us 2000 --trace " +
                   trace.string());
    REQUIRE(s.code == 0);
    json rep = json::parse(s.out);
    CHECK(rep["window_violations"] == 0);
    CHECK(rep["flows"].size() == 2);
    std::ifstream t(trace);
    std::string head;
    std::getline(t, head);
    CHECK(head == "time_us,port,event,class,credit");
}

TEST_CASE("curve dump")
{
    fs::path dir = fs::temp_directory_path() / "tsnnc_cli_curves";
    fs::remove_all(dir);
    REQUIRE(run("analyze " + config("minimal.json") + " --dump-curves " + dir.string()).code == 0);
    CHECK(fs::exists(dir / "talker_listener.class1.arrival.csv"));
    CHECK(fs::exists(dir / "talker_listener.class2.service.csv"));
    CHECK(fs::exists(dir / "talker_listener.beta_st.csv"));
}

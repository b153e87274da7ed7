#include "doctest.h"

#include "config.hpp"
#include "json.hpp"
#include "report.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

using nlohmann::json;
using namespace lvbcli;

namespace {

const std::string kCli = LVB_CLI_PATH;
const std::string kData = LVB_TEST_DATA;

struct Run {
    int code = -1;
    std::string out;
};

Run run(const std::string& args, bool with_stderr = false) {
    const std::string cmd = kCli + " " + args + (with_stderr ? " 2>&1" : " 2>/dev/null");
    Run r;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    char buf[4096];
    std::size_t got;
    while ((got = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, got);
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

json run_json(const std::string& args) {
    const Run r = run(args);
    REQUIRE(r.code == 0);
    return json::parse(r.out);
}

std::string data(const std::string& name) { return kData + "/" + name; }

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Temporary config file removed on scope exit.
struct TempConfig {
    std::filesystem::path path;
    explicit TempConfig(const std::string& text, const std::string& name) {
        path = std::filesystem::temp_directory_path() / ("lvb_cli_" + name + ".json");
        std::ofstream(path) << text;
    }
    ~TempConfig() { std::filesystem::remove(path); }
    std::string arg() const { return path.string(); }
};

} // namespace

TEST_SUITE("cli") {

TEST_CASE("configuration round trip is byte identical") {
    for (const char* name : {"model_free.json", "double_no_touch.json", "smooth_bump.json", "cev_call.json"}) {
        const std::string once = serialize_config(load_config(data(name)));
        const std::string twice = serialize_config(parse_config(once));
        CHECK(once == twice);
        const Run r = run("--config " + data(name) + " validate --canonical");
        CHECK(r.code == 0);
        CHECK(r.out == once);
    }
}

TEST_CASE("configuration errors") {
    const auto code = [](const std::string& text) {
        try {
            parse_config(text);
        } catch (const ConfigError& e) {
            return std::string(e.what());
        }
        return std::string();
    };
    const std::string base = slurp(data("model_free.json"));
    auto j = json::parse(base);
    j["contract"]["colour"] = "red";
    CHECK(code(j.dump()).find("unknown field 'contract.colour'") != std::string::npos);
    j = json::parse(base);
    j["schema_version"] = 2;
    CHECK(code(j.dump()).find("schema_version") != std::string::npos);
    j = json::parse(base);
    j["model"]["type"] = "heston";
    CHECK_FALSE(code(j.dump()).empty());
    j = json::parse(base);
    j["contract"]["lower"]["growth"] = 0.1;
    CHECK_FALSE(code(j.dump()).empty());
    CHECK_FALSE(code("{not json").empty());
    j = json::parse(base);
    j["run"]["method"] = "fast";
    CHECK_FALSE(code(j.dump()).empty());
}

TEST_CASE("exit codes") {
    CHECK(run("--config " + data("model_free.json") + " price").code == 0);
    CHECK(run("--config " + data("crossing.json") + " validate").code == 1);
    const Run crossing = run("--config " + data("crossing.json") + " price", true);
    CHECK(crossing.code == 1);
    CHECK(crossing.out.find("BarrierCrossing") != std::string::npos);
    CHECK(run("--config " + data("model_free.json") + " frobnicate").code == 1);
    CHECK(run("--config " + data("missing.json") + " price").code == 1);
    CHECK(run("--config " + data("model_free.json") + " price --spots 80").code == 1);
    CHECK(run("--config " + data("model_free.json") + " price --method laplace --n 0").code == 1);

    auto j = json::parse(slurp(data("model_free.json")));
    j["extra"] = 1;
    const TempConfig unknown(j.dump(), "unknown");
    CHECK(run("--config " + unknown.arg() + " price").code == 1);

    // A volatility this small makes the diagonal weights vanish: a numerical, not a validation, failure.
    j = json::parse(slurp(data("model_free.json")));
    j["model"]["sigma"] = 1e-17;
    const TempConfig flat(j.dump(), "flat");
    CHECK(run("--config " + flat.arg() + " price").code == 2);
}

TEST_CASE("price") {
    const json r = run_json("--config " + data("model_free.json") + " price");
    CHECK(r["command"] == "price");
    CHECK(r["regime"] == "L1_regime");
    CHECK(r["method"] == "volterra");
    CHECK(r["n"] == 256);
    REQUIRE(r["rows"].size() == 5u);
    for (const auto& row : r["rows"]) {
        const double spot = row["spot"];
        CHECK(std::fabs(row["discounted_price"].get<double>() - (spot - 90.0)) / spot < 1e-3);
        CHECK(row["price"].get<double>() == row["european"].get<double>() + row["premium_lower"].get<double>() +
                                                row["premium_upper"].get<double>());
    }
    const json z = run_json("--config " + data("zero_payoff.json") + " price");
    CHECK(z["rows"][0]["discounted_price"].get<double>() == 0.0);
    CHECK(z["regime"] == "smooth_regime");
}

TEST_CASE("csv output parses back to full precision") {
    const Run r = run("--config " + data("down_out_call.json") + " price --format csv");
    REQUIRE(r.code == 0);
    const json j = run_json("--config " + data("down_out_call.json") + " price");
    std::istringstream in(r.out);
    std::string header, line;
    std::getline(in, header);
    CHECK(header.rfind("spot,european,premium_lower", 0) == 0);
    int row = 0;
    while (std::getline(in, line)) {
        std::istringstream cells(line);
        std::string cell;
        std::vector<std::string> parts;
        while (std::getline(cells, cell, ',')) parts.push_back(cell);
        REQUIRE(parts.size() == 8u);
        const double v = std::stod(parts[6]);
        const double ref = j["rows"][row]["discounted_price"];
        CHECK(std::fabs(v - ref) <= 1e-15 * std::fabs(ref));
        ++row;
    }
    CHECK(row == 3);
}

TEST_CASE("report formatting") {
    CHECK(format_real(0.1, false) == "1.00000000000000006e-01");
    CHECK(format_real(0.1, true) == "0.1");
    Report rep;
    rep.command = "x";
    rep.meta.emplace_back("k", std::int64_t{3});
    rep.table.columns = {"a", "b", "c"};
    rep.table.rows.push_back({1.5, Cell{}, std::string("q,\"r\"")});
    rep.table.rows.push_back({NAN, true, std::string("s")});
    std::ostringstream js, cs;
    write_json(js, rep, false);
    write_csv(cs, rep, false);
    const json j = json::parse(js.str());
    CHECK(j["k"] == 3);
    CHECK(j["rows"][0]["b"].is_null());
    CHECK(j["rows"][1]["a"].is_null());
    CHECK(j["rows"][0]["c"] == "q,\"r\"");
    CHECK(cs.str() == "a,b,c\n1.50000000000000000e+00,,\"q,\"\"r\"\"\"\n,1,s\n");
}

TEST_CASE("ladder") {
    const json r = run_json("--config " + data("model_free.json") + " ladder --spots 92,95,100,105,110");
    REQUIRE(r["rows"].size() == 5u);
    for (const auto& row : r["rows"]) {
        CHECK(row["delta"].get<double>() == doctest::Approx(1.0).epsilon(1e-3));
        CHECK(std::fabs(row["gamma"].get<double>()) < 1e-3);
    }
    const json one = run_json("--config " + data("down_out_call.json") + " ladder --spots 100");
    const json p = run_json("--config " + data("down_out_call.json") + " price --spots 100");
    CHECK(one["rows"][0]["price"].get<double>() ==
          doctest::Approx(p["rows"][0]["discounted_price"].get<double>()).epsilon(1e-13));
}

TEST_CASE("deltas") {
    const json r = run_json("--config " + data("smooth_bump.json") + " deltas --n 64");
    CHECK(r["sign_violations"] == 0);
    CHECK(r["near_expiry_unreliable"] == false);
    REQUIRE(r["rows"].size() == 65u);
    for (const auto& row : r["rows"]) {
        CHECK(row["delta_minus"].get<double>() >= -1e-9);
        CHECK(row["delta_plus"].get<double>() <= 1e-9);
        CHECK(row["reliable"] == true);
    }
    const json free = run_json("--config " + data("model_free.json") + " deltas --n 64");
    for (const auto& row : free["rows"]) CHECK(row["delta_minus"].get<double>() == doctest::Approx(1.0).epsilon(1e-3));
    const json zero = run_json("--config " + data("zero_payoff.json") + " deltas");
    for (const auto& row : zero["rows"]) {
        CHECK(row["delta_minus"].get<double>() == 0.0);
        CHECK(row["delta_plus"].get<double>() == 0.0);
    }

    const json single = run_json("--config " + data("down_out_call.json") + " deltas --n 32");
    CHECK(single["rows"][0]["delta_plus"].is_null());
    CHECK(single["rows"][0]["delta_minus"].get<double>() > 0.0);

    const json dnt = run_json("--config " + data("double_no_touch.json") + " deltas --n 100");
    CHECK(dnt["near_expiry_unreliable"] == true);
    CHECK(dnt["rows"][0]["reliable"] == true);
    CHECK(dnt["rows"][100]["reliable"] == false);
}

TEST_CASE("convergence") {
    const json r = run_json("--config " + data("smooth_bump.json") + " convergence");
    CHECK(r["reference_n"] == 1024);
    REQUIRE(r["rows"].size() == 5u);
    for (int i = 1; i < 4; ++i) {
        const double order = r["rows"][i]["price_order"];
        CHECK(order >= 1.7);
        CHECK(order <= 2.3);
    }
    CHECK(r["rows"][0]["price_order"] == "n/a");
    CHECK(r["rows"][4]["price_error"].is_null());

    const json free = run_json("--config " + data("model_free.json") + " convergence");
    for (int i = 0; i < 4; ++i) {
        CHECK(free["rows"][i]["price_error"].get<double>() < 1e-6);
        CHECK(free["rows"][i]["price_order"] == "n/a");
        CHECK(free["rows"][i]["profile_order"] == "n/a");
    }
    const json zero = run_json("--config " + data("zero_payoff.json") + " convergence --n-list 16,32,64");
    CHECK(zero["rows"][1]["price_order"] == "n/a");
    CHECK(zero["rows"][1]["profile_order"] == "n/a");
    CHECK(run("--config " + data("smooth_bump.json") + " convergence --n-list 64,32").code == 1);
    CHECK(run("--config " + data("smooth_bump.json") + " convergence --n-list 64,x").code == 1);
}

TEST_CASE("compare") {
    json r = run_json("--config " + data("down_out_call.json") + " compare");
    CHECK(r["all_pass"] == true);
    CHECK(r["closed_form_tolerance"] == 5e-3);
    for (const auto& row : r["rows"]) CHECK(row["closed_form_rel_error"].get<double>() < 5e-3);

    r = run_json("--config " + data("double_no_touch.json") + " compare");
    CHECK(r["all_pass"] == true);
    CHECK(r["closed_form_tolerance"] == 1e-2);
    CHECK(r["rows"][0]["mc_pass"] == true);
    CHECK(r["mc_seed"] == 7);
    const json reseeded = run_json("--config " + data("double_no_touch.json") + " compare --seed 8");
    CHECK(reseeded["mc_seed"] == 8);
    CHECK(reseeded["rows"][0]["mc"] != r["rows"][0]["mc"]);

    r = run_json("--config " + data("cev_call.json") + " compare");
    CHECK(r["closed_form_tolerance"].is_null());
    CHECK(r["rows"][0]["closed_form"].is_null());
    CHECK(r["rows"][0]["mc_pass"] == true);
}

TEST_CASE("output file") {
    const auto out = std::filesystem::temp_directory_path() / "lvb_cli_out.json";
    CHECK(run("--config " + data("model_free.json") + " validate --out " + out.string()).code == 0);
    const json j = json::parse(slurp(out.string()));
    CHECK(j["rows"][0]["valid"] == true);
    std::filesystem::remove(out);
}

}

#include <doctest.h>

#include <json.hpp>

#include "sfflab/config.hpp"
#include "sfflab/errors.hpp"
#include "sfflab/io.hpp"
#include "sfflab/protocol.hpp"

using namespace sfflab;

TEST_CASE("config parsing, defaults, line-context errors") {
    Config cfg = Config::from_text(
        "# experiment\n[model]\nl = 8\nw = 2.0   # inline comment\n\n[plan]\nn = 50\n",
        "test.cfg");
    CHECK(cfg.integer("model", "l") == 8);
    CHECK(cfg.num("model", "w") == 2.0);
    CHECK(cfg.num_or("model", "delta", 0.8) == 0.8);
    CHECK(cfg.integer("plan", "n") == 50);
    cfg.reject_unknown();

    CHECK_THROWS_AS(Config::from_text("[model]\nl == 8\n", "x").num("model", "l"),
                    config_error);
    CHECK_THROWS_AS(Config::from_text("l = 8\n", "x"), config_error);  // no section
    CHECK_THROWS_AS(Config::from_text("[model]\nl = 8\nl = 9\n", "x"), config_error);

    Config bad = Config::from_text("[model]\nl = eight\n", "x");
    CHECK_THROWS_WITH_AS(bad.integer("model", "l"), doctest::Contains("line 2"),
                         config_error);

    Config leftovers = Config::from_text("[model]\nl = 8\nbogus = 1\n", "x");
    leftovers.integer("model", "l");
    CHECK_THROWS_WITH_AS(leftovers.reject_unknown(), doctest::Contains("bogus"),
                         config_error);
}

TEST_CASE("auto markers") {
    Config cfg = Config::from_text("[prep]\nt0 = auto\ndelta = center\nm = 3\n", "x");
    CHECK(!cfg.num_or_auto("prep", "t0").has_value());
    CHECK(!cfg.num_or_auto("prep", "delta").has_value());
    Config cfg2 = Config::from_text("[prep]\nt0 = 0.25\n", "x");
    CHECK(cfg2.num_or_auto("prep", "t0").value() == 0.25);
}

TEST_CASE("manifest json round-trips as a config") {
    Config cfg = Config::from_text("[model]\nl = 8\nw = 2\n[plan]\nn = 10\n", "orig");
    const nlohmann::json man = manifest_json("sff-exact", cfg, nullptr, 1.5);
    Config back = Config::from_text(man.dump(), "manifest");
    CHECK(back.str("model", "l") == "8");
    CHECK(back.str("plan", "n") == "10");
    CHECK(back.render() == cfg.render());
}

TEST_CASE("curve csv round-trip and validation") {
    SffCurve c;
    c.times = {0.1, 1.0, 10.0};
    c.k = {1.0, 0.123456789012345678, 3e-5};
    c.stderr_k = {0.0, 1e-3, 2e-6};
    c.meta.n_disorder = 7;
    const std::string text = curve_to_csv(c);
    const SffCurve back = curve_from_csv(text);
    CHECK(back.times == c.times);
    CHECK(back.k == c.k);  // full precision survives the text round trip
    CHECK(back.stderr_k == c.stderr_k);
    CHECK(back.meta.n_disorder == 7);

    CHECK_THROWS_AS(curve_from_csv("bad,header\n1,2\n"), config_error);
    CHECK_THROWS_AS(curve_from_csv("time,K,stderr,n_disorder\n2,1,0,1\n1,1,0,1\n"),
                    config_error);
}

TEST_CASE("experiment manifest carries the reproduction data") {
    ExperimentSpec spec;
    spec.model.sites = 6;
    spec.model.w = 1.0;
    spec.prep.steps = 2;
    spec.plan.shots = 10;
    spec.plan.disorders = 3;
    spec.plan.master_seed = 9;
    spec.times = TimeGrid::make(0.1, 10.0, 6, TimeGrid::Spacing::log);
    const ExperimentResult res = run_experiment(spec, 1);

    Config cfg = Config::from_text("[model]\nl = 6\n", "cfg");
    cfg.str("model", "l");
    const nlohmann::json man = manifest_json("sff-measure", cfg, &res, 0.1);
    CHECK(man["realizations"].size() == 3);
    CHECK(man["complete"] == true);
    CHECK(man["k_star"].get<double>() == doctest::Approx(k_star(10, 3)));
    for (const auto& r : man["realizations"]) {
        CHECK(r.contains("seed"));
        CHECK(r.contains("p_mc"));
        CHECK(r["prep_successes"].get<std::uint64_t>() > 0);
    }
}

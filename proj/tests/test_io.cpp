#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "loadcast/config.hpp"
#include "loadcast/errors.hpp"
#include "loadcast/export.hpp"
#include "loadcast/generator.hpp"
#include "loadcast/io.hpp"

using namespace loadcast;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("loadcast_test_io_" + name)) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string fmt_row(Timestamp t, double v) {
    std::ostringstream os;
    os << t.iso() << ',' << v << '\n';
    return os.str();
}

std::string load_csv(int n, int skip_every = 0, bool reverse = false) {
    std::vector<std::string> rows;
    for (int i = 0; i < n; ++i) {
        if (skip_every && i % skip_every == skip_every / 2) continue;
        rows.push_back(fmt_row(Timestamp::parse("2019-01-07") + i * 300, 1000.0 + i));
    }
    if (reverse) std::reverse(rows.begin(), rows.end());
    std::string out = "timestamp,power_w\n";
    for (const auto& r : rows) out += r;
    return out;
}

} // namespace

TEST_CASE("readings CSV parsing") {
    std::stringstream ok("timestamp,power_w\n2019-01-07T00:00:00,5\n2019-01-07 00:05,\n2019-01-07T00:10:00,nan\n");
    auto r = read_readings_csv(ok, "power_w", "mem");
    REQUIRE(r.size() == 3);
    CHECK(r[0].value == 5);
    CHECK(std::isnan(r[1].value));
    CHECK(std::isnan(r[2].value));

    std::stringstream bad("timestamp,power_w\n2019-01-07T00:00:00,5\n2019-01-07T00:05:00,abc\n");
    try {
        read_readings_csv(bad, "power_w", "mem.csv");
        FAIL("expected a DataError");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find("mem.csv:3") != std::string::npos);
    }
    std::stringstream header("time,value\n");
    CHECK_THROWS_AS(read_readings_csv(header, "power_w", "mem"), DataError);
}

TEST_CASE("quality report counts missing slots") {
    std::stringstream clean(load_csv(100));
    auto q = ingest_readings(read_readings_csv(clean, "power_w", "mem"), 300, false).quality;
    CHECK(q.missing_pct == 0.0);
    CHECK(q.native_step_seconds == 300);

    // Three interior rows removed out of 100 slots.
    std::string text = "timestamp,power_w\n";
    for (int i = 0; i < 100; ++i)
        if (i != 10 && i != 50 && i != 51) text += fmt_row(Timestamp::parse("2019-01-07") + i * 300, 7.0);
    std::stringstream gappy(text);
    auto g = ingest_readings(read_readings_csv(gappy, "power_w", "mem"), 300, false);
    CHECK(g.quality.slots == 100);
    CHECK(g.quality.missing_slots == 3);
    CHECK(g.quality.missing_pct == doctest::Approx(3.0));
    CHECK(g.quality.longest_gap == 2);

    std::stringstream rev(load_csv(100, 0, true));
    auto rv = ingest_readings(read_readings_csv(rev, "power_w", "mem"), 300, false);
    CHECK(rv.quality.reordered);
    CHECK(rv.series.values.front() == 1000.0);
    CHECK(rv.series.values.back() == 1099.0);
}

TEST_CASE("quality percentages match a brute-force recount") {
    std::string text = "timestamp,power_w\n";
    std::size_t raw = 0, dup = 0, bad = 0;
    std::set<int> present;
    for (int i = 0; i < 500; ++i) {
        if (i % 7 == 3) continue;
        const double v = (i % 11 == 5) ? -1.0 : 100.0;
        text += fmt_row(Timestamp::parse("2019-01-07") + i * 300, v);
        ++raw;
        if (v < 0) ++bad;
        if (i % 13 == 0) {
            text += fmt_row(Timestamp::parse("2019-01-07") + i * 300, 100.0);
            ++raw;
            ++dup;
        }
    }
    std::stringstream in(text);
    auto q = ingest_readings(read_readings_csv(in, "power_w", "mem"), 300, false).quality;
    CHECK(q.raw_readings == raw);
    CHECK(q.duplicates == dup);
    CHECK(q.double_pct == doctest::Approx(100.0 * static_cast<double>(dup) / static_cast<double>(raw)));
    CHECK(q.slots == 500);
    // Slots without a reading plus slots whose only reading was invalid (a later duplicate repairs none of these).
    std::size_t missing = 0;
    for (int i = 0; i < 500; ++i)
        if (i % 7 == 3 || (i % 11 == 5 && i % 13 != 0)) ++missing;
    CHECK(q.missing_slots == missing);
    CHECK(q.missing_pct == doctest::Approx(100.0 * static_cast<double>(missing) / 500.0));
}

TEST_CASE("ingest aggregates fine readings and checks temperature coverage") {
    TempDir dir("ingest");
    std::string load = "timestamp,power_w\n";
    for (int i = 0; i < 2 * 288 * 5; ++i) load += fmt_row(Timestamp::parse("2019-01-07") + i * 60, i % 5 == 0 ? 10.0 : 20.0);
    write_file(dir.path / "load.csv", load);
    std::string temp = "timestamp,temp_c\n";
    for (int i = 0; i <= 48; ++i) temp += fmt_row(Timestamp::parse("2019-01-07") + i * 3600, -3.0 + i * 0.1);
    write_file(dir.path / "temp.csv", temp);
    write_file(dir.path / "holidays.txt", "# test\n2019-01-08\n");
    auto r = ingest(dir.path / "load.csv", dir.path / "temp.csv", dir.path / "holidays.txt");
    CHECK(r.data.load.step_seconds == 300);
    CHECK(r.data.load.size() == 2 * 288);
    CHECK(r.data.load.values[0] == doctest::Approx(18.0));
    CHECK(r.data.temperature.step_seconds == 3600);
    CHECK(r.data.temperature.values.front() == -3.0);
    CHECK(r.data.holidays.contains(Date{2019, 1, 8}));
    CHECK(r.load_quality.native_step_seconds == 60);

    std::string short_temp = "timestamp,temp_c\n";
    for (int i = 0; i <= 24; ++i) short_temp += fmt_row(Timestamp::parse("2019-01-07") + i * 3600, 1.0);
    write_file(dir.path / "short.csv", short_temp);
    CHECK_THROWS_AS(ingest(dir.path / "load.csv", dir.path / "short.csv", std::nullopt), DataError);
    CHECK_THROWS_AS(ingest(dir.path / "missing.csv", dir.path / "temp.csv", std::nullopt), DataError);
}

TEST_CASE("series and holiday files round trip") {
    LoadSeries s{Timestamp::parse("2019-01-07"), 300, {1.5, 1.0 / 3.0, 1e6}};
    std::stringstream ss;
    write_series_csv(ss, s, "power_w");
    auto back = read_readings_csv(ss, "power_w", "mem");
    REQUIRE(back.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(back[i].time == s.time_at(i));
        CHECK(back[i].value == s.values[i]);
    }
    HolidaySet h;
    h.insert(Date{2019, 12, 25});
    h.insert(Date{2019, 1, 1});
    std::stringstream hs;
    write_holidays(hs, h);
    CHECK(read_holidays(hs, "mem").dates() == h.dates());
    std::stringstream bad("2019-13-01\n");
    CHECK_THROWS_AS(read_holidays(bad, "mem"), DataError);
}

TEST_CASE("generator hits the building targets for 100 seeds") {
    SyntheticBuildingSpec spec;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        spec.seed = seed;
        const auto load = gen_building_load(spec);
        CHECK(std::abs(load.mean() / 1000.0 - spec.mean_kw) <= 0.1 * spec.mean_kw);
        CHECK(std::abs(load.max() / 1000.0 - spec.max_kw) <= 0.1 * spec.max_kw);
        CHECK(std::abs(base_load(load) / 1000.0 - spec.base_kw) <= 0.1 * spec.base_kw);
    }
    spec.seed = 5;
    CHECK(gen_building_load(spec).values == gen_building_load(spec).values);
    spec.seed = 6;
    auto other = gen_building_load(spec);
    spec.seed = 5;
    CHECK(other.values != gen_building_load(spec).values);
}

TEST_CASE("noise-free generator gives the exact plateau and base pattern") {
    SyntheticBuildingSpec spec;
    spec.start = Timestamp::parse("2019-01-07");
    spec.days = 14;
    spec.noise = 0;
    spec.peaks_per_day = 0;
    spec.peak_at_max = false;
    const auto load = gen_building_load(spec);
    double plateau = -1;
    for (std::size_t i = 0; i < load.size(); ++i) {
        const Timestamp t = load.time_at(i);
        const auto sod = t.second_of_day();
        if (sod < spec.rise_start_s || sod >= spec.fall_end_s) CHECK(load.values[i] == spec.base_kw * 1000.0);
        if (t.weekday() <= 5 && sod >= spec.rise_end_s && sod < spec.fall_start_s) {
            if (plateau < 0) plateau = load.values[i];
            CHECK(load.values[i] == plateau);
        }
    }
    CHECK(load.mean() == doctest::Approx(spec.mean_kw * 1000.0).epsilon(1e-12));
}

TEST_CASE("generator spec validation") {
    SyntheticBuildingSpec spec;
    spec.base_kw = 25;
    CHECK_THROWS_AS(spec.validate(), ConfigError);
    CHECK_THROWS_AS(gen_building_load(spec), ConfigError);
    spec = {};
    spec.max_kw = 10;
    CHECK_THROWS_AS(spec.validate(), ConfigError);
}

TEST_CASE("temperature generator") {
    SyntheticWeatherSpec w;
    w.days = 3;
    const auto t = gen_temperature(w);
    CHECK(t.size() == 3 * 24 + 1);
    CHECK(t.step_seconds == 3600);
    CHECK(t.values == gen_temperature(w).values);
}

TEST_CASE("config parsing") {
    auto c = parse_config(nlohmann::json::parse(R"({"step_s": 300, "horizon_steps": 144, "window_days": 30,
        "forecasters": ["slp", "lstm:2x16"], "nn_refit": "step", "pslp_refit": "06:30", "seed": 9,
        "train": {"max_epochs": 100, "patience": 10, "learning_rate": 0.01},
        "ev": {"stations": [3], "strategy": ["controlled"], "limit_w": 90000, "seed": 77}})"));
    CHECK(c.engine.horizon_steps == 144);
    CHECK(c.engine.nn_refit_seconds == 300);
    CHECK(c.engine.pslp_refit_second_of_day == 6 * 3600 + 1800);
    CHECK(c.seed == 9);
    CHECK(c.train.max_epochs == 100);
    CHECK(c.ev.stations == std::vector<std::size_t>{3});
    CHECK(*c.ev.limit_w == 90000.0);
    CHECK(c.ev.sessions.seed == 77);
    CHECK(c.train.seed == 9);

    const auto j = to_json(c);
    CHECK(to_json(parse_config(j)) == j);
    nlohmann::json manifest{{"format", "loadcast-manifest"}, {"config", j}};
    CHECK(to_json(parse_config(manifest)) == j);

    CHECK_THROWS_AS(parse_config(nlohmann::json::parse(R"({"windw_days": 3})")), ConfigError);
    CHECK_THROWS_AS(parse_config(nlohmann::json::parse(R"({"train": {"epochs": 3}})")), ConfigError);
    CHECK_THROWS_AS(parse_config(nlohmann::json::parse(R"({"pslp_refit": "25:00"})")), ConfigError);
    CHECK_THROWS_AS(parse_forecaster_spec("gru:1x8", 12), ConfigError);
    CHECK(parse_forecaster_spec("ffnn:4x8", 12).network->hidden_layers == 4);
    CHECK(parse_forecaster_spec("lstm:7x8", 12).network->kind == NetworkKind::Lstm);

    RunConfig bad;
    bad.engine.horizon_steps = 400;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    RunConfig dup;
    dup.forecasters = {"slp", "slp"};
    CHECK_THROWS_AS(dup.validate(), ConfigError);
}

TEST_CASE("sha256 digests") {
    std::stringstream abc("abc");
    CHECK(sha256_hex(abc) == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    std::stringstream empty("");
    CHECK(sha256_hex(empty) == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_CASE("run directory is created atomically") {
    TempDir base("rundir");
    const fs::path target = base.path / "run";
    {
        RunDirectory dir(target, false);
        write_file(dir.file("a.txt"), "x");
        CHECK_FALSE(fs::exists(target));
        CHECK(dir.files() == std::vector<std::string>{"a.txt"});
        dir.commit();
    }
    CHECK(read_file(target / "a.txt") == "x");
    CHECK_THROWS_AS(RunDirectory(target, false), ConfigError);
    {
        RunDirectory dir(target, true);
        write_file(dir.file("b.txt"), "y");
        CHECK(fs::exists(target / "a.txt"));
        dir.commit();
    }
    CHECK_FALSE(fs::exists(target / "a.txt"));
    CHECK(fs::exists(target / "b.txt"));
    {
        RunDirectory abandoned(base.path / "never", false);
        write_file(abandoned.file("c.txt"), "z");
    }
    CHECK_FALSE(fs::exists(base.path / "never"));
    for (const auto& e : fs::directory_iterator(base.path)) CHECK(e.path().filename() == "run");
    fs::create_directories(base.path / "empty");
    CHECK_NOTHROW(RunDirectory(base.path / "empty", false));
}

TEST_CASE("driver profiles round trip") {
    SessionGenConfig g;
    const auto profiles = random_driver_profiles(g);
    TempDir dir("profiles");
    {
        std::ofstream out(dir.path / "p.csv", std::ios::binary);
        write_driver_profiles(out, profiles);
    }
    const auto back = read_driver_profiles(dir.path / "p.csv");
    REQUIRE(back.size() == profiles.size());
    for (std::size_t i = 0; i < back.size(); ++i) {
        CHECK(back[i].commute_km == profiles[i].commute_km);
        CHECK(back[i].arrival_offset_s == profiles[i].arrival_offset_s);
        CHECK(back[i].vehicle.battery_kwh == profiles[i].vehicle.battery_kwh);
        CHECK(back[i].vehicle.max_charge_w == profiles[i].vehicle.max_charge_w);
    }
    write_file(dir.path / "bad.csv", "id,commute_km,arrival_offset_s,departure_offset_s,battery_kwh,max_charge_w\n1,2,3\n");
    CHECK_THROWS_AS(read_driver_profiles(dir.path / "bad.csv"), DataError);
}

TEST_CASE("export formats") {
    CHECK(format_duration(3600 + 29 * 60 + 40) == "01:30");
    CHECK(format_duration(0) == "00:00");
    std::vector<ErrorReport> reports(2);
    reports[0].issued_at = Timestamp::parse("2019-01-14");
    reports[0].h = 288;
    reports[0].mae_w = 1.5;
    reports[0].rmse_w = 2;
    reports[0].mase = 0.25;
    std::stringstream ss;
    write_metrics_csv(ss, reports);
    CHECK(ss.str() ==
          "issued_at,h,mae_w,rmse_w,mape_pct,mase\n2019-01-14T00:00:00,288,1.5,2,,0.25\n1970-01-01T00:00:00,0,0,0,,\n");
}

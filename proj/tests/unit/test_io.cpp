#include <rccat/datagen.hpp>
#include <rccat/detector.hpp>
#include <rccat/io.hpp>

#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>
#include <string>

using namespace rccat;

namespace {

TimeSeries parse(const std::string& text) {
    std::istringstream in(text);
    return parse_csv(in);
}

std::size_t parse_error_line(const std::string& text) {
    try {
        parse(text);
    } catch (const ParseError& e) {
        return e.line();
    }
    return SIZE_MAX;
}

} // namespace

TEST(Csv, HeaderAndPlainForms) {
    EXPECT_EQ(parse("value\n1.0\n2.0\n"), TimeSeries({1.0, 2.0}));
    EXPECT_EQ(parse("1.0\n+2.5\n\n-3\n"), TimeSeries({1.0, 2.5, -3.0}));
    const auto ts = parse("t,value\n0.5,1\n1.5,2\n");
    ASSERT_TRUE(ts.timestamps());
    EXPECT_EQ(*ts.timestamps(), (std::vector<double>{0.5, 1.5}));
    EXPECT_EQ(parse("value,t\r\n7,1\r\n8,2\r\n").values()[1], 8.0);
    EXPECT_EQ(parse("3,10\n4,11\n").values()[0], 10.0);
}

TEST(Csv, ErrorsCarryLineNumbers) {
    EXPECT_EQ(parse_error_line("value\n1.0\nnan\n"), 3u);
    EXPECT_EQ(parse_error_line("value\n1.0\nabc\n"), 3u);
    EXPECT_EQ(parse_error_line("t,value\n1,1\n1,2\n"), 3u);
    EXPECT_EQ(parse_error_line("1,2\n3\n"), 2u);
    EXPECT_EQ(parse_error_line("a,b,c\n"), 1u);
    EXPECT_EQ(parse_error_line("foo\n1\n"), 1u);
    EXPECT_EQ(parse_error_line("value\n1\ninf\n"), 3u);
    EXPECT_THROW(parse(""), ParseError);
    EXPECT_THROW(parse("value\n"), ParseError);
    EXPECT_THROW(load_csv("/nonexistent/file.csv"), ParseError);
}

TEST(Csv, RoundTrip) {
    SignalSpec spec;
    spec.tau = {500, 1000};
    spec.segment_means = {0, 2, 0};
    const auto s = gen_signal(spec, 8).series;
    std::stringstream buf;
    write_csv(s, buf);
    const auto back = parse_csv(buf);
    ASSERT_EQ(back.size(), s.size());
    for (std::size_t i = 0; i < s.size(); ++i) EXPECT_NEAR(back.values()[i], s.values()[i], 1e-12);
    EXPECT_EQ(back, s);

    const TimeSeries timed({1.0, 2.0, 3.0}, std::vector<double>{0.1, 0.2, 0.35});
    std::stringstream buf2;
    write_csv(timed, buf2);
    EXPECT_EQ(parse_csv(buf2), timed);
}

TEST(Report, JsonRoundTrip) {
    SignalSpec spec;
    spec.tau = {300};
    spec.segment_means = {0, 3};
    spec.n = 600;
    const auto s = gen_signal(spec, 1).series;
    const auto r = detect(s, DetectorConfig{50, 0.7, 2.0, 1.3});
    const auto back = report_from_json(Json::parse(report_to_json(r, Json{{"note", "x"}}).dump()));
    EXPECT_EQ(back, r);

    const auto path = std::filesystem::temp_directory_path() / "rccat_report_test.json";
    write_report(r, path.string());
    EXPECT_EQ(read_report(path.string()), r);
    std::filesystem::remove(path);
}

TEST(Report, SchemaFields) {
    DetectionReport r;
    r.trace = ScanTrace{5, {0.1, 0.2}};
    const auto j = report_to_json(r);
    EXPECT_EQ(j.at("schema_version"), kReportSchemaVersion);
    EXPECT_EQ(j.at("version"), kVersion);
    EXPECT_EQ(j.at("n"), 12);
    EXPECT_EQ(j.at("trace").at("first_index"), 6);
    Json bad = j;
    bad["schema_version"] = 99;
    EXPECT_THROW(report_from_json(bad), ParseError);
    Json missing = j;
    missing.erase("config");
    EXPECT_THROW(report_from_json(missing), ParseError);
}

TEST(Report, TraceCsv) {
    DetectionReport r;
    r.trace = ScanTrace{2, {0.5, 1.5, 0.25}};
    r.candidates = {4};
    r.change_points = {4};
    std::ostringstream out;
    write_trace_csv(r, out, {4});
    EXPECT_EQ(out.str(), "j,score,candidate,detected,truth\n3,0.5,0,0,0\n4,1.5,1,1,1\n5,0.25,0,0,0\n");
}

TEST(Truth, RoundTrip) {
    const GroundTruth gt{100, {40, 70}, {0.0, 1.5, -1.0}};
    std::vector<bool> mask(100, false);
    mask[4] = true;
    const auto j = truth_to_json(gt, mask);
    EXPECT_EQ(j.at("corrupted"), Json::array({5}));
    EXPECT_EQ(truth_from_json(j), gt);
    EXPECT_THROW(truth_from_json(Json{{"n", 5}}), ParseError);
}

TEST(Config, KeyValueFile) {
    std::istringstream in("# comment\nw = 120\n\neta=0.2   # trailing\n  means = -1,1,-1\n");
    const auto kv = parse_config(in);
    ASSERT_EQ(kv.size(), 3u);
    EXPECT_EQ(kv[0], (std::pair<std::string, std::string>{"w", "120"}));
    EXPECT_EQ(kv[1].second, "0.2");
    EXPECT_EQ(kv[2].second, "-1,1,-1");
    std::istringstream bad("w 120\n");
    try {
        parse_config(bad);
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 1u);
    }
}

TEST(Format, ShortestRoundTrip) {
    for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5e17, 100.0}) EXPECT_EQ(*detail::parse_double(format_double(v)), v);
    EXPECT_EQ(format_double(100.0), "100");
}

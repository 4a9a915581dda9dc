#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <set>
#include <string>
#include <vector>

#include <doctest.h>
#include <json.hpp>

#include "imbal/bench.hpp"
#include "imbal/error.hpp"

using namespace imbal;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(bool(in));
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

std::size_t count_occurrences(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (std::size_t pos = text.find(needle); pos != std::string::npos;
       pos = text.find(needle, pos + needle.size()))
    ++n;
  return n;
}

std::string tmp_dir(const std::string& tag) {
  std::string dir = std::string("/tmp/imbal_bench_") + tag;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

// Two overlapping blobs, 60/30, far enough apart that a small forest learns
// something but close enough that scores vary across repetitions.
GenSpec small_gen(double separation = 2.5, std::uint64_t seed = 91) {
  GenSpec g;
  g.n_features = 2;
  g.seed = seed;
  g.classes = {ClassSpec{60, {GaussComponent{{0.0, 0.0}, {1.0, 1.0}, 1.0}}},
               ClassSpec{30, {GaussComponent{{separation, separation}, {1.0, 1.0}, 1.0}}}};
  return g;
}

BenchConfig small_config(std::vector<BenchTechnique> techniques, int reps = 3) {
  BenchConfig cfg;
  BenchDataset d;
  d.id = "blobs";
  d.gen = small_gen();
  d.baseline_params["n_estimators"] = 5;
  cfg.datasets = {d};
  cfg.techniques = std::move(techniques);
  cfg.repetitions = reps;
  cfg.master_seed = 404;
  cfg.timing = false;  // reports become a pure function of the seed
  return cfg;
}

bool rows_identical(const std::vector<BenchRow>& a, const std::vector<BenchRow>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].dataset != b[i].dataset || a[i].technique != b[i].technique) return false;
    if (a[i].mean_f1 != b[i].mean_f1 || a[i].vmr != b[i].vmr) return false;
    if (a[i].improvement_pct != b[i].improvement_pct) return false;
    if (a[i].reps != b[i].reps || a[i].status != b[i].status) return false;
    if (a[i].f1_per_rep != b[i].f1_per_rep) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("bench: config json parses entries, defaults, and baseline injection") {
  std::string text = R"({
    "master_seed": 7,
    "repetitions": 12,
    "datasets": [
      {"id": "det", "analog": "detection"},
      {"id": "ident", "analog": "identification"},
      {"id": "inline", "gen": {"n_features": 1, "seed": 3,
        "classes": [{"count": 4, "components": [{"mean": [0], "variance": [1]}]},
                     {"count": 2, "components": [{"mean": [2], "variance": [1]}]}]},
       "baseline": "mlp", "baseline_params": {"epochs": 10}}
    ],
    "techniques": ["rus", {"id": "bagging", "params": {"n_estimators": 4}}]
  })";
  BenchConfig cfg = bench_config_from_json(text);
  CHECK(cfg.master_seed == 7);
  CHECK(cfg.repetitions == 12);
  CHECK(cfg.test_fraction == doctest::Approx(0.2));
  CHECK(cfg.tuning_fraction == doctest::Approx(0.2));
  CHECK(cfg.averaging == "mean");
  CHECK(cfg.timing);
  CHECK(cfg.parallel == 1);

  REQUIRE(cfg.datasets.size() == 3);
  CHECK(cfg.datasets[0].baseline == "forest");       // detection analog default
  CHECK(cfg.datasets[1].baseline == "mlp");          // identification analog default
  CHECK(cfg.datasets[2].baseline == "mlp");          // explicit
  CHECK(cfg.datasets[2].baseline_params.at("epochs") == 10);
  CHECK(cfg.datasets[0].gen.has_value());
  CHECK(cfg.datasets[0].gen->classes[0].count == 7859);
  CHECK(cfg.datasets[2].gen->classes[1].count == 2);

  // baseline gets prepended, listed techniques keep their params
  REQUIRE(cfg.techniques.size() == 3);
  CHECK(cfg.techniques[0].id == "baseline");
  CHECK(cfg.techniques[1].id == "rus");
  CHECK(cfg.techniques[2].id == "bagging");
  CHECK(cfg.techniques[2].params.at("n_estimators") == 4);
}

TEST_CASE("bench: malformed configs are ConfigError before anything runs") {
  auto code_of = [](const std::string& text) {
    try {
      bench_config_from_json(text);
    } catch (const ImbError& e) {
      return e.code();
    }
    return ErrorCode::Ok;
  };
  CHECK(code_of("not json at all") == ErrorCode::ConfigError);
  CHECK(code_of("[1,2]") == ErrorCode::ConfigError);
  CHECK(code_of(R"({"datasets": []})") == ErrorCode::ConfigError);
  // unknown top-level key (typo protection)
  CHECK(code_of(R"({"datasets": [{"id":"a","analog":"detection"}], "repititions": 3})") ==
        ErrorCode::ConfigError);
  // unknown technique id fails fast
  CHECK(code_of(R"({"datasets": [{"id":"a","analog":"detection"}], "techniques": ["nope"]})") ==
        ErrorCode::ConfigError);
  // duplicate dataset ids
  CHECK(code_of(R"({"datasets": [{"id":"a","analog":"detection"},
                                 {"id":"a","analog":"detection"}]})") == ErrorCode::ConfigError);
  // duplicate technique ids
  CHECK(code_of(R"({"datasets": [{"id":"a","analog":"detection"}],
                    "techniques": ["rus", "rus"]})") == ErrorCode::ConfigError);
  // bad id charset
  CHECK(code_of(R"({"datasets": [{"id":"bad id!","analog":"detection"}]})") ==
        ErrorCode::ConfigError);
  // fractions must leave room for the training split
  CHECK(code_of(R"({"datasets": [{"id":"a","analog":"detection"}],
                    "test_fraction": 0.6, "tuning_fraction": 0.4})") == ErrorCode::ConfigError);
  CHECK(code_of(R"({"datasets": [{"id":"a","analog":"detection"}], "repetitions": 0})") ==
        ErrorCode::ConfigError);
  CHECK(code_of(R"({"datasets": [{"id":"a","analog":"wrong"}]})") == ErrorCode::ConfigError);
  CHECK(code_of(R"({"datasets": [{"id":"a","analog":"detection","csv":"x.csv"}]})") ==
        ErrorCode::ConfigError);
  CHECK(code_of(R"({"datasets": [{"id":"a","csv":"x.csv"}]})") == ErrorCode::ConfigError);
  CHECK(code_of(R"({"datasets": [{"id":"a","analog":"detection"}], "averaging": "mode"})") ==
        ErrorCode::ConfigError);
  CHECK(code_of(R"({"datasets": [{"id":"a","analog":"detection"}], "techniques": [3]})") ==
        ErrorCode::ConfigError);
}

TEST_CASE("bench: registry covers every technique family") {
  std::vector<std::string> ids = registered_techniques();
  std::set<std::string> got(ids.begin(), ids.end());
  for (const char* required :
       {"baseline", "ros", "smote", "adasyn", "rus", "cluster_centroids", "smote_tomek",
        "massaging", "perturbation", "cluster_massaging", "cvae", "weighted", "focal",
        "weighted_focal", "bagging", "boosting", "brf", "balanced_epochs", "meta",
        "threshold_adjustment", "cost_threshold", "reweighting", "isotonic", "sample_weighting"})
    CHECK(got.count(required) == 1);
  CHECK(std::is_sorted(ids.begin(), ids.end()));
}

TEST_CASE("bench: run produces sorted, reproducible rows with exact baseline zero") {
  BenchConfig cfg = small_config({{"threshold_adjustment", {{"delta", 0.05}}},
                                  {"baseline", {}},
                                  {"rus", {}}});
  std::vector<BenchRow> rows = run_benchmark(cfg);
  REQUIRE(rows.size() == 3);
  // sorted by (dataset, technique)
  CHECK(rows[0].technique == "baseline");
  CHECK(rows[1].technique == "rus");
  CHECK(rows[2].technique == "threshold_adjustment");
  for (const auto& r : rows) {
    CHECK(r.dataset == "blobs");
    CHECK(r.status == "ok");
    CHECK(r.reps == 3);
    CHECK(r.f1_per_rep.size() == 3);
    CHECK(r.mean_f1 >= 0.0);
    CHECK(r.mean_f1 <= 1.0);
    CHECK(r.vmr >= 0.0);
    CHECK(r.train_ms == 0.0);  // timing disabled
    CHECK(r.infer_ms_per_1k == 0.0);
  }
  CHECK(rows[0].improvement_pct == 0.0);  // baseline row, exact
  if (rows[0].mean_f1 > 0.0)
    CHECK(rows[1].improvement_pct ==
          doctest::Approx((rows[1].mean_f1 - rows[0].mean_f1) / rows[0].mean_f1 * 100.0));

  CHECK(rows_identical(rows, run_benchmark(cfg)));

  // technique order in the config must not matter
  BenchConfig shuffled = small_config({{"rus", {}},
                                       {"threshold_adjustment", {{"delta", 0.05}}},
                                       {"baseline", {}}});
  CHECK(rows_identical(rows, run_benchmark(shuffled)));
}

TEST_CASE("bench: baseline cell is untouched by which other techniques run") {
  BenchConfig alone = small_config({{"baseline", {}}});
  BenchConfig crowd = small_config({{"baseline", {}}, {"rus", {}}, {"smote", {}}});
  std::vector<BenchRow> a = run_benchmark(alone);
  std::vector<BenchRow> b = run_benchmark(crowd);
  REQUIRE(a.size() == 1);
  REQUIRE(b.size() == 3);
  CHECK(a[0].technique == "baseline");
  CHECK(b[0].technique == "baseline");
  CHECK(a[0].f1_per_rep == b[0].f1_per_rep);  // shared split/model seeds, bit-exact
}

TEST_CASE("bench: failing technique degrades to an n/a cell and the run continues") {
  BenchConfig cfg = small_config({{"baseline", {}}, {"adasyn", {}}}, 2);
  // Push the blobs far apart: every minority neighborhood is pure, so ADASYN
  // finds no boundary samples.
  cfg.datasets[0].gen = small_gen(40.0);
  std::vector<BenchRow> rows = run_benchmark(cfg);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].technique == "adasyn");
  CHECK(rows[0].status == "n/a: NoBoundarySamples");
  CHECK(rows[0].reps == 0);
  CHECK(rows[0].mean_f1 == 0.0);
  CHECK(rows[0].improvement_pct == 0.0);
  CHECK(rows[1].technique == "baseline");
  CHECK(rows[1].status == "ok");
  CHECK(rows[1].reps == 2);
}

TEST_CASE("bench: unknown technique id fails fast from a hand-built config") {
  BenchConfig cfg = small_config({{"definitely_not_registered", {}}});
  CHECK_THROWS_AS(run_benchmark(cfg), ImbError);
}

TEST_CASE("bench: parallel workers reproduce the single-worker rows") {
  BenchConfig cfg = small_config({{"baseline", {}}, {"rus", {}}, {"reweighting", {}}}, 2);
  std::vector<BenchRow> serial = run_benchmark(cfg);
  cfg.parallel = 3;
  std::vector<BenchRow> parallel = run_benchmark(cfg);
  CHECK(rows_identical(serial, parallel));
}

TEST_CASE("bench: csv report format, 6 significant digits, and round trips") {
  std::string dir = tmp_dir("report");
  BenchRow base;
  base.dataset = "ds";
  base.technique = "baseline";
  base.mean_f1 = 0.123456789;  // must serialize as 0.123457
  base.vmr = 0.000123456789;
  base.train_ms = 12345.6789;
  base.infer_ms_per_1k = 0.98765432;
  base.improvement_pct = 0.0;
  base.reps = 100;
  BenchRow na;
  na.dataset = "ds";
  na.technique = "adasyn";
  na.status = "n/a: NoBoundarySamples";
  std::vector<BenchRow> rows = {base, na};

  std::string csv_path = dir + "/rows.csv";
  emit_report(rows, ReportFormat::csv, csv_path);
  std::string text = slurp(csv_path);
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t nl = text.find('\n', start);
    lines.push_back(text.substr(start, nl - start));
    start = nl + 1;
  }
  REQUIRE(lines.size() == 3);  // header + 2 rows
  CHECK(lines[0] == "dataset,technique,mean_f1,vmr,train_ms,infer_ms_per_1k,improvement_pct,reps,status");
  CHECK(lines[1] == "ds,baseline,0.123457,0.000123457,12345.7,0.987654,0,100,ok");
  CHECK(lines[2] == "ds,adasyn,0,0,0,0,0,0,n/a: NoBoundarySamples");

  // CSV -> rows -> CSV is byte-stable
  std::vector<BenchRow> loaded = load_report_csv(csv_path);
  REQUIRE(loaded.size() == 2);
  CHECK(loaded[0].mean_f1 == doctest::Approx(0.123457).epsilon(1e-12));
  CHECK(loaded[0].reps == 100);
  CHECK(loaded[1].status == "n/a: NoBoundarySamples");
  std::string csv_path2 = dir + "/rows2.csv";
  emit_report(loaded, ReportFormat::csv, csv_path2);
  CHECK(slurp(csv_path2) == text);

  // JSON mirrors the CSV values exactly (both carry 6 significant digits)
  std::string json_path = dir + "/rows.json";
  emit_report(rows, ReportFormat::json, json_path);
  nlohmann::json arr = nlohmann::json::parse(slurp(json_path));
  REQUIRE(arr.is_array());
  REQUIRE(arr.size() == 2);
  CHECK(arr[0]["dataset"] == "ds");
  CHECK(arr[0]["mean_f1"].get<double>() == 0.123457);
  CHECK(arr[0]["train_ms"].get<double>() == 12345.7);
  CHECK(arr[0]["reps"].get<int>() == 100);
  CHECK(arr[1]["status"].get<std::string>() == "n/a: NoBoundarySamples");

  // JSON -> CSV -> JSON preserves every value at 6 significant digits
  std::string json_path2 = dir + "/rows_from_csv.json";
  emit_report(loaded, ReportFormat::json, json_path2);
  CHECK(slurp(json_path2) == slurp(json_path));

  CHECK_THROWS_AS(emit_report({}, ReportFormat::csv, dir + "/x.csv"), ImbError);
  CHECK_THROWS_AS(emit_report(rows, ReportFormat::csv, dir + "/nodir/x.csv"), ImbError);
  CHECK_THROWS_AS(load_report_csv(dir + "/missing.csv"), ImbError);

  std::ofstream bad(dir + "/bad.csv");
  bad << "wrong,header\n";
  bad.close();
  CHECK_THROWS_AS(load_report_csv(dir + "/bad.csv"), ImbError);
}

TEST_CASE("bench: f1 chart has one bar per ok row, ordered like the scores") {
  BenchRow base;
  base.dataset = "ds";
  base.technique = "baseline";
  base.mean_f1 = 0.5;
  BenchRow better;
  better.dataset = "ds";
  better.technique = "smote";
  better.mean_f1 = 0.8;
  better.improvement_pct = 60.0;
  better.infer_ms_per_1k = 2.5;
  BenchRow failed;
  failed.dataset = "ds";
  failed.technique = "adasyn";
  failed.status = "n/a: NoBoundarySamples";

  SUBCASE("one technique + baseline gives exactly two bars") {
    std::string svg = render_f1_chart({base, better});
    CHECK(count_occurrences(svg, "class=\"bar\"") == 2);
    CHECK(svg.find("version=\"1.1\"") != std::string::npos);
    CHECK(svg.find("xmlns=\"http://www.w3.org/2000/svg\"") != std::string::npos);
    CHECK(svg == render_f1_chart({base, better}));  // byte-identical rerun
  }

  SUBCASE("bar heights are ordered identically to mean F1") {
    std::string svg = render_f1_chart({base, better, failed});
    CHECK(count_occurrences(svg, "class=\"bar\"") == 2);  // n/a row draws no bar
    CHECK(count_occurrences(svg, ">n/a<") == 1);
    std::vector<double> heights;
    std::size_t pos = 0;
    while ((pos = svg.find("class=\"bar\"", pos)) != std::string::npos) {
      std::size_t h = svg.find("height=\"", pos);
      heights.push_back(std::strtod(svg.c_str() + h + 8, nullptr));
      pos = h;
    }
    REQUIRE(heights.size() == 2);
    CHECK(heights[0] < heights[1]);  // 0.5 bar shorter than 0.8 bar
    CHECK(heights[1] == doctest::Approx(heights[0] * 0.8 / 0.5));
    // dashed baseline reference line present
    CHECK(svg.find("stroke-dasharray") != std::string::npos);
  }

  SUBCASE("tradeoff chart draws improvement bars and timing markers") {
    BenchRow worse = better;
    worse.technique = "rus";
    worse.mean_f1 = 0.4;
    worse.improvement_pct = -20.0;
    worse.infer_ms_per_1k = 1.0;
    std::string svg = render_tradeoff_chart({base, better, worse, failed});
    CHECK(count_occurrences(svg, "class=\"impbar\"") == 3);
    CHECK(count_occurrences(svg, "class=\"marker\"") == 3);
    CHECK(svg.find("#c0504d") != std::string::npos);  // negative bar color
    CHECK(svg == render_tradeoff_chart({base, better, worse, failed}));
  }

  SUBCASE("charts refuse empty or mixed-dataset rows") {
    CHECK_THROWS_AS(render_f1_chart({}), ImbError);
    BenchRow other = base;
    other.dataset = "other";
    CHECK_THROWS_AS(render_f1_chart({base, other}), ImbError);
  }
}

TEST_CASE("bench: emit_charts writes per-dataset files byte-identically") {
  std::string dir = tmp_dir("charts");
  BenchRow a1;
  a1.dataset = "alpha";
  a1.technique = "baseline";
  a1.mean_f1 = 0.6;
  BenchRow a2 = a1;
  a2.technique = "rus";
  a2.mean_f1 = 0.7;
  a2.improvement_pct = 16.6667;
  BenchRow b1;
  b1.dataset = "beta";
  b1.technique = "baseline";
  b1.mean_f1 = 0.9;
  std::vector<BenchRow> rows = {a1, a2, b1};

  emit_charts(rows, dir);
  for (const char* name : {"f1_alpha.svg", "tradeoff_alpha.svg", "f1_beta.svg",
                           "tradeoff_beta.svg"})
    CHECK(std::filesystem::exists(dir + "/" + name));
  CHECK(slurp(dir + "/f1_alpha.svg") == render_f1_chart({a1, a2}));

  std::string before = slurp(dir + "/tradeoff_alpha.svg");
  emit_charts(rows, dir);  // rerun over the same rows
  CHECK(slurp(dir + "/tradeoff_alpha.svg") == before);
}

TEST_CASE("bench: end-to-end run emits byte-identical reports across runs") {
  BenchConfig cfg = small_config({{"baseline", {}}, {"rus", {}}}, 2);
  std::string dir1 = tmp_dir("e2e_run1");
  std::string dir2 = tmp_dir("e2e_run2");
  for (const std::string& dir : {dir1, dir2}) {
    std::vector<BenchRow> rows = run_benchmark(cfg);
    emit_report(rows, ReportFormat::csv, dir + "/rows.csv");
    emit_report(rows, ReportFormat::json, dir + "/rows.json");
    emit_charts(rows, dir);
  }
  for (const char* name : {"/rows.csv", "/rows.json", "/f1_blobs.svg", "/tradeoff_blobs.svg"})
    CHECK(slurp(dir1 + name) == slurp(dir2 + name));
}

TEST_CASE("bench: csv-backed datasets run through the same engine") {
  // Materialize the generated blobs, write them to disk, and point a config
  // at the file; the loaded dataset must reproduce the generated one.
  std::string dir = tmp_dir("csvds");
  BenchDataset gen_entry;
  gen_entry.id = "blobs";
  gen_entry.gen = small_gen();
  Dataset generated = materialize_dataset(gen_entry);
  save_csv(dir + "/blobs.csv", generated, default_schema(generated));

  BenchDataset csv_entry;
  csv_entry.id = "blobs";
  csv_entry.csv_path = dir + "/blobs.csv";
  csv_entry.schema = default_schema(generated);
  Dataset loaded = materialize_dataset(csv_entry);
  REQUIRE(loaded.n_samples() == generated.n_samples());
  CHECK(loaded.features == generated.features);
  CHECK(loaded.labels == generated.labels);

  BenchConfig cfg = small_config({{"baseline", {}}}, 2);
  cfg.datasets[0] = csv_entry;
  cfg.datasets[0].baseline_params["n_estimators"] = 5;
  BenchConfig gen_cfg = small_config({{"baseline", {}}}, 2);
  std::vector<BenchRow> from_csv = run_benchmark(cfg);
  std::vector<BenchRow> from_gen = run_benchmark(gen_cfg);
  CHECK(from_csv[0].f1_per_rep == from_gen[0].f1_per_rep);
}

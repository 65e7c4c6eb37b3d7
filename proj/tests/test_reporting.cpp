#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <sstream>
#include <vector>

#include "morpho.hpp"

using namespace morpho;

namespace {

std::vector<RunMetrics> runs_of(const std::vector<double>& errs) {
  std::vector<RunMetrics> out;
  for (std::size_t i = 0; i < errs.size(); ++i) out.push_back({"centroid", i, {}, errs[i], 10});
  return out;
}

double two_pass_pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) mx += x[i], my += y[i];
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

TrackSpec short_track() {
  TrackSpec s;
  s.run.arena = {120, 120, 18.0};
  s.run.population = 300;
  s.run.init_window = 30;
  s.run.max_steps = 300;
  return s;
}

}  // namespace

TEST(Aggregate, ConstantErrors) {
  const auto runs = runs_of({3, 3, 3});
  const BatchSummary s = aggregate(runs);
  EXPECT_EQ(s.runs, 3u);
  EXPECT_DOUBLE_EQ(s.mae, 3.0);
  EXPECT_DOUBLE_EQ(s.sigma, 0.0);
  EXPECT_FALSE(s.rho);
}

TEST(Aggregate, PopulationSigma) {
  const auto runs = runs_of({0, 4});
  const BatchSummary s = aggregate(runs);
  EXPECT_DOUBLE_EQ(s.mae, 2.0);
  EXPECT_DOUBLE_EQ(s.sigma, 2.0);
}

TEST(Aggregate, EmptyIsInputError) {
  EXPECT_THROW(aggregate(std::vector<RunMetrics>{}), InputError);
}

TEST(Aggregate, PermutationInvariant) {
  Rng rng(1);
  std::vector<double> errs(40);
  for (double& e : errs) e = rng.uniform(0.0, 10.0);
  const BatchSummary a = aggregate(runs_of(errs));
  std::shuffle(errs.begin(), errs.end(), rng.engine());
  const BatchSummary b = aggregate(runs_of(errs));
  EXPECT_NEAR(a.mae, b.mae, 1e-12);
  EXPECT_NEAR(a.sigma, b.sigma, 1e-12);
}

TEST(Aggregate, CorrelationAgainstCovariate) {
  const auto runs = runs_of({1, 2, 3, 4});
  const std::vector<double> cov{2, 4, 6, 8};
  const BatchSummary s = aggregate(runs, cov);
  ASSERT_TRUE(s.rho);
  EXPECT_NEAR(*s.rho, 1.0, 1e-12);
}

TEST(Pearson, PerfectLinear) {
  std::vector<double> x, y, z;
  for (int i = 0; i < 50; ++i) {
    x.push_back(i);
    y.push_back(2.0 * i + 1.0);
    z.push_back(-i);
  }
  EXPECT_NEAR(pearson(x, y), 1.0, 1e-12);
  EXPECT_NEAR(pearson(x, z), -1.0, 1e-12);
}

TEST(Pearson, IndependentSamplesNearZero) {
  Rng rng(2);
  std::vector<double> x(10000), y(10000);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = rng.uniform(), y[i] = rng.uniform();
  EXPECT_LT(std::abs(pearson(x, y)), 0.05);
}

TEST(Pearson, MatchesTwoPassFormula) {
  Rng rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + rng.below(200);
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = rng.uniform(-50.0, 50.0);
      y[i] = 0.3 * x[i] + rng.normal(0.0, 10.0);
    }
    const double want = two_pass_pearson(x, y);
    EXPECT_NEAR(pearson(x, y), want, 1e-12 * std::abs(want));
  }
}

TEST(Pearson, BadInputs) {
  const std::vector<double> a{1, 2, 3}, b{1, 2}, c{5, 5, 5};
  EXPECT_THROW(pearson(a, b), InputError);
  EXPECT_THROW(pearson(std::vector<double>{1}, std::vector<double>{1}), InputError);
  EXPECT_THROW(pearson(a, c), EstimationError);
}

TEST(Csv, EmptyRunIsPreambleAndHeader) {
  const RunMetrics m{"mean", 7, {}, 0.5, 12};
  EXPECT_EQ(to_csv(m), "# experiment mean seed 7 final_error 0.5 halt_step 12\n"
                       "step,blob_x,blob_y,population,error\n");
}

TEST(Csv, RoundTripIsExact) {
  Rng rng(4);
  RunMetrics m{"track", 99, {}, 1.0 / 3.0, 500};
  for (long s = 0; s < 200; ++s)
    m.records.push_back({s, {rng.uniform(0, 400), rng.uniform(0, 400)}, rng.below(2000), rng.uniform(0, 50)});
  std::stringstream ss;
  write_csv(m, ss);
  EXPECT_EQ(read_csv(ss), m);
}

TEST(Csv, RejectsMalformedRows) {
  std::stringstream ss("# experiment mean seed 1 final_error 0 halt_step 0\n"
                       "step,blob_x,blob_y,population,error\n1,2,3\n");
  EXPECT_THROW(read_csv(ss), InputError);
  std::stringstream nohdr("1,2,3,4,5\n");
  EXPECT_THROW(read_csv(nohdr), InputError);
}

TEST(Csv, EqualSeedsGiveIdenticalBytes) {
  const TrackSpec s = short_track();
  const std::string a = to_csv(to_metrics(run_tracking(track_run(s, 5)), 5));
  const std::string b = to_csv(to_metrics(run_tracking(track_run(s, 5)), 5));
  const std::string c = to_csv(to_metrics(run_tracking(track_run(s, 6)), 6));
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
}

TEST(Summary, ListsRunsAndStatistics) {
  const auto runs = runs_of({1, 3});
  const std::string s = summary_csv(runs, aggregate(runs));
  EXPECT_NE(s.find("seed,final_error,halt_step\n0,1,10\n1,3,10\n"), std::string::npos);
  EXPECT_NE(s.find("# runs 2 mae 2 sigma 1\n"), std::string::npos);
}

TEST(Frames, EmptyWorldIsBlack) {
  const GreyImage img = render_frame(TrailField(8, 6), Population(8, 6));
  for (std::uint8_t v : img.values()) EXPECT_EQ(v, 0);
}

TEST(Frames, ParticleIsBrightestPixel) {
  TrailField f(8, 6);
  f.deposit({1, 1}, 1000.0);
  Population pop(8, 6);
  pop.add_at_cell({4, 3}, 0.0);
  const GreyImage img = render_frame(f, pop);
  EXPECT_EQ(img(4, 3), kParticleShade);
  EXPECT_EQ(img(1, 1), 254);
  EXPECT_EQ(std::count(img.values().begin(), img.values().end(), kParticleShade), 1);
}

TEST(Frames, StepZeroReproducesMask) {
  CentroidRunConfig cfg;
  cfg.mask = shapes::ring();
  cfg.margin = 0;
  cfg.max_steps = 1;
  bool seen = false;
  run_centroid(cfg, [&](const World& w) {
    if (w.step_count() != 0) return;
    seen = true;
    const GreyImage img = render_frame(w);
    for (int y = 0; y < img.height(); ++y)
      for (int x = 0; x < img.width(); ++x) ASSERT_EQ(img(x, y) == kParticleShade, cfg.mask.contains(x, y));
  });
  EXPECT_TRUE(seen);
}

TEST(Config, DefaultsRoundTrip) {
  const nlohmann::json j = spec_to_json(TrackSpec{});
  EXPECT_EQ(spec_to_json(spec_from_json<TrackSpec>(j)), j);
  const nlohmann::json k = spec_to_json(MeanSpec{});
  EXPECT_EQ(spec_to_json(spec_from_json<MeanSpec>(k)), k);
  const nlohmann::json c = spec_to_json(CentroidSpec{});
  EXPECT_EQ(spec_to_json(spec_from_json<CentroidSpec>(c)), c);
}

TEST(Config, PartialConfigKeepsDefaults) {
  const auto j = nlohmann::json::parse(R"({"mode": "alternating", "spiral": {"growth": 12.5}})");
  const TrackSpec s = spec_from_json<TrackSpec>(j);
  EXPECT_EQ(s.run.mode, StimulusMode::alternating);
  EXPECT_DOUBLE_EQ(s.run.spiral.growth, 12.5);
  EXPECT_DOUBLE_EQ(s.run.spiral.angle_step, SpiralParams{}.angle_step);
  EXPECT_EQ(s.run.population, 1500u);
}

TEST(Config, UnknownKeysAreErrors) {
  EXPECT_THROW(spec_from_json<TrackSpec>(nlohmann::json::parse(R"({"popul": 10})")), InputError);
  EXPECT_THROW(spec_from_json<MeanSpec>(nlohmann::json::parse(R"({"turnover": {"dvision_min": 1}})")),
               InputError);
  EXPECT_THROW(spec_from_json<CentroidSpec>(nlohmann::json::parse(R"({"schedule": "later"})")), InputError);
  EXPECT_THROW(spec_from_json<CentroidSpec>(nlohmann::json::parse(R"({"runs": "ten"})")), InputError);
}

TEST(Config, SeriesExpansionIsPerSeed) {
  MeanSpec s;
  s.sorted = true;
  const MeanRunConfig a = mean_run(s, 1), b = mean_run(s, 1), c = mean_run(s, 2);
  EXPECT_EQ(a.series.values, b.series.values);
  EXPECT_NE(a.series.values, c.series.values);
  EXPECT_TRUE(std::is_sorted(a.series.values.begin(), a.series.values.end()));
  EXPECT_EQ(a.series.values.size(), 20u);
}

TEST(Batch, EqualsIndividualRuns) {
  MeanSpec spec;
  spec.count = 6;
  spec.run.seed = 40;
  const BatchResult b = run_batch(spec, 40, 3);
  ASSERT_EQ(b.runs.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    const MeanRunConfig cfg = mean_run(spec, run_seed(40, i));
    EXPECT_EQ(b.runs[i], to_metrics(run_mean(cfg), run_seed(40, i)));
    EXPECT_DOUBLE_EQ(b.covariate[i], population_stddev(cfg.series.values));
  }
  EXPECT_EQ(b.summary.runs, 3u);
  EXPECT_TRUE(b.summary.rho);
}

TEST(Batch, ZeroRunsRejected) {
  EXPECT_THROW(run_batch(short_track(), 1, 0), InputError);
}

TEST(Config, ShippedConfigsParse) {
  const std::filesystem::path dir = MORPHO_CONFIG_DIR;
  int seen = 0;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    nlohmann::json j = load_json(entry.path());
    std::string kind = name.substr(0, name.find('_'));
    if (kind == "sweep") {
      kind = j.at("experiment").get<std::string>();
      j = j.at("base");
    }
    if (kind == "lizard") EXPECT_NO_THROW(spec_from_json<CentroidSpec>(j)) << name;
    else if (kind == "mean") EXPECT_NO_THROW(spec_from_json<MeanSpec>(j)) << name;
    else if (kind == "track") EXPECT_NO_THROW(spec_from_json<TrackSpec>(j)) << name;
    else ADD_FAILURE() << "unrecognised config " << name;
    ++seen;
  }
  EXPECT_GE(seen, 7);
}

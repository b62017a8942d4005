#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "slidemimo/experiment.hpp"

using namespace slidemimo;

namespace {

ExperimentSpec small_spec() {
  ExperimentSpec s;
  s.config.subcarriers = 64;
  s.config.cp_length = 8;
  s.config.users = 3;
  s.config.antennas = 16;
  s.config.pilot_slots = 3;
  s.config.data_slots = 4;
  s.config.noise_var = 0.05;
  s.config.seed = 21;
  s.pdp = "EVA";
  s.schemes = {SchemeKind::kConventionalMrc, SchemeKind::kConventionalMmse, SchemeKind::kSliding};
  s.sweep = SweepVariable::kAntennas;
  s.values = {16, 24};
  s.depths = {0, 2};
  s.trials = 4;
  return s;
}

}  // namespace

TEST(Names, RoundTrip) {
  for (auto s : {SchemeKind::kConventionalMrc, SchemeKind::kConventionalMmse, SchemeKind::kSliding})
    EXPECT_EQ(parse_scheme(to_string(s)), s);
  for (auto s : {SweepVariable::kAntennas, SweepVariable::kEbn0, SweepVariable::kDepth})
    EXPECT_EQ(parse_sweep(to_string(s)), s);
  for (auto a : {AlphaMode::kExactPdp, AlphaMode::kCoherenceApprox})
    EXPECT_EQ(parse_alpha_mode(to_string(a)), a);
  EXPECT_EQ(to_string(SchemeKind::kConventionalMmse), "conventional-mmse");
  EXPECT_EQ(to_string(SweepVariable::kAntennas), "q");
  EXPECT_THROW(parse_scheme("zf"), std::invalid_argument);
}

TEST(Csv, HeaderAndNotApplicableCells) {
  MetricRecord r;
  r.scheme = "conventional-mmse";
  r.antennas = 200;
  r.sir_db = std::numeric_limits<double>::infinity();
  r.ber = 0.0;
  r.frames = 3;
  r.seed = 9;
  const std::string csv = to_csv({r});
  EXPECT_EQ(csv,
            "scheme,Q,ebn0_db,snr_db,depth,sinr_db,sir_db,ber,frames,failed_frames,seed\n"
            "conventional-mmse,200,NA,NA,NA,NA,inf,0.000000e+00,3,0,9\n");
}

TEST(Csv, NegativeZeroIsPrintedUnsigned) {
  MetricRecord r;
  r.scheme = "sliding";
  r.snr_db = -1e-12;
  EXPECT_NE(to_csv({r}).find(",0.0000,"), std::string::npos);
}

TEST(SpecJson, RoundTrip) {
  ExperimentSpec s = small_spec();
  s.alpha = AlphaMode::kCoherenceApprox;
  s.noiseless = true;
  s.sliding.rank_tol = 0.1;
  const ExperimentSpec back = spec_from_json(spec_to_json(s));
  EXPECT_EQ(spec_to_json(back), spec_to_json(s));
  EXPECT_EQ(back.config.subcarriers, 64);
  EXPECT_EQ(back.depths, (std::vector<int>{0, 2}));
  EXPECT_DOUBLE_EQ(back.sliding.rank_tol, 0.1);
  EXPECT_DOUBLE_EQ(back.sliding.alpha_min, 0.1);
}

TEST(SpecJson, KeysAndErrors) {
  const auto s = spec_from_json(R"({"config": {"M": 128, "M_CP": 16, "Q": 8}, "sweep": "ebn0"})");
  EXPECT_EQ(s.config.subcarriers, 128);
  EXPECT_EQ(s.config.cp_length, 16);
  EXPECT_EQ(s.config.antennas, 8);
  EXPECT_EQ(s.sweep, SweepVariable::kEbn0);
  EXPECT_THROW(spec_from_json("{"), std::invalid_argument);
  EXPECT_THROW(spec_from_json(R"({"trials": 0})"), std::invalid_argument);
  EXPECT_THROW(spec_from_json(R"({"config": {"M": "x"}})"), std::invalid_argument);
}

TEST(Experiment, RecordsPerSchemeAndDepth) {
  const auto records = run_experiment(small_spec());
  ASSERT_EQ(records.size(), 2u * 4u);  // mrc, mmse, sliding D=0, D=2 per point
  EXPECT_EQ(records[0].scheme, "conventional-mrc");
  EXPECT_FALSE(records[0].depth);
  EXPECT_EQ(records[2].depth, 0);
  EXPECT_EQ(records[3].depth, 2);
  EXPECT_EQ(records[4].antennas, 24);
  for (const auto& r : records) {
    EXPECT_TRUE(r.error.empty()) << r.error;
    EXPECT_EQ(r.frames + r.failed_frames, 4);
    EXPECT_TRUE(r.sinr_db);
    EXPECT_FALSE(r.sir_db);
    EXPECT_NEAR(*r.snr_db, 13.0103, 1e-4);
  }
}

TEST(Experiment, DeterministicAcrossWorkerCounts) {
  ExperimentSpec a = small_spec();
  ExperimentSpec b = a;
  b.workers = 3;
  EXPECT_EQ(to_csv(run_experiment(a)), to_csv(run_experiment(b)));
  ExperimentSpec c = a;
  c.config.seed = 22;
  EXPECT_NE(to_csv(run_experiment(a)), to_csv(run_experiment(c)));
}

TEST(Experiment, NoiselessReportsSir) {
  ExperimentSpec s = small_spec();
  s.noiseless = true;
  s.values = {16};
  s.schemes = {SchemeKind::kConventionalMmse};
  const auto r = run_experiment(s);
  ASSERT_EQ(r.size(), 1u);
  EXPECT_FALSE(r[0].sinr_db);
  ASSERT_TRUE(r[0].sir_db);
  EXPECT_TRUE(std::isinf(*r[0].sir_db));
  EXPECT_FALSE(r[0].snr_db);
}

TEST(Experiment, DepthSweepAndBadPointsAreReported) {
  ExperimentSpec s = small_spec();
  s.schemes = {SchemeKind::kSliding};
  s.sweep = SweepVariable::kDepth;
  s.values = {1, 3};
  s.trials = 1;
  auto r = run_experiment(s);
  ASSERT_EQ(r.size(), 2u);
  EXPECT_EQ(r[1].depth, 3);

  s.pdp = "NOPE";
  r = run_experiment(s);
  ASSERT_EQ(r.size(), 2u);
  EXPECT_EQ(r[0].scheme, "error");
  EXPECT_FALSE(r[0].error.empty());
}

TEST(Experiment, WritesCsvAndSidecar) {
  const auto dir = std::filesystem::temp_directory_path() / "slidemimo_test_out";
  std::filesystem::create_directories(dir);
  ExperimentSpec s = small_spec();
  s.values = {16};
  s.trials = 1;
  s.output = (dir / "run.csv").string();
  write_outputs(s, run_experiment(s));
  std::ifstream csv(dir / "run.csv"), js(dir / "run.json");
  ASSERT_TRUE(csv && js);
  std::string header;
  std::getline(csv, header);
  EXPECT_EQ(header, kCsvHeader);
  std::stringstream ss;
  ss << js.rdbuf();
  EXPECT_EQ(spec_from_json(ss.str()).output, s.output);
  std::filesystem::remove_all(dir);
}

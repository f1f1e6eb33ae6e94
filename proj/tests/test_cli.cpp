// Copyright 2026 The ESI Reconstruction Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>

#include "cli.hpp"
#include "esi/baselines.hpp"
#include "esi/evio.hpp"
#include "oracle.hpp"

namespace
{
namespace fs = std::filesystem;

struct Result
{
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args)
{
  std::ostringstream out, err;
  const int code = esi::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path & p)
{
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::size_t count_lines(const fs::path & p)
{
  const std::string s = slurp(p);
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

// mean absolute distance from mid-gray
double deviation(const esi::Frame & f)
{
  double sum = 0.0;
  for (const auto px : f.pixels) {
    sum += std::abs(px - 128.0);
  }
  return sum / static_cast<double>(f.pixels.size());
}

TEST(Cli, Usage)
{
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({"--help"}).code, 0);
  EXPECT_EQ(run({"reconstruct", "--fps"}).code, 2);
}

TEST(Cli, SimulateIsDeterministic)
{
  const auto dir = esi::oracle::scratch_dir("cli_sim");
  const auto a = run({"simulate", "--output-dir", (dir / "a").string(), "--set", "noise_rate=0.5", "--seed", "4"});
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_NE(a.out.find("events"), std::string::npos);
  const auto b = run({"simulate", "--output-dir", (dir / "b").string(), "--set", "noise_rate=0.5", "--seed", "4"});
  ASSERT_EQ(b.code, 0);
  const std::string bytes = slurp(dir / "a" / "events.bin");
  EXPECT_GT(bytes.size(), 20u);
  EXPECT_EQ(bytes, slurp(dir / "b" / "events.bin"));
  EXPECT_TRUE(fs::exists(dir / "a" / "scene.cfg"));
}

TEST(Cli, SimulateCsvAndTruth)
{
  const auto dir = esi::oracle::scratch_dir("cli_sim_csv");
  const auto r = run({"simulate", "--format", "csv", "--dump-truth", "--fps", "20", "--output-dir", dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto events = esi::evio::read_events_csv(dir / "events.csv", true);
  EXPECT_EQ(events.geometry, (esi::SensorGeometry{128, 128}));
  EXPECT_FALSE(events.batch.empty());
  EXPECT_EQ(count_lines(dir / "truth_manifest.csv"), 1u + 50u);
  const auto truth = esi::evio::read_frame_pgm(dir / "truth_000001.pgm");
  EXPECT_EQ(truth.geometry, (esi::SensorGeometry{128, 128}));
}

TEST(Cli, StationarySceneIsEmpty)
{
  const auto dir = esi::oracle::scratch_dir("cli_still");
  const auto r = run({"simulate", "--set", "velocity=0", "--output-dir", dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(fs::file_size(dir / "events.bin"), 20u);
}

TEST(Cli, BadKeyNamesKey)
{
  auto r = run({"simulate", "--set", "velocty=3"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("velocty"), std::string::npos);

  const auto dir = esi::oracle::scratch_dir("cli_badkey");
  std::ofstream(dir / "bad.cfg") << "# comment\nfps = 50\nradius = -2\n";
  r = run({"simulate", "--config", (dir / "bad.cfg").string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("radius"), std::string::npos);

  r = run({"reconstruct", "--fps", "0"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("'fps'"), std::string::npos);

  r = run({"reconstruct", "--smin", "2"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("smin"), std::string::npos);

  r = run({"simulate", "--format", "png"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("format"), std::string::npos);
}

TEST(Cli, UnknownMethodListsValid)
{
  const auto r = run({"reconstruct", "--method", "e2vid"});
  EXPECT_EQ(r.code, 2);
  for (const auto & m : esi::method_names()) {
    EXPECT_NE(r.err.find(m), std::string::npos) << m;
  }
}

TEST(Cli, ReconstructFrameCount)
{
  const auto dir = esi::oracle::scratch_dir("cli_rec");
  for (const auto & [fps, expect] : std::vector<std::pair<std::string, std::size_t>>{{"100", 250}, {"30", 75}}) {
    const fs::path out = dir / ("fps" + fps);
    const auto r = run({"reconstruct", "--fps", fps, "--output-dir", out.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(count_lines(out / "manifest.csv"), expect + 1);
    EXPECT_TRUE(fs::exists(out / "frame_000001.pgm"));
    char last[32];
    std::snprintf(last, sizeof(last), "frame_%06zu.pgm", expect);
    EXPECT_TRUE(fs::exists(out / last));
  }
  const std::string manifest = slurp(dir / "fps100" / "manifest.csv");
  EXPECT_EQ(manifest.rfind("index,t_us,path\n1,10000,frame_000001.pgm\n", 0), 0u);
  EXPECT_NE(manifest.find("250,2500000,frame_000250.pgm\n"), std::string::npos);
}

TEST(Cli, ReconstructFromFileWithPipeline)
{
  const auto dir = esi::oracle::scratch_dir("cli_rec_file");
  ASSERT_EQ(run({"simulate", "--output-dir", dir.string()}).code, 0);
  const auto a = run({"reconstruct", "--input", (dir / "events.bin").string(), "--origin-us", "0",
                      "--end-us", "2500000", "--output-dir", (dir / "seq").string()});
  ASSERT_EQ(a.code, 0) << a.err;
  const auto b = run({"reconstruct", "--input", (dir / "events.bin").string(), "--origin-us", "0",
                      "--end-us", "2500000", "--pipeline", "--output-dir", (dir / "pipe").string()});
  ASSERT_EQ(b.code, 0) << b.err;
  EXPECT_EQ(slurp(dir / "seq" / "manifest.csv"), slurp(dir / "pipe" / "manifest.csv"));
  EXPECT_EQ(count_lines(dir / "seq" / "manifest.csv"), 251u);
  EXPECT_EQ(slurp(dir / "seq" / "frame_000120.pgm"), slurp(dir / "pipe" / "frame_000120.pgm"));
  // same frames as the in-memory scene
  ASSERT_EQ(run({"reconstruct", "--output-dir", (dir / "mem").string()}).code, 0);
  EXPECT_EQ(slurp(dir / "seq" / "frame_000200.pgm"), slurp(dir / "mem" / "frame_000200.pgm"));
}

TEST(Cli, ReconstructTimeErrors)
{
  const auto dir = esi::oracle::scratch_dir("cli_rec_err");
  std::ofstream(dir / "back.csv") << "# 4,4\n100,0,0,1\n200,1,1,1\n50,0,0,-1\n";
  auto r = run({"reconstruct", "--input", (dir / "back.csv").string(), "--output-dir", dir.string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("NegativeInterval"), std::string::npos);
  EXPECT_NE(r.err.find("event index 2"), std::string::npos);
  r = run({"reconstruct", "--strict-time", "--input", (dir / "back.csv").string(), "--output-dir", dir.string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("NonMonotoneTime"), std::string::npos);
  r = run({"reconstruct", "--input", (dir / "missing.bin").string()});
  EXPECT_EQ(r.code, 1);
}

TEST(Cli, NaiveNoiseVersusEsi)
{
  const auto dir = esi::oracle::scratch_dir("cli_noise");
  const std::vector<std::string> scene{
    "--set", "velocity=0", "--set", "duration=2", "--set", "noise_rate=5",
    "--set", "hot_pixels=10:10:10000:1", "--seed", "3"};
  std::map<std::string, double> dev;
  for (const std::string m : {"naive", "esi"}) {
    std::vector<std::string> args{"reconstruct", "--method", m, "--output-dir", (dir / m).string()};
    args.insert(args.end(), scene.begin(), scene.end());
    const auto r = run(args);
    ASSERT_EQ(r.code, 0) << r.err;
    const auto f = esi::evio::read_frame_pgm(dir / m / "frame_000200.pgm");
    EXPECT_EQ(f.at(10, 10), 255) << m;
    dev[m] = deviation(f);
  }
  EXPECT_GT(dev["naive"], 3.0 * dev["esi"]);
}

TEST(Cli, CompareScenes)
{
  const auto dir = esi::oracle::scratch_dir("cli_cmp");
  auto r = run({"compare", "--output-dir", dir.string(), "--set", "duration=1.2"});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string csv = slurp(dir / "compare.csv");
  EXPECT_EQ(csv.rfind("method,t_us,pearson,mse_norm\n", 0), 0u);
  for (const auto & m : esi::method_names()) {
    EXPECT_NE(csv.find("\n" + m + ",10000,"), std::string::npos) << m;
    EXPECT_TRUE(fs::exists(dir / ("scores_" + m + ".csv")));
    EXPECT_NE(r.out.find(m), std::string::npos);
  }
  EXPECT_EQ(count_lines(dir / "compare.csv"), 1u + 4u * 120u);

  r = run({"compare", "--methods", "esi", "--output-dir", dir.string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("methods"), std::string::npos);

  ASSERT_EQ(run({"simulate", "--output-dir", (dir / "sim").string()}).code, 0);
  r = run({"compare", "--input", (dir / "sim" / "events.bin").string(), "--output-dir", dir.string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("scene-config"), std::string::npos);
  r = run({"compare", "--input", (dir / "sim" / "events.bin").string(), "--scene-config",
           (dir / "sim" / "scene.cfg").string(), "--methods", "esi,naive", "--output-dir", (dir / "f").string()});
  EXPECT_EQ(r.code, 0) << r.err;
}

TEST(Cli, ConfigPrecedence)
{
  const auto dir = esi::oracle::scratch_dir("cli_env");
  std::ofstream(dir / "env.cfg") << "fps = 20   # from environment\nduration = 1\n";
  ::setenv("ESI_CONFIG", (dir / "env.cfg").string().c_str(), 1);
  auto r = run({"reconstruct", "--output-dir", (dir / "a").string()});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(count_lines(dir / "a" / "manifest.csv"), 1u + 20u);
  // flags beat the file
  r = run({"reconstruct", "--fps", "40", "--output-dir", (dir / "b").string()});
  EXPECT_EQ(count_lines(dir / "b" / "manifest.csv"), 1u + 40u);
  ::unsetenv("ESI_CONFIG");
}

TEST(Cli, Bench)
{
  const auto dir = esi::oracle::scratch_dir("cli_bench");
  const auto r = run({"bench", "--events", "50000", "--repeats", "3", "--fps-list", "50,100",
                      "--methods", "esi,expdecay", "--output-dir", dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string csv = slurp(dir / "bench.csv");
  EXPECT_NE(csv.find("\nesi,50000,3,100,"), std::string::npos);
  EXPECT_NE(csv.find("\nexpdecay,50,"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir / "bench.txt"));
  EXPECT_EQ(run({"bench", "--repeats", "2"}).code, 2);
}

}  // namespace

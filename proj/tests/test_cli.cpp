#include "mbmp/dictionary.hpp"
#include "mbmp/harness.hpp"
#include "mbmp/matrix_io.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace mbmp;
namespace fs = std::filesystem;

namespace {

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("mbmp_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
                                        "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int run(const std::string& args, std::string* out = nullptr) {
    const fs::path log = dir_ / "stdout.txt";
    const std::string cmd = std::string(MBMP_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    if (out) *out = read(log);
    return status;
  }

  static std::string read(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
  }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, SolveRecoversPlantedSupport) {
  const Dictionary A = gaussian_dictionary(12, 30, 3);
  const TargetScene scene = generate_scene(30, 3, 1, 4);
  io::write_matrix(dir_ / "A.txt", A.matrix);
  io::write_matrix(dir_ / "Y.txt", noiseless_observations(A, scene));
  const fs::path csv = dir_ / "out.csv";
  ASSERT_EQ(run("solve --matrix " + (dir_ / "A.txt").string() + " --observations " + (dir_ / "Y.txt").string() +
                " --branch-vector 2,2,1 --output " + csv.string()),
            0);
  const std::string text = read(csv);
  std::string expected = "support_indices;residual_norm;nodes_expanded;wall_time_ms\n";
  for (std::size_t i = 0; i < scene.support.size(); ++i) expected += (i ? "," : "") + std::to_string(scene.support[i]);
  EXPECT_EQ(text.substr(0, expected.size()), expected);
  // nodes: 1 + 2 + 4 internal, 4 leaves
  EXPECT_NE(text.find(";11;"), std::string::npos);
}

TEST_F(Cli, SolveFlagsAndErrors) {
  const Dictionary A = gaussian_dictionary(8, 16, 1);
  io::write_matrix(dir_ / "A.txt", A.matrix);
  io::write_matrix(dir_ / "Y.txt", A.matrix.col(5));
  std::string out;
  EXPECT_EQ(run("solve --matrix " + (dir_ / "A.txt").string() + " --observations " + (dir_ / "Y.txt").string() +
                    " --branch-vector 1 --no-dict-refine --no-subspace-refine",
                &out),
            0);
  EXPECT_NE(out.find("\n5;"), std::string::npos);
  EXPECT_NE(run("solve --matrix " + (dir_ / "missing.txt").string() + " --observations " +
                (dir_ / "Y.txt").string() + " --branch-vector 1"),
            0);
  EXPECT_NE(run("solve --matrix " + (dir_ / "A.txt").string()), 0);
}

TEST_F(Cli, CertifyPrintsReport) {
  io::write_matrix(dir_ / "I.txt", ComplexMatrix::Identity(6, 6));
  std::string out;
  ASSERT_EQ(run("certify --matrix " + (dir_ / "I.txt").string() + " --condition mb-coherence --K 2 --d 1", &out), 0);
  EXPECT_EQ(out, "kind;lhs;threshold;holds\nMBCoherence;1;2;true\n");
  ASSERT_EQ(run("certify --matrix " + (dir_ / "I.txt").string() + " --condition coherence --K 3", &out), 0);
  EXPECT_EQ(out, "kind;lhs;threshold;holds\nCoherence;0;0.20000000000000001;true\n");
  EXPECT_NE(run("certify --matrix " + (dir_ / "I.txt").string() + " --condition bogus --K 3"), 0);
  EXPECT_NE(run("certify --matrix " + (dir_ / "I.txt").string() + " --condition neuman --K 3 --budget 2"), 0);
}

TEST_F(Cli, DesignPrintsBranchVector) {
  io::write_matrix(dir_ / "I.txt", ComplexMatrix::Identity(6, 6));
  std::string out;
  ASSERT_EQ(run("design-d --matrix " + (dir_ / "I.txt").string() + " --K 3 --strategy per-node --method bruteforce",
                &out),
            0);
  EXPECT_EQ(out, "1,1,1\n");
}

TEST_F(Cli, ExperimentWritesCsv) {
  const fs::path cfg = dir_ / "cfg.txt";
  const fs::path csv = dir_ / "rows.csv";
  std::ofstream(cfg) << "kind=condition\ndictionary=identity\nn=8\nK=2\nd1=1,2\ntrials=3\nout=" << csv.string()
                     << "\n";
  ASSERT_EQ(run("experiment --config " + cfg.string()), 0);
  EXPECT_EQ(read(csv),
            "MN;d1;prob;ci95;trials\n"
            "8;coherence;1.000000;[0.438503,1.000000];3\n"
            "8;cumulative-coherence;1.000000;[0.438503,1.000000];3\n"
            "8;1;1.000000;[0.438503,1.000000];3\n"
            "8;2;1.000000;[0.438503,1.000000];3\n");
  std::ofstream(cfg) << "kind=condition\nZ=10.5\nK=2\nmn=4\n";
  EXPECT_NE(run("experiment --config " + cfg.string()), 0);
}

TEST_F(Cli, GeneratesDictionaries) {
  const fs::path out = dir_ / "A.txt";
  ASSERT_EQ(run("gen-dictionary --kind mimo --M 3 --N 4 --Z 20 --seed 5 --output " + out.string()), 0);
  const ComplexMatrix A = io::read_matrix(out);
  EXPECT_EQ(A.rows(), 12);
  EXPECT_EQ(A.cols(), 21);
  EXPECT_LT((A - mimo_radar_dictionary(random_geometry(3, 4, 20, 5)).matrix).cwiseAbs().maxCoeff(), 1e-15);
}

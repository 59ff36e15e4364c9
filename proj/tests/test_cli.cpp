#include "cli.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

using schmidtnorm::cli::run;
using nlohmann::json;

namespace {

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result call(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(std::move(args), out, err);
  return {code, out.str(), err.str()};
}

std::string data(const std::string& name) { return std::string(SCHMIDTNORM_DATA_DIR) + "/" + name; }

std::string temp_file(const std::string& name, const std::string& contents) {
  const auto path = std::filesystem::temp_directory_path() / ("schmidtnorm_cli_" + name);
  std::ofstream(path) << contents;
  return path.string();
}

}  // namespace

TEST(Cli, WernerThresholdText) {
  const Result r = call({"werner", "--n", "3", "--alpha", "0.4", "-k", "2"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("k-block positive: true"), std::string::npos) << r.out;
  const Result s = call({"werner", "--n", "3", "--alpha", "0.6", "-k", "2"});
  EXPECT_NE(s.out.find("k-block positive: false"), std::string::npos) << s.out;
}

TEST(Cli, WernerJson) {
  const Result r = call({"werner", "--n", "4", "--alpha", "0.2", "--output", "json"});
  ASSERT_EQ(r.code, 0);
  const json j = json::parse(r.out);
  EXPECT_TRUE(j["ppt"].get<bool>());
  EXPECT_EQ(j["thresholds"].size(), 4u);
  EXPECT_FALSE(j["thresholds"][3]["k_block_positive"].get<bool>() == false);
}

TEST(Cli, OpnormOnMaximallyEntangledProjector) {
  const Result r = call({"opnorm", "--input", data("max_entangled_projector_2x2.json"), "-k", "1", "--output", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_NEAR(j["lower"].get<double>(), 0.5, 1e-10);
  EXPECT_NEAR(j["upper"].get<double>(), 0.5, 1e-10);
  const Result t = call({"opnorm", "--input", data("max_entangled_projector_2x2.json"), "-k", "1"});
  EXPECT_NE(t.out.find("bounds: [0.5, 0.5]"), std::string::npos) << t.out;
}

TEST(Cli, OpnormMethods) {
  for (const char* method : {"heuristic", "brute"}) {
    const Result r = call({"opnorm", "--input", data("separable_rho_2x2.json"), "-k", "1", "--method", method,
                           "--samples", "20000", "--output", "json"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NEAR(json::parse(r.out)["lower"].get<double>(), 0.8571, 5e-3) << method;
  }
}

TEST(Cli, VecnormMaximallyEntangled) {
  const Result r = call({"vecnorm", "--input", data("max_entangled_3x3.json"), "-k", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("k-norm: 0.816497"), std::string::npos) << r.out;
}

TEST(Cli, VecnormNormalizeFlag) {
  const std::string path =
      temp_file("unnormalized.json", R"({"n":2,"m":2,"kind":"vector","data":[[3,0],[0,0],[0,0],[4,0]]})");
  EXPECT_EQ(call({"vecnorm", "--input", path, "-k", "1"}).code, 2);
  const Result r = call({"vecnorm", "--input", path, "-k", "1", "--normalize", "--output", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(json::parse(r.out)["norm"].get<double>(), 0.8, 1e-12);
}

TEST(Cli, KposVerdicts) {
  const Result r = call({"kpos", "--input", data("werner_pt_3x3_alpha0.6.json"), "-k", "2", "--output", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_EQ(j["status"], "NotKBlockPositive");
  EXPECT_FALSE(j["witness"].is_null());
  EXPECT_LT(j["witness_value"].get<double>(), -1e-8);
  const Result s = call({"kpos", "--input", data("separable_rho_2x2.json"), "-k", "1"});
  EXPECT_NE(s.out.find("status: KBlockPositive"), std::string::npos) << s.out;
}

TEST(Cli, WitnessOutputFile) {
  const auto path = (std::filesystem::temp_directory_path() / "schmidtnorm_cli_witness.json").string();
  std::filesystem::remove(path);
  const Result r = call({"kpos", "--input", data("werner_pt_3x3_alpha0.6.json"), "-k", "2", "--witness-out", path});
  ASSERT_EQ(r.code, 0);
  std::ifstream in(path);
  ASSERT_TRUE(in.good());
  std::stringstream buf;
  buf << in.rdbuf();
  const auto payload = schmidtnorm::parse_payload(buf.str());
  ASSERT_TRUE(std::holds_alternative<schmidtnorm::VectorPayload>(payload));
}

TEST(Cli, SchmidtDump) {
  const Result r = call({"schmidt", "--input", data("max_entangled_3x3.json"), "--output", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_EQ(j["rank"], 3);
  EXPECT_EQ(j["coefficients"].size(), 3u);
  EXPECT_EQ(j["left_frame"].size(), 3u);
}

TEST(Cli, WernerLimitTable) {
  const Result r = call({"werner-limit", "--n", "4", "--rmax", "3", "--size-cap", "256"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("bound_Ineq2"), std::string::npos);
  EXPECT_NE(r.out.find("0.375"), std::string::npos);
  EXPECT_NE(r.out.find("rows above threshold: 0"), std::string::npos) << r.out;
  const Result j = call({"werner-limit", "--n", "4", "--rmax", "3", "--size-cap", "256", "--output", "json"});
  const json rows = json::parse(j.out);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[1]["rank"], "30");
  EXPECT_TRUE(rows[2]["heuristic"].is_null());
}

TEST(Cli, ErrorMessagesAreDistinct) {
  const std::string bad_json = temp_file("bad.json", "{ not json");
  const std::string short_vec = temp_file("short.json", R"({"n":2,"m":2,"kind":"vector","data":[[1,0]]})");
  const Result a = call({"vecnorm", "--input", bad_json, "-k", "1"});
  const Result b = call({"vecnorm", "--input", short_vec, "-k", "1"});
  const Result c = call({"vecnorm", "--input", data("max_entangled_3x3.json"), "-k", "4"});
  for (const Result* r : {&a, &b, &c}) EXPECT_EQ(r->code, 2);
  EXPECT_NE(a.err.find("malformed JSON"), std::string::npos) << a.err;
  EXPECT_NE(b.err.find("dimension mismatch"), std::string::npos) << b.err;
  EXPECT_NE(c.err.find("out of range"), std::string::npos) << c.err;
}

TEST(Cli, BadFlags) {
  EXPECT_EQ(call({}).code, 2);
  EXPECT_EQ(call({"opnorm", "-k", "1"}).code, 2);
  EXPECT_EQ(call({"werner", "--n", "3", "--alpha", "0.4", "--output", "xml"}).code, 2);
  EXPECT_EQ(call({"werner", "--n", "3", "--alpha", "2"}).code, 2);
  EXPECT_EQ(call({"werner", "--n", "3", "--alpha", "0.3", "-k", "5"}).code, 2);
  EXPECT_EQ(call({"opnorm", "--input", "/nonexistent/file.json", "-k", "1"}).code, 2);
  EXPECT_EQ(call({"frobnicate"}).code, 2);
}

TEST(Cli, JsonIsDeterministicAndRoundTrips) {
  const std::vector<std::string> args = {"opnorm", "--input", data("separable_rho_2x2.json"), "-k", "1",
                                         "--seed", "11", "--output", "json"};
  const Result a = call(args);
  const Result b = call(args);
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);

  // Re-running on the witness that was emitted reproduces the same value.
  const json j = json::parse(a.out);
  const std::string witness = temp_file("roundtrip.json", j["witness"].dump());
  const Result v = call({"vecnorm", "--input", witness, "-k", "1", "--output", "json"});
  ASSERT_EQ(v.code, 0) << v.err;
  EXPECT_NEAR(json::parse(v.out)["norm"].get<double>(), 1.0, 1e-9);

  const std::string copy = temp_file("operator_copy.json", schmidtnorm::to_json(std::get<schmidtnorm::BipartiteOperator>(
                                                               schmidtnorm::read_payload_file(data("separable_rho_2x2.json"))))
                                                               .dump());
  std::vector<std::string> again = args;
  again[2] = copy;
  EXPECT_EQ(call(again).out, a.out);

  const Result k1 = call({"kpos", "--input", data("werner_pt_3x3_alpha0.6.json"), "-k", "2", "--seed", "3", "--output", "json"});
  const Result k2 = call({"kpos", "--input", data("werner_pt_3x3_alpha0.6.json"), "-k", "2", "--seed", "3", "--output", "json"});
  EXPECT_EQ(k1.out, k2.out);
}

TEST(Cli, Help) {
  const Result r = call({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("werner-limit"), std::string::npos);
}

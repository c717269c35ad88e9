#include "desco/serialize.hpp"
#include "desco/sim.hpp"

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace desco;
namespace fs = std::filesystem;

namespace {

const fs::path kWork = DESCO_TEST_WORKDIR;

struct Run {
  int rc;
  std::string out, err;
};

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

Run run(const std::string& args) {
  fs::create_directories(kWork);
  const fs::path o = kWork / "stdout.txt", e = kWork / "stderr.txt";
  const std::string cmd = "cd '" + kWork.string() + "' && '" + DESCO_CLI_PATH + "' " + args + " > '" + o.string() +
                          "' 2> '" + e.string() + "'";
  const int st = std::system(cmd.c_str());
  return {WIFEXITED(st) ? WEXITSTATUS(st) : -1, slurp(o), slurp(e)};
}

void write_file(const fs::path& p, const std::string& data) {
  std::ofstream f(p, std::ios::binary);
  f << data;
}

}  // namespace

TEST(Cli, HelpExitsZero) {
  const auto r = run("--help");
  EXPECT_EQ(r.rc, 0);
  EXPECT_NE(r.out.find("simulate"), std::string::npos);
}

TEST(Cli, MissingSubcommandIsUsageError) { EXPECT_EQ(run("").rc, 2); }

TEST(Cli, UnknownFlagIsUsageError) { EXPECT_EQ(run("verify --bogus 3").rc, 2); }

TEST(Cli, InvalidParametersAreUsageErrors) {
  EXPECT_EQ(run("verify --b1 3 --t1 2").rc, 2);
  EXPECT_EQ(run("verify --alpha-num 1").rc, 2);
  EXPECT_EQ(run("simulate --schemes mds").rc, 2);
}

TEST(Cli, VerifyPasses) {
  const auto r = run("verify --b1 1 --t1 2 --alpha-num 2 --alpha-den 1");
  EXPECT_EQ(r.rc, 0) << r.err;
  EXPECT_NE(r.out.find("user 1 max delay 2 (target 2)"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("user 2 max delay 5 (target 5)"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("PASS"), std::string::npos);
}

TEST(Cli, VerifyIaScheme) {
  const auto r = run("verify --scheme ia --window 20");
  EXPECT_EQ(r.rc, 0) << r.err;
  EXPECT_NE(r.out.find("user 2 max delay 6 (target 6)"), std::string::npos) << r.out;
}

TEST(Cli, SimulateCsvToStdoutAndFile) {
  const std::string flags = "--bmax-list 0,2,4 --segment-len 50 --segments 200 --seed 3";
  const auto a = run("simulate " + flags);
  ASSERT_EQ(a.rc, 0) << a.err;
  EXPECT_EQ(a.out.rfind(std::string(kCsvHeader) + "\n", 0), 0u);
  std::size_t lines = 0;
  for (char c : a.out) lines += c == '\n';
  EXPECT_EQ(lines, 1u + 3 * 3 * 2);
  const auto b = run("simulate " + flags + " --out sim.csv");
  ASSERT_EQ(b.rc, 0) << b.err;
  EXPECT_EQ(slurp(kWork / "sim.csv"), a.out);
}

TEST(Cli, ConfigFileSuppliesFlags) {
  write_file(kWork / "cfg.ini", "b1=1\nt1=2\nsegments=100\nsegment-len=40\nbmax-list=[1,2]\nschemes=[rlc]\n");
  const auto r = run("simulate --config cfg.ini");
  ASSERT_EQ(r.rc, 0) << r.err;
  EXPECT_NE(r.out.find("1,rlc,1,"), std::string::npos) << r.out;
  EXPECT_EQ(r.out.find("desco"), std::string::npos);
}

TEST(Cli, MissingConfigIsIoError) { EXPECT_EQ(run("simulate --config nope.ini").rc, 3); }

TEST(Cli, EncodeDecodeRoundTrip) {
  const auto c = make_desco(2, 5, 2, 1);
  std::mt19937_64 g(1);
  SourceStream src(1000);
  for (auto& x : src) {
    x.subs.resize(c.outer_sub_symbols());
    for (auto& v : x.subs) v = static_cast<Symbol>(g() % c.field()->order());
  }
  std::ostringstream os;
  write_source_stream(os, src, c.field()->spec());
  write_file(kWork / "src.bin", os.str());
  write_file(kWork / "pat.txt", "10:4\n60:3\n");

  auto e = run("encode --b1 2 --t1 5 --in src.bin --out tx.bin --emit-descriptor codec.txt");
  ASSERT_EQ(e.rc, 0) << e.err;
  std::ostringstream want;
  write_channel_stream(want, desco_encode(c, src), c.field()->spec());
  EXPECT_EQ(slurp(kWork / "tx.bin"), want.str());

  auto d = run("decode --descriptor codec.txt --in tx.bin --pattern pat.txt --user 2 --out got.bin --log log.csv");
  ASSERT_EQ(d.rc, 0) << d.err;
  EXPECT_EQ(slurp(kWork / "got.bin"), os.str());
  const std::string log = slurp(kWork / "log.csv");
  EXPECT_EQ(log.rfind("slot,erased,recovery,delay,on_time\n", 0), 0u);
  EXPECT_EQ(log.find(",0\n"), std::string::npos) << "a slot missed its deadline";
  EXPECT_NE(log.find("\n10,1,"), std::string::npos);

  auto clean = run("decode --descriptor codec.txt --in tx.bin --out clean.bin");
  ASSERT_EQ(clean.rc, 0) << clean.err;
  EXPECT_EQ(slurp(kWork / "clean.bin"), os.str());

  // user 1 cannot handle a 4-slot burst on time
  auto d1 = run("decode --descriptor codec.txt --in tx.bin --pattern pat.txt --user 1 --out got1.bin --log log1.csv");
  EXPECT_EQ(d1.rc, 0) << d1.err;
  EXPECT_NE(slurp(kWork / "log1.csv").find(",0\n"), std::string::npos);
}

TEST(Cli, SingleUserEncode) {
  write_file(kWork / "s.bin", std::string(3 * 6, '\x01'));
  const auto r = run("encode --scheme sco --b1 2 --t1 3 --in s.bin --out s_tx.bin");
  ASSERT_EQ(r.rc, 0) << r.err;
  EXPECT_EQ(slurp(kWork / "s_tx.bin").size(), 6u * 5u);
}

TEST(Cli, TruncatedInputIsIoError) {
  write_file(kWork / "short.bin", std::string(5, '\x00'));  // 2 sub-symbols per slot, records counted from 0
  const auto r = run("encode --in short.bin --out x.bin");
  EXPECT_EQ(r.rc, 3);
  EXPECT_NE(r.err.find("truncated record 2"), std::string::npos) << r.err;
}

TEST(Cli, MissingInputIsIoError) { EXPECT_EQ(run("encode --in absent.bin --out x.bin").rc, 3); }

TEST(Cli, MalformedDescriptorIsIoError) {
  write_file(kWork / "bad.txt", "kind=desco\nb1=1\n");
  write_file(kWork / "z.bin", std::string(4, '\x00'));
  EXPECT_EQ(run("decode --descriptor bad.txt --in z.bin --out y.bin").rc, 3);
}

TEST(Cli, MalformedPatternIsIoError) {
  write_file(kWork / "z.bin", std::string(6, '\x00'));
  write_file(kWork / "badpat.txt", "3-4\n");
  EXPECT_EQ(run("decode --in z.bin --pattern badpat.txt --out y.bin").rc, 3);
}

TEST(Cli, Bounds) {
  const auto r = run("bounds --b1 1 --t1 2 --b2 2 --t2 4");
  ASSERT_EQ(r.rc, 0) << r.err;
  EXPECT_NE(r.out.find("rate upper bound at T2=4: 3/5"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("infeasible"), std::string::npos);
  EXPECT_EQ(run("bounds --b1 1 --t1 2 --b2 1 --t2 4").rc, 2);
}

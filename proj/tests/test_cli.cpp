#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>

#include "doctest.h"
#include "gmmltree/cli.hpp"
#include "gmmltree/report.hpp"
#include "gmmltree/serialize.hpp"
#include "oracles.hpp"

using namespace gmmltree;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli_main(args, out, err);
  return {code, out.str(), err.str()};
}

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() /
            ("gmmltree_cli_" + std::to_string(std::random_device{}()));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string file(const std::string& name) const { return (path_ / name).string(); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

void write_file(const std::string& path, const std::string& text) {
  std::ofstream(path, std::ios::binary) << text;
}

std::string toy_csv(std::uint64_t seed, std::size_t n) {
  Rng rng(seed);
  std::ostringstream s;
  s << "a,b,c,label\n";
  for (std::size_t i = 0; i < n; ++i) {
    const bool pos = i % 3 == 0;
    s << format_sig17(rng.normal() + (pos ? 1.0 : 0.0)) << ','
      << format_sig17(rng.normal()) << ',' << format_sig17(rng.normal() - (pos ? 0.5 : 0.0))
      << ',' << (pos ? "yes" : "no") << '\n';
  }
  return s.str();
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("cv emits one report row") {
  TempDir tmp;
  write_file(tmp.file("toy.csv"), toy_csv(1, 90));
  const auto r = run({"cv", "--criterion", "dgmml", "--k", "10", "--seed", "42", tmp.file("toy.csv")});
  REQUIRE(r.code == kExitOk);
  const auto records = read_csv_records(r.out);
  std::size_t data_rows = 0;
  for (const auto& rec : records) {
    if (!rec.empty() && rec[0].rfind("#", 0) != 0) ++data_rows;
  }
  CHECK(data_rows == 2);  // header + one report
  CHECK(r.out.find("toy,dgmml-dt,10,42,") != std::string::npos);
}

TEST_CASE("train then predict reproduces the training accuracy") {
  TempDir tmp;
  const std::string data = tmp.file("toy.csv");
  write_file(data, toy_csv(2, 120));
  for (const std::vector<std::string>& extra :
       {std::vector<std::string>{}, {"--trees", "5"}, {"--oblique"}, {"--criterion", "ihd"}}) {
    std::vector<std::string> args{"train", data, "-o", tmp.file("model.json"), "--max-depth", "3"};
    args.insert(args.end(), extra.begin(), extra.end());
    const auto t = run(args);
    REQUIRE(t.code == kExitOk);
    const auto p = run({"predict", tmp.file("model.json"), data});
    REQUIRE(p.code == kExitOk);
    CHECK(t.err.find("training_accuracy=") != std::string::npos);
    const auto acc = t.err.substr(t.err.find('=') + 1);
    CHECK(p.err == "accuracy=" + acc);

    // In-process accuracy of the loaded model.
    const auto ds = load_csv(data);
    const auto model = model_from_string(read_text_file(tmp.file("model.json")));
    std::size_t ok = 0;
    const auto pred = std::visit(
        [&ds](const auto& m) {
          if constexpr (std::is_same_v<std::decay_t<decltype(m)>, Tree>) {
            return predict(m, ds);
          } else {
            return predict_forest(m, ds);
          }
        },
        model);
    for (std::size_t i = 0; i < ds.n(); ++i) ok += pred[i] == ds.label(i);
    CHECK(acc == format_fixed4(static_cast<double>(ok) / static_cast<double>(ds.n())) + "\n");
    CHECK(p.out.rfind("label\n", 0) == 0);
  }
}

TEST_CASE("predict works without a label column") {
  TempDir tmp;
  write_file(tmp.file("toy.csv"), toy_csv(3, 40));
  REQUIRE(run({"train", tmp.file("toy.csv"), "-o", tmp.file("m.json")}).code == kExitOk);
  write_file(tmp.file("x.csv"), "a,b,c\n0,0,0\n5,0,-5\n");
  const auto p = run({"predict", tmp.file("m.json"), tmp.file("x.csv")});
  REQUIRE(p.code == kExitOk);
  CHECK(read_csv_records(p.out).size() == 3);
  CHECK(p.err.empty());
  write_file(tmp.file("bad.csv"), "a,b\n0,0\n");
  CHECK(run({"predict", tmp.file("m.json"), tmp.file("bad.csv")}).code == kExitData);
}

TEST_CASE("usage errors exit with 1") {
  const auto unknown = run({"cv", "--bogus", "x.csv"});
  CHECK(unknown.code == kExitUsage);
  CHECK(unknown.err.find("Usage") != std::string::npos);
  CHECK(run({}).code == kExitUsage);
  CHECK(run({"cv", "--format", "xml", "x.csv"}).code == kExitUsage);
  CHECK(run({"cv", "--strategy", "mode", "x.csv"}).code == kExitUsage);
  TempDir tmp;
  write_file(tmp.file("toy.csv"), toy_csv(4, 30));
  CHECK(run({"train", tmp.file("toy.csv"), "--oblique", "--criterion", "gini"}).code ==
        kExitUsage);
  CHECK(run({"train", tmp.file("toy.csv"), "--mtry", "9"}).code == kExitUsage);
  CHECK(run({"bench"}).code == kExitUsage);
  CHECK(run({"--help"}).code == kExitOk);
}

TEST_CASE("data errors exit with 2") {
  CHECK(run({"cv", "/nonexistent/data.csv"}).code == kExitData);
  TempDir tmp;
  write_file(tmp.file("bad.csv"), "a,y\n1,p\nx,q\n");
  const auto r = run({"train", tmp.file("bad.csv")});
  CHECK(r.code == kExitData);
  CHECK(r.err.find("not a finite number") != std::string::npos);
  write_file(tmp.file("model.json"), "{\"format\": \"other\"}");
  write_file(tmp.file("x.csv"), "a\n1\n");
  CHECK(run({"predict", tmp.file("model.json"), tmp.file("x.csv")}).code == kExitData);
  CHECK(run({"cv", tmp.path().string() + "/empty_dir_missing"}).code == kExitData);
}

TEST_CASE("directory mode and json output") {
  TempDir tmp;
  write_file(tmp.file("b.csv"), toy_csv(5, 40));
  write_file(tmp.file("a.csv"), toy_csv(6, 40));
  const auto r = run({"cv", "--format", "json", "--k", "4", "--timing", "off", tmp.path().string()});
  REQUIRE(r.code == kExitOk);
  std::istringstream in(r.out);
  std::vector<json> docs;
  for (std::string line; std::getline(in, line);) docs.push_back(json::parse(line));
  REQUIRE(docs.size() == 3);
  CHECK(docs[0].contains("meta"));
  CHECK(docs[0]["meta"]["version"] == kVersion);
  CHECK(docs[1]["dataset"] == "a");
  CHECK(docs[2]["dataset"] == "b");
  CHECK(docs[1]["train_time_ms"].is_null());
}

TEST_CASE("other subcommands run") {
  TempDir tmp;
  write_file(tmp.file("toy.csv"), toy_csv(7, 60));
  const auto w = run({"weights", tmp.file("toy.csv")});
  REQUIRE(w.code == kExitOk);
  CHECK(w.out.find("rank,feature,name,weight,threshold,post_split_impurity") != std::string::npos);
  CHECK(w.out.find("# impurity=gini") != std::string::npos);
  const auto s = run({"strategies", "--k", "3", tmp.file("toy.csv")});
  REQUIRE(s.code == kExitOk);
  CHECK(s.out.find("closest_means,") != std::string::npos);
  const auto b = run({"bench", "--k", "3", "--reps", "1", "--criteria", "dgmml,gini",
                      tmp.file("toy.csv")});
  REQUIRE(b.code == kExitOk);
  CHECK(b.out.find("dgmml-dt,") != std::string::npos);
  const auto syn = run({"bench", "--synthetic-n", "200", "--synthetic-d", "3", "--k", "2",
                        "--reps", "1", "--criteria", "gini"});
  CHECK(syn.code == kExitOk);
}

TEST_CASE("the executable follows the same exit codes") {
  const std::string exe = GMMLTREE_CLI_PATH;
  const auto status = [](const std::string& cmd) {
    const int raw = std::system((cmd + " >/dev/null 2>&1").c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  };
  CHECK(status(exe + " --help") == 0);
  CHECK(status(exe + " cv --bogus x") == 1);
  CHECK(status(exe + " cv /nonexistent.csv") == 2);
}

}  // TEST_SUITE

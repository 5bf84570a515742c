#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

struct RunResult {
  int code = -1;
  std::string out;
};

RunResult run_cli(const std::string& args) {
  std::string cmd = std::string(UMORPH_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  RunResult r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof(buf), pipe)) > 0) r.out.append(buf, n);
  int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("umorph_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const {
    return (path / name).string();
  }
};

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  REQUIRE(out.good());
  out << content;
}

}  // namespace

TEST_CASE("usage errors exit with code 2") {
  CHECK(run_cli("").code == 2);
  CHECK(run_cli("no-such-subcommand").code == 2);
  CHECK(run_cli("train-morph corpus.txt --alpha 0").code == 2);
  CHECK(run_cli("train-morph corpus.txt --alpha -1").code == 2);
  CHECK(run_cli("train-clf data.tsv --feature nope").code == 2);
  // umorph features require a morph model
  CHECK(run_cli("train-clf data.tsv --feature umorph").code == 2);
  CHECK(run_cli("--help").code == 0);
}

TEST_CASE("runtime errors exit with code 1") {
  CHECK(run_cli("train-morph /nonexistent/corpus.txt").code == 1);
  CHECK(run_cli("segment /nonexistent/model /nonexistent/input").code == 1);
  CHECK(run_cli("evaluate /nonexistent/preds /nonexistent/gold").code == 1);
}

TEST_CASE("synth / train-morph / segment / classify / evaluate pipeline") {
  TempDir tmp;
  auto prefix = tmp.file("syn");

  auto synth = run_cli("synth --seed 42 --size 600 --out-prefix " + prefix);
  REQUIRE(synth.code == 0);
  CHECK(synth.out.find("bayes_error\t-\t") == 0);
  REQUIRE(fs::exists(prefix + ".labeled.tsv"));
  REQUIRE(fs::exists(prefix + ".gold.tsv"));

  // unlabeled file: names only
  {
    std::ifstream in(prefix + ".labeled.tsv");
    std::ofstream names(tmp.file("names.txt"));
    std::string line;
    while (std::getline(in, line)) {
      auto tab = line.find('\t');
      REQUIRE(tab != std::string::npos);
      names << line.substr(tab + 1) << "\n";
    }
  }

  auto morph = tmp.file("morph.model");
  auto tm = run_cli("train-morph " + tmp.file("names.txt") + " --alpha 1.0 " +
                    "--out " + morph);
  REQUIRE(tm.code == 0);
  CHECK(tm.out.find("total_cost\t-\t") == 0);
  CHECK(tm.out.find("lexicon_size\t-\t") != std::string::npos);

  // deterministic: retraining produces a byte-identical model file
  auto morph2 = tmp.file("morph2.model");
  auto tm2 = run_cli("train-morph " + tmp.file("names.txt") +
                     " --alpha 1.0 --out " + morph2);
  REQUIRE(tm2.code == 0);
  CHECK(tm2.out == tm.out);
  CHECK(slurp(morph) == slurp(morph2));

  auto seg = run_cli("segment " + morph + " " + tmp.file("names.txt"));
  REQUIRE(seg.code == 0);
  // every line echoes the name and a |-joined segmentation
  std::istringstream seg_lines(seg.out);
  std::string line;
  std::size_t count = 0;
  while (std::getline(seg_lines, line)) {
    ++count;
    auto tab = line.find('\t');
    REQUIRE(tab != std::string::npos);
    std::string name = line.substr(0, tab);
    std::string joined = line.substr(tab + 1);
    std::string flat;
    for (char c : joined)
      if (c != '|') flat += c;
    CHECK(flat == name);
  }
  CHECK(count == 600);

  auto clf = tmp.file("clf.model");
  auto tc = run_cli("train-clf " + prefix + ".labeled.tsv --feature umorph" +
                    " --morph-model " + morph + " --out " + clf);
  REQUIRE(tc.code == 0);
  CHECK(tc.out == "classes\t-\t2\n");

  auto preds = run_cli("classify " + clf + " " + tmp.file("names.txt"));
  REQUIRE(preds.code == 0);
  write_file(tmp.file("preds.tsv"), preds.out);
  // output format: name<TAB>class<TAB>confidence(6 decimals)
  std::istringstream pred_lines(preds.out);
  count = 0;
  while (std::getline(pred_lines, line)) {
    ++count;
    auto t1 = line.find('\t');
    auto t2 = line.find('\t', t1 + 1);
    REQUIRE(t2 != std::string::npos);
    std::string cls = line.substr(t1 + 1, t2 - t1 - 1);
    CHECK((cls == "c0" || cls == "c1"));
    std::string conf = line.substr(t2 + 1);
    REQUIRE(conf.size() >= 8);
    CHECK(conf[conf.size() - 7] == '.');
    double v = std::stod(conf);
    CHECK(v >= 0.5);
    CHECK(v <= 1.0);
  }
  CHECK(count == 600);

  // gold file for evaluate = the labeled synth corpus itself
  auto ev = run_cli("evaluate " + tmp.file("preds.tsv") + " " + prefix +
                    ".labeled.tsv");
  REQUIRE(ev.code == 0);
  REQUIRE(ev.out.find("error_rate\t-\t") == 0);
  double err = std::stod(ev.out.substr(std::string("error_rate\t-\t").size()));
  CHECK(err < 0.2);  // mostly-exclusive lexicon, scored on the training set
  CHECK(ev.out.find("macro_f1\t-\t") != std::string::npos);
  CHECK(ev.out.find("support\tc0\t") != std::string::npos);

  // classifying with two combined models still produces valid output
  auto clf3 = tmp.file("clf3.model");
  auto tc3 = run_cli("train-clf " + prefix + ".labeled.tsv --feature ngram3" +
                     " --out " + clf3);
  REQUIRE(tc3.code == 0);
  auto comb = run_cli("classify " + clf + " " + tmp.file("names.txt") +
                      " --combine " + clf3);
  REQUIRE(comb.code == 0);
  std::istringstream comb_lines(comb.out);
  count = 0;
  while (std::getline(comb_lines, line)) ++count;
  CHECK(count == 600);
}

TEST_CASE("self-train on an empty unlabeled file matches train-clf") {
  TempDir tmp;
  std::string labeled;
  for (int i = 0; i < 12; ++i) {
    labeled += "female\tmaryann" + std::to_string(i % 3) + "\n";
    labeled += "male\tjohnboy" + std::to_string(i % 3) + "\n";
  }
  write_file(tmp.file("labeled.tsv"), labeled);
  write_file(tmp.file("unlabeled.txt"), "");
  write_file(tmp.file("validation.tsv"), "female\tmarysue\nmale\tjohnbob\n");

  auto direct = tmp.file("direct.model");
  auto tc = run_cli("train-clf " + tmp.file("labeled.tsv") +
                    " --feature ngram3 --out " + direct);
  REQUIRE(tc.code == 0);

  auto st_out = tmp.file("st.model");
  auto st = run_cli("self-train " + tmp.file("labeled.tsv") + " " +
                    tmp.file("unlabeled.txt") + " " +
                    tmp.file("validation.tsv") + " --feature ngram3 --out " +
                    st_out);
  REQUIRE(st.code == 0);
  CHECK(st.out == "iterations\t-\t0\n");
  CHECK(slurp(st_out) == slurp(direct));
}

TEST_CASE("one-vs-all model files classify") {
  TempDir tmp;
  std::string labeled;
  for (int i = 0; i < 8; ++i) {
    labeled += "en\tsmithson" + std::to_string(i) + "\n";
    labeled += "ru\tivanovov" + std::to_string(i) + "\n";
    labeled += "tr\tyilmazoglu" + std::to_string(i) + "\n";
  }
  write_file(tmp.file("labeled.tsv"), labeled);
  auto model = tmp.file("ova.model");
  auto tc = run_cli("train-clf " + tmp.file("labeled.tsv") +
                    " --feature ngram3 --one-vs-all --out " + model);
  REQUIRE(tc.code == 0);
  CHECK(tc.out == "classes\t-\t3\n");

  write_file(tmp.file("probe.txt"), "smithson9\nivanovov9\nyilmazoglu9\n");
  auto preds = run_cli("classify " + model + " " + tmp.file("probe.txt"));
  REQUIRE(preds.code == 0);
  std::istringstream lines(preds.out);
  std::string line;
  std::vector<std::string> classes;
  while (std::getline(lines, line)) {
    auto t1 = line.find('\t');
    auto t2 = line.find('\t', t1 + 1);
    classes.push_back(line.substr(t1 + 1, t2 - t1 - 1));
  }
  REQUIRE(classes.size() == 3);
  CHECK(classes[0] == "en");
  CHECK(classes[1] == "ru");
  CHECK(classes[2] == "tr");
}

// End-to-end checks of the CLI surface: exit codes, output files, flag
// validation. The binary path arrives as argv[1] from CTest.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace {

int failures = 0;

void expect(bool condition, const std::string& label) {
  if (!condition) {
    std::cerr << "[FAIL] " << label << "\n";
    ++failures;
  } else {
    std::cout << "[ok] " << label << "\n";
  }
}

int run(const std::string& command) {
  const int status = std::system(command.c_str());
  return status < 0 ? status : WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
  std::ifstream file(path);
  std::stringstream buffer;
  buffer << file.rdbuf();
  return buffer.str();
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: cli_smoke <path-to-binary>\n";
    return 2;
  }
  const std::string binary = argv[1];
  const std::string dir = "cli_smoke_tmp";
  std::system(("rm -rf " + dir + " && mkdir -p " + dir).c_str());

  // A small balanced panel with two visibly separated blocks.
  {
    std::ofstream csv(dir + "/panel.csv");
    csv << "unit,time,y,x1\n";
    for (int i = 0; i < 6; ++i) {
      for (int t = 0; t < 60; ++t) {
        const double shared = ((i < 3 ? 1.0 : -1.0) * ((t * 37 % 11) - 5.0)) / 3.0;
        const double noise = ((i * 61 + t * 17) % 13 - 6.0) / 40.0;
        csv << "u" << i << "," << t << "," << (shared + noise) << ",1\n";
      }
    }
  }
  // The same panel with one missing row.
  {
    std::ifstream in(dir + "/panel.csv");
    std::ofstream out(dir + "/unbalanced.csv");
    std::string line;
    int count = 0;
    while (std::getline(in, line)) {
      if (++count == 5) continue;
      out << line << "\n";
    }
  }

  expect(run(binary + " --help > /dev/null 2>&1") == 0, "--help exits 0");
  expect(run(binary + " discover --input " + dir + "/panel.csv --bandwidth 2 --eta 0.5 --out " +
             dir + "/clusters.csv --dump-matrix " + dir + "/corr.txt > " + dir +
             "/discover.out 2> /dev/null") == 0,
         "discover exits 0");
  expect(slurp(dir + "/discover.out").find("q_hat=") != std::string::npos,
         "discover prints q_hat");
  expect(slurp(dir + "/clusters.csv").find("unit_id,cluster") != std::string::npos,
         "clusters file has header");
  expect(!slurp(dir + "/corr.txt").empty(), "matrix dump written");

  expect(run(binary + " discover --input " + dir + "/unbalanced.csv --bandwidth 2 --eta 0.5 " +
             "> /dev/null 2> " + dir + "/err.txt") == 1,
         "unbalanced panel exits 1");
  expect(slurp(dir + "/err.txt").find("MissingCell") != std::string::npos,
         "error names MissingCell");

  expect(run(binary + " discover --input " + dir + "/panel.csv --eta 1.2 > /dev/null 2>&1") == 2,
         "eta out of range exits 2");
  expect(run(binary + " infer --input " + dir + "/panel.csv --method nope --r 1 > /dev/null 2>&1") ==
             2,
         "unknown method exits 2");

  expect(run(binary + " tune --input " + dir + "/panel.csv --out " + dir + "/surface.csv > " +
             dir + "/tune.out 2> /dev/null") == 0,
         "tune exits 0");
  expect(slurp(dir + "/tune.out").find("best_bandwidth=") != std::string::npos,
         "tune prints the chosen pair");
  expect(slurp(dir + "/surface.csv").find("bandwidth,eta_tilde,score") != std::string::npos,
         "surface file has header");

  {
    std::ofstream manual(dir + "/manual_clusters.csv");
    manual << "unit_id,cluster\n";
    for (int i = 0; i < 6; ++i) manual << "u" << i << "," << (i < 3 ? 1 : 2) << "\n";
  }
  expect(run(binary + " infer --input " + dir + "/panel.csv --method art --r 1 --lambda 0 " +
             "--alpha 0.1 --clusters " + dir + "/manual_clusters.csv > " + dir +
             "/art.out 2> /dev/null") == 0,
         "infer art exits 0");
  {
    const std::string out = slurp(dir + "/art.out");
    expect(out.find("p_value=") != std::string::npos && out.find("phi=") != std::string::npos &&
               out.find("q_hat=2") != std::string::npos,
           "infer art prints statistic fields");
  }
  // eta = 0 keeps the complete graph, so discovery returns one cluster
  expect(run(binary + " infer --input " + dir + "/panel.csv --method cce --r 1 --lambda 0 " +
             "--bandwidth 2 --eta 0.0 > /dev/null 2> " + dir + "/cceerr.txt") == 1,
         "cce on a single discovered cluster exits 1");
  expect(slurp(dir + "/cceerr.txt").find("single cluster") != std::string::npos,
         "single-cluster message is explicit");
  expect(run(binary + " infer --input " + dir + "/panel.csv --method bcl --r 1 --lambda 0 " +
             "--bandwidth 3 > " + dir + "/bcl.out 2> /dev/null") == 0,
         "infer bcl exits 0");

  expect(run(binary + " simulate --q 2 --n 6 --t 40 --reps 5 --methods art_oracle --tuning fixed "
             "--bandwidth 2 --eta 0.5 --seed 9 --out " + dir + "/table.csv 2> /dev/null") == 0,
         "simulate exits 0");
  expect(slurp(dir + "/table.csv").find("rejection_rate,art_oracle") != std::string::npos,
         "simulate table has the method row");
  expect(run(binary + " simulate --q 2 --n 6 --t 40 --reps 3 --methods nope > /dev/null 2>&1") ==
             2,
         "invalid simulate method exits 2");

  if (failures == 0) std::cout << "cli smoke: all checks passed\n";
  return failures == 0 ? 0 : 1;
}

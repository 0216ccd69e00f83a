#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "fdecnl/io.hpp"

using namespace fdecnl;
namespace fs = std::filesystem;

namespace {
struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("fdecnl_test_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}
}  // namespace

TEST_CASE("sample CSV: round trip preserves values and metadata") {
  TempDir tmp;
  spectra::SpectrumSample s;
  s.p = 5;
  s.d = 3;
  s.eigenvalues = Vector(3);
  s.eigenvalues << -0.25, 0.1234567890123456, 2.0;
  const std::string path = tmp.file("sample.csv");
  io::write_sample_csv(path, s, "spn", 42);

  const auto file = io::read_sample_csv(path);
  CHECK(file.sample.p == 5);
  CHECK(file.sample.d == 3);
  CHECK(file.seed == 42);
  CHECK(file.model == "spn");
  for (int k = 0; k < 3; ++k) CHECK(file.sample.eigenvalues[k] == s.eigenvalues[k]);

  // Writing twice produces identical bytes.
  const std::string again = tmp.file("sample2.csv");
  io::write_sample_csv(again, s, "spn", 42);
  CHECK(slurp(path) == slurp(again));
}

TEST_CASE("sample CSV: header and preamble layout") {
  TempDir tmp;
  spectra::SpectrumSample s;
  s.p = 2;
  s.d = 2;
  s.eigenvalues = Vector(2);
  s.eigenvalues << 0.0, 1.0;
  const std::string path = tmp.file("sample.csv");
  io::write_sample_csv(path, s, "cw", 7, {"fdecnl 0.1.0", "config {}"});
  const std::string text = slurp(path);
  CHECK(text.find("# fdecnl 0.1.0\n") == 0);
  CHECK(text.find("# p=2 d=2 seed=7 model=cw\n") != std::string::npos);
}

TEST_CASE("sample CSV: malformed files are rejected") {
  TempDir tmp;
  const std::string path = tmp.file("bad.csv");
  {
    std::ofstream out(path);
    out << "0.5\n1.5\n";  // no metadata header
  }
  CHECK_THROWS_AS(io::read_sample_csv(path), io::IoError);
  CHECK_THROWS_AS(io::read_sample_csv(tmp.file("missing.csv")), io::IoError);

  {
    std::ofstream out(path);
    out << "# p=2 d=3 seed=0 model=cw\n0.5\n1.5\n";  // d mismatch
  }
  CHECK_THROWS_AS(io::read_sample_csv(path), io::IoError);
}

TEST_CASE("trace CSV: layout") {
  TempDir tmp;
  optim::RunTrace trace;
  trace.push_back({0, 1.5, 0.75, 30});
  trace.push_back({50, 1.2, std::nan(""), 1500});
  const std::string path = tmp.file("trace.csv");
  io::write_trace_csv(path, trace);
  const std::string text = slurp(path);
  CHECK(text.find("iteration,loss_sample,validation_loss,inner_iterations\n") !=
        std::string::npos);
  CHECK(text.find("0,1.5,0.75,30\n") != std::string::npos);
  CHECK(text.find("50,1.2,,1500\n") != std::string::npos);  // NaN -> empty field
}

TEST_CASE("density CSV: optional sample column") {
  TempDir tmp;
  std::vector<io::DensityRow> rows = {{0.0, 3.18, 12, 1e-9, 3.2}};
  const std::string with = tmp.file("density.csv");
  io::write_density_csv(with, rows, true);
  CHECK(slurp(with).find("x,slice_value,iterations,residual,sample_smooth\n") !=
        std::string::npos);
  const std::string without = tmp.file("density2.csv");
  io::write_density_csv(without, rows, false);
  CHECK(slurp(without).find("x,slice_value,iterations,residual\n") != std::string::npos);
}

TEST_CASE("theta JSON: round trip") {
  TempDir tmp;
  Vector theta(3);
  theta << 0.1, -0.987654321098765, 1.2;
  const std::string path = tmp.file("theta.json");
  io::write_theta_json(path, Model::Spn, theta, R"({"gamma":0.1})");
  const Vector back = io::read_theta_json(path);
  REQUIRE(back.size() == 3);
  for (int i = 0; i < 3; ++i) CHECK(back[i] == theta[i]);
  CHECK(slurp(path).find("\"spn\"") != std::string::npos);
}

#include "fdecnl/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace fdecnl::io {

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);  // '\n' line endings everywhere
  if (!out) throw IoError("cannot open for writing: " + path);
  return out;
}

void write_preamble(std::ofstream& out, const Preamble& preamble) {
  for (const auto& line : preamble) out << "# " << line << "\n";
}

}  // namespace

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void write_sample_csv(const std::string& path, const spectra::SpectrumSample& s,
                      const std::string& model, std::uint64_t seed, const Preamble& preamble) {
  auto out = open_out(path);
  write_preamble(out, preamble);
  out << "# p=" << s.p << " d=" << s.d << " seed=" << seed << " model=" << model << "\n";
  for (Eigen::Index k = 0; k < s.eigenvalues.size(); ++k) {
    out << format_double(s.eigenvalues[k]) << "\n";
  }
  if (!out) throw IoError("write failed: " + path);
}

SampleFile read_sample_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open for reading: " + path);
  SampleFile file;
  std::vector<double> values;
  std::string line;
  bool have_meta = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      // Meta header: "# p=<p> d=<d> seed=<seed> model=<cw|spn>"
      std::istringstream meta(line.substr(1));
      std::string token;
      int fields = 0;
      while (meta >> token) {
        const auto eq = token.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = token.substr(0, eq);
        const std::string value = token.substr(eq + 1);
        if (key == "p") file.sample.p = std::stoi(value), ++fields;
        else if (key == "d") file.sample.d = std::stoi(value), ++fields;
        else if (key == "seed") file.seed = std::stoull(value), ++fields;
        else if (key == "model") file.model = value, ++fields;
      }
      if (fields == 4) have_meta = true;
      continue;
    }
    values.push_back(std::stod(line));
  }
  if (!have_meta) throw IoError("missing '# p=... d=... seed=... model=...' header: " + path);
  if (static_cast<int>(values.size()) != file.sample.d) {
    throw IoError("eigenvalue count does not match d in header: " + path);
  }
  file.sample.eigenvalues = Eigen::Map<Vector>(values.data(), values.size());
  for (Eigen::Index k = 1; k < file.sample.eigenvalues.size(); ++k) {
    if (file.sample.eigenvalues[k - 1] > file.sample.eigenvalues[k]) {
      throw IoError("eigenvalues not ascending: " + path);
    }
  }
  return file;
}

void write_trace_csv(const std::string& path, const optim::RunTrace& trace,
                     const Preamble& preamble) {
  auto out = open_out(path);
  write_preamble(out, preamble);
  out << "iteration,loss_sample,validation_loss,inner_iterations\n";
  for (const auto& rec : trace) {
    out << rec.iteration << "," << format_double(rec.loss_sample) << ","
        << (std::isnan(rec.validation) ? std::string("") : format_double(rec.validation)) << ","
        << rec.inner_iterations << "\n";
  }
  if (!out) throw IoError("write failed: " + path);
}

void write_density_csv(const std::string& path, const std::vector<DensityRow>& rows,
                       bool with_sample_column, const Preamble& preamble) {
  auto out = open_out(path);
  write_preamble(out, preamble);
  out << "x,slice_value,iterations,residual" << (with_sample_column ? ",sample_smooth" : "")
      << "\n";
  for (const auto& row : rows) {
    out << format_double(row.x) << "," << format_double(row.slice_value) << "," << row.iterations
        << "," << format_double(row.residual);
    if (with_sample_column) out << "," << format_double(row.sample_smooth);
    out << "\n";
  }
  if (!out) throw IoError("write failed: " + path);
}

void write_sweep_csv(const std::string& path, const std::vector<recover::SweepCell>& cells,
                     const Preamble& preamble) {
  auto out = open_out(path);
  write_preamble(out, preamble);
  out << "d_true,lambda_min,seed,estimated_rank,baseline_rank,v_spn,runtime_seconds\n";
  for (const auto& c : cells) {
    out << c.d_true << "," << format_double(c.lambda_min) << "," << c.seed << ","
        << c.estimated_rank << "," << c.baseline << "," << format_double(c.validation) << ","
        << format_double(c.runtime_seconds) << "\n";
  }
  if (!out) throw IoError("write failed: " + path);
}

void write_gap_csv(const std::string& path, const std::vector<recover::GapReport>& reports,
                   const Preamble& preamble) {
  auto out = open_out(path);
  write_preamble(out, preamble);
  out << "gamma,d,empirical_entropy,deterministic_entropy,gap,quadrature_bound\n";
  for (const auto& r : reports) {
    out << format_double(r.gamma) << "," << r.d << "," << format_double(r.empirical_entropy)
        << "," << format_double(r.deterministic_entropy) << "," << format_double(r.gap) << ","
        << format_double(r.quadrature_bound) << "\n";
  }
  if (!out) throw IoError("write failed: " + path);
}

void write_theta_json(const std::string& path, Model model, const Vector& theta,
                      const std::string& config_json) {
  nlohmann::json doc;
  doc["version"] = kVersion;
  doc["model"] = model_name(model);
  doc["theta"] = std::vector<double>(theta.data(), theta.data() + theta.size());
  if (!config_json.empty()) doc["config"] = nlohmann::json::parse(config_json);
  auto out = open_out(path);
  out << doc.dump(2) << "\n";
  if (!out) throw IoError("write failed: " + path);
}

Vector read_theta_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open for reading: " + path);
  nlohmann::json doc;
  in >> doc;
  const auto values = doc.at("theta").get<std::vector<double>>();
  return Eigen::Map<const Vector>(values.data(), values.size());
}

}  // namespace fdecnl::io

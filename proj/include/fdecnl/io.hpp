#ifndef FDECNL_IO_HPP
#define FDECNL_IO_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "fdecnl/optim.hpp"
#include "fdecnl/recover.hpp"
#include "fdecnl/spectra.hpp"
#include "fdecnl/types.hpp"

namespace fdecnl::io {

inline constexpr const char* kVersion = "0.1.0";

class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

/// Round-trip-safe decimal rendering of a double.
std::string format_double(double x);

/// One row per density-grid point of the `density` command.
struct DensityRow {
  double x = 0.0;
  double slice_value = 0.0;
  long iterations = 0;
  double residual = 0.0;
  double sample_smooth = -1.0;  // optional Poisson-smoothed sample overlay; < 0 = absent
};

/// Extra `# ...` comment lines (version, materialized config) are prepended
/// to every CSV for provenance.
using Preamble = std::vector<std::string>;

void write_sample_csv(const std::string& path, const spectra::SpectrumSample& s,
                      const std::string& model, std::uint64_t seed,
                      const Preamble& preamble = {});

struct SampleFile {
  spectra::SpectrumSample sample;
  std::string model;
  std::uint64_t seed = 0;
};
SampleFile read_sample_csv(const std::string& path);

void write_trace_csv(const std::string& path, const optim::RunTrace& trace,
                     const Preamble& preamble = {});

void write_density_csv(const std::string& path, const std::vector<DensityRow>& rows,
                       bool with_sample_column, const Preamble& preamble = {});

void write_sweep_csv(const std::string& path, const std::vector<recover::SweepCell>& cells,
                     const Preamble& preamble = {});

void write_gap_csv(const std::string& path, const std::vector<recover::GapReport>& reports,
                   const Preamble& preamble = {});

/// Estimated parameters as JSON ({"model", "theta", ...}).
void write_theta_json(const std::string& path, Model model, const Vector& theta,
                      const std::string& config_json);
Vector read_theta_json(const std::string& path);

}  // namespace fdecnl::io

#endif  // FDECNL_IO_HPP

#pragma once

// Command-line front end. Natural units throughout: hbar = 2m = 1, E = k^2.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "abpoint/params.hpp"

namespace abpoint::cli {

enum class Command { spectrum, smatrix, xsection, sweep, specfun };
enum class Format { json, csv };

enum ExitCode : int {
  kOk = 0,
  kBadParameters = 2,
  kChartSingular = 3,
  kForwardCone = 4,
};

inline constexpr long kMaxSweepPoints = 1'000'000;
// CLI-level exclusion around theta0 (radians, modulo 2 pi).
inline constexpr double kCliForwardCone = 1e-4;

struct Range {
  double min{0};
  double max{0};
  int count{1};

  // Inclusive linear grid; a single point sits at min.
  std::vector<double> points() const;
};

struct RunConfig {
  Command command{Command::spectrum};
  std::optional<Format> format;
  std::string out_path;

  double alpha{0.5};
  LambdaParams<double> lambda;
  std::optional<UParams<double>> unitary;  // set when the U chart was given

  Range k{1.0, 1.0, 1};
  double theta0{0};
  int theta_count{360};
  std::optional<double> theta_min, theta_max;

  bool eigenfunction{false};
  std::optional<double> r_max;
  int r_count{50};

  Range u_grid, v_grid, w_grid;
  double w_phase{0};
  int threads{0};

  double nu{0.5};
  double x{1.0};
};

// Parses and runs; `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

int cmd_spectrum(const RunConfig& config, std::ostream& out);
int cmd_smatrix(const RunConfig& config, std::ostream& out);
int cmd_xsection(const RunConfig& config, std::ostream& out);
int cmd_sweep(const RunConfig& config, std::ostream& out);
int cmd_specfun(const RunConfig& config, std::ostream& out);

}  // namespace abpoint::cli

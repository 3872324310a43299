#include "abpoint/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "abpoint/eigenbasis.hpp"
#include "abpoint/errors.hpp"
#include "abpoint/io.hpp"
#include "abpoint/scattering.hpp"
#include "abpoint/spectrum.hpp"

namespace abpoint::cli {

namespace {

using io::format_number;
using io::json;

constexpr const char* kUnitsNote = "Natural units: hbar = 2m = 1, so E = k^2 and bound states sit at E = -p^2.";

// Everything the commands need once flags and the optional parameter file are merged.
struct Resolved {
  Flux<double> flux;
  LambdaParams<double> lambda;
};

Resolved resolve(const RunConfig& config) {
  Flux<double> flux(config.alpha);
  if (config.unitary) return {flux, u_to_lambda(flux, *config.unitary)};
  return {flux, config.lambda};
}

void check_range(const Range& range, const char* name, bool positive) {
  if (range.count < 1) throw ParameterError(std::string(name) + " count must be >= 1");
  if (!(range.min <= range.max)) throw ParameterError(std::string(name) + " range must satisfy min <= max");
  if (!std::isfinite(range.min) || !std::isfinite(range.max)) {
    throw ParameterError(std::string(name) + " range must be finite");
  }
  if (positive && !(range.min > 0)) throw ParameterError(std::string(name) + " values must be positive");
}

std::string csv_complex(std::complex<double> z) { return format_number(z.real()) + "," + format_number(z.imag()); }

// Distance from theta to theta0 on the circle.
double angular_distance(double theta, double theta0) {
  const double two_pi = 2 * kPi<double>;
  double d = std::fmod(std::fabs(theta - theta0), two_pi);
  return std::min(d, two_pi - d);
}

std::vector<double> theta_grid(const RunConfig& config) {
  const int n = config.theta_count;
  if (n < 1) throw ParameterError("theta count must be >= 1");
  std::vector<double> thetas(n);
  if (config.theta_min || config.theta_max) {
    const Range range{config.theta_min.value_or(config.theta0), config.theta_max.value_or(config.theta0 + 2 * kPi<double>),
                      n};
    check_range(range, "theta", false);
    thetas = range.points();
  } else {
    // Open grid that never lands on theta0 itself.
    for (int j = 0; j < n; ++j) thetas[j] = config.theta0 + 2 * kPi<double> * (j + 1) / (n + 1);
  }
  return thetas;
}

std::string sweep_row(const Flux<double>& flux, const LambdaParams<double>& lam, double k) {
  const SpectrumReport<double> report = find_bound_states(flux, lam);
  double p[2] = {std::nan(""), std::nan("")};
  int slot = 0;
  for (const auto& st : report.states) {
    for (int m = 0; m < st.multiplicity && slot < 2; ++m) p[slot++] = st.p;
  }
  const Matrix2c<double> s = sigma(flux, lam, k).entries;
  std::string row = format_number(lam.u) + "," + format_number(lam.v) + "," + format_number(std::abs(lam.w)) + "," +
                    std::to_string(report.count) + "," + format_number(p[0]) + "," + format_number(p[1]);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) row += "," + csv_complex(s(i, j));
  }
  row += "," + format_number(unitarity_deficit(s));
  return row;
}

void add_parameter_flags(CLI::App& app, RunConfig& config, std::string& params_path) {
  app.add_option("--alpha", config.alpha, "Flux alpha in (0, 1)");
  auto* group_lambda = app.add_option_group("lambda", "Lambda chart");
  group_lambda->add_option("--u", config.lambda.u, "Lambda_11");
  group_lambda->add_option("--v", config.lambda.v, "Lambda_22");
  group_lambda->add_option_function<double>("--w-re,--w", [&config](double x) { config.lambda.w.real(x); }, "Re w");
  group_lambda->add_option_function<double>("--w-im", [&config](double x) { config.lambda.w.imag(x); }, "Im w");
  auto* group_u = app.add_option_group("unitary", "Unitary chart (defaults: omega = pi, a = b = 0, q = 1, i.e. U = -1)");
  group_u->add_option("--omega", "Overall phase of U");
  group_u->add_option("--a", "Diagonal phase of U");
  group_u->add_option("--b", "Off-diagonal phase of U");
  group_u->add_option("--q", "Diagonal modulus of U in [0, 1]");
  app.add_option("--params", params_path, "JSON file with alpha and either chart");
}

// Merges the U-chart flags and the parameter file into config; throws ParameterError on conflicts.
void finish_parameters(CLI::App& app, RunConfig& config, const std::string& params_path) {
  const bool lambda_given = app.get_option_group("lambda")->count_all() > 0;
  auto* group_u = app.get_option_group("unitary");
  const bool u_given = group_u->count_all() > 0;
  if (lambda_given && u_given) throw ParameterError("Lambda-chart and U-chart flags are mutually exclusive");

  if (!params_path.empty()) {
    if (lambda_given || u_given) throw ParameterError("--params cannot be combined with chart flags");
    std::ifstream in(params_path);
    if (!in) throw ParameterError("cannot open parameter file " + params_path);
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw ParameterError(std::string("malformed parameter file: ") + e.what());
    }
    const io::ParameterSet set = io::parameters_from_json(j);
    config.alpha = set.alpha;
    if (const auto* lam = std::get_if<LambdaParams<double>>(&set.chart)) {
      config.lambda = *lam;
    } else {
      config.unitary = std::get<UParams<double>>(set.chart);
    }
    return;
  }

  if (u_given) {
    const auto get = [&](const char* name, double fallback) {
      const CLI::Option* opt = group_u->get_option(name);
      return opt->count() > 0 ? opt->as<double>() : fallback;
    };
    config.unitary = UParams<double>(get("--omega", kPi<double>), get("--a", 0), get("--b", 0), get("--q", 1));
  }
  for (const double x : {config.alpha, config.lambda.u, config.lambda.v, config.lambda.w.real(), config.lambda.w.imag()}) {
    if (!std::isfinite(x)) throw ParameterError("parameters must be finite");
  }
}

void add_k_flags(CLI::App& app, RunConfig& config, double& k_single) {
  app.add_option("--k", k_single, "Single momentum");
  app.add_option("--k-min", config.k.min, "Smallest momentum of the grid");
  app.add_option("--k-max", config.k.max, "Largest momentum of the grid");
  app.add_option("--k-count", config.k.count, "Number of grid points (inclusive, linear)");
}

void finish_k(CLI::App& app, RunConfig& config, double k_single) {
  const bool single = app.get_option("--k")->count() > 0;
  const bool grid = app.get_option("--k-min")->count() + app.get_option("--k-max")->count() +
                        app.get_option("--k-count")->count() > 0;
  if (single && grid) throw ParameterError("--k cannot be combined with --k-min/--k-max/--k-count");
  if (single) {
    config.k = {k_single, k_single, 1};
  } else if (grid) {
    if (app.get_option("--k-max")->count() == 0) config.k.max = config.k.min;
    if (app.get_option("--k-min")->count() == 0) config.k.min = config.k.max;
  }
  check_range(config.k, "k", true);
}

void add_format_flags(CLI::App& app, RunConfig& config) {
  app.add_option_function<std::string>(
         "--format", [&config](const std::string& name) { config.format = name == "json" ? Format::json : Format::csv; },
         "Output format: json or csv")
      ->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--out", config.out_path, "Output file (default: standard output)");
}

int dispatch(const RunConfig& config, std::ostream& out) {
  switch (config.command) {
    case Command::spectrum: return cmd_spectrum(config, out);
    case Command::smatrix: return cmd_smatrix(config, out);
    case Command::xsection: return cmd_xsection(config, out);
    case Command::sweep: return cmd_sweep(config, out);
    case Command::specfun: return cmd_specfun(config, out);
  }
  return kBadParameters;
}

}  // namespace

std::vector<double> Range::points() const {
  std::vector<double> out(std::max(count, 0));
  for (int i = 0; i < count; ++i) {
    out[i] = count == 1 ? min : min + (max - min) * i / (count - 1);
  }
  if (count > 1) out.back() = max;
  return out;
}

int cmd_spectrum(const RunConfig& config, std::ostream& out) {
  const Resolved p = resolve(config);
  const SpectrumReport<double> report = find_bound_states(p.flux, p.lambda);

  if (!config.eigenfunction) {
    if (config.format == Format::csv) {
      out << "# count " << report.count << "\n";
      out << "p,energy,xi_re,xi_im,eta_re,eta_im,multiplicity\n";
      for (const auto& st : report.states) {
        out << format_number(st.p) << ',' << format_number(st.energy) << ',' << csv_complex(st.xi) << ','
            << csv_complex(st.eta) << ',' << st.multiplicity << '\n';
      }
    } else {
      out << io::to_json(report).dump(2) << '\n';
    }
    return kOk;
  }

  if (config.r_count < 1) throw ParameterError("r count must be >= 1");
  if (config.theta_count < 1) throw ParameterError("theta count must be >= 1");
  out << "# " << io::to_json(report).dump() << '\n';
  out << "r,theta,re,im\n";
  for (std::size_t s = 0; s < report.states.size(); ++s) {
    const auto& st = report.states[s];
    const double r_max = config.r_max.value_or(10 / st.p);
    if (!(r_max > 0)) throw ParameterError("--r-max must be positive");
    out << "# state " << s << " p " << format_number(st.p) << '\n';
    for (int i = 0; i < config.r_count; ++i) {
      const double r = r_max * (i + 1) / config.r_count;
      for (int j = 0; j < config.theta_count; ++j) {
        const double theta = 2 * kPi<double> * j / config.theta_count;
        out << format_number(r) << ',' << format_number(theta) << ','
            << csv_complex(bound_wavefunction(p.flux, st, r, theta)) << '\n';
      }
    }
  }
  return kOk;
}

int cmd_smatrix(const RunConfig& config, std::ostream& out) {
  const Resolved p = resolve(config);
  check_range(config.k, "k", true);
  const std::vector<double> ks = config.k.points();

  if (config.format == Format::json) {
    json rows = json::array();
    for (const double k : ks) {
      const ChannelMatrix<double> s = sigma(p.flux, p.lambda, k);
      json row = io::to_json(s);
      row["unitarity_deficit"] = unitarity_deficit(s.entries);
      rows.push_back(row);
    }
    out << rows.dump(2) << '\n';
    return kOk;
  }

  out << "# " << io::to_json(p.flux, p.lambda).dump() << '\n';
  out << "k,s11_re,s11_im,s12_re,s12_im,s21_re,s21_im,s22_re,s22_im,unitarity_deficit\n";
  for (const double k : ks) {
    const Matrix2c<double> s = sigma(p.flux, p.lambda, k).entries;
    out << format_number(k);
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) out << ',' << csv_complex(s(i, j));
    }
    out << ',' << format_number(unitarity_deficit(s)) << '\n';
  }
  return kOk;
}

int cmd_xsection(const RunConfig& config, std::ostream& out) {
  const Resolved p = resolve(config);
  check_range(config.k, "k", true);
  const std::vector<double> ks = config.k.points();
  const std::vector<double> thetas = theta_grid(config);
  for (const double theta : thetas) {
    if (angular_distance(theta, config.theta0) < kCliForwardCone) {
      throw ForwardDirection("theta grid meets the forward direction at theta = " + format_number(theta));
    }
  }

  const double delta = std::cos(kPi<double> * p.flux.alpha());
  if (config.format == Format::json) {
    json rows = json::array();
    for (const double k : ks) {
      for (const double theta : thetas) {
        const KernelSample<double> s = kernel(p.flux, p.lambda, k, theta, config.theta0);
        rows.push_back({{"k", k},
                        {"theta", theta},
                        {"dsigma_dtheta", 2 * kPi<double> / k * std::norm(s.value)},
                        {"S", {s.value.real(), s.value.imag()}}});
      }
    }
    out << json{{"theta0", config.theta0}, {"delta_coefficient", delta}, {"rows", rows}}.dump(2) << '\n';
    return kOk;
  }

  out << "# delta_coefficient " << format_number(delta) << '\n';
  out << "# theta0 " << format_number(config.theta0) << '\n';
  if (ks.size() == 1) {
    out << "# k " << format_number(ks.front()) << '\n';
    out << "theta,dsigma_dtheta,re_S,im_S\n";
  } else {
    out << "k,theta,theta0,re,im,dsigma_dtheta\n";
  }
  for (const double k : ks) {
    for (const double theta : thetas) {
      const KernelSample<double> s = kernel(p.flux, p.lambda, k, theta, config.theta0);
      const double dsigma = 2 * kPi<double> / k * std::norm(s.value);
      if (ks.size() == 1) {
        out << format_number(theta) << ',' << format_number(dsigma) << ',' << csv_complex(s.value) << '\n';
      } else {
        out << format_number(k) << ',' << format_number(theta) << ',' << format_number(config.theta0) << ','
            << csv_complex(s.value) << ',' << format_number(dsigma) << '\n';
      }
    }
  }
  return kOk;
}

int cmd_sweep(const RunConfig& config, std::ostream& out) {
  const Flux<double> flux(config.alpha);
  check_range(config.u_grid, "u", false);
  check_range(config.v_grid, "v", false);
  check_range(config.w_grid, "|w|", false);
  if (config.w_grid.min < 0) throw ParameterError("|w| grid must be non-negative");
  if (config.k.count != 1) throw ParameterError("sweep takes a single --k");
  check_range(config.k, "k", true);
  const long total = long(config.u_grid.count) * config.v_grid.count * config.w_grid.count;
  if (total > kMaxSweepPoints) {
    throw ParameterError("sweep grid has " + std::to_string(total) + " points; the limit is " +
                         std::to_string(kMaxSweepPoints));
  }

  const std::vector<double> us = config.u_grid.points(), vs = config.v_grid.points(), ws = config.w_grid.points();
  const double k = config.k.min;
  const std::complex<double> phase = std::polar(1.0, config.w_phase);
  std::vector<std::string> rows(static_cast<std::size_t>(total));
  std::atomic<long> next{0};
  std::atomic<bool> failed{false};
  std::string failure;

  const auto worker = [&] {
    for (long idx = next++; idx < total && !failed; idx = next++) {
      const long iw = idx % config.w_grid.count;
      const long iv = (idx / config.w_grid.count) % config.v_grid.count;
      const long iu = idx / (long(config.w_grid.count) * config.v_grid.count);
      const LambdaParams<double> lam{us[iu], vs[iv], ws[iw] * phase};
      try {
        rows[std::size_t(idx)] = sweep_row(flux, lam, k);
      } catch (const std::exception& e) {
        if (!failed.exchange(true)) failure = e.what();
      }
    }
  };

  unsigned threads = config.threads > 0 ? unsigned(config.threads) : std::max(1u, std::thread::hardware_concurrency());
  threads = unsigned(std::min<long>(threads, total));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failed) throw std::runtime_error(failure);

  out << "# alpha " << format_number(config.alpha) << " k " << format_number(k) << " w_phase "
      << format_number(config.w_phase) << '\n';
  out << "u,v,w_abs,count,p1,p2,s11_re,s11_im,s12_re,s12_im,s21_re,s21_im,s22_re,s22_im,unitarity_deficit\n";
  for (const auto& row : rows) out << row << '\n';
  return kOk;
}

int cmd_specfun(const RunConfig& config, std::ostream& out) {
  const Order<double> order(config.nu);
  json j{{"nu", config.nu}, {"x", config.x}};
  j["bessel_j"] = bessel_j(order, config.x);
  j["bessel_k"] = config.x > 0 ? json(bessel_k(order, config.x)) : json(nullptr);
  j["gamma_1_plus_nu"] = gamma_real(1 + config.nu);
  out << j.dump(2) << '\n';
  return kOk;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{std::string("Aharonov-Bohm flux with a point interaction. ") + kUnitsNote, "abpoint"};
  app.require_subcommand(1);

  RunConfig config;
  std::string params_path;
  double k_single = 1.0;

  auto* spectrum = app.add_subcommand("spectrum", "Bound states (JSON report or eigenfunction samples)");
  auto* smatrix = app.add_subcommand("smatrix", "Channel S-matrix over a k grid");
  auto* xsection = app.add_subcommand("xsection", "Scattering kernel and cross section over a theta grid");
  auto* sweep = app.add_subcommand("sweep", "Bound-state counts and S-matrix over a (u, v, |w|) grid");
  auto* specfun = app.add_subcommand("specfun", "Gamma and Bessel function values");

  for (CLI::App* sub : {spectrum, smatrix, xsection}) {
    add_parameter_flags(*sub, config, params_path);
    add_format_flags(*sub, config);
  }
  add_k_flags(*smatrix, config, k_single);
  add_k_flags(*xsection, config, k_single);
  for (CLI::App* sub : {spectrum, xsection}) sub->add_option("--theta-count", config.theta_count, "Angular samples");
  xsection->add_option("--theta0", config.theta0, "Incident direction");
  xsection->add_option("--theta-min", config.theta_min, "First angle of an inclusive grid");
  xsection->add_option("--theta-max", config.theta_max, "Last angle of an inclusive grid");
  spectrum->add_flag("--eigenfunction", config.eigenfunction, "Dump bound eigenfunctions as r,theta,re,im");
  spectrum->add_option("--r-max", config.r_max, "Largest radius (default 10 / p)");
  spectrum->add_option("--r-count", config.r_count, "Radial samples");

  sweep->add_option("--alpha", config.alpha, "Flux alpha in (0, 1)");
  const auto add_grid = [&](const std::string& name, Range& range) {
    sweep->add_option("--" + name + "-min", range.min, "First " + name + " value (default 0)");
    sweep->add_option("--" + name + "-max", range.max, "Last " + name + " value (default 0)");
    sweep->add_option("--" + name + "-count", range.count, "Number of " + name + " values (inclusive, linear)");
  };
  add_grid("u", config.u_grid);
  add_grid("v", config.v_grid);
  add_grid("w-abs", config.w_grid);
  sweep->add_option("--w-phase", config.w_phase, "Phase of w along the grid");
  sweep->add_option("--k", k_single, "Momentum for the S-matrix columns");
  sweep->add_option("--threads", config.threads, "Worker threads (0 = hardware concurrency)");
  sweep->add_option("--out", config.out_path, "Output file (default: standard output)");

  specfun->add_option("--nu", config.nu, "Order in (-1, 2)");
  specfun->add_option("--x", config.x, "Argument");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);
    err << "error: " << e.what() << '\n';
    return kBadParameters;
  }

  try {
    CLI::App* active = app.get_subcommands().front();
    if (active == spectrum) config.command = Command::spectrum;
    if (active == smatrix) config.command = Command::smatrix;
    if (active == xsection) config.command = Command::xsection;
    if (active == sweep) config.command = Command::sweep;
    if (active == specfun) config.command = Command::specfun;

    if (active == spectrum || active == smatrix || active == xsection) finish_parameters(*active, config, params_path);
    if (active == smatrix || active == xsection) finish_k(*active, config, k_single);
    if (active == sweep) config.k = {k_single, k_single, 1};
    if (active == smatrix && !config.format) config.format = Format::csv;
    if (active == xsection && !config.format) config.format = Format::csv;

    std::ostringstream buffer;
    const int code = dispatch(config, buffer);
    if (config.out_path.empty()) {
      out << buffer.str();
    } else {
      std::ofstream file(config.out_path, std::ios::binary);
      if (!file) throw ParameterError("cannot open output file " + config.out_path);
      file << buffer.str();
    }
    return code;
  } catch (const ParameterError& e) {
    err << "error: " << e.what() << '\n';
    return kBadParameters;
  } catch (const NotInvertible& e) {
    err << "error: " << e.what() << '\n';
    return kChartSingular;
  } catch (const ForwardDirection& e) {
    err << "error: " << e.what() << '\n';
    return kForwardCone;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kBadParameters;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, out, err);
}

}  // namespace abpoint::cli

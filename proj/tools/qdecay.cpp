// Command-line front end: declare an experiment (initial state, time grid,
// expansion order), run it, and emit machine-readable CSV/JSON reports.
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "qdecay/asymptotics.hpp"
#include "qdecay/gridio.hpp"
#include "qdecay/propagation.hpp"
#include "qdecay/report.hpp"
#include "qdecay/timeop.hpp"
#include "qdecay/version.hpp"

namespace {

using qdecay::Complex;
using qdecay::fmt_double;
using Json = nlohmann::ordered_json;

struct Options {
  std::string state = "gaussian";
  int m = 0;
  double a0 = 0.5;
  double d = 2.0;
  double k0 = 1.0;
  std::string input;
  double t_lo = 0.1;
  double t_hi = 1000.0;
  int t_count = 32;
  std::string t_scale = "log";
  int order = 2;
  std::vector<double> fit_window;  // empty: default window
  std::string out;
  std::string format;  // per-subcommand default
  double tol = 1e-10;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

qdecay::WaveFunction make_state(const Options& o) {
  if (o.state == "gaussian") {
    if (o.m < 0 || !(o.a0 > 0.0))
      throw ConfigError("gaussian state needs m >= 0 and a0 > 0");
    return qdecay::WaveFunction::gaussian_family(o.m, o.a0);
  }
  if (o.state == "bump") {
    if (!(o.k0 > 0.0) || !(o.d > o.k0))
      throw ConfigError("bump state needs d > k0 > 0");
    return qdecay::WaveFunction::momentum_bump(o.d, o.k0);
  }
  if (o.state == "file") {
    if (o.input.empty()) throw ConfigError("--state file requires --input");
    try {
      return qdecay::read_grid_file(o.input);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  throw ConfigError("unknown state '" + o.state +
                    "' (expected gaussian, bump, or file)");
}

// Asymptotic fit windows are expressed in units of the family time scale.
double time_scale(const Options& o) {
  return o.state == "gaussian" ? 2.0 * o.a0 : 1.0;
}

std::vector<double> time_grid(const Options& o) {
  if (!(o.t_lo < o.t_hi)) throw ConfigError("need --t-lo < --t-hi");
  if (o.t_count < 2) throw ConfigError("need --t-count >= 2");
  const bool log_scale = o.t_scale == "log";
  if (!log_scale && o.t_scale != "lin")
    throw ConfigError("--t-scale must be log or lin");
  if (log_scale && !(o.t_lo > 0.0))
    throw ConfigError("log time grid needs --t-lo > 0");
  return qdecay::make_time_grid(o.t_lo, o.t_hi, std::size_t(o.t_count),
                                log_scale);
}

void echo_meta(Json& meta, const Options& o, const std::string& cmd) {
  meta["tool"] = qdecay::kToolName;
  meta["version"] = qdecay::kVersion;
  meta["subcommand"] = cmd;
  Json cfg;
  cfg["state"] = o.state;
  if (o.state == "gaussian") {
    cfg["m"] = o.m;
    cfg["a0"] = o.a0;
  } else if (o.state == "bump") {
    cfg["d"] = o.d;
    cfg["k0"] = o.k0;
  } else {
    cfg["input"] = o.input;
  }
  cfg["t_lo"] = o.t_lo;
  cfg["t_hi"] = o.t_hi;
  cfg["t_count"] = o.t_count;
  cfg["t_scale"] = o.t_scale;
  cfg["order"] = o.order;
  if (!o.fit_window.empty()) cfg["fit_window"] = o.fit_window;
  meta["config"] = cfg;
  Json tols;
  tols["zero_tol"] = o.tol;
  tols["survival_abs_tol"] = 1e-8;
  meta["tolerances"] = tols;
}

void write_output(const Options& o, const std::string& text) {
  if (o.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(o.out, std::ios::binary);
  if (!f) throw ConfigError("cannot open output file " + o.out);
  f << text;
}

std::string csv_meta(const Options& o, const std::string& cmd) {
  std::ostringstream s;
  s << "# tool = " << qdecay::kToolName << " " << qdecay::kVersion << "\n";
  s << "# subcommand = " << cmd << "\n";
  s << "# state = " << o.state << "\n";
  if (o.state == "gaussian")
    s << "# m = " << o.m << "\n# a0 = " << fmt_double(o.a0) << "\n";
  else if (o.state == "bump")
    s << "# d = " << fmt_double(o.d) << "\n# k0 = " << fmt_double(o.k0) << "\n";
  else
    s << "# input = " << o.input << "\n";
  s << "# t_lo = " << fmt_double(o.t_lo) << "\n";
  s << "# t_hi = " << fmt_double(o.t_hi) << "\n";
  s << "# t_count = " << o.t_count << "\n";
  s << "# t_scale = " << o.t_scale << "\n";
  s << "# zero_tol = " << fmt_double(o.tol) << "\n";
  s << "# survival_abs_tol = " << fmt_double(1e-8) << "\n";
  return s.str();
}

int cmd_survival(const Options& o) {
  const qdecay::WaveFunction wf = make_state(o);
  std::vector<double> ts = time_grid(o);
  const qdecay::AmplitudeSeries s = qdecay::survival_series(wf, std::move(ts));
  std::size_t failed = 0;
  for (double e : s.err_est)
    if (std::isinf(e)) ++failed;

  if (o.format == "json") {
    Json doc;
    echo_meta(doc["meta"], o, "survival");
    Json rows = Json::array();
    for (std::size_t i = 0; i < s.times.size(); ++i) {
      Json row;
      row["t"] = s.times[i];
      row["re_A"] = s.amps[i].real();
      row["im_A"] = s.amps[i].imag();
      row["abs2_A"] = std::exp(s.log_abs2[i]);
      row["method"] = qdecay::to_string(s.method);
      row["err_est"] = std::isinf(s.err_est[i]) ? Json("inf") : Json(s.err_est[i]);
      rows.push_back(row);
    }
    doc["rows"] = rows;
    write_output(o, doc.dump(2) + "\n");
  } else {
    std::ostringstream out;
    out << csv_meta(o, "survival");
    out << "t,re_A,im_A,abs2_A,method,err_est\n";
    for (std::size_t i = 0; i < s.times.size(); ++i) {
      out << fmt_double(s.times[i]) << ',' << fmt_double(s.amps[i].real())
          << ',' << fmt_double(s.amps[i].imag()) << ','
          << fmt_double(std::exp(s.log_abs2[i])) << ','
          << qdecay::to_string(s.method) << ',' << fmt_double(s.err_est[i])
          << '\n';
    }
    write_output(o, out.str());
  }
  if (failed > 0)
    std::cerr << "warning: " << failed
              << " time point(s) flagged with err_est = inf\n";
  return 0;
}

int cmd_asymptotics(const Options& o) {
  if (o.order < 0 || o.order > 12)
    throw ConfigError("--order must be in [0, 12]");
  const qdecay::WaveFunction wf = make_state(o);
  const qdecay::AsymptoticModel model =
      qdecay::build_model(wf, o.order, o.tol);
  if (model.order_n < o.order)
    throw qdecay::NumericError(
        "build_model: order clamped to " + std::to_string(model.order_n) +
        " of requested " + std::to_string(o.order) +
        " by moment certification");

  const double ts_scale = time_scale(o);
  double fit_lo = 1e2 * ts_scale, fit_hi = 1e4 * ts_scale;
  if (o.fit_window.size() == 2) {
    fit_lo = o.fit_window[0];
    fit_hi = o.fit_window[1];
    if (!(fit_lo < fit_hi)) throw ConfigError("--fit-window needs lo < hi");
  } else if (!o.fit_window.empty()) {
    throw ConfigError("--fit-window takes exactly two values");
  }
  const auto ts = qdecay::make_time_grid(fit_lo, fit_hi, 32, true);
  const qdecay::AmplitudeSeries series = qdecay::survival_series(wf, ts);
  const qdecay::DecayFit fit = qdecay::fit_power_law(series, fit_lo, fit_hi);

  Json doc;
  echo_meta(doc["meta"], o, "asymptotics");
  doc["detected_m"] =
      model.detected_m ? Json(*model.detected_m) : Json("beyond range");
  Json coeffs = Json::array();
  for (int j = 0; j <= model.order_n; ++j) {
    Json c;
    c["j"] = j;
    c["re"] = model.coeffs[j].real();
    c["im"] = model.coeffs[j].imag();
    c["abs_err"] = model.coeff_err[j];
    coeffs.push_back(c);
  }
  doc["coefficients"] = coeffs;
  if (model.detected_m) {
    const int m = *model.detected_m;
    const double dm = std::abs(qdecay::psi_hat_deriv_zero(wf, m));
    const double g = qdecay::gamma_half(m) /
                     (qdecay::factorial(m) * qdecay::factorial(m));
    doc["leading_constant"] = g * g * dm * dm * dm * dm;
  } else {
    doc["leading_constant"] = nullptr;
  }
  Json jfit;
  jfit["exponent"] = fit.exponent;
  jfit["log_prefactor"] = fit.log_prefactor;
  jfit["rms_residual"] = fit.rms_residual;
  jfit["window"] = {fit.t_lo, fit.t_hi};
  doc["fit"] = jfit;
  if (model.detected_m) {
    Json chk;
    chk["expected_exponent"] = -(2.0 * *model.detected_m + 1.0);
    chk["pass"] = std::abs(fit.exponent + (2.0 * *model.detected_m + 1.0)) <= 0.05;
    doc["exponent_check"] = chk;
  } else {
    doc["super_polynomial"] = true;
  }
  write_output(o, doc.dump(2) + "\n");
  return 0;
}

int cmd_timeop(const Options& o) {
  const qdecay::WaveFunction wf = make_state(o);
  const qdecay::TimeOperatorReport rep = qdecay::t0_norm(wf);

  Json doc;
  echo_meta(doc["meta"], o, "timeop");
  doc["finite"] = rep.finite;
  doc["norm_value"] =
      rep.finite ? Json(rep.norm_value) : Json("infinity");
  Json st;
  st["psi_hat_0"] = {{"re", rep.psi_hat_zero.real()},
                     {"im", rep.psi_hat_zero.imag()}};
  st["psi_hat_prime_0"] = {{"re", rep.psi_hat_prime_zero.real()},
                           {"im", rep.psi_hat_prime_zero.imag()}};
  doc["singular_terms"] = st;

  if (o.t_count > 0 && rep.finite) {
    std::vector<double> ts = time_grid(o);
    const qdecay::AmplitudeSeries s = qdecay::survival_series(wf, std::move(ts));
    const std::vector<bool> ok = qdecay::check_decay_bound(wf, s);
    Json pts = Json::array();
    bool all = true;
    const double n2 = wf.normalization() * wf.normalization();
    for (std::size_t i = 0; i < s.times.size(); ++i) {
      Json p;
      p["t"] = s.times[i];
      p["abs2_A"] = std::exp(s.log_abs2[i]);
      p["rhs"] = s.times[i] == 0.0
                     ? Json("infinity")
                     : Json(4.0 * rep.norm_value * rep.norm_value * n2 /
                            (s.times[i] * s.times[i]));
      p["holds"] = bool(ok[i]);
      all = all && ok[i];
      pts.push_back(p);
    }
    Json bound;
    bound["holds_all"] = all;
    bound["points"] = pts;
    doc["bound"] = bound;
  } else if (o.t_count > 0) {
    doc["bound_note"] = "vacuous (norm infinite)";
  }
  write_output(o, doc.dump(2) + "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  CLI::App app{"Free-particle survival-probability laboratory"};
  app.fallthrough();
  app.set_config("--config", "", "experiment file with flat key = value lines");
  app.set_version_flag("--version", std::string(qdecay::kVersion));

  app.add_option("--state", o.state, "initial state: gaussian, bump, or file");
  app.add_option("--m", o.m, "momentum-power index of the gaussian family");
  app.add_option("--a0", o.a0, "gaussian width parameter (a0 > 0)");
  app.add_option("--d", o.d, "bump centre (d > k0)");
  app.add_option("--k0", o.k0, "bump half-width (k0 > 0)");
  app.add_option("--input", o.input, "grid file for --state file");
  app.add_option("--t-lo", o.t_lo, "first time point");
  app.add_option("--t-hi", o.t_hi, "last time point");
  app.add_option("--t-count", o.t_count, "number of time points");
  app.add_option("--t-scale", o.t_scale, "time spacing: log or lin");
  app.add_option("--order", o.order, "expansion order n (<= 12)");
  app.add_option("--fit-window", o.fit_window,
                 "power-law fit window: lo hi")
      ->expected(0, 2);
  app.add_option("--out", o.out, "output path (default stdout)");
  app.add_option("--format", o.format, "output format: csv or json");
  app.add_option("--tol", o.tol, "zero-detection tolerance");

  CLI::App* sub_survival =
      app.add_subcommand("survival", "survival amplitude series as CSV");
  CLI::App* sub_asym = app.add_subcommand(
      "asymptotics", "expansion coefficients, decay law and fit as JSON");
  app.add_subcommand("timeop", "time-operator norm and decay bound as JSON");
  app.require_subcommand(1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (sub_survival->parsed()) {
      if (o.format.empty()) o.format = "csv";
      if (o.format != "csv" && o.format != "json")
        throw ConfigError("--format must be csv or json");
      return cmd_survival(o);
    }
    if (sub_asym->parsed()) {
      if (o.format.empty()) o.format = "json";
      if (o.format != "json")
        throw ConfigError("asymptotics emits JSON; use --format json");
      return cmd_asymptotics(o);
    }
    if (o.format.empty()) o.format = "json";
    if (o.format != "json")
      throw ConfigError("timeop emits JSON; use --format json");
    return cmd_timeop(o);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const qdecay::NumericError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  }
}

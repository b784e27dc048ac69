#include "resokit/cli.hpp"

#include "resokit/design.hpp"
#include "resokit/extract.hpp"
#include "resokit/fit.hpp"
#include "resokit/fixtures.hpp"
#include "resokit/mbvd.hpp"
#include "resokit/serialize.hpp"
#include "resokit/touchstone.hpp"
#include "text_util.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <map>
#include <optional>
#include <random>

namespace resokit::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Streams {
  std::ostream& out;
  std::ostream& err;
};

void emit(const std::string& path, std::string_view contents, Streams io) {
  if (path == "-") {
    io.out << contents;
    io.out.flush();
  } else {
    detail::write_text_file(path, contents);
  }
}

void emit_json(const std::string& path, const json& j, Streams io) {
  emit(path, j.dump(2) + "\n", io);
}

json read_json_file(const std::string& path) {
  return parse_json(detail::read_text_file(path));
}

std::optional<FrequencyBand> band_option(const std::vector<double>& v, std::string_view flag) {
  if (v.empty()) return std::nullopt;
  FrequencyBand band{v[0], v[1]};
  if (!(band.lo < band.hi) || !(band.lo > 0.0)) {
    throw Error(ErrorKind::InvalidArgument,
                fmt::format("{} needs 0 < lo < hi, got {} {}", flag, band.lo, band.hi));
  }
  return band;
}

TouchstoneFormat format_from_flags(const std::string& format, const std::string& unit,
                                   double z0) {
  TouchstoneFormat f;
  auto vf = parse_value_format(format);
  if (!vf) throw Error(ErrorKind::InvalidArgument, fmt::format("unknown format '{}'", format));
  auto fu = parse_frequency_unit(unit);
  if (!fu) throw Error(ErrorKind::InvalidArgument, fmt::format("unknown unit '{}'", unit));
  f.value_format = *vf;
  f.frequency_unit = *fu;
  f.reference_resistance = z0;
  return f;
}

std::string table_line(const ExtractionReport& r) {
  const std::string lambda = r.lambda_m ? fmt::format("{:.0f} nm", *r.lambda_m * 1e9) : "-";
  return fmt::format("{:<8} lambda {:>7}  f_s {:.4g} GHz  k_eff2 {:.3g} %  Y_R {:.1f} dB  "
                     "Q_max {:.4g}  FoM {:.3g}",
                     r.device.empty() ? "-" : r.device, lambda, r.f_s / 1e9, r.keff2 * 100.0,
                     r.y_ratio_db, r.q_max, r.fom);
}

// ---------------------------------------------------------------- convert

struct ConvertArgs {
  std::string input;
  std::string output;
  std::string format = "RI";
  std::string unit = "GHZ";
  std::optional<double> z0;
};

int cmd_convert(const ConvertArgs& a, Streams io) {
  const TouchstoneFile in = read_touchstone_file(a.input);
  OnePortTrace trace = a.z0 ? renormalize(in.trace, *a.z0) : in.trace;
  const TouchstoneFormat format = format_from_flags(a.format, a.unit, trace.z0());
  emit(a.output, write_touchstone(trace, format, in.comments), io);
  return kOk;
}

// ---------------------------------------------------------------- extract

struct ExtractArgs {
  std::string input;
  std::string output;
  std::string csv;
  std::string device;
  std::optional<double> lambda_nm;
  std::vector<double> fit_band;
  std::vector<double> q_band;
  std::size_t smooth = 0;
  std::optional<double> z0;
  bool with_fit = false;
};

int cmd_extract(const ExtractArgs& a, Streams io) {
  const TouchstoneFile file = read_touchstone_file(a.input);
  const OnePortTrace trace =
      a.z0 ? OnePortTrace({file.trace.frequencies().begin(), file.trace.frequencies().end()},
                          {file.trace.s11().begin(), file.trace.s11().end()}, *a.z0)
           : file.trace;

  ExtractionOptions options;
  options.fit_band = band_option(a.fit_band, "--fit-band");
  options.q_band = band_option(a.q_band, "--q-band");
  options.smoothing_half_window = a.smooth;

  ExtractionReport report = full_extraction(trace, options);
  report.device = a.device.empty() ? fs::path(a.input).stem().string() : a.device;
  if (a.lambda_nm) report.lambda_m = *a.lambda_nm * 1e-9;

  if (a.with_fit) {
    const AdmittanceTrace y = s_to_y(trace);
    try {
      const FitResult fit = fit_mbvd(y, initial_guess(y));
      if (!fit.converged) io.err << "warning: mBVD fit did not converge\n";
      report.keff2_mbvd = model_keff2(fit.params);
    } catch (const Error& e) {
      io.err << fmt::format("warning: mBVD fit failed: {}\n", e.what());
    }
  }

  emit_json(a.output, report_to_json(report), io);
  if (!a.csv.empty()) {
    emit(a.csv, report_csv_header() + "\n" + report_csv_row(report) + "\n", io);
  }
  io.err << table_line(report) << "\n";
  return kOk;
}

// ---------------------------------------------------------------- fit

struct FitArgs {
  std::string input;
  std::string output;
  std::vector<std::string> init{"auto"};
  int max_iterations = FitConfig{}.max_iterations;
  bool report = false;
};

int cmd_fit(const FitArgs& a, Streams io) {
  const TouchstoneFile file = read_touchstone_file(a.input);
  const AdmittanceTrace y = s_to_y(file.trace);

  MbvdParams init;
  FitConfig config;
  config.max_iterations = a.max_iterations;
  if (a.init.size() == 1 && a.init[0] == "auto") {
    init = initial_guess(y);
  } else if (a.init.size() == 2 && a.init[0] == "from-file") {
    json j = read_json_file(a.init[1]);
    init = params_from_json(j.contains("params") ? j.at("params") : j);
    // A user-supplied start is taken as-is.
    config.align_resonance = false;
  } else {
    throw Error(ErrorKind::InvalidArgument, "--init expects 'auto' or 'from-file <path>'");
  }

  const FitResult result = fit_mbvd(y, init, config);
  emit_json(a.output, fit_result_to_json(result), io);

  io.err << fmt::format("fit: {} after {} iterations, relative residual {:.3g}\n",
                        result.converged ? "converged" : "NOT converged", result.iterations,
                        result.relative_residual);
  if (a.report) {
    const ExtractionReport raw = full_extraction(file.trace);
    const std::vector<double> grid(file.trace.frequencies().begin(),
                                   file.trace.frequencies().end());
    const ExtractionReport model =
        full_extraction(synthesize_s11(result.params, grid, file.trace.z0()));
    io.err << fmt::format("k_eff2 [%]  raw extrema {:.4g}  fitted-model extrema {:.4g}  "
                          "mBVD capacitance ratio {:.4g}\n",
                          raw.keff2 * 100.0, model.keff2 * 100.0,
                          model_keff2(result.params) * 100.0);
  }
  return result.converged ? kOk : kNotConverged;
}

// ---------------------------------------------------------------- synth

struct SynthArgs {
  std::string params;
  std::string output;
  double f_lo = 0.0;
  double f_hi = 0.0;
  std::size_t points = 2001;
  double z0 = 50.0;
  std::string format = "RI";
  std::string unit = "GHZ";
  double noise = 0.0;
  std::uint64_t seed = 1;
};

int cmd_synth(const SynthArgs& a, Streams io) {
  json j = read_json_file(a.params);
  const MbvdParams p = params_from_json(j.contains("params") ? j.at("params") : j);
  if (!(a.z0 > 0.0)) throw Error(ErrorKind::InvalidArgument, "--z0 must be positive");
  const std::vector<double> grid = linear_grid(a.f_lo, a.f_hi, a.points);
  OnePortTrace trace = synthesize_s11(p, grid, a.z0);

  if (a.noise > 0.0) {
    std::mt19937_64 rng(a.seed);
    std::normal_distribution<double> gauss(0.0, a.noise);
    std::vector<Complex> s(trace.s11().begin(), trace.s11().end());
    for (auto& v : s) v += Complex(gauss(rng), gauss(rng));
    trace = OnePortTrace(grid, std::move(s), a.z0);
  }

  const std::vector<std::string> comments = {
      fmt::format("synthesized mBVD: R_s={:.6g} R_0={:.6g} R_m={:.6g} L_m={:.6g} C_m={:.6g} "
                  "C_0={:.6g}",
                  p.r_s, p.r_0, p.r_m, p.l_m, p.c_m, p.c_0),
      fmt::format("noise sigma={:.3g} seed={}", a.noise, a.seed)};
  emit(a.output, write_touchstone(trace, format_from_flags(a.format, a.unit, a.z0), comments),
       io);
  return kOk;
}

// ---------------------------------------------------------------- sweep

struct SweepArgs {
  std::string geometry;
  std::string axis;
  std::vector<double> values;
  bool nm = false;
  std::string family{kMeasuredFamily};
  std::string table;
  bool allow_extrapolation = false;
  std::string output;
};

int cmd_sweep(const SweepArgs& a, Streams io) {
  const DeviceGeometry base = geometry_from_json(read_json_file(a.geometry));
  const auto axis = parse_sweep_axis(a.axis);
  if (!axis) throw Error(ErrorKind::InvalidArgument, fmt::format("unknown axis '{}'", a.axis));
  const DispersionTable table = a.table.empty()
                                    ? builtin_dispersion_table()
                                    : DispersionTable::from_csv(detail::read_text_file(a.table));

  std::vector<double> values = a.values;
  if (a.nm && *axis != SweepAxis::Duty) {
    for (auto& v : values) v *= 1e-9;
  }
  const auto rows = sweep(base, *axis, values, table, a.family,
                          PredictOptions{.allow_extrapolation = a.allow_extrapolation});
  emit(a.output, sweep_csv(*axis, rows), io);

  bool failed = false;
  for (const auto& r : rows) {
    for (const auto& w : r.warnings) io.err << "warning: " << w << "\n";
    if (!r.error.empty()) {
      io.err << "error: " << r.error << "\n";
      failed = true;
    }
  }
  return failed ? kExtractionError : kOk;
}

// ---------------------------------------------------------------- report

struct ReportArgs {
  std::vector<std::string> inputs;
  std::string output;
  bool markdown = false;
  bool sort_lambda = false;
};

std::string markdown_table(const std::vector<ExtractionReport>& reports) {
  auto g6 = [](double v) { return fmt::format("{:.6g}", v); };
  std::string out =
      "| Device | λ (nm) | f_s (GHz) | k_eff² (%) | Q_max | FoM |\n"
      "|---|---|---|---|---|---|\n";
  for (const auto& r : reports) {
    out += fmt::format("| {} | {} | {} | {} | {} | {} |\n", r.device,
                       r.lambda_m ? g6(*r.lambda_m * 1e9) : "", g6(r.f_s / 1e9),
                       g6(r.keff2 * 100.0), g6(r.q_max), g6(r.fom));
  }
  return out;
}

int cmd_report(const ReportArgs& a, Streams io) {
  std::vector<ExtractionReport> reports;
  reports.reserve(a.inputs.size());
  for (const auto& path : a.inputs) {
    try {
      reports.push_back(report_from_json(read_json_file(path)));
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::IoError) throw;
      throw Error(e.kind(), fmt::format("{}: {}", path, e.what()));
    }
  }

  std::map<std::string, int> seen;
  for (auto& r : reports) {
    const int count = ++seen[r.device];
    if (count > 1) {
      const std::string renamed = fmt::format("{}_{}", r.device, count);
      io.err << fmt::format("warning: duplicate device name '{}' renamed to '{}'\n", r.device,
                            renamed);
      r.device = renamed;
    }
  }

  if (a.sort_lambda) {
    std::stable_sort(reports.begin(), reports.end(), [](const auto& x, const auto& y) {
      const double lx = x.lambda_m.value_or(-1.0);
      const double ly = y.lambda_m.value_or(-1.0);
      return lx > ly;
    });
  }

  std::string text;
  if (a.markdown) {
    text = markdown_table(reports);
  } else {
    text = report_csv_header() + "\n";
    for (const auto& r : reports) text += report_csv_row(r) + "\n";
  }
  emit(a.output, text, io);
  return kOk;
}

// ---------------------------------------------------------------- make-fixtures

int cmd_make_fixtures(const std::string& dir, Streams io) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw Error(ErrorKind::IoError, fmt::format("cannot create directory '{}': {}", dir,
                                                ec.message()));
  }
  const FixtureSpec spec;
  for (const auto& record : published_devices()) {
    const DeviceFixture fx = make_device_fixture(record, spec);
    const fs::path stem = fs::path(dir) / fmt::format("device_{}", record.name);

    json params = params_to_json(fx.params);
    params["schema_version"] = kSchemaVersion;
    detail::write_text_file(stem.string() + ".params.json", params.dump(2) + "\n");

    const OnePortTrace trace = synthesize_s11(fx.params, fx.grid, spec.z0);
    const std::vector<std::string> comments = {
        fmt::format("synthetic fixture for device {} (lambda {:.0f} nm)", record.name,
                    record.lambda_m * 1e9)};
    TouchstoneFormat format;
    format.value_format = ValueFormat::RI;
    format.reference_resistance = spec.z0;
    write_touchstone_file(stem.string() + ".s1p", trace, format, comments);
    io.err << table_line(fx.report) << "\n";
  }
  return kOk;
}

}  // namespace

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::MalformedOptionLine:
    case ErrorKind::UnsupportedFile:
    case ErrorKind::NonMonotonicFrequency:
    case ErrorKind::WrongColumnCount:
    case ErrorKind::EmptyData:
    case ErrorKind::SchemaError:
    case ErrorKind::InvalidArgument:
      return kParseError;
    case ErrorKind::IoError:
      return kIoError;
    case ErrorKind::SingularReflection:
    case ErrorKind::TooFewPoints:
    case ErrorKind::DegenerateLocus:
    case ErrorKind::ResonanceNotBracketed:
    case ErrorKind::DomainError:
    case ErrorKind::EmptyBand:
    case ErrorKind::NegativeStaticCapacitance:
    case ErrorKind::NonFiniteResidual:
    case ErrorKind::OutOfTableRange:
    case ErrorKind::TargetOutOfRange:
      return kExtractionError;
  }
  return kExtractionError;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  const Streams io{out, err};
  CLI::App app{"resokit: acoustic resonator extraction and design toolkit", "resokit"};
  app.require_subcommand(1);

  ConvertArgs convert;
  auto* c = app.add_subcommand("convert", "Rewrite a .s1p file in another format, unit or z0");
  c->add_option("input", convert.input, "Input .s1p")->required();
  c->add_option("output", convert.output, "Output .s1p, or - for stdout")->required();
  c->add_option("--format", convert.format, "RI, MA or DB")->capture_default_str();
  c->add_option("--unit", convert.unit, "HZ, KHZ, MHZ or GHZ")->capture_default_str();
  c->add_option("--z0", convert.z0, "Renormalize to this reference impedance [ohm]");

  ExtractArgs extract;
  auto* e = app.add_subcommand("extract", "Extract f_s, f_p, k_eff2, Y_R, Q_max and FoM");
  e->add_option("input", extract.input, "Input .s1p")->required();
  e->add_option("-o,--output", extract.output, "Report JSON, or - for stdout")->required();
  e->add_option("--csv", extract.csv, "Also write a one-row CSV table");
  e->add_option("--device", extract.device, "Device label (default: file stem)");
  e->add_option("--lambda-nm", extract.lambda_nm, "Acoustic wavelength [nm]");
  e->add_option("--fit-band", extract.fit_band, "Smith-circle band LO HI [Hz]")->expected(2);
  e->add_option("--q-band", extract.q_band, "Q_max search band LO HI [Hz]")->expected(2);
  e->add_option("--smooth", extract.smooth, "Half-window of S11 smoothing before Bode-Q");
  e->add_option("--z0", extract.z0, "Override the file's reference impedance [ohm]");
  e->add_flag("--with-fit", extract.with_fit, "Also report the mBVD-fit k_eff2");

  FitArgs fit;
  auto* f = app.add_subcommand("fit", "Fit mBVD parameters to a .s1p file");
  f->add_option("input", fit.input, "Input .s1p")->required();
  f->add_option("-o,--output", fit.output, "Fit result JSON, or - for stdout")->required();
  f->add_option("--init", fit.init, "'auto' or 'from-file <params.json>'")->expected(1, 2);
  f->add_option("--max-iter", fit.max_iterations, "Iteration budget")->capture_default_str();
  f->add_flag("--report", fit.report, "Compare raw and fitted-model k_eff2");

  SynthArgs synth;
  auto* s = app.add_subcommand("synth", "Synthesize a .s1p file from mBVD parameters");
  s->add_option("--params", synth.params, "Params JSON")->required();
  s->add_option("--f-lo", synth.f_lo, "Lowest frequency [Hz]")->required();
  s->add_option("--f-hi", synth.f_hi, "Highest frequency [Hz]")->required();
  s->add_option("--points", synth.points, "Number of samples")->capture_default_str();
  s->add_option("--z0", synth.z0, "Reference impedance [ohm]")->capture_default_str();
  s->add_option("--format", synth.format, "RI, MA or DB")->capture_default_str();
  s->add_option("--unit", synth.unit, "HZ, KHZ, MHZ or GHZ")->capture_default_str();
  s->add_option("--noise", synth.noise, "Complex Gaussian noise sigma on S11");
  s->add_option("--seed", synth.seed, "Noise seed")->capture_default_str();
  s->add_option("-o,--output", synth.output, "Output .s1p, or - for stdout")->required();

  SweepArgs sw;
  auto* w = app.add_subcommand("sweep", "Predict f_s and k_eff2 along one geometry axis");
  w->add_option("--geometry", sw.geometry, "Geometry JSON")->required();
  w->add_option("--axis", sw.axis, "lambda, h_ln, h_elec or duty")->required();
  w->add_option("--values", sw.values, "Axis values (comma separated)")
      ->required()
      ->delimiter(',');
  w->add_flag("--nm", sw.nm, "Length values are in nm rather than m");
  w->add_option("--family", sw.family, "Dispersion family")->capture_default_str();
  w->add_option("--table", sw.table, "Dispersion CSV replacing the built-in table");
  w->add_flag("--allow-extrapolation", sw.allow_extrapolation,
              "Extrapolate outside the table with a warning");
  w->add_option("-o,--output", sw.output, "Sweep CSV, or - for stdout")->required();

  ReportArgs report;
  auto* r = app.add_subcommand("report", "Tabulate extraction reports");
  r->add_option("inputs", report.inputs, "Report JSON files");
  r->add_option("-o,--output", report.output, "Table output, or - for stdout")->required();
  r->add_flag("--markdown", report.markdown, "Markdown instead of CSV");
  r->add_flag("--sort-lambda", report.sort_lambda, "Sort by wavelength, longest first");

  std::string fixture_dir;
  auto* m = app.add_subcommand("make-fixtures", "Write the six synthetic device fixtures");
  m->group("");
  m->add_option("dir", fixture_dir, "Output directory")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& ex) {
    const int code = app.exit(ex, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*c) return cmd_convert(convert, io);
    if (*e) return cmd_extract(extract, io);
    if (*f) return cmd_fit(fit, io);
    if (*s) return cmd_synth(synth, io);
    if (*w) return cmd_sweep(sw, io);
    if (*r) return cmd_report(report, io);
    if (*m) return cmd_make_fixtures(fixture_dir, io);
  } catch (const Error& ex) {
    err << fmt::format("error ({}): {}\n", to_string(ex.kind()), ex.what());
    return exit_code_for(ex.kind());
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << "\n";
    return kExtractionError;
  }
  return kUsage;
}

}  // namespace resokit::cli

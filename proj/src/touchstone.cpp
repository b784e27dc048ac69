#include "resokit/touchstone.hpp"

#include "resokit/error.hpp"
#include "text_util.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

namespace resokit {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kRadToDeg = 180.0 / std::numbers::pi;

// DB rows for |S11| = 0 are written at this floor instead of -inf.
constexpr double kDbFloor = -3000.0;

Complex decode_value(ValueFormat format, double a, double b) {
  switch (format) {
    case ValueFormat::RI: return {a, b};
    case ValueFormat::MA: return std::polar(a, b * kDegToRad);
    case ValueFormat::DB: return std::polar(std::pow(10.0, a / 20.0), b * kDegToRad);
  }
  return {};
}

// Degrees in (-180, 180].
double angle_deg(Complex s) {
  if (s == Complex{}) return 0.0;
  double deg = std::arg(s) * kRadToDeg;
  if (deg <= -180.0) deg += 360.0;
  return deg;
}

TouchstoneFormat parse_option_line(std::string_view line, std::size_t line_no) {
  TouchstoneFormat format;
  const auto tokens = detail::split_whitespace(line.substr(1));
  auto fail = [&](const std::string& why) {
    return Error(ErrorKind::MalformedOptionLine,
                 fmt::format("line {}: {} in option line '{}'", line_no, why, line));
  };
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const std::string tok = detail::to_upper(tokens[i]);
    if (auto unit = parse_frequency_unit(tok)) {
      format.frequency_unit = *unit;
    } else if (auto vf = parse_value_format(tok)) {
      format.value_format = *vf;
    } else if (tok == "S") {
      // only S parameters are accepted
    } else if (tok == "Y" || tok == "Z" || tok == "H" || tok == "G") {
      throw Error(ErrorKind::UnsupportedFile,
                  fmt::format("line {}: only S parameters are supported, got '{}'", line_no,
                              tokens[i]));
    } else if (tok == "R") {
      if (i + 1 >= tokens.size()) throw fail("missing value after R");
      const auto r = detail::parse_double(tokens[++i]);
      if (!r || !(*r > 0.0) || !std::isfinite(*r)) {
        throw fail(fmt::format("invalid reference resistance '{}'", tokens[i]));
      }
      format.reference_resistance = *r;
    } else {
      throw fail(fmt::format("unknown token '{}'", tokens[i]));
    }
  }
  return format;
}

std::string format_number(double v) { return fmt::format("{:.15g}", v); }

}  // namespace

double unit_scale(FrequencyUnit unit) {
  switch (unit) {
    case FrequencyUnit::Hz: return 1.0;
    case FrequencyUnit::kHz: return 1e3;
    case FrequencyUnit::MHz: return 1e6;
    case FrequencyUnit::GHz: return 1e9;
  }
  return 1.0;
}

std::string_view to_string(FrequencyUnit unit) {
  switch (unit) {
    case FrequencyUnit::Hz: return "HZ";
    case FrequencyUnit::kHz: return "KHZ";
    case FrequencyUnit::MHz: return "MHZ";
    case FrequencyUnit::GHz: return "GHZ";
  }
  return "HZ";
}

std::string_view to_string(ValueFormat format) {
  switch (format) {
    case ValueFormat::RI: return "RI";
    case ValueFormat::MA: return "MA";
    case ValueFormat::DB: return "DB";
  }
  return "RI";
}

std::optional<FrequencyUnit> parse_frequency_unit(std::string_view token) {
  const std::string t = detail::to_upper(token);
  if (t == "HZ") return FrequencyUnit::Hz;
  if (t == "KHZ") return FrequencyUnit::kHz;
  if (t == "MHZ") return FrequencyUnit::MHz;
  if (t == "GHZ") return FrequencyUnit::GHz;
  return std::nullopt;
}

std::optional<ValueFormat> parse_value_format(std::string_view token) {
  const std::string t = detail::to_upper(token);
  if (t == "RI") return ValueFormat::RI;
  if (t == "MA") return ValueFormat::MA;
  if (t == "DB") return ValueFormat::DB;
  return std::nullopt;
}

OnePortTrace::OnePortTrace(std::vector<double> frequencies_hz, std::vector<Complex> s11,
                           double z0)
    : frequencies_(std::move(frequencies_hz)), s11_(std::move(s11)), z0_(z0) {
  if (frequencies_.size() != s11_.size()) {
    throw Error(ErrorKind::InvalidArgument,
                fmt::format("{} frequencies but {} S11 samples", frequencies_.size(),
                            s11_.size()));
  }
  validate_frequency_grid(frequencies_);
  if (!(z0_ > 0.0) || !std::isfinite(z0_)) {
    throw Error(ErrorKind::InvalidArgument,
                fmt::format("reference impedance must be positive, got {}", z0_));
  }
}

TouchstoneFile parse_touchstone(std::string_view text) {
  std::optional<TouchstoneFormat> format;
  std::vector<std::string> comments;
  std::vector<double> freqs;
  std::vector<Complex> values;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    const std::string_view trimmed = detail::trim(line);
    if (trimmed.empty()) continue;
    if (trimmed.front() == '!') {
      comments.emplace_back(trimmed.substr(1));
      continue;
    }
    if (trimmed.front() == '[') {
      throw Error(ErrorKind::UnsupportedFile,
                  fmt::format("line {}: Touchstone v2 keyword '{}' is not supported", line_no,
                              trimmed));
    }
    // strip trailing inline comment
    std::string_view content = trimmed;
    if (auto bang = content.find('!'); bang != std::string_view::npos) {
      content = detail::trim(content.substr(0, bang));
    }
    if (content.front() == '#') {
      if (format) {
        throw Error(ErrorKind::MalformedOptionLine,
                    fmt::format("line {}: duplicate option line", line_no));
      }
      if (!freqs.empty()) {
        throw Error(ErrorKind::MalformedOptionLine,
                    fmt::format("line {}: option line after data rows", line_no));
      }
      format = parse_option_line(content, line_no);
      continue;
    }

    const auto cols = detail::split_whitespace(content);
    if (cols.size() != 3) {
      const std::string hint =
          cols.size() == 9 ? " (two-port data is not supported)" : std::string{};
      throw Error(ErrorKind::WrongColumnCount,
                  fmt::format("line {}: expected 3 columns, got {}{}", line_no, cols.size(),
                              hint));
    }
    double nums[3];
    for (int k = 0; k < 3; ++k) {
      const auto v = detail::parse_double(cols[k]);
      if (!v) {
        throw Error(ErrorKind::WrongColumnCount,
                    fmt::format("line {}: '{}' is not a number", line_no, cols[k]));
      }
      nums[k] = *v;
    }
    if (!format) format = TouchstoneFormat{};
    const double f = nums[0] * unit_scale(format->frequency_unit);
    if (!(f > 0.0) || (!freqs.empty() && !(f > freqs.back()))) {
      throw Error(ErrorKind::NonMonotonicFrequency,
                  fmt::format("line {}: frequency {} Hz is not above the previous sample",
                              line_no, f));
    }
    freqs.push_back(f);
    values.push_back(decode_value(format->value_format, nums[1], nums[2]));
  }

  if (freqs.size() < 2) {
    throw Error(ErrorKind::EmptyData,
                fmt::format("need at least 2 data rows, found {}", freqs.size()));
  }
  const TouchstoneFormat final_format = format.value_or(TouchstoneFormat{});
  return TouchstoneFile{
      OnePortTrace(std::move(freqs), std::move(values), final_format.reference_resistance),
      final_format, std::move(comments)};
}

std::string write_touchstone(const OnePortTrace& trace, const TouchstoneFormat& format,
                             std::span<const std::string> comments) {
  if (format.reference_resistance != trace.z0()) {
    throw Error(ErrorKind::InvalidArgument,
                fmt::format("option line R {} does not match trace z0 {}",
                            format.reference_resistance, trace.z0()));
  }
  std::string out;
  for (const auto& c : comments) {
    out += '!';
    out += c;
    out += '\n';
  }
  out += fmt::format("# {} S {} R {}\n", to_string(format.frequency_unit),
                     to_string(format.value_format), format_number(format.reference_resistance));

  const double scale = unit_scale(format.frequency_unit);
  const auto f = trace.frequencies();
  const auto s = trace.s11();
  for (std::size_t i = 0; i < trace.size(); ++i) {
    double a = 0.0;
    double b = 0.0;
    switch (format.value_format) {
      case ValueFormat::RI:
        a = s[i].real();
        b = s[i].imag();
        break;
      case ValueFormat::MA:
        a = std::abs(s[i]);
        b = angle_deg(s[i]);
        break;
      case ValueFormat::DB: {
        const double mag = std::abs(s[i]);
        a = mag > 0.0 ? std::max(20.0 * std::log10(mag), kDbFloor) : kDbFloor;
        b = angle_deg(s[i]);
        break;
      }
    }
    out += format_number(f[i] / scale);
    out += ' ';
    out += format_number(a);
    out += ' ';
    out += format_number(b);
    out += '\n';
  }
  return out;
}

TouchstoneFile read_touchstone_file(const std::filesystem::path& path) {
  return parse_touchstone(detail::read_text_file(path));
}

void write_touchstone_file(const std::filesystem::path& path, const OnePortTrace& trace,
                           const TouchstoneFormat& format, std::span<const std::string> comments) {
  detail::write_text_file(path, write_touchstone(trace, format, comments));
}

}  // namespace resokit

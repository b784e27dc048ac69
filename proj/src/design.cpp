#include "resokit/design.hpp"

#include "resokit/error.hpp"
#include "text_util.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <tuple>

#include <fmt/format.h>

namespace resokit {

namespace {

constexpr double kHullSlack = 1e-9;
constexpr double kDutyTol = 1e-9;
constexpr double kElecTol = 0.02;

// All anchors of a subfamily sharing one h_ln/lambda value.
struct Node {
  double r = 0.0;
  std::vector<const DispersionAnchor*> rows;  // sorted by h_elec/lambda
};

enum class Column { VelocityMps, Keff2 };

double column(const DispersionAnchor& a, Column c) {
  return c == Column::VelocityMps ? a.v_p : a.keff2;
}

double lerp(double a, double b, double t) { return (1.0 - t) * a + t * b; }

class Interpolator {
public:
  Interpolator(const DispersionTable& table, std::string_view family, double duty,
               std::vector<std::string>& warnings) {
    const auto duties = table.duties(family);
    if (duties.empty()) {
      throw Error(ErrorKind::InvalidArgument,
                  fmt::format("dispersion table has no '{}' family", family));
    }
    double best = duties.front();
    for (double d : duties) {
      if (std::abs(d - duty) < std::abs(best - duty)) best = d;
    }
    if (std::abs(best - duty) > kDutyTol) {
      warnings.push_back(fmt::format(
          "duty {:.3g} not in table; using the {:.3g} duty {} anchors (duty dependence not "
          "modeled)",
          duty, best, family));
    }
    anchors_ = table.subfamily(family, best);
    for (const auto& a : anchors_) {
      if (nodes_.empty() || a.h_ln_over_lambda != nodes_.back().r) {
        nodes_.push_back({a.h_ln_over_lambda, {}});
      }
      nodes_.back().rows.push_back(&a);
    }
    for (auto& n : nodes_) {
      std::sort(n.rows.begin(), n.rows.end(), [](const auto* x, const auto* y) {
        return x->h_elec_over_lambda < y->h_elec_over_lambda;
      });
    }
  }

  double r_min() const { return nodes_.front().r; }
  double r_max() const { return nodes_.back().r; }
  const std::vector<Node>& nodes() const { return nodes_; }

  // Value of one column at (r, h_elec/lambda); nullopt h_elec takes each node's first row.
  double evaluate(double r, std::optional<double> h_elec, Column col, const PredictOptions& options,
                  std::vector<std::string>& warnings) const {
    const double slack = kHullSlack * r_max();
    bool extrapolate = false;
    if (r < r_min() - slack || r > r_max() + slack) {
      if (!options.allow_extrapolation) {
        throw Error(ErrorKind::OutOfTableRange,
                    fmt::format("h_ln/lambda = {:.6g} is outside the table range [{:.6g}, {:.6g}]",
                                r, r_min(), r_max()));
      }
      if (nodes_.size() < 2) {
        throw Error(ErrorKind::OutOfTableRange,
                    "cannot extrapolate from a single h_ln/lambda node");
      }
      extrapolate = true;
      warnings.push_back(fmt::format("h_ln/lambda = {:.6g} extrapolated beyond table range", r));
    } else {
      r = std::clamp(r, r_min(), r_max());
    }

    if (nodes_.size() == 1) {
      check_elec(nodes_.front(), nodes_.front(), 0.0, h_elec, warnings);
      return node_value(nodes_.front(), h_elec, col, warnings);
    }
    std::size_t k = 0;
    if (extrapolate) {
      k = r < r_min() ? 0 : nodes_.size() - 2;
    } else {
      while (k + 2 < nodes_.size() && r > nodes_[k + 1].r) ++k;
    }
    const Node& a = nodes_[k];
    const Node& b = nodes_[k + 1];
    const double t = (r - a.r) / (b.r - a.r);
    check_elec(a, b, t, h_elec, warnings);
    return lerp(node_value(a, h_elec, col, warnings), node_value(b, h_elec, col, warnings), t);
  }

private:
  static double node_value(const Node& n, std::optional<double> h_elec, Column col,
                           std::vector<std::string>& warnings) {
    if (n.rows.size() == 1 || !h_elec) return column(*n.rows.front(), col);
    const double lo = n.rows.front()->h_elec_over_lambda;
    const double hi = n.rows.back()->h_elec_over_lambda;
    if (*h_elec <= lo || *h_elec >= hi) {
      const double slack = kHullSlack * hi;
      if (*h_elec < lo - slack || *h_elec > hi + slack) {
        warnings.push_back(fmt::format(
            "h_elec/lambda = {:.4g} clamped to table range [{:.4g}, {:.4g}]", *h_elec, lo, hi));
      }
      return column(*(*h_elec <= lo ? n.rows.front() : n.rows.back()), col);
    }
    std::size_t k = 0;
    while (*h_elec > n.rows[k + 1]->h_elec_over_lambda) ++k;
    const double x0 = n.rows[k]->h_elec_over_lambda;
    const double x1 = n.rows[k + 1]->h_elec_over_lambda;
    return lerp(column(*n.rows[k], col), column(*n.rows[k + 1], col), (*h_elec - x0) / (x1 - x0));
  }

  // Warns when the geometry's electrode ratio is not what single-row nodes were built with.
  static void check_elec(const Node& a, const Node& b, double t, std::optional<double> h_elec,
                         std::vector<std::string>& warnings) {
    if (!h_elec || a.rows.size() != 1 || b.rows.size() != 1) return;
    const double table_ratio =
        lerp(a.rows.front()->h_elec_over_lambda, b.rows.front()->h_elec_over_lambda, t);
    const double ref = std::max(std::abs(table_ratio), 1e-12);
    if (std::abs(*h_elec - table_ratio) > kElecTol * ref) {
      warnings.push_back(fmt::format(
          "h_elec/lambda = {:.4g} differs from the table's {:.4g}; electrode loading not modeled",
          *h_elec, table_ratio));
    }
  }

  std::vector<DispersionAnchor> anchors_;
  std::vector<Node> nodes_;
};

Prediction predict(const DeviceGeometry& g, const DispersionTable& table, std::string_view family,
                   const PredictOptions& options, Column col) {
  validate(g);
  Prediction p;
  const Interpolator interp(table, family, g.duty, p.warnings);
  const double v = interp.evaluate(g.h_ln_over_lambda(), g.h_elec_over_lambda(), col, options,
                                   p.warnings);
  p.value = col == Column::VelocityMps ? v / g.lambda : v;
  return p;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out += sep;
    out += parts[i];
  }
  return out;
}

}  // namespace

void validate(const DeviceGeometry& g) {
  auto bad = [](const std::string& what) { return Error(ErrorKind::InvalidArgument, what); };
  if (!(g.lambda > 0.0) || !std::isfinite(g.lambda)) throw bad("lambda must be positive");
  if (!(g.h_ln > 0.0) || !std::isfinite(g.h_ln)) throw bad("h_ln must be positive");
  if (!(g.h_elec >= 0.0) || !std::isfinite(g.h_elec)) throw bad("h_elec must be non-negative");
  if (!(g.duty > 0.0 && g.duty < 1.0)) throw bad("duty must lie in (0, 1)");
  if (g.n_e < 2) throw bad("n_e must be at least 2");
  if (g.n_r < 0) throw bad("n_r must be non-negative");
  if (!(g.aperture > 0.0)) throw bad("aperture must be positive");
}

DispersionTable::DispersionTable(std::vector<DispersionAnchor> anchors)
    : anchors_(std::move(anchors)) {
  std::set<std::tuple<double, double, double, std::string>> seen;
  for (const auto& a : anchors_) {
    if (!(a.h_ln_over_lambda > 0.0) || !(a.h_elec_over_lambda >= 0.0) ||
        !(a.duty > 0.0 && a.duty < 1.0)) {
      throw Error(ErrorKind::InvalidArgument,
                  fmt::format("anchor '{}' has invalid geometry ratios", a.provenance));
    }
    if (!(a.v_p > 0.0) || !std::isfinite(a.v_p)) {
      throw Error(ErrorKind::InvalidArgument,
                  fmt::format("anchor '{}' has non-positive phase velocity", a.provenance));
    }
    if (!(a.keff2 >= 0.0 && a.keff2 < 1.0)) {
      throw Error(ErrorKind::InvalidArgument,
                  fmt::format("anchor '{}' keff2 {} outside [0, 1)", a.provenance, a.keff2));
    }
    if (a.family.empty()) {
      throw Error(ErrorKind::InvalidArgument, "anchor family must not be empty");
    }
    if (!seen.emplace(a.h_ln_over_lambda, a.h_elec_over_lambda, a.duty, a.family).second) {
      throw Error(ErrorKind::InvalidArgument,
                  fmt::format("duplicate anchor ({}, {}, {}) in family '{}'", a.h_ln_over_lambda,
                              a.h_elec_over_lambda, a.duty, a.family));
    }
  }

  // Measured 50%-duty velocities must fall strictly as h_ln/lambda grows.
  const auto measured = subfamily(kMeasuredFamily, 0.5);
  std::map<double, std::pair<double, double>> span;  // r -> (min v_p, max v_p)
  for (const auto& a : measured) {
    auto [it, fresh] = span.try_emplace(a.h_ln_over_lambda, a.v_p, a.v_p);
    if (!fresh) {
      it->second.first = std::min(it->second.first, a.v_p);
      it->second.second = std::max(it->second.second, a.v_p);
    }
  }
  for (auto it = span.begin(); it != span.end() && std::next(it) != span.end(); ++it) {
    const auto next = std::next(it);
    if (!(next->second.second < it->second.first)) {
      throw Error(ErrorKind::InvalidArgument,
                  fmt::format("measured 50% duty v_p must decrease with h_ln/lambda: {} m/s at "
                              "{} vs {} m/s at {}",
                              it->second.first, it->first, next->second.second, next->first));
    }
  }
}

DispersionTable DispersionTable::from_csv(std::string_view text) {
  static constexpr std::string_view kHeader =
      "h_ln_over_lambda,h_elec_over_lambda,duty,v_p_mps,keff2,family,provenance";
  std::vector<DispersionAnchor> anchors;
  bool header_seen = false;
  std::size_t line_no = 0;
  for (auto raw : detail::split(text, '\n')) {
    ++line_no;
    const auto line = detail::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    if (!header_seen) {
      if (line != kHeader) {
        throw Error(ErrorKind::SchemaError,
                    fmt::format("dispersion CSV header must be '{}', got '{}'", kHeader, line));
      }
      header_seen = true;
      continue;
    }
    auto cols = detail::split(line, ',');
    if (cols.size() < 7) {
      throw Error(ErrorKind::SchemaError,
                  fmt::format("dispersion CSV line {}: expected 7 columns, got {}", line_no,
                              cols.size()));
    }
    DispersionAnchor a;
    double* numeric[] = {&a.h_ln_over_lambda, &a.h_elec_over_lambda, &a.duty, &a.v_p, &a.keff2};
    for (std::size_t k = 0; k < 5; ++k) {
      const auto v = detail::parse_double(cols[k]);
      if (!v) {
        throw Error(ErrorKind::SchemaError,
                    fmt::format("dispersion CSV line {}: '{}' is not a number", line_no, cols[k]));
      }
      *numeric[k] = *v;
    }
    a.family = std::string(detail::trim(cols[5]));
    // provenance keeps any further commas
    const auto prov_start = static_cast<std::size_t>(cols[6].data() - line.data());
    a.provenance = std::string(detail::trim(line.substr(prov_start)));
    anchors.push_back(std::move(a));
  }
  if (!header_seen) throw Error(ErrorKind::SchemaError, "dispersion CSV is empty");
  return DispersionTable(std::move(anchors));
}

std::string DispersionTable::to_csv() const {
  std::string out = "h_ln_over_lambda,h_elec_over_lambda,duty,v_p_mps,keff2,family,provenance\n";
  for (const auto& a : anchors_) {
    out += fmt::format("{},{},{},{},{},{},{}\n", a.h_ln_over_lambda, a.h_elec_over_lambda, a.duty,
                       a.v_p, a.keff2, a.family, a.provenance);
  }
  return out;
}

std::vector<DispersionAnchor> DispersionTable::subfamily(std::string_view family,
                                                         double duty) const {
  std::vector<DispersionAnchor> out;
  for (const auto& a : anchors_) {
    if (a.family == family && std::abs(a.duty - duty) <= kDutyTol) out.push_back(a);
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& x, const auto& y) {
    return x.h_ln_over_lambda < y.h_ln_over_lambda;
  });
  return out;
}

std::vector<double> DispersionTable::duties(std::string_view family) const {
  std::set<double> d;
  for (const auto& a : anchors_) {
    if (a.family == family) d.insert(a.duty);
  }
  return {d.begin(), d.end()};
}

bool DispersionTable::resolves_h_elec(std::string_view family) const {
  std::map<std::pair<double, double>, std::set<double>> by_node;
  for (const auto& a : anchors_) {
    if (a.family == family) by_node[{a.h_ln_over_lambda, a.duty}].insert(a.h_elec_over_lambda);
  }
  return std::any_of(by_node.begin(), by_node.end(),
                     [](const auto& kv) { return kv.second.size() > 1; });
}

bool DispersionTable::resolves_duty(std::string_view family) const {
  std::map<double, std::set<double>> by_node;
  for (const auto& a : anchors_) {
    if (a.family == family) by_node[a.h_ln_over_lambda].insert(a.duty);
  }
  return std::any_of(by_node.begin(), by_node.end(),
                     [](const auto& kv) { return kv.second.size() > 1; });
}

Prediction predict_fs(const DeviceGeometry& g, const DispersionTable& table,
                      std::string_view family, const PredictOptions& options) {
  return predict(g, table, family, options, Column::VelocityMps);
}

Prediction predict_keff2(const DeviceGeometry& g, const DispersionTable& table,
                         std::string_view family, const PredictOptions& options) {
  return predict(g, table, family, options, Column::Keff2);
}

double scale_to_frequency(double target_fs, double h_ln, const DispersionTable& table,
                          std::string_view family, double duty, double relative_tolerance) {
  if (!(target_fs > 0.0) || !(h_ln > 0.0) || !(relative_tolerance > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "target, h_ln and tolerance must be positive");
  }
  std::vector<std::string> warnings;
  const Interpolator interp(table, family, duty, warnings);
  const PredictOptions strict;

  // f_s(lambda) = v_p(r) r / h_ln with r = h_ln / lambda; it falls with lambda
  // iff v_p(r) r rises with r on every segment.
  const auto& nodes = interp.nodes();
  auto v_at = [&](double r) { return interp.evaluate(r, std::nullopt, Column::VelocityMps, strict, warnings); };
  for (std::size_t k = 0; k + 1 < nodes.size(); ++k) {
    const double ra = nodes[k].r;
    const double rb = nodes[k + 1].r;
    const double va = v_at(ra);
    const double slope = (v_at(rb) - va) / (rb - ra);
    if (!(va + slope * ra > 0.0) || !(va + slope * (2.0 * rb - ra) > 0.0)) {
      throw Error(ErrorKind::DomainError,
                  fmt::format("f_s is not monotone in lambda between h_ln/lambda {} and {}", ra,
                              rb));
    }
  }

  const double lambda_lo = h_ln / interp.r_max();
  const double lambda_hi = h_ln / interp.r_min();
  auto f_of = [&](double lambda) { return v_at(h_ln / lambda) / lambda; };
  const double f_max = f_of(lambda_lo);
  const double f_min = f_of(lambda_hi);
  if (target_fs < f_min * (1.0 - kHullSlack) || target_fs > f_max * (1.0 + kHullSlack)) {
    throw Error(ErrorKind::TargetOutOfRange,
                fmt::format("target {:.6g} GHz outside reachable range [{:.6g}, {:.6g}] GHz for "
                            "h_ln = {:.6g} um",
                            target_fs / 1e9, f_min / 1e9, f_max / 1e9, h_ln * 1e6));
  }
  if (nodes.size() == 1) return lambda_lo;

  double lo = lambda_lo;
  double hi = lambda_hi;
  while ((hi - lo) > relative_tolerance * 0.5 * (hi + lo)) {
    const double mid = 0.5 * (lo + hi);
    if (f_of(mid) > target_fs) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

std::optional<SweepAxis> parse_sweep_axis(std::string_view name) {
  const std::string n = detail::to_upper(name);
  if (n == "LAMBDA") return SweepAxis::Lambda;
  if (n == "H_LN") return SweepAxis::HLn;
  if (n == "H_ELEC") return SweepAxis::HElec;
  if (n == "DUTY") return SweepAxis::Duty;
  return std::nullopt;
}

std::string_view to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::Lambda: return "lambda";
    case SweepAxis::HLn: return "h_ln";
    case SweepAxis::HElec: return "h_elec";
    case SweepAxis::Duty: return "duty";
  }
  return "lambda";
}

std::vector<SweepRow> sweep(const DeviceGeometry& base, SweepAxis axis,
                            std::span<const double> values, const DispersionTable& table,
                            std::string_view family, const PredictOptions& options) {
  std::string axis_note;
  if (axis == SweepAxis::HElec && !table.resolves_h_elec(family)) {
    axis_note = fmt::format("table family '{}' has no h_elec dependence; electrode loading along "
                            "this axis is not modeled",
                            family);
  } else if (axis == SweepAxis::Duty && !table.resolves_duty(family)) {
    axis_note = fmt::format(
        "table family '{}' has no duty dependence at a shared h_ln/lambda; duty not modeled",
        family);
  }

  std::vector<SweepRow> rows;
  rows.reserve(values.size());
  for (double v : values) {
    SweepRow row;
    row.value = v;
    DeviceGeometry g = base;
    switch (axis) {
      case SweepAxis::Lambda: g.lambda = v; break;
      case SweepAxis::HLn: g.h_ln = v; break;
      case SweepAxis::HElec: g.h_elec = v; break;
      case SweepAxis::Duty: g.duty = v; break;
    }
    if (!axis_note.empty()) row.warnings.push_back(axis_note);
    try {
      Prediction fs = predict_fs(g, table, family, options);
      Prediction k = predict_keff2(g, table, family, options);
      row.f_s = fs.value;
      row.keff2 = k.value;
      row.warnings.insert(row.warnings.end(), fs.warnings.begin(), fs.warnings.end());
    } catch (const Error& e) {
      row.error = e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string sweep_csv(SweepAxis axis, std::span<const SweepRow> rows) {
  const bool length = axis != SweepAxis::Duty;
  std::string out = fmt::format("{}{},f_s_GHz,keff2_pct,warnings,error\n", to_string(axis),
                                length ? "_nm" : "");
  for (const auto& r : rows) {
    out += fmt::format("{:.6g},{},{},{},{}\n", length ? r.value * 1e9 : r.value,
                       r.f_s ? fmt::format("{:.6g}", *r.f_s / 1e9) : std::string{},
                       r.keff2 ? fmt::format("{:.6g}", *r.keff2 * 100.0) : std::string{},
                       detail::csv_field(join(r.warnings, "; ")), detail::csv_field(r.error));
  }
  return out;
}

}  // namespace resokit

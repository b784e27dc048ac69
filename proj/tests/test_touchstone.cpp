#include "resokit/error.hpp"
#include "resokit/touchstone.hpp"
#include "support.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace resokit;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

ErrorKind kind_of(std::string_view text) {
  try {
    parse_touchstone(text);
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected parse failure");
  return ErrorKind::InvalidArgument;
}

OnePortTrace random_trace(std::mt19937_64& rng, double z0) {
  std::uniform_int_distribution<int> count(2, 60);
  std::uniform_real_distribution<double> step(1e3, 5e7);
  std::uniform_real_distribution<double> start(1e5, 2e10);
  std::uniform_real_distribution<double> mag(1e-4, 1.0);
  std::uniform_real_distribution<double> phase(-3.14159, 3.14159);
  const int n = count(rng);
  std::vector<double> f(n);
  std::vector<Complex> s(n);
  f[0] = start(rng);
  for (int i = 1; i < n; ++i) f[i] = f[i - 1] + step(rng);
  for (auto& v : s) v = std::polar(mag(rng), phase(rng));
  return OnePortTrace(std::move(f), std::move(s), z0);
}

}  // namespace

TEST_CASE("touchstone: RI rows are read verbatim with frequency scaling", "[touchstone]") {
  const auto file = parse_touchstone("# GHZ S RI R 50\n9.05 0.0 0.0\n9.10 0.25 -0.5\n");
  REQUIRE(file.trace.size() == 2);
  CHECK(file.trace.frequencies()[0] == 9.05e9);
  CHECK(file.trace.s11()[0] == Complex(0.0, 0.0));
  CHECK(file.trace.s11()[1] == Complex(0.25, -0.5));
  CHECK(file.trace.z0() == 50.0);
  CHECK(file.format.value_format == ValueFormat::RI);
}

TEST_CASE("touchstone: MA magnitude 1 at 180 degrees is -1", "[touchstone]") {
  const auto file = parse_touchstone("# MHZ S MA R 50\n1.0 1.0 180.0\n2.0 1.0 90.0\n");
  CHECK(file.trace.frequencies()[0] == 1.0e6);
  CHECK_THAT(file.trace.s11()[0].real(), WithinAbs(-1.0, 1e-15));
  CHECK_THAT(file.trace.s11()[0].imag(), WithinAbs(0.0, 1e-15));
  CHECK_THAT(file.trace.s11()[1].imag(), WithinAbs(1.0, 1e-15));
}

TEST_CASE("touchstone: DB -6.0206 dB is magnitude one half", "[touchstone]") {
  const auto file = parse_touchstone("# GHZ S DB R 50\n1.0 -6.0205999 0.0\n2.0 0 0\n");
  CHECK_THAT(file.trace.s11()[0].real(), WithinRel(0.5, 1e-8));
  CHECK_THAT(file.trace.s11()[0].imag(), WithinAbs(0.0, 1e-15));
}

TEST_CASE("touchstone: option line defaults", "[touchstone]") {
  SECTION("R omitted means 50 ohm") {
    const auto file = parse_touchstone("# HZ S RI\n1 0 0\n2 0 0\n");
    CHECK(file.trace.z0() == 50.0);
    CHECK(file.format.frequency_unit == FrequencyUnit::Hz);
  }
  SECTION("no option line means GHz MA 50") {
    const auto file = parse_touchstone("1 0.5 90\n2 0.5 0\n");
    CHECK(file.format == TouchstoneFormat{});
    CHECK(file.trace.frequencies()[1] == 2e9);
    CHECK_THAT(file.trace.s11()[0].imag(), WithinAbs(0.5, 1e-15));
  }
  SECTION("tokens are case-insensitive and R may be non-50") {
    const auto file = parse_touchstone("# khz s ri r 75.5\n1 0 0\n2 0 0\n");
    CHECK(file.trace.z0() == 75.5);
    CHECK(file.trace.frequencies()[0] == 1e3);
  }
}

TEST_CASE("touchstone: CRLF, blank lines and inline comments", "[touchstone]") {
  const auto file = parse_touchstone(
      "! header one\r\n!header two\r\n\r\n# GHZ S RI R 50 ! inline\r\n1 0.1 0.2 ! row\r\n2 0.3 0.4\r\n");
  REQUIRE(file.comments.size() == 2);
  CHECK(file.comments[0] == " header one");
  CHECK(file.comments[1] == "header two");
  CHECK(file.trace.s11()[1] == Complex(0.3, 0.4));
}

TEST_CASE("touchstone: malformed input is rejected by kind", "[touchstone]") {
  CHECK(kind_of("# GHZ S XX R 50\n1 0 0\n2 0 0\n") == ErrorKind::MalformedOptionLine);
  CHECK(kind_of("# GHZ S RI R\n1 0 0\n2 0 0\n") == ErrorKind::MalformedOptionLine);
  CHECK(kind_of("# GHZ S RI R -5\n1 0 0\n2 0 0\n") == ErrorKind::MalformedOptionLine);
  CHECK(kind_of("# GHZ S RI R 50\n# GHZ S RI R 50\n1 0 0\n2 0 0\n") ==
        ErrorKind::MalformedOptionLine);
  CHECK(kind_of("# GHZ Y RI R 50\n1 0 0\n2 0 0\n") == ErrorKind::UnsupportedFile);
  CHECK(kind_of("[Version] 2.0\n# GHZ S RI R 50\n1 0 0\n2 0 0\n") == ErrorKind::UnsupportedFile);
  CHECK(kind_of("# GHZ S RI R 50\n2 0 0\n1 0 0\n") == ErrorKind::NonMonotonicFrequency);
  CHECK(kind_of("# GHZ S RI R 50\n1 0 0\n1 0 0\n") == ErrorKind::NonMonotonicFrequency);
  CHECK(kind_of("# GHZ S RI R 50\n1 0 0 0\n2 0 0\n") == ErrorKind::WrongColumnCount);
  CHECK(kind_of("# GHZ S RI R 50\n1 0 0 0 0 0 0 0 0\n") == ErrorKind::WrongColumnCount);
  CHECK(kind_of("# GHZ S RI R 50\n1 0 abc\n2 0 0\n") == ErrorKind::WrongColumnCount);
  CHECK(kind_of("# GHZ S RI R 50\n1 0 0\n") == ErrorKind::EmptyData);
  CHECK(kind_of("") == ErrorKind::EmptyData);
}

TEST_CASE("touchstone: writer output", "[touchstone]") {
  const OnePortTrace zero({1e9, 2e9}, {Complex{}, Complex{}}, 50.0);
  TouchstoneFormat ri;
  ri.value_format = ValueFormat::RI;
  const std::string text = write_touchstone(zero, ri);
  CHECK(text == "# GHZ S RI R 50\n1 0 0\n2 0 0\n");

  const OnePortTrace minus_one({1e9, 2e9}, {Complex(-1.0, 0.0), Complex(-1.0, -0.0)}, 50.0);
  const std::string ma = write_touchstone(minus_one, TouchstoneFormat{});
  CHECK(ma == "# GHZ S MA R 50\n1 1 180\n2 1 180\n");

  const std::vector<std::string> comments{" kept"};
  CHECK(write_touchstone(zero, ri, comments).starts_with("! kept\n# GHZ"));

  TouchstoneFormat wrong_r = ri;
  wrong_r.reference_resistance = 75.0;
  CHECK_THROWS_AS(write_touchstone(zero, wrong_r), Error);
}

TEST_CASE("touchstone: trace invariants are enforced on construction", "[touchstone]") {
  CHECK_THROWS_AS(OnePortTrace({1.0}, {Complex{}}, 50.0), Error);
  CHECK_THROWS_AS(OnePortTrace({1.0, 2.0}, {Complex{}}, 50.0), Error);
  CHECK_THROWS_AS(OnePortTrace({0.0, 2.0}, {Complex{}, Complex{}}, 50.0), Error);
  CHECK_THROWS_AS(OnePortTrace({1.0, 2.0}, {Complex{}, Complex{}}, 0.0), Error);
}

TEST_CASE("touchstone: parse of write is the identity for every format and unit", "[touchstone]") {
  std::mt19937_64 rng(20240611);
  const FrequencyUnit units[] = {FrequencyUnit::Hz, FrequencyUnit::kHz, FrequencyUnit::MHz,
                                 FrequencyUnit::GHz};
  const ValueFormat formats[] = {ValueFormat::RI, ValueFormat::MA, ValueFormat::DB};
  int cases = 0;
  for (int rep = 0; rep < 10; ++rep) {
    for (auto u : units) {
      for (auto v : formats) {
        const double z0 = rep % 2 == 0 ? 50.0 : 12.5 + rep;
        const OnePortTrace trace = random_trace(rng, z0);
        const TouchstoneFormat format{u, v, z0};
        const std::vector<std::string> comments{"round trip", ""};
        const auto back = parse_touchstone(write_touchstone(trace, format, comments));
        CHECK(back.format == format);
        CHECK(back.comments == comments);
        REQUIRE(back.trace.size() == trace.size());
        CHECK(back.trace.z0() == trace.z0());
        for (std::size_t i = 0; i < trace.size(); ++i) {
          CHECK(support::rel(back.trace.frequencies()[i], trace.frequencies()[i]) <= 1e-9);
          CHECK(std::abs(back.trace.s11()[i] - trace.s11()[i]) <= 1e-9 * std::abs(trace.s11()[i]));
        }
        ++cases;
      }
    }
  }
  CHECK(cases == 120);
}

TEST_CASE("touchstone: the same data in RI, MA and DB parses identically", "[touchstone]") {
  std::mt19937_64 rng(7);
  const OnePortTrace trace = random_trace(rng, 50.0);
  std::vector<OnePortTrace> parsed;
  for (auto v : {ValueFormat::RI, ValueFormat::MA, ValueFormat::DB}) {
    parsed.push_back(parse_touchstone(write_touchstone(trace, {FrequencyUnit::MHz, v, 50.0})).trace);
  }
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const Complex ref = parsed[0].s11()[i];
    CHECK(std::abs(parsed[1].s11()[i] - ref) <= 1e-9 * std::abs(ref));
    CHECK(std::abs(parsed[2].s11()[i] - ref) <= 1e-9 * std::abs(ref));
  }
}

TEST_CASE("touchstone: file helpers report the path on failure", "[touchstone]") {
  const auto dir = support::temp_dir("touchstone");
  const OnePortTrace trace({1e9, 2e9}, {Complex(0.1, 0.2), Complex(0.3, 0.4)}, 50.0);
  write_touchstone_file(dir / "a.s1p", trace, TouchstoneFormat{});
  const auto back = read_touchstone_file(dir / "a.s1p");
  CHECK(back.trace.size() == 2);
  try {
    read_touchstone_file(dir / "missing.s1p");
    FAIL("expected IoError");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::IoError);
    CHECK(std::string(e.what()).find("missing.s1p") != std::string::npos);
  }
}

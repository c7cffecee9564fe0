#include <catch2/catch.hpp>

#include <bit>
#include <cstdint>
#include <sstream>

#include "biostate/csv.hpp"
#include "biostate/panel.hpp"
#include "biostate/rng.hpp"

using namespace biostate;

namespace {

BiomarkerPanel parse(const std::string& text) {
  std::istringstream in(text);
  return load_panel(in);
}

bool bitwise_equal(const Matrix& a, const Matrix& b) {
  if (a.rows != b.rows || a.cols != b.cols) return false;
  for (std::size_t i = 0; i < a.data.size(); ++i)
    if (std::bit_cast<std::uint64_t>(a.data[i]) != std::bit_cast<std::uint64_t>(b.data[i]))
      return false;
  return true;
}

}  // namespace

TEST_CASE("header-derived schema with explicit windows") {
  const auto panel = parse("id,CK@Post,CRP@Pre\na,10,1\nb,20,2\nc,30,3\n");
  REQUIRE(panel.subject_count() == 3);
  REQUIRE(panel.column_count() == 2);
  CHECK(panel.schema[0].name == "CK");
  CHECK(panel.schema[0].window == Window::Post);
  CHECK(panel.schema[1].window == Window::Pre);
  CHECK(panel.values(2, 0) == 30.0);
}

TEST_CASE("window omitted means Pre") {
  const auto panel = parse("id,CK\na,1\nb,2\n");
  CHECK(panel.schema[0].window == Window::Pre);
  CHECK(column_label(panel.schema[0]) == "CK@Pre");
}

TEST_CASE("NaN cell is rejected with its location") {
  try {
    parse("id,CK,LDH\na,1,2\nb,NaN,4\n");
    FAIL("expected NonFiniteValue");
  } catch (const Error& err) {
    CHECK(err.code() == Errc::NonFiniteValue);
    CHECK(std::string(err.what()).find("row 2") != std::string::npos);
    CHECK(std::string(err.what()).find("CK") != std::string::npos);
  }
}

TEST_CASE("parse failures carry the right codes") {
  CHECK_THROWS_MATCHES(parse("id,CK\na,1,9\nb,2\n"), Error,
                       Catch::Matchers::Predicate<Error>([](const Error& e) {
                         return e.code() == Errc::MalformedCsv;
                       }));
  CHECK_THROWS_MATCHES(parse("id,CK\na,x1\nb,2\n"), Error,
                       Catch::Matchers::Predicate<Error>([](const Error& e) {
                         return e.code() == Errc::MalformedCsv;
                       }));
  CHECK_THROWS_MATCHES(parse("id,CK\na,1\na,2\n"), Error,
                       Catch::Matchers::Predicate<Error>([](const Error& e) {
                         return e.code() == Errc::DuplicateSubject;
                       }));
  CHECK_THROWS_MATCHES(parse("id,CK,CK\na,1,2\nb,3,4\n"), Error,
                       Catch::Matchers::Predicate<Error>([](const Error& e) {
                         return e.code() == Errc::DuplicateColumn;
                       }));
  CHECK_THROWS_MATCHES(parse("id,CK\na,1\n"), Error,
                       Catch::Matchers::Predicate<Error>([](const Error& e) {
                         return e.code() == Errc::EmptyPanel;
                       }));
  CHECK_THROWS_MATCHES(parse("id,CK@Noon\na,1\nb,2\n"), Error,
                       Catch::Matchers::Predicate<Error>([](const Error& e) {
                         return e.code() == Errc::MalformedCsv;
                       }));
}

TEST_CASE("same marker across windows is not a duplicate") {
  const auto panel = parse("id,CK@Pre,CK@Post,CK@Rec24h\na,1,2,3\nb,4,5,6\n");
  CHECK(panel.column_count() == 3);
}

TEST_CASE("comment lines and CRLF are tolerated") {
  const auto panel = parse("# biostate 0.1.0 config=abc space=z\r\nid,CK\r\na,1\r\nb,2\r\n");
  CHECK(panel.subject_count() == 2);

  std::istringstream meta_in("# biostate 0.1.0 config=abc space=z\nid,CK\n");
  const auto meta = read_csv_metadata(meta_in);
  CHECK(meta.at("space") == "z");
  CHECK(meta.at("config") == "abc");
}

TEST_CASE("an 18-column marker/window grid loads intact") {
  // 5 markers at 3 windows + 3 at Pre only = 18 columns
  std::ostringstream csv;
  csv << "id";
  const char* tri[] = {"CK", "LDH", "CRP", "cortisol", "testosterone"};
  for (const char* name : tri)
    for (const char* w : {"Pre", "Post", "Rec24h"}) csv << "," << name << "@" << w;
  for (const char* name : {"SpO2", "heart_rate", "blood_pressure"})
    csv << "," << name << "@Pre";
  csv << "\n";
  Rng rng(11);
  for (int i = 0; i < 22; ++i) {
    csv << "athlete" << i;
    for (int j = 0; j < 18; ++j) csv << "," << format_double(rng.next_double() * 100);
    csv << "\n";
  }
  const auto panel = parse(csv.str());
  CHECK(panel.subject_count() == 22);
  CHECK(panel.column_count() == 18);
}

TEST_CASE("explicit schema mode validates and applies descriptors") {
  const std::vector<BiomarkerDescriptor> schema = {{"CK", "U/L", Window::Post},
                                                   {"CRP", "mg/L", Window::Pre}};
  std::istringstream in("id,CK@Post,CRP\na,1,2\nb,3,4\n");
  const auto panel = load_panel(in, schema);
  CHECK(panel.schema[0].unit == "U/L");

  std::istringstream swapped("id,CRP,CK@Post\na,1,2\nb,3,4\n");
  CHECK_THROWS_MATCHES(load_panel(swapped, schema), Error,
                       Catch::Matchers::Predicate<Error>([](const Error& e) {
                         return e.code() == Errc::ShapeMismatch;
                       }));
}

TEST_CASE("canonical CSV round trip is bitwise exact") {
  Rng rng(99);
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t n = 2 + rng.next_index(12);
    const std::size_t b = 1 + rng.next_index(8);
    BiomarkerPanel panel;
    for (std::size_t j = 0; j < b; ++j)
      panel.schema.push_back({"m" + std::to_string(j),
                              "",
                              j % 3 == 0 ? Window::Pre
                                         : (j % 3 == 1 ? Window::Post : Window::Rec24h)});
    for (std::size_t i = 0; i < n; ++i) panel.subjects.push_back("s" + std::to_string(i));
    panel.values = Matrix(n, b);
    for (double& v : panel.values.data)
      v = (rng.next_double() - 0.5) * std::pow(10.0, static_cast<double>(rng.next_index(7)) - 3.0);
    const auto parsed = parse(panel_to_csv(panel));
    REQUIRE(parsed.subjects == panel.subjects);
    REQUIRE(parsed.schema == panel.schema);
    REQUIRE(bitwise_equal(parsed.values, panel.values));
  }
}

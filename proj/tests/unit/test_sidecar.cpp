#include <doctest.h>

#include <chrono>

#include "forge/sidecar.hpp"
#include "synth.hpp"

using namespace forge;

namespace {

SidecarOptions opts(const std::string& mode, std::size_t batch = 64, int timeout_ms = 5000) {
  SidecarOptions o;
  o.command = std::string(FORGE_FAKE_SIDECAR) + " " + mode;
  o.batch_size = batch;
  o.timeout_ms = timeout_ms;
  return o;
}

std::vector<ScoreRequest> requests(std::size_t n) {
  std::vector<ScoreRequest> out;
  for (auto& s : testutil::synth_pairs(n, 4)) {
    out.push_back({s.pair.code, s.pair.docstring, s.pair.language});
    // Every other request carries a mismatched docstring so scores vary.
    if (out.size() % 2 == 0) out.back().docstring = "Opens the remote socket channel.";
  }
  return out;
}

std::vector<double> expected(const std::vector<ScoreRequest>& r) {
  std::vector<double> out;
  for (const auto& q : r) out.push_back(baseline_score(q.code, q.docstring));
  return out;
}

void check_scores(const std::vector<double>& got, const std::vector<double>& want) {
  REQUIRE(got.size() == want.size());
  for (std::size_t i = 0; i < got.size(); ++i) CHECK(got[i] == doctest::Approx(want[i]));
}

}  // namespace

TEST_CASE("handshake and scoring in request order") {
  SidecarClient c(opts("normal"));
  c.start();
  CHECK(c.running());
  const auto r = requests(10);
  check_scores(c.score(r), expected(r));
  CHECK(c.score({}).empty());
  c.stop();
  CHECK_FALSE(c.running());
}

TEST_CASE("out-of-order responses are matched by id") {
  SidecarClient c(opts("reverse", 1000));
  c.start();
  const auto r = requests(1000);
  check_scores(c.score(r), expected(r));
}

TEST_CASE("batch size does not change scores") {
  const auto r = requests(200);
  const auto want = expected(r);
  for (std::size_t b : {1u, 7u, 64u, 500u}) {
    SidecarClient c(opts("reverse", b));
    c.start();
    check_scores(c.score(r), want);
  }
}

TEST_CASE("protocol failures raise SidecarError") {
  SUBCASE("bad hello") {
    SidecarClient c(opts("badhello"));
    CHECK_THROWS_AS(c.start(), SidecarError);
  }
  SUBCASE("missing binary") {
    SidecarOptions o;
    o.command = "/nonexistent/scorer";
    o.timeout_ms = 2000;
    SidecarClient c(o);
    CHECK_THROWS_AS(c.start(), SidecarError);
  }
  SUBCASE("crash") {
    SidecarClient c(opts("crash"));
    c.start();
    CHECK_THROWS_AS(c.score(requests(3)), SidecarError);
  }
  SUBCASE("garbage") {
    SidecarClient c(opts("garbage"));
    c.start();
    CHECK_THROWS_AS(c.score(requests(3)), SidecarError);
  }
  SUBCASE("duplicate") {
    SidecarClient c(opts("duplicate"));
    c.start();
    CHECK_THROWS_AS(c.score(requests(3)), SidecarError);
  }
  SUBCASE("range") {
    SidecarClient c(opts("range"));
    c.start();
    CHECK_THROWS_AS(c.score(requests(3)), SidecarError);
  }
  SUBCASE("hang times out") {
    SidecarClient c(opts("hang", 64, 300));
    c.start();
    const auto t0 = std::chrono::steady_clock::now();
    CHECK_THROWS_AS(c.score(requests(3)), SidecarError);
    CHECK(std::chrono::steady_clock::now() - t0 < std::chrono::seconds(5));
  }
}

TEST_CASE("sidecar scorer: fail-closed and fail-open") {
  const auto r = requests(5);
  {
    SidecarScorer s(opts("crash"), false);
    CHECK_THROWS_AS(s.score_batch(r), SidecarError);
  }
  {
    SidecarScorer s(opts("crash"), true);
    const auto got = s.score_batch(r);
    CHECK(got == std::vector<double>(5, 1.0));
    CHECK(s.degraded());
    CHECK_FALSE(s.last_error().empty());
    CHECK(s.score_batch(r).size() == 5);
  }
  {
    SidecarScorer s(opts("normal"), true);
    check_scores(s.score_batch(r), expected(r));
    CHECK_FALSE(s.degraded());
  }
}

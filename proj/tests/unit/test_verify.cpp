#include "support.hpp"

#include "csflab/verify.hpp"

using namespace csflab;

TEST_CASE("suite parsing") {
  CHECK(parse_suite("all").empty());
  CHECK(parse_suite("1,4,11") == std::vector<int>{1, 4, 11});
  CHECK(parse_suite("3,3,2") == std::vector<int>{3, 2});
  CHECK(parse_suite("14") == std::vector<int>{14});
  for (const char* bad : {"", "0", "15", "1,,2", "x", "1.5", "2a", "-1"})
    CHECK_ERROR_CODE(parse_suite(bad), ErrorCode::OutOfDomain);
}

TEST_CASE("criterion titles") {
  for (int id = 1; id <= kCriterionCount; ++id) CHECK_FALSE(criterion_title(id).empty());
  CHECK_ERROR_CODE(criterion_title(0), ErrorCode::OutOfDomain);
  CHECK_ERROR_CODE(run_criterion(15, 1), ErrorCode::OutOfDomain);
}

TEST_CASE("report json round trip") {
  VerifyReport r;
  VerifyOutcome o;
  o.id = 2;
  o.title = criterion_title(2);
  o.checks.push_back({"entropy", 1.5203, 1.5203469, 1e-3, Relation::Near, true});
  o.checks.push_back({"flag", 0, 1, 0, Relation::Holds, false});
  o.error = "";
  o.pass = false;
  r.outcomes.push_back(o);
  r.pass = false;
  r.exit_code = 1;
  CHECK(verify_report_from_json(json::parse(to_json(r).dump())) == r);
}

TEST_CASE("a fast criterion runs and is reproducible") {
  VerifyOptions opt;
  opt.ids = {2};
  int calls = 0;
  opt.on_done = [&](const VerifyOutcome&, double s) {
    ++calls;
    CHECK(s >= 0);
  };
  const auto a = run_verify(opt);
  const auto b = run_verify(opt);
  CHECK(calls == 2);
  REQUIRE(a.outcomes.size() == 1);
  CHECK(a.outcomes[0].id == 2);
  CHECK(to_json(a).dump() == to_json(b).dump());
  CHECK(a.exit_code == (a.pass ? 0 : 1));
}

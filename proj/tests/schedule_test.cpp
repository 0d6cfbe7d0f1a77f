#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "lazyreg/kernels.hpp"
#include "lazyreg/schedule.hpp"

using namespace lazyreg;

namespace {

// Independent recomputation of the five tables by direct summation/product
// over global steps base..t. O(t) on purpose.
struct DirectTables {
  double s = 0.0, p = 1.0, b = 0.0, phi = 1.0, beta = 0.0;
};

DirectTables direct_at(const Schedule& sched, double lambda2,
                       std::int64_t base, std::int64_t t) {
  DirectTables v;
  for (std::int64_t g = base; g <= t; ++g) {
    const double eta = sched.rate_at(g);
    v.s += eta;
    v.beta += eta / v.phi;
    v.p *= 1.0 - eta * lambda2;
    v.b += eta / v.p;
    v.phi /= 1.0 + eta * lambda2;
  }
  return v;
}

bool close_rel(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

TEST_CASE("rate_at follows the kind formulas") {
  CHECK(Schedule{RateKind::Constant, 0.1}.rate_at(5) == 0.1);
  CHECK(Schedule{RateKind::InverseT, 0.1}.rate_at(0) == 0.1);
  CHECK(Schedule{RateKind::InverseT, 0.1}.rate_at(9) == doctest::Approx(0.01));
  CHECK(Schedule{RateKind::InverseSqrtT, 0.1}.rate_at(3) ==
        doctest::Approx(0.05));
}

TEST_CASE("rate_at is non-increasing for every kind") {
  for (const RateKind kind :
       {RateKind::Constant, RateKind::InverseT, RateKind::InverseSqrtT}) {
    const Schedule sched{kind, 0.3};
    double prev = sched.rate_at(0);
    for (std::int64_t t = 1; t <= 1000; ++t) {
      const double cur = sched.rate_at(t);
      CHECK(cur <= prev);
      CHECK(cur > 0.0);
      prev = cur;
    }
  }
}

TEST_CASE("extend_to at base - 1 appends nothing") {
  ScheduleCache cache({RateKind::Constant, 0.1}, 1.0, Algo::Sgd);
  cache.extend_to(-1);
  CHECK(cache.cached_entries() == 0);
  CHECK(cache.high_water() == -1);
}

TEST_CASE("sgd_decay table matches the defining product") {
  ScheduleCache cache({RateKind::Constant, 0.1}, 1.0, Algo::Sgd);
  cache.extend_to(2);
  CHECK(cache.sgd_decay(0) == doctest::Approx(0.9));
  CHECK(cache.sgd_decay(1) == doctest::Approx(0.81));
  CHECK(cache.sgd_decay(2) == doctest::Approx(0.729));
}

TEST_CASE("sgd_l1_sum uses the decay at the same step in the denominator") {
  ScheduleCache cache({RateKind::Constant, 0.1}, 1.0, Algo::Sgd);
  cache.extend_to(1);
  CHECK(cache.sgd_l1_sum(0) == doctest::Approx(0.1 / 0.9));
  CHECK(cache.sgd_l1_sum(1) == doctest::Approx(0.1 / 0.9 + 0.1 / 0.81));
}

TEST_CASE("virtual index base - 1 returns the base cases") {
  ScheduleCache cache({RateKind::Constant, 0.1}, 1.0, Algo::Sgd);
  CHECK(cache.rate_sum(-1) == 0.0);
  CHECK(cache.sgd_decay(-1) == 1.0);
  CHECK(cache.sgd_l1_sum(-1) == 0.0);
  CHECK(cache.fobos_decay(-1) == 1.0);
  CHECK(cache.fobos_l1_sum(-1) == 0.0);
}

TEST_CASE("first cached entries match hand values") {
  ScheduleCache cache({RateKind::Constant, 0.1}, 1.0, Algo::Fobos);
  cache.extend_to(0);
  CHECK(cache.fobos_l1_sum(0) == doctest::Approx(0.1));      // eta(0)/phi(-1)
  CHECK(cache.fobos_decay(0) == doctest::Approx(1.0 / 1.1));
}

TEST_CASE("lookups outside the cached range throw OutOfRange") {
  ScheduleCache cache({RateKind::Constant, 0.1}, 0.5, Algo::Sgd);
  cache.extend_to(4);
  CHECK_THROWS_AS(cache.rate_sum(5), OutOfRange);
  CHECK_THROWS_AS(cache.sgd_decay(-2), OutOfRange);
  CHECK_NOTHROW(cache.rate_sum(4));
  CHECK_NOTHROW(cache.rate_sum(-1));
}

TEST_CASE("extend_to appends exactly the missing entries and is idempotent") {
  ScheduleCache cache({RateKind::InverseT, 0.2}, 0.3, Algo::Sgd);
  cache.extend_to(50);
  CHECK(cache.cached_entries() == 51);
  const double frozen = cache.rate_sum(50);
  cache.extend_to(30);  // already covered
  CHECK(cache.cached_entries() == 51);
  CHECK(cache.rate_sum(50) == frozen);
  cache.extend_to(120);
  CHECK(cache.cached_entries() == 121);
}

TEST_CASE("extend_to signals InvalidRate when SGD positivity breaks") {
  // constant eta 0.5, lambda2 3: 1 - 1.5 < 0
  ScheduleCache cache({RateKind::Constant, 0.5}, 3.0, Algo::Sgd);
  CHECK_THROWS_AS(cache.extend_to(0), InvalidRate);
  // same rates are fine for FoBoS, whose factor is 1/(1 + eta*lambda2)
  ScheduleCache fcache({RateKind::Constant, 0.5}, 3.0, Algo::Fobos);
  CHECK_NOTHROW(fcache.extend_to(100));
  CHECK(fcache.fobos_decay(0) == doctest::Approx(1.0 / 2.5));
}

TEST_CASE("InverseT positivity recovers once the rate decays") {
  // eta(0)*lambda2 = 1.2 breaks at step 0 for SGD
  ScheduleCache cache({RateKind::InverseT, 0.6}, 2.0, Algo::Sgd);
  CHECK_THROWS_AS(cache.extend_to(10), InvalidRate);
}

TEST_CASE("rebase resets tables and keeps global-index rates") {
  ScheduleCache cache({RateKind::InverseT, 0.1}, 1.0, Algo::Sgd);
  cache.extend_to(8);
  cache.rebase(9);
  CHECK(cache.cached_entries() == 0);
  CHECK(cache.base() == 9);
  CHECK(cache.sgd_decay(8) == 1.0);  // new virtual -1
  cache.extend_to(9);
  // eta(9) = 0.1/10 = 0.01, so the first entry is 1 - 0.01*1
  CHECK(cache.sgd_decay(9) == doctest::Approx(0.99));
}

TEST_CASE("rebase at the current base of an empty cache is a no-op") {
  ScheduleCache cache({RateKind::Constant, 0.1}, 1.0, Algo::Sgd);
  cache.rebase(0);
  CHECK(cache.base() == 0);
  CHECK(cache.cached_entries() == 0);
  CHECK(cache.sgd_decay(-1) == 1.0);
}

TEST_CASE("rebase cannot move backwards") {
  ScheduleCache cache({RateKind::Constant, 0.1}, 1.0, Algo::Sgd);
  cache.rebase(10);
  CHECK_THROWS_AS(cache.rebase(4), ContractViolation);
}

TEST_CASE("rebased cache yields identical update ratios and differences") {
  const Schedule sched{RateKind::InverseSqrtT, 0.4};
  const double lambda2 = 0.8;
  ScheduleCache full(sched, lambda2, Algo::Sgd);
  full.extend_to(200);
  ScheduleCache rebased(sched, lambda2, Algo::Sgd);
  rebased.rebase(100);
  rebased.extend_to(200);

  for (std::int64_t psi = 100; psi <= 200; psi += 17) {
    for (std::int64_t k = psi; k <= 200; k += 13) {
      CHECK(close_rel(full.sgd_decay(k) / full.sgd_decay(psi),
                      rebased.sgd_decay(k) / rebased.sgd_decay(psi), 1e-12));
      CHECK(close_rel(full.rate_sum(k) - full.rate_sum(psi),
                      rebased.rate_sum(k) - rebased.rate_sum(psi), 1e-12));
      CHECK(close_rel(
          full.sgd_decay(k) * (full.sgd_l1_sum(k) - full.sgd_l1_sum(psi)),
          rebased.sgd_decay(k) *
              (rebased.sgd_l1_sum(k) - rebased.sgd_l1_sum(psi)),
          1e-12));
    }
  }
}

TEST_CASE("cached tables match direct summation, all kinds") {
  for (const RateKind kind :
       {RateKind::Constant, RateKind::InverseT, RateKind::InverseSqrtT}) {
    const Schedule sched{kind, 0.1};
    const double lambda2 = 0.05;
    ScheduleCache cache(sched, lambda2, Algo::Sgd);
    cache.extend_to(2000);
    for (const std::int64_t t : {0L, 1L, 17L, 500L, 1999L}) {
      const DirectTables v = direct_at(sched, lambda2, 0, t);
      CHECK(close_rel(cache.rate_sum(t), v.s, 1e-12));
      CHECK(close_rel(cache.sgd_decay(t), v.p, 1e-12));
      CHECK(close_rel(cache.sgd_l1_sum(t), v.b, 1e-12));
      CHECK(close_rel(cache.fobos_decay(t), v.phi, 1e-12));
      CHECK(close_rel(cache.fobos_l1_sum(t), v.beta, 1e-12));
    }
  }
}

TEST_CASE("sgd_decay stays positive and fobos_decay stays in (0,1]") {
  ScheduleCache cache({RateKind::InverseSqrtT, 0.5}, 1.5, Algo::Sgd);
  cache.extend_to(3000);
  double prev_p = 1.0, prev_phi = 1.0;
  for (std::int64_t t = 0; t <= 3000; t += 7) {
    const double p = cache.sgd_decay(t);
    const double phi = cache.fobos_decay(t);
    CHECK(p > 0.0);
    CHECK(p <= prev_p);
    CHECK(phi > 0.0);
    CHECK(phi <= 1.0);
    CHECK(phi <= prev_phi);
    prev_p = p;
    prev_phi = phi;
  }
}

TEST_CASE("underflow guard fires on deep decay and clears on rebase") {
  // factor 1 - 0.5*1.9 = 0.05 per step: below 1e-100 within ~80 steps
  ScheduleCache cache({RateKind::Constant, 0.5}, 1.9, Algo::Sgd);
  cache.extend_to(50);
  CHECK_FALSE(cache.underflow_pending());
  cache.extend_to(100);
  CHECK(cache.underflow_pending());
  cache.rebase(101);
  CHECK_FALSE(cache.underflow_pending());
}

TEST_CASE("cache construction validates its arguments") {
  CHECK_THROWS_AS(ScheduleCache({RateKind::Constant, 0.0}, 1.0, Algo::Sgd),
                  ContractViolation);
  CHECK_THROWS_AS(ScheduleCache({RateKind::Constant, -0.1}, 1.0, Algo::Sgd),
                  ContractViolation);
  CHECK_THROWS_AS(ScheduleCache({RateKind::Constant, 0.1}, -1.0, Algo::Sgd),
                  ContractViolation);
}

#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>

#include "fixtures.hpp"
#include "json.hpp"
#include "optomech/errors.hpp"
#include "optomech/spectrum.hpp"

using namespace optomech;
using cplx = std::complex<double>;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

EigenInputs paper_inputs(double g_hz, double detuning_over_omega = -1.0) {
  const OptomechSystem sys = fixtures::paper_system();
  const double W = sys.fundamental().frequency();
  return {W, sys.fundamental().linewidth(), sys.cavity().kappa(), hz_to_rad(g_hz), detuning_over_omega * W};
}

nlohmann::json ladder() {
  std::ifstream in(fixtures::data_path("golden/threshold_ladder.json"));
  return nlohmann::json::parse(in);
}

}  // namespace

TEST_CASE("roots at zero coupling") {
  const EigenInputs in = paper_inputs(0.0);
  const EigenSolution s = eigenvalues_numeric(in);
  const double W = in.mech_frequency, G = in.mech_linewidth, k = in.kappa;
  const double wr = std::sqrt(W * W - G * G / 4);
  std::vector<cplx> expect{{-wr, -G / 2}, {wr, -G / 2}, {in.detuning, -k / 2}, {-in.detuning, -k / 2}};
  for (const cplx& e : expect) {
    double nearest = 1e300;
    for (const cplx& l : s.eigenvalues) nearest = std::min(nearest, std::abs(l - e));
    CHECK(nearest < 1e-9 * W);
  }
  CHECK(s.stability == Stability::stable);
  CHECK(s.omega_plus == Catch::Approx(W).epsilon(1e-12));
  // the mechanical root carries sqrt(W^2 - G^2/4), so the g = 0 splitting is G^2/8W, not 0
  CHECK_THAT(s.splitting, WithinRel(W - wr, 1e-3));
  CHECK(splitting_approx(0.0, k) == 0.0);
}

TEST_CASE("eigenvalue residuals are small") {
  for (double g_hz : {0.0, 1e5, 3e5, 1e6, 3.83e6, 4.8e6}) {
    const EigenInputs in = paper_inputs(g_hz);
    const EigenSolution s = eigenvalues_numeric(in);
    for (std::size_t i = 0; i < 4; ++i) {
      const double scale = std::pow(in.mech_frequency, 3);
      CHECK(std::abs(eigen_quartic(s.eigenvalues[i], in)) / scale < 1e-9);
      CHECK(s.damping_rates[i] == -s.eigenvalues[i].imag());
    }
    for (std::size_t i = 1; i < 4; ++i) CHECK(s.eigenvalues[i - 1].real() <= s.eigenvalues[i].real());
  }
}

TEST_CASE("closed form agrees with the numeric roots on the red sideband") {
  const double gc = rad_to_hz(instability_threshold(paper_inputs(0).detuning, paper_inputs(0).kappa,
                                                     paper_inputs(0).mech_frequency));
  for (double frac : {0.0, 0.01, 0.05, 0.2, 0.5, 0.79, 0.9, 0.95}) {
    const EigenInputs in = paper_inputs(frac * gc);
    const EigenSolution a = eigenvalues_closed_form(in), b = eigenvalues_numeric(in);
    CAPTURE(frac);
    // mechanical and optical roots share a real part below 4g = kappa, so pair by distance
    for (const cplx& l : a.eigenvalues) {
      double nearest = 1e300;
      for (const cplx& m : b.eigenvalues) nearest = std::min(nearest, std::abs(l - m));
      CHECK(nearest < 1e-9 * in.mech_frequency);
    }
    CHECK_THAT(a.omega_plus, WithinAbs(b.omega_plus, 1e-9 * in.mech_frequency));
    CHECK(a.stability == b.stability);
  }
  CHECK_THROWS_AS(eigenvalues_closed_form(paper_inputs(1e6, -0.9)), InvariantError);
}

TEST_CASE("zero-linewidth closed form is exact") {
  EigenInputs in = paper_inputs(2e6);
  in.mech_linewidth = 0.0;
  const EigenSolution a = eigenvalues_closed_form(in);
  for (const cplx& l : a.eigenvalues) {
    CHECK(std::abs(eigen_quartic(l, in)) / std::pow(in.mech_frequency, 3) < 1e-12);
  }
}

TEST_CASE("instability threshold straddle") {
  const EigenInputs base = paper_inputs(0.0);
  const double gc = instability_threshold(base.detuning, base.kappa, base.mech_frequency);
  CHECK_THAT(rad_to_hz(gc), WithinRel(ladder()["critical_coupling_hz"].get<double>(), 1e-12));
  CHECK_THAT(gc, WithinRel(0.5 * std::sqrt(base.mech_frequency * base.mech_frequency + base.kappa * base.kappa / 4), 1e-14));
  for (auto [factor, unstable] : {std::pair{0.999, false}, std::pair{1.001, true}}) {
    EigenInputs in = base;
    in.coupling = factor * gc;
    const EigenSolution s = eigenvalues_numeric(in);
    CAPTURE(factor);
    CHECK((s.stability == Stability::unstable) == unstable);
    const RegimeReport r = classify_regime(RegimeInputs{in.coupling, in.kappa, in.mech_frequency, in.mech_linewidth, 76, in.detuning});
    CHECK((r.regime == Regime::unstable) == unstable);
    CHECK(r.near_boundary == Regime::unstable);
  }
  CHECK_THROWS_AS(instability_threshold(1.0, base.kappa, base.mech_frequency), InvariantError);
}

TEST_CASE("lower branch reaches zero just below the threshold") {
  const EigenInputs base = paper_inputs(0.0);
  const double gc = instability_threshold(base.detuning, base.kappa, base.mech_frequency);
  CHECK(exact_mech_frequencies(gc, base.kappa, base.mech_frequency).minus == 0.0);
  CHECK(exact_mech_frequencies(0.99 * gc, base.kappa, base.mech_frequency).minus > 0.0);
  EigenInputs in = base;
  in.coupling = 0.999 * gc;
  EigenSolution s = eigenvalues_numeric(in);
  CHECK(s.omega_minus < 0.05 * base.mech_frequency);
}

TEST_CASE("blue-detuned drive goes unstable above C = 1") {
  EigenInputs in = paper_inputs(0.0, +1.0);
  const double g_c1 = std::sqrt(in.kappa * in.mech_linewidth / 4);
  in.coupling = std::sqrt(10.0) * g_c1;
  CHECK(eigenvalues_numeric(in).stability == Stability::unstable);
  in.coupling = std::sqrt(0.1) * g_c1;
  CHECK(eigenvalues_numeric(in).stability == Stability::stable);
  const RegimeReport r = classify_regime(RegimeInputs{std::sqrt(10.0) * g_c1, in.kappa, in.mech_frequency, in.mech_linewidth, 76, in.detuning});
  CHECK(r.regime == Regime::unstable);
  CHECK(std::isnan(r.critical_coupling));
  const RegimeReport off = classify_regime(RegimeInputs{1e3, in.kappa, in.mech_frequency, in.mech_linewidth, 76, -0.8 * in.mech_frequency});
  CHECK(off.regime == Regime::off_sideband);
  CHECK_FALSE(off.at_red_sideband);
}

TEST_CASE("strong-coupling splitting approximation") {
  const double k = hz_to_rad(1.2e6), W = hz_to_rad(9.696e6);
  CHECK(splitting_approx(0.2 * k, k) == 0.0);
  CHECK(splitting_approx(0.25 * k, k) == 0.0);
  CHECK_THAT(splitting_approx(k, k), WithinRel(2 * std::sqrt(k * k - k * k / 16), 1e-15));
  // agrees with the exact frequencies while g << Omega, not in the ultrastrong regime
  const double small = std::abs(exact_mech_frequencies(k, k, W).splitting() / splitting_approx(k, k) - 1);
  const double large = std::abs(exact_mech_frequencies(hz_to_rad(3.83e6), k, W).splitting() /
                                    splitting_approx(hz_to_rad(3.83e6), k) - 1);
  CHECK(small < 0.01);
  CHECK(large > 0.1);
  CHECK_THAT(rad_to_hz(exact_mech_frequencies(hz_to_rad(3.83e6), k, W).plus), WithinRel(12.9602e6, 1e-4));
  CHECK_THAT(rad_to_hz(exact_mech_frequencies(hz_to_rad(3.83e6), k, W).minus), WithinRel(4.4586e6, 1e-4));
  CHECK_THROWS_AS(splitting_approx(-1.0, k), InvariantError);
}

TEST_CASE("threshold ladder matches the frozen oracle") {
  const nlohmann::json j = ladder();
  const OptomechSystem sys = fixtures::paper_system();
  const double g0 = sys.fundamental().g0(), k = sys.cavity().kappa(), G = sys.fundamental().linewidth();
  const double W = sys.fundamental().frequency();
  CHECK_THAT(critical_photon_number(sys), WithinRel(j["photon_number_critical"].get<double>(), 1e-12));
  CHECK_THAT(rad_to_hz(sys.kerr_per_photon()), WithinRel(j["kerr_per_photon_hz"].get<double>(), 1e-12));
  CHECK_THAT(k * G / (4 * g0 * g0), WithinRel(j["photon_number_c1"].get<double>(), 1e-12));
  CHECK_THAT(76 * k * G / (4 * g0 * g0), WithinRel(j["photon_number_cq1"].get<double>(), 1e-12));
  CHECK_THAT(k * k / (16 * g0 * g0), WithinRel(j["photon_number_strong"].get<double>(), 1e-12));
  const double onset = ultrastrong_onset_coupling(k, W);
  CHECK_THAT(onset * onset / (g0 * g0), WithinRel(j["photon_number_ultrastrong"].get<double>(), 1e-9));
}

TEST_CASE("regime labels along the device path") {
  const OptomechSystem sys = fixtures::paper_system();
  auto at = [&](double n) { return classify_regime(sys, DriveState::red_sideband(sys, n)).regime; };
  CHECK(at(1e2) == Regime::sub_cooperative);
  CHECK(at(1e3) == Regime::weak);
  CHECK(at(1e5) == Regime::quantum_enabled);
  CHECK(at(1e7) == Regime::strong);
  CHECK(at(1e8) == Regime::ultrastrong);
  CHECK(at(5.26e8) == Regime::ultrastrong);
  CHECK(at(9e8) == Regime::unstable);

  const RegimeReport near = classify_regime(sys, DriveState::red_sideband(sys, 3e6));
  CHECK(near.regime == Regime::quantum_enabled);
  CHECK(near.near_boundary == Regime::strong);
  const RegimeReport mid = classify_regime(sys, DriveState::red_sideband(sys, 1e5));
  CHECK_FALSE(mid.near_boundary.has_value());
  CHECK_THAT(mid.cooperativity, WithinRel(1e5 / 333.46480691311984, 1e-9));
}

TEST_CASE("device trajectory is monotone and carries the crossings") {
  const OptomechSystem sys = fixtures::paper_system();
  const std::vector<TrajectoryRow> rows = device_trajectory(sys, 1.0, 1e9, 37);
  REQUIRE(rows.size() == 37 + 5);
  std::vector<std::string_view> events;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i > 0) {
      CHECK(rows[i].photon_number >= rows[i - 1].photon_number);
      CHECK(static_cast<int>(rows[i].report.regime) >= static_cast<int>(rows[i - 1].report.regime));
    }
    if (!rows[i].event.empty()) events.push_back(rows[i].event);
    CHECK(rows[i].report.regime != Regime::off_sideband);
  }
  CHECK(events == std::vector<std::string_view>{"C=1", "Cq=1", "4g=kappa", "Omega_s=Omega/5", "instability"});
  for (const TrajectoryRow& r : rows) {
    if (r.event == "C=1") CHECK_THAT(r.report.cooperativity, WithinRel(1.0, 1e-12));
    if (r.event == "Cq=1") CHECK_THAT(r.report.quantum_cooperativity, WithinRel(1.0, 1e-12));
    if (r.event == "4g=kappa") CHECK_THAT(r.report.strong_ratio, WithinRel(1.0, 1e-12));
    if (r.event == "Omega_s=Omega/5") CHECK_THAT(r.report.splitting_ratio, WithinRel(0.2, 1e-9));
    if (r.event == "instability") CHECK_THAT(r.report.critical_ratio, WithinRel(1.0, 1e-12));
  }
  CHECK(rows.front().report.regime == Regime::sub_cooperative);
  CHECK(rows.back().report.regime == Regime::unstable);
  CHECK_THROWS_AS(device_trajectory(sys, 0.0, 1.0, 3), InvariantError);
}

TEST_CASE("regime boundaries match the frozen diagram") {
  const fixtures::Csv golden = fixtures::read_csv(fixtures::data_path("golden/fig1_boundaries.csv"));
  const std::vector<BoundaryRow> rows = regime_boundaries(1e-3, 1.0, golden.rows.size());
  REQUIRE(rows.size() == 61);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK_THAT(rows[i].kappa_over_omega, WithinRel(golden.num(i, 0), 1e-12));
    CHECK_THAT(rows[i].strong, WithinRel(golden.num(i, 1), 1e-12));
    if (golden.rows[i][2] == "nan") {
      CHECK(std::isnan(rows[i].ultrastrong));
    } else {
      CHECK_THAT(rows[i].ultrastrong, WithinRel(golden.num(i, 2), 1e-9));
    }
    CHECK_THAT(rows[i].stability, WithinRel(golden.num(i, 3), 1e-12));
    if (i > 0) CHECK(rows[i].stability > rows[i - 1].stability);
  }
  CHECK_THAT(rows.front().stability, WithinAbs(0.5, 1e-6));
  CHECK(rows.front().strong < rows.front().ultrastrong);
  CHECK(rows.front().ultrastrong < rows.front().stability);
}

TEST_CASE("eigenfrequency sweep matches the frozen curve") {
  const fixtures::Csv golden = fixtures::read_csv(fixtures::data_path("golden/fig3b_eigen.csv"));
  REQUIRE(golden.rows.size() == 481);
  const double W = hz_to_rad(9.696e6);
  for (std::size_t i = 0; i < golden.rows.size(); ++i) {
    const EigenInputs in = paper_inputs(golden.num(i, 0));
    const EigenSolution s = eigenvalues_numeric(in);
    CAPTURE(golden.num(i, 0));
    CHECK_THAT(s.omega_plus, WithinAbs(hz_to_rad(golden.num(i, 1)), 1e-9 * W));
    CHECK_THAT(s.omega_minus, WithinAbs(hz_to_rad(golden.num(i, 2)), 1e-9 * W));
    CHECK_THAT(splitting_approx(in.coupling, in.kappa), WithinAbs(hz_to_rad(golden.num(i, 4)), 1e-9 * W));
    CHECK(s.stable() == (golden.rows[i][5] == "true"));
  }
}

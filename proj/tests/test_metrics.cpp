#include <gtest/gtest.h>

#include <random>

#include "cpvsoil/cell_model.hpp"
#include "cpvsoil/error.hpp"
#include "cpvsoil/metrics.hpp"
#include "support.hpp"

using namespace cpvsoil;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no cpvsoil::Error thrown";
  return ErrorKind::IoError;
}

Spectrum tr(std::vector<double> wl, std::vector<double> v) {
  return Spectrum(std::move(wl), std::move(v), SpectrumKind::Transmittance);
}

Spectrum flat_tau(double c, double lo = 280, double hi = 4000) {
  return Spectrum::constant(c, lo, hi, SpectrumKind::Transmittance);
}

const CellModel& toy() {
  static const CellModel cell = load_cell(test::data_path("cells/toy_2j.json"));
  return cell;
}

const CellModel& boxcar3j() {
  static const CellModel cell = load_cell(test::data_path("cells/boxcar_3j.json"));
  return cell;
}

const Spectrum toy_e = Spectrum::constant(1.0, 300, 900, SpectrumKind::Irradiance);
const Spectrum toy_tau = tr({300, 900}, {0.5, 1.0});

}  // namespace

TEST(SoilingTransmittance, SpecExamples) {
  auto half = soiling_transmittance(flat_tau(0.45, 300, 2000), flat_tau(0.9, 300, 2000));
  for (double v : half.tau.values()) EXPECT_DOUBLE_EQ(v, 0.5);

  Spectrum scan = tr({300, 500, 2000}, {0.3, 0.7, 0.9});
  auto same = soiling_transmittance(scan, scan);
  for (double v : same.tau.values()) EXPECT_EQ(v, 1.0);
  EXPECT_EQ(same.noisy_samples, 0u);

  auto line = soiling_transmittance(tr({300, 900}, {0.45, 0.90}), flat_tau(0.9, 300, 900));
  EXPECT_DOUBLE_EQ(line.tau.value_at(300), 0.5);
  EXPECT_DOUBLE_EQ(line.tau.value_at(900), 1.0);
  EXPECT_NEAR(line.tau.value_at(600), 0.75, 1e-15);
}

TEST(SoilingTransmittance, NoiseAboveOneIsFlaggedThenClamped) {
  Spectrum soiled = tr({300, 400, 500, 600}, {0.91, 0.95, 0.90, 0.5});
  Spectrum control = tr({300, 400, 500, 600}, {0.90, 0.90, 0.90, 0.9});
  auto t = soiling_transmittance(soiled, control);
  EXPECT_EQ(t.noisy_samples, 1u);    // 1.0111
  EXPECT_EQ(t.clamped_samples, 1u);  // 1.0556
  EXPECT_DOUBLE_EQ(t.tau.values()[1], 1.02);
  EXPECT_DOUBLE_EQ(t.tau.values()[0], 0.91 / 0.90);
}

TEST(SoilingTransmittance, ControlFloor) {
  Spectrum control = tr({300, 400, 500}, {0.9, 0.04, 0.9});
  EXPECT_EQ(kind_of([&] { soiling_transmittance(flat_tau(0.5, 300, 500), control); }),
            ErrorKind::ControlBelowFloor);
  EXPECT_NO_THROW(soiling_transmittance(flat_tau(0.04, 300, 500), flat_tau(0.05, 300, 500)));
}

TEST(Indexes, ToyOracle) {
  // Hand integrals: clean top 400, mid 200; soiled top 266.67, mid 183.33.
  EXPECT_NEAR(sratio(toy_e, toy(), toy_tau), 183.33333333333334 / 200, 1e-12);
  EXPECT_NEAR(bsratio(toy_e, toy(), toy_tau), 0.75, 1e-12);
  EXPECT_NEAR(ssratio(toy_e, toy(), toy_tau), (183.33333333333334 / 200) / 0.75, 1e-12);
  EXPECT_NEAR(smr(toy_e, toy()), 1.0, 1e-15);
  EXPECT_NEAR(smr(toy_e, toy(), toy_tau), (266.6666666666667 / 183.33333333333334) / 2, 1e-12);
  EXPECT_NEAR(smratio(toy_e, toy(), toy_tau), 0.72727272727272727, 1e-12);
  EXPECT_NEAR(ast(toy_tau, Waveband("top", 300, 700)), 0.6666666666666666, 1e-12);
  EXPECT_NEAR(ast(toy_tau, Waveband("MJ", 300, 900)), 0.75, 1e-12);
}

TEST(Indexes, RoundedToyValues) {
  IndexReport r = index_report(toy_e, toy(), toy_tau);
  EXPECT_NEAR(r.sratio, 0.91667, 1e-4);
  EXPECT_NEAR(r.bsratio, 0.75, 1e-4);
  EXPECT_NEAR(r.ssratio, 1.2222, 1e-4);
  EXPECT_NEAR(r.smratio, 0.7273, 1e-4);
  EXPECT_NEAR(r.ast_of("MJ"), 0.75, 1e-4);
  EXPECT_EQ(r.limiting_cleaned, "mid");
  EXPECT_EQ(r.limiting_soiled, "mid");
}

TEST(Indexes, BsratioTrapezoidExample) {
  // E = 1 on [300, 1810]; tau {0.6, 0.8, 1.0} at {300, 1055, 1810}: 1208 / 1510.
  auto js = boxcar3j().junctions();
  CellModel cell("flat", std::vector<Junction>(js.begin(), js.end()),
                 Spectrum::constant(1.0, 300, 1810, SpectrumKind::Irradiance));
  Spectrum e = Spectrum::constant(1.0, 300, 1810, SpectrumKind::Irradiance);
  EXPECT_NEAR(bsratio(e, cell, tr({300, 1055, 1810}, {0.6, 0.8, 1.0})), 0.8, 1e-14);
}

TEST(Indexes, ReferenceSpectrumGivesUnitSmr) {
  EXPECT_EQ(smr(boxcar3j().reference_spectrum(), boxcar3j()), 1.0);
  CellModel eqe = load_cell(test::data_path("cells/gainp_gainas_ge_3j.json"));
  EXPECT_EQ(smr(eqe.reference_spectrum(), eqe), 1.0);
}

TEST(Indexes, FlatTauIsNeutral) {
  const Spectrum& e = boxcar3j().reference_spectrum();
  for (double c : {0.3, 0.8, 1.0}) {
    // A flat tau on a dense grid that does not match the spectrum's.
    std::vector<double> wl, v;
    for (double l = 290.25; l < 3990; l += 0.7) {
      wl.push_back(l);
      v.push_back(c);
    }
    for (const Spectrum& tau : {flat_tau(c), tr(wl, v)}) {
      IndexReport r = index_report(e, boxcar3j(), tau);
      EXPECT_EQ(r.ssratio, 1.0);
      EXPECT_EQ(r.smratio, 1.0);
      EXPECT_EQ(r.smr_soiled, r.smr_cleaned);
      EXPECT_NEAR(r.sratio, c, 1e-12 * c);
      EXPECT_NEAR(r.bsratio, c, 1e-12 * c);
      for (const auto& [band, a] : r.ast) EXPECT_NEAR(a, c, 1e-12 * c) << band;
      EXPECT_EQ(ssratio(e, boxcar3j(), tau), 1.0);
      EXPECT_EQ(smratio(e, boxcar3j(), tau), 1.0);
      EXPECT_EQ(smr(e, boxcar3j(), tau), smr(e, boxcar3j()));
    }
  }
}

TEST(Indexes, StandaloneFunctionsAgreeWithReport) {
  Spectrum tau = test::sample([](double l) { return std::exp(-0.2 * std::pow(550 / l, 1.3)); },
                              300, 1900, 3.0, SpectrumKind::Transmittance);
  const Spectrum& e = boxcar3j().reference_spectrum();
  IndexReport r = index_report(e, boxcar3j(), tau);
  EXPECT_EQ(r.sratio, sratio(e, boxcar3j(), tau));
  EXPECT_EQ(r.bsratio, bsratio(e, boxcar3j(), tau));
  EXPECT_EQ(r.ssratio, ssratio(e, boxcar3j(), tau));
  EXPECT_EQ(r.smratio, smratio(e, boxcar3j(), tau));
  EXPECT_EQ(r.smr_soiled, smr(e, boxcar3j(), tau));
  EXPECT_EQ(r.smr_cleaned, smr(e, boxcar3j()));
}

TEST(Indexes, IdentitiesOnRandomInputs) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> wl, ev, tv;
    for (double l = 300; l <= 900; l += 5 + 10 * u(rng)) {
      wl.push_back(l);
      ev.push_back(0.2 + u(rng));
      tv.push_back(0.3 + 0.7 * u(rng));
    }
    wl.push_back(900.5);
    ev.push_back(1.0);
    tv.push_back(1.0);
    Spectrum e(wl, ev, SpectrumKind::Irradiance);
    Spectrum tau(wl, tv, SpectrumKind::Transmittance);
    IndexReport r = index_report(e, toy(), tau);
    EXPECT_TRUE(test::rel_close(r.sratio, r.bsratio * r.ssratio, 1e-12));
    EXPECT_TRUE(test::rel_close(r.smratio, r.smr_soiled / r.smr_cleaned, 1e-12));
    EXPECT_GT(r.sratio, 0.0);
    for (const auto& [band, a] : r.ast) EXPECT_LE(a, 1.0 + kTransmittanceTolerance);
  }
}

TEST(Indexes, BlueHeavyTauOrdersBandsAndLowersSmratio) {
  for (double k : {0.01, 0.1, 0.4}) {
    Spectrum tau = test::sample([k](double l) { return std::exp(-k * std::pow(550 / l, 1.2)); },
                                300, 1810, 2.0, SpectrumKind::Transmittance);
    const CellModel& cell = boxcar3j();
    double top = ast(tau, cell.junction("top").band);
    double mid = ast(tau, cell.junction("mid").band);
    double bot = ast(tau, cell.junction("bot").band);
    EXPECT_LT(top, mid);
    EXPECT_LT(mid, bot);
    EXPECT_LT(smratio(cell.reference_spectrum(), cell, tau), 1.0);
  }
}

TEST(Indexes, SsratioAboveOneWhenTheLimitingJunctionIsSpared) {
  // Step tau hitting only the top band of a mid-limited toy: the broadband
  // loss is real but the stack current does not move.
  Spectrum step = tr({300, 699.999, 700, 900}, {0.9, 0.9, 1.0, 1.0});
  IndexReport r = index_report(toy_e, toy(), step);
  // Fine-grid oracle on the piecewise-linear step.
  test::Fn f = test::as_function(step);
  double top = test::midpoint_integral(f, 300, 700, 0.001);
  double mid = test::midpoint_integral(f, 700, 900, 0.001);
  double oracle_sratio = std::min(top, mid) / 200.0;
  double oracle_bsratio = (top + mid) / 600.0;
  EXPECT_NEAR(r.sratio, oracle_sratio, 1e-7);
  EXPECT_NEAR(r.bsratio, oracle_bsratio, 1e-7);
  EXPECT_GT(r.ssratio, 1.0);
  EXPECT_EQ(r.limiting_soiled, "mid");
}

TEST(Indexes, Errors) {
  EXPECT_EQ(kind_of([&] { ast(toy_tau, Waveband("x", 250, 900)); }), ErrorKind::BandOutOfSupport);
  EXPECT_EQ(kind_of([&] { ast(toy_e, Waveband("x", 300, 900)); }), ErrorKind::UnitMismatch);
  EXPECT_EQ(kind_of([&] { index_report(toy_e, toy(), toy_e); }), ErrorKind::UnitMismatch);
  EXPECT_EQ(kind_of([&] { sratio(toy_e, toy(), flat_tau(0.5, 400, 900)); }),
            ErrorKind::BandOutOfSupport);
  EXPECT_EQ(kind_of([&] { smr(toy_e, toy(), JunctionPair{"top", "bot"}); }),
            ErrorKind::UnknownJunction);
  Spectrum dark = Spectrum::constant(0.0, 300, 900, SpectrumKind::Irradiance);
  EXPECT_EQ(kind_of([&] { sratio(dark, toy(), toy_tau); }), ErrorKind::ZeroCleanCurrent);
  EXPECT_EQ(kind_of([&] { bsratio(dark, toy(), toy_tau); }), ErrorKind::ZeroDenominator);
  EXPECT_EQ(kind_of([&] { smr(dark, toy()); }), ErrorKind::ZeroCurrent);
  EXPECT_EQ(kind_of([&] { smratio(toy_e, toy(), flat_tau(0.0, 300, 900)); }),
            ErrorKind::ZeroCurrent);
}

TEST(Indexes, CurrentTotalsSumOverRecords) {
  CurrentTotals totals(toy(), toy_tau);
  totals.add(toy_e);
  totals.add(toy_e.scaled(3.0));
  EXPECT_EQ(totals.records(), 2u);
  EXPECT_NEAR(totals.clean()[1], 800.0, 1e-9);
  EXPECT_NEAR(totals.soiled()[1], 4 * 183.33333333333334, 1e-9);
  IndexReport daily = totals.report();
  IndexReport single = index_report(toy_e, toy(), toy_tau);
  // Scaling every record by a constant leaves the ratios where they were.
  EXPECT_NEAR(daily.sratio, single.sratio, 1e-14);
  EXPECT_NEAR(daily.smratio, single.smratio, 1e-14);

  CurrentTotals empty(toy(), toy_tau);
  EXPECT_EQ(kind_of([&] { empty.report(); }), ErrorKind::NoSpectralRecords);
}

TEST(IndexReportOutput, JsonAndCsvShape) {
  IndexReport r = index_report(toy_e, toy(), toy_tau);
  auto j = to_json(r);
  std::vector<std::string> keys;
  for (const auto& [k, v] : j.items()) keys.push_back(k);
  std::vector<std::string> want{"sratio",        "bsratio",         "ssratio",
                                "smr_cleaned",   "smr_soiled",      "smratio",
                                "ast_top",       "ast_mid",         "ast_MJ",
                                "limiting_cleaned", "limiting_soiled",
                                "limiting_cleaned_tie", "limiting_soiled_tie"};
  EXPECT_EQ(keys, want);
  EXPECT_EQ(csv_columns(r), want);
  std::string csv = to_csv(r);
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "sratio,bsratio,ssratio,smr_cleaned,smr_soiled,smratio,ast_top,ast_mid,ast_MJ,"
            "limiting_cleaned,limiting_soiled,limiting_cleaned_tie,limiting_soiled_tie");
  EXPECT_NE(csv.find(",mid,mid,false,false\n"), std::string::npos);
}

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "cpvsoil/error.hpp"
#include "cpvsoil/spectrum.hpp"
#include "support.hpp"

using namespace cpvsoil;
using cpvsoil::test::midpoint_integral;
using cpvsoil::test::sample;

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

Spectrum irr(std::vector<double> wl, std::vector<double> v) {
  return Spectrum(std::move(wl), std::move(v), SpectrumKind::Irradiance);
}

}  // namespace

TEST(Spectrum, RejectsMalformedGrids) {
  EXPECT_EQ(kind_of([] { irr({300}, {1}); }), ErrorKind::InvalidSpectrum);
  EXPECT_EQ(kind_of([] { irr({300, 300}, {1, 1}); }), ErrorKind::InvalidSpectrum);
  EXPECT_EQ(kind_of([] { irr({400, 300}, {1, 1}); }), ErrorKind::InvalidSpectrum);
  EXPECT_EQ(kind_of([] { irr({300, 400}, {1}); }), ErrorKind::InvalidSpectrum);
  EXPECT_EQ(kind_of([] { irr({300, 400}, {1, NAN}); }), ErrorKind::InvalidSpectrum);
  EXPECT_EQ(kind_of([] { irr({300, 400}, {1, INFINITY}); }), ErrorKind::InvalidSpectrum);
}

TEST(Spectrum, TransmittanceBounds) {
  EXPECT_NO_THROW(Spectrum({300, 400}, {0.0, 1.02}, SpectrumKind::Transmittance));
  EXPECT_EQ(kind_of([] { Spectrum({300, 400}, {0.5, 1.03}, SpectrumKind::Transmittance); }),
            ErrorKind::InvalidSpectrum);
  EXPECT_EQ(kind_of([] { Spectrum({300, 400}, {-0.01, 1}, SpectrumKind::Transmittance); }),
            ErrorKind::InvalidSpectrum);

  auto c = Spectrum::clamped_transmittance({300, 400, 500}, {0.9, 1.05, 1.01});
  EXPECT_EQ(c.clamped_samples, 1u);
  EXPECT_DOUBLE_EQ(c.spectrum.values()[1], 1.02);
  EXPECT_DOUBLE_EQ(c.spectrum.values()[2], 1.01);
}

TEST(Waveband, Validates) {
  EXPECT_EQ(kind_of([] { Waveband("x", 400, 300); }), ErrorKind::InvalidArgument);
  EXPECT_EQ(kind_of([] { Waveband("x", 0, 300); }), ErrorKind::InvalidArgument);
  Waveband b("top", 300, 720);
  EXPECT_DOUBLE_EQ(b.width(), 420);
}

TEST(Resample, ConstantFunction) {
  Spectrum s = irr({300, 400}, {1, 1});
  std::vector<double> grid{300, 350, 400};
  Spectrum r = resample(s, grid);
  for (double v : r.values()) EXPECT_EQ(v, 1.0);
}

TEST(Resample, LinearInterpolationByHand) {
  Spectrum s = irr({300, 500}, {0, 1});
  std::vector<double> grid{400};
  // A single point cannot form a spectrum; value_at covers the one-point case.
  EXPECT_DOUBLE_EQ(s.value_at(400), 0.5);
  std::vector<double> grid2{400, 450};
  Spectrum r = resample(s, grid2);
  EXPECT_DOUBLE_EQ(r.values()[0], 0.5);
  EXPECT_DOUBLE_EQ(r.values()[1], 0.75);
}

TEST(Resample, NeverExtrapolates) {
  Spectrum s = irr({300, 900}, {1, 1});
  std::vector<double> grid{250, 300, 400};
  EXPECT_EQ(kind_of([&] { resample(s, grid); }), ErrorKind::GridOutOfSupport);
  std::vector<double> high{800, 900.0001};
  EXPECT_EQ(kind_of([&] { resample(s, high); }), ErrorKind::GridOutOfSupport);
  EXPECT_EQ(kind_of([&] { s.value_at(901); }), ErrorKind::GridOutOfSupport);
}

TEST(Resample, ExactAtSamplesAndIdempotent) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  std::vector<double> wl, v;
  for (int i = 0; i < 50; ++i) {
    wl.push_back(300 + 13.7 * i);
    v.push_back(u(rng));
  }
  Spectrum s = irr(wl, v);
  Spectrum once = resample(s, s.wavelengths());
  EXPECT_EQ(once, s);
  std::vector<double> sub(wl.begin() + 5, wl.begin() + 20);
  Spectrum r = resample(s, sub);
  for (std::size_t i = 0; i < sub.size(); ++i) EXPECT_EQ(r.values()[i], v[i + 5]);
}

TEST(Integrate, SpecExamples) {
  EXPECT_DOUBLE_EQ(integrate(irr({300, 400}, {1, 1}), Waveband("b", 300, 400)), 100.0);
  EXPECT_DOUBLE_EQ(integrate(irr({300, 400, 500}, {0, 1, 0}), Waveband("b", 300, 500)), 100.0);
  EXPECT_DOUBLE_EQ(integrate(irr({300, 900}, {0.5, 1.0}), Waveband("b", 300, 900)), 450.0);
}

TEST(Integrate, InsertsInterpolatedEndpoints) {
  // Line 0.5 -> 1.0 on [300, 900]; exact on sub-bands that cut between samples.
  Spectrum line = irr({300, 900}, {0.5, 1.0});
  EXPECT_NEAR(integrate(line, 300, 700), 266.6666666666667, 1e-10);
  EXPECT_NEAR(integrate(line, 700, 900), 183.33333333333334, 1e-10);
  Spectrum tri = irr({300, 400, 500}, {0, 1, 0});
  // [350, 450]: two trapezoids 0.5..1 and 1..0.5, each 50 nm wide.
  EXPECT_DOUBLE_EQ(integrate(tri, 350, 450), 75.0);
  // Band between two samples.
  EXPECT_DOUBLE_EQ(integrate(tri, 310, 330), 20 * 0.2);
}

TEST(Integrate, BandOutOfSupport) {
  Spectrum s = irr({300, 900}, {1, 1});
  EXPECT_EQ(kind_of([&] { integrate(s, Waveband("b", 299, 900)); }),
            ErrorKind::BandOutOfSupport);
  EXPECT_EQ(kind_of([&] { integrate(s, Waveband("b", 300, 901)); }),
            ErrorKind::BandOutOfSupport);
}

TEST(Integrate, ExactForPiecewiseLinearData) {
  // Oracle: midpoint sum of the piecewise-linear interpolant, which is exact
  // for lines per segment up to rounding.
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  std::vector<double> wl{300, 317, 350, 401.5, 460, 500};
  std::vector<double> v;
  for (std::size_t i = 0; i < wl.size(); ++i) v.push_back(u(rng));
  Spectrum s = irr(wl, v);
  double oracle = midpoint_integral(test::as_function(s), 320, 480, 0.01);
  EXPECT_NEAR(integrate(s, 320, 480), oracle, 1e-9 * oracle);
}

TEST(Integrate, LinearInTheIntegrand) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 5.0);
  std::vector<double> wl, a, b, mix;
  const double alpha = 0.37, beta = 2.9;
  for (int i = 0; i < 200; ++i) {
    wl.push_back(300 + 7.5 * i);
    a.push_back(u(rng));
    b.push_back(u(rng));
    mix.push_back(alpha * a.back() + beta * b.back());
  }
  Waveband band("b", 333.3, 1700.1);
  double lhs = integrate(irr(wl, mix), band);
  double rhs = alpha * integrate(irr(wl, a), band) + beta * integrate(irr(wl, b), band);
  EXPECT_TRUE(test::rel_close(lhs, rhs, 1e-12)) << lhs << " vs " << rhs;
}

TEST(Integrate, AdditiveOverAdjacentBands) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 5.0);
  std::vector<double> wl, v;
  for (int i = 0; i < 400; ++i) {
    wl.push_back(280 + 4.0 * i);
    v.push_back(u(rng));
  }
  Spectrum s = irr(wl, v);
  for (auto [l1, l2, l3] : {std::tuple{300.0, 720.0, 1810.0}, std::tuple{300.0, 301.3, 900.0},
                            std::tuple{720.0, 920.0, 1810.0}, std::tuple{281.0, 1000.5, 1871.0}}) {
    double whole = integrate(s, l1, l3);
    double parts = integrate(s, l1, l2) + integrate(s, l2, l3);
    EXPECT_TRUE(test::rel_close(whole, parts, 1e-12)) << whole << " vs " << parts;
  }
}

TEST(Integrate, MidpointOracleOnSmoothSpectra) {
  // Sampled at 0.1 nm the trapezoid discretisation error is far below 1e-6.
  const std::vector<std::pair<const char*, test::Fn>> fns{
      {"planck-like", [](double l) {
         double x = l * 1e-9;
         return 1e-30 / (std::pow(x, 5) * (std::exp(1.4388e-2 / (x * 5800)) - 1));
       }},
      {"gaussian", [](double l) { return std::exp(-std::pow((l - 800) / 300, 2)); }},
      {"ripple", [](double l) { return 1.2 + 0.3 * std::sin(l / 40.0); }}};
  for (const auto& [name, f] : fns) {
    Spectrum s = sample(f, 280, 2000, 0.1, SpectrumKind::Irradiance);
    for (auto [lo, hi] : {std::pair{300.0, 1810.0}, std::pair{300.0, 720.0},
                          std::pair{720.0, 920.0}, std::pair{920.0, 1810.0}}) {
      double oracle = midpoint_integral(f, lo, hi, 0.01);
      double got = integrate(s, lo, hi);
      EXPECT_TRUE(test::rel_close(got, oracle, 1e-6)) << name << " [" << lo << ", " << hi
                                                      << "]: " << got << " vs " << oracle;
    }
  }
}

TEST(Integrate, MidpointOracleOnInterpolant) {
  // On a coarse grid the trapezoid rule is exact for the linear interpolant.
  auto f = [](double l) { return 1.0 + 0.5 * std::sin(l / 25.0) + 1e-4 * l; };
  Spectrum s = sample(f, 280, 2000, 5.0, SpectrumKind::Irradiance);
  auto g = test::as_function(s);
  for (auto [lo, hi] : {std::pair{300.0, 1810.0}, std::pair{300.0, 720.0}, std::pair{720.0, 920.0},
                        std::pair{920.0, 1810.0}}) {
    double oracle = midpoint_integral(g, lo, hi, 0.01);
    EXPECT_TRUE(test::rel_close(integrate(s, lo, hi), oracle, 1e-6)) << lo << " " << hi;
  }
}

TEST(PointwiseProduct, SpecExamples) {
  Spectrum a = Spectrum::constant(1.0, 300, 900, SpectrumKind::Transmittance);
  Spectrum b = irr({400, 600, 1000}, {2, 3, 5});
  Spectrum p = pointwise_product(a, b);
  EXPECT_EQ(p.kind(), SpectrumKind::Irradiance);
  ASSERT_EQ(p.size(), 3u);
  EXPECT_EQ(p.wavelengths()[0], 400);
  EXPECT_EQ(p.wavelengths()[2], 900);
  EXPECT_DOUBLE_EQ(p.values()[1], 3.0);
  EXPECT_DOUBLE_EQ(p.values()[2], 4.5);

  Spectrum half = Spectrum::constant(0.5, 300, 900, SpectrumKind::Transmittance);
  Spectrum two = Spectrum::constant(2.0, 500, 1000, SpectrumKind::Irradiance);
  Spectrum one = pointwise_product(half, two);
  EXPECT_EQ(one.support_min(), 500);
  EXPECT_EQ(one.support_max(), 900);
  for (double v : one.values()) EXPECT_EQ(v, 1.0);

  Spectrum left = irr({300, 400}, {1, 1});
  Spectrum right = Spectrum::constant(1.0, 500, 600, SpectrumKind::Transmittance);
  EXPECT_EQ(kind_of([&] { pointwise_product(left, right); }), ErrorKind::NoOverlap);
}

TEST(PointwiseProduct, UnionGridKeepsEverySample) {
  Spectrum a = irr({300, 310, 320, 330}, {1, 2, 3, 4});
  Spectrum b = Spectrum({305, 315, 325}, {0.5, 0.6, 0.7}, SpectrumKind::Transmittance);
  Spectrum p = pointwise_product(a, b);
  std::vector<double> want{305, 310, 315, 320, 325};
  ASSERT_EQ(p.size(), want.size());
  for (std::size_t i = 0; i < want.size(); ++i) {
    EXPECT_EQ(p.wavelengths()[i], want[i]);
    double oracle = test::lerp_at({300, 310, 320, 330}, {1, 2, 3, 4}, want[i]) *
                    test::lerp_at({305, 315, 325}, {0.5, 0.6, 0.7}, want[i]);
    EXPECT_DOUBLE_EQ(p.values()[i], oracle);
  }
}

TEST(PointwiseProduct, ThreeFactorsOnTheJointGrid) {
  Spectrum e = irr({300, 500, 700}, {1, 3, 1});
  Spectrum t = Spectrum({300, 400, 700}, {0.5, 1.0, 1.0}, SpectrumKind::Transmittance);
  Spectrum sr = Spectrum({300, 600, 700}, {0.2, 0.5, 0.5}, SpectrumKind::SpectralResponse);
  Spectrum p = pointwise_product(e, t, sr);
  EXPECT_EQ(p.kind(), SpectrumKind::CurrentDensity);
  std::vector<double> want{300, 400, 500, 600, 700};
  ASSERT_EQ(p.size(), want.size());
  for (std::size_t i = 0; i < want.size(); ++i) {
    double x = want[i];
    double oracle = test::lerp_at({300, 500, 700}, {1, 3, 1}, x) *
                    test::lerp_at({300, 400, 700}, {0.5, 1.0, 1.0}, x) *
                    test::lerp_at({300, 600, 700}, {0.2, 0.5, 0.5}, x);
    EXPECT_DOUBLE_EQ(p.values()[i], oracle) << x;
  }
}

TEST(PointwiseProduct, UnitRules) {
  Spectrum e = irr({300, 400}, {1, 1});
  Spectrum t = Spectrum::constant(0.5, 300, 400, SpectrumKind::Transmittance);
  Spectrum sr = Spectrum::constant(0.5, 300, 400, SpectrumKind::SpectralResponse);
  EXPECT_EQ(pointwise_product(t, t).kind(), SpectrumKind::Transmittance);
  EXPECT_EQ(pointwise_product(sr, e).kind(), SpectrumKind::CurrentDensity);
  EXPECT_EQ(pointwise_product(t, sr).kind(), SpectrumKind::SpectralResponse);
  EXPECT_EQ(kind_of([&] { pointwise_product(e, e); }), ErrorKind::UnitMismatch);
  EXPECT_EQ(kind_of([&] { pointwise_product(sr, sr); }), ErrorKind::UnitMismatch);
}

TEST(SpectrumCsv, RoundTripIsExact) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> wl, v;
  for (int i = 0; i < 100; ++i) {
    wl.push_back(300 + 0.1 * i + 1e-7 * i);
    v.push_back(u(rng));
  }
  Spectrum s(wl, v, SpectrumKind::Transmittance);
  std::stringstream buf;
  write_spectrum_csv(buf, s);
  EXPECT_EQ(buf.str().rfind("# kind=Transmittance units=1\nwavelength_nm,value\n", 0), 0u);
  Spectrum back = read_spectrum_csv(buf, "buffer");
  EXPECT_EQ(back, s);
}

TEST(SpectrumCsv, RejectsBadInput) {
  auto parse = [](const std::string& text) {
    std::istringstream in(text);
    return read_spectrum_csv(in, "t");
  };
  EXPECT_EQ(kind_of([&] { parse("wavelength_nm,value\n300,1\n400,1\n"); }),
            ErrorKind::ParseError);
  EXPECT_EQ(kind_of([&] { parse("# kind=Irradiance units=W/m2/nm\nwl,v\n300,1\n400,1\n"); }),
            ErrorKind::ParseError);
  EXPECT_EQ(kind_of([&] { parse("# kind=Irradiance units=W/m2/nm\nwavelength_nm,value\n300,x\n"); }),
            ErrorKind::ParseError);
  EXPECT_EQ(kind_of([&] { parse("# kind=Irradiance units=A/W\nwavelength_nm,value\n300,1\n400,1\n"); }),
            ErrorKind::UnitMismatch);
  EXPECT_EQ(kind_of([&] { parse("# kind=Irradiance units=W/m2/nm\nwavelength_nm,value\n400,1\n300,1\n"); }),
            ErrorKind::InvalidSpectrum);
  EXPECT_EQ(kind_of([&] { read_spectrum_csv(std::filesystem::path("/nonexistent.csv")); }),
            ErrorKind::FileNotFound);
}

TEST(SpectrumCsv, BundledReferenceLoads) {
  Spectrum ref = read_spectrum_csv(test::data_path("reference/astm_g173_03_direct.csv"));
  EXPECT_EQ(ref.kind(), SpectrumKind::Irradiance);
  EXPECT_EQ(ref.size(), 2002u);
  EXPECT_EQ(ref.support_min(), 280.0);
  EXPECT_EQ(ref.support_max(), 4000.0);
  // Published broadband total of the direct+circumsolar table: about 900 W/m2.
  EXPECT_NEAR(integrate(ref, ref.support_min(), ref.support_max()), 900.1, 0.1);
}

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "morpho/lattice.hpp"
#include "morpho/rng.hpp"

using namespace morpho;

namespace {

// Direct zero-padded 3x3 mean, written cell by cell.
TrailField direct_convolution(const TrailField& f, double damping) {
  TrailField out(f.width(), f.height());
  for (int y = 0; y < f.height(); ++y)
    for (int x = 0; x < f.width(); ++x) {
      double rows[3];
      for (int dy = -1; dy <= 1; ++dy) {
        const double l = f.value_or_zero(x - 1, y + dy);
        const double c = f.value_or_zero(x, y + dy);
        const double r = f.value_or_zero(x + 1, y + dy);
        rows[dy + 1] = (l + c) + r;
      }
      out.deposit({x, y}, damping * (((rows[0] + rows[1]) + rows[2]) / 9.0));
    }
  return out;
}

TrailField random_field(int w, int h, Rng& rng, int border = 0) {
  TrailField f(w, h);
  for (int y = border; y < h - border; ++y)
    for (int x = border; x < w - border; ++x) f.deposit({x, y}, rng.uniform(0.0, 100.0));
  return f;
}

}  // namespace

TEST(Diffusion, UniformInteriorCellScalesByDamping) {
  TrailField f(7, 7);
  for (int y = 0; y < 7; ++y)
    for (int x = 0; x < 7; ++x) f.deposit({x, y}, 4.0);
  const TrailField g = diffuse_and_damp(f, 0.9);
  EXPECT_DOUBLE_EQ(g.value({3, 3}), 0.9 * 4.0);
}

TEST(Diffusion, InteriorImpulseSpreadsOverNeighbourhood) {
  TrailField f(9, 9);
  f.deposit({4, 4}, 9.0);
  const TrailField g = diffuse_and_damp(f, 0.9);
  for (int y = 0; y < 9; ++y)
    for (int x = 0; x < 9; ++x) {
      const bool near = std::abs(x - 4) <= 1 && std::abs(y - 4) <= 1;
      EXPECT_NEAR(g.value({x, y}), near ? 0.9 : 0.0, 1e-15) << x << "," << y;
    }
}

TEST(Diffusion, CornerImpulseLeaksOffLattice) {
  TrailField f(5, 5);
  f.deposit({0, 0}, 9.0);
  const TrailField g = diffuse_and_damp(f, 1.0);
  for (int y = 0; y < 5; ++y)
    for (int x = 0; x < 5; ++x) EXPECT_DOUBLE_EQ(g.value({x, y}), (x <= 1 && y <= 1) ? 1.0 : 0.0);
  EXPECT_DOUBLE_EQ(g.sum(), 4.0);
}

TEST(Diffusion, BitIdenticalToDirectConvolution) {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const int w = 1 + static_cast<int>(rng.below(40));
    const int h = 1 + static_cast<int>(rng.below(40));
    const double d = rng.uniform(0.5, 1.0);
    const TrailField f = random_field(w, h, rng);
    EXPECT_EQ(diffuse_and_damp(f, d), direct_convolution(f, d)) << w << "x" << h;
  }
}

TEST(Diffusion, InPlaceMatchesCopy) {
  Rng rng(12);
  TrailField f = random_field(30, 20, rng);
  const TrailField copy = diffuse_and_damp(f, 0.93);
  std::vector<double> scratch;
  diffuse_and_damp(f, 0.93, scratch);
  EXPECT_EQ(f, copy);
}

TEST(Diffusion, MassScalesByDampingForInteriorSupport) {
  Rng rng(13);
  for (int trial = 0; trial < 50; ++trial) {
    const double d = rng.uniform(0.1, 1.0);
    const TrailField f = random_field(25, 18, rng, 1);
    const double before = f.sum();
    const double after = diffuse_and_damp(f, d).sum();
    EXPECT_NEAR(after, d * before, 1e-9 * d * before);
  }
}

TEST(Diffusion, StaysNonNegative) {
  Rng rng(14);
  TrailField f = random_field(16, 16, rng);
  std::vector<double> scratch;
  for (int i = 0; i < 50; ++i) diffuse_and_damp(f, 0.9, scratch);
  for (double v : f.values()) EXPECT_GE(v, 0.0);
}

TEST(Diffusion, RejectsDampingOutsideUnitInterval) {
  TrailField f(3, 3);
  EXPECT_THROW(diffuse_and_damp(f, 0.0), ContractViolation);
  EXPECT_THROW(diffuse_and_damp(f, 1.1), ContractViolation);
}

TEST(Deposit, AddsAmount) {
  TrailField f(4, 4);
  f.deposit({1, 1}, 5.0);
  EXPECT_DOUBLE_EQ(f.value({1, 1}), 5.0);
  f.deposit({2, 2}, 2.5);
  f.deposit({2, 2}, 0.0);
  EXPECT_DOUBLE_EQ(f.value({2, 2}), 2.5);
  f.deposit({3, 3}, 5.0);
  f.deposit({3, 3}, 5.0);
  EXPECT_DOUBLE_EQ(f.value({3, 3}), 10.0);
}

TEST(Deposit, RejectsOutOfBoundsAndNegative) {
  TrailField f(4, 4);
  EXPECT_THROW(f.deposit({4, 0}, 1.0), ContractViolation);
  EXPECT_THROW(f.deposit({-1, 0}, 1.0), ContractViolation);
  EXPECT_THROW(f.deposit({0, 0}, -1.0), ContractViolation);
}

TEST(Projection, SingleSiteReadsMagnitude) {
  TrailField f(5, 5);
  const std::vector<Cell> sites{{2, 2}};
  project_attractant(f, sites, 10.0);
  EXPECT_DOUBLE_EQ(f.value({2, 2}), 10.0);
  EXPECT_DOUBLE_EQ(f.sum(), 10.0);
}

TEST(Projection, PatternRaisesEveryCellEqually) {
  TrailField f(6, 6);
  std::vector<Cell> sites;
  for (int y = 1; y < 5; ++y)
    for (int x = 1; x < 5; ++x) sites.push_back({x, y});
  project_attractant(f, sites, 3.0);
  for (Cell c : sites) EXPECT_DOUBLE_EQ(f.value(c), 3.0);
  EXPECT_DOUBLE_EQ(f.sum(), 3.0 * 16);
}

TEST(Projection, EmptySiteSetIsNoOp) {
  TrailField f(3, 3);
  project_attractant(f, {}, 10.0);
  EXPECT_DOUBLE_EQ(f.sum(), 0.0);
}

TEST(Projection, DisjointProjectionsCommute) {
  const std::vector<Cell> a{{0, 0}, {1, 2}}, b{{2, 2}, {3, 1}};
  TrailField f(4, 4), g(4, 4);
  project_attractant(f, a, 2.0);
  project_attractant(f, b, 7.0);
  project_attractant(g, b, 7.0);
  project_attractant(g, a, 2.0);
  EXPECT_EQ(f, g);
}

TEST(Illumination, WeightsExposedSensorCell) {
  TrailField f(10, 10);
  f.deposit({2, 2}, 8.0);
  f.deposit({5, 5}, 8.0);
  const IlluminationMask m = IlluminationMask::outside_window(10, 10, {5.5, 5.5}, 3, 0.1);
  EXPECT_DOUBLE_EQ(sample_weighted(f, {2, 2}, m), 0.8);
  EXPECT_DOUBLE_EQ(sample_weighted(f, {5, 5}, m), 8.0);
  EXPECT_DOUBLE_EQ(sample_weighted(f, {2, 2}, IlluminationMask::inactive()), 8.0);
  EXPECT_DOUBLE_EQ(sample_weighted(f, {-1, 3}, m), 0.0);
  EXPECT_DOUBLE_EQ(sample_weighted(f, {3, 10}, IlluminationMask::inactive()), 0.0);
}

TEST(Illumination, WindowIsUnlitSquare) {
  const IlluminationMask m = IlluminationMask::outside_window(100, 100, {50.0, 50.0}, 50, 0.1);
  int dark = 0;
  for (int y = 0; y < 100; ++y)
    for (int x = 0; x < 100; ++x) dark += m.lit(x, y) ? 0 : 1;
  EXPECT_EQ(dark, 50 * 50);
  EXPECT_FALSE(m.lit(25, 25));
  EXPECT_FALSE(m.lit(74, 74));
  EXPECT_TRUE(m.lit(24, 50));
  EXPECT_TRUE(m.lit(75, 50));
}

TEST(Illumination, RejectsBadWeight) {
  EXPECT_THROW(IlluminationMask::outside_window(10, 10, {5, 5}, 3, 0.0), ContractViolation);
  EXPECT_THROW(IlluminationMask::outside_window(10, 10, {5, 5}, 3, 1.5), ContractViolation);
}

TEST(Occupancy, SingleParticlePerCell) {
  OccupancyGrid g(3, 3);
  EXPECT_TRUE(g.free({1, 1}));
  g.place({1, 1}, 0);
  EXPECT_FALSE(g.free({1, 1}));
  EXPECT_EQ(g.at({1, 1}), 0);
  EXPECT_THROW(g.place({1, 1}, 1), ContractViolation);
  g.vacate({1, 1});
  EXPECT_TRUE(g.free({1, 1}));
}

TEST(Stimuli, ProgramEnforcesDurationAndOrder) {
  StimulusProgram prog;
  StimulusEvent e;
  e.start = 5;
  e.duration = 0;
  EXPECT_THROW(prog.add(e), ContractViolation);
  e.duration = 3;
  prog.add(e);
  e.start = 4;
  EXPECT_THROW(prog.add(e), ContractViolation);
}

TEST(Stimuli, ActiveWindowIsHalfOpen) {
  StimulusEvent e;
  e.start = 0;
  e.duration = 50;
  EXPECT_TRUE(e.active_at(0));
  EXPECT_TRUE(e.active_at(49));
  EXPECT_FALSE(e.active_at(50));
}

TEST(Snapshot, ClampsToByteRange) {
  TrailField f(3, 1);
  f.deposit({1, 0}, 12.4);
  f.deposit({2, 0}, 900.0);
  const GreyImage img = snapshot(f);
  EXPECT_EQ(img(0, 0), 0);
  EXPECT_EQ(img(1, 0), 12);
  EXPECT_EQ(img(2, 0), 255);
}

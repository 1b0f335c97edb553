#include "qam/grid.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace qam;

namespace {

// Dense (n x n) second-difference matrix, built independently of the stencil code.
std::vector<std::vector<double>> dense_matrix(std::size_t n, double ds, BoundaryKind kind) {
    std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
    const double s = 1.0 / (ds * ds);
    for (std::size_t i = 0; i < n; ++i) {
        const bool boundary = i == 0 || i == n - 1;
        if (boundary && kind == BoundaryKind::FixedValue) continue;
        a[i][i] = -2.0 * s;
        if (kind == BoundaryKind::PeriodicWrap) {
            a[i][(i + 1) % n] += s;
            a[i][(i + n - 1) % n] += s;
        } else if (kind == BoundaryKind::ZeroFlux && i == 0) {
            a[i][1] += 2.0 * s;
        } else if (kind == BoundaryKind::ZeroFlux && i == n - 1) {
            a[i][n - 2] += 2.0 * s;
        } else {
            a[i][i + 1] += s;
            a[i][i - 1] += s;
        }
    }
    return a;
}

Field random_field(std::mt19937_64& gen, std::size_t n) {
    std::normal_distribution<double> nd;
    Field f(n);
    for (auto& z : f) z = {nd(gen), nd(gen)};
    return f;
}

BoundaryPolicy policy_for(BoundaryKind kind) {
    switch (kind) {
    case BoundaryKind::FixedValue: return BoundaryPolicy::fixed({1.0, 0.0});
    case BoundaryKind::ZeroFlux: return BoundaryPolicy::zero_flux();
    default: return BoundaryPolicy::periodic();
    }
}

}  // namespace

TEST(Grid, RejectsTooFewNodes) { EXPECT_THROW(make_grid(0.0, 1.0, 2), ConfigError); }

TEST(Grid, RejectsInvertedBounds) {
    EXPECT_THROW(make_grid(1.0, 1.0, 10), ConfigError);
    EXPECT_THROW(make_grid(2.0, 1.0, 10), ConfigError);
}

TEST(Grid, ThirtyLinesOverDefaultBounds) {
    const Grid g = make_grid(10.0, 20.0, 30);
    EXPECT_DOUBLE_EQ(g.spacing(), 10.0 / 29.0);
    EXPECT_EQ(g[0], 10.0);
    EXPECT_EQ(g[29], 20.0);
    for (std::size_t k = 1; k < g.size(); ++k) {
        EXPECT_GT(g[k], g[k - 1]);
        EXPECT_NEAR(g[k] - g[k - 1], g.spacing(), 1e-13);
    }
}

TEST(Grid, UnitSpacing) {
    const Grid g = make_grid(0.0, 29.0, 30);
    EXPECT_EQ(g.spacing(), 1.0);
    for (std::size_t k = 0; k < 30; ++k) EXPECT_EQ(g[k], static_cast<double>(k));
}

TEST(SecondDifference, ConstantFieldIsAnnihilated) {
    const Grid g = make_grid(10.0, 20.0, 30);
    const Field f(30, Complex{0.25, -0.5});
    for (const auto& z : second_difference(f, g, BoundaryPolicy::periodic())) {
        EXPECT_EQ(z, Complex{});
    }
}

TEST(SecondDifference, SpikeWithFixedEnds) {
    const Grid g = make_grid(0.0, 2.0, 3);
    const Field f{0.0, 1.0, 0.0};
    const Field d = second_difference(f, g, BoundaryPolicy::fixed({0.0, 0.0}));
    EXPECT_EQ(d[0], Complex{});
    EXPECT_EQ(d[1], Complex(-2.0));
    EXPECT_EQ(d[2], Complex{});
}

TEST(SecondDifference, ZeroFluxMirrorsInterior) {
    const Grid g = make_grid(0.0, 3.0, 4);
    const Field f{1.0, 2.0, 4.0, 8.0};
    const Field d = second_difference(f, g, BoundaryPolicy::zero_flux());
    EXPECT_EQ(d[0], Complex(2.0));   // (2 - 2 + 2) with ghost = f[1]
    EXPECT_EQ(d[3], Complex(-8.0));  // (4 - 16 + 4) with ghost = f[2]
}

TEST(SecondDifference, LengthMismatchThrows) {
    const Grid g = make_grid(0.0, 1.0, 5);
    EXPECT_THROW(second_difference(Field(4), g, BoundaryPolicy::periodic()),
                 std::invalid_argument);
}

TEST(SecondDifference, PeriodicSineIsEigenvector) {
    const std::size_t n = 16;
    const Grid g = make_grid(0.0, 3.0, n);
    const auto a = dense_matrix(n, g.spacing(), BoundaryKind::PeriodicWrap);
    Field f(n);
    for (std::size_t k = 0; k < n; ++k) f[k] = std::sin(2.0 * std::numbers::pi * k / n);

    // Eigenvalue read off the dense product at a node where f is nonzero.
    std::vector<double> af(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) af[i] += a[i][j] * f[j].real();
    const double lambda = af[4] / f[4].real();
    const double expected =
        -(2.0 / (g.spacing() * g.spacing())) * (1.0 - std::cos(2.0 * std::numbers::pi / n));
    EXPECT_NEAR(lambda, expected, 1e-12 * std::abs(expected));

    const Field d = second_difference(f, g, BoundaryPolicy::periodic());
    for (std::size_t k = 0; k < n; ++k) {
        EXPECT_NEAR(d[k].real(), lambda * f[k].real(), 1e-12 * std::abs(lambda));
        EXPECT_EQ(d[k].imag(), 0.0);
    }
}

TEST(SecondDifference, MatchesDenseOracleForSmallGrids) {
    std::mt19937_64 gen(7);
    for (auto kind : {BoundaryKind::PeriodicWrap, BoundaryKind::FixedValue, BoundaryKind::ZeroFlux}) {
        for (std::size_t n = 3; n <= 12; ++n) {
            const Grid g = make_grid(-1.0, 2.5, n);
            const auto a = dense_matrix(n, g.spacing(), kind);
            const Field f = random_field(gen, n);
            const Field d = second_difference(f, g, policy_for(kind));
            for (std::size_t i = 0; i < n; ++i) {
                Complex ref{};
                double scale = 0.0;
                for (std::size_t j = 0; j < n; ++j) {
                    ref += a[i][j] * f[j];
                    scale += std::abs(a[i][j]) * std::abs(f[j]);
                }
                EXPECT_NEAR(std::abs(d[i] - ref), 0.0, 1e-14 * (scale + 1.0))
                    << "kind " << to_string(kind) << " n " << n << " row " << i;
            }
        }
    }
}

TEST(SecondDifference, PeriodicSumsToZeroAndIsSymmetric) {
    std::mt19937_64 gen(11);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 3 + trial % 40;
        const Grid g = make_grid(0.0, 1.0 + trial, n);
        const Field a = random_field(gen, n);
        const Field b = random_field(gen, n);
        const Field la = second_difference(a, g, BoundaryPolicy::periodic());
        const Field lb = second_difference(b, g, BoundaryPolicy::periodic());

        Complex sum{}, ab{}, ba{};
        double scale = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            sum += la[k];
            scale += std::abs(la[k]);
            ab += a[k] * lb[k];
            ba += la[k] * b[k];
        }
        EXPECT_LE(std::abs(sum), 1e-13 * scale);
        EXPECT_LE(std::abs(ab - ba), 1e-12 * (std::abs(ab) + scale));
    }
}

TEST(SecondDifference, PeriodicWrapTreatsEndsAlike) {
    // Mirror-symmetric field: both end rows use the same neighbours.
    const Grid g = make_grid(10.0, 20.0, 9);
    const Field f{1.0, 2.0, 3.0, 4.0, 5.0, 4.0, 3.0, 2.0, 1.0};
    const Field d = second_difference(f, g, BoundaryPolicy::periodic());
    EXPECT_EQ(d[0], d[8]);
}

TEST(Boundary, FixedValueImposesLeftEnd) {
    Field f(5, Complex{3.0, 0.0});
    impose_boundary(f, BoundaryPolicy::fixed({0.5, 0.0}));
    EXPECT_EQ(f[0], Complex(0.5));
    EXPECT_EQ(f[4], Complex(3.0));
}

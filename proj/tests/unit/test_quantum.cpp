#include <tribaker/quantum.hpp>

#include <gtest/gtest.h>

#include <Eigen/SVD>

using namespace tribaker;

namespace {
double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }
Matrix eye(int n) { return Matrix::Identity(n, n); }
}  // namespace

TEST(Dft, UnitaryAndSymmetric) {
    for (int n : {1, 5, 27}) {
        Matrix g = dft_matrix(n);
        EXPECT_LT(max_abs(g.adjoint() * g - eye(n)), 1e-12);
        // equal boundary phases make the kernel symmetric in (j,k)
        EXPECT_LT(max_abs(g - g.transpose()), 1e-15);
    }
    Matrix g1 = dft_matrix(1, 0.5, 0.5);
    EXPECT_NEAR(g1(0, 0).real(), 0.0, 1e-15);
    EXPECT_NEAR(g1(0, 0).imag(), -1.0, 1e-15);
}

TEST(ClosedBaker, UnitaryAndParityCommuting) {
    for (int n : {3, 27, 243}) {
        Matrix u = closed_baker(n);
        Matrix pi = parity_operator(n);
        EXPECT_LT(max_abs(u.adjoint() * u - eye(n)), 1e-10) << n;
        EXPECT_LT(max_abs(u * pi - pi * u), 1e-12) << n;
    }
    EXPECT_THROW(closed_baker(4), config_error);
    EXPECT_THROW(closed_baker(0), config_error);
}

TEST(OpeningOperator, DiagonalStructure) {
    ReflectivityProfile closed{ReflectivityShape::constant, 1.0};
    EXPECT_LT(max_abs(opening_operator(27, closed) - eye(27)), 1e-15);

    ReflectivityProfile full{ReflectivityShape::complete, 0.0};
    Eigen::VectorXd d = opening_diagonal(27, full);
    for (int j = 0; j < 27; ++j) {
        if (j >= 9 && j < 18) EXPECT_DOUBLE_EQ(d(j), 0.0);
        else EXPECT_DOUBLE_EQ(d(j), 1.0);
    }

    // entry at the flat bottom of the step profile, q_121 = 0.5 at N = 243
    ReflectivityProfile step0{ReflectivityShape::step, 0.0};
    Eigen::VectorXd ds = opening_diagonal(243, step0);
    const double expected = std::sqrt(1.0 / (1.0 + std::exp(-120.0 * (0.5 - 0.63))));
    EXPECT_DOUBLE_EQ(ds(121), expected);
    EXPECT_NEAR(ds(121), 4.1e-4, 5e-5);

    for (int j = 0; j < 27; ++j) {
        Eigen::VectorXd dd = opening_diagonal(27, ReflectivityProfile{ReflectivityShape::sinusoidal, 0.3});
        ASSERT_GE(dd(j), 0.0);
        ASSERT_LE(dd(j), 1.0);
    }
}

TEST(OpenBaker, ClosedLimitAndRank) {
    ReflectivityProfile closed{ReflectivityShape::constant, 1.0};
    EXPECT_LT(max_abs(open_baker(27, closed) - closed_baker(27)), 1e-12);

    ReflectivityProfile full{ReflectivityShape::complete, 0.0};
    Matrix ut = open_baker(27, full);
    Eigen::JacobiSVD<Matrix> svd(ut);
    int rank = 0;
    for (int i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()(i) > 1e-12) ++rank;
    EXPECT_LE(rank, 18);  // P annihilates the middle block
}

TEST(OpenBaker, ContractionAndParity) {
    for (auto shape : {ReflectivityShape::step, ReflectivityShape::sinusoidal}) {
        for (double r : {0.0, 0.01, 0.3}) {
            ReflectivityProfile prof{shape, r};
            Matrix ut = open_baker(81, prof);
            Eigen::JacobiSVD<Matrix> svd(ut);
            EXPECT_LE(svd.singularValues()(0), 1.0 + 1e-10);
            Matrix pi = parity_operator(81);
            EXPECT_LT(max_abs(ut * pi - pi * ut), 1e-10);
        }
    }
}

TEST(OpenBaker, ApproachesClosedMapAsRGoesToOne) {
    Matrix u = closed_baker(27);
    double last = 1e99;
    for (double r : {0.9, 0.99, 0.999}) {
        ReflectivityProfile prof{ReflectivityShape::sinusoidal, r};
        const double d = max_abs(open_baker(27, prof) - u);
        EXPECT_LT(d, last);
        last = d;
    }
    EXPECT_LT(last, 1e-3);
}

TEST(Parity, InvolutionAndDiagonalCommutation) {
    Matrix pi = parity_operator(12);
    EXPECT_LT(max_abs(pi * pi - eye(12)), 1e-15);
    ReflectivityProfile prof{ReflectivityShape::step, 0.2};
    Matrix p = opening_operator(12, prof);
    EXPECT_LT(max_abs(p * pi - pi * p), 1e-15);
}

TEST(Quantum, TimeReversalIdentity) {
    // antiunitary time reversal of the antiperiodic baker:
    // G^{-1} conj(U) G = U^dagger, exactly up to round-off
    for (int n : {27, 81}) {
        Matrix u = closed_baker(n);
        Matrix g = dft_matrix(n);
        EXPECT_LT(max_abs(g.adjoint() * u.conjugate() * g - u.adjoint()), 1e-12);
        ReflectivityProfile prof{ReflectivityShape::step, 0.05};
        Matrix ut = open_baker(n, prof);
        EXPECT_LT(max_abs(g.adjoint() * ut.conjugate() * g - ut.adjoint()), 1e-12);
    }
}

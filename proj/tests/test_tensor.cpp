#include "tsl0/tensor.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "tsl0/linalg.hpp"
#include "test_util.hpp"

using namespace tsl0;
using namespace tsl0::test;

TEST(DenseTensor, ConstructorEnforcesInvariants) {
    EXPECT_THROW(DenseTensor(Shape{}), dimension_error);
    EXPECT_THROW(DenseTensor(Shape{2, 0, 3}), dimension_error);
    EXPECT_THROW(DenseTensor(Shape{2, 3}, std::vector<double>(5)), dimension_error);
    DenseTensor x(Shape{2, 3});
    EXPECT_EQ(x.size(), 6u);
    EXPECT_EQ(x.order(), 2u);
}

TEST(ModeMatricize, Mode1OfMatrixIsIdentity) {
    DenseTensor x({2, 3}, {1, 2, 3, 4, 5, 6});
    DenseMatrix m = mode_matricize(x, 1);
    EXPECT_EQ(m.rows, 2u);
    EXPECT_EQ(m.cols, 3u);
    EXPECT_EQ(m.data, x.data);
}

TEST(ModeMatricize, Mode2OfMatrixIsTranspose) {
    DenseTensor x({2, 3}, {1, 2, 3, 4, 5, 6});
    DenseMatrix m = mode_matricize(x, 2);
    EXPECT_EQ(m.rows, 3u);
    EXPECT_EQ(m.cols, 2u);
    EXPECT_EQ(m.data, (std::vector<double>{1, 4, 2, 5, 3, 6}));
}

TEST(ModeMatricize, Cube01234567Mode3MatchesIndexMap) {
    DenseTensor x({2, 2, 2}, {0, 1, 2, 3, 4, 5, 6, 7});
    DenseMatrix m = mode_matricize(x, 3);
    EXPECT_EQ(m.rows, 2u);
    EXPECT_EQ(m.cols, 4u);
    // Frozen from the index-map oracle below: row r holds entries with j3 = r,
    // columns lexicographic over (j1, j2) with j2 fastest.
    EXPECT_EQ(m.data, (std::vector<double>{0, 2, 4, 6, 1, 3, 5, 7}));
    // Full index-map oracle over all 8 elements.
    for (std::size_t i = 0; i < x.size(); ++i) {
        const Index ix = unflatten(i, x.shape);
        const std::size_t col = ix[0] * 2 + ix[1];
        EXPECT_EQ(m(ix[2], col), x.data[i]);
    }
}

TEST(ModeMatricize, RejectsOutOfRangeMode) {
    DenseTensor x(Shape{2, 3});
    EXPECT_THROW(mode_matricize(x, 0), dimension_error);
    EXPECT_THROW(mode_matricize(x, 3), dimension_error);
}

TEST(ModeFold, InvertsMatricizationForEveryMode) {
    SeededRng rng(101);
    for (const Shape& shape :
         {Shape{5}, Shape{3, 4}, Shape{3, 4, 5}, Shape{2, 3, 2, 4}}) {
        DenseTensor x = random_tensor(rng, shape);
        for (std::size_t d = 1; d <= shape.size(); ++d) {
            DenseTensor back = mode_fold(mode_matricize(x, d), d, shape);
            EXPECT_EQ(back.data, x.data) << "shape order " << shape.size() << " mode " << d;
        }
    }
}

TEST(ModeFold, ZeroMatrixGivesZeroTensor) {
    DenseTensor z = mode_fold(DenseMatrix(3, 8), 2, Shape{2, 3, 4});
    EXPECT_EQ(z.shape, (Shape{2, 3, 4}));
    EXPECT_EQ(count_nonzero(z), 0u);
}

TEST(ModeFold, RejectsDimensionMismatch) {
    EXPECT_THROW(mode_fold(DenseMatrix(3, 7), 2, Shape{2, 3, 4}), dimension_error);
}

TEST(ModeProduct, IdentityMatrixIsNoOp) {
    SeededRng rng(7);
    DenseTensor x = random_tensor(rng, {3, 4, 2});
    for (std::size_t d = 1; d <= 3; ++d) {
        DenseTensor y = mode_product(x, DenseMatrix::identity(x.shape[d - 1]), d);
        EXPECT_EQ(y.data, x.data);
    }
}

TEST(ModeProduct, Mode1OfMatrixIsLeftMultiply) {
    DenseTensor x({2, 2}, {1, 2, 3, 4});
    DenseMatrix a(2, 2, {0, 1, 1, 0});
    DenseTensor y = mode_product(x, a, 1);
    // A swaps the rows of x.
    EXPECT_EQ(y.data, (std::vector<double>{3, 4, 1, 2}));
}

TEST(ModeProduct, MatchesElementwiseSumOracle) {
    SeededRng rng(11);
    DenseTensor x = random_tensor(rng, {3, 3, 3});
    DenseMatrix a = random_matrix(rng, 2, 3);
    DenseTensor got = mode_product(x, a, 2);
    DenseTensor want = mode_product_oracle(x, a, 2);
    EXPECT_EQ(got.shape, (Shape{3, 2, 3}));
    EXPECT_LE(max_abs_diff(got.data, want.data), 1e-14);
}

TEST(ModeProduct, RejectsInnerDimensionMismatch) {
    DenseTensor x(Shape{3, 4});
    EXPECT_THROW(mode_product(x, DenseMatrix(2, 3), 2), dimension_error);
}

TEST(MultiModeProduct, AllIdentityLeavesInputUnchanged) {
    SeededRng rng(13);
    DenseTensor x = random_tensor(rng, {2, 3, 4});
    std::vector<DenseMatrix> ids{DenseMatrix::identity(2), DenseMatrix::identity(3),
                                 DenseMatrix::identity(4)};
    EXPECT_EQ(multi_mode_product(x, ids).data, x.data);
}

TEST(MultiModeProduct, TwoModeCaseIsSandwichProduct) {
    SeededRng rng(17);
    DenseTensor x = random_tensor(rng, {3, 4});
    DenseMatrix a = random_matrix(rng, 2, 3);
    DenseMatrix b = random_matrix(rng, 2, 4);
    DenseTensor got = multi_mode_product(x, {a, b});
    // Oracle: A X B^T as plain matrix algebra.
    DenseMatrix want = matmul(matmul(a, DenseMatrix(3, 4, x.data)), transpose(b));
    EXPECT_LE(max_abs_diff(got.data, want.data), 1e-13);
}

TEST(MultiModeProduct, MatchesNestedSumOracle) {
    SeededRng rng(19);
    DenseTensor x = random_tensor(rng, {2, 2, 2});
    std::vector<DenseMatrix> mats{random_matrix(rng, 2, 2), random_matrix(rng, 2, 2),
                                  random_matrix(rng, 2, 2)};
    DenseTensor got = multi_mode_product(x, mats);
    DenseTensor want = multi_mode_oracle(x, mats);
    EXPECT_LE(rel_fro_err(got, want), 1e-12);
}

TEST(MultiModeProduct, NestedSumOracleOnRandomShapes) {
    SeededRng rng(23);
    for (int rep = 0; rep < 20; ++rep) {
        const std::size_t order = 1 + rng.uniform_index(3);
        Shape xs(order), ys(order);
        for (std::size_t d = 0; d < order; ++d) {
            xs[d] = 2 + rng.uniform_index(3);  // 2..4
            ys[d] = 1 + rng.uniform_index(xs[d]);
        }
        DenseTensor x = random_tensor(rng, xs);
        std::vector<DenseMatrix> mats;
        for (std::size_t d = 0; d < order; ++d) mats.push_back(random_matrix(rng, ys[d], xs[d]));
        EXPECT_LE(rel_fro_err(multi_mode_product(x, mats), multi_mode_oracle(x, mats)), 1e-12);
    }
}

TEST(MultiModeProduct, ModeOrderIsImmaterial) {
    SeededRng rng(29);
    DenseTensor x = random_tensor(rng, {3, 4, 5});
    std::vector<DenseMatrix> mats{random_matrix(rng, 2, 3), random_matrix(rng, 3, 4),
                                  random_matrix(rng, 4, 5)};
    DenseTensor ref = multi_mode_product(x, mats);
    std::vector<std::size_t> order{0, 1, 2};
    do {
        DenseTensor t = x;
        for (std::size_t d : order) t = mode_product(t, mats[d], d + 1);
        EXPECT_LE(rel_fro_err(t, ref), 1e-12);
    } while (std::next_permutation(order.begin(), order.end()));
}

TEST(MultiModeProduct, IsLinear) {
    SeededRng rng(31);
    DenseTensor x = random_tensor(rng, {3, 4});
    DenseTensor z = random_tensor(rng, {3, 4});
    std::vector<DenseMatrix> mats{random_matrix(rng, 2, 3), random_matrix(rng, 3, 4)};
    const double alpha = 0.37, beta = -1.25;
    DenseTensor combo(x.shape);
    for (std::size_t i = 0; i < combo.size(); ++i)
        combo.data[i] = alpha * x.data[i] + beta * z.data[i];
    DenseTensor lhs = multi_mode_product(combo, mats);
    DenseTensor fx = multi_mode_product(x, mats);
    DenseTensor fz = multi_mode_product(z, mats);
    DenseTensor rhs(lhs.shape);
    for (std::size_t i = 0; i < rhs.size(); ++i)
        rhs.data[i] = alpha * fx.data[i] + beta * fz.data[i];
    EXPECT_LE(rel_fro_err(lhs, rhs), 1e-12);
}

TEST(MultiModeProduct, RejectsPerModeMismatch) {
    DenseTensor x(Shape{3, 4});
    EXPECT_THROW(multi_mode_product(x, {DenseMatrix(2, 3)}), dimension_error);
    EXPECT_THROW(multi_mode_product(x, {DenseMatrix(2, 3), DenseMatrix(2, 5)}), dimension_error);
}

TEST(Vectorize, RoundTripAndStorageOrder) {
    SeededRng rng(37);
    DenseTensor x = random_tensor(rng, {2, 3, 4});
    DenseTensor back = tensorize(vectorize(x), x.shape);
    EXPECT_EQ(back.data, x.data);

    DenseTensor m({2, 2}, {1, 2, 3, 4});
    EXPECT_EQ(vectorize(m), (std::vector<double>{1, 2, 3, 4}));

    EXPECT_THROW(tensorize(std::vector<double>(5), Shape{2, 3}), dimension_error);
}

TEST(Vectorize, KroneckerIdentityHoldsInModeOrder) {
    // vec(x x_1 A1 ... x_D AD) = (A1 (x) ... (x) AD) vec(x) under
    // last-index-fastest storage; this pins the storage convention.
    SeededRng rng(41);
    const std::vector<Shape> xshapes{Shape{5}, Shape{2, 3}, Shape{2, 3, 2}};
    const std::vector<Shape> yshapes{Shape{3}, Shape{2, 2}, Shape{2, 2, 2}};
    for (std::size_t c = 0; c < xshapes.size(); ++c) {
        DenseTensor x = random_tensor(rng, xshapes[c]);
        std::vector<DenseMatrix> mats;
        for (std::size_t d = 0; d < xshapes[c].size(); ++d)
            mats.push_back(random_matrix(rng, yshapes[c][d], xshapes[c][d]));
        std::vector<double> lhs = vectorize(multi_mode_product(x, mats));
        DenseMatrix flat = kron_chain(mats);
        DenseMatrix xv(x.size(), 1, vectorize(x));
        DenseMatrix rhs = matmul(flat, xv);
        EXPECT_LE(max_abs_diff(lhs, rhs.data), 1e-12) << "order " << xshapes[c].size();
    }
}

TEST(Kronecker, IdentityTimesIdentity) {
    DenseMatrix k = kronecker(DenseMatrix::identity(2), DenseMatrix::identity(3));
    EXPECT_EQ(k.rows, 6u);
    EXPECT_EQ(k.data, DenseMatrix::identity(6).data);
}

TEST(Kronecker, RowVectorExpansion) {
    DenseMatrix a(1, 2, {1, 2});
    DenseMatrix b(1, 2, {0, 3});
    DenseMatrix k = kronecker(a, b);
    EXPECT_EQ(k.rows, 1u);
    EXPECT_EQ(k.cols, 4u);
    EXPECT_EQ(k.data, (std::vector<double>{0, 3, 0, 6}));
}

TEST(Kronecker, ChainOfIdentities) {
    std::vector<DenseMatrix> ids(3, DenseMatrix::identity(2));
    DenseMatrix k = kron_chain(ids);
    EXPECT_EQ(k.data, DenseMatrix::identity(8).data);
}

TEST(Kronecker, RefusesToExceedElementCap) {
    DenseMatrix a(100, 1000);
    DenseMatrix b(100, 1000);
    try {
        kronecker(a, b, 1'000'000);
        FAIL() << "expected element_cap_error";
    } catch (const element_cap_error& e) {
        EXPECT_EQ(e.would_be_elements(), "10000000000");
    }
    std::vector<DenseMatrix> chain{a, b};
    EXPECT_THROW(kron_chain(chain, 1'000'000), element_cap_error);
    // Under the cap the same product goes through.
    EXPECT_NO_THROW(kronecker(DenseMatrix(10, 10), DenseMatrix(10, 10), 10'000));
}

TEST(Norms, FrobeniusAndNonzeroCounts) {
    DenseTensor z(Shape{3, 3});
    EXPECT_EQ(frobenius_norm_sq(z), 0.0);
    EXPECT_EQ(count_nonzero(z), 0u);

    DenseTensor x({2}, {3, 4});
    EXPECT_DOUBLE_EQ(frobenius_norm_sq(x), 25.0);  // 9 + 16
    EXPECT_EQ(count_nonzero(x, 0.0), 2u);

    DenseTensor t({2}, {1e-9, 5});
    EXPECT_EQ(count_nonzero(t, 1e-6), 1u);
    EXPECT_THROW(count_nonzero(t, -1.0), std::invalid_argument);
}

TEST(Reshape, PreservesStorageOrder) {
    SeededRng rng(43);
    DenseTensor x = random_tensor(rng, {2, 3, 4});
    DenseTensor r = reshape(x, {6, 4});
    EXPECT_EQ(r.data, x.data);
    EXPECT_THROW(reshape(x, {5, 5}), dimension_error);
}

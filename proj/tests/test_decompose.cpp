#include <gtest/gtest.h>

#include "mdlatlrr/decompose.hpp"
#include "mdlatlrr/error.hpp"
#include "test_support.hpp"

using namespace mdlatlrr;
using mdlatlrr::testing::learned_projection;
using mdlatlrr::testing::random_image;
using mdlatlrr::testing::synthetic_scene;

namespace {

double sum_abs(const Image& img) {
    double s = 0.0;
    for (double v : img.pixels()) s += std::abs(v);
    return s;
}

const ProjectionMatrix& learned4() {
    static const ProjectionMatrix proj = learned_projection(4);
    return proj;
}

}  // namespace

TEST(Dlatlrr, ZeroProjectionLeavesEverythingInBase) {
    const Image img = random_image(13, 17, 1);
    const LevelSplit split = dlatlrr(img, ProjectionMatrix(4, Matrix::Zero(16, 16)), 1);
    EXPECT_EQ(split.detail.mat.cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(sum_abs(split.detail_image), 0.0);
    EXPECT_EQ(max_abs_difference(split.base, img), 0.0);
}

TEST(Dlatlrr, IdentityProjectionMovesEverythingToDetail) {
    const Image img = random_image(13, 17, 2);
    for (std::size_t s : {1u, 2u, 4u}) {
        const LevelSplit split = dlatlrr(img, ProjectionMatrix(4, Matrix::Identity(16, 16)), s);
        EXPECT_LE(max_abs_difference(split.detail_image, img), 1e-12) << "stride " << s;
        EXPECT_LE(split.base.max(), 1e-12);
        EXPECT_GE(split.base.min(), -1e-12);
    }
}

TEST(Dlatlrr, DetailIsProjectionOfPatchMatrix) {
    const Image img = synthetic_scene(20, 22, 3);
    const LevelSplit split = dlatlrr(img, learned4(), 2);
    const PatchMatrix p = extract_patches(img, 4, 2);
    EXPECT_TRUE(split.detail.geometry == p.geometry);
    EXPECT_LE((split.detail.mat - learned4().matrix() * p.mat).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LE(max_abs_difference(split.detail_image, reconstruct_image(split.detail)), 1e-12);
    EXPECT_LE(max_abs_difference(split.detail_image + split.base, img), 1e-15);
}

TEST(Dlatlrr, RejectsImagesSmallerThanPatch) {
    EXPECT_THROW(dlatlrr(random_image(3, 10, 4), learned4(), 1), ArgumentError);
    EXPECT_THROW(dlatlrr(random_image(10, 10, 4), learned4(), 0), ArgumentError);
}

TEST(Mdlatlrr, OneLevelEqualsDlatlrr) {
    const Image img = synthetic_scene(24, 24, 5);
    const LevelSplit split = dlatlrr(img, learned4(), 1);
    const Decomposition d = mdlatlrr::mdlatlrr(img, learned4(), 1, 1);
    ASSERT_EQ(d.levels, 1u);
    ASSERT_EQ(d.details.size(), 1u);
    EXPECT_EQ(d.details[0].mat, split.detail.mat);
    EXPECT_EQ(max_abs_difference(d.detail_images[0], split.detail_image), 0.0);
    EXPECT_EQ(max_abs_difference(d.base, split.base), 0.0);
}

TEST(Mdlatlrr, ZeroProjectionAnyDepth) {
    const Image img = random_image(12, 12, 6);
    const Decomposition d = mdlatlrr::mdlatlrr(img, ProjectionMatrix(4, Matrix::Zero(16, 16)), 5, 1);
    for (const Image& det : d.detail_images) EXPECT_EQ(sum_abs(det), 0.0);
    EXPECT_EQ(max_abs_difference(d.base, img), 0.0);
}

TEST(Mdlatlrr, TelescopingReconstructionAllDepths) {
    const Image img = synthetic_scene(30, 26, 7);
    for (std::size_t r = 1; r <= kMaxLevels; ++r) {
        for (std::size_t s : {1u, 3u}) {
            const Decomposition d = mdlatlrr::mdlatlrr(img, learned4(), r, s);
            ASSERT_EQ(d.detail_images.size(), r);
            EXPECT_LE(max_abs_difference(d.reconstruct(), img), 1e-10) << "r=" << r << " s=" << s;
        }
    }
}

TEST(Mdlatlrr, LevelsChainThroughBases) {
    const Image img = synthetic_scene(20, 20, 8);
    const Decomposition d = mdlatlrr::mdlatlrr(img, learned4(), 3, 1);
    Image base = img;
    for (std::size_t i = 0; i < 3; ++i) {
        const LevelSplit split = dlatlrr(base, learned4(), 1);
        EXPECT_EQ(max_abs_difference(split.detail_image, d.detail_images[i]), 0.0);
        base = split.base;
    }
    EXPECT_EQ(max_abs_difference(base, d.base), 0.0);
}

TEST(Mdlatlrr, DetailsScaleLinearly) {
    const Image img = synthetic_scene(18, 21, 9);
    const Decomposition d = mdlatlrr::mdlatlrr(img, learned4(), 3, 2);
    const Decomposition scaled = mdlatlrr::mdlatlrr(2.5 * img, learned4(), 3, 2);
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_LE(max_abs_difference(scaled.detail_images[i], 2.5 * d.detail_images[i]), 1e-12);
    }
    EXPECT_LE(max_abs_difference(scaled.base, 2.5 * d.base), 1e-12);
}

TEST(Mdlatlrr, StreamingModeMatchesFullMode) {
    const Image img = synthetic_scene(33, 29, 10);
    const Decomposition full = mdlatlrr::mdlatlrr(img, learned4(), 4, 1, true);
    const Decomposition lean = mdlatlrr::mdlatlrr(img, learned4(), 4, 1, false);
    EXPECT_TRUE(lean.details.empty());
    for (std::size_t i = 0; i < 4; ++i) {
        EXPECT_EQ(max_abs_difference(full.detail_images[i], lean.detail_images[i]), 0.0);
    }
    EXPECT_EQ(max_abs_difference(full.base, lean.base), 0.0);
}

TEST(Mdlatlrr, LevelRange) {
    const Image img = random_image(8, 8, 11);
    EXPECT_THROW(mdlatlrr::mdlatlrr(img, learned4(), 0, 1), ArgumentError);
    EXPECT_THROW(mdlatlrr::mdlatlrr(img, learned4(), kMaxLevels + 1, 1), ArgumentError);
}

#include <gtest/gtest.h>

#include "hstrack/cube_io.hpp"
#include "hstrack/synth.hpp"
#include "test_util.hpp"

using namespace hstrack;
using hstest::TempDir;

namespace {

SceneSpec base_scene() {
    SceneSpec s;
    s.width = 32;
    s.height = 24;
    s.bands = 2;
    s.frames = 4;
    s.background = {0.2, 0.3};
    s.seed = 5;
    return s;
}

ObjectSpec static_rect(int x, int y) {
    ObjectSpec o;
    o.shape = ObjectSpec::Shape::rect;
    o.w = 6;
    o.h = 5;
    o.spectrum = {0.8, 0.6};
    o.path.kind = PathSpec::Kind::linear;
    o.path.x0 = x;
    o.path.y0 = y;
    return o;
}

} // namespace

TEST(Synth, EmptySceneIsConstantBackground) {
    const auto [frames, truth] = render_scene(base_scene());
    EXPECT_TRUE(truth.empty());
    ASSERT_EQ(frames.size(), 4u);
    for (const auto& f : frames) {
        for (int r = 0; r < f.height; ++r) {
            for (int c = 0; c < f.width; ++c) {
                EXPECT_EQ(f.at(r, c, 0), 0.2);
                EXPECT_EQ(f.at(r, c, 1), 0.3);
            }
        }
    }
}

TEST(Synth, StaticSceneIsBitExactAcrossFrames) {
    SceneSpec s = base_scene();
    s.objects.push_back(static_rect(12, 10));
    const auto [frames, truth] = render_scene(s);
    for (std::size_t i = 1; i < frames.size(); ++i) EXPECT_EQ(frames[i], frames[0]);
    for (const auto& b : truth) EXPECT_EQ(b, truth[0]);
}

TEST(Synth, GroundTruthBoxesContainPaintedPixelsExactly) {
    SceneSpec s = base_scene();
    ObjectSpec disk;
    disk.shape = ObjectSpec::Shape::disk;
    disk.radius = 4;
    disk.spectrum = {0.9, 0.1};
    disk.path.kind = PathSpec::Kind::linear;
    disk.path.x0 = 12;
    disk.path.y0 = 12;
    disk.path.vx = 2;
    s.objects.push_back(disk);
    const auto [frames, truth] = render_scene(s);
    for (int t = 0; t < s.frames; ++t) {
        const auto& f = frames[t];
        const auto& b = truth[t];
        EXPECT_EQ(b.w, 9);
        EXPECT_EQ(b.h, 9);
        int painted_min_x = s.width, painted_max_x = -1, painted_min_y = s.height, painted_max_y = -1;
        for (int r = 0; r < f.height; ++r) {
            for (int c = 0; c < f.width; ++c) {
                if (f.at(r, c, 0) != 0.2) {
                    painted_min_x = std::min(painted_min_x, c);
                    painted_max_x = std::max(painted_max_x, c);
                    painted_min_y = std::min(painted_min_y, r);
                    painted_max_y = std::max(painted_max_y, r);
                }
            }
        }
        // every painted pixel inside the box, and the box hugs the disk
        EXPECT_GE(painted_min_x, b.x);
        EXPECT_LE(painted_max_x, b.x + b.w - 1);
        EXPECT_GE(painted_min_y, b.y);
        EXPECT_LE(painted_max_y, b.y + b.h - 1);
        EXPECT_EQ(painted_max_x - painted_min_x + 1, b.w);
        EXPECT_EQ(painted_max_y - painted_min_y + 1, b.h);
    }
}

TEST(Synth, LaterObjectsOccludeEarlier) {
    SceneSpec s = base_scene();
    s.objects.push_back(static_rect(10, 10));
    ObjectSpec top = static_rect(12, 11);
    top.spectrum = {0.55, 0.45};
    s.objects.push_back(top);
    const auto [frames, truth] = render_scene(s);
    // a pixel covered by both objects shows the later object's spectrum
    EXPECT_EQ(frames[0].at(11, 12, 0), 0.55);
    EXPECT_EQ(frames[0].at(11, 12, 1), 0.45);
    // truth still follows the first object
    EXPECT_EQ(truth[0], (BoundingBox{10 - 3, 10 - 2, 6, 5}));
}

TEST(Synth, PathOutOfBoundsIsRejected) {
    SceneSpec s = base_scene();
    ObjectSpec o = static_rect(2, 2);
    o.path.vx = -2; // leaves the frame on frame 2
    s.objects.push_back(o);
    EXPECT_THROW(render_scene(s), ConfigError);
}

TEST(Synth, PointsPathMustCoverAllFrames) {
    SceneSpec s = base_scene();
    ObjectSpec o = static_rect(10, 10);
    o.path.kind = PathSpec::Kind::points;
    o.path.points = {{10, 10}, {12, 10}}; // 2 points for 4 frames
    s.objects.push_back(o);
    EXPECT_THROW(render_scene(s), ConfigError);
}

TEST(Synth, BouncePathReflectsAndStaysInside) {
    SceneSpec s = base_scene();
    s.frames = 40;
    ObjectSpec o = static_rect(24, 12);
    o.path.kind = PathSpec::Kind::bounce;
    o.path.vx = 3;
    s.objects.push_back(o);
    const auto [frames, truth] = render_scene(s);
    for (const auto& b : truth) {
        EXPECT_GE(b.x, 0);
        EXPECT_LE(b.x + b.w, s.width);
    }
    // it must actually reverse direction at least once
    bool reversed = false;
    for (std::size_t i = 2; i < truth.size(); ++i) {
        if ((truth[i].x - truth[i - 1].x) * (truth[i - 1].x - truth[i - 2].x) < 0) reversed = true;
    }
    EXPECT_TRUE(reversed);
}

TEST(Synth, DeterministicRenderByteIdentical) {
    TempDir tmp("synth_det");
    SceneSpec s = base_scene();
    s.noise_sigma = 0.05;
    s.objects.push_back(static_rect(14, 10));
    render(s, tmp.file("a.hdr"), tmp.file("a_gt.csv"));
    render(s, tmp.file("b.hdr"), tmp.file("b_gt.csv"));
    EXPECT_EQ(hstest::read_file_bytes(tmp.file("a.bin")), hstest::read_file_bytes(tmp.file("b.bin")));
    EXPECT_EQ(hstest::read_file_bytes(tmp.file("a_gt.csv")), hstest::read_file_bytes(tmp.file("b_gt.csv")));
}

TEST(Synth, RenderedFilesRoundTripLosslessly) {
    TempDir tmp("synth_rt");
    SceneSpec s = base_scene();
    s.noise_sigma = 0.02;
    s.objects.push_back(static_rect(14, 10));
    render(s, tmp.file("a.hdr"), tmp.file("a_gt.csv"));

    SequenceReader reader(tmp.file("a.hdr"));
    ASSERT_EQ(reader.frame_count(), s.frames);
    std::vector<HyperCube> loaded;
    for (int i = 0; i < s.frames; ++i) loaded.push_back(reader.read_frame(i));
    write_sequence(tmp.file("b.hdr"), loaded, Dtype::f32le);
    EXPECT_EQ(hstest::read_file_bytes(tmp.file("a.bin")), hstest::read_file_bytes(tmp.file("b.bin")));
}

TEST(Metamer, TwoBandPairIsTheSymmetricSwap) {
    const MetamerPair p = make_metamer_pair(2, 0.5, 1);
    EXPECT_EQ(p.gray_band, -1);
    ASSERT_EQ(p.a.size(), 2u);
    // exactly {0.2, 0.8} against {0.8, 0.2} in some order
    EXPECT_DOUBLE_EQ(p.a[0] + p.a[1], 1.0);
    EXPECT_DOUBLE_EQ(p.b[0] + p.b[1], 1.0);
    EXPECT_DOUBLE_EQ(std::abs(p.a[0] - p.a[1]), 0.6);
    EXPECT_DOUBLE_EQ(p.a[0], p.b[1]);
    EXPECT_DOUBLE_EQ(p.a[1], p.b[0]);
}

TEST(Metamer, MeansMatchToMachinePrecision) {
    for (const auto& [bands, mean, seed] :
         {std::tuple{2, 0.5, 7}, std::tuple{5, 0.4, 8}, std::tuple{8, 0.6, 9}, std::tuple{3, 0.3, 10}}) {
        const MetamerPair p = make_metamer_pair(bands, mean, seed);
        double ma = 0.0, mb = 0.0;
        for (int i = 0; i < bands; ++i) {
            ma += p.a[i];
            mb += p.b[i];
        }
        ma /= bands;
        mb /= bands;
        EXPECT_LT(std::abs(ma - mb), 1e-12);
        // separation contract
        double max_diff = 0.0;
        for (int i = 0; i < bands; ++i) max_diff = std::max(max_diff, std::abs(p.a[i] - p.b[i]));
        EXPECT_GE(max_diff, 0.3);
        if (bands >= 3) {
            ASSERT_GE(p.gray_band, 0);
            EXPECT_DOUBLE_EQ(p.a[p.gray_band], p.b[p.gray_band]);
            EXPECT_DOUBLE_EQ(p.a[p.gray_band], mean);
        }
    }
}

TEST(Metamer, InfeasibleMeanRejected) {
    EXPECT_THROW(make_metamer_pair(4, 0.05, 0), ConfigError);
    EXPECT_THROW(make_metamer_pair(4, 0.97, 0), ConfigError);
    EXPECT_THROW(make_metamer_pair(1, 0.5, 0), ConfigError);
}

TEST(Metamer, RenderedPairDiffersPerBandButNotInMean) {
    const int bands = 4;
    const MetamerPair pair = make_metamer_pair(bands, 0.5, 3);
    SceneSpec s;
    s.width = 40;
    s.height = 20;
    s.bands = bands;
    s.frames = 1;
    s.background.assign(bands, 0.1);
    ObjectSpec a = static_rect(10, 10);
    a.spectrum = pair.a;
    ObjectSpec b = static_rect(30, 10);
    b.spectrum = pair.b;
    s.objects = {a, b};
    const auto [frames, truth] = render_scene(s);
    const auto& f = frames[0];
    // pick one pixel inside each object
    double band_diff = 0.0, mean_a = 0.0, mean_b = 0.0;
    for (int k = 0; k < bands; ++k) {
        band_diff = std::max(band_diff, std::abs(f.at(10, 10, k) - f.at(10, 30, k)));
        mean_a += f.at(10, 10, k);
        mean_b += f.at(10, 30, k);
    }
    EXPECT_GE(band_diff, 0.3);
    EXPECT_LT(std::abs(mean_a - mean_b) / bands, 1e-12);
    if (pair.gray_band >= 0) {
        EXPECT_EQ(f.at(10, 10, pair.gray_band), f.at(10, 30, pair.gray_band));
    }
}

TEST(SceneJson, ParsesFullSchema) {
    const auto j = nlohmann::json::parse(R"({
      "width": 64, "height": 48, "bands": 3, "frames": 5,
      "noise_sigma": 0.01, "seed": 11,
      "background": [0.1, 0.2, 0.3],
      "objects": [
        {"shape": "disk", "radius": 4, "spectrum": [0.9, 0.8, 0.7],
         "path": {"kind": "bounce", "start": [10, 20], "velocity": [2, 0]}},
        {"shape": "rect", "size": [6, 5], "spectrum": [0.5, 0.5, 0.5],
         "path": {"points": [[30,30],[32,30],[34,30],[36,30],[38,30]]}}
      ]
    })");
    const SceneSpec s = parse_scene_json(j);
    EXPECT_EQ(s.width, 64);
    EXPECT_EQ(s.frames, 5);
    ASSERT_EQ(s.objects.size(), 2u);
    EXPECT_EQ(s.objects[0].shape, ObjectSpec::Shape::disk);
    EXPECT_EQ(s.objects[0].radius, 4);
    EXPECT_EQ(s.objects[0].path.kind, PathSpec::Kind::bounce);
    EXPECT_EQ(s.objects[1].path.kind, PathSpec::Kind::points);
    ASSERT_EQ(s.objects[1].path.points.size(), 5u);
    // renders without complaint
    EXPECT_NO_THROW(render_scene(s));
}

TEST(SceneJson, RejectsBadSpectrumLength) {
    const auto j = nlohmann::json::parse(R"({
      "width": 16, "height": 16, "bands": 3, "frames": 1,
      "background": [0.1, 0.2],
      "objects": []
    })");
    EXPECT_THROW(parse_scene_json(j), ConfigError);
}

#include <doctest.h>

#include <filesystem>
#include <random>

#include "oracles.hpp"
#include "panosynth/errors.hpp"
#include "panosynth/evaluation.hpp"
#include "panosynth/parallel.hpp"
#include "panosynth/scene.hpp"

using namespace panosynth;
namespace fs = std::filesystem;

namespace {

DepthMap random_depth(ImageDims dims, std::mt19937& rng, float lo = 0.5f, float hi = 60.0f) {
  std::uniform_real_distribution<float> u(lo, hi);
  DepthMap d(dims);
  for (float& v : d.data()) v = u(rng);
  return d;
}

void check_same(const metrics::DepthMetrics& m, const oracle::DepthStats& o) {
  CHECK(m.imae == o.imae);
  CHECK(m.irmse == o.irmse);
  CHECK(m.mae == o.mae);
  CHECK(m.rmse == o.rmse);
  CHECK(m.delta == o.delta);
  CHECK(m.valid_pixels == o.n);
}

}  // namespace

TEST_CASE("depth metrics match the scalar oracle bit for bit") {
  std::mt19937 rng(11);
  std::normal_distribution<float> noise(0.0f, 0.2f);
  for (int trial = 0; trial < 100; ++trial) {
    const ImageDims dims{16, 16};
    const DepthMap gt = random_depth(dims, rng);
    DepthMap pred = gt;
    for (float& v : pred.data()) v *= std::exp(noise(rng));
    pred.data()[trial % 256] = -1.0f;
    check_same(metrics::depth_metrics(pred, gt, {}), oracle::depth_stats(pred, gt, 1.0, 50.0));
  }
}

TEST_CASE("ws_psnr matches the scalar oracle bit for bit") {
  std::mt19937 rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    const ImageDims dims{16, 16};
    const ErpImage a = oracle::random_image(dims, rng), b = oracle::random_image(dims, rng);
    CHECK(metrics::ws_mse(a, b) == oracle::ws_mse(a, b));
    CHECK(metrics::ws_psnr(a, b) == oracle::ws_psnr(a, b));
  }
}

TEST_CASE("metrics do not depend on the thread count") {
  std::mt19937 rng(13);
  const ImageDims dims{256, 128};
  const ErpImage a = oracle::random_image(dims, rng), b = oracle::random_image(dims, rng);
  const DepthMap gt = random_depth(dims, rng), pred = random_depth(dims, rng);
  set_thread_count(1);
  const double p1 = metrics::ws_psnr(a, b);
  const auto d1 = metrics::depth_metrics(pred, gt, {});
  set_thread_count(7);
  CHECK(metrics::ws_psnr(a, b) == p1);
  check_same(metrics::depth_metrics(pred, gt, {}), {d1.imae, d1.irmse, d1.mae, d1.rmse, d1.delta, d1.valid_pixels});
  set_thread_count(0);
}

TEST_CASE("identical depth maps") {
  std::mt19937 rng(14);
  const DepthMap gt = random_depth({16, 8}, rng);
  const auto m = metrics::depth_metrics(gt, gt, {});
  CHECK(m.imae == 0.0);
  CHECK(m.irmse == 0.0);
  CHECK(m.mae == 0.0);
  CHECK(m.rmse == 0.0);
  for (const double d : m.delta) CHECK(d == 1.0);
}

TEST_CASE("doubled depth fails every threshold") {
  std::mt19937 rng(15);
  const DepthMap gt = random_depth({16, 8}, rng, 1.0f, 50.0f);
  DepthMap pred = gt;
  for (float& v : pred.data()) v *= 2.0f;
  const auto m = metrics::depth_metrics(pred, gt, {});
  for (const double d : m.delta) CHECK(d == 0.0);
  double mean = 0.0;
  for (const float v : gt.data()) mean += v;
  mean /= static_cast<double>(gt.data().size());
  CHECK(m.mae == doctest::Approx(mean).epsilon(1e-12));
}

TEST_CASE("three percent noise stays inside the tightest threshold") {
  std::mt19937 rng(16);
  std::uniform_real_distribution<float> noise(-0.03f, 0.03f);
  const DepthMap gt = random_depth({16, 16}, rng, 1.0f, 50.0f);
  DepthMap pred = gt;
  for (float& v : pred.data()) v *= 1.0f + noise(rng);
  const auto m = metrics::depth_metrics(pred, gt, {});
  CHECK(m.delta[0] == 1.0);
  check_same(m, oracle::depth_stats(pred, gt, 1.0, 50.0));
}

TEST_CASE("delta accuracies are monotone and errors non-negative") {
  std::mt19937 rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    const auto m = metrics::depth_metrics(random_depth({16, 16}, rng), random_depth({16, 16}, rng), {});
    for (int t = 1; t < 5; ++t) CHECK(m.delta[t] >= m.delta[t - 1]);
    CHECK(m.delta[0] >= 0.0);
    CHECK(m.delta[4] <= 1.0);
    CHECK(m.imae >= 0.0);
    CHECK(m.irmse >= m.imae);
    CHECK(m.rmse >= m.mae);
  }
}

TEST_CASE("pixels outside the valid range are ignored") {
  std::mt19937 rng(18);
  const DepthMap gt = random_depth({16, 16}, rng, 1.0f, 50.0f);
  const DepthMap pred = random_depth({16, 16}, rng, 1.0f, 50.0f);
  DepthMap gt2 = gt, pred2 = pred;
  for (int i = 0; i < 256; i += 7) {
    gt2.data()[i] = 1e6f;
    pred2.data()[i] = 3.0f;
  }
  DepthMap gt_ref = gt, pred_ref = pred;
  for (int i = 0; i < 256; i += 7) gt_ref.data()[i] = -1.0f;
  const auto a = metrics::depth_metrics(pred2, gt2, {});
  const auto b = metrics::depth_metrics(pred_ref, gt_ref, {});
  CHECK(a.valid_pixels == b.valid_pixels);
  CHECK(a.imae == b.imae);
  CHECK(a.rmse == b.rmse);
  CHECK(a.delta == b.delta);
}

TEST_CASE("depth metrics need at least one valid pixel") {
  const DepthMap gt({8, 4}, 100.0f);
  CHECK_THROWS_AS(metrics::depth_metrics(gt, gt, {}), DegenerateInputError);
  CHECK_THROWS(metrics::depth_metrics(DepthMap({8, 4}, 2.0f), DepthMap({4, 4}, 2.0f), {}));
}

TEST_CASE("ws_psnr basic identities") {
  std::mt19937 rng(19);
  const ErpImage a = oracle::random_image({32, 16}, rng), b = oracle::random_image({32, 16}, rng);
  CHECK(metrics::ws_psnr(a, a) == metrics::kPsnrCap);
  CHECK(metrics::ws_psnr(a, b) == metrics::ws_psnr(b, a));
  for (const float e : {0.01f, 0.1f, 0.25f}) {
    const ErpImage g({32, 16}, 0.5f), p({32, 16}, 0.5f + e);
    const double e_eff = static_cast<double>(0.5f + e) - 0.5;
    CHECK(metrics::ws_psnr(p, g) == doctest::Approx(-20.0 * std::log10(e_eff)).epsilon(1e-12));
  }
  CHECK_THROWS(metrics::ws_psnr(a, ErpImage({16, 16})));
}

TEST_CASE("errors near the poles weigh less than at the equator") {
  const ImageDims dims{32, 16};
  const ErpImage g(dims, 0.5f);
  ErpImage pole = g, equator = g;
  for (int col = 0; col < dims.width; ++col) {
    pole.set(col, 0, {0.7f, 0.7f, 0.7f});
    equator.set(col, dims.height / 2, {0.7f, 0.7f, 0.7f});
  }
  CHECK(metrics::ws_psnr(pole, g) > metrics::ws_psnr(equator, g));
}

TEST_CASE("row weights follow the pixel solid angle") {
  for (const int h : {16, 64, 256}) {
    double wsum = 0.0, ssum = 0.0;
    for (int row = 0; row < h; ++row) {
      wsum += metrics::ws_weight(row, h);
      ssum += oracle::row_solid_angle(row, h);
    }
    for (int row = 0; row < h; ++row) {
      const double w = metrics::ws_weight(row, h) / wsum;
      const double s = oracle::row_solid_angle(row, h) / ssum;
      CHECK(w == doctest::Approx(s).epsilon(1e-3));
    }
  }
  const int h = 256;
  for (int row = 0; row < h; ++row) {
    CHECK(metrics::ws_weight(row, h) * oracle::kPi / h ==
          doctest::Approx(oracle::row_solid_angle(row, h)).epsilon(1e-3));
  }
}

TEST_CASE("triplet evaluation") {
  const auto s = scene::street_canyon();
  const auto f = scene::make_sequence(s, scene::start_pose(s), s.heading, 1.0, 3, {128, 64});
  fusion::SynthesisConfig cfg;
  cfg.sweep.n_levels = 32;
  CHECK_THROWS_AS(metrics::eval_triplet(f[0], f[0], f[0], cfg), DegenerateInputError);

  const auto r = metrics::eval_triplet(f[0], f[1], f[2], cfg);
  CHECK(r.baseline_m == doctest::Approx(2.0));
  CHECK(r.ws_psnr > 15.0);
  CHECK(r.residual_hole_fraction >= 0.0);
  CHECK(r.residual_hole_fraction < 0.2);
  REQUIRE(r.depth_p0);
  REQUIRE(r.depth_p2);
  const auto j = metrics::to_json(r);
  for (const char* key : {"ws_psnr", "residual_hole_fraction", "baseline_m", "depth_p0", "depth_p2"}) {
    CHECK(j.contains(key));
  }
  for (const char* key : {"imae", "irmse", "mae", "rmse", "delta_105", "delta_110", "delta_125", "delta_125_2",
                          "delta_125_3"}) {
    CHECK(j["depth_p0"].contains(key));
  }
  const auto again = metrics::eval_triplet(f[0], f[1], f[2], cfg);
  CHECK(metrics::to_json(again).dump() == j.dump());

  cfg.use_frame_depth = true;
  const auto o = metrics::eval_triplet(f[0], f[1], f[2], cfg);
  CHECK(!o.depth_p0);
  CHECK(o.ws_psnr > r.ws_psnr);
}

TEST_CASE("directory evaluation") {
  const fs::path root = fs::temp_directory_path() / "panosynth_test_metrics";
  fs::remove_all(root);
  std::mt19937 rng(20);
  for (int i = 0; i < 3; ++i) {
    const ErpImage g = oracle::random_image({16, 8}, rng);
    const DepthMap d = random_depth({16, 8}, rng, 1.0f, 50.0f);
    io::write_rgb(g, io::frame_stem(root / "gt", i).concat(".png"));
    io::write_depth(d, io::frame_stem(root / "gt", i).concat(".pfm"));
    if (i < 2) io::write_rgb(g, io::frame_stem(root / "pred", i).concat(".png"));
  }
  io::write_depth(io::read_depth(root / "gt" / "0000.pfm"), root / "pred" / "0000.pfm");
  const auto j = metrics::eval_directories(root / "pred", root / "gt");
  CHECK(j["frame_count"] == 2);
  CHECK(j["mean_ws_psnr"] == metrics::kPsnrCap);
  CHECK(j["frames"][0]["name"] == "0000.png");
  CHECK(j["frames"][0]["depth"]["imae"] == 0.0);
  CHECK(!j["frames"][1].contains("depth"));
  CHECK_THROWS_AS(metrics::eval_directories(root / "missing", root / "gt"), NotFoundError);
  fs::remove_all(root);
}

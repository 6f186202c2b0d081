#include "cli.hpp"

#include <chrono>
#include <cstdlib>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "panosynth/cubemap.hpp"
#include "panosynth/errors.hpp"
#include "panosynth/evaluation.hpp"
#include "panosynth/fusion.hpp"
#include "panosynth/io.hpp"
#include "panosynth/parallel.hpp"
#include "panosynth/raster.hpp"
#include "panosynth/scene.hpp"

namespace panosynth::cli {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

struct Globals {
  long long seed = -1;
  int threads = 0;
  bool verbose = false;
};

struct SweepOpts {
  sweep::SweepConfig cfg;
  bool no_subpixel = false;
  bool no_lr_check = false;

  void add(CLI::App* app) {
    app->add_option("--levels", cfg.n_levels, "Inverse-depth hypotheses")->capture_default_str();
    app->add_option("--d-min,--dmin", cfg.d_min, "Nearest hypothesis, meters")->capture_default_str();
    app->add_option("--d-max,--dmax", cfg.d_max, "Farthest hypothesis, meters")->capture_default_str();
    app->add_option("--window", cfg.window, "Odd cost aggregation window, pixels")->capture_default_str();
    app->add_option("--lr-tolerance", cfg.lr_tolerance, "Relative left-right tolerance")->capture_default_str();
    app->add_flag("--no-subpixel", no_subpixel, "Disable parabola refinement");
    app->add_flag("--no-lr-check", no_lr_check, "Disable the left-right check");
  }
  sweep::SweepConfig get() const {
    sweep::SweepConfig c = cfg;
    c.subpixel = !no_subpixel;
    c.lr_check = !no_lr_check;
    return c;
  }
};

struct MeshOpts {
  mesh::MeshConfig cfg;
  void add(CLI::App* app) {
    app->add_option("--k", cfg.k, "Discontinuity threshold, meters")->capture_default_str();
    app->add_flag("--relative", cfg.relative, "Cull on relative depth steps instead");
    app->add_option("--k-rel", cfg.k_rel, "Relative discontinuity threshold")->capture_default_str();
    app->add_option("--height-segments", cfg.height_segments, "Mesh rows (0 = 2H)")->capture_default_str();
    app->add_option("--width-segments", cfg.width_segments, "Mesh columns (0 = 2W)")->capture_default_str();
  }
};

struct FusionOpts {
  fusion::FusionConfig cfg;
  void add(CLI::App* app) {
    app->add_option("--eps", cfg.depth_agreement_eps, "Relative depth gap that still blends")
        ->capture_default_str();
    app->add_option("--inpaint-iters", cfg.inpaint_iters, "Inpainting iteration cap")->capture_default_str();
    app->add_option("--inpaint-tol", cfg.inpaint_tol, "Inpainting convergence threshold")->capture_default_str();
  }
};

void apply_threads(const Globals& g) {
  int n = g.threads;
  if (n <= 0) {
    if (const char* env = std::getenv("OMNISYNTH_THREADS")) n = std::atoi(env);
  }
  if (n > 0) set_thread_count(n);
}

scene::Scene load_scene_seeded(const std::string& name, const Globals& g) {
  scene::Scene s = scene::load_scene(name);
  if (g.seed >= 0) s.seed = static_cast<std::uint32_t>(g.seed);
  return s;
}

void write_json(const fs::path& path, const ordered_json& j) { io::write_file_atomic(path, j.dump(2) + "\n"); }

class Timer {
 public:
  Timer(bool on, std::ostream& err, std::string what) : on_(on), err_(err), what_(std::move(what)) {}
  ~Timer() {
    if (!on_) return;
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    err_ << what_ << ": " << std::fixed << std::setprecision(3) << s << " s\n";
  }

 private:
  bool on_;
  std::ostream& err_;
  std::string what_;
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Wide-baseline 360 panorama view synthesis"};
  app.name(args.empty() ? "panosynth" : fs::path(args[0]).filename().string());
  app.require_subcommand(1);
  Globals g;
  app.add_option("--seed", g.seed, "Override the scene texture seed");
  app.add_option("--threads", g.threads, "Worker threads (default: OMNISYNTH_THREADS or all cores)");
  app.add_flag("-v,--verbose", g.verbose, "Print stage timings to stderr");

  // gen-scene
  auto* gen = app.add_subcommand("gen-scene", "Render an RGBD panorama sequence of a synthetic scene");
  std::string gen_scene = "street-canyon";
  fs::path gen_out;
  int gen_frames = 3, gen_width = 256, gen_height = 256, gen_face = 0;
  double gen_baseline = 1.0;
  gen->add_option("--scene", gen_scene, "Preset name or scene JSON path")->capture_default_str();
  gen->add_option("--out", gen_out, "Output directory")->required();
  gen->add_option("--frames", gen_frames, "Number of panoramas")->capture_default_str()->check(CLI::PositiveNumber);
  gen->add_option("--baseline", gen_baseline, "Spacing between panoramas, meters")->capture_default_str();
  gen->add_option("--width", gen_width, "Panorama width")->capture_default_str()->check(CLI::PositiveNumber);
  gen->add_option("--height", gen_height, "Panorama height")->capture_default_str()->check(CLI::PositiveNumber);
  gen->add_option("--cubemap-face", gen_face, "Render through cubemap faces of this size and stitch (0 = direct)")
      ->capture_default_str();

  // depth
  auto* dep = app.add_subcommand("depth", "Estimate depth for a panorama pair by spherical sweep");
  fs::path dep_a, dep_b, dep_out, dep_poses;
  SweepOpts dep_sweep;
  dep->add_option("--a,--ref", dep_a, "Reference frame (directory, stem or PNG)")->required();
  dep->add_option("--b,--other", dep_b, "Other frame (directory, stem or PNG)")->required();
  dep->add_option("--poses", dep_poses, R"(JSON {"ref": pose, "other": pose} overriding frame poses)");
  dep->add_option("--out", dep_out, "Output directory, or a .pfm path for the reference depth only")
      ->required();
  dep_sweep.add(dep);

  // render
  auto* ren = app.add_subcommand("render", "Render an RGBD panorama from a new pose");
  fs::path ren_frame, ren_depth, ren_pose, ren_out, ren_obj;
  std::string renderer = "mesh";
  MeshOpts ren_mesh;
  raster::RasterConfig ren_raster;
  ren->add_option("--frame", ren_frame, "Source frame (directory or stem)")->required();
  ren->add_option("--depth", ren_depth, "Depth map overriding the frame's own");
  ren->add_option("--pose", ren_pose, "Target pose JSON")->required();
  ren->add_option("--out", ren_out, "Output stem (writes .png and .pfm)")->required();
  ren->add_option("--renderer", renderer, "mesh or points")
      ->capture_default_str()
      ->check(CLI::IsMember({"mesh", "points"}));
  ren->add_option("--splat-radius", ren_raster.splat_radius, "Point splat radius, pixels")->capture_default_str();
  ren->add_option("--export-obj", ren_obj, "Also write the mesh as OBJ");
  ren_mesh.add(ren);

  // synthesize
  auto* syn = app.add_subcommand("synthesize", "Synthesize intermediate panoramas between two frames");
  fs::path syn_a, syn_b, syn_out, syn_da, syn_db;
  int syn_frames = 1;
  bool syn_oracle = false, syn_mask = false;
  SweepOpts syn_sweep;
  MeshOpts syn_mesh;
  FusionOpts syn_fusion;
  syn->add_option("--a", syn_a, "First frame (directory or stem)")->required();
  syn->add_option("--b", syn_b, "Second frame (directory or stem)")->required();
  syn->add_option("--frames", syn_frames, "Intermediate frames")->capture_default_str();
  syn->add_option("--out", syn_out, "Output directory")->required();
  auto* o_da = syn->add_option("--depth-a", syn_da, "Precomputed depth for --a");
  auto* o_db = syn->add_option("--depth-b", syn_db, "Precomputed depth for --b");
  o_da->needs(o_db);
  o_db->needs(o_da);
  syn->add_flag("--oracle-depth", syn_oracle, "Use the depth stored with each frame")->excludes(o_da);
  syn->add_flag("--mask-inconsistent", syn_mask, "Drop left-right inconsistent pixels before meshing");
  syn_sweep.add(syn);
  syn_mesh.add(syn);
  syn_fusion.add(syn);

  // eval
  auto* ev = app.add_subcommand("eval", "Score predictions against ground truth");
  fs::path ev_pred, ev_gt, ev_out;
  std::vector<fs::path> ev_triplet;
  bool ev_oracle = false;
  SweepOpts ev_sweep;
  MeshOpts ev_mesh;
  FusionOpts ev_fusion;
  metrics::ValidRange ev_range;
  auto* o_pred = ev->add_option("--pred", ev_pred, "Directory of predicted NNNN.png (and .pfm)");
  auto* o_gt = ev->add_option("--gt", ev_gt, "Directory of ground-truth frames");
  auto* o_tri = ev->add_option("--triplet", ev_triplet, "Frames p0 p1 p2: synthesize p1 from p0 and p2")
                    ->expected(3);
  o_pred->needs(o_gt);
  o_gt->needs(o_pred);
  o_tri->excludes(o_pred);
  ev->add_option("--out", ev_out, "Report JSON path")->required();
  ev->add_flag("--oracle-depth", ev_oracle, "Triplet mode: use stored depth instead of the sweep");
  ev->add_option("--d-lo", ev_range.d_lo, "Valid depth range start, meters")->capture_default_str();
  ev->add_option("--d-hi", ev_range.d_hi, "Valid depth range end, meters")->capture_default_str();
  ev_sweep.add(ev);
  ev_mesh.add(ev);
  ev_fusion.add(ev);

  // ablate-renderers
  auto* abl = app.add_subcommand("ablate-renderers", "Hole fraction of point and mesh rendering versus distance");
  std::string abl_scene = "street-canyon";
  std::vector<double> abl_dist{1, 2, 3, 4};
  fs::path abl_out;
  int abl_width = 256, abl_height = 256;
  MeshOpts abl_mesh;
  raster::RasterConfig abl_raster;
  abl->add_option("--scene", abl_scene, "Preset name or scene JSON path")->capture_default_str();
  abl->add_option("--distances", abl_dist, "Forward motions, meters")->delimiter(',')->capture_default_str();
  abl->add_option("--out", abl_out, "CSV path (default: stdout)");
  abl->add_option("--width", abl_width, "Panorama width")->capture_default_str();
  abl->add_option("--height", abl_height, "Panorama height")->capture_default_str();
  abl->add_option("--splat-radius", abl_raster.splat_radius, "Point splat radius, pixels")->capture_default_str();
  abl_mesh.add(abl);

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    apply_threads(g);
    if (gen->parsed()) {
      const scene::Scene s = load_scene_seeded(gen_scene, g);
      const ImageDims dims{gen_width, gen_height};
      std::vector<io::Frame> frames;
      {
        Timer t(g.verbose, err, "render");
        if (gen_face > 0) {
          const Vec3 step = normalized(s.heading) * gen_baseline;
          const Pose start = scene::start_pose(s);
          for (int i = 0; i < gen_frames; ++i) {
            Pose p = start;
            p.position = start.position + step * static_cast<double>(i);
            const auto faces = scene::render_cubemap(s, p, gen_face);
            frames.push_back({stitch_cubemap(faces, dims), stitch_cubemap_depth(faces, dims), p});
          }
        } else {
          frames = scene::make_sequence(s, scene::start_pose(s), s.heading, gen_baseline, gen_frames, dims);
        }
      }
      fs::create_directories(gen_out);
      for (int i = 0; i < gen_frames; ++i) io::save_frame(frames[static_cast<std::size_t>(i)], io::frame_stem(gen_out, i));
      write_json(gen_out / "scene.json", scene::scene_to_json(s));
      out << "wrote " << gen_frames << " frames to " << gen_out.string() << "\n";
    } else if (dep->parsed()) {
      io::Frame a, b;
      if (!dep_poses.empty()) {
        const auto j = nlohmann::json::parse(io::read_file(dep_poses));
        a = {io::read_rgb(dep_a), std::nullopt, pose_from_json(j.at("ref"))};
        b = {io::read_rgb(dep_b), std::nullopt, pose_from_json(j.at("other"))};
      } else {
        a = io::load_frame(dep_a);
        b = io::load_frame(dep_b);
      }
      const auto cfg = dep_sweep.get();
      std::pair<sweep::DepthEstimate, sweep::DepthEstimate> est;
      {
        Timer t(g.verbose, err, "sweep");
        est = sweep::estimate_depth_pair(a.rgb, a.pose, b.rgb, b.pose, cfg);
      }
      if (dep_out.extension() == ".pfm") {
        if (dep_out.has_parent_path()) fs::create_directories(dep_out.parent_path());
        io::write_depth(est.first.depth, dep_out);
        out << "wrote " << dep_out.string() << "\n";
        return kOk;
      }
      fs::create_directories(dep_out);
      ordered_json rep;
      const std::pair<const sweep::DepthEstimate*, const io::Frame*> sides[] = {{&est.first, &a}, {&est.second, &b}};
      const char* names[] = {"a", "b"};
      for (int k = 0; k < 2; ++k) {
        const auto& e = *sides[k].first;
        io::write_depth(e.depth, dep_out / (std::string("depth_") + names[k] + ".pfm"));
        DepthMap conf(e.depth.dims());
        std::copy(e.confidence.begin(), e.confidence.end(), conf.data().begin());
        io::write_depth(conf, dep_out / (std::string("confidence_") + names[k] + ".pfm"));
        ordered_json side;
        side["consistent_fraction"] =
            static_cast<double>(e.consistent.count_visible()) / static_cast<double>(e.depth.dims().pixels());
        if (sides[k].second->depth) {
          side["metrics"] = metrics::to_json(metrics::depth_metrics(e.depth, *sides[k].second->depth, {}, &e.consistent));
        }
        rep[names[k]] = side;
      }
      write_json(dep_out / "report.json", rep);
      out << "wrote depth to " << dep_out.string() << "\n";
    } else if (ren->parsed()) {
      const auto f = io::load_frame(ren_frame);
      DepthMap d;
      if (!ren_depth.empty()) {
        d = io::read_depth(ren_depth);
      } else if (f.depth) {
        d = *f.depth;
      } else {
        throw NotFoundError("render: frame has no depth and --depth was not given");
      }
      const Pose target = io::read_pose(ren_pose);
      ren_raster.dims = f.rgb.dims();
      raster::RenderOutput r;
      if (renderer == "points") {
        r = raster::render_points(f.rgb, d, f.pose, target, ren_raster);
      } else {
        const auto m = mesh::build_mesh(f.rgb, d, ren_mesh.cfg);
        if (!ren_obj.empty()) mesh::write_obj(m, ren_obj);
        r = raster::render_mesh(m, f.pose, target, ren_raster);
      }
      fs::path stem = ren_out;
      if (stem.has_extension()) stem.replace_extension();
      if (stem.has_parent_path()) fs::create_directories(stem.parent_path());
      io::write_rgb(r.color, fs::path(stem.string() + ".png"));
      io::write_depth(r.depth, fs::path(stem.string() + ".pfm"));
      out << "hole_fraction " << raster::hole_fraction(r) << "\n";
    } else if (syn->parsed()) {
      io::Frame a = io::load_frame(syn_a);
      io::Frame b = io::load_frame(syn_b);
      fusion::SynthesisConfig cfg;
      cfg.sweep = syn_sweep.get();
      cfg.mesh = syn_mesh.cfg;
      cfg.fusion = syn_fusion.cfg;
      cfg.mask_inconsistent = syn_mask;
      if (!syn_da.empty()) {
        a.depth = io::read_depth(syn_da);
        b.depth = io::read_depth(syn_db);
        cfg.use_frame_depth = true;
      } else {
        cfg.use_frame_depth = syn_oracle;
      }
      fusion::SynthesisResult res;
      {
        Timer t(g.verbose, err, "synthesize");
        res = fusion::synthesize_sequence(a, b, syn_frames, cfg);
      }
      fs::create_directories(syn_out);
      ordered_json manifest;
      manifest["frames"] = ordered_json::array();
      for (std::size_t i = 0; i < res.frames.size(); ++i) {
        const fs::path png = io::frame_stem(syn_out, static_cast<int>(i)).string() + ".png";
        io::write_rgb(res.frames[i], png);
        ordered_json fj;
        fj["file"] = png.filename().string();
        fj["t"] = res.t[i];
        fj["pose"] = pose_to_json(res.poses[i]);
        fj["residual_hole_fraction"] = res.residual_hole_fraction[i];
        manifest["frames"].push_back(std::move(fj));
      }
      manifest["depth_source"] = cfg.use_frame_depth ? "given" : "sweep";
      write_json(syn_out / "manifest.json", manifest);
      out << "wrote " << res.frames.size() << " frames to " << syn_out.string() << "\n";
    } else if (ev->parsed()) {
      ordered_json rep;
      if (!ev_triplet.empty()) {
        fusion::SynthesisConfig cfg;
        cfg.sweep = ev_sweep.get();
        cfg.mesh = ev_mesh.cfg;
        cfg.fusion = ev_fusion.cfg;
        cfg.use_frame_depth = ev_oracle;
        const auto p0 = io::load_frame(ev_triplet[0]);
        const auto p1 = io::load_frame(ev_triplet[1]);
        const auto p2 = io::load_frame(ev_triplet[2]);
        rep = metrics::to_json(metrics::eval_triplet(p0, p1, p2, cfg, ev_range));
      } else if (!ev_pred.empty()) {
        rep = metrics::eval_directories(ev_pred, ev_gt, ev_range);
      } else {
        err << "eval: give --pred and --gt, or --triplet\n";
        return kUsage;
      }
      if (ev_out.has_parent_path()) fs::create_directories(ev_out.parent_path());
      write_json(ev_out, rep);
      out << rep.dump(2) << "\n";
    } else if (abl->parsed()) {
      const scene::Scene s = load_scene_seeded(abl_scene, g);
      const ImageDims dims{abl_width, abl_height};
      abl_raster.dims = dims;
      const Pose start = scene::start_pose(s);
      const auto src = scene::render_erp(s, start, dims);
      const auto m = mesh::build_mesh(src.color, src.depth, abl_mesh.cfg);
      std::ostringstream csv;
      csv << "distance_m,points,mesh\n" << std::setprecision(8);
      for (const double dist : abl_dist) {
        Pose target = start;
        target.position = start.position + normalized(s.heading) * dist;
        const double hp = raster::hole_fraction(raster::render_points(src.color, src.depth, start, target, abl_raster));
        const double hm = raster::hole_fraction(raster::render_mesh(m, start, target, abl_raster));
        csv << dist << "," << hp << "," << hm << "\n";
      }
      if (abl_out.empty()) {
        out << csv.str();
      } else {
        if (abl_out.has_parent_path()) fs::create_directories(abl_out.parent_path());
        io::write_file_atomic(abl_out, csv.str());
      }
    }
  } catch (const DataError& e) {
    err << "error: " << e.what() << "\n";
    return kData;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << "\n";
    return kNumerical;
  } catch (const nlohmann::json::exception& e) {
    err << "error: malformed JSON: " << e.what() << "\n";
    return kData;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kData;
  }
  return kOk;
}

}  // namespace panosynth::cli

#include "evrec/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "evrec/imageops.hpp"
#include "evrec/io.hpp"
#include "evrec/joint.hpp"
#include "evrec/metrics.hpp"

namespace evrec::cli {
namespace {

namespace fs = std::filesystem;

int64_t ms_to_us(double ms) { return std::llround(ms * 1000.0); }

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

void write_objective_csv(const std::vector<deblur::IterationRecord>& history,
                         const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << "iter,fidelity,event_term,l0_count,total\n";
  out.precision(12);
  for (const auto& rec : history) {
    out << rec.iter << "," << rec.fidelity << "," << rec.event_term << ","
        << rec.l0_count << "," << rec.total << "\n";
  }
}

void write_iterations_csv(const std::vector<joint::IterationStat>& stats,
                          const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << "iter,objective,retained_events\n";
  out.precision(12);
  for (size_t i = 0; i < stats.size(); ++i) {
    out << i + 1 << "," << stats[i].objective << "," << stats[i].retained << "\n";
  }
}

void write_kernel_grid(const std::vector<std::vector<deblur::BlurKernel>>& grid,
                       const fs::path& dir) {
  if (grid.size() == 1 && grid[0].size() == 1) {
    io::write_kernel_txt(grid[0][0], dir / "kernel.txt");
    io::write_kernel_pgm(grid[0][0], dir / "kernel.pgm");
    return;
  }
  fs::create_directories(dir / "kernels");
  for (size_t r = 0; r < grid.size(); ++r) {
    for (size_t c = 0; c < grid[r].size(); ++c) {
      const std::string stem = "k_r" + std::to_string(r) + "_c" + std::to_string(c);
      io::write_kernel_txt(grid[r][c], dir / "kernels" / (stem + ".txt"));
      io::write_kernel_pgm(grid[r][c], dir / "kernels" / (stem + ".pgm"));
    }
  }
}

// Shared deblur/denoise/joint knobs; milliseconds at the flag surface,
// microseconds at the library surface.
struct PipelineFlags {
  double alpha = 0.24;
  double beta = 0.004;
  double sigma = 1.0;
  double gamma0 = 0.008;
  double gamma_max = 1e5;
  double gamma_scale = 2.0;
  int l_max = 5;
  int kernel_size = 25;
  double tau_ms = 6.0;
  double contrast = 1.0;
  double omega = 0.05;
  int mu = 2;
  double nu_ms = 5.0;
  bool nonuniform = false;
  int patch = 128;
  int overlap = 16;

  void add_deblur_options(CLI::App* cmd) {
    cmd->add_option("--alpha", alpha, "event-prior weight")->capture_default_str();
    cmd->add_option("--beta", beta, "L0 gradient weight")->capture_default_str();
    cmd->add_option("--sigma", sigma, "kernel Tikhonov weight")->capture_default_str();
    cmd->add_option("--gamma0", gamma0, "initial splitting weight")->capture_default_str();
    cmd->add_option("--gamma-max", gamma_max, "splitting weight ceiling")->capture_default_str();
    cmd->add_option("--gamma-scale", gamma_scale, "splitting weight multiplier")
        ->capture_default_str();
    cmd->add_option("--lmax", l_max, "outer iterations")->capture_default_str();
    cmd->add_option("--kernel-size", kernel_size, "estimated kernel size (odd)")
        ->capture_default_str();
    cmd->add_option("--tau", tau_ms, "event accumulation interval, ms")->capture_default_str();
    cmd->add_option("--contrast", contrast, "contrast threshold c")->capture_default_str();
    cmd->add_flag("--nonuniform", nonuniform, "patch-wise non-uniform mode");
    cmd->add_option("--patch", patch, "patch size for --nonuniform")->capture_default_str();
    cmd->add_option("--overlap", overlap, "patch overlap for --nonuniform")
        ->capture_default_str();
  }

  void add_denoise_options(CLI::App* cmd) {
    cmd->add_option("--omega", omega, "gradient supervision level (relative)")
        ->capture_default_str();
    cmd->add_option("--mu", mu, "spatial neighbor radius, px")->capture_default_str();
    cmd->add_option("--nu", nu_ms, "temporal neighbor radius, ms")->capture_default_str();
  }

  deblur::DeblurParams deblur_params() const {
    deblur::DeblurParams p;
    p.alpha = alpha;
    p.beta = beta;
    p.sigma = sigma;
    p.gamma0 = gamma0;
    p.gamma_max = gamma_max;
    p.gamma_scale = gamma_scale;
    p.l_max = l_max;
    p.kernel_size = kernel_size;
    return p;
  }

  denoise::DenoiseParams denoise_params() const {
    denoise::DenoiseParams p;
    p.omega = omega;
    p.mu = mu;
    p.nu_us = ms_to_us(nu_ms);
    return p;
  }

  joint::JointParams joint_params(bool reuse_prior) const {
    joint::JointParams p;
    p.deblur = deblur_params();
    p.denoise = denoise_params();
    p.tau_us = ms_to_us(tau_ms);
    p.c = contrast;
    p.reuse_denoised_prior = reuse_prior;
    return p;
  }

  void describe(std::map<std::string, std::string>& meta) const {
    meta["alpha"] = fmt(alpha);
    meta["beta"] = fmt(beta);
    meta["sigma"] = fmt(sigma);
    meta["gamma0"] = fmt(gamma0);
    meta["gamma_max"] = fmt(gamma_max);
    meta["gamma_scale"] = fmt(gamma_scale);
    meta["l_max"] = std::to_string(l_max);
    meta["kernel_size"] = std::to_string(kernel_size);
    meta["tau_ms"] = fmt(tau_ms);
    meta["contrast"] = fmt(contrast);
    meta["omega"] = fmt(omega);
    meta["mu"] = std::to_string(mu);
    meta["nu_ms"] = fmt(nu_ms);
    meta["nonuniform"] = nonuniform ? "1" : "0";
    if (nonuniform) {
      meta["patch"] = std::to_string(patch);
      meta["overlap"] = std::to_string(overlap);
    }
  }
};

struct SimulateCmd {
  std::string out_dir;
  std::string case_name = "shapes";
  int width = 346, height = 260;
  double vh = -4.0 / 3.0, vv = -1.0 / 3.0;
  double duration_ms = 20.0, dt_ms = 0.25;
  double contrast = 0.3;
  double tau_ms = 6.0;
  int kernel_size = 9;
  double noise_ratio = 0.5;
  uint64_t seed = 7;

  void install(CLI::App& app) {
    CLI::App* cmd = app.add_subcommand("simulate", "generate a synthetic fixture bundle");
    cmd->add_option("--out", out_dir, "output directory")->required();
    cmd->add_option("--case", case_name, "pattern name (shapes|bars|glyphs|text)")->capture_default_str();
    cmd->add_option("--width", width)->capture_default_str();
    cmd->add_option("--height", height)->capture_default_str();
    cmd->add_option("--vh", vh, "horizontal velocity, px/ms")->capture_default_str();
    cmd->add_option("--vv", vv, "vertical velocity, px/ms")->capture_default_str();
    cmd->add_option("--duration", duration_ms, "simulated span, ms")->capture_default_str();
    cmd->add_option("--dt", dt_ms, "simulation step, ms")->capture_default_str();
    cmd->add_option("--contrast", contrast, "contrast threshold")->capture_default_str();
    cmd->add_option("--tau", tau_ms, "exposure interval, ms")->capture_default_str();
    cmd->add_option("--kernel-size", kernel_size, "motion kernel raster size")
        ->capture_default_str();
    cmd->add_option("--noise-ratio", noise_ratio, "injected noise fraction")
        ->capture_default_str();
    cmd->add_option("--seed", seed, "noise seed")->capture_default_str();
    cmd->callback([this] { execute(); });
  }

  void execute() const {
    synth::MotionSpec motion{vh, vv, duration_ms};
    deblur::BlurKernel kernel =
        synth::motion_line_kernel(vh * tau_ms, vv * tau_ms, kernel_size);
    synth::CaseBundle bundle =
        synth::make_case(case_name, width, height, motion, kernel, contrast,
                         ms_to_us(tau_ms), noise_ratio, seed, dt_ms);
    io::write_case(bundle, out_dir);
    std::cout << "wrote " << bundle.labeled.stream.size() << " events ("
              << bundle.labeled.stream.size() -
                     static_cast<size_t>(std::count(bundle.labeled.labels.begin(),
                                                    bundle.labeled.labels.end(), 1))
              << " noise) to " << out_dir << "\n";
  }
};

struct DeblurCmd {
  PipelineFlags flags;
  std::string image_path, events_path, out_dir;
  int64_t t_b_us = -1;

  void install(CLI::App& app) {
    CLI::App* cmd = app.add_subcommand("deblur", "blind deblurring of one frame");
    cmd->add_option("--image", image_path, "blurry image (pgm/png)")->required();
    cmd->add_option("--events", events_path, "event file for the prior");
    cmd->add_option("--tb", t_b_us, "frame timestamp, us (default: window center)");
    cmd->add_option("--out", out_dir, "output directory")->required();
    flags.add_deblur_options(cmd);
    cmd->callback([this] { execute(); });
  }

  void execute() {
    Image blurry = io::read_image(image_path);
    events::IntensityMap prior(blurry.width(), blurry.height());
    deblur::DeblurParams params = flags.deblur_params();
    params.validate();
    bool have_prior = false;
    if (!events_path.empty()) {
      events::EventStream stream =
          io::read_events(events_path, blurry.width(), blurry.height());
      if (!stream.empty()) {
        const int64_t t_b = t_b_us >= 0 ? t_b_us : (stream[0].t + stream[stream.size() - 1].t) / 2;
        auto [t0, t1] = events::exposure_window_for_frame(t_b, ms_to_us(flags.tau_ms));
        (void)t0;
        prior = events::integrate(stream, t1, ms_to_us(flags.tau_ms), flags.contrast);
        have_prior = true;
      }
    }
    if (!have_prior) params.alpha = 0.0;  // no events: plain L0 deblurring

    fs::create_directories(out_dir);
    std::map<std::string, std::string> meta;
    flags.describe(meta);
    meta["command"] = "deblur";
    meta["image"] = image_path;
    meta["events"] = events_path;
    meta["alpha_effective"] = fmt(params.alpha);

    if (flags.nonuniform) {
      deblur::NonuniformResult res =
          deblur::deblur_nonuniform(blurry, prior, params, flags.patch, flags.overlap);
      io::write_pgm(res.latent, fs::path(out_dir) / "latent.pgm");
      write_kernel_grid(res.kernels, out_dir);
      write_objective_csv(res.history, fs::path(out_dir) / "objective.csv");
    } else {
      deblur::BlindResult res = deblur::deblur_blind(blurry, prior, params);
      io::write_pgm(res.latent, fs::path(out_dir) / "latent.pgm");
      write_kernel_grid({{res.kernel}}, out_dir);
      write_objective_csv(res.history, fs::path(out_dir) / "objective.csv");
    }
    io::write_meta(meta, fs::path(out_dir) / "meta.txt");
  }
};

struct DenoiseCmd {
  PipelineFlags flags;
  std::string events_path, image_path, out_path, flags_out;
  bool use_nn = false;
  int min_support = 2;
  int width = 0, height = 0;

  void install(CLI::App& app) {
    CLI::App* cmd = app.add_subcommand("denoise", "event stream denoising");
    cmd->add_option("--events", events_path, "raw event file")->required();
    cmd->add_option("--image", image_path, "sharp image supplying gradient supervision");
    cmd->add_option("--width", width, "geometry when the event file has no header");
    cmd->add_option("--height", height, "geometry when the event file has no header");
    cmd->add_option("--out", out_path, "denoised event file")->required();
    cmd->add_option("--flags-out", flags_out, "per-event kept flags file");
    cmd->add_flag("--nn", use_nn, "run the nearest-neighbor baseline instead");
    cmd->add_option("--min-support", min_support, "baseline support count")
        ->capture_default_str();
    flags.add_denoise_options(cmd);
    cmd->callback([this] { execute(); });
  }

  void execute() {
    if (!use_nn && image_path.empty()) {
      throw InvalidParameter("--image is required unless --nn is given");
    }
    events::EventStream raw = io::read_events(events_path, width, height);
    events::EventStream kept(raw.width(), raw.height());
    if (use_nn) {
      kept = denoise::nn_filter(raw, flags.mu, ms_to_us(flags.nu_ms), min_support);
    } else {
      Image sharp = io::read_image(image_path);
      kept = denoise::denoise(raw, img::gradient(sharp), flags.denoise_params());
    }
    io::write_events(kept, out_path);
    if (!flags_out.empty()) io::write_kept_flags(raw, kept, flags_out);

    std::map<std::string, std::string> meta;
    flags.describe(meta);
    meta["command"] = "denoise";
    meta["events"] = events_path;
    meta["image"] = image_path;
    meta["nn"] = use_nn ? "1" : "0";
    meta["min_support"] = std::to_string(min_support);
    meta["raw_count"] = std::to_string(raw.size());
    meta["kept_count"] = std::to_string(kept.size());
    io::write_meta(meta, out_path + ".meta.txt");
    std::cout << "kept " << kept.size() << " of " << raw.size() << " events\n";
  }
};

struct ReconstructCmd {
  PipelineFlags flags;
  std::string image_path, events_path, out_dir;
  int64_t t_b_us = -1;
  bool reuse_prior = false;
  bool snapshots = false;

  void install(CLI::App& app) {
    CLI::App* cmd =
        app.add_subcommand("reconstruct", "joint deblurring and event denoising");
    cmd->add_option("--image", image_path, "blurry image (pgm/png)")->required();
    cmd->add_option("--events", events_path, "raw event file")->required();
    cmd->add_option("--tb", t_b_us, "frame timestamp, us (default: stream midpoint)");
    cmd->add_option("--out", out_dir, "output directory")->required();
    cmd->add_flag("--reuse-denoised-prior", reuse_prior,
                  "re-integrate the prior from denoised events each iteration");
    cmd->add_flag("--snapshots", snapshots, "write per-iteration snapshots");
    flags.add_deblur_options(cmd);
    flags.add_denoise_options(cmd);
    cmd->callback([this] { execute(); });
  }

  void execute() {
    Image blurry = io::read_image(image_path);
    events::EventStream raw = io::read_events(events_path, blurry.width(), blurry.height());
    const int64_t t_b =
        t_b_us >= 0 ? t_b_us
                    : (raw.empty() ? 0 : (raw[0].t + raw[raw.size() - 1].t) / 2);
    joint::JointParams params = flags.joint_params(reuse_prior);
    params.validate();

    fs::create_directories(out_dir);
    joint::SnapshotFn observer;
    if (snapshots) {
      fs::create_directories(fs::path(out_dir) / "snapshots");
      observer = [this](int iter, const Image& latent, const events::EventStream& denoised) {
        char stem[32];
        std::snprintf(stem, sizeof(stem), "iter_%02d", iter);
        io::write_pgm(clamp01(latent), fs::path(out_dir) / "snapshots" /
                                           (std::string(stem) + "_latent.pgm"));
        io::write_events(denoised, fs::path(out_dir) / "snapshots" /
                                       (std::string(stem) + "_events.csv"));
      };
    }

    joint::JointResult res =
        flags.nonuniform
            ? joint::reconstruct_nonuniform(blurry, raw, t_b, params, flags.patch,
                                            flags.overlap, observer)
            : joint::reconstruct(blurry, raw, t_b, params, observer);

    io::write_pgm(res.sharp, fs::path(out_dir) / "latent.pgm");
    io::write_png(res.sharp, fs::path(out_dir) / "latent.png");
    write_kernel_grid(res.kernel_grid, out_dir);
    io::write_events(res.denoised, fs::path(out_dir) / "denoised.csv");
    write_iterations_csv(res.per_iteration, fs::path(out_dir) / "iterations.csv");

    std::map<std::string, std::string> meta;
    flags.describe(meta);
    meta["command"] = "reconstruct";
    meta["image"] = image_path;
    meta["events"] = events_path;
    meta["t_b_us"] = std::to_string(t_b);
    meta["reuse_denoised_prior"] = reuse_prior ? "1" : "0";
    meta["snapshots"] = snapshots ? "1" : "0";
    meta["prior_window_empty"] = res.prior_window_empty ? "1" : "0";
    io::write_meta(meta, fs::path(out_dir) / "meta.txt");
    if (res.prior_window_empty) {
      std::cerr << "warning: no events in the exposure window; ran plain L0 deblurring\n";
    }
    std::cout << "retained " << res.denoised.size() << " of " << raw.size() << " events\n";
  }
};

struct EvaluateCmd {
  std::string case_name = "case";
  std::string image_path, ref_path;
  std::string kernel_path, ref_kernel_path;
  std::string kept_path, labels_path;
  std::string out_csv;
  bool append = false;
  int width = 0, height = 0;

  void install(CLI::App& app) {
    CLI::App* cmd = app.add_subcommand("evaluate", "metrics for one case");
    cmd->add_option("--name", case_name, "case label for the CSV row")->capture_default_str();
    cmd->add_option("--image", image_path, "image under test");
    cmd->add_option("--ref", ref_path, "reference image");
    cmd->add_option("--kernel", kernel_path, "kernel under test");
    cmd->add_option("--ref-kernel", ref_kernel_path, "reference kernel");
    cmd->add_option("--kept", kept_path, "denoised event file");
    cmd->add_option("--labels", labels_path, "labeled event file");
    cmd->add_option("--width", width)->capture_default_str();
    cmd->add_option("--height", height)->capture_default_str();
    cmd->add_option("--out", out_csv, "metrics CSV")->required();
    cmd->add_flag("--append", append, "append to an existing CSV");
    cmd->callback([this] { execute(); });
  }

  void execute() const {
    std::string mse_s, ssim_s, tpr_s, fpr_s, ppv_s, acc_s, ksim_s;
    auto fmt_opt = [](const std::optional<double>& v) {
      return v ? fmt(*v) : std::string("undef");
    };
    if (!image_path.empty() != !ref_path.empty()) {
      throw InvalidParameter("--image and --ref must be given together");
    }
    if (!image_path.empty()) {
      Image a = io::read_image(image_path);
      Image b = io::read_image(ref_path);
      mse_s = fmt(metrics::mse(a, b));
      ssim_s = fmt(metrics::ssim(a, b));
    }
    if (!kernel_path.empty() != !ref_kernel_path.empty()) {
      throw InvalidParameter("--kernel and --ref-kernel must be given together");
    }
    if (!kernel_path.empty()) {
      ksim_s = fmt(metrics::kernel_similarity(io::read_kernel_txt(kernel_path),
                                              io::read_kernel_txt(ref_kernel_path)));
    }
    if (!kept_path.empty() != !labels_path.empty()) {
      throw InvalidParameter("--kept and --labels must be given together");
    }
    if (!kept_path.empty()) {
      synth::LabeledStream labeled = io::read_labeled(labels_path, width, height);
      events::EventStream kept =
          io::read_events(kept_path, labeled.stream.width(), labeled.stream.height());
      metrics::ClassificationReport rep = metrics::classify_report(kept, labeled);
      tpr_s = fmt_opt(rep.tpr);
      fpr_s = fmt_opt(rep.fpr);
      ppv_s = fmt_opt(rep.ppv);
      acc_s = fmt_opt(rep.acc);
    }

    const bool exists = fs::exists(out_csv);
    std::ofstream out(out_csv, append ? std::ios::app : std::ios::trunc);
    if (!out) throw IoError("cannot write " + out_csv);
    if (!append || !exists) out << "case,mse,ssim,tpr,fpr,ppv,acc,kernel_sim\n";
    out << case_name << "," << mse_s << "," << ssim_s << "," << tpr_s << "," << fpr_s
        << "," << ppv_s << "," << acc_s << "," << ksim_s << "\n";

    std::map<std::string, std::string> meta;
    meta["command"] = "evaluate";
    meta["name"] = case_name;
    meta["image"] = image_path;
    meta["ref"] = ref_path;
    meta["kernel"] = kernel_path;
    meta["ref_kernel"] = ref_kernel_path;
    meta["kept"] = kept_path;
    meta["labels"] = labels_path;
    io::write_meta(meta, out_csv + ".meta.txt");
  }
};

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"joint frame deblurring and event denoising"};
  app.require_subcommand(1);
  app.set_config("--config", "", "key=value config file; command-line flags win");

  SimulateCmd simulate;
  DeblurCmd deblur_cmd;
  DenoiseCmd denoise_cmd;
  ReconstructCmd reconstruct_cmd;
  EvaluateCmd evaluate_cmd;
  simulate.install(app);
  deblur_cmd.install(app);
  denoise_cmd.install(app);
  reconstruct_cmd.install(app);
  evaluate_cmd.install(app);

  try {
    app.parse(argc, argv);
    return 0;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const InvalidParameter& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const DimensionMismatch& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace evrec::cli

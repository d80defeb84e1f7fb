// Copyright 2026 The BSMamba Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// bsmamba: inference, evaluation, self-test, scan benchmarks and geometry
// utilities for the two-branch segmentation network.
//
// Exit codes: 0 ok, 1 usage or failed self-test, 2 format or I/O, 3 shape.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "acceptance/checks.hpp"
#include "bsm/checkpoint.hpp"
#include "bsm/error.hpp"
#include "bsm/loss.hpp"
#include "bsm/mask.hpp"
#include "bsm/metrics.hpp"
#include "bsm/model.hpp"
#include "bsm/netpbm.hpp"
#include "bsm/parallel.hpp"
#include "bsm/simd.hpp"
#include "bsm/ssm.hpp"
#include "bsm/tiling.hpp"
#include "support/oracles.hpp"

namespace {

using namespace bsm;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitFormat = 2;
constexpr int kExitShape = 3;

/// Thrown for option values that pass parsing but not validation.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::size_t channels = 16;
  std::size_t state_dim = 16;
  std::size_t window = 2;
  std::size_t block = 64;
  double lambda1 = 0.5;
  double lambda2 = 0.5;
  std::size_t tile = kTileSize;
  std::size_t nx = kTilesX;
  std::size_t ny = kTilesY;
  std::uint64_t seed = 0;
  std::string precision = "f32";
  std::size_t threads = 1;

  ModelConfig model() const {
    ModelConfig cfg;
    cfg.base_channels = channels;
    cfg.state_dim = state_dim;
    cfg.window = window;
    cfg.scan_block = block;
    cfg.directions = default_stage_directions(window);
    return cfg;
  }

  void validate() const {
    try {
      model().validate();
      LossWeights{lambda1, lambda2}.validate();
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
    if (tile == 0 || tile % ModelConfig::kInputMultiple != 0) {
      throw UsageError("--tile must be a positive multiple of " +
                       std::to_string(ModelConfig::kInputMultiple));
    }
    if (nx < 2 || ny < 2) throw UsageError("--nx and --ny must be at least 2");
  }
};

void add_shared_options(CLI::App& app, RunConfig& rc) {
  app.add_option("--channels", rc.channels, "Base channel count (stage i has channels·2^i)")
      ->capture_default_str();
  app.add_option("--state-dim", rc.state_dim, "SSM state dimension N")->capture_default_str();
  app.add_option("--window", rc.window, "Local scan window size")->capture_default_str();
  app.add_option("--block", rc.block, "Blocked-scan block length")->capture_default_str();
  app.add_option("--lambda1", rc.lambda1, "Cross-entropy weight")->capture_default_str();
  app.add_option("--lambda2", rc.lambda2, "mIoU loss weight")->capture_default_str();
  app.add_option("--tile", rc.tile, "Scene tile size")->capture_default_str();
  app.add_option("--nx", rc.nx, "Tiles across a scene")->capture_default_str();
  app.add_option("--ny", rc.ny, "Tiles down a scene")->capture_default_str();
  app.add_option("--seed", rc.seed, "Random seed")->capture_default_str();
  app.add_option("--precision", rc.precision, "Arithmetic precision")
      ->check(CLI::IsMember({"f32", "f64"}))
      ->capture_default_str();
  app.add_option("--threads", rc.threads, "Worker threads")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
}

// ---------------------------------------------------------------- infer

struct InferArgs {
  std::string weights;
  std::string image;
  std::string scene;
  std::string out;
  std::string probs;
};

TensorF predict(const TensorF& image, const BsMambaWeights<float>& w,
                const BsMambaWeights<double>* wd, const ModelConfig& cfg) {
  if (wd != nullptr) return forward(image.cast<double>(), *wd, cfg).cast<float>();
  return forward(image, w, cfg);
}

// [1,2,H,W] -> [2,H,W]
TensorF drop_batch(const TensorF& probs) {
  return probs.reshaped({probs.dim(1), probs.dim(2), probs.dim(3)});
}

int cmd_infer(const InferArgs& args, const RunConfig& rc) {
  if (args.image.empty() == args.scene.empty()) {
    throw UsageError("infer needs exactly one of --image or --scene");
  }
  const ModelConfig cfg = rc.model();
  const BsMambaWeights<float> weights = from_table(load_checkpoint(args.weights), cfg);
  BsMambaWeights<double> weights_d;
  const bool f64 = rc.precision == "f64";
  if (f64) weights_d = weights.cast<double>();
  const BsMambaWeights<double>* wd = f64 ? &weights_d : nullptr;

  TensorF probs;
  if (!args.image.empty()) {
    probs = drop_batch(predict(image_to_tensor(read_ppm(args.image)), weights, wd, cfg));
  } else {
    const RgbImage scene = read_ppm(args.scene);
    const TileGrid grid = plan_tiles(scene.width, scene.height, rc.tile, rc.nx, rc.ny);
    const std::vector<RgbImage> tiles = split_scene(scene, grid);
    std::vector<TensorF> tile_probs(tiles.size());
    parallel_for(tiles.size(), [&](std::size_t k) {
      tile_probs[k] = drop_batch(predict(image_to_tensor(tiles[k]), weights, wd, cfg));
    });
    probs = stitch_predictions(tile_probs, grid);
    std::cerr << "stitched " << tiles.size() << " tiles of " << rc.tile << "x" << rc.tile << "\n";
  }

  write_pgm(args.out, mask_to_gray(decode_mask(probs)));
  if (!args.probs.empty()) {
    write_pgm(args.probs + "_blk.pgm", probability_to_gray(probs, Label::blk));
    write_pgm(args.probs + "_mat.pgm", probability_to_gray(probs, Label::mat));
  }
  return kExitOk;
}

// ---------------------------------------------------------------- eval

struct EvalArgs {
  std::string pred;
  std::string gt;
  std::string out;
  bool loss = false;
};

int cmd_eval(const EvalArgs& args, const RunConfig& rc) {
  const GrayImage pred_gray = read_pgm(args.pred);
  const GrayImage gt_gray = read_pgm(args.gt);
  const MaskImage pred = mask_from_gray(pred_gray);
  const MaskImage gt = mask_from_gray(gt_gray);
  const MetricsReport report = evaluate(pred, gt);

  std::string header = metrics_csv_header();
  std::string row = metrics_csv_row(report);
  if (args.loss) {
    // the prediction raster is read as the mat probability, gray/255
    const std::size_t plane = pred_gray.width * pred_gray.height;
    TensorD y({1, 2, pred_gray.height, pred_gray.width});
    for (std::size_t p = 0; p < plane; ++p) {
      y[plane + p] = pred_gray.pixels[p] / 255.0;
      y[p] = 1.0 - y[plane + p];
    }
    const TensorD t = one_hot(gt).cast<double>().reshaped(y.dims());
    const LossWeights lw{rc.lambda1, rc.lambda2};
    char buf[128];
    std::snprintf(buf, sizeof buf, ",%.6f,%.6f,%.6f", ce_loss(y, t), miou_loss(y, t),
                  total_loss(y, t, lw));
    header += ",ce_loss,miou_loss,total_loss";
    row += buf;
  }
  const std::string csv = header + "\n" + row + "\n";
  std::cout << csv;
  if (!args.out.empty()) {
    std::ofstream file(args.out, std::ios::binary);
    if (!(file << csv)) throw IoError("cannot write " + args.out);
  }
  return kExitOk;
}

// ---------------------------------------------------------------- selftest

int cmd_selftest(const std::string& only) {
  const auto results = checks::run_checks(std::cout, only);
  if (results.empty()) throw UsageError("no self-test matches '" + only + "'");
  std::size_t passed = 0;
  for (const auto& r : results) passed += r.passed;
  std::cout << passed << "/" << results.size() << " checks passed\n";
  return checks::all_passed(results) ? kExitOk : kExitUsage;
}

// ---------------------------------------------------------------- bench

struct BenchArgs {
  std::size_t length = 4096;
  std::size_t channels = 16;
  std::size_t state = 16;
  std::vector<std::size_t> blocks = {16, 64, 256};
  std::size_t repeat = 3;
};

template <typename T>
void bench_scan(const BenchArgs& args, const RunConfig& rc) {
  oracle::Rng rng(rc.seed);
  const auto in = oracle::random_scan_inputs<T>(rng, 1, args.length, args.channels, args.state);
  const auto step = ssm::discretize(in);
  const double elements = static_cast<double>(args.length * args.channels * args.state);

  auto time_it = [&](auto&& fn) {
    double best = 1e300;
    for (std::size_t r = 0; r < args.repeat; ++r) {
      const auto start = std::chrono::steady_clock::now();
      fn();
      best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                                .count());
    }
    return best;
  };

  std::printf("method,block,L,D,N,precision,simd,threads,seconds,elements_per_second\n");
  auto report = [&](const char* method, std::size_t block, double secs) {
    std::printf("%s,%zu,%zu,%zu,%zu,%s,%s,%zu,%.6f,%.4e\n", method, block, args.length,
                args.channels, args.state, rc.precision.c_str(),
                std::string(simd::level_name(simd::active_level())).c_str(), num_threads(), secs,
                elements / secs);
  };
  report("sequential", args.length,
         time_it([&] { (void)ssm::scan_sequential(step, in.x, in.c); }));
  for (std::size_t block : args.blocks) {
    if (block == 0) throw UsageError("--block values must be positive");
    report("blocked", block, time_it([&] { (void)ssm::scan_blocked(step, in.x, in.c, block); }));
  }
}

int cmd_bench(const BenchArgs& args, const RunConfig& rc) {
  if (args.length == 0 || args.channels == 0 || args.state == 0 || args.repeat == 0) {
    throw UsageError("--L, --D, --N and --repeat must be positive");
  }
  if (rc.precision == "f64") {
    bench_scan<double>(args, rc);
  } else {
    bench_scan<float>(args, rc);
  }
  return kExitOk;
}

// ---------------------------------------------------------------- scan-order, init

struct ScanOrderArgs {
  std::size_t h = 0;
  std::size_t w = 0;
  std::string strategy = "horizontal";
};

int cmd_scan_order(const ScanOrderArgs& args) {
  if (args.h == 0 || args.w == 0) throw UsageError("scan-order needs positive --h and --w");
  const Permutation p = build_scan_order(args.h, args.w, parse_scan_strategy(args.strategy));
  std::string line;
  for (std::size_t i = 0; i < p.size(); ++i) line += (i ? "," : "") + std::to_string(p[i]);
  std::cout << line << "\n";
  return kExitOk;
}

int cmd_init(const std::string& out, const RunConfig& rc) {
  const ModelWeights w = init_weights(rc.model(), rc.seed);
  save_checkpoint(out, w);
  std::size_t params = 0;
  for (const auto& [name, t] : w.entries()) params += t.size();
  std::cerr << "wrote " << w.size() << " tensors, " << params << " parameters to " << out << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-branch segmentation network: inference, evaluation and diagnostics"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "Flat key=value file; command-line flags take precedence");

  RunConfig rc;
  add_shared_options(app, rc);

  InferArgs infer;
  auto* infer_cmd = app.add_subcommand("infer", "Predict a label mask for an image or a scene");
  infer_cmd->add_option("--weights", infer.weights, "Checkpoint file")->required();
  infer_cmd->add_option("--image", infer.image, "PPM whose sides are multiples of 32");
  infer_cmd->add_option("--scene", infer.scene, "Large PPM processed tile by tile");
  infer_cmd->add_option("--out", infer.out, "Output PGM (0 = blk, 255 = mat)")->required();
  infer_cmd->add_option("--probs", infer.probs, "Prefix for per-class probability PGMs");

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "Metrics CSV for a predicted mask against ground truth");
  eval_cmd->add_option("--pred", eval.pred, "Predicted mask or probability PGM")->required();
  eval_cmd->add_option("--gt", eval.gt, "Ground-truth PGM")->required();
  eval_cmd->add_option("--out", eval.out, "Also write the CSV here");
  eval_cmd->add_flag("--loss", eval.loss, "Append ce, mIoU and total losses (pred read as P(mat))");

  std::string only;
  auto* selftest_cmd = app.add_subcommand("selftest", "Run the oracle checks");
  selftest_cmd->add_option("--only", only, "Run checks whose name contains this text");

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "Sequential vs blocked scan throughput CSV");
  bench_cmd->add_option("--L", bench.length, "Sequence length")->capture_default_str();
  bench_cmd->add_option("--D", bench.channels, "Channels")->capture_default_str();
  bench_cmd->add_option("--N", bench.state, "State dimension")->capture_default_str();
  bench_cmd->add_option("--block,--blocks", bench.blocks, "Block lengths to time, comma separated")->delimiter(',');
  bench_cmd->add_option("--repeat", bench.repeat, "Timing repetitions (best is kept)")
      ->capture_default_str();

  ScanOrderArgs order;
  auto* order_cmd = app.add_subcommand("scan-order", "Print a scan permutation as an index list");
  order_cmd->set_help_flag("--help", "Print this help message and exit");  // frees -h for --h
  order_cmd->add_option("--h,h", order.h, "Grid height");
  order_cmd->add_option("--w,w", order.w, "Grid width");
  order_cmd->add_option("--strategy,strategy", order.strategy,
                        "horizontal, vertical, local_window<k>, local_window_flipped<k>")
      ->capture_default_str();

  std::string init_out;
  auto* init_cmd = app.add_subcommand("init", "Write a seeded random checkpoint");
  init_cmd->add_option("--out", init_out, "Checkpoint path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    rc.validate();
    set_num_threads(rc.threads);
    if (*infer_cmd) return cmd_infer(infer, rc);
    if (*eval_cmd) return cmd_eval(eval, rc);
    if (*selftest_cmd) return cmd_selftest(only);
    if (*bench_cmd) return cmd_bench(bench, rc);
    if (*order_cmd) return cmd_scan_order(order);
    if (*init_cmd) return cmd_init(init_out, rc);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const FormatError& e) {
    std::cerr << "format error: " << e.what() << "\n";
    return kExitFormat;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kExitFormat;
  } catch (const DimensionError& e) {
    std::cerr << "shape error: " << e.what() << "\n";
    return kExitShape;
  } catch (const DomainError& e) {
    std::cerr << "shape error: " << e.what() << "\n";
    return kExitShape;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

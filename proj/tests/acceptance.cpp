// Copyright 2026 The wlc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Tolerances are pinned in the constants below.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fuzz.hpp"
#include "oracles.hpp"
#include "wlc/learning.hpp"
#include "wlc/pipeline.hpp"

namespace {

using namespace wlc;
using Clock = std::chrono::steady_clock;

// ---- pinned tolerances -------------------------------------------------------
constexpr double kWptDoubleTol = 1e-10;
constexpr double kWptFloatTol = 1e-5;
constexpr double kWptSeconds = 1.0;
constexpr double kOracleTol = 1e-10;
constexpr double kGradTol = 1e-3;
constexpr double kGradStep = 1e-4;
constexpr int kFuzzContainers = 10000;
constexpr double kEntropySlack = 1.02;
constexpr double kEntropyBytes = 16.0;
constexpr std::size_t kResiliencePatches = 60;  // >= 50
constexpr std::size_t kResiliencePatch = 96;
constexpr double kResilienceDb = 1.0;
constexpr double kBaselineGainDb = 2.0;
constexpr std::size_t kAnalysisParamLimit = 100000;
constexpr double kAsymmetry = 20.0;
constexpr std::size_t kBenchReps = 5;
constexpr std::size_t kBenchW = 768, kBenchH = 512;
constexpr double kBenchSeconds = 120.0;
constexpr double kLearningGap = 0.05;
constexpr std::size_t kLearningSeeds = 5, kLearningWins = 4;
constexpr double kLearningSeconds = 30.0 * 60.0;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

// ---- 1, 2: wavelet packets -------------------------------------------------------

Outcome wpt_reconstruction() {
  const auto xd = oracle::random_tensor<double>({3, 256, 256}, 1);
  const auto t0 = Clock::now();
  const double ed = max_abs_diff(wpt_inverse(wpt_forward(xd, 3)), xd);
  const double secs = seconds_since(t0);
  const auto xf = oracle::random_tensor<float>({3, 256, 256}, 2);
  const double ef = max_abs_diff(wpt_inverse(wpt_forward(xf, 3)), xf);
  return {ed < kWptDoubleTol && ef < kWptFloatTol && secs < kWptSeconds,
          fmt("max_err_double=%.3g (<%.0e) max_err_single=%.3g (<%.0e)", ed, kWptDoubleTol, ef, kWptFloatTol) +
              fmt(" double_roundtrip_s=%.3f (<%.1f)", secs, kWptSeconds)};
}

Outcome wpt_oracle() {
  const FilterBank fb = make_cdf97_filterbank();
  double worst = 0.0;
  int cases = 0;
  for (int n = 4; n <= 32; n += 4) {
    for (int levels = 1; levels <= 2; ++levels) {
      if (n % (1 << levels)) continue;
      const auto x = oracle::random_tensor<double>({1, static_cast<std::size_t>(n)}, static_cast<std::uint64_t>(100 + n * 3 + levels));
      Eigen::VectorXd xv(n);
      for (int i = 0; i < n; ++i) xv(i) = x[static_cast<std::size_t>(i)];
      const Eigen::VectorXd want = oracle::packet_matrix(fb, n, levels) * xv;
      const auto y = wpt_forward(x, levels);
      for (int i = 0; i < n; ++i) worst = std::max(worst, std::fabs(y.coeffs[static_cast<std::size_t>(i)] - want(i)));
      ++cases;
    }
  }
  return {worst < kOracleTol, fmt("cases=%.0f max_err=%.3g (<%.0e)", cases, worst, kOracleTol)};
}

// ---- 3: gradients --------------------------------------------------------------

using P = Parameter<double>;

P random_param(const std::string& name, Shape shape, std::uint64_t seed, double scale = 1.0) {
  return P(name, oracle::random_tensor<double>(std::move(shape), seed, -scale, scale));
}

Var loss_against(Tape<double>& t, Var y, std::uint64_t seed) {
  return ops::mse(t, y, t.constant(oracle::random_tensor<double>(t.shape(y), seed)));
}

double check(std::vector<P>& params, const std::function<Var(Tape<double>&, std::vector<P>&)>& build,
             std::size_t probes = 40) {
  std::vector<P*> ptrs;
  for (auto& p : params) ptrs.push_back(&p);
  GradCheckOptions o;
  o.probes = probes;
  o.step = kGradStep;
  o.seed = 17;
  return grad_check<double>([&](Tape<double>& t) { return build(t, params); }, ptrs, o).max_relative_error;
}

Outcome gradients() {
  std::vector<std::pair<std::string, double>> errs;
  auto run = [&](const std::string& name, std::vector<P> params,
                 const std::function<Var(Tape<double>&, std::vector<P>&)>& build) {
    errs.emplace_back(name, check(params, build));
  };
  run("dense", {random_param("x", {2, 5, 3}, 20), random_param("w", {5, 4}, 21), random_param("b", {4}, 22)},
      [](Tape<double>& t, std::vector<P>& p) {
        return loss_against(t, ops::dense(t, t.parameter(p[0]), t.parameter(p[1]), t.parameter(p[2])), 100);
      });
  run("conv2d",
      {random_param("x", {2, 3, 4, 5}, 23), random_param("k", {2, 3, 3, 3}, 24), random_param("b", {2}, 25)},
      [](Tape<double>& t, std::vector<P>& p) {
        return loss_against(t, ops::conv(t, t.parameter(p[0]), t.parameter(p[1]), t.parameter(p[2])), 101);
      });
  run("conv1d", {random_param("x", {2, 3, 7}, 26), random_param("k", {4, 3, 3}, 27), random_param("b", {4}, 28)},
      [](Tape<double>& t, std::vector<P>& p) {
        return loss_against(t, ops::conv(t, t.parameter(p[0]), t.parameter(p[1]), t.parameter(p[2])), 102);
      });
  run("silu_add_pool", {random_param("x", {2, 3, 4, 4}, 29, 3.0)}, [](Tape<double>& t, std::vector<P>& p) {
    Var x = t.parameter(p[0]);
    return loss_against(t, ops::global_average_pool(t, ops::add(t, ops::silu(t, x), x)), 103);
  });
  run("bce", {random_param("logits", {4, 1}, 30, 4.0)},
      [](Tape<double>& t, std::vector<P>& p) { return ops::bce_with_logits(t, t.parameter(p[0]), {1, 0, 1, 1}); });
  run("wpt_iwpt_2d", {random_param("x", {2, 2, 8, 8}, 31)}, [](Tape<double>& t, std::vector<P>& p) {
    Var b = ops::silu(t, ops::wpt(t, t.parameter(p[0]), Kind::k2D, 2));
    return loss_against(t, ops::iwpt(t, b, Kind::k2D, 2), 104);
  });
  run("wpt_iwpt_1d", {random_param("x", {1, 2, 16}, 32)}, [](Tape<double>& t, std::vector<P>& p) {
    Var b = ops::silu(t, ops::wpt(t, t.parameter(p[0]), Kind::k1D, 3));
    return loss_against(t, ops::iwpt(t, b, Kind::k1D, 3), 105);
  });
  run("compand", {random_param("z", {2, 3, 4}, 33, 2.0), random_param("log_scale", {3}, 34, 0.5)},
      [](Tape<double>& t, std::vector<P>& p) {
        Var y = ops::compand(t, t.parameter(p[0]), t.parameter(p[1]));
        return ops::mse(t, y, t.constant(oracle::random_tensor<double>(t.shape(y), 106, -100.0, 100.0)));
      });
  run("decompand", {random_param("y", {2, 3, 4}, 35, 120.0), random_param("log_scale", {3}, 36, 0.5)},
      [](Tape<double>& t, std::vector<P>& p) {
        return loss_against(t, ops::decompand(t, t.parameter(p[0]), t.parameter(p[1])), 107);
      });
  for (Kind kind : {Kind::k2D, Kind::k1D}) {
    CodecConfig c;
    c.kind = kind;
    c.channels = 2;
    c.levels = 1;
    c.latent_channels = 3;
    c.hidden = 4;
    c.depth = 2;
    CodecModel<double> m(c);
    m.init(15);
    Rng rng(16);
    for (auto& v : m.exit_weight.value) v = rng.uniform(-0.5, 0.5);
    for (auto& v : m.log_scale.value) v = rng.uniform(-0.3, 0.3);
    const Shape xs = kind == Kind::k2D ? Shape{2, 2, 4, 6} : Shape{2, 2, 8};
    const auto x = oracle::random_tensor<double>(xs, 17);
    Shape ns = m.latent_shape(Shape(xs.begin() + 1, xs.end()));
    ns.insert(ns.begin(), 2);
    const auto noise = oracle::random_tensor<double>(ns, 18, -0.5, 0.5);
    GradCheckOptions o;
    o.probes = 200;
    o.step = kGradStep;
    o.seed = 19;
    const auto r = grad_check<double>([&](Tape<double>& t) { return m.training_loss(t, x, &noise); },
                                      m.parameters(), o);
    errs.emplace_back(kind == Kind::k2D ? "training_graph_2d" : "training_graph_1d", r.max_relative_error);
  }
  double worst = 0.0;
  std::string which;
  for (const auto& [n, e] : errs)
    if (e >= worst) {
      worst = e;
      which = n;
    }
  return {worst < kGradTol, fmt("graphs=%.0f max_rel_err=%.3g (<%.0e)", static_cast<double>(errs.size()), worst,
                                kGradTol) +
                                " worst=" + which};
}

// ---- 4: bitstream ----------------------------------------------------------------

Outcome bitstream() {
  Rng rng(2026);
  int mismatches = 0;
  double worst_excess = -1e9;
  std::size_t channels = 0;
  for (int trial = 0; trial < kFuzzContainers; ++trial) {
    const Container c = fuzz::random_container(rng);
    const Container back = read_container(write_container(c));
    if (!(back.header == c.header) || !(back.latent == c.latent)) ++mismatches;
    const std::size_t ch = c.latent.extent(0), per = c.latent.size() / ch;
    for (std::size_t k = 0; k < ch; ++k) {
      const std::vector<std::int8_t> s(c.latent.data() + k * per, c.latent.data() + (k + 1) * per);
      const double bytes = static_cast<double>(rans_encode(s, build_freq_table(s)).size());
      worst_excess = std::max(worst_excess, bytes - (kEntropySlack * oracle::entropy_bytes(s) + kEntropyBytes));
      ++channels;
    }
  }
  return {mismatches == 0 && worst_excess <= 0.0,
          fmt("containers=%.0f mismatches=%.0f channels=%.0f", kFuzzContainers, mismatches,
              static_cast<double>(channels)) +
              fmt(" worst_payload_minus_bound=%.2f bytes (<=0, bound=%.2f*H+%.0f)", worst_excess, kEntropySlack,
                  kEntropyBytes)};
}

// ---- 5, 6: trained 4x image codec ---------------------------------------------------

struct ImageData {
  std::vector<Tensor<float>> train, held_out;
};

ImageData image_data() {
  ImageData d;
  Rng rng(4242);
  for (int i = 0; i < 32; ++i) d.train.push_back(synth_image(256, 256, rng));
  Rng held(9191);
  for (int i = 0; i < 12; ++i) d.held_out.push_back(synth_image(256, 256, held));
  return d;
}

CodecModel<float> trained(const std::string& cfg, const ImageData& d, double& secs) {
  const ModelSpec spec = load_model_spec(std::string(WLC_CONFIG_DIR) + "/" + cfg);
  std::vector<std::size_t> idx(d.train.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  const auto t0 = Clock::now();
  CodecModel<float> m = train_model(spec, d.train, idx);
  secs = seconds_since(t0);
  std::printf("# trained %s (%s, %zu steps) in %.1f s\n", cfg.c_str(), to_string(spec.codec).c_str(),
              spec.train.steps, secs);
  std::fflush(stdout);
  return m;
}

Outcome resilience(const CodecModel<float>& m, const ImageData& d) {
  Rng rng(77);
  std::vector<std::size_t> idx(d.held_out.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  const auto patches = random_crops(d.held_out, idx, kResiliencePatches, {kResiliencePatch, kResiliencePatch}, rng);
  double cont = 0.0, quant = 0.0;
  for (const auto& p : patches) {
    cont += psnr(p, clip_unit(m.reconstruct_continuous(p)));
    quant += psnr(p, clip_unit(m.reconstruct(p)));
  }
  const double n = static_cast<double>(patches.size());
  cont /= n;
  quant /= n;
  return {cont - quant <= kResilienceDb && patches.size() >= 50,
          fmt("patches=%.0f psnr_continuous=%.3f psnr_quantized=%.3f drop=%.3f dB", n, cont, quant, cont - quant) +
              fmt(" (<=%.1f)", kResilienceDb)};
}

Outcome rate_distortion(const CodecModel<float>& m, const ImageData& d) {
  double codec = 0.0, base = 0.0, worst_gap = 1e9, cr = 0.0;
  for (const auto& x : d.held_out) {
    const EvalRow r = evaluate(m, x);
    const double b = psnr(x, bicubic_round_trip(x, 2));
    codec += r.quality.psnr;
    base += b;
    cr += r.compression_ratio;
    worst_gap = std::min(worst_gap, r.quality.psnr - b);
  }
  const double n = static_cast<double>(d.held_out.size());
  const double gain = (codec - base) / n;
  return {gain >= kBaselineGainDb,
          fmt("images=%.0f psnr_codec=%.3f psnr_bicubic2x=%.3f gain=%.3f dB", n, codec / n, base / n, gain) +
              fmt(" (>=%.1f) worst_image_gain=%.3f mean_cr=%.3f dr=%.1f", kBaselineGainDb, worst_gap, cr / n,
                  m.config().dimensionality_reduction())};
}

// ---- 7: shipped config geometry ----------------------------------------------------

Outcome dimensionality() {
  struct Want {
    const char* file;
    std::size_t num, den;  // expected DR as a fraction
  };
  const Want wants[] = {{"image4x.cfg", 4, 1}, {"image16x.cfg", 16, 1}, {"audio5x.cfg", 512, 108}, {"audio20x.cfg", 512, 27}};
  bool ok = true;
  std::string detail;
  for (const auto& w : wants) {
    const CodecConfig c = load_model_spec(std::string(WLC_CONFIG_DIR) + "/" + w.file).codec;
    const std::size_t d = static_cast<std::size_t>(c.dims());
    const std::size_t num = c.channels << (static_cast<std::size_t>(c.levels) * d);
    // Exact: cross-multiplied integer comparison, plus the double the library reports.
    const bool exact = num * w.den == c.latent_channels * w.num &&
                       c.dimensionality_reduction() == static_cast<double>(w.num) / static_cast<double>(w.den);
    CodecModel<float> m(c);
    const std::size_t params = m.analysis_weight.value.size() + m.analysis_bias.value.size();
    ok = ok && exact && params < kAnalysisParamLimit && params == c.analysis_parameter_count();
    detail += std::string(" ") + w.file + fmt(":dr=%.4f analysis_params=%.0f", c.dimensionality_reduction(),
                                              static_cast<double>(params));
  }
  return {ok, detail.substr(1) + fmt(" (<%.0f)", static_cast<double>(kAnalysisParamLimit))};
}

// ---- 8: encoder/decoder asymmetry ----------------------------------------------------

Outcome asymmetry(const CodecModel<float>& m) {
  Rng rng(8);
  const Tensor<float> x = synth_image(kBenchH, kBenchW, rng);
  const auto t0 = Clock::now();
  const QuantizedLatent q = m.encode(x);
  const double samples = static_cast<double>(kBenchW * kBenchH);
  const ThroughputReport enc = bench([&] { (void)m.encode(x); }, samples, kBenchReps);
  const ThroughputReport dec = bench([&] { (void)m.decode(q); }, samples, kBenchReps);
  const double secs = seconds_since(t0);
  const double ratio = enc.mega_per_s() / dec.mega_per_s();
  return {ratio >= kAsymmetry && secs < kBenchSeconds,
          fmt("size=%.0fx%.0f encode_mpix_s=%.3f decode_mpix_s=%.4f", kBenchW, kBenchH, enc.mega_per_s(),
              dec.mega_per_s()) +
              fmt(" ratio=%.2f (>=%.0f) reps=%.0f bench_s=%.1f", ratio, kAsymmetry, kBenchReps, secs)};
}

// ---- 9: compressed learning -------------------------------------------------------

Outcome learning(const CodecModel<float>& m) {
  const auto t0 = Clock::now();
  std::size_t wins = 0;
  std::string detail;
  for (std::size_t k = 0; k < kLearningSeeds; ++k) {
    TaskSpec spec;
    spec.seed = 1000 + k;
    const TextureTask task = gen_texture_task(spec);
    const auto [lat, down] = run_comparison(task, m, ClassifierConfig{}, spec.seed);
    wins += lat.accuracy >= down.accuracy + kLearningGap;
    std::printf("#   seed=%zu ref_full=%.3f ref_8x=%.3f latent=%.4f %s=%.4f dim=%zu/%zu\n", k, task.full_accuracy,
                task.reduced_accuracy, lat.accuracy, down.representation.c_str(), down.accuracy,
                lat.input_dimension, down.input_dimension);
    std::fflush(stdout);
    detail += fmt(" %.3f/%.3f", lat.accuracy, down.accuracy);
  }
  const double secs = seconds_since(t0);
  return {wins >= kLearningWins && secs < kLearningSeconds,
          fmt("wins=%.0f/%.0f (>=%.0f at +%.0f pt) latent/downsample:", wins, kLearningSeeds, kLearningWins,
              kLearningGap * 100) +
              detail + fmt(" run_s=%.1f (<%.0f)", secs, kLearningSeconds)};
}

// ---- 10: golden container -------------------------------------------------------------

Outcome golden() {
  const Bytes file = read_file(std::string(WLC_TEST_DATA_DIR) + "/golden.wllc");
  const Bytes want = read_file(std::string(WLC_TEST_DATA_DIR) + "/golden_latent.i8");
  const Container c = read_container(file);
  const bool same = c.latent.size() == want.size() && std::memcmp(c.latent.data(), want.data(), want.size()) == 0;
  const bool reencode = write_container(c) == file;
  return {same && reencode, fmt("container_bytes=%.0f latent_bytes=%.0f bit_exact=%.0f reencode_identical=%.0f",
                                static_cast<double>(file.size()), static_cast<double>(want.size()), same, reencode)};
}

}  // namespace

int main() {
  int failures = 0;
  auto report = [&](int id, const char* name, const std::function<Outcome()>& fn) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("criterion %d %s: %s %s\n", id, name, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
  };

  report(1, "wpt_reconstruction", wpt_reconstruction);
  report(2, "wpt_matrix_oracle", wpt_oracle);
  report(3, "gradient_checks", gradients);
  report(4, "bitstream_lossless", bitstream);

  const ImageData data = image_data();
  double secs4 = 0.0, secs16 = 0.0;
  std::optional<CodecModel<float>> m4, m16;
  try {
    m4.emplace(trained("image4x.cfg", data, secs4));
  } catch (const std::exception& e) {
    std::printf("# training image4x failed: %s\n", e.what());
  }
  auto with4 = [&](auto fn) {
    return [&, fn]() -> Outcome {
      if (!m4) return {false, "no trained image4x model"};
      return fn(*m4);
    };
  };
  report(5, "quantization_resilience", with4([&](const CodecModel<float>& m) { return resilience(m, data); }));
  report(6, "beats_bicubic_baseline", with4([&](const CodecModel<float>& m) { return rate_distortion(m, data); }));
  report(7, "dimensionality_reduction", dimensionality);
  report(8, "encoder_decoder_asymmetry", with4([](const CodecModel<float>& m) { return asymmetry(m); }));

  try {
    m16.emplace(trained("image16x.cfg", data, secs16));
  } catch (const std::exception& e) {
    std::printf("# training image16x failed: %s\n", e.what());
  }
  report(9, "compressed_learning", [&]() -> Outcome {
    if (!m16) return {false, "no trained image16x model"};
    return learning(*m16);
  });
  report(10, "golden_container", golden);

  std::printf("acceptance: %d of 10 criteria failed\n", failures);
  return failures ? 1 : 0;
}

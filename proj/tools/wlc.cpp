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

// wlc: train, run and evaluate wavelet latent codecs from the shell.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "wlc/learning.hpp"
#include "wlc/pipeline.hpp"

namespace {

using namespace wlc;
namespace fs = std::filesystem;

void emit(const Record& r) { std::cout << r.str() << '\n'; }

Kind kind_arg(const std::string& s) { return parse_kind(s); }

// ---- train ------------------------------------------------------------------

struct TrainArgs {
  std::string kind = "image", config, data, out;
  std::optional<std::size_t> steps;
  std::optional<std::uint64_t> seed;
  std::size_t log_every = 100;
};

void run_train(const TrainArgs& a) {
  ModelSpec spec = load_model_spec(a.config);
  if (spec.codec.kind != kind_arg(a.kind)) {
    throw ConfigError(a.config + " describes a " + kind_name(spec.codec.kind) + " codec, not " + a.kind);
  }
  if (a.steps) spec.train.steps = *a.steps;
  if (a.seed) spec.train.seed = *a.seed;
  spec.train.log_every = a.log_every;
  const Dataset d = load_dataset(a.data, spec.codec.kind, 0.1, spec.train.seed);
  emit(Record()
           .add("config", to_string(spec.codec))
           .add("files", d.signals.size())
           .add("train_files", d.train.size())
           .add("steps", spec.train.steps));
  CodecModel<float> m = train_model(spec, d.signals, d.train, [](std::size_t step, double loss) {
    emit(Record().add("step", step).add("loss", loss, 8));
  });
  save_checkpoint_file(a.out, m);
  emit(Record().add("saved", a.out).add("parameters", m.parameter_count()));
}

// ---- encode / decode ------------------------------------------------------

void run_encode(const std::string& model_path, const std::string& in, const std::string& out,
                const std::string& latent_only) {
  const CodecModel<float> m = load_checkpoint_file(model_path);
  const Tensor<float> x = load_signal(in, m.config().kind);
  if (!latent_only.empty()) {
    // Analysis and companding only, as float32 [C_z, ...] on the padded grid.
    const Padded p = pad_to_divisible(x, m.config().levels);
    const Tensor<float> y = compand(m.analyze(p.signal), m.scales()).values;
    write_file(latent_only, encode_raw_f32(y));
    emit(Record().add("latent", latent_only).add("shape", shape_string(y.shape())));
    if (out.empty()) return;
  }
  const Bytes b = compress(m, x);
  write_file(out, b);
  emit(Record()
           .add("out", out)
           .add("bytes", b.size())
           .add("cr", compression_ratio(x.shape(), b.size()), 4)
           .add("dr", m.config().dimensionality_reduction(), 4));
}

void run_decode(const std::string& model_path, const std::string& in, const std::string& out, std::uint32_t rate) {
  const CodecModel<float> m = load_checkpoint_file(model_path);
  const Tensor<float> y = clip_unit(decompress(m, read_file(in)));
  if (m.config().kind == Kind::k2D) {
    write_image(out, y);
  } else {
    write_wav(out, Audio{y, rate});
  }
  emit(Record().add("out", out).add("shape", shape_string(y.shape())));
}

// ---- eval -------------------------------------------------------------------

void run_eval(const std::string& model_path, const std::string& data, std::size_t jobs) {
  const CodecModel<float> m = load_checkpoint_file(model_path);
  const Dataset d = load_dataset(data, m.config().kind, 0.0);
  std::vector<EvalRow> rows(d.signals.size());
  jobs = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(rows.size(), 1));
  std::vector<std::thread> pool;
  for (std::size_t j = 0; j < jobs; ++j) {
    pool.emplace_back([&, j] {
      for (std::size_t i = j; i < rows.size(); i += jobs) rows[i] = evaluate(m, d.signals[i]);
    });
  }
  for (auto& t : pool) t.join();
  double psnr_sum = 0.0, ssim_sum = 0.0, ms_sum = 0.0, cr_sum = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    Record r;
    r.add("file", fs::path(d.paths[i]).filename().string());
    r.append(to_record(rows[i]));
    emit(r);
    psnr_sum += rows[i].quality.psnr;
    ssim_sum += rows[i].quality.ssim;
    ms_sum += rows[i].quality.ms_ssim;
    cr_sum += rows[i].compression_ratio;
  }
  const double n = static_cast<double>(rows.size());
  Record mean;
  mean.add("file", "mean").add("psnr", psnr_sum / n, 4);
  if (m.config().kind == Kind::k2D) mean.add("ssim", ssim_sum / n, 6).add("ms_ssim", ms_sum / n, 6);
  mean.add("cr", cr_sum / n, 4).add("dr", m.config().dimensionality_reduction(), 4);
  emit(mean);
}

// ---- bench ------------------------------------------------------------------

Shape parse_size(const std::string& s, const CodecConfig& c) {
  Shape shape{c.channels};
  try {
    if (c.kind == Kind::k2D) {
      const auto x = s.find('x');
      if (x == std::string::npos) throw ParameterError("");
      shape.push_back(std::stoul(s.substr(x + 1)));  // H
      shape.push_back(std::stoul(s.substr(0, x)));   // W
    } else {
      shape.push_back(std::stoul(s));
    }
  } catch (const std::exception&) {
    throw ParameterError("--size must be WxH for images or N for audio, got '" + s + "'");
  }
  return shape;
}

void run_bench(const std::string& model_path, const std::string& size, std::size_t reps) {
  const CodecModel<float> m = load_checkpoint_file(model_path);
  const Shape shape = parse_size(size, m.config());
  Rng rng(7);
  Tensor<float> x(shape);
  if (m.config().kind == Kind::k2D) {
    x = synth_image(shape[1], shape[2], rng);
  } else {
    x = synth_audio(shape[0], shape[1], 44100.0, rng);
  }
  const Padded p = pad_to_divisible(x, m.config().levels);
  const double samples = static_cast<double>(shape_size(Shape(shape.begin() + 1, shape.end())));
  const QuantizedLatent q = m.encode(p.signal);
  const ThroughputReport enc = bench([&] { (void)m.encode(p.signal); }, samples, reps);
  const ThroughputReport dec = bench([&] { (void)m.decode(q); }, samples, reps);
  const Bytes b = compress(m, x);
  const ThroughputReport cenc = bench([&] { (void)compress(m, x); }, samples, reps);
  const ThroughputReport cdec = bench([&] { (void)decompress(m, b); }, samples, reps);
  Record r;
  r.add("size", size).add("reps", reps);
  r.append(to_record(enc, "encode")).append(to_record(dec, "decode"));
  r.add("ratio", dec.median_s / enc.median_s, 3);
  emit(r);
  Record c;
  c.add("container", "1");
  c.append(to_record(cenc, "encode")).append(to_record(cdec, "decode"));
  c.add("ratio", cdec.median_s / cenc.median_s, 3);
  emit(c);
}

// ---- probe-basis ------------------------------------------------------------

void run_probe(const std::string& model_path, int amplitude, const std::string& out, std::size_t extent) {
  const CodecModel<float> m = load_checkpoint_file(model_path);
  fs::create_directories(out);
  for (std::size_t ch = 0; ch < m.config().latent_channels; ++ch) {
    const Tensor<float> tile = clip_unit(probe_basis(m, ch, amplitude, extent));
    char name[32];
    std::snprintf(name, sizeof name, "channel_%03zu", ch);
    const fs::path path = fs::path(out) / (std::string(name) + (m.config().kind == Kind::k2D ? ".ppm" : ".wav"));
    if (m.config().kind == Kind::k2D) {
      write_image(path.string(), tile);
    } else {
      write_wav(path.string(), Audio{tile, 44100});
    }
  }
  emit(Record().add("out", out).add("tiles", m.config().latent_channels).add("amplitude", amplitude));
}

// ---- compare ----------------------------------------------------------------

struct CompareArgs {
  std::string model, task = "texture", classifier;
  std::size_t seeds = 5, count = 2000;
  std::uint64_t first_seed = 0;
  bool identity = false;
};

void run_compare(const CompareArgs& a) {
  if (a.task != "texture") throw ParameterError("compare: unknown task '" + a.task + "'");
  const CodecModel<float> m = load_checkpoint_file(a.model);
  ClassifierConfig cc;
  if (!a.classifier.empty()) {
    const KeyValues kv = KeyValues::load(a.classifier);
    cc = classifier_config_from(kv);
    kv.reject_unused();
  }
  std::size_t wins = 0;
  for (std::size_t k = 0; k < a.seeds; ++k) {
    TaskSpec spec;
    spec.seed = a.first_seed + k;
    spec.count = a.count;
    const TextureTask task = gen_texture_task(spec);
    const auto [lat, down] = run_comparison(task, m, cc, spec.seed);
    for (const auto* r : {&lat, &down}) {
      Record rec;
      rec.add("seed", static_cast<std::size_t>(spec.seed));
      rec.append(to_record(*r));
      emit(rec);
    }
    if (a.identity) {
      Record rec;
      rec.add("seed", static_cast<std::size_t>(spec.seed));
      const auto id = train_and_score(featurize(task.images, FeatureMode::identity()), task.labels,
                                      task.train_count, cc, spec.seed, "identity");
      rec.append(to_record(id));
      emit(rec);
    }
    wins += lat.accuracy >= down.accuracy + 0.05;
  }
  emit(Record().add("seeds", a.seeds).add("latent_wins_by_5pt", wins));
}

// ---- synth ------------------------------------------------------------------

void run_synth(const std::string& kind, const std::string& out, std::size_t count, const std::string& size,
               std::uint64_t seed, std::size_t channels) {
  const Kind k = kind_arg(kind);
  CodecConfig c;
  c.kind = k;
  c.channels = k == Kind::k2D ? 3 : std::max<std::size_t>(channels, 1);
  const Shape shape = parse_size(size, c);
  const auto files = write_synthetic_dataset(out, k, count, Shape(shape.begin() + 1, shape.end()), seed, channels);
  emit(Record().add("out", out).add("files", files.size()));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"wlc: wavelet latent codec toolkit"};
  app.require_subcommand(1);

  TrainArgs ta;
  auto* train = app.add_subcommand("train", "train a codec on a directory of signals");
  train->add_option("--kind", ta.kind, "image or audio")->check(CLI::IsMember({"image", "audio"}));
  train->add_option("--config", ta.config, "key=value config file")->required()->check(CLI::ExistingFile);
  train->add_option("--data", ta.data, "directory of .ppm/.pgm or .wav files")->required();
  train->add_option("--steps", ta.steps, "override the config's step count");
  train->add_option("--seed", ta.seed, "override the config's seed");
  train->add_option("--log-every", ta.log_every, "loss logging interval (0: silent)");
  train->add_option("--out", ta.out, "checkpoint path (.wlcm)")->required();

  std::string model, in, out, latent_only;
  auto* encode = app.add_subcommand("encode", "signal -> .wllc container");
  encode->add_option("--model", model)->required()->check(CLI::ExistingFile);
  encode->add_option("--in", in)->required()->check(CLI::ExistingFile);
  encode->add_option("--out", out, "container path");
  encode->add_option("--latent-only", latent_only, "also write companded float32 latents here");

  std::uint32_t rate = 44100;
  auto* decode = app.add_subcommand("decode", ".wllc container -> signal");
  decode->add_option("--model", model)->required()->check(CLI::ExistingFile);
  decode->add_option("--in", in)->required()->check(CLI::ExistingFile);
  decode->add_option("--out", out)->required();
  decode->add_option("--rate", rate, "sample rate written into decoded WAV files");

  std::string data;
  std::size_t jobs = 1;
  auto* eval = app.add_subcommand("eval", "quality and rate over every file in a directory");
  eval->add_option("--model", model)->required()->check(CLI::ExistingFile);
  eval->add_option("--data", data)->required();
  eval->add_option("--jobs", jobs, "files evaluated in parallel");

  std::string size;
  std::size_t reps = 10;
  auto* benchc = app.add_subcommand("bench", "encode/decode throughput");
  benchc->add_option("--model", model)->required()->check(CLI::ExistingFile);
  benchc->add_option("--size", size, "WxH for images, N for audio")->required();
  benchc->add_option("--reps", reps, "timed repetitions (>= 5)");

  int amplitude = 31;
  std::size_t extent = 3;
  auto* probe = app.add_subcommand("probe-basis", "decode one latent channel at a time");
  probe->add_option("--model", model)->required()->check(CLI::ExistingFile);
  probe->add_option("--amplitude", amplitude, "quantised value at the centre position");
  probe->add_option("--extent", extent, "latent grid extent per axis");
  probe->add_option("--out", out, "output directory")->required();

  CompareArgs ca;
  auto* compare = app.add_subcommand("compare", "latent vs downsampled-pixel classification");
  compare->add_option("--model", ca.model)->required()->check(CLI::ExistingFile);
  compare->add_option("--task", ca.task, "task name (texture)");
  compare->add_option("--seeds", ca.seeds, "number of task seeds");
  compare->add_option("--first-seed", ca.first_seed);
  compare->add_option("--count", ca.count, "samples per task (even)");
  compare->add_option("--classifier", ca.classifier, "classifier key=value config");
  compare->add_flag("--identity", ca.identity, "also train on full-resolution pixels");

  std::string skind = "image";
  std::size_t count = 16, channels = 2;
  std::uint64_t seed = 0;
  auto* synth = app.add_subcommand("synth", "write a synthetic dataset");
  synth->add_option("--kind", skind)->check(CLI::IsMember({"image", "audio"}));
  synth->add_option("--out", out)->required();
  synth->add_option("--count", count);
  synth->add_option("--size", size, "WxH for images, N for audio")->required();
  synth->add_option("--seed", seed);
  synth->add_option("--channels", channels, "audio channels");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*train) run_train(ta);
    if (*encode) {
      if (out.empty() && latent_only.empty()) throw ParameterError("encode: give --out and/or --latent-only");
      run_encode(model, in, out, latent_only);
    }
    if (*decode) run_decode(model, in, out, rate);
    if (*eval) run_eval(model, data, jobs);
    if (*benchc) run_bench(model, size, reps);
    if (*probe) run_probe(model, amplitude, out, extent);
    if (*compare) run_compare(ca);
    if (*synth) run_synth(skind, out, count, size, seed, channels);
  } catch (const std::exception& e) {
    std::cerr << "wlc: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

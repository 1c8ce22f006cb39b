// reactnet: synthesize data, train, predict, evaluate and render.
//
// Exit codes: 0 success, 2 usage or input error, 3 numeric failure.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "reactnet/checkpoint.hpp"
#include "reactnet/manifest.hpp"
#include "reactnet/reactnet.hpp"

namespace fs = std::filesystem;
using namespace reactnet;

namespace {

constexpr const char* kEmbeddingExt = ".remb";
constexpr const char* kAnnotationExt = ".gt.txt";
constexpr const char* kScoresExt = ".scores.txt";
constexpr const char* kSegmentsExt = ".segments.txt";

struct UsageError : Error {
  using Error::Error;
};

std::string stem_of(const fs::path& p, const std::string& ext) {
  const std::string name = p.filename().string();
  return name.size() > ext.size() && name.ends_with(ext) ? name.substr(0, name.size() - ext.size()) : p.stem().string();
}

std::vector<fs::path> files_with_ext(const fs::path& dir, const std::string& ext) {
  if (!fs::is_directory(dir)) throw IoError(dir.string() + " is not a directory");
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().filename().string().ends_with(ext)) out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

void ensure_parent(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
}

// ---- synth ------------------------------------------------------------------

// key = value lines; '#' starts a comment. Values may hold several numbers.
std::map<std::string, std::string> read_key_values(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::map<std::string, std::string> kv;
  std::string line;
  for (int no = 1; std::getline(in, line); ++no) {
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto eq = line.find('=');
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      const auto b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    if (eq == std::string::npos || trim(line.substr(0, eq)).empty())
      throw SpecError(path.string() + ":" + std::to_string(no) + ": expected 'key = value'");
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

template <class T>
std::vector<T> numbers(const std::string& key, const std::string& text, std::size_t lo, std::size_t hi) {
  std::istringstream in(text);
  std::vector<T> out;
  T v{};
  while (in >> v) out.push_back(v);
  if (!in.eof() || out.size() < lo || out.size() > hi)
    throw SpecError("bad value for '" + key + "': '" + text + "'");
  return out;
}

// plan tokens: R<len> repetitive, N<len> non-repetitive
std::vector<PlanEntry> parse_plan(const std::string& text) {
  std::istringstream in(text);
  std::vector<PlanEntry> plan;
  std::string tok;
  while (in >> tok) {
    const char k = static_cast<char>(std::toupper(static_cast<unsigned char>(tok[0])));
    std::size_t used = 0;
    long long len = 0;
    try {
      len = std::stoll(tok.substr(1), &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if ((k != 'R' && k != 'N') || used == 0 || used + 1 != tok.size())
      throw SpecError("bad plan token '" + tok + "' (expected R<len> or N<len>)");
    plan.push_back({k == 'R' ? SegmentKind::kRepetitive : SegmentKind::kNonRepetitive, len});
  }
  if (plan.empty()) throw SpecError("plan is empty");
  return plan;
}

struct SynthArgs {
  std::string spec, out;
  std::optional<std::uint64_t> seed;
};

int cmd_synth(const SynthArgs& a) {
  Stopwatch clock;
  const auto kv = read_key_values(a.spec);
  static const std::vector<std::string> known{"videos", "dim",   "frames", "segments", "periods", "amplitude",
                                              "noise",  "seed",  "min_gap", "plan",    "prefix"};
  for (const auto& [k, v] : kv)
    if (std::find(known.begin(), known.end(), k) == known.end()) throw SpecError("unknown spec key '" + k + "'");
  auto get = [&](const std::string& k) -> std::optional<std::string> {
    auto it = kv.find(k);
    return it == kv.end() ? std::nullopt : std::optional(it->second);
  };

  SyntheticCorpusConfig cfg;
  if (auto v = get("videos")) cfg.videos = numbers<int>("videos", *v, 1, 1)[0];
  if (auto v = get("dim")) cfg.dim = numbers<std::int64_t>("dim", *v, 1, 1)[0];
  if (auto v = get("frames")) {
    auto r = numbers<std::int64_t>("frames", *v, 1, 2);
    cfg.frames_min = r.front();
    cfg.frames_max = r.back();
  }
  if (auto v = get("segments")) {
    auto r = numbers<int>("segments", *v, 1, 2);
    cfg.segments_min = r.front();
    cfg.segments_max = r.back();
  }
  if (auto v = get("periods")) {
    auto r = numbers<std::int64_t>("periods", *v, 1, 2);
    cfg.period_min = r.front();
    cfg.period_max = r.back();
  }
  if (auto v = get("amplitude")) cfg.amplitude = numbers<double>("amplitude", *v, 1, 1)[0];
  if (auto v = get("noise")) cfg.noise_sigma = numbers<double>("noise", *v, 1, 1)[0] * cfg.amplitude;
  if (auto v = get("seed")) cfg.seed = numbers<std::uint64_t>("seed", *v, 1, 1)[0];
  if (auto v = get("min_gap")) cfg.min_gap = numbers<std::int64_t>("min_gap", *v, 1, 1)[0];
  if (a.seed) cfg.seed = *a.seed;
  const std::string prefix = get("prefix").value_or("video");

  std::vector<SyntheticSpec> specs;
  if (auto plan = get("plan")) {
    // the same layout for every video, with per-video seeds
    if (cfg.dim < 1 || cfg.videos < 1) throw SpecError("dim and videos must be >= 1");
    std::mt19937_64 rng(cfg.seed);
    for (int v = 0; v < cfg.videos; ++v) {
      SyntheticSpec s;
      s.dim = cfg.dim;
      s.segment_plan = parse_plan(*plan);
      s.period_min = cfg.period_min;
      s.period_max = cfg.period_max;
      s.amplitude = cfg.amplitude;
      s.noise_sigma = cfg.noise_sigma;
      s.seed = rng();
      specs.push_back(std::move(s));
    }
  } else {
    specs = make_corpus_specs(cfg);
  }

  // generate everything before writing so a bad spec leaves no partial output
  std::vector<std::pair<FrameEmbeddingSequence, SegmentAnnotation>> videos;
  for (const auto& s : specs) videos.push_back(generate_synthetic(s));

  fs::create_directories(a.out);
  RunManifest man;
  man.command = "synth";
  man.seed = cfg.seed;
  man.inputs = {a.spec};
  for (const auto& [k, v] : kv) man.config[k] = v;
  for (std::size_t i = 0; i < videos.size(); ++i) {
    char name[64];
    std::snprintf(name, sizeof name, "%s%03zu", prefix.c_str(), i);
    const fs::path emb = fs::path(a.out) / (std::string(name) + kEmbeddingExt);
    const fs::path gt = fs::path(a.out) / (std::string(name) + kAnnotationExt);
    save_embeddings(videos[i].first, emb);
    save_annotation(videos[i].second, gt);
    man.outputs.push_back(emb.string());
    man.outputs.push_back(gt.string());
  }
  man.duration_seconds = clock.seconds();
  man.save(fs::path(a.out) / "synth.manifest.json");
  std::cout << "wrote " << videos.size() << " videos to " << a.out << "\n";
  return 0;
}

// ---- train ------------------------------------------------------------------

struct NetArgs {
  int stages = 3;
  int filter_size = 5;
  int channels = 16;
  bool no_skip = false;
  bool no_intermediate = false;
  std::vector<double> stage_weights;
  int canonical = 140;
  std::string upsampling = "nearest";

  NetConfig resolve() const {
    NetConfig c;
    c.stages = stages;
    c.first_filter = filter_size;
    c.channels = channels;
    c.skip_connections = !no_skip;
    c.intermediate_supervision = !no_intermediate;
    c.stage_weights = stage_weights.empty() ? default_stage_weights(stages) : stage_weights;
    c.canonical = canonical;
    c.upsampling = upsampling == "bilinear" ? ops::Upsampling::kBilinear : ops::Upsampling::kNearest;
    c.validate();
    return c;
  }
};

struct TrainArgs {
  std::string data, out, trace;
  NetArgs net;
  int epochs = 3;
  double lr = 0.002;
  int batch = 8;
  int block_min = 100, block_max = 200, stride = 25;
  std::uint64_t seed = 0;
};

nlohmann::ordered_json net_json(const NetConfig& c) {
  nlohmann::ordered_json j;
  j["stages"] = c.stages;
  j["filter_size"] = c.first_filter;
  j["channels"] = c.channels;
  j["skip_connections"] = c.skip_connections;
  j["intermediate_supervision"] = c.intermediate_supervision;
  j["stage_weights"] = c.stage_weights;
  j["canonical"] = c.canonical;
  j["upsampling"] = c.upsampling == ops::Upsampling::kBilinear ? "bilinear" : "nearest";
  return j;
}

int cmd_train(const TrainArgs& a) {
  Stopwatch clock;
  const NetConfig net_cfg = a.net.resolve();
  TrainConfig tc;
  tc.epochs = a.epochs;
  tc.lr = a.lr;
  tc.batch = a.batch;
  tc.seed = a.seed;
  tc.sampler.size_min = a.block_min;
  tc.sampler.size_max = a.block_max;
  tc.sampler.stride = a.stride;
  tc.sampler.canonical = net_cfg.canonical;
  tc.validate();

  RunManifest man;
  man.command = "train";
  man.seed = a.seed;
  std::vector<TrainingVideo> dataset;
  for (const auto& emb : files_with_ext(a.data, kEmbeddingExt)) {
    const fs::path gt = emb.parent_path() / (stem_of(emb, kEmbeddingExt) + kAnnotationExt);
    if (!fs::exists(gt)) continue;
    const auto seq = load_embeddings(emb);
    const auto ann = load_annotation(gt);
    ann.validate(seq.n_frames());
    dataset.push_back({build_distance_matrix(seq), build_annotation_matrix(seq.n_frames(), ann)});
    man.inputs.push_back(emb.string());
    man.inputs.push_back(gt.string());
  }
  if (dataset.empty()) throw DataError("no embedding/annotation pairs (*" + std::string(kEmbeddingExt) + " + *" +
                                       kAnnotationExt + ") in " + a.data);

  auto model = build_model<float>(net_cfg, a.seed);
  const auto result = train(model, dataset, tc, [](const TrainProgress& p) {
    std::printf("epoch %d  steps %lld  loss %.6f\n", p.epoch + 1, static_cast<long long>(p.steps_in_epoch), p.loss);
    std::fflush(stdout);
  });

  ensure_parent(a.out);
  save_checkpoint(model, a.out);
  const std::string trace = a.trace.empty() ? a.out + ".loss.txt" : a.trace;
  {
    std::ofstream t(trace, std::ios::trunc);
    if (!t) throw IoError("cannot open " + trace + " for writing");
    char buf[64];
    for (std::size_t i = 0; i < result.step_loss.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%zu %.8f\n", i + 1, result.step_loss[i]);
      t << buf;
    }
  }

  man.config["net"] = net_json(net_cfg);
  man.config["epochs"] = tc.epochs;
  man.config["lr"] = tc.lr;
  man.config["batch"] = tc.batch;
  man.config["block_min"] = tc.sampler.size_min;
  man.config["block_max"] = tc.sampler.size_max;
  man.config["stride"] = tc.sampler.stride;
  man.config["epoch_loss"] = result.epoch_loss;
  man.outputs = {a.out, trace};
  man.duration_seconds = clock.seconds();
  man.save(a.out + ".manifest.json");
  return 0;
}

// ---- predict ----------------------------------------------------------------

struct PredictArgs {
  std::string model, input, out;
  int window = 140, stride = 35, canonical = 0;
  double threshold = 0.5;
  std::int64_t min_seg_len = 1;
  std::string rule = "diagonal";
  std::uint64_t seed = 0;
};

int cmd_predict(const PredictArgs& a) {
  Stopwatch clock;
  const auto model = load_checkpoint(a.model);
  InferConfig ic;
  ic.window = a.window;
  ic.stride = a.stride;
  ic.threshold = a.threshold;
  ic.canonical = a.canonical;
  ic.rule = a.rule == "rowmean" ? FrameScoreRule::kRowMean : FrameScoreRule::kDiagonal;
  ic.validate();
  if (a.min_seg_len < 1) throw ConfigError("--min-seg-len must be >= 1");

  const std::vector<fs::path> inputs =
      fs::is_directory(a.input) ? files_with_ext(a.input, kEmbeddingExt) : std::vector<fs::path>{a.input};
  if (inputs.empty()) throw DataError("no *" + std::string(kEmbeddingExt) + " files in " + a.input);
  fs::create_directories(a.out);

  RunManifest man;
  man.command = "predict";
  man.seed = a.seed;
  man.inputs.push_back(a.model);
  for (const auto& in : inputs) {
    const auto seq = load_embeddings(in);
    if (seq.n_frames() < 2) throw ShapeError(in.string() + ": inference needs at least 2 frames");
    const auto scores = predict_frames(model, ic, build_distance_matrix(seq));
    const std::string stem = stem_of(in, kEmbeddingExt);
    const fs::path sp = fs::path(a.out) / (stem + kScoresExt);
    const fs::path gp = fs::path(a.out) / (stem + kSegmentsExt);
    save_scores(scores, sp);
    save_annotation(extract_segments(scores, a.min_seg_len), gp);
    man.inputs.push_back(in.string());
    man.outputs.push_back(sp.string());
    man.outputs.push_back(gp.string());
  }
  man.config["window"] = ic.window;
  man.config["stride"] = ic.stride;
  man.config["threshold"] = ic.threshold;
  man.config["rule"] = a.rule;
  man.config["min_seg_len"] = a.min_seg_len;
  man.config["net"] = net_json(model.config());
  man.duration_seconds = clock.seconds();
  man.save(fs::path(a.out) / "predict.manifest.json");
  std::cout << "predicted " << inputs.size() << " video(s) into " << a.out << "\n";
  return 0;
}

// ---- eval -------------------------------------------------------------------

// A score file has three fields per line, an annotation two.
bool looks_like_scores(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw IoError("cannot open " + p.string());
  std::string line;
  while (std::getline(in, line)) {
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    std::istringstream ls(line);
    std::string tok;
    int fields = 0;
    while (ls >> tok) ++fields;
    if (fields) return fields == 3;
  }
  return false;
}

FrameLabels load_prediction(const fs::path& p, std::optional<std::int64_t> n) {
  if (looks_like_scores(p)) {
    auto labels = load_scores(p).labels;
    if (n && static_cast<std::int64_t>(labels.size()) != *n)
      throw SizeMismatchError(p.string() + " has " + std::to_string(labels.size()) + " frames, expected " + std::to_string(*n));
    return labels;
  }
  if (!n) throw UsageError(p.string() + " is a segment list; pass --n with the frame count");
  const auto ann = load_annotation(p);
  ann.validate(*n);
  return ann.to_labels(*n);
}

struct EvalArgs {
  std::string pred, gt, report;
  std::optional<std::int64_t> n;
};

int cmd_eval(const EvalArgs& a) {
  Stopwatch clock;
  std::vector<std::pair<std::string, EvalReport>> rows;
  RunManifest man;
  man.command = "eval";
  auto one = [&](const fs::path& pred, const fs::path& gt, std::optional<std::int64_t> n, const std::string& name) {
    const auto labels = load_prediction(pred, n);
    const auto ann = load_annotation(gt);
    ann.validate(static_cast<std::int64_t>(labels.size()));
    rows.emplace_back(name, evaluate(labels, ann, static_cast<std::int64_t>(labels.size())));
    man.inputs.push_back(pred.string());
    man.inputs.push_back(gt.string());
  };

  if (fs::is_directory(a.pred) != fs::is_directory(a.gt)) throw UsageError("--pred and --gt must both be files or both directories");
  if (fs::is_directory(a.gt)) {
    for (const auto& gt : files_with_ext(a.gt, kAnnotationExt)) {
      const std::string stem = stem_of(gt, kAnnotationExt);
      fs::path pred = fs::path(a.pred) / (stem + kScoresExt);
      if (!fs::exists(pred)) pred = fs::path(a.pred) / (stem + kSegmentsExt);
      if (!fs::exists(pred)) throw IoError("no prediction for " + stem + " in " + a.pred);
      one(pred, gt, std::nullopt, stem);
    }
    if (rows.empty()) throw DataError("no *" + std::string(kAnnotationExt) + " files in " + a.gt);
  } else {
    one(a.pred, a.gt, a.n, fs::path(a.pred).filename().string());
  }

  std::vector<EvalReport> reports;
  for (const auto& [name, r] : rows) reports.push_back(r);
  const EvalReport mean = aggregate(reports);
  std::ostringstream text;
  if (rows.size() > 1)
    for (const auto& [name, r] : rows) text << name << "\t" << format_report_line(r) << "\n";
  text << format_report_line(mean) << "\n";
  if (rows.size() > 1) {
    const auto s = spread(reports);
    char buf[128];
    std::snprintf(buf, sizeof buf, "stddev R %.1f P %.1f F1 %.1f O %.1f\n", 100 * s.recall, 100 * s.precision, 100 * s.f1,
                  100 * s.overlap);
    text << buf;
  }
  text << "tp " << mean.tp << " fp " << mean.fp << " fn " << mean.fn << " tn " << mean.tn << "\n";
  text << "tsv\t" << format_report_tsv(mean, rows.size()) << "\n";
  std::cout << text.str();

  fs::path manifest_path;
  if (!a.report.empty()) {
    ensure_parent(a.report);
    std::ofstream out(a.report, std::ios::trunc);
    if (!out) throw IoError("cannot open " + a.report + " for writing");
    out << text.str();
    man.outputs.push_back(a.report);
    manifest_path = a.report + ".manifest.json";
  } else {
    const fs::path base = fs::is_directory(a.pred) ? fs::path(a.pred) : fs::path(a.pred).parent_path();
    manifest_path = (base.empty() ? fs::path(".") : base) / "eval.manifest.json";
  }
  man.config["videos"] = rows.size();
  man.config["f1"] = mean.f1;
  man.config["overlap"] = mean.overlap;
  man.duration_seconds = clock.seconds();
  man.save(manifest_path);
  return 0;
}

// ---- render -----------------------------------------------------------------

struct RenderArgs {
  std::string embeddings, pred, gt, out, pgm;
};

int cmd_render(const RenderArgs& a) {
  Stopwatch clock;
  const auto seq = load_embeddings(a.embeddings);
  const auto m = build_distance_matrix(seq);
  const std::int64_t n = seq.n_frames();
  std::optional<FrameLabels> pred, truth;
  RunManifest man;
  man.command = "render";
  man.inputs.push_back(a.embeddings);
  if (!a.pred.empty()) {
    pred = load_prediction(a.pred, n);
    man.inputs.push_back(a.pred);
  }
  if (!a.gt.empty()) {
    const auto ann = load_annotation(a.gt);
    ann.validate(n);
    truth = ann.to_labels(n);
    man.inputs.push_back(a.gt);
  }
  ensure_parent(a.out);
  save_ppm(render_matrix(m.values, pred, truth), a.out);
  man.outputs.push_back(a.out);
  if (!a.pgm.empty()) {
    ensure_parent(a.pgm);
    save_pgm(m.values, a.pgm);
    man.outputs.push_back(a.pgm);
  }
  man.duration_seconds = clock.seconds();
  man.save(a.out + ".manifest.json");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Repetitive-action localization from frame embeddings"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolkitVersion));

  SynthArgs sa;
  auto* synth = app.add_subcommand("synth", "generate synthetic embedding/annotation pairs from a spec file");
  synth->add_option("--spec", sa.spec, "key = value spec file")->required();
  synth->add_option("--out", sa.out, "output directory")->required();
  synth->add_option("--seed", sa.seed, "overrides the spec's seed");

  TrainArgs ta;
  auto* trn = app.add_subcommand("train", "train a model on a directory of *.remb + *.gt.txt pairs");
  trn->add_option("--data", ta.data, "training directory")->required();
  trn->add_option("--out", ta.out, "checkpoint path (RANW)")->required();
  trn->add_option("--trace", ta.trace, "loss trace path (default <out>.loss.txt)");
  trn->add_option("--seed", ta.seed, "seed for initialization, sampling and shuffling")->capture_default_str();
  trn->add_option("--epochs", ta.epochs)->capture_default_str()->check(CLI::PositiveNumber);
  trn->add_option("--lr", ta.lr)->capture_default_str()->check(CLI::PositiveNumber);
  trn->add_option("--batch", ta.batch)->capture_default_str()->check(CLI::PositiveNumber);
  trn->add_option("--block-min", ta.block_min, "smallest sampled sub-block")->capture_default_str();
  trn->add_option("--block-max", ta.block_max, "largest sampled sub-block")->capture_default_str();
  trn->add_option("--stride", ta.stride, "sub-block centre spacing")->capture_default_str();
  trn->add_option("--stages", ta.net.stages)->capture_default_str();
  trn->add_option("--filter-size", ta.net.filter_size, "first convolution size")->capture_default_str();
  trn->add_option("--channels", ta.net.channels)->capture_default_str();
  trn->add_flag("--no-skip", ta.net.no_skip, "drop the identity skip connections");
  trn->add_flag("--no-intermediate", ta.net.no_intermediate, "supervise the final stage only");
  trn->add_option("--stage-weights", ta.net.stage_weights, "per-stage WBCE weights (comma separated)")->delimiter(',');
  trn->add_option("--canonical", ta.net.canonical, "network input size")->capture_default_str();
  trn->add_option("--upsampling", ta.net.upsampling)->capture_default_str()->check(CLI::IsMember({"nearest", "bilinear"}));

  PredictArgs pa;
  auto* pred = app.add_subcommand("predict", "score every frame of one video or a directory of videos");
  pred->add_option("--model", pa.model, "RANW checkpoint")->required();
  pred->add_option("--input", pa.input, "*.remb file or directory")->required();
  pred->add_option("--out", pa.out, "output directory")->required();
  pred->add_option("--window", pa.window)->capture_default_str();
  pred->add_option("--stride", pa.stride)->capture_default_str();
  pred->add_option("--threshold", pa.threshold)->capture_default_str();
  pred->add_option("--canonical", pa.canonical, "expected model input size (0: take the model's)");
  pred->add_option("--min-seg-len", pa.min_seg_len, "drop shorter predicted segments")->capture_default_str();
  pred->add_option("--rule", pa.rule, "window to frame score")->capture_default_str()->check(CLI::IsMember({"diagonal", "rowmean"}));
  pred->add_option("--seed", pa.seed, "recorded in the manifest; prediction itself draws no random numbers");

  EvalArgs ea;
  std::int64_t n_frames = 0;
  auto* ev = app.add_subcommand("eval", "score predictions against ground truth");
  ev->add_option("--pred", ea.pred, "score file, segment file, or directory")->required();
  ev->add_option("--gt", ea.gt, "annotation file or directory")->required();
  auto* n_opt = ev->add_option("--n", n_frames, "frame count (needed for segment files)")->check(CLI::PositiveNumber);
  ev->add_option("--report", ea.report, "also write the report here");

  RenderArgs ra;
  auto* ren = app.add_subcommand("render", "draw the distance matrix with prediction / ground-truth bars");
  ren->add_option("--embeddings", ra.embeddings)->required();
  ren->add_option("--pred", ra.pred, "score or segment file");
  ren->add_option("--gt", ra.gt, "annotation file");
  ren->add_option("--out", ra.out, "PPM path")->required();
  ren->add_option("--pgm", ra.pgm, "also dump the bare matrix as PGM");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  if (*n_opt) ea.n = n_frames;

  try {
    if (*synth) return cmd_synth(sa);
    if (*trn) return cmd_train(ta);
    if (*pred) return cmd_predict(pa);
    if (*ev) return cmd_eval(ea);
    if (*ren) return cmd_render(ra);
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 3;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

// dvkit: command-line front end for spec parsing, generation, metadata,
// dataset profiling, retrieval and co-training batch sampling.
//
// Exit codes: 0 ok, 1 domain error (JSON report on stderr), 2 usage error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "dvkit/dvalgebra.hpp"
#include "dvkit/genkit.hpp"
#include "dvkit/metadata.hpp"
#include "dvkit/retrieval.hpp"
#include "dvkit/rng.hpp"
#include "dvkit/sampler.hpp"
#include "dvkit/sexpr.hpp"
#include "dvkit/taskspec.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw dvkit::Error("IoError", "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Writes to `path`, or stdout when empty.
class Output {
 public:
  explicit Output(const std::string& path, bool binary = false) {
    if (path.empty() || path == "-") return;
    file_.open(path, binary ? std::ios::binary : std::ios::out);
    if (!file_) throw dvkit::Error("IoError", "cannot write " + path);
  }
  std::ostream& os() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

dvkit::metadata::Vec3 vec3(const std::vector<double>& v) { return {v[0], v[1], v[2]}; }

std::vector<std::string> read_ids(const std::string& path) {
  std::istringstream in(read_file(path));
  std::vector<std::string> ids;
  std::string line;
  while (std::getline(in, line)) {
    const auto a = line.find_first_not_of(" \t\r");
    if (a == std::string::npos || line[a] == '#') continue;
    const auto b = line.find_last_not_of(" \t\r");
    ids.push_back(line.substr(a, b - a + 1));
  }
  return ids;
}

void check_format(const std::string& f) {
  if (f != "text" && f != "json") throw UsageError("--format: expected text or json, got '" + f + "'");
}

// ---------------------------------------------------------------------------
// spec

int spec_validate(const std::vector<std::string>& files) {
  for (const auto& f : files) {
    try {
      const auto spec = dvkit::taskspec::parse(read_file(f));
      std::cout << "ok " << f << " (" << spec.name << ")\n";
    } catch (dvkit::Error& e) {
      if (!e.field) e.field = f;  // keep the file in the report
      throw;
    }
  }
  return 0;
}

json instance_json(const dvkit::taskspec::TaskInstance& i) {
  json j{{"spec", i.spec_name},
         {"seed", i.seed},
         {"object_pose", {i.object_pose.x, i.object_pose.y}},
         {"camera", {{"r", i.camera_pose.r}, {"theta", i.camera_pose.theta}, {"phi", i.camera_pose.phi}}},
         {"object_hsv", {i.object_hsv.h, i.object_hsv.s, i.object_hsv.v}},
         {"table_hsv", {i.table_hsv.h, i.table_hsv.s, i.table_hsv.v}}};
  j["receptacle_pose"] =
      i.receptacle_pose ? json::array({i.receptacle_pose->x, i.receptacle_pose->y}) : json(nullptr);
  return j;
}

int spec_sample(const std::string& file, std::uint64_t seed, std::size_t n, const std::string& out) {
  const auto spec = dvkit::taskspec::parse(read_file(file));
  Output o(out);
  // instance k uses seed + k
  for (std::size_t k = 0; k < n; ++k)
    o.os() << instance_json(dvkit::taskspec::sample_instance(spec, seed + k)).dump() << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// gen

int gen_instances(std::size_t spatial, const std::string& format, const std::string& out) {
  auto labs = dvkit::genkit::LabConfig::defaults();
  for (auto& l : labs) l.spatial_combinations = spatial;
  const auto e = dvkit::genkit::enumerate_instances(labs);
  Output o(out);
  if (format == "json") o.os() << dvkit::genkit::enumeration_json(e) << "\n";
  else o.os() << "spatial combinations per lab: " << spatial << "\n" << dvkit::genkit::enumeration_text(e);
  return 0;
}

int gen_texture(const std::string& file, const std::string& which, std::uint64_t seed,
                std::size_t width, std::size_t height, const std::string& out,
                const std::string& ppm) {
  const auto spec = dvkit::taskspec::parse(read_file(file));
  const auto& tex = which == "table" ? spec.table_texture : spec.object_texture;
  const auto raster = dvkit::genkit::fractal_texture(tex, width, height, seed);
  {
    Output o(out, true);
    dvkit::genkit::write_raster(o.os(), raster);
  }
  if (!ppm.empty()) {
    Output p(ppm, true);
    dvkit::genkit::write_ppm(p.os(), raster);
  }
  return 0;
}

dvkit::taskspec::PredicateSequence parse_goal(const std::string& text) {
  // Either "(sequence pick place)" or bare names.
  std::string src = text;
  if (src.find('(') == std::string::npos) src = "(sequence " + src + ")";
  const auto node = dvkit::sexpr::read_one(src);
  if (!node.is(dvkit::sexpr::NodeType::kList) || node.items.empty() || node.items[0].text != "sequence")
    throw UsageError("--goal: expected primitive names");
  dvkit::taskspec::PredicateSequence g;
  for (std::size_t i = 1; i < node.items.size(); ++i) {
    const std::string& name = node.items[i].text;
    if (auto k = dvkit::taskspec::primitive_from_name(name)) g.primitives.push_back({*k, ""});
    else g.primitives.push_back({dvkit::taskspec::PrimitiveKind::kCustom, name});
  }
  if (g.primitives.empty()) throw UsageError("--goal: no primitives given");
  return g;
}

int gen_synth(const std::string& demos, const std::string& goal_text, const std::vector<double>& offset,
              double jitter, std::optional<std::uint64_t> seed, double bridge_step,
              const std::string& out) {
  if (jitter < 0) throw UsageError("--jitter: must not be negative");
  if (jitter > 0 && !seed) throw UsageError("--seed: required with --jitter");
  const auto goal = parse_goal(goal_text);
  Output o(out);
  std::uint64_t k = 0;
  dvkit::metadata::for_each_record(demos, [&](dvkit::metadata::DemoRecord&& r, std::size_t line) {
    std::vector<dvkit::genkit::Segment> segs;
    try {
      segs = dvkit::genkit::decompose(r, goal);
    } catch (dvkit::Error& e) {
      e.line = line;
      throw;
    }
    dvkit::SplitMix64 rng = dvkit::SplitMix64::substream(seed.value_or(0), k++);
    std::vector<dvkit::genkit::RigidPose> anchors;
    for (const auto& s : segs) {
      auto a = s.object_anchor;
      a.pos.x += offset[0];
      a.pos.y += offset[1];
      a.pos.z += offset[2];
      if (jitter > 0) {
        a.pos.x += rng.uniform(-jitter, jitter);
        a.pos.y += rng.uniform(-jitter, jitter);
        a.pos.z += rng.uniform(-jitter, jitter);
      }
      anchors.push_back(a);
    }
    auto base = r;
    base.id = r.id + "-synth";
    const auto synth = dvkit::genkit::synthesize(segs, anchors, bridge_step, base);
    o.os() << dvkit::metadata::to_json_line(synth) << "\n";
  });
  return 0;
}

// ---------------------------------------------------------------------------
// ingest / annotate / profile

int ingest_cmd(const std::string& file, const std::string& out, const std::string& format) {
  std::size_t records = 0, steps = 0, annotated = 0;
  std::unique_ptr<Output> o;
  if (!out.empty()) o = std::make_unique<Output>(out);
  dvkit::metadata::for_each_record(file, [&](dvkit::metadata::DemoRecord&& r, std::size_t) {
    ++records;
    steps += r.steps.size();
    annotated += r.annotations.has_value();
    if (o) o->os() << dvkit::metadata::to_json_line(r) << "\n";
  });
  if (format == "json")
    std::cout << json{{"records", records}, {"steps", steps}, {"annotated", annotated}}.dump() << "\n";
  else
    std::cout << "records " << records << "\nsteps " << steps << "\nannotated " << annotated << "\n";
  return 0;
}

struct AnnotateFlags {
  std::string vectors = std::string(DVKIT_DATA_DIR) + "/household_vectors.txt";
  std::string lexicon;
  std::string colors;
  std::string bins;
  std::vector<double> table_center{0, 0, 0};
  double cut = dvkit::metadata::kDefaultClusterCut;
};

int annotate_cmd(const std::string& file, const std::string& out, const AnnotateFlags& f) {
  using namespace dvkit::metadata;
  const auto vectors = TableEmbeddings::from_file(f.vectors);
  std::optional<VerbLexicon> lexicon;
  if (!f.lexicon.empty()) lexicon = VerbLexicon::from_file(f.lexicon);
  std::unique_ptr<ColorAnnotator> colors;
  if (!f.colors.empty())
    colors = std::make_unique<OfflineColorAnnotator>(OfflineColorAnnotator::from_json_file(f.colors));
  else
    colors = HttpColorAnnotator::from_env();

  AnnotateConfig cfg;
  cfg.lexicon = lexicon ? &*lexicon : &VerbLexicon::defaults();
  cfg.embeddings = &vectors;
  cfg.annotator = colors.get();
  if (!f.bins.empty()) cfg.bins = BinTable::from_json_file(f.bins);
  cfg.table_center = vec3(f.table_center);
  cfg.cluster_cut = f.cut;

  Output o(out);
  std::size_t n = 0, with_object = 0, with_color = 0;
  for_each_record(file, [&](DemoRecord&& r, std::size_t) {
    r.annotations = annotate(r, cfg);
    ++n;
    with_object += r.annotations->target_object.has_value();
    with_color += r.annotations->object_color.has_value();
    o.os() << to_json_line(r) << "\n";
  });
  std::cerr << "annotated " << n << " records: target_object " << with_object << ", object_color "
            << with_color << (colors ? "" : " (no color annotator configured)") << "\n";
  return 0;
}

dvkit::dvalgebra::ProfileOptions profile_options(double cell, double angle_cell,
                                                 const std::vector<double>& center) {
  dvkit::dvalgebra::ProfileOptions opt;
  opt.spatial_cell = cell;
  opt.angular_cell_deg = angle_cell;
  opt.table_center = vec3(center);
  return opt;
}

dvkit::dvalgebra::DatasetProfile load_profile(const std::string& path,
                                              const dvkit::dvalgebra::ProfileOptions& opt) {
  // .json is a saved profile; anything else is a record file.
  if (fs::path(path).extension() == ".json") return dvkit::dvalgebra::profile_from_json(read_file(path));
  const auto records = dvkit::metadata::ingest(path);
  return dvkit::dvalgebra::profile_dataset(records, opt);
}

int profile_cmd(const std::vector<std::string>& files, const dvkit::dvalgebra::ProfileOptions& opt,
                const std::string& format, const std::string& out) {
  auto p = load_profile(files[0], opt);
  for (std::size_t i = 1; i < files.size(); ++i) p = dvkit::dvalgebra::merge(p, load_profile(files[i], opt));
  Output o(out);
  if (format == "json") o.os() << dvkit::dvalgebra::profile_to_json(p) << "\n";
  else o.os() << dvkit::dvalgebra::profile_report(p);
  return 0;
}

int classify_cmd(const std::string& target, const std::string& cotrain, const std::string& dv,
                 double rho, const dvkit::dvalgebra::ProfileOptions& opt, const std::string& format) {
  using namespace dvkit::dvalgebra;
  const auto t = load_profile(target, opt);
  const auto c = load_profile(cotrain, opt);
  const auto r = classify(t.at(dv), c.at(dv), rho);
  const std::string label(case_name(r.label));
  if (format == "json") {
    std::cout << json{{"dv", dv},
                      {"rho", rho},
                      {"label", label},
                      {"target_size", r.target_size},
                      {"cotrain_size", r.cotrain_size},
                      {"diverse", r.diverse},
                      {"aligned", r.aligned},
                      {"zero_target", r.zero_target}}
                     .dump()
              << "\n";
  } else {
    std::cout << label << "\n"
              << "dv " << dv << ", rho " << rho << "\n"
              << "target size " << r.target_size << ", cotrain size " << r.cotrain_size << "\n"
              << "diverse " << (r.diverse ? "yes" : "no") << ", aligned " << (r.aligned ? "yes" : "no")
              << (r.zero_target ? " (target support has measure 0)" : "") << "\n";
  }
  return 0;
}

// ---------------------------------------------------------------------------
// retrieve

struct QueryFlags {
  std::string query_file;
  std::string object;
  std::string exclude_object;
  std::vector<double> campose, campose_tol, objspat, objspat_extent;
  std::string color;
  std::vector<std::string> motion;
};

std::vector<dvkit::retrieval::RetrievalQuery> build_queries(const QueryFlags& f) {
  using namespace dvkit::retrieval;
  const bool inline_flags = !f.object.empty() || !f.exclude_object.empty() || !f.campose.empty() ||
                            !f.objspat.empty() || !f.color.empty() || !f.motion.empty();
  if (!f.query_file.empty()) {
    if (inline_flags) throw UsageError("--query: cannot be combined with inline filter flags");
    auto qs = parse_queries(read_file(f.query_file));
    if (qs.empty()) throw UsageError("--query: file holds no queries");
    return qs;
  }
  if (!inline_flags) throw UsageError("retrieve: give --query or at least one filter flag");
  if (!f.object.empty() && !f.exclude_object.empty())
    throw UsageError("--exclude-object: cannot be combined with --object");
  if (!f.campose_tol.empty() && f.campose.empty()) throw UsageError("--campose-tol: needs --campose");
  if (!f.objspat_extent.empty() && f.objspat.empty()) throw UsageError("--objspat-extent: needs --objspat");
  RetrievalQuery q;
  auto lower = [](std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
  };
  if (!f.object.empty()) q.object = ObjectFilter{ObjectFilter::Mode::kInclude, lower(f.object)};
  if (!f.exclude_object.empty()) q.object = ObjectFilter{ObjectFilter::Mode::kExclude, lower(f.exclude_object)};
  if (!f.campose.empty()) {
    CameraFilter c{vec3(f.campose)};
    if (!f.campose_tol.empty()) c.tolerance = vec3(f.campose_tol);
    q.campose = c;
  }
  if (!f.objspat.empty()) {
    CuboidFilter c{vec3(f.objspat)};
    if (!f.objspat_extent.empty()) c.extent = vec3(f.objspat_extent);
    q.objspat = c;
  }
  if (!f.color.empty()) q.color = lower(f.color);
  if (!f.motion.empty()) q.motion = std::set<std::string>(f.motion.begin(), f.motion.end());
  q.validate();
  return {q};
}

int retrieve_cmd(const std::string& index_file, const QueryFlags& f, bool report,
                 const std::string& format, const std::string& out) {
  using namespace dvkit::retrieval;
  const auto queries = build_queries(f);
  IndexBuilder builder;
  dvkit::metadata::for_each_record(index_file, [&](dvkit::metadata::DemoRecord&& r, std::size_t line) {
    try {
      builder.add(r);
    } catch (dvkit::Error& e) {
      e.line = line;
      throw;
    }
  });
  const auto index = std::move(builder).finish();
  Output o(out);
  for (const auto& q : queries) {
    const auto ids = index.retrieve(q);
    if (format == "json") {
      json j{{"query", serialize_query(q)}, {"records", index.size()}, {"matches", ids.size()}, {"ids", ids}};
      if (report) j["report"] = json::parse(report_json(index.report(q)));
      o.os() << j.dump() << "\n";
    } else {
      o.os() << "; " << serialize_query(q) << "\n";
      if (report) {
        std::istringstream rep(report_text(index.report(q)));
        for (std::string line; std::getline(rep, line);) o.os() << "; " << line << "\n";
      }
      o.os() << "; " << ids.size() << " of " << index.size() << " records\n";
      for (const auto& id : ids) o.os() << id << "\n";
    }
  }
  return 0;
}

// ---------------------------------------------------------------------------
// sample-batches

int sample_batches_cmd(const std::string& target, const std::string& cotrain, double omega,
                       std::size_t batch, std::size_t n, std::uint64_t seed, bool stats,
                       const std::string& format, const std::string& out) {
  using namespace dvkit::sampler;
  const SampleStream stream(read_ids(target), read_ids(cotrain), omega, seed, batch);
  Output o(out);
  if (stats) {
    const auto s = stream_stats(stream, n);
    o.os() << (format == "json" ? stats_json(stream, n, s) + "\n" : stats_text(stream, n, s));
    return 0;
  }
  for (std::uint64_t b = 0; b < n; ++b) {
    const auto ids = stream.next_batch(b);
    for (std::size_t i = 0; i < ids.size(); ++i) o.os() << (i ? " " : "") << ids[i];
    o.os() << "\n";
  }
  return 0;
}

int report_domain_error(const dvkit::Error& e) {
  json j{{"error", e.kind()}, {"message", e.what()}};
  if (e.line) j["line"] = *e.line;
  if (e.column) j["column"] = *e.column;
  if (e.field) j["field"] = *e.field;
  std::cerr << j.dump() << "\n";
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dvkit: task specs, demo metadata, dataset composition and retrieval"};
  app.require_subcommand(1);
  std::string format = "text";
  std::string out;

  auto add_format = [&](CLI::App* c) { c->add_option("--format", format, "text or json")->capture_default_str(); };
  auto add_out = [&](CLI::App* c) { c->add_option("-o,--output", out, "output path (default stdout)"); };

  // spec
  auto* spec = app.add_subcommand("spec", "task specification files");
  spec->require_subcommand(1);
  std::vector<std::string> spec_files;
  auto* spec_validate_cmd = spec->add_subcommand("validate", "parse and check .mlspec files");
  spec_validate_cmd->add_option("files", spec_files, "spec files")->required();
  std::string spec_file;
  std::uint64_t seed = 0;
  std::size_t n = 1;
  auto* spec_sample_cmd = spec->add_subcommand("sample", "draw task instances");
  spec_sample_cmd->add_option("file", spec_file, "spec file")->required();
  spec_sample_cmd->add_option("--seed", seed, "random seed")->required();
  spec_sample_cmd->add_option("--n", n, "number of instances")->capture_default_str()->check(CLI::PositiveNumber);
  add_out(spec_sample_cmd);

  // gen
  auto* gen = app.add_subcommand("gen", "generation tools");
  gen->require_subcommand(1);
  std::size_t spatial = dvkit::genkit::kDefaultSpatialCombinations;
  auto* gen_instances_cmd = gen->add_subcommand("instances", "enumerate task instances per lab");
  gen_instances_cmd->add_option("--spatial", spatial, "spatial combinations per lab")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  add_format(gen_instances_cmd);
  add_out(gen_instances_cmd);

  std::string which = "object";
  std::size_t width = 128, height = 128;
  std::string ppm;
  auto* gen_texture_cmd = gen->add_subcommand("texture", "render a fractal texture raster");
  gen_texture_cmd->add_option("file", spec_file, "spec file")->required();
  gen_texture_cmd->add_option("--texture", which, "object or table")
      ->capture_default_str()
      ->check(CLI::IsMember({"object", "table"}));
  gen_texture_cmd->add_option("--seed", seed, "random seed")->required();
  gen_texture_cmd->add_option("--width", width)->capture_default_str()->check(CLI::PositiveNumber);
  gen_texture_cmd->add_option("--height", height)->capture_default_str()->check(CLI::PositiveNumber);
  gen_texture_cmd->add_option("-o,--output", out, "raster path")->required();
  gen_texture_cmd->add_option("--ppm", ppm, "also write a PPM preview");

  std::string demos, goal;
  std::vector<double> offset{0, 0, 0};
  double jitter = 0, bridge_step = 0.01;
  std::optional<std::uint64_t> synth_seed;
  auto* gen_synth_cmd = gen->add_subcommand("synth", "re-anchor demo segments");
  gen_synth_cmd->add_option("demos", demos, "record file")->required();
  gen_synth_cmd->add_option("--goal", goal, "primitive sequence, e.g. \"pick place\"")->required();
  gen_synth_cmd->add_option("--offset", offset, "anchor translation x y z")->expected(3)->capture_default_str();
  gen_synth_cmd->add_option("--jitter", jitter, "uniform per-axis anchor noise (m)")->capture_default_str();
  gen_synth_cmd->add_option("--seed", synth_seed, "random seed (with --jitter)");
  gen_synth_cmd->add_option("--bridge-step", bridge_step, "max bridge spacing (m)")->capture_default_str();
  add_out(gen_synth_cmd);

  // ingest
  std::string records_file;
  auto* ingest = app.add_subcommand("ingest", "validate a record file");
  ingest->add_option("file", records_file, "record file")->required();
  add_out(ingest);
  add_format(ingest);

  // annotate
  AnnotateFlags af;
  auto* annotate = app.add_subcommand("annotate", "derive metadata for each record");
  annotate->add_option("file", records_file, "record file")->required();
  annotate->add_option("--vectors", af.vectors, "word vector table")->capture_default_str();
  annotate->add_option("--lexicon", af.lexicon, "verb list");
  annotate->add_option("--colors", af.colors, "offline color table (JSON id -> color)");
  annotate->add_option("--bins", af.bins, "camera bin table (JSON)");
  annotate->add_option("--table-center", af.table_center, "x y z")->expected(3)->capture_default_str();
  annotate->add_option("--cluster-cut", af.cut, "cosine distance cut")->capture_default_str();
  add_out(annotate);

  // profile / classify
  std::vector<std::string> profile_files;
  double cell = 0.02, angle_cell = 5.0;
  std::vector<double> center{0, 0, 0};
  auto add_profile_opts = [&](CLI::App* c) {
    c->add_option("--cell", cell, "spatial dilation cell (m)")->capture_default_str();
    c->add_option("--angle-cell", angle_cell, "angular dilation cell (deg)")->capture_default_str();
    c->add_option("--table-center", center, "x y z")->expected(3)->capture_default_str();
  };
  auto* profile = app.add_subcommand("profile", "per-DV supports of a dataset");
  profile->add_option("files", profile_files, "record files or saved profiles; merged")->required();
  add_profile_opts(profile);
  add_format(profile);
  add_out(profile);

  std::string target, cotrain, dv;
  double rho = dvkit::dvalgebra::kDefaultRho;
  auto* classify = app.add_subcommand("classify", "diversity/alignment case of a target-cotrain pair");
  classify->add_option("--target", target, "record file or profile .json")->required();
  classify->add_option("--cotrain", cotrain, "record file or profile .json")->required();
  classify->add_option("--dv", dv, "dimension of variation")->required();
  classify->add_option("--rho", rho, "diversity ratio")->capture_default_str();
  add_profile_opts(classify);
  add_format(classify);

  // retrieve
  QueryFlags qf;
  bool report = false;
  auto* retrieve = app.add_subcommand("retrieve", "query an annotated record file");
  retrieve->add_option("--index", records_file, "annotated record file")->required();
  retrieve->add_option("--query", qf.query_file, "file of (query ...) forms");
  retrieve->add_option("--object", qf.object, "target object to include");
  retrieve->add_option("--exclude-object", qf.exclude_object, "target object to exclude");
  retrieve->add_option("--campose", qf.campose, "camera target x y z")->expected(3);
  retrieve->add_option("--campose-tol", qf.campose_tol, "camera tolerance (default 0.2 0.2 0.1)")->expected(3);
  retrieve->add_option("--objspat", qf.objspat, "cuboid center x y z")->expected(3);
  retrieve->add_option("--objspat-extent", qf.objspat_extent, "cuboid size (default 0.6 0.6 0.3)")->expected(3);
  retrieve->add_option("--color", qf.color, "object color");
  retrieve->add_option("--motion", qf.motion, "required primitives")->delimiter(',');
  retrieve->add_flag("--report", report, "per-filter counts");
  add_format(retrieve);
  add_out(retrieve);

  // sample-batches
  double omega = dvkit::sampler::kDefaultOmega;
  std::size_t batch = 32;
  bool stats = false;
  auto* sample = app.add_subcommand("sample-batches", "co-training mixture batches");
  sample->add_option("--target", target, "target id list")->required();
  sample->add_option("--cotrain", cotrain, "co-training id list")->required();
  sample->add_option("--omega", omega, "target probability")->capture_default_str();
  sample->add_option("--batch", batch, "batch size")->capture_default_str();
  sample->add_option("--n", n, "number of batches")->required();
  sample->add_option("--seed", seed, "random seed")->required();
  sample->add_flag("--stats", stats, "print the empirical report instead of batches");
  add_format(sample);
  add_out(sample);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  }

  try {
    check_format(format);
    if (*spec_validate_cmd) return spec_validate(spec_files);
    if (*spec_sample_cmd) return spec_sample(spec_file, seed, n, out);
    if (*gen_instances_cmd) return gen_instances(spatial, format, out);
    if (*gen_texture_cmd) return gen_texture(spec_file, which, seed, width, height, out, ppm);
    if (*gen_synth_cmd) return gen_synth(demos, goal, offset, jitter, synth_seed, bridge_step, out);
    if (*ingest) return ingest_cmd(records_file, out, format);
    if (*annotate) return annotate_cmd(records_file, out, af);
    const auto opt = profile_options(cell, angle_cell, center);
    if (*profile) return profile_cmd(profile_files, opt, format, out);
    if (*classify) return classify_cmd(target, cotrain, dv, rho, opt, format);
    if (*retrieve) return retrieve_cmd(records_file, qf, report, format, out);
    if (*sample) return sample_batches_cmd(target, cotrain, omega, batch, n, seed, stats, format, out);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const dvkit::Error& e) {
    return report_domain_error(e);
  } catch (const json::exception& e) {
    return report_domain_error(dvkit::Error("FormatError", e.what()));
  }
  return 2;
}

// Copyright 2026 The screenrep Authors.
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

#include "screenrep/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "screenrep/engine_config.hpp"
#include "screenrep/error.hpp"
#include "screenrep/fixture.hpp"
#include "screenrep/records.hpp"
#include "screenrep/report.hpp"

namespace screenrep::cli {

namespace fs = std::filesystem;

namespace {

std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  std::replace(s.begin(), s.end(), '\r', ' ');
  return s;
}

const char* class_tag(ErrorClass c) {
  switch (c) {
    case ErrorClass::kData: return "data";
    case ErrorClass::kIo: return "io";
    case ErrorClass::kConfig: return "config";
  }
  return "data";
}

int exit_code(ErrorClass c) {
  switch (c) {
    case ErrorClass::kData: return kExitData;
    case ErrorClass::kIo: return kExitIo;
    case ErrorClass::kConfig: return kExitConfig;
  }
  return kExitData;
}

int report_error(std::ostream& err, const Error& e) {
  const ErrorClass c = classify(e.code());
  err << "error[" << class_tag(c) << "]: " << to_string(e.code()) << ": "
      << one_line(e.what()) << '\n';
  return exit_code(c);
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, path + ": cannot open for reading");
  return in;
}

std::string read_file(const std::string& path) {
  std::ifstream in = open_input(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::kIo, path + ": read failed");
  return ss.str();
}

// Parse errors carry the line; prefix the file so the message is complete.
template <typename F>
auto with_file(const std::string& path, F&& parse) {
  try {
    return parse();
  } catch (const ParseError& e) {
    throw Error(e.code(), path + ": " + e.what());
  }
}

// Files written by one command; removed unless commit() is called.
class OutputSet {
 public:
  explicit OutputSet(fs::path dir) : dir_(std::move(dir)) {}
  OutputSet(const OutputSet&) = delete;
  OutputSet& operator=(const OutputSet&) = delete;

  ~OutputSet() {
    if (committed_) return;
    std::error_code ec;
    for (auto it = written_.rbegin(); it != written_.rend(); ++it) {
      fs::remove(*it, ec);
    }
    for (auto it = dirs_.rbegin(); it != dirs_.rend(); ++it) {
      fs::remove(*it, ec);  // only succeeds when empty
    }
  }

  void make_dir(const fs::path& rel) {
    const fs::path p = dir_ / rel;
    std::vector<fs::path> missing;
    for (fs::path q = p; !q.empty() && !fs::exists(q); q = q.parent_path()) {
      missing.push_back(q);
      if (q == q.parent_path()) break;
    }
    std::error_code ec;
    fs::create_directories(p, ec);
    if (ec || !fs::is_directory(p)) {
      throw Error(ErrorCode::kIo, p.string() + ": cannot create directory");
    }
    dirs_.insert(dirs_.end(), missing.rbegin(), missing.rend());
  }

  void write(const fs::path& rel, const std::string& content) {
    const fs::path p = dir_ / rel;
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIo, p.string() + ": cannot open for writing");
    written_.push_back(p);
    out << content;
    out.flush();
    if (!out) throw Error(ErrorCode::kIo, p.string() + ": write failed");
  }

  void commit() { committed_ = true; }

 private:
  fs::path dir_;
  std::vector<fs::path> written_;
  std::vector<fs::path> dirs_;
  bool committed_ = false;
};

struct ValidateArgs {
  std::string meta;
  std::string records;
};

struct AnalyzeArgs {
  std::string meta;
  std::string records;
  std::string config;
  std::string out;
  int jobs = 1;
  double confidence_min = 0.0;
  std::uint64_t seed = 0;
  CLI::Option* jobs_opt = nullptr;
  CLI::Option* weight_opt = nullptr;
  CLI::Option* confidence_opt = nullptr;
  CLI::Option* seed_opt = nullptr;
};

struct FixtureArgs {
  std::string spec;
  std::string out;
};

int cmd_validate(const ValidateArgs& args, std::ostream& out, std::ostream& err) {
  std::ifstream meta_in = open_input(args.meta);
  std::ifstream records_in = open_input(args.records);
  const auto metas = scan_video_metas(meta_in);
  const auto records = scan_frame_records(records_in);
  if (meta_in.bad() || records_in.bad()) {
    throw Error(ErrorCode::kIo, "read failed");
  }

  std::size_t violations = 0;
  auto line_error = [&](const std::string& file, std::size_t line, ErrorCode code,
                        const std::string& message) {
    ++violations;
    err << "error[" << class_tag(classify(code)) << "]: " << to_string(code)
        << ": " << file << ":" << line << ": " << one_line(message) << '\n';
  };
  for (const ParseError& e : metas.errors) {
    line_error(args.meta, e.line(), e.code(), e.path() + ": " + e.detail());
  }
  for (const ParseError& e : records.errors) {
    line_error(args.records, e.line(), e.code(), e.path() + ": " + e.detail());
  }
  for (const CorpusViolation& v :
       check_corpus(metas.items, records.items, records.lines)) {
    line_error(args.records, v.line, v.code, v.message);
  }

  std::map<std::string, std::size_t> frames;
  for (const FrameRecord& r : records.items) ++frames[r.video_id];
  out << "video_id\tcategory\tframes\n";
  for (const VideoMeta& m : metas.items) {
    const auto it = frames.find(m.video_id);
    out << m.video_id << '\t' << to_string(m.category) << '\t'
        << (it == frames.end() ? 0 : it->second) << '\n';
  }
  return violations == 0 ? kExitOk : kExitData;
}

int cmd_analyze(const AnalyzeArgs& args, std::ostream& out) {
  // Configuration first, so config errors surface before any data is read.
  EngineConfig config;
  if (!args.config.empty()) {
    config = load_engine_config(args.config);
  }
  if (*args.jobs_opt) config.jobs = args.jobs;
  if (*args.weight_opt) config.metrics.weight_by_faces = true;
  if (*args.confidence_opt) config.metrics.confidence_min = args.confidence_min;
  if (*args.seed_opt) {
    config.metrics.seed = args.seed;
    config.clusters.seed = args.seed;
  }
  config.validate();

  std::ifstream meta_in = open_input(args.meta);
  std::ifstream records_in = open_input(args.records);
  auto metas = with_file(args.meta, [&] { return parse_video_metas(meta_in); });
  auto records =
      with_file(args.records, [&] { return parse_frame_records(records_in); });
  if (meta_in.bad() || records_in.bad()) {
    throw Error(ErrorCode::kIo, "read failed");
  }
  const CorpusIndex corpus = build_corpus(std::move(metas), std::move(records));

  const AnalysisResult result = analyze(corpus, config);

  OutputSet files(args.out);
  files.make_dir("plotdata");
  files.write("report.json", report_json(result).dump(2) + "\n");
  files.write("report.csv", report_csv(result));
  for (const auto& [name, content] : plot_data(result)) {
    files.write(fs::path("plotdata") / name, content);
  }
  files.commit();
  out << "wrote " << (fs::path(args.out) / "report.json").string() << '\n';
  return kExitOk;
}

int cmd_fixture(const FixtureArgs& args, std::ostream& out) {
  const FixtureSpec spec = parse_fixture_spec(read_file(args.spec));
  const Fixture fixture = generate_fixture(spec);

  std::string meta;
  for (const VideoMeta& m : fixture.metas) meta += serialize(m) + "\n";
  std::string records;
  for (const FrameRecord& r : fixture.records) records += serialize(r) + "\n";

  OutputSet files(args.out);
  files.make_dir(".");
  files.write("meta.jsonl", meta);
  files.write("records.jsonl", records);
  files.write("expected.json", fixture.expected.dump(2) + "\n");
  files.commit();
  out << "wrote " << fixture.metas.size() << " videos, "
      << fixture.records.size() << " frames to " << args.out << '\n';
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Screen representation analytics over face-observation corpora",
               "screenrep"};
  app.require_subcommand(1);

  ValidateArgs vargs;
  auto* validate = app.add_subcommand("validate", "Check a corpus and print frame counts");
  validate->add_option("--meta", vargs.meta, "Video metadata JSONL")->required();
  validate->add_option("--records", vargs.records, "Frame records JSONL")->required();

  AnalyzeArgs aargs;
  auto* analyze_cmd = app.add_subcommand("analyze", "Compute reports for a corpus");
  analyze_cmd->add_option("--meta", aargs.meta, "Video metadata JSONL")->required();
  analyze_cmd->add_option("--records", aargs.records, "Frame records JSONL")->required();
  analyze_cmd->add_option("--config", aargs.config, "Engine configuration JSON");
  analyze_cmd->add_option("--out", aargs.out, "Output directory")->required();
  aargs.jobs_opt = analyze_cmd->add_option("--jobs", aargs.jobs, "Worker threads");
  aargs.weight_opt = analyze_cmd->add_flag("--weight-by-faces",
                                           "Credit screen time once per face");
  aargs.confidence_opt = analyze_cmd->add_option(
      "--confidence-min", aargs.confidence_min, "Minimum gender confidence");
  aargs.seed_opt = analyze_cmd->add_option("--seed", aargs.seed, "Random seed");

  FixtureArgs fargs;
  auto* fixture = app.add_subcommand("fixture", "Generate a synthetic corpus");
  fixture->add_option("spec,--spec", fargs.spec, "Fixture spec JSON")->required();
  fixture->add_option("--out", fargs.out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error[config]: usage: " << one_line(e.what()) << '\n';
    return kExitConfig;
  }

  try {
    if (*validate) return cmd_validate(vargs, out, err);
    if (*analyze_cmd) return cmd_analyze(aargs, out);
    return cmd_fixture(fargs, out);
  } catch (const Error& e) {
    return report_error(err, e);
  } catch (const fs::filesystem_error& e) {
    err << "error[io]: io: " << one_line(e.what()) << '\n';
    return kExitIo;
  } catch (const std::bad_alloc&) {
    err << "error[io]: io: out of memory\n";
    return kExitIo;
  }
}

}  // namespace screenrep::cli

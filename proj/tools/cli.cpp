#include "cli.hpp"

#include <openssl/evp.h>

#include <CLI11.hpp>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "ages/aggregate.hpp"
#include "ages/errors.hpp"
#include "ages/eval.hpp"
#include "ages/faithfulness.hpp"
#include "ages/ges.hpp"
#include "ages/io.hpp"
#include "ages/score.hpp"
#include "ages/sem.hpp"

#ifndef AGES_VERSION
#define AGES_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using nlohmann::json;

namespace ages::cli {

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) throw IoError("SHA-256 failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

namespace {

// An output with an empty path goes to stdout.
struct Output {
  std::string role;
  std::string path;
  std::string content;
};

struct Input {
  std::string path;
  std::string sha256;
};

// Everything a verb reads and writes, so that the run can be recorded and
// replayed without touching the file system.
struct Context {
  std::vector<Input> inputs;
  std::vector<Output> outputs;

  std::string read(const std::string& path) {
    std::string bytes = io::read_file(path);
    inputs.push_back({fs::absolute(path).lexically_normal().string(), sha256_hex(bytes)});
    return bytes;
  }

  void emit(const std::string& role, const std::string& path, std::string content) {
    outputs.push_back({role, path, std::move(content)});
  }
};

enum class Format { kText, kJson };

struct Common {
  std::string format = "text";
  std::string out;
  std::string manifest;
  int jobs = 0;

  Format fmt() const {
    if (format == "text") return Format::kText;
    if (format == "json") return Format::kJson;
    throw ConfigError("--format must be text or json");
  }
};

struct SourceOptions {
  std::string data, cov, sem;
  long n = 0;
  bool oracle = false;
  std::uint64_t seed = 1;
};

struct Loaded {
  CovarianceSource src;
  std::optional<io::Labels> names;
};

Loaded load_source(const SourceOptions& o, Context& ctx) {
  const int given = !o.data.empty() + !o.cov.empty() + !o.sem.empty();
  if (given != 1) throw ConfigError("give exactly one of --data, --cov, --sem");
  Loaded l;
  if (!o.data.empty()) {
    if (o.oracle) throw ConfigError("--oracle needs --cov or --sem");
    std::istringstream is(ctx.read(o.data));
    io::Table t = io::read_table(is);
    if (t.values.rows() < 2) throw ConfigError("data needs at least two rows");
    l.src = sample_covariance(t.values);
    l.names = t.names;
  } else if (!o.cov.empty()) {
    std::istringstream is(ctx.read(o.cov));
    io::Table t = io::read_covariance(is);
    if (o.oracle) {
      l.src = CovarianceSource::oracle(t.values);
    } else {
      if (o.n < 2) throw ConfigError("a sample covariance needs --n");
      l.src = CovarianceSource::sample(t.values, o.n);
    }
    l.names = t.names;
  } else {
    std::istringstream is(ctx.read(o.sem));
    const WeightedSem m = io::read_sem(is);
    if (o.oracle) {
      l.src = true_covariance(m);
    } else {
      if (o.n < 2) throw ConfigError("sampling from a SEM needs --n (or use --oracle)");
      l.src = sample_data(m, o.n, o.seed).covariance;
    }
  }
  return l;
}

WeightedSem load_sem(const std::string& path, Context& ctx) {
  if (path.empty()) throw ConfigError("--sem is required");
  std::istringstream is(ctx.read(path));
  return io::read_sem(is);
}

PathPolicy parse_policy(const std::string& s) {
  if (s == "exact") return PathPolicy::kExact;
  if (s == "lower") return PathPolicy::kLowerEndpoint;
  throw ConfigError("--policy must be exact or lower");
}

void emit_labels(Context& ctx, const std::string& path, const std::optional<io::Labels>& names, int p) {
  if (path.empty()) return;
  std::ostringstream os;
  io::write_labels(os, names ? *names : io::default_labels(p));
  ctx.emit("labels", path, os.str());
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::string graph_text(const MixedGraph& g) {
  std::ostringstream os;
  io::write_edge_list(os, g);
  return os.str();
}

std::string apdag_output(const Apdag& a, Format fmt, bool provenance, json extra = json::object()) {
  if (fmt == Format::kJson) {
    json j = io::apdag_json(a);
    for (auto& [k, v] : extra.items()) j[k] = v;
    return dump(j);
  }
  std::ostringstream os;
  if (provenance) {
    io::write_apdag(os, a);
  } else {
    io::write_edge_list(os, a.graph());
  }
  return os.str();
}

std::string report_text(const FaithfulnessReport& r) {
  std::ostringstream os;
  os << "holds: " << (r.holds ? "true" : "false") << '\n';
  os << "triples_checked: " << r.triples_checked << '\n';
  os << "violations: " << r.violations.size() << '\n';
  for (const auto& v : r.violations) {
    os << "violation: i=" << v.i << " j=" << v.j << " s={";
    for (std::size_t k = 0; k < v.s.size(); ++k) os << (k ? "," : "") << v.s[k];
    os << "} abs_rho=" << io::format_double(v.abs_rho) << " delta=" << io::format_double(v.delta)
       << " stage=" << v.stage << '\n';
  }
  return os.str();
}

int jobs_default() {
  const char* env = std::getenv("AGES_JOBS");
  if (!env || !*env) return 0;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (*end != '\0' || v < 0 || v > 4096) throw ConfigError("AGES_JOBS must be a non-negative integer");
  return static_cast<int>(v);
}

// Resolved option values of a subcommand, defaults included.
json resolved_config(CLI::App* sub) {
  json j = json::object();
  for (CLI::Option* opt : sub->get_options()) {
    if (opt->get_lnames().empty()) continue;
    const std::string& name = opt->get_lnames().front();
    if (name == "help" || name == "manifest") continue;
    if (opt->count() > 0) {
      const auto& r = opt->results();
      j[name] = r.size() == 1 ? json(r.front()) : json(r);
    } else {
      j[name] = opt->get_default_str().empty() ? json(nullptr) : json(opt->get_default_str());
    }
  }
  return j;
}

struct Invocation {
  std::string command;
  json config;
  Common common;
  bool is_replay = false;
  std::string replay_manifest;
  std::string replay_out_dir;
};

// Parses args and runs the selected verb into ctx. Returns false when help was
// printed instead.
bool execute(const std::vector<std::string>& args, Context& ctx, Invocation& inv, std::ostream& out) {
  CLI::App app{"Aggregated greedy equivalence search for linear Gaussian SEMs", "ages"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();
  app.set_version_flag("--version", AGES_VERSION);

  Common common;
  common.jobs = jobs_default();
  SourceOptions src;
  double lambda = -1.0;
  double lambda_min = -1.0;
  std::string policy = "exact";
  bool provenance = false;
  std::string labels_out;

  auto add_common = [&](CLI::App* sub, bool graph_output) {
    sub->option_defaults()->always_capture_default();
    sub->add_option("-o,--out", common.out, "Output file (default: stdout)");
    sub->add_option("--manifest", common.manifest, "Run manifest path (default: <out>.manifest.json)");
    sub->add_option("--jobs", common.jobs, "Worker threads, 0 = all (default from AGES_JOBS)")->check(CLI::NonNegativeNumber);
    if (graph_output) sub->add_option("--format", common.format, "Graph output format: text or json");
  };
  auto add_source = [&](CLI::App* sub) {
    sub->add_option("--data", src.data, "Data CSV (header row of names, one sample per row)");
    sub->add_option("--cov", src.cov, "Covariance CSV (header row of names, square matrix)");
    sub->add_option("--sem", src.sem, "SEM file");
    sub->add_option("--n", src.n, "Sample size for --cov, or number of samples drawn from --sem");
    sub->add_flag("--oracle", src.oracle, "Treat --cov/--sem as the population covariance");
    sub->add_option("--seed", src.seed, "Seed for sampling from --sem");
    sub->add_option("--labels-out", labels_out, "Write the variable names to this file");
  };

  // simulate
  SemGenConfig gen;
  long sim_n = 0;
  std::string sem_out, data_out, cov_out;
  CLI::App* simulate = app.add_subcommand("simulate", "Draw a random SEM and optionally a data set");
  add_common(simulate, false);
  simulate->add_option("--p", gen.p, "Number of variables")->check(CLI::Range(1, 64));
  simulate->add_option("--qs", gen.q_strong, "Probability of a strong edge");
  simulate->add_option("--qw", gen.q_weak, "Probability of a weak edge");
  simulate->add_flag("--permute", gen.permute, "Relabel vertices by a random permutation");
  simulate->add_option("--seed", gen.seed, "Random seed");
  simulate->add_option("--n", sim_n, "Number of samples for --data-out");
  simulate->add_option("--sem-out", sem_out, "SEM file to write")->required();
  simulate->add_option("--data-out", data_out, "Data CSV to write (needs --n)");
  simulate->add_option("--cov-out", cov_out, "Population covariance CSV to write");

  CLI::App* ges = app.add_subcommand("ges", "GES at one penalty; prints the CPDAG");
  add_common(ges, true);
  add_source(ges);
  ges->add_option("--lambda", lambda, "Penalty (default: log(n)/(2n) for samples, required with --oracle)");

  CLI::App* path = app.add_subcommand("path", "Solution path of GES over lambda >= lambda_min");
  add_common(path, true);
  add_source(path);
  path->add_option("--lambda-min", lambda_min, "Smallest penalty (default: 0 for --oracle, log(n)/(2n) otherwise)");
  path->add_option("--policy", policy, "Backward phase per interval: exact or lower");

  CLI::App* ages = app.add_subcommand("ages", "AGES; prints the aggregated PDAG");
  add_common(ages, true);
  add_source(ages);
  ages->add_option("--lambda-min", lambda_min, "Smallest penalty (default: 0 for --oracle, log(n)/(2n) otherwise)");
  ages->add_option("--policy", policy, "Backward phase per interval: exact or lower");
  ages->add_flag("--provenance", provenance, "Annotate each directed edge with its source");

  std::string sem_path;
  CLI::App* true_ap = app.add_subcommand("true-apdag", "Target APDAG A0 of a SEM");
  add_common(true_ap, true);
  true_ap->add_option("--sem", sem_path, "SEM file")->required();
  true_ap->add_flag("--provenance", provenance, "Annotate each directed edge with its source");

  std::string mode = "path";
  double delta = -1.0;
  std::string graph_path;
  CLI::App* check = app.add_subcommand("check-faithfulness", "Strong faithfulness diagnostics of a SEM");
  add_common(check, true);
  check->add_option("--sem", sem_path, "SEM file")->required();
  check->add_option("--mode", mode, "path, strong (classical) or ages");
  check->add_option("--delta", delta, "Threshold for --mode strong and ages");
  check->add_option("--graph", graph_path, "DAG edge list to check against (default: the SEM's DAG)");

  RegionGrid grid;
  CLI::App* region = app.add_subcommand("region", "Region map of the three-vertex family as CSV");
  add_common(region, false);
  region->add_option("--resolution", grid.resolution, "Grid points per axis");
  region->add_option("--lo", grid.lo, "Lower end of both weight ranges");
  region->add_option("--hi", grid.hi, "Upper end of both weight ranges");
  region->add_option("--b12", grid.b12, "Weight of X1 -> X2");

  ExperimentConfig exp;
  std::vector<double> lambdas;
  std::string records_out, summary_out;
  bool timing = false;
  CLI::App* eval = app.add_subcommand("eval", "Simulation study comparing GES and AGES");
  add_common(eval, false);
  eval->add_option("--p", exp.p, "Number of variables");
  eval->add_option("--n", exp.n, "Sample size");
  eval->add_option("--qs", exp.q_strong, "Probability of a strong edge");
  eval->add_option("--qw", exp.q_weak, "Probability of a weak edge");
  eval->add_option("--reps", exp.replicates, "Replicates");
  eval->add_option("--seed", exp.seed, "Random seed");
  eval->add_option("--lambda", lambdas, "Penalty; repeat for a grid (default: log(n)/(2n))");
  eval->add_option("--records", records_out, "Per-replicate CSV")->required();
  eval->add_option("--summary", summary_out, "Summary CSV")->required();
  eval->add_flag("--timing", timing, "Add a runtime_ms column (not reproducible)");

  CLI::App* replay = app.add_subcommand("replay", "Re-run a manifest and compare outputs byte for byte");
  replay->add_option("manifest", inv.replay_manifest, "Manifest JSON")->required();
  replay->add_option("--out-dir", inv.replay_out_dir, "Also write the re-created outputs into this directory");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return false;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return false;
  } catch (const CLI::CallForVersion&) {
    out << AGES_VERSION << '\n';
    return false;
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  CLI::App* sub = app.get_subcommands().front();
  inv.command = sub->get_name();
  inv.common = common;
  if (sub == replay) {
    inv.is_replay = true;
    return true;
  }
  inv.config = resolved_config(sub);
  const Format fmt = sub->get_option_no_throw("--format") ? common.fmt() : Format::kText;

  if (sub == simulate) {
    gen.validate();
    Rng rng(gen.seed);
    const WeightedSem m = random_sem(gen, rng);
    std::ostringstream os;
    io::write_sem(os, m);
    ctx.emit("sem", sem_out, os.str());
    if (!cov_out.empty()) {
      std::ostringstream cs;
      io::write_table(cs, {io::default_labels(gen.p), true_covariance(m).sigma()});
      ctx.emit("cov", cov_out, cs.str());
    }
    if (!data_out.empty()) {
      if (sim_n < 1) throw ConfigError("--data-out needs --n");
      const SampleResult s = sample_data(m, sim_n, rng);
      std::ostringstream ds;
      io::write_table(ds, {io::default_labels(gen.p), s.data});
      ctx.emit("data", data_out, ds.str());
    } else if (sim_n != 0) {
      throw ConfigError("--n needs --data-out");
    }
    if (!common.out.empty()) throw ConfigError("simulate writes --sem-out/--data-out/--cov-out, not --out");
    return true;
  }

  if (sub == ges) {
    const Loaded l = load_source(src, ctx);
    double lam = lambda;
    if (lam < 0) {
      if (l.src.is_oracle()) throw ConfigError("--lambda is required with --oracle");
      lam = bic_lambda(*l.src.sample_size());
    }
    const GesResult r = ges_run(l.src, lam);
    if (fmt == Format::kJson) {
      json j = io::graph_json(r.cpdag.graph());
      j["lambda"] = lam;
      ctx.emit("graph", common.out, dump(j));
    } else {
      ctx.emit("graph", common.out, graph_text(r.cpdag.graph()));
    }
    emit_labels(ctx, labels_out, l.names, l.src.size());
    return true;
  }

  if (sub == path || sub == ages) {
    const Loaded l = load_source(src, ctx);
    const double lmin = lambda_min >= 0 ? lambda_min : default_lambda_min(l.src);
    const PathPolicy pol = parse_policy(policy);
    if (sub == path) {
      const SolutionPath sp = solution_path(l.src, lmin, pol);
      if (fmt == Format::kJson) {
        ctx.emit("path", common.out, dump(io::path_json(sp)));
      } else {
        std::ostringstream os;
        io::write_path(os, sp);
        ctx.emit("path", common.out, os.str());
      }
    } else {
      const AgesResult r = ages_run(l.src, lmin, pol);
      json extra = {{"lambda_min", lmin}, {"kept", r.kept}, {"discarded", r.discarded}};
      ctx.emit("apdag", common.out, apdag_output(r.apdag, fmt, provenance, extra));
    }
    emit_labels(ctx, labels_out, l.names, l.src.size());
    return true;
  }

  if (sub == true_ap) {
    const WeightedSem m = load_sem(sem_path, ctx);
    ctx.emit("apdag", common.out, apdag_output(true_apdag(m), fmt, provenance));
    return true;
  }

  if (sub == check) {
    const WeightedSem m = load_sem(sem_path, ctx);
    FaithfulnessReport r;
    if (mode == "path") {
      if (delta >= 0) throw ConfigError("--delta does not apply to --mode path");
      if (!graph_path.empty()) throw ConfigError("--graph does not apply to --mode path");
      r = path_strong_faithfulness(m);
    } else if (mode == "strong" || mode == "ages") {
      if (delta < 0) throw ConfigError("--mode " + mode + " needs --delta");
      Dag g = m.dag();
      if (!graph_path.empty()) {
        std::istringstream is(ctx.read(graph_path));
        g = Dag::from_graph(io::read_edge_list(is));
        if (g.size() != m.size()) throw ConfigError("--graph and --sem differ in size");
      }
      r = mode == "strong" ? strong_faithful(true_covariance(m), g, delta)
                           : ages_strong_faithful(true_covariance(m), g, delta);
    } else {
      throw ConfigError("--mode must be path, strong or ages");
    }
    ctx.emit("report", common.out, fmt == Format::kJson ? dump(io::report_json(r)) : report_text(r));
    return true;
  }

  if (sub == region) {
    const auto cells = region_map(grid, common.jobs);
    std::ostringstream os;
    io::write_region_csv(os, cells);
    ctx.emit("region", common.out, os.str());
    return true;
  }

  if (sub == eval) {
    if (lambdas.size() == 1) {
      exp.lambda_policy = LambdaPolicy::kFixed;
      exp.lambda = lambdas.front();
    } else if (lambdas.size() > 1) {
      exp.lambda_policy = LambdaPolicy::kGrid;
      exp.lambda_grid = lambdas;
    }
    exp.jobs = common.jobs;
    if (!common.out.empty()) throw ConfigError("eval writes --records and --summary, not --out");
    const ExperimentResult r = run_experiment(exp);
    std::ostringstream rs, ss;
    write_records_csv(rs, r.records, timing);
    write_summary_csv(ss, r.summary);
    ctx.emit("records", records_out, rs.str());
    ctx.emit("summary", summary_out, ss.str());
    return true;
  }
  throw UsageError("unknown command");
}

json manifest_json(const std::vector<std::string>& args, const Invocation& inv, const Context& ctx) {
  json j;
  j["tool"] = "ages";
  j["version"] = AGES_VERSION;
  j["command"] = inv.command;
  j["argv"] = args;
  j["cwd"] = fs::current_path().string();
  j["config"] = inv.config;
  j["seed"] = inv.config.contains("seed") ? inv.config["seed"] : json(nullptr);
  j["inputs"] = json::array();
  for (const auto& in : ctx.inputs) j["inputs"].push_back({{"path", in.path}, {"sha256", in.sha256}});
  j["outputs"] = json::array();
  for (const auto& o : ctx.outputs) {
    j["outputs"].push_back({{"role", o.role},
                            {"path", o.path.empty() ? json(nullptr) : json(o.path)},
                            {"bytes", o.content.size()},
                            {"sha256", sha256_hex(o.content)}});
  }
  return j;
}

void write_outputs(const Context& ctx, std::ostream& out) {
  for (const auto& o : ctx.outputs) {
    if (o.path.empty()) {
      out << o.content;
    } else {
      io::write_file(o.path, o.content);
    }
  }
}

std::string default_manifest_path(const Invocation& inv, const Context& ctx) {
  if (!inv.common.manifest.empty()) return inv.common.manifest;
  for (const auto& o : ctx.outputs)
    if (!o.path.empty()) return o.path + ".manifest.json";
  return "";
}

// Restores the working directory when leaving scope.
struct CwdGuard {
  fs::path saved = fs::current_path();
  ~CwdGuard() {
    std::error_code ec;
    fs::current_path(saved, ec);
  }
};

int run_replay(const Invocation& inv, std::ostream& out, std::ostream& err) {
  json m;
  try {
    m = json::parse(io::read_file(inv.replay_manifest));
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad manifest: ") + e.what());
  }
  std::vector<std::string> args;
  json recorded_outputs, recorded_inputs;
  std::string cwd;
  try {
    args = m.at("argv").get<std::vector<std::string>>();
    recorded_outputs = m.at("outputs");
    recorded_inputs = m.at("inputs");
    cwd = m.at("cwd").get<std::string>();
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad manifest: ") + e.what());
  }
  if (!args.empty() && args.front() == "replay") throw UsageError("cannot replay a replay");
  const fs::path out_dir = inv.replay_out_dir.empty() ? fs::path() : fs::absolute(inv.replay_out_dir);
  if (!out_dir.empty()) {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create " + out_dir.string());
  }

  for (const auto& in : recorded_inputs) {
    const std::string path = in.value("path", "");
    if (sha256_hex(io::read_file(path)) != in.value("sha256", ""))
      throw IoError("input changed since the manifest was written: " + path);
  }

  Context ctx;
  Invocation again;
  {
    CwdGuard guard;
    std::error_code ec;
    fs::current_path(cwd, ec);
    if (ec) throw IoError("cannot enter recorded directory " + cwd);
    std::ostringstream ignored;
    execute(args, ctx, again, ignored);
  }

  if (recorded_inputs.size() != ctx.inputs.size()) throw IoError("inputs differ from the manifest");
  for (std::size_t k = 0; k < ctx.inputs.size(); ++k) {
    if (recorded_inputs[k].value("sha256", "") != ctx.inputs[k].sha256)
      throw IoError("input changed since the manifest was written: " + ctx.inputs[k].path);
  }

  int mismatches = 0;
  if (recorded_outputs.size() != ctx.outputs.size()) {
    err << "error[replay]: output count differs from the manifest\n";
    return kExitReplayMismatch;
  }
  for (std::size_t k = 0; k < ctx.outputs.size(); ++k) {
    const auto& o = ctx.outputs[k];
    const bool same = recorded_outputs[k].value("role", "") == o.role &&
                      recorded_outputs[k].value("sha256", "") == sha256_hex(o.content);
    if (!same) ++mismatches;
    out << (same ? "identical " : "differs ") << o.role << ' ' << sha256_hex(o.content) << '\n';
    if (!out_dir.empty()) {
      const std::string name = o.path.empty() ? o.role + ".out" : fs::path(o.path).filename().string();
      io::write_file(out_dir / name, o.content);
    }
  }
  if (mismatches > 0) {
    err << "error[replay]: " << mismatches << " output(s) differ from the manifest\n";
    return kExitReplayMismatch;
  }
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    Context ctx;
    Invocation inv;
    if (!execute(args, ctx, inv, out)) return kExitOk;
    if (inv.is_replay) return run_replay(inv, out, err);
    write_outputs(ctx, out);
    const std::string manifest = default_manifest_path(inv, ctx);
    if (!manifest.empty()) io::write_file(manifest, dump(manifest_json(args, inv, ctx)));
    return kExitOk;
  } catch (const UsageError& e) {
    err << "error[usage]: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ClassTooLarge& e) {
    err << "error[usage]: " << e.what() << '\n';
    return kExitUsage;
  } catch (const NumericError& e) {
    err << "error[numeric]: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const IoError& e) {
    err << "error[io]: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    err << "error[internal]: " << e.what() << '\n';
    return kExitInternal;
  }
}

}  // namespace ages::cli

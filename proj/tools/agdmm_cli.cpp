#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "agdmm/acceptance.hpp"
#include "agdmm/config.hpp"
#include "agdmm/error.hpp"
#include "agdmm/sim.hpp"

using namespace agdmm;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitBuild = 2;
constexpr int kExitRuntime = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string spec;
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string format;
  std::string model;
  std::optional<int> trials;
  bool emit_config = false;
  std::vector<std::string> curves;
  std::vector<int> ps{1, 2, 3, 4};
  std::vector<std::string> mn{"2x2", "2x3", "3x2"};
};

ExperimentConfig resolve(const Options& o) {
  ExperimentConfig cfg = o.config.empty() ? ExperimentConfig{} : ExperimentConfig::load(o.config);
  if (!o.spec.empty()) cfg.scheme = o.spec;
  if (o.seed) cfg.seed = *o.seed;
  if (!o.out.empty()) cfg.out = o.out;
  if (!o.format.empty()) cfg.format = o.format;
  if (!o.model.empty()) cfg.model = o.model;
  if (o.trials) cfg.trials = *o.trials;
  if (cfg.scheme.empty()) throw UsageError("a scheme is required (--spec or scheme = in --config)");
  return cfg;
}

void emit(const ExperimentConfig& cfg, const std::string& text) {
  if (cfg.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(cfg.out, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + cfg.out);
  f << text;
}

std::string join(const std::vector<int>& v, const char* sep) {
  std::ostringstream os;
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? sep : "") << v[i];
  return os.str();
}

int cmd_curves(const Options& o) {
  std::vector<std::string> specs = o.curves;
  if (specs.empty())
    specs = {"rational:q=5",          "rational:q=7",          "rational:q=11", "rational:q=16",
             "elliptic:q=5,a=1,b=1", "elliptic:q=7,a=1,b=3", "hermitian:u=2", "hermitian:u=3",
             "hermitian:u=4"};
  std::ostringstream os;
  const bool csv = o.format == "csv";
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  if (csv) os << "curve,q,g,places,semigroup,conductor,gaps\n";
  for (const auto& s : specs) {
    const CurvePtr c = Curve::parse(s);
    const SemigroupView W(*c);
    const auto places = rational_places(*c).size();
    if (o.format == "json") {
      arr.push_back({{"curve", c->spec()}, {"q", c->field().q()}, {"g", c->genus()}, {"places", places},
                     {"semigroup", W.describe()}, {"conductor", W.conductor()}, {"gaps", W.gaps()}});
    } else if (csv) {
      os << '"' << c->spec() << "\"," << c->field().q() << ',' << c->genus() << ',' << places << ",\""
         << W.describe() << "\"," << W.conductor() << ",\"" << join(W.gaps(), " ") << "\"\n";
    } else {
      os << c->spec() << "  q=" << c->field().q() << " g=" << c->genus() << " places=" << places
         << " W=" << W.describe() << "\n";
    }
  }
  if (o.format == "json") os << arr.dump(2) << '\n';
  std::cout << os.str();
  return 0;
}

std::string summary(const SchemeInstance& inst) {
  std::ostringstream os;
  const CostLedger c = cost_report(inst);
  os << inst.spec.to_string() << '\n'
     << "R=" << inst.R << " K=" << inst.K << " N=" << inst.N << '\n'
     << "G=" << inst.G.to_string() << '\n';
  if (!inst.D.is_zero()) os << "D=" << inst.D.to_string() << '\n';
  if (inst.Q) os << "Q=" << Divisor::single(*inst.Q).to_string() << '\n';
  if (inst.spec.kind == SchemeKind::AgC2) os << "orientation=" << (inst.swapped ? "n in W(P)" : "m in W(P)") << '\n';
  if (inst.spec.kind == SchemeKind::AgC4 || inst.spec.kind == SchemeKind::AgEntangled)
    os << "case=" << (inst.m_case ? "m" : "n") << '\n';
  os << "conditions: " << verify_conditions(inst).to_string() << '\n'
     << "cost: upload=" << c.upload << " download=" << c.download << " worker_multiplications=" << c.worker_multiplications
     << " decode_operations=" << c.decode_operations << '\n';
  return os.str();
}

int cmd_build(const Options& o) {
  ExperimentConfig cfg = resolve(o);
  const SchemeSpec spec = SchemeSpec::parse(cfg.scheme);
  const SchemeInstance inst = build(spec);
  if (o.emit_config) {
    cfg.scheme = inst.spec.to_string();
    emit(cfg, cfg.to_text());
  } else {
    emit(cfg, summary(inst));
  }
  return 0;
}

int cmd_run(const Options& o) {
  const ExperimentConfig cfg = resolve(o);
  const SchemeInstance inst = build(SchemeSpec::parse(cfg.scheme));
  const auto [A, B] = load_matrices(cfg, inst);
  const RunRecord rec = run_round(inst, A, B, StragglerModel::parse(cfg.model), cfg.seed);
  if (cfg.format == "csv") {
    std::ostringstream os;
    os << "scheme,model,seed,survivors,used,status,decoded_equals_oracle,upload,download,worker_multiplications,"
          "decode_operations,makespan\n";
    os << '"' << rec.scheme << "\",\"" << rec.model << "\"," << rec.seed << ",\"" << join(rec.survivors, " ") << "\",\""
       << join(rec.used, " ") << "\"," << rec.status << ',' << (rec.decoded_equals_oracle ? "true" : "false") << ','
       << rec.cost.upload << ',' << rec.cost.download << ',' << rec.cost.worker_multiplications << ','
       << rec.cost.decode_operations << ',' << nlohmann::json(rec.makespan).dump() << '\n';
    emit(cfg, os.str());
  } else {
    emit(cfg, to_json(rec).dump(2) + "\n");
  }
  return 0;
}

int cmd_sweep(const Options& o) {
  const ExperimentConfig cfg = resolve(o);
  const SchemeInstance inst = build(SchemeSpec::parse(cfg.scheme));
  const auto [A, B] = load_matrices(cfg, inst);
  const auto rows = threshold_sweep(inst, A, B, cfg.trials, cfg.seed);
  if (cfg.format == "json") {
    nlohmann::ordered_json j = nlohmann::ordered_json::array();
    for (const auto& r : rows)
      j.push_back({{"k", r.k}, {"subsets_tested", r.subsets_tested}, {"successes", r.successes}, {"fraction", r.fraction}});
    emit(cfg, j.dump(2) + "\n");
  } else {
    emit(cfg, sweep_csv(rows));
  }
  return 0;
}

int cmd_compare(const Options& o) {
  std::vector<CurvePtr> curves;
  const std::vector<std::string> names =
      o.curves.empty() ? std::vector<std::string>{"hermitian:u=2", "hermitian:u=3", "hermitian:u=4", "elliptic:q=5,a=1,b=1",
                                                  "rational:q=7"}
                       : o.curves;
  for (const auto& n : names) curves.push_back(Curve::parse(n));
  std::vector<std::pair<int, int>> mn;
  for (const auto& s : o.mn) {
    const auto x = s.find('x');
    if (x == std::string::npos) throw UsageError("--mn expects entries like 2x3");
    try {
      mn.emplace_back(std::stoi(s.substr(0, x)), std::stoi(s.substr(x + 1)));
    } catch (const std::exception&) {
      throw UsageError("--mn expects entries like 2x3");
    }
  }
  const auto rows = compare_prior(curves, o.ps, mn);
  ExperimentConfig cfg;
  cfg.out = o.out;
  if (o.format == "json") {
    nlohmann::ordered_json j = nlohmann::ordered_json::array();
    for (const auto& r : rows)
      j.push_back({{"curve", r.curve}, {"scheme", r.scheme}, {"ours", r.ours}, {"prior", r.prior}, {"source", r.source}});
    emit(cfg, j.dump(2) + "\n");
  } else {
    emit(cfg, compare_csv(rows));
  }
  return 0;
}

int cmd_selftest() {
  int failed = 0;
  for (const auto& r : run_acceptance()) {
    std::cout << format_line(r) << '\n';
    if (!r.passed) ++failed;
  }
  return failed ? kExitRuntime : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coded distributed matrix multiplication over algebraic curves"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--spec", o.spec, "Scheme spec, e.g. kind=ag-c3;curve=hermitian:u=2;t=4;r=4;s=4;m=1;n=1;p=2;N=6;seed=7");
    sub->add_option("--config", o.config, "Experiment config file (key = value)");
    sub->add_option("--seed", o.seed, "Run seed");
    sub->add_option("--out", o.out, "Output file (default stdout)");
    sub->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  };

  auto* curves = app.add_subcommand("curves", "List supported curves");
  curves->add_option("--curve", o.curves, "Curve spec (repeatable)");
  curves->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "json"}));

  auto* build_cmd = app.add_subcommand("build", "Build a scheme and print its summary");
  add_common(build_cmd);
  build_cmd->add_flag("--emit-config", o.emit_config, "Print a config that rebuilds this instance");

  auto* run = app.add_subcommand("run", "Simulate one master/worker round");
  add_common(run);
  run->add_option("--model", o.model, "Straggler model: adversarial:i,j | random:k,seed=s | race:shift=a,rate=b,seed=s");

  auto* sweep = app.add_subcommand("sweep", "Decoding success rate by subset size");
  add_common(sweep);
  sweep->add_option("--trials", o.trials, "Sampled subsets per size when enumeration is too large");

  auto* compare = app.add_subcommand("compare", "Compare thresholds with one-point schemes");
  compare->add_option("--curve", o.curves, "Curve spec (repeatable)");
  compare->add_option("--p", o.ps, "MatDot split values");
  compare->add_option("--mn", o.mn, "Polynomial splits as MxN");
  compare->add_option("--out", o.out, "Output file (default stdout)");
  compare->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "json"}));

  auto* selftest = app.add_subcommand("selftest", "Run the acceptance suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (*curves) return cmd_curves(o);
    if (*build_cmd) return cmd_build(o);
    if (*run) return cmd_run(o);
    if (*sweep) return cmd_sweep(o);
    if (*compare) return cmd_compare(o);
    if (*selftest) return cmd_selftest();
  } catch (const UsageError& e) {
    std::cerr << "usage: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ParseError& e) {
    std::cerr << "usage: " << e.what() << '\n';
    return kExitUsage;
  } catch (const BuildError& e) {
    std::cerr << "build: " << e.what() << '\n';
    return kExitBuild;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}

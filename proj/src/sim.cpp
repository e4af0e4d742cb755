#include "agdmm/sim.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <future>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "agdmm/error.hpp"

namespace agdmm {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t model_seed, std::uint64_t index) {
  return splitmix64(seed ^ splitmix64(model_seed ^ splitmix64(index)));
}

double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

void shuffle(std::vector<int>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng() % i]);
}

std::string fmt_double(double d) {
  std::ostringstream os;
  os.precision(17);
  os << d;
  return os.str();
}

double parse_double(std::string_view v) {
  double out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size()) throw ParseError("straggler model: bad number '" + std::string(v) + "'");
  return out;
}

std::uint64_t parse_u64(std::string_view v) {
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size()) throw ParseError("straggler model: bad integer '" + std::string(v) + "'");
  return out;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  if (s.empty()) return out;
  std::size_t pos = 0;
  for (;;) {
    const std::size_t e = s.find(sep, pos);
    out.push_back(s.substr(pos, e == std::string_view::npos ? std::string_view::npos : e - pos));
    if (e == std::string_view::npos) break;
    pos = e + 1;
  }
  return out;
}

}  // namespace

StragglerModel StragglerModel::adversarial(std::vector<int> erased) {
  StragglerModel m;
  m.kind = Kind::Adversarial;
  std::sort(erased.begin(), erased.end());
  erased.erase(std::unique(erased.begin(), erased.end()), erased.end());
  m.erased = std::move(erased);
  return m;
}

StragglerModel StragglerModel::random(int survivors, std::uint64_t seed) {
  StragglerModel m;
  m.kind = Kind::Random;
  m.survivors = survivors;
  m.seed = seed;
  return m;
}

StragglerModel StragglerModel::delay_race(double shift, double rate, std::uint64_t seed, double deadline) {
  if (!(rate > 0)) throw std::invalid_argument("delay rate must be positive");
  StragglerModel m;
  m.kind = Kind::DelayRace;
  m.shift = shift;
  m.rate = rate;
  m.seed = seed;
  m.deadline = deadline;
  return m;
}

StragglerModel StragglerModel::parse(std::string_view text) {
  const auto colon = text.find(':');
  const std::string_view head = text.substr(0, colon);
  const std::string_view body = colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);
  if (head == "adversarial") {
    std::vector<int> erased;
    for (auto item : split(body, ',')) erased.push_back(static_cast<int>(parse_u64(item)));
    return adversarial(std::move(erased));
  }
  if (head == "random") {
    auto items = split(body, ',');
    if (items.empty()) throw ParseError("straggler model: random needs a survivor count");
    std::uint64_t seed = 0;
    for (std::size_t i = 1; i < items.size(); ++i) {
      if (!items[i].starts_with("seed=")) throw ParseError("straggler model: unknown field '" + std::string(items[i]) + "'");
      seed = parse_u64(items[i].substr(5));
    }
    return random(static_cast<int>(parse_u64(items[0])), seed);
  }
  if (head == "race") {
    double shift = 1.0, rate = 1.0, deadline = 0.0;
    std::uint64_t seed = 0;
    for (auto item : split(body, ',')) {
      const auto eq = item.find('=');
      if (eq == std::string_view::npos) throw ParseError("straggler model: expected key=value in '" + std::string(item) + "'");
      const auto k = item.substr(0, eq), v = item.substr(eq + 1);
      if (k == "shift") shift = parse_double(v);
      else if (k == "rate") rate = parse_double(v);
      else if (k == "deadline") deadline = parse_double(v);
      else if (k == "seed") seed = parse_u64(v);
      else throw ParseError("straggler model: unknown field '" + std::string(k) + "'");
    }
    if (!(rate > 0)) throw ParseError("straggler model: rate must be positive");
    return delay_race(shift, rate, seed, deadline);
  }
  throw ParseError("unknown straggler model '" + std::string(head) + "'");
}

std::string StragglerModel::to_string() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::Adversarial:
      os << "adversarial:";
      for (std::size_t i = 0; i < erased.size(); ++i) os << (i ? "," : "") << erased[i];
      break;
    case Kind::Random: os << "random:" << survivors << ",seed=" << seed; break;
    case Kind::DelayRace:
      os << "race:shift=" << fmt_double(shift) << ",rate=" << fmt_double(rate) << ",seed=" << seed;
      if (deadline > 0) os << ",deadline=" << fmt_double(deadline);
      break;
  }
  return os.str();
}

std::vector<WorkerTiming> draw_survivors(const StragglerModel& model, int N, std::uint64_t seed) {
  std::vector<WorkerTiming> out;
  switch (model.kind) {
    case StragglerModel::Kind::Adversarial:
      for (int w = 0; w < N; ++w)
        if (!std::binary_search(model.erased.begin(), model.erased.end(), w)) out.push_back({w, 1.0});
      break;
    case StragglerModel::Kind::Random: {
      std::vector<int> idx(static_cast<std::size_t>(N));
      std::iota(idx.begin(), idx.end(), 0);
      std::mt19937_64 rng(stream_seed(seed, model.seed, std::numeric_limits<std::uint64_t>::max()));
      shuffle(idx, rng);
      idx.resize(static_cast<std::size_t>(std::clamp(model.survivors, 0, N)));
      std::sort(idx.begin(), idx.end());
      for (int w : idx) out.push_back({w, 1.0});
      break;
    }
    case StragglerModel::Kind::DelayRace:
      for (int w = 0; w < N; ++w) {
        std::mt19937_64 rng(stream_seed(seed, model.seed, static_cast<std::uint64_t>(w)));
        const double t = model.shift - std::log1p(-unit_uniform(rng)) / model.rate;
        if (model.deadline <= 0 || t <= model.deadline) out.push_back({w, t});
      }
      break;
  }
  std::stable_sort(out.begin(), out.end(), [](const WorkerTiming& a, const WorkerTiming& b) {
    return a.time < b.time || (a.time == b.time && a.worker < b.worker);
  });
  return out;
}

nlohmann::ordered_json to_json(const RunRecord& r) {
  nlohmann::ordered_json j;
  j["scheme"] = r.scheme;
  j["model"] = r.model;
  j["seed"] = r.seed;
  j["survivors"] = r.survivors;
  j["used"] = r.used;
  j["status"] = r.status;
  j["decoded_equals_oracle"] = r.decoded_equals_oracle;
  j["cost"] = {{"upload", r.cost.upload},
               {"download", r.cost.download},
               {"worker_multiplications", r.cost.worker_multiplications},
               {"decode_operations", r.cost.decode_operations}};
  j["makespan"] = r.makespan;
  return j;
}

RunRecord run_round(const SchemeInstance& inst, const Matrix& A, const Matrix& B, const StragglerModel& model,
                    std::uint64_t seed) {
  const auto timing = draw_survivors(model, inst.N, seed);
  if (static_cast<int>(timing.size()) < inst.R)
    throw InsufficientSurvivors(std::to_string(timing.size()) + " workers survived, R = " + std::to_string(inst.R));

  RunRecord rec;
  rec.scheme = inst.spec.to_string();
  rec.model = model.to_string();
  rec.seed = seed;
  for (const auto& t : timing) rec.survivors.push_back(t.worker);
  std::sort(rec.survivors.begin(), rec.survivors.end());
  for (int i = 0; i < inst.R; ++i) rec.used.push_back(timing[static_cast<std::size_t>(i)].worker);
  std::sort(rec.used.begin(), rec.used.end());
  rec.makespan = timing[static_cast<std::size_t>(inst.R - 1)].time;
  rec.cost = cost_report(inst);

  const auto payloads = encode(inst, A, B);
  std::vector<std::future<Matrix>> jobs;
  for (int w : rec.used)
    jobs.push_back(std::async(std::launch::async, [&payloads, w] { return worker_compute(payloads[static_cast<std::size_t>(w)]); }));
  std::map<int, Matrix> results;
  for (std::size_t i = 0; i < jobs.size(); ++i) results.emplace(rec.used[i], jobs[i].get());

  const Matrix C = decode(inst, results);
  rec.decoded_equals_oracle = C == matmul(A, B);
  rec.status = rec.decoded_equals_oracle ? "decoded" : "mismatch";
  return rec;
}

std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 r = 1;
  for (int i = 1; i <= k; ++i) {
    r = r * static_cast<unsigned>(n - k + i) / static_cast<unsigned>(i);
    if (r > std::numeric_limits<std::uint64_t>::max()) return std::numeric_limits<std::uint64_t>::max();
  }
  return static_cast<std::uint64_t>(r);
}

std::vector<std::vector<int>> choose_subsets(int N, int k, std::uint64_t cap, std::uint64_t rng_seed) {
  std::vector<std::vector<int>> out;
  if (k < 0 || k > N) return out;
  if (binomial(N, k) <= cap) {
    std::vector<int> c(static_cast<std::size_t>(k));
    std::iota(c.begin(), c.end(), 0);
    for (;;) {
      out.push_back(c);
      int i = k - 1;
      while (i >= 0 && c[i] == N - k + i) --i;
      if (i < 0) break;
      ++c[i];
      for (int j = i + 1; j < k; ++j) c[j] = c[j - 1] + 1;
    }
    return out;
  }
  std::mt19937_64 rng(rng_seed);
  std::vector<int> idx(static_cast<std::size_t>(N));
  for (std::uint64_t t = 0; t < cap; ++t) {
    std::iota(idx.begin(), idx.end(), 0);
    shuffle(idx, rng);
    std::vector<int> s(idx.begin(), idx.begin() + k);
    std::sort(s.begin(), s.end());
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<SweepRow> threshold_sweep(const SchemeInstance& inst, const Matrix& A, const Matrix& B, int trials,
                                      std::uint64_t seed) {
  const Matrix oracle = matmul(A, B);
  std::map<int, Matrix> all;
  for (const auto& pl : encode(inst, A, B)) all.emplace(pl.worker, worker_compute(pl));
  std::vector<SweepRow> rows;
  for (int k = std::max(1, inst.K - 1); k <= inst.N; ++k) {
    SweepRow row;
    row.k = k;
    const std::uint64_t limit = binomial(inst.N, k) <= kExhaustiveSubsetCap ? kExhaustiveSubsetCap
                                                                          : static_cast<std::uint64_t>(std::max(trials, 0));
    for (const auto& sub : choose_subsets(inst.N, k, limit, stream_seed(seed, 0, static_cast<std::uint64_t>(k)))) {
      std::map<int, Matrix> chosen;
      for (int w : sub) chosen.emplace(w, all.at(w));
      const auto C = try_decode(inst, chosen);
      ++row.subsets_tested;
      if (C && *C == oracle) ++row.successes;
    }
    row.fraction = row.subsets_tested ? static_cast<double>(row.successes) / static_cast<double>(row.subsets_tested) : 0.0;
    rows.push_back(row);
  }
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream os;
  os << "k,subsets_tested,successes,fraction\n";
  for (const auto& r : rows) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", r.fraction);
    os << r.k << ',' << r.subsets_tested << ',' << r.successes << ',' << buf << '\n';
  }
  return os.str();
}

std::vector<CompareRow> compare_prior(const std::vector<CurvePtr>& curves, const std::vector<int>& p_values,
                                      const std::vector<std::pair<int, int>>& mn_values) {
  std::vector<CompareRow> rows;
  for (const auto& curve : curves) {
    const SemigroupView W(*curve);
    const int g = W.genus(), c = W.conductor();
    const std::string name = curve->spec();
    for (int p : p_values) {
      const std::string scheme = "matdot p=" + std::to_string(p);
      const int ours = 2 * p - 1 + 2 * g;
      rows.push_back({name, scheme, ours, 2 * c + 2 * p - 1, "one-point matdot"});
      switch (curve->kind()) {
        case CurveKind::Hermitian: rows.push_back({name, scheme, ours, 2 * p - 1 + 3 * g, "one-point optimal (approx.)"}); break;
        case CurveKind::Elliptic: rows.push_back({name, scheme, ours, 2 * p - 1 + 2 * g + 2, "one-point optimal"}); break;
        case CurveKind::Rational: rows.push_back({name, scheme, ours, 2 * p - 1, "one-point optimal"}); break;
      }
    }
    for (const auto& [m, n] : mn_values) {
      const std::string tag = "m=" + std::to_string(m) + " n=" + std::to_string(n);
      if (W.member(m)) {
        const std::string scheme = "polynomial " + tag + " (ag-c2)";
        rows.push_back({name, scheme, g + m * n, 2 * c + m * n, "one-point A"});
        rows.push_back({name, scheme, g + m * n, c + m * n, "one-point B"});
        rows.push_back({name, scheme, g + m * n, c + m * n, "one-point C"});
      } else {
        const int mp = W.m_prime(m);
        const int mn_last = W.m_sequence(m, n).back();
        rows.push_back({name, "polynomial " + tag + " (ag-c1)", 2 * g + m * n, 2 * c + m * n, "one-point A"});
        rows.push_back({name, "polynomial " + tag + " (ag-c5)", g + mp * n, c + mp * n, "one-point B"});
        rows.push_back({name, "polynomial " + tag + " (ag-c6)", g + mn_last + m, c + mn_last + m, "one-point C"});
      }
    }
  }
  return rows;
}

std::string compare_csv(const std::vector<CompareRow>& rows) {
  std::ostringstream os;
  os << "curve,scheme,ours,prior,source\n";
  for (const auto& r : rows) os << '"' << r.curve << "\"," << r.scheme << ',' << r.ours << ',' << r.prior << ',' << r.source << '\n';
  return os.str();
}

}  // namespace agdmm

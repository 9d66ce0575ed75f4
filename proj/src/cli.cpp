#include "quadest/cli.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "quadest/error.hpp"
#include "quadest/metrics.hpp"

namespace quadest::cli {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

double parse_double(std::string_view text) {
  const std::string t = trim(text);
  const char* begin = t.data();
  const char* end = t.data() + t.size();
  if (!t.empty() && *begin == '+') ++begin;
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end || t.empty()) throw ValidationError("not a number: '" + t + "'");
  if (!std::isfinite(v)) throw ValidationError("not a finite number: '" + t + "'");
  return v;
}

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = text.find(sep, start);
    out.emplace_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

// Fixed-point text with six decimals; stable across platforms.
std::string fixed6(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, 6);
  if (ec != std::errc()) return format_double(v);
  return std::string(buf, ptr);
}

std::string join(const Eigen::VectorXd& v, char sep) {
  std::string s;
  for (int i = 0; i < v.size(); ++i) {
    if (i) s += sep;
    s += format_double(v[i]);
  }
  return s;
}

double thread_cpu_ms() {
  timespec ts{};
  clock_gettime(CLOCK_THREAD_CPUTIME_ID, &ts);
  return 1e3 * static_cast<double>(ts.tv_sec) + 1e-6 * static_cast<double>(ts.tv_nsec);
}

nlohmann::ordered_json to_json(const Eigen::VectorXd& v) {
  auto j = nlohmann::ordered_json::array();
  for (int i = 0; i < v.size(); ++i) j.push_back(v[i]);
  return j;
}

// Options shared by the single-function subcommands.
struct ProblemArgs {
  std::string expr;
  std::string name;
  std::string bounds;
  std::string x0;
  std::string constraints;
  std::vector<std::string> params;
  double epsilon = 1e-3;
  std::uint64_t seed = 0;
  long max_iters = 100000;
  long time_limit_ms = -1;
  bool no_scale = false;
};

void add_problem_options(CLI::App& cmd, ProblemArgs& a) {
  auto* expr = cmd.add_option("--expr", a.expr, "Function text over x0, x1, ...");
  auto* name = cmd.add_option("--name", a.name, "Benchmark entry name");
  expr->excludes(name);
  cmd.add_option("--bounds", a.bounds, "Box as lo,hi;lo,hi;... (required with --expr)");
  cmd.add_option("--x0", a.x0, "Construction point v,v,... (default: entry point or box center)");
  cmd.add_option("--constraints", a.constraints, "File of linear constraints a.x + b <= 0");
  cmd.add_option("--param", a.params, "Parameter binding name=value for --expr");
  cmd.add_option("--epsilon", a.epsilon, "Convergence tolerance on the scaled function");
  cmd.add_option("--seed", a.seed, "Random seed");
  cmd.add_option("--max-iters", a.max_iters, "Iteration limit");
  cmd.add_option("--time-limit-ms", a.time_limit_ms, "Wall-clock limit in milliseconds");
  cmd.add_flag("--no-scale", a.no_scale, "Work on the unscaled function");
}

ProblemInstance make_instance(const ProblemArgs& a) {
  if (a.expr.empty() == a.name.empty()) throw ValidationError("exactly one of --expr and --name is required");
  BoxDomain box;
  Expression f;
  std::optional<Eigen::VectorXd> x0;
  if (!a.name.empty()) {
    BenchmarkEntry e = find_entry(a.name);
    box = a.bounds.empty() ? e.box : parse_bounds(a.bounds);
    if (box.dim() != e.dimension) throw ValidationError("--bounds does not match the entry dimension");
    f = std::move(e.f);
    x0 = std::move(e.x0);
  } else {
    if (a.bounds.empty()) throw ValidationError("--bounds is required with --expr");
    box = parse_bounds(a.bounds);
    ParameterMap params;
    for (const std::string& p : a.params) {
      const auto eq = p.find('=');
      if (eq == std::string::npos) throw ValidationError("--param expects name=value, got '" + p + "'");
      params[trim(std::string_view(p).substr(0, eq))] = parse_double(std::string_view(p).substr(eq + 1));
    }
    f = Expression::parse(a.expr, box.dim(), params);
  }
  ProblemInstance inst{std::move(f), box, Eigen::VectorXd(), {}, 1.0};
  if (!a.x0.empty()) {
    inst.x0 = parse_vector(a.x0);
  } else {
    inst.x0 = x0 ? *x0 : box.center();
  }
  if (!a.constraints.empty()) {
    std::ifstream in(a.constraints);
    if (!in) throw ValidationError("cannot open constraint file " + a.constraints);
    inst.linear_constraints = parse_constraints(in, box.dim());
  }
  if (a.epsilon <= 0.0) throw ValidationError("--epsilon must be positive");
  if (a.max_iters < 0) throw ValidationError("--max-iters must be non-negative");
  validate(inst);
  if (!a.no_scale) inst.scaling = scale(inst.f, inst.box).factor;
  return inst;
}

Config make_config(const ProblemArgs& a) {
  Config cfg;
  cfg.epsilon = a.epsilon;
  cfg.seed = a.seed;
  cfg.max_iterations = a.max_iters;
  if (a.time_limit_ms >= 0) cfg.time_limit = std::chrono::milliseconds(a.time_limit_ms);
  return cfg;
}

// Writes to the named file, or to `fallback` when the name is empty.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw ValidationError("cannot write " + path);
      stream_ = &file_;
    }
  }
  std::ostream& get() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

int exit_code(const RunResult& r) { return r.status == RunStatus::kConverged ? 0 : 2; }

int cmd_underestimate(const ProblemArgs& a, const std::string& trace_path, const std::string& out_path,
                      std::ostream& out) {
  ProblemInstance inst = make_instance(a);
  Config cfg = make_config(a);
  std::ofstream trace;
  if (!trace_path.empty()) {
    trace.open(trace_path);
    if (!trace) throw ValidationError("cannot write " + trace_path);
    cfg.trace = [&trace](const TraceEvent& e) { trace << to_json_line(e) << '\n'; };
  }
  RunResult r = run(inst, cfg);
  Sink sink(out_path, out);
  sink.get() << result_json(inst, r) << '\n';
  return exit_code(r);
}

int cmd_plotdata(const ProblemArgs& a, int points, const std::string& out_path, std::ostream& out) {
  ProblemInstance inst = make_instance(a);
  const int n = inst.box.dim();
  if (n > 2) throw ValidationError("plot data is limited to one or two variables");
  if (points < 2) throw ValidationError("--points must be at least 2");
  RunResult r = run(inst, make_config(a));
  QuadraticUnderestimator q = final_underestimator(inst, r);
  const double shift = r.offset / inst.scaling;
  const bool constrained = !inst.linear_constraints.empty();

  Sink sink(out_path, out);
  std::ostream& os = sink.get();
  auto axis = [&](int i, int k) {
    if (k == points - 1) return inst.box.upper(i);
    return inst.box.lower(i) + (inst.box.upper(i) - inst.box.lower(i)) * k / (points - 1);
  };
  auto row = [&](const Eigen::VectorXd& x) {
    const double fx = inst.f.eval(x);
    const double lx = q.linear(x);
    const double qx = q.eval(x) + shift;
    os << join(x, ',') << ',' << format_double(fx) << ',' << format_double(lx) << ',' << format_double(qx);
    if (constrained) {
      const bool feasible = std::all_of(inst.linear_constraints.begin(), inst.linear_constraints.end(),
                                        [&](const Halfspace& h) { return h.eval(x) <= 0.0; });
      os << ',' << (fx - qx >= 0.0 ? 1 : -1) << ',' << (feasible ? 1 : 0);
    }
    os << '\n';
  };
  os << (n == 1 ? "x" : "x0,x1") << ",f,l,q" << (constrained ? ",sign,feasible" : "") << '\n';
  Eigen::VectorXd x(n);
  if (n == 1) {
    for (int k = 0; k < points; ++k) {
      x[0] = axis(0, k);
      row(x);
    }
  } else {
    for (int k = 0; k < points; ++k) {
      for (int m = 0; m < points; ++m) {
        x[0] = axis(0, k);
        x[1] = axis(1, m);
        row(x);
      }
    }
  }
  return exit_code(r);
}

void write_summary(std::ostream& os, const std::vector<BenchRow>& rows, bool timing) {
  os << "dimension,n_functions,n_underestimators,avg_metric,min_metric,max_metric";
  if (timing) os << ",avg_cpu_ms,min_cpu_ms,max_cpu_ms";
  os << ",avg_vertices,min_vertices,max_vertices\n";
  for (const BenchRow& r : rows) {
    os << r.dimension << ',' << r.n_functions << ',' << r.n_underestimators << ',' << fixed6(r.avg_metric) << ','
       << fixed6(r.min_metric) << ',' << fixed6(r.max_metric);
    if (timing) os << ',' << fixed6(r.avg_cpu_ms) << ',' << fixed6(r.min_cpu_ms) << ',' << fixed6(r.max_cpu_ms);
    os << ',' << fixed6(r.avg_vertices) << ',' << fixed6(r.min_vertices) << ',' << fixed6(r.max_vertices) << '\n';
  }
}

void write_detail(std::ostream& os, const std::vector<BenchRecord>& records, bool timing) {
  os << "name,dimension,point,x0,status,alpha,iterations,vertices,metric" << (timing ? ",cpu_ms" : "") << '\n';
  for (const BenchRecord& r : records) {
    os << r.name << ',' << r.dimension << ',' << r.point << ',' << join(r.x0, ';') << ',' << r.status << ','
       << format_double(r.alpha) << ',' << r.iterations << ',' << r.vertices << ',' << format_double(r.metric);
    if (timing) os << ',' << fixed6(r.cpu_ms);
    os << '\n';
  }
}

}  // namespace

BoxDomain parse_bounds(const std::string& text) {
  std::vector<std::string> pairs = split(text, ';');
  Eigen::VectorXd lo(pairs.size()), hi(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    std::vector<std::string> ends = split(pairs[i], ',');
    if (ends.size() != 2) throw ValidationError("bounds entry '" + pairs[i] + "' is not lo,hi");
    lo[i] = parse_double(ends[0]);
    hi[i] = parse_double(ends[1]);
  }
  return BoxDomain(lo, hi);
}

Eigen::VectorXd parse_vector(const std::string& text) {
  std::vector<std::string> parts = split(text, ',');
  Eigen::VectorXd v(parts.size());
  for (std::size_t i = 0; i < parts.size(); ++i) v[i] = parse_double(parts[i]);
  return v;
}

std::vector<Halfspace> parse_constraints(std::istream& in, int n) {
  std::vector<Halfspace> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::vector<double> values;
    std::string token;
    while (ls >> token) {
      try {
        values.push_back(parse_double(token));
      } catch (const ValidationError& e) {
        throw ValidationError("constraint line " + std::to_string(line_no) + ": " + e.what());
      }
    }
    if (values.empty()) continue;
    if (static_cast<int>(values.size()) != n + 1) {
      throw ValidationError("constraint line " + std::to_string(line_no) + ": expected " + std::to_string(n + 1) +
                            " numbers");
    }
    Halfspace h{Eigen::Map<const Eigen::VectorXd>(values.data(), n), values.back()};
    validate(h);
    out.push_back(std::move(h));
  }
  return out;
}

std::string result_json(const ProblemInstance& inst, const RunResult& r) {
  QuadraticUnderestimator q = final_underestimator(inst, r);
  nlohmann::ordered_json j;
  j["status"] = to_string(r.status);
  j["alpha"] = r.alpha;
  j["lower_bound"] = std::isfinite(r.lower_bound) ? nlohmann::ordered_json(r.lower_bound) : nlohmann::ordered_json(nullptr);
  j["iterations"] = r.iterations;
  j["total_vertices"] = r.total_vertices;
  j["scaling"] = r.scaling;
  j["offset"] = r.offset;
  j["wall_time_ms"] = r.wall_time_ms;
  auto points = nlohmann::ordered_json::array();
  for (const auto& p : r.decrement_points) points.push_back(to_json(p));
  j["decrement_points"] = std::move(points);
  nlohmann::ordered_json u;
  u["x0"] = to_json(q.x0());
  u["f0"] = q.f0();
  u["g0"] = to_json(q.g0());
  auto h = nlohmann::ordered_json::array();
  for (int i = 0; i < q.dim(); ++i) h.push_back(to_json(q.h0().row(i).transpose()));
  u["h0"] = std::move(h);
  u["alpha"] = q.alpha();
  u["offset"] = r.offset / r.scaling;
  u["lower_bound"] = j["lower_bound"];
  j["underestimator"] = std::move(u);
  return j.dump();
}

std::vector<BenchRecord> run_bench(const std::vector<BenchmarkEntry>& corpus, const BenchOptions& opt) {
  if (opt.points_per_function < 1) throw ValidationError("at least one construction point per function");
  std::vector<BenchRecord> records;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const BenchmarkEntry& e = corpus[i];
    const auto points = latin_hypercube(opt.points_per_function, e.box, derive_seed(opt.seed, i));
    for (int k = 0; k < opt.points_per_function; ++k) {
      BenchRecord r;
      r.name = e.name;
      r.dimension = e.dimension;
      r.point = k;
      r.x0 = points[k];
      records.push_back(std::move(r));
    }
  }

  auto work = [&](BenchRecord& rec, std::size_t entry_index) {
    const BenchmarkEntry& e = corpus[entry_index];
    try {
      ProblemInstance inst{e.f, e.box, rec.x0, {}, 1.0};
      inst.scaling = scale(e.f, e.box).factor;
      Config cfg;
      cfg.epsilon = opt.epsilon;
      cfg.max_iterations = opt.max_iterations;
      if (opt.time_limit_ms) cfg.time_limit = std::chrono::milliseconds(*opt.time_limit_ms);
      cfg.seed = opt.seed;
      const double t0 = thread_cpu_ms();
      RunResult res = run(inst, cfg);
      rec.cpu_ms = thread_cpu_ms() - t0;
      rec.status = to_string(res.status);
      rec.alpha = res.alpha;
      rec.iterations = res.iterations;
      rec.vertices = res.total_vertices;
      const auto seed = derive_seed(derive_seed(opt.seed, entry_index), 1000 + rec.point);
      rec.metric = tightness(e.f, final_underestimator(inst, res), e.box, seed).metric;
    } catch (const std::exception& ex) {
      rec.status = "Error";
      rec.error = ex.what();
    }
  };

  const std::size_t per = static_cast<std::size_t>(opt.points_per_function);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < records.size(); k = next++) work(records[k], k / per);
  };
  const int jobs = std::max(1, opt.jobs);
  std::vector<std::thread> pool;
  for (int t = 1; t < jobs; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return records;
}

std::vector<BenchRow> summarize(const std::vector<BenchRecord>& records) {
  std::vector<BenchRow> rows;
  for (int d = 1; d <= kMaxVars; ++d) {
    BenchRow row;
    row.dimension = d;
    std::vector<std::string> names;
    double inf = std::numeric_limits<double>::infinity();
    row.min_metric = row.min_cpu_ms = row.min_vertices = inf;
    row.max_metric = row.max_cpu_ms = row.max_vertices = -inf;
    for (const BenchRecord& r : records) {
      if (r.dimension != d || r.status == "Error") continue;
      if (std::find(names.begin(), names.end(), r.name) == names.end()) names.push_back(r.name);
      ++row.n_underestimators;
      const double v = static_cast<double>(r.vertices);
      row.avg_metric += r.metric;
      row.avg_cpu_ms += r.cpu_ms;
      row.avg_vertices += v;
      row.min_metric = std::min(row.min_metric, r.metric);
      row.max_metric = std::max(row.max_metric, r.metric);
      row.min_cpu_ms = std::min(row.min_cpu_ms, r.cpu_ms);
      row.max_cpu_ms = std::max(row.max_cpu_ms, r.cpu_ms);
      row.min_vertices = std::min(row.min_vertices, v);
      row.max_vertices = std::max(row.max_vertices, v);
    }
    if (row.n_underestimators == 0) continue;
    row.n_functions = static_cast<int>(names.size());
    row.avg_metric /= row.n_underestimators;
    row.avg_cpu_ms /= row.n_underestimators;
    row.avg_vertices /= row.n_underestimators;
    rows.push_back(row);
  }
  return rows;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Tight convex quadratic underestimators"};
  app.name("quadest");
  app.require_subcommand(1);

  ProblemArgs ua;
  std::string trace_path, out_path;
  auto* under = app.add_subcommand("underestimate", "Compute the scaling alpha for one function");
  add_problem_options(*under, ua);
  under->add_option("--trace", trace_path, "Write a line-JSON iteration trace");
  under->add_option("--out", out_path, "Write the result JSON here instead of stdout");

  ProblemArgs pa;
  int plot_points = 200;
  std::string plot_out;
  auto* plot = app.add_subcommand("plotdata", "Export f, its tangent plane and q on a mesh");
  add_problem_options(*plot, pa);
  plot->add_option("--points", plot_points, "Mesh points per axis");
  plot->add_option("--out", plot_out, "CSV file (default stdout)");

  BenchOptions bo;
  long bench_time_limit = -1;
  std::string bench_out, detail_out;
  bool no_timing = false;
  auto* bench = app.add_subcommand("bench", "Run the benchmark corpus and summarize by dimension");
  bench->add_option("--seed", bo.seed, "Seed for construction points and metric samples");
  bench->add_option("--epsilon", bo.epsilon, "Convergence tolerance");
  bench->add_option("--max-iters", bo.max_iterations, "Iteration limit per run");
  bench->add_option("--time-limit-ms", bench_time_limit, "Wall-clock limit per run");
  bench->add_option("--points", bo.points_per_function, "Construction points per function");
  bench->add_option("--jobs", bo.jobs, "Worker threads");
  bench->add_option("--out", bench_out, "Summary CSV (default stdout)");
  bench->add_option("--detail", detail_out, "Per-underestimator CSV");
  bench->add_flag("--no-timing", no_timing, "Omit CPU-time columns (for reproducible output)");

  std::vector<std::string> storage;
  storage.reserve(args.size() + 1);
  storage.push_back("quadest");
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& s : storage) argv.push_back(s.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 1;
  }

  try {
    if (*under) return cmd_underestimate(ua, trace_path, out_path, out);
    if (*plot) return cmd_plotdata(pa, plot_points, plot_out, out);
    if (bench_time_limit >= 0) bo.time_limit_ms = bench_time_limit;
    auto records = run_bench(load_corpus(), bo);
    {
      Sink sink(bench_out, out);
      write_summary(sink.get(), summarize(records), !no_timing);
    }
    if (!detail_out.empty()) {
      Sink sink(detail_out, out);
      write_detail(sink.get(), records, !no_timing);
    }
    int code = 0;
    for (const auto& r : records) {
      if (r.status == "Error") {
        err << "error: " << r.name << " point " << r.point << ": " << r.error << '\n';
        code = 1;
      } else if (r.status != "Converged" && code == 0) {
        code = 2;
      }
    }
    return code;
  } catch (const SolverError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace quadest::cli

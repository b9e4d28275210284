#include "commands.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include <spdlog/spdlog.h>

#include "gdpkit/error.hpp"
#include "gdpkit/gdp_solve.hpp"
#include "gdpkit/lp_format.hpp"
#include "gdpkit/milp.hpp"
#include "model_file.hpp"

namespace gdpkit::tools {

namespace {

/// Ten significant digits; hides last-bit noise in reports.
std::string num(double value) {
  if (value == 0.0) return "0";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buffer[64];
  auto result = std::to_chars(buffer, buffer + sizeof(buffer), value,
                              std::chars_format::general, 10);
  return std::string(buffer, result.ptr);
}

double parse_double(const std::string& text) {
  double value = 0.0;
  auto result = std::from_chars(text.data(), text.data() + text.size(), value);
  if (result.ec != std::errc() || result.ptr != text.data() + text.size()) {
    throw Error(Errc::kInvalidArgument, "malformed number '" + text + "'");
  }
  return value;
}

double parse_m_value(const std::string& text) {
  const double value = parse_double(text);
  if (!(value >= 0.0 && std::isfinite(value))) {
    throw Error(Errc::kInvalidArgument, "Big-M value '" + text + "' must be finite and >= 0");
  }
  return value;
}

void check_epsilon(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw Error(Errc::kInvalidArgument, "--epsilon must lie in (0, 1)");
  }
}

Method parse_method(const std::string& text) {
  if (text == "bigm") return Method::kBigM;
  if (text == "hull") return Method::kHull;
  throw Error(Errc::kInvalidArgument, "--method must be bigm or hull");
}

/// Loads and validates; prints diagnostics and returns nullopt on failure.
std::optional<GdpModel> load(const std::filesystem::path& path, std::ostream& err) {
  GdpModel model;
  try {
    model = read_model_file(path);
  } catch (const Error& e) {
    err << "error: " << path.string() << ": " << e.what() << '\n';
    return std::nullopt;
  }
  const auto diagnostics = validate(model);
  for (const auto& d : diagnostics) err << "error: " << d.message << '\n';
  if (!diagnostics.empty()) return std::nullopt;
  spdlog::info("loaded {}: {} variables, {} disjunctions", path.string(),
               model.variables().size(), model.disjunctions().size());
  return model;
}

int exit_for(SolveStatus status) {
  switch (status) {
    case SolveStatus::kInfeasible: return kExitInfeasible;
    case SolveStatus::kUnbounded: return kExitUnbounded;
    default: return kExitOk;
  }
}

/// Runs `body`, mapping library errors to exit code 2.
template <class F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  }
}

const RowOrigin kOrigins[] = {
    RowOrigin::kGlobal,     RowOrigin::kDisjunct,   RowOrigin::kLogic,
    RowOrigin::kSelection,  RowOrigin::kLinkage,    RowOrigin::kHullBound,
    RowOrigin::kHullAggregation, RowOrigin::kCut};

void print_counts(const GdpModel& model, const Reformulation& ref, std::ostream& out) {
  const std::size_t original = model.variables().size();
  const std::size_t indicators = model.indicators().size();
  const std::size_t copies = ref.hull.disaggregated.size();
  out << "variables: " << ref.milp.variables.size() << '\n'
      << "  original: " << original << '\n'
      << "  indicator: " << indicators << '\n'
      << "  disaggregated: " << copies << '\n';
  const auto counts = ref.milp.row_counts();
  std::size_t total = 0;
  for (const auto& [origin, n] : counts) total += n;
  out << "rows: " << total << '\n';
  for (RowOrigin origin : kOrigins) {
    auto it = counts.find(origin);
    out << "  " << to_string(origin) << ": " << (it == counts.end() ? 0 : it->second)
        << '\n';
  }
}

}  // namespace

MSpec parse_m_spec(const std::string& text) {
  MSpec spec;
  if (text == "auto") return spec;
  std::stringstream stream(text);
  std::string entry;
  bool any = false;
  while (std::getline(stream, entry, ',')) {
    any = true;
    const auto eq = entry.find('=');
    if (eq == std::string::npos) {
      spec.global = parse_m_value(entry);
      continue;
    }
    const std::string key = entry.substr(0, eq);
    const double value = parse_m_value(entry.substr(eq + 1));
    const auto colon = key.find(':');
    const std::string scope = key.substr(0, colon);
    const std::string name = colon == std::string::npos ? "" : key.substr(colon + 1);
    if (name.empty()) throw Error(Errc::kInvalidArgument, "malformed --m entry '" + entry + "'");
    if (scope == "disjunction") {
      spec.per_disjunction[name] = value;
    } else if (scope == "disjunct") {
      spec.per_disjunct[name] = value;
    } else if (scope == "constraint") {
      spec.per_constraint[name] = value;
    } else {
      throw Error(Errc::kInvalidArgument, "unknown --m scope '" + scope + "'");
    }
  }
  if (!any) throw Error(Errc::kInvalidArgument, "empty --m");
  return spec;
}

int cmd_check(const std::filesystem::path& path, std::ostream& out,
              std::ostream& err) {
  auto model = load(path, err);
  if (!model) return kExitInvalid;
  out << "ok: " << model->variables().size() << " variables, "
      << model->constraints().size() << " constraints, "
      << model->disjunctions().size() << " disjunctions, "
      << model->indicators().size() << " indicators\n";
  return kExitOk;
}

int cmd_reformulate(const std::filesystem::path& path, const ReformulateArgs& args,
                    std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    check_epsilon(args.epsilon);
    ReformulateOptions options;
    options.method = parse_method(args.method);
    options.big_m = parse_m_spec(args.m);
    options.epsilon = args.epsilon;
    auto model = load(path, err);
    if (!model) return int{kExitInvalid};
    const Reformulation ref = reformulate(*model, options);
    const std::string lp = format_lp(ref.milp);
    if (args.out) {
      write_lp_file(ref.milp, *args.out);
      out << "method: " << to_string(options.method) << '\n';
      print_counts(*model, ref, out);
      out << "written: " << args.out->string() << '\n';
    } else {
      out << lp;
      err << "method: " << to_string(options.method) << '\n';
      print_counts(*model, ref, err);
    }
    return int{kExitOk};
  });
}

int cmd_solve(const std::filesystem::path& path, const SolveArgs& args,
              std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    check_epsilon(args.epsilon);
    const Method method = parse_method(args.method);
    const MSpec spec = parse_m_spec(args.m);
    if (args.workers < 1) throw Error(Errc::kInvalidArgument, "--workers must be >= 1");
    auto model = load(path, err);
    if (!model) return int{kExitInvalid};

    const auto start = std::chrono::steady_clock::now();
    MipSolution sol;
    std::vector<Cut> cuts;
    if (args.algo == "mip") {
      ReformulateOptions options;
      options.method = method;
      options.big_m = spec;
      options.epsilon = args.epsilon;
      const Reformulation ref = reformulate(*model, options);
      MipOptions mopts;
      mopts.workers = args.workers;
      sol = solve_mip(ref.milp, mopts);
    } else if (args.algo == "dbb") {
      DbbOptions dopts;
      dopts.method = method;
      dopts.big_m = spec;
      dopts.epsilon = args.epsilon;
      dopts.workers = args.workers;
      sol = solve_disjunctive_bb(*model, dopts);
    } else if (args.algo == "cuts") {
      HybridOptions hopts;
      hopts.max_cuts = args.max_cuts;
      hopts.big_m = spec;
      hopts.epsilon = args.epsilon;
      hopts.workers = args.workers;
      if (args.finish == "dbb") {
        hopts.then = FinishWith::kDisjunctive;
      } else if (args.finish != "mip") {
        throw Error(Errc::kInvalidArgument, "--finish must be mip or dbb");
      }
      HybridResult hybrid = solve_hybrid_cuts(*model, hopts);
      sol = std::move(hybrid.solution);
      cuts = std::move(hybrid.cuts);
    } else {
      throw Error(Errc::kInvalidArgument, "--algo must be mip, dbb or cuts");
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    for (const auto& record : sol.log) spdlog::debug("{}", format_record(record));
    if (args.log) {
      std::ofstream log(*args.log);
      if (!log) throw Error(Errc::kIo, "cannot open '" + args.log->string() + "'");
      for (std::size_t k = 0; k < cuts.size(); ++k) {
        log << "cut=" << k + 1 << " distance=" << num(cuts[k].distance)
            << " rhs=" << num(cuts[k].rhs) << '\n';
      }
      for (const auto& record : sol.log) log << format_record(record) << '\n';
    }

    out << "status: " << to_string(sol.status) << '\n';
    if (sol.status == SolveStatus::kOptimal ||
        (sol.status == SolveStatus::kLimit && !sol.point.empty())) {
      out << "objective: " << num(sol.objective) << '\n'
          << "best_bound: " << num(sol.best_bound) << '\n';
      out << "variables:\n";
      for (std::size_t j = 0; j < model->variables().size(); ++j) {
        out << "  " << model->variables()[j].name << " = " << num(sol.point[j]) << '\n';
      }
      out << "selected:";
      std::map<IndicatorId, bool> chosen;
      const std::size_t base = model->variables().size();
      for (const auto& decl : model->indicators()) {
        const bool on = sol.point[base + decl.id.value] > 0.5;
        chosen[decl.id] = on;
        if (on) out << ' ' << decl.name;
      }
      out << '\n';
      if (!logic_consistent(*model, chosen)) {
        err << "warning: reported selection violates the logic constraints\n";
      }
    }
    out << "nodes: " << sol.nodes << '\n'
        << "lp_iterations: " << sol.lp_iterations << '\n'
        << "cuts: " << cuts.size() << '\n';
    if (args.timing) out << "seconds: " << num(seconds) << '\n';
    return exit_for(sol.status);
  });
}

int cmd_compare(const std::filesystem::path& path, const CompareArgs& args,
                std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    check_epsilon(args.epsilon);
    const MSpec spec = parse_m_spec(args.m);
    auto model = load(path, err);
    if (!model) return int{kExitInvalid};
    const Reformulation bigm = reformulate_bigm(*model, spec);
    const Reformulation hull = reformulate_hull(*model, args.epsilon);
    const LpSolution b = solve_lp(bigm.milp);
    const LpSolution h = solve_lp(hull.milp);

    auto size = [](const Reformulation& r) {
      std::size_t rows = r.milp.rows.size() + r.milp.nonlinear_rows.size();
      return std::to_string(rows) + " rows, " + std::to_string(r.milp.variables.size()) +
             " columns";
    };
    auto line = [&](const char* name, const LpSolution& lp, const Reformulation& r) {
      out << name << " relaxation: ";
      if (lp.status == SolveStatus::kOptimal) {
        out << num(lp.objective);
      } else {
        out << to_string(lp.status);
      }
      out << " (" << size(r) << ")\n";
    };
    line("bigm", b, bigm);
    line("hull", h, hull);

    if (b.status != SolveStatus::kOptimal || h.status != SolveStatus::kOptimal) {
      const SolveStatus worst = b.status == SolveStatus::kOptimal ? h.status : b.status;
      return exit_for(worst) == kExitOk ? int{kExitFailure} : exit_for(worst);
    }
    const bool maximize = model->objective().sense == Sense::kMaximize;
    // Hull is at least as tight; allow solver round-off.
    const double slack = 1e-7 * (1.0 + std::abs(b.objective));
    const double gap = maximize ? b.objective - h.objective : h.objective - b.objective;
    out << "gap: " << num(std::abs(gap) <= slack ? 0.0 : gap) << '\n';
    const bool ordered = gap >= -slack;
    out << "ordering: " << (ordered ? "ok" : "violated") << '\n';
    return ordered ? int{kExitOk} : int{kExitFailure};
  });
}

}  // namespace gdpkit::tools

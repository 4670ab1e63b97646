#include "heun/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "heun/error.hpp"
#include "heun/quantum.hpp"
#include "heun/reduction.hpp"

namespace heun::cli {

namespace {

using json = nlohmann::ordered_json;

constexpr double kResidualGate = 1e-9;
constexpr double kRecurrenceGate = 1e-8;

struct Common {
  std::string output;
  std::string format = "json";
  double tol = 1e-13;
  std::uint64_t seed = 0;
  bool verbose = false;
};

struct FamilyArgs {
  std::string a, alpha, beta, gamma;
  int order = 0;
  int starts = 0;
  bool no_pencil = false;
};

json to_json(cplx z) { return json::array({z.real(), z.imag()}); }

json to_json(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

std::string fmt(double x) {
  if (!std::isfinite(x)) return std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), res.ptr);
}

class Table {
 public:
  explicit Table(std::vector<std::string> header) : header_(std::move(header)) {}
  void add(std::vector<std::string> row) { rows_.push_back(std::move(row)); }
  std::string str() const {
    std::string s;
    auto line = [&s](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) s += ',';
        s += cells[i];
      }
      s += '\n';
    };
    line(header_);
    for (const auto& r : rows_) line(r);
    return s;
  }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

void emit(const Common& c, const std::string& text, std::ostream& out) {
  if (c.output.empty()) {
    out << text;
    return;
  }
  std::ofstream file(c.output, std::ios::binary);
  if (!file) throw Error(ErrorKind::InvalidArgument, "cannot open output file " + c.output);
  file << text;
}

std::string render(const Common& c, const json& doc, const Table& table) {
  return c.format == "csv" ? table.str() : doc.dump(2) + "\n";
}

void add_common(CLI::App& sub, Common& c) {
  sub.add_option("--output", c.output, "Write results to this file instead of stdout");
  sub.add_option("--format", c.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
  sub.add_option("--tol", c.tol, "Newton tolerance on the scaled system")->check(CLI::PositiveNumber);
  sub.add_option("--seed", c.seed, "Seed for the multistart generator");
  sub.add_flag("--verbose", c.verbose, "Report warnings and progress on stderr");
}

void add_family(CLI::App& sub, FamilyArgs& f) {
  sub.add_option("--a", f.a, "Third singular point")->required();
  sub.add_option("--alpha", f.alpha, "alpha")->required();
  sub.add_option("--beta", f.beta, "beta")->required();
  sub.add_option("--gamma", f.gamma, "gamma")->required();
  sub.add_option("--N", f.order, "Order N; delta is chosen so that epsilon = -N")
      ->required()
      ->check(CLI::NonNegativeNumber);
  sub.add_option("--starts", f.starts, "Random Newton starts (0 = automatic)")->check(CLI::NonNegativeNumber);
  sub.add_flag("--no-pencil", f.no_pencil, "Use random Newton starts only");
}

HeunFamily family_of(const FamilyArgs& f) {
  const cplx a = parse_complex(f.a), al = parse_complex(f.alpha), be = parse_complex(f.beta),
             ga = parse_complex(f.gamma);
  return family_with_epsilon(a, al, be, ga, -static_cast<double>(f.order));
}

SolveOptions solve_options(const Common& c, const FamilyArgs& f) {
  SolveOptions o;
  o.seed = c.seed;
  o.starts = f.starts;
  o.newton_tol = c.tol;
  o.pencil = !f.no_pencil;
  return o;
}

json family_json(const HeunFamily& fam, int order) {
  json p;
  p["a"] = to_json(fam.a);
  p["alpha"] = to_json(fam.alpha);
  p["beta"] = to_json(fam.beta);
  p["gamma"] = to_json(fam.gamma);
  p["delta"] = to_json(fam.delta);
  p["epsilon"] = to_json(fam.epsilon());
  p["N"] = order;
  return p;
}

void report_warnings(const Common& c, const std::vector<std::string>& warnings, std::ostream& err) {
  if (!c.verbose) return;
  for (const auto& w : warnings) err << "warning: " << w << '\n';
}

bool verified(const ReductionSolution& s) {
  return !s.degenerate && s.system_residual < kResidualGate && s.recurrence_residual < kRecurrenceGate;
}

int cmd_reduce(const Common& c, const FamilyArgs& f, std::ostream& out, std::ostream& err) {
  const HeunFamily fam = family_of(f);
  const ReductionReport rep = solve_reduction(fam, f.order, solve_options(c, f));

  json doc;
  doc["command"] = "reduce";
  doc["parameters"] = family_json(fam, f.order);
  doc["expected"] = rep.expected;
  doc["found"] = rep.solutions.size();
  doc["spurious"] = rep.spurious;
  doc["warnings"] = rep.warnings;
  json sols = json::array();

  std::vector<std::string> header{"index", "q_re", "q_im"};
  for (int k = 1; k <= f.order; ++k) {
    header.push_back("e" + std::to_string(k) + "_re");
    header.push_back("e" + std::to_string(k) + "_im");
  }
  for (const char* h : {"system_residual", "recurrence_residual", "degenerate"}) header.emplace_back(h);
  Table table(header);

  bool all_ok = rep.complete();
  for (std::size_t i = 0; i < rep.solutions.size(); ++i) {
    const ReductionSolution& s = rep.solutions[i];
    json rec;
    rec["q"] = to_json(s.q);
    json es = json::array();
    for (const cplx e : s.e) es.push_back(to_json(e));
    rec["e"] = es;
    rec["system_residual"] = to_json(s.system_residual);
    rec["recurrence_residual"] = to_json(s.recurrence_residual);
    rec["degenerate"] = s.degenerate;
    sols.push_back(rec);

    std::vector<std::string> row{std::to_string(i), fmt(s.q.real()), fmt(s.q.imag())};
    for (const cplx e : s.e) {
      row.push_back(fmt(e.real()));
      row.push_back(fmt(e.imag()));
    }
    row.push_back(fmt(s.system_residual));
    row.push_back(fmt(s.recurrence_residual));
    row.push_back(s.degenerate ? "true" : "false");
    table.add(row);
    all_ok = all_ok && verified(s);
  }
  doc["solutions"] = sols;
  doc["verified"] = all_ok;
  emit(c, render(c, doc, table), out);
  report_warnings(c, rep.warnings, err);
  return all_ok ? kSuccess : kShortfall;
}

int cmd_qpoly(const Common& c, const FamilyArgs& f, std::ostream& out, std::ostream& err) {
  const HeunFamily fam = family_of(f);
  const ReductionReport rep = solve_reduction(fam, f.order, solve_options(c, f));

  json doc;
  doc["command"] = "qpoly";
  doc["parameters"] = family_json(fam, f.order);
  doc["expected"] = rep.expected;
  doc["found"] = rep.solutions.size();
  doc["warnings"] = rep.warnings;
  Table table({"power", "re", "im", "closed_form_re", "closed_form_im"});

  if (!rep.complete()) {
    doc["coefficients"] = nullptr;
    emit(c, render(c, doc, table), out);
    err << "error: found " << rep.solutions.size() << " of " << rep.expected
        << " accessory parameters; the q-polynomial cannot be formed\n";
    report_warnings(c, rep.warnings, err);
    return kShortfall;
  }

  const ComplexPoly poly = q_polynomial(rep);
  std::optional<ComplexPoly> closed;
  if (f.order == 1) closed = closed_form_n1(fam).monic();
  if (f.order == 2) closed = closed_form_n2(fam).monic();
  if (f.order == 0) closed = ComplexPoly::linear(-fam.a * fam.alpha * fam.beta, 1.0);

  json coeffs = json::array();
  for (std::size_t k = 0; k < poly.coefficients().size(); ++k) {
    coeffs.push_back(to_json(poly[k]));
    const cplx ck = closed ? (*closed)[k] : cplx(NAN, NAN);
    table.add({std::to_string(k), fmt(poly[k].real()), fmt(poly[k].imag()), closed ? fmt(ck.real()) : "",
               closed ? fmt(ck.imag()) : ""});
  }
  doc["coefficients"] = coeffs;
  bool ok = true;
  if (closed) {
    json cc = json::array();
    double dev = 0.0;
    const double scale = std::max(1.0, closed->max_abs_coefficient());
    for (std::size_t k = 0; k < closed->coefficients().size(); ++k) {
      cc.push_back(to_json((*closed)[k]));
      const cplx mine = k < poly.coefficients().size() ? poly[k] : cplx(0.0);
      dev = std::max(dev, std::abs(mine - (*closed)[k]) / scale);
    }
    doc["closed_form"] = cc;
    doc["max_deviation"] = dev;
    ok = dev < kResidualGate && closed->degree() == poly.degree();
  }
  emit(c, render(c, doc, table), out);
  report_warnings(c, rep.warnings, err);
  return ok ? kSuccess : kShortfall;
}

int cmd_eval(const Common& c, const FamilyArgs& f, int index, const std::vector<std::string>& zs, bool second,
             std::ostream& out, std::ostream& err) {
  const HeunFamily fam = family_of(f);
  const SolveOptions opts = solve_options(c, f);
  const AdmissibleSet set = second ? build_solution_at_1(fam, opts) : solutions_at_0(fam, opts);
  report_warnings(c, set.report.warnings, err);
  if (index < 0 || index >= static_cast<int>(set.items.size())) {
    err << "error: solution index " << index << " out of range; " << set.items.size()
        << " usable solution(s) found\n";
    return set.report.complete() ? kUsage : kShortfall;
  }
  const Admissible& item = set.items[static_cast<std::size_t>(index)];

  json doc;
  doc["command"] = "eval";
  doc["parameters"] = family_json(fam, f.order);
  doc["solution"] = {{"index", index},
                     {"q", to_json(item.params.q)},
                     {"expansion", second ? "z=1" : "z=0"},
                     {"radius", item.solution.radius()}};
  Table table({"z_re", "z_im", "u_re", "u_im", "du_re", "du_im", "residual", "in_disk"});
  json rows = json::array();
  bool ok = true;
  for (const std::string& text : zs) {
    const cplx z = parse_complex(text);
    json row;
    row["z"] = to_json(z);
    const bool in_disk = item.solution.in_disk(z);
    row["in_disk"] = in_disk;
    std::optional<Derivatives> d;
    std::optional<double> resid;
    if (in_disk) {
      d = item.solution.evaluate(z);
      if (distance_to_singularity(item.params, z) > 0.0) resid = scaled_residual(item.params, z, *d);
    }
    row["u"] = d ? to_json(d->u) : json(nullptr);
    row["du"] = d ? to_json(d->du) : json(nullptr);
    row["residual"] = resid ? to_json(*resid) : json(nullptr);
    rows.push_back(row);
    if (resid && !(*resid < kResidualGate)) ok = false;
    table.add({fmt(z.real()), fmt(z.imag()), d ? fmt(d->u.real()) : "", d ? fmt(d->u.imag()) : "",
               d ? fmt(d->du.real()) : "", d ? fmt(d->du.imag()) : "", resid ? fmt(*resid) : "",
               in_disk ? "true" : "false"});
  }
  doc["rows"] = rows;
  emit(c, render(c, doc, table), out);
  return ok ? kSuccess : kShortfall;
}

struct SpectrumArgs {
  quantum::PotentialParams pp;
  std::optional<double> e_min, e_max;
  int grid = 400;
  bool compare = false;
};

int cmd_spectrum(const Common& c, const SpectrumArgs& s, std::ostream& out, std::ostream& err) {
  quantum::validate(s.pp);
  const double lo = s.e_min.value_or(quantum::default_energy_floor(s.pp));
  const double hi = s.e_max.value_or(s.pp.threshold());
  const quantum::SpectrumResult res = quantum::spectrum(s.pp, lo, hi, s.grid);

  json doc;
  doc["command"] = "spectrum";
  doc["potential"] = {{"V0", s.pp.V0}, {"V1", s.pp.V1}, {"sigma", s.pp.sigma}, {"mass_scale", s.pp.mass_scale}};
  doc["window"] = {lo, hi};
  doc["grid"] = s.grid;
  doc["energies"] = res.energies;
  doc["bound_state_count"] = res.bound_state_count;
  doc["count_method_agreement"] = res.count_method_agreement;
  doc["warnings"] = res.warnings;

  std::vector<double> shots;
  if (s.compare) shots = quantum::shooting_roots(s.pp, lo, hi, s.grid);
  Table table(s.compare ? std::vector<std::string>{"index", "energy", "shooting_energy", "relative_difference"}
                        : std::vector<std::string>{"index", "energy"});
  json cmp = json::array();
  const std::size_t rows = std::max(res.energies.size(), shots.size());
  for (std::size_t i = 0; i < rows; ++i) {
    const double e = i < res.energies.size() ? res.energies[i] : NAN;
    if (!s.compare) {
      table.add({std::to_string(i), fmt(e)});
      continue;
    }
    const double sh = i < shots.size() ? shots[i] : NAN;
    const double rel = std::abs(e - sh) / std::abs(sh);
    cmp.push_back({{"energy", to_json(e)}, {"shooting_energy", to_json(sh)}, {"relative_difference", to_json(rel)}});
    table.add({std::to_string(i), fmt(e), fmt(sh), fmt(rel)});
  }
  if (s.compare) doc["shooting"] = cmp;
  emit(c, render(c, doc, table), out);
  report_warnings(c, res.warnings, err);
  return res.count_method_agreement ? kSuccess : kShortfall;
}

int exit_for(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::InvalidArgument:
    case ErrorKind::CoincidentSingularities:
    case ErrorKind::EpsilonMismatch:
    case ErrorKind::UnitA:
    case ErrorKind::ExceptionalEpsilon:
      return kUsage;
    default:
      return kShortfall;
  }
}

}  // namespace

cplx parse_complex(std::string_view text) {
  auto bad = [&] { return Error(ErrorKind::InvalidArgument, "cannot parse '" + std::string(text) + "' as a number"); };
  std::string s(text);
  s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char ch) { return std::isspace(ch); }), s.end());
  if (s.empty()) throw bad();
  auto number = [&](std::string_view part) {
    double v = 0.0;
    if (part.empty() || part == "+") return 1.0;
    if (part == "-") return -1.0;
    const char* first = part.data() + (part.front() == '+' ? 1 : 0);
    const auto res = std::from_chars(first, part.data() + part.size(), v);
    if (res.ec != std::errc() || res.ptr != part.data() + part.size()) throw bad();
    return v;
  };
  if (s.back() != 'i') return {number(s), 0.0};
  const std::string_view body(s.data(), s.size() - 1);
  // The split is the last sign that does not belong to an exponent.
  std::size_t split = std::string_view::npos;
  for (std::size_t i = body.size(); i-- > 1;) {
    if ((body[i] == '+' || body[i] == '-') && body[i - 1] != 'e' && body[i - 1] != 'E') {
      split = i;
      break;
    }
  }
  if (split == std::string_view::npos) return {0.0, number(body)};
  return {number(body.substr(0, split)), number(body.substr(split))};
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Generalized hypergeometric solutions of the general Heun equation", "heun-ghf"};
  app.require_subcommand(1);

  Common common;
  FamilyArgs fam;
  int index = 0;
  std::vector<std::string> zs;
  bool second = false;
  SpectrumArgs spec;
  double e_min = 0.0, e_max = 0.0;

  CLI::App* reduce = app.add_subcommand("reduce", "Admissible (q, e_1..e_N) for epsilon = -N");
  add_common(*reduce, common);
  add_family(*reduce, fam);

  CLI::App* qpoly = app.add_subcommand("qpoly", "Monic degree-(N+1) polynomial satisfied by q");
  add_common(*qpoly, common);
  add_family(*qpoly, fam);

  CLI::App* eval = app.add_subcommand("eval", "Evaluate an assembled solution and its ODE residual");
  add_common(*eval, common);
  add_family(*eval, fam);
  eval->add_option("--index", index, "Solution index in ascending q order");
  eval->add_option("--z", zs, "Evaluation points, e.g. 0.3 or 0.2+0.1i")->required()->expected(1, -1);
  eval->add_flag("--second-solution", second, "Use the expansion around z = 1 (argument 1 - z)");

  CLI::App* spectrum = app.add_subcommand("spectrum", "Bound states of the inverse-square-root exponential well");
  add_common(*spectrum, common);
  spectrum->add_option("--V0", spec.pp.V0, "Constant offset V0");
  spectrum->add_option("--V1", spec.pp.V1, "Well strength V1");
  spectrum->add_option("--sigma", spec.pp.sigma, "Length scale sigma")->check(CLI::PositiveNumber);
  spectrum->add_option("--mass-scale", spec.pp.mass_scale, "2 m sigma^2 / hbar^2")->check(CLI::PositiveNumber);
  CLI::Option* emin_opt = spectrum->add_option("--emin", e_min, "Lower end of the energy window");
  CLI::Option* emax_opt = spectrum->add_option("--emax", e_max, "Upper end of the energy window");
  spectrum->add_option("--grid", spec.grid, "Grid points, uniform in kappa")->check(CLI::Range(2, 1000000));
  spectrum->add_flag("--compare-shooting", spec.compare, "Add the shooting-method roots for comparison");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsage;
  }

  try {
    if (*reduce) return cmd_reduce(common, fam, out, err);
    if (*qpoly) return cmd_qpoly(common, fam, out, err);
    if (*eval) return cmd_eval(common, fam, index, zs, second, out, err);
    if (*emin_opt) spec.e_min = e_min;
    if (*emax_opt) spec.e_max = e_max;
    return cmd_spectrum(common, spec, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_for(e);
  }
}

}  // namespace heun::cli

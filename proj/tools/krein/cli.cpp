#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <random>
#include <sstream>

#include "krein/errors.hpp"

namespace krein::cli {
namespace {

using Json = nlohmann::ordered_json;
namespace fs = std::filesystem;

[[noreturn]] void bad(const std::string& message) { fail(ErrorKind::InvalidArgument, message); }

void check_keys(const Json& j, const std::string& where, std::initializer_list<std::string_view> allowed) {
  if (!j.is_object()) bad(where + " must be a JSON object");
  for (const auto& item : j.items()) {
    bool known = false;
    for (std::string_view a : allowed) known = known || item.key() == a;
    if (!known) bad("unknown key '" + item.key() + "' in " + where);
  }
}

Complex complex_of(const Json& j, const std::string& where) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  bad(where + " must be a number or [re, im]");
}

std::vector<Complex> complex_list(const Json& j, const std::string& where) {
  if (!j.is_array()) bad(where + " must be an array");
  std::vector<Complex> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(complex_of(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

std::pair<double, double> interval_of(const Json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) bad(where + " must be [lo, hi]");
  const double lo = j[0].get<double>(), hi = j[1].get<double>();
  if (!std::isfinite(lo) || !std::isfinite(hi) || lo > hi) bad(where + " must be a finite [lo, hi] with lo <= hi");
  return {lo, hi};
}

BoundarySpec boundary_from(const Json& j) {
  check_keys(j, "boundary_operator", {"kind", "value", "diagonal", "matrix", "scale", "entries"});
  BoundarySpec b;
  if (j.contains("kind")) {
    if (!j["kind"].is_string()) bad("boundary_operator.kind must be a string");
    b.kind = j["kind"].get<std::string>();
  }
  static const std::vector<std::string> kinds{"zero", "neumann", "scalar", "diagonal", "matrix", "random", "modes"};
  if (std::find(kinds.begin(), kinds.end(), b.kind) == kinds.end()) bad("unknown boundary_operator.kind '" + b.kind + "'");
  if (j.contains("value")) b.value = complex_of(j["value"], "boundary_operator.value");
  if (j.contains("diagonal")) b.diagonal = complex_list(j["diagonal"], "boundary_operator.diagonal");
  if (j.contains("matrix")) {
    if (!j["matrix"].is_array()) bad("boundary_operator.matrix must be an array of rows");
    for (std::size_t r = 0; r < j["matrix"].size(); ++r)
      b.matrix.push_back(complex_list(j["matrix"][r], "boundary_operator.matrix[" + std::to_string(r) + "]"));
  }
  if (j.contains("scale")) {
    if (!j["scale"].is_number()) bad("boundary_operator.scale must be a number");
    b.scale = j["scale"].get<double>();
    if (!(b.scale > 0.0) || !std::isfinite(b.scale)) bad("boundary_operator.scale must be positive");
  }
  if (j.contains("entries")) {
    if (!j["entries"].is_array()) bad("boundary_operator.entries must be an array");
    for (const Json& e : j["entries"]) {
      check_keys(e, "boundary_operator.entries[]", {"k", "j", "value"});
      if (!e.contains("k") || !e.contains("j") || !e["k"].is_number_integer() || !e["j"].is_number_integer())
        bad("boundary_operator.entries[] needs integer k and j");
      b.entries.push_back(ModeEntry{e["k"].get<int>(), e["j"].get<int>(),
                                    e.contains("value") ? complex_of(e["value"], "entries[].value") : Complex(1.0)});
    }
  }
  const bool needs_value = b.kind == "scalar";
  if (needs_value && !j.contains("value")) bad("boundary_operator kind 'scalar' needs 'value'");
  if (b.kind == "diagonal" && b.diagonal.empty()) bad("boundary_operator kind 'diagonal' needs 'diagonal'");
  if (b.kind == "matrix" && b.matrix.empty()) bad("boundary_operator kind 'matrix' needs 'matrix'");
  return b;
}

RhsSpec rhs_from(const Json& j) {
  check_keys(j, "rhs", {"kind", "values"});
  RhsSpec r;
  if (j.contains("kind")) {
    if (!j["kind"].is_string()) bad("rhs.kind must be a string");
    r.kind = j["kind"].get<std::string>();
  }
  if (r.kind != "ones" && r.kind != "random" && r.kind != "values") bad("unknown rhs.kind '" + r.kind + "'");
  if (j.contains("values")) r.values = complex_list(j["values"], "rhs.values");
  if (r.kind == "values" && r.values.empty()) bad("rhs kind 'values' needs 'values'");
  return r;
}

}  // namespace

CliConfig parse_cli_config(std::string_view text) {
  Json root;
  try {
    root = Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    bad(std::string("config: ") + e.what());
  }
  check_keys(root, "config", {"model", "potential", "boundary_operator", "lambda", "region", "rhs", "output", "suite"});
  CliConfig c;

  Json model = root.contains("model") ? root["model"] : Json::object();
  if (!model.is_object()) bad("model must be a JSON object");
  if (root.contains("potential")) {
    if (model.contains("potential")) bad("potential given both in model and at top level");
    model["potential"] = root["potential"];
  }
  c.model = parse_model_spec(model.dump());

  if (root.contains("boundary_operator")) c.boundary = boundary_from(root["boundary_operator"]);
  if (root.contains("lambda")) c.lambdas = complex_list(root["lambda"], "lambda");
  for (Complex z : c.lambdas)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) bad("lambda entries must be finite");

  if (root.contains("region")) {
    const Json& r = root["region"];
    check_keys(r, "region", {"re", "im", "grid"});
    if (!r.contains("re") || !r.contains("im")) bad("region needs 're' and 'im'");
    const auto [re_lo, re_hi] = interval_of(r["re"], "region.re");
    const auto [im_lo, im_hi] = interval_of(r["im"], "region.im");
    c.region = Region{re_lo, re_hi, im_lo, im_hi};
    if (r.contains("grid")) {
      const Json& g = r["grid"];
      if (!g.is_array() || g.size() != 2 || !g[0].is_number_integer() || !g[1].is_number_integer() ||
          g[0].get<long long>() < 2 || g[1].get<long long>() < 1)
        bad("region.grid must be [re_points >= 2, im_points >= 1]");
      c.grid = ScanGrid{g[0].get<Index>(), g[1].get<Index>()};
    }
  }
  if (root.contains("rhs")) c.rhs = rhs_from(root["rhs"]);
  if (root.contains("output")) {
    const Json& o = root["output"];
    check_keys(o, "output", {"format"});
    if (o.contains("format")) {
      if (!o["format"].is_string()) bad("output.format must be a string");
      c.output.format = o["format"].get<std::string>();
    }
    if (c.output.format != "csv" && c.output.format != "json") bad("output.format must be 'csv' or 'json'");
  }
  if (root.contains("suite")) c.suite = parse_suite_config(root["suite"].dump());
  return c;
}

namespace {

struct Options {
  std::string config_path;
  unsigned jobs = 0;
  bool allow_uncertified = false;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
};

struct Context {
  Options opts;
  CliConfig config;
  std::ostream& out;
  std::ostream& err;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) bad("cannot read config file '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const Context& ctx, const std::string& name, const std::string& content) {
  const fs::path dir(ctx.opts.out_dir);
  fs::create_directories(dir);
  const fs::path path = dir / name;
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write '" + path.string() + "'");
  f << content;
  if (!f) throw std::runtime_error("write failed for '" + path.string() + "'");
  ctx.out << "wrote " << path.string() << "\n";
}

std::uint64_t seed_of(const Context& ctx) { return ctx.opts.seed.value_or(1); }

std::string num(double x) { return format_double(x); }

Json json_num(double x) {
  if (std::isfinite(x)) return x;
  return std::isnan(x) ? Json("nan") : Json(x > 0 ? "inf" : "-inf");
}

Json json_complex(Complex z) { return Json::array({json_num(z.real()), json_num(z.imag())}); }

std::string describe(Complex z) {
  return z.imag() == 0.0 ? num(z.real()) : num(z.real()) + (z.imag() < 0 ? "" : "+") + num(z.imag()) + "i";
}

/// Every lambda is certified for the model, unless the flag is set.
std::vector<SpectralPoint> spectral_points(const Context& ctx, const TripleModel& model) {
  std::vector<SpectralPoint> points;
  for (Complex z : ctx.config.lambdas) {
    if (!is_certified(model, z) && !ctx.opts.allow_uncertified)
      fail(ErrorKind::UncertifiedPoint, "lambda = " + describe(z) + " is not certified for " + model.name() +
                                            ": it must be real and below the threshold xi = " +
                                            num(model.certified_threshold()) + " (or pass --allow-uncertified)");
    points.push_back(ctx.opts.allow_uncertified ? SpectralPoint::unchecked(model, z) : SpectralPoint::at(model, z));
  }
  return points;
}

BoundaryOperator boundary_operator(const Context& ctx, const TripleModel& model) {
  const BoundarySpec& b = ctx.config.boundary;
  const Index dim = model.boundary_dim();
  if (b.kind == "zero" || b.kind == "neumann") return BoundaryOperator::zero(dim);
  if (b.kind == "scalar") return BoundaryOperator::scalar(dim, b.value);
  if (b.kind == "diagonal") {
    if (static_cast<Index>(b.diagonal.size()) != dim)
      bad("boundary_operator.diagonal has " + std::to_string(b.diagonal.size()) + " entries, boundary dimension is " +
          std::to_string(dim));
    return BoundaryOperator::diagonal(Eigen::Map<const CVector>(b.diagonal.data(), dim));
  }
  if (b.kind == "matrix") {
    if (static_cast<Index>(b.matrix.size()) != dim) bad("boundary_operator.matrix must be square of boundary dimension");
    CMatrix m(dim, dim);
    for (Index r = 0; r < dim; ++r) {
      if (static_cast<Index>(b.matrix[r].size()) != dim)
        bad("boundary_operator.matrix must be square of boundary dimension");
      for (Index c = 0; c < dim; ++c) m(r, c) = b.matrix[r][c];
    }
    return BoundaryOperator::from_matrix(std::move(m));
  }
  if (b.kind == "random") {
    std::mt19937_64 rng(seed_of(ctx));
    std::uniform_real_distribution<double> u(-b.scale, b.scale);
    CMatrix m(dim, dim);
    for (Index c = 0; c < dim; ++c)
      for (Index r = 0; r < dim; ++r) m(r, c) = Complex(u(rng), u(rng));
    return BoundaryOperator::from_matrix(std::move(m));
  }
  // modes
  const auto* disk = dynamic_cast<const DiskModel*>(&model);
  if (disk == nullptr) bad("boundary_operator kind 'modes' needs a disk model");
  return disk_mode_operator(ctx.config.model.k_max, b.entries);
}

CVector right_hand_side(const Context& ctx, const TripleModel& model) {
  const RhsSpec& r = ctx.config.rhs;
  const Index n = model.state_dim();
  if (r.kind == "ones") return CVector::Ones(n);
  if (r.kind == "random") {
    std::mt19937_64 rng(seed_of(ctx) ^ 0x9e3779b97f4a7c15ULL);
    return model.random_state(rng);
  }
  if (static_cast<Index>(r.values.size()) != n)
    bad("rhs.values has " + std::to_string(r.values.size()) + " entries, state dimension is " + std::to_string(n));
  return Eigen::Map<const CVector>(r.values.data(), n);
}

int cmd_weyl(Context& ctx) {
  const auto model = build_model(ctx.config.model);
  const std::vector<SpectralPoint> points = spectral_points(ctx, *model);
  const Index dim = model->boundary_dim();
  std::vector<WeylSample> samples;
  for (const SpectralPoint& p : points) samples.push_back(weyl(*model, p));

  if (ctx.config.output.format == "json") {
    Json rows = Json::array();
    for (const WeylSample& s : samples) {
      Json m = Json::array();
      for (Index r = 0; r < dim; ++r) {
        Json row = Json::array();
        for (Index c = 0; c < dim; ++c) row.push_back(json_complex(s.m(r, c)));
        m.push_back(std::move(row));
      }
      rows.push_back(Json{{"lambda", json_complex(s.lambda)}, {"m", std::move(m)}, {"norm", json_num(s.norm)}});
    }
    const Json doc{{"schema", "krein.weyl"}, {"schema_version", 1}, {"model", ctx.config.model.label()},
                   {"boundary_dim", dim}, {"rows", std::move(rows)}};
    write_file(ctx, "weyl.json", doc.dump(2) + "\n");
    return kOk;
  }
  std::string csv = "# krein.weyl schema 1; model=" + ctx.config.model.label() +
                    "; entries of M(lambda) row-major, m<i>_<j> = M[i][j]\n";
  csv += "re_lambda,im_lambda";
  for (Index r = 0; r < dim; ++r)
    for (Index c = 0; c < dim; ++c) {
      const std::string tag = std::to_string(r) + "_" + std::to_string(c);
      csv += ",re_m" + tag + ",im_m" + tag;
    }
  csv += ",norm\n";
  for (const WeylSample& s : samples) {
    csv += num(s.lambda.real()) + "," + num(s.lambda.imag());
    for (Index r = 0; r < dim; ++r)
      for (Index c = 0; c < dim; ++c) csv += "," + num(s.m(r, c).real()) + "," + num(s.m(r, c).imag());
    csv += "," + num(s.norm) + "\n";
  }
  write_file(ctx, "weyl.csv", csv);
  return kOk;
}

int cmd_resolve(Context& ctx) {
  const auto model = build_model(ctx.config.model);
  const std::vector<SpectralPoint> points = spectral_points(ctx, *model);
  const BoundaryOperator b = boundary_operator(ctx, *model);
  const CVector f = right_hand_side(ctx, *model);
  const bool neumann = ctx.config.boundary.kind == "neumann";

  struct Solution {
    Complex lambda;
    CVector u;
    RobinResidual residual;
  };
  std::vector<Solution> solutions;
  for (const SpectralPoint& p : points) {
    CVector u = neumann ? model->neumann_resolvent(p.lambda, f) : krein_resolvent(*model, b, p, f);
    const RobinResidual res = robin_residual(*model, b, p.lambda, u, f);
    solutions.push_back({p.lambda, std::move(u), res});
  }

  if (ctx.config.output.format == "json") {
    Json rows = Json::array();
    for (const Solution& s : solutions) {
      Json u = Json::array();
      for (Index i = 0; i < s.u.size(); ++i) u.push_back(json_complex(s.u(i)));
      rows.push_back(Json{{"lambda", json_complex(s.lambda)},
                          {"u", std::move(u)},
                          {"residual", Json{{"pde", json_num(s.residual.pde)}, {"boundary", json_num(s.residual.boundary)}}}});
    }
    const Json doc{{"schema", "krein.resolve"}, {"schema_version", 1}, {"model", ctx.config.model.label()},
                   {"solutions", std::move(rows)}};
    write_file(ctx, "resolve.json", doc.dump(2) + "\n");
    return kOk;
  }
  std::string csv = "# krein.resolve schema 1; model=" + ctx.config.model.label() +
                    "; u = (A_B - lambda)^-1 f by state index\n";
  csv += "re_lambda,im_lambda,index,re_u,im_u\n";
  for (const Solution& s : solutions)
    for (Index i = 0; i < s.u.size(); ++i)
      csv += num(s.lambda.real()) + "," + num(s.lambda.imag()) + "," + std::to_string(i) + "," + num(s.u(i).real()) +
             "," + num(s.u(i).imag()) + "\n";
  csv += "# residual columns: re_lambda,im_lambda,pde,boundary\n";
  for (const Solution& s : solutions)
    csv += "# residual," + num(s.lambda.real()) + "," + num(s.lambda.imag()) + "," + num(s.residual.pde) + "," +
           num(s.residual.boundary) + "\n";
  write_file(ctx, "resolve.csv", csv);
  return kOk;
}

int cmd_eigs(Context& ctx) {
  if (!ctx.config.region) bad("eigs needs a 'region' section");
  const auto model = build_model(ctx.config.model);
  const BoundaryOperator b = boundary_operator(ctx, *model);
  const RobinEigsResult r = robin_eigs(*model, b, *ctx.config.region, ctx.config.grid);

  if (ctx.config.output.format == "json") {
    Json eig = Json::array(), skipped = Json::array();
    for (Complex z : r.eigenvalues) eig.push_back(json_complex(z));
    for (Complex z : r.skipped) skipped.push_back(json_complex(z));
    const Json doc{{"schema", "krein.eigs"}, {"schema_version", 1}, {"model", ctx.config.model.label()},
                   {"eigenvalues", std::move(eig)}, {"skipped", std::move(skipped)}, {"candidates", r.candidates}};
    write_file(ctx, "eigs.json", doc.dump(2) + "\n");
    return kOk;
  }
  std::string csv = "# krein.eigs schema 1; model=" + ctx.config.model.label() +
                    "; candidates=" + std::to_string(r.candidates) + "; skipped=" + std::to_string(r.skipped.size()) +
                    "\n";
  csv += "re,im\n";
  for (Complex z : r.eigenvalues) csv += num(z.real()) + "," + num(z.imag()) + "\n";
  write_file(ctx, "eigs.csv", csv);
  return kOk;
}

int cmd_decay(Context& ctx) {
  SuiteConfig suite = SuiteConfig::defaults();
  suite.models = {ctx.config.model};
  suite.complex_scan_regions.clear();
  if (!ctx.config.lambdas.empty()) {
    suite.decay_lambdas.clear();
    for (Complex z : ctx.config.lambdas) {
      if (z.imag() != 0.0) bad("decay takes real lambda values only");
      suite.decay_lambdas.push_back(z.real());
    }
  }
  if (ctx.opts.seed) suite.seed = *ctx.opts.seed;
  suite.jobs = ctx.opts.jobs;
  suite.validate();
  const VerificationReport r = run_decay_suite(suite);
  write_file(ctx, "decay.csv", decay_csv(r));
  for (const DecayFit& f : r.decay_fits)
    ctx.out << "exponent " << num(f.exponent) << " +- " << num(f.exponent_stderr) << " (" << f.model << ")\n";
  return r.ok() ? kOk : kVerificationFailed;
}

int cmd_verify(Context& ctx) {
  SuiteConfig suite = ctx.config.suite.value_or(SuiteConfig::defaults());
  if (ctx.opts.seed) suite.seed = *ctx.opts.seed;
  if (ctx.opts.jobs != 0) suite.jobs = ctx.opts.jobs;
  suite.validate();
  const VerificationReport r = run_full_suite(suite);
  write_file(ctx, "report.json", to_json(r));
  write_file(ctx, "report.csv", to_csv(r));
  write_file(ctx, "decay.csv", decay_csv(r));
  Json timing{{"schema", "krein.timing"}, {"schema_version", 1}, {"seconds", Json::object()}};
  for (const auto& [section, seconds] : r.timings) timing["seconds"][section] = seconds;
  write_file(ctx, "timing.json", timing.dump(2) + "\n");
  ctx.out << "verify: " << r.records.size() << " checks, " << r.failed() << " failed\n";
  for (const CheckRecord& rec : r.records)
    if (!rec.pass)
      ctx.err << "FAIL " << rec.check << " " << rec.model << " " << rec.parameters << " defect=" << num(rec.defect)
              << " tol=" << num(rec.tolerance) << (rec.note.empty() ? "" : " " + rec.note) << "\n";
  return r.ok() ? kOk : kVerificationFailed;
}

int exit_code(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::BirmanSchwingerSingular:
      return kSpectralSingularity;
    case ErrorKind::InvalidArgument:
    case ErrorKind::InvalidPotential:
    case ErrorKind::UncertifiedPoint:
    case ErrorKind::TruncationWarning:
      return kConfigError;
    default:
      return kSolverFailure;
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Boundary triples, Weyl functions and Krein resolvents for Schrodinger operators", "krein"};
  app.require_subcommand(1, 1);
  Options opts;
  std::uint64_t seed = 0;
  app.add_option("--config", opts.config_path, "JSON config file")->check(CLI::ExistingFile);
  app.add_option("--jobs", opts.jobs, "Worker cap for suite runs (0 = hardware concurrency)");
  app.add_flag("--allow-uncertified", opts.allow_uncertified, "Accept lambda outside the certified half line");
  app.add_option("--out", opts.out_dir, "Output directory")->capture_default_str();
  auto* seed_opt = app.add_option("--seed", seed, "Seed for random draws");
  app.fallthrough();

  using Handler = int (*)(Context&);
  std::vector<std::pair<CLI::App*, Handler>> commands{
      {app.add_subcommand("weyl", "Weyl function M(lambda) for each lambda"), cmd_weyl},
      {app.add_subcommand("resolve", "Solve (A_B - lambda) u = f"), cmd_resolve},
      {app.add_subcommand("eigs", "Robin eigenvalues in a region"), cmd_eigs},
      {app.add_subcommand("decay", "Weyl norm decay study"), cmd_decay},
      {app.add_subcommand("verify", "Full verification suite"), cmd_verify},
  };

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "krein: " << e.what() << "\n";
    return kConfigError;
  }
  if (*seed_opt) opts.seed = seed;

  CLI::App* chosen = nullptr;
  Handler handler = nullptr;
  for (const auto& [sub, h] : commands)
    if (sub->parsed()) {
      chosen = sub;
      handler = h;
    }

  try {
    CliConfig config;
    if (!opts.config_path.empty()) {
      config = parse_cli_config(read_file(opts.config_path));
    } else if (chosen->get_name() != "verify") {
      bad(chosen->get_name() + " needs --config");
    }
    Context ctx{opts, std::move(config), out, err};
    return handler(ctx);
  } catch (const Error& e) {
    err << "krein " << chosen->get_name() << ": " << e.what() << "\n";
    return exit_code(e);
  } catch (const std::exception& e) {
    err << "krein " << chosen->get_name() << ": " << e.what() << "\n";
    return kSolverFailure;
  }
}

}  // namespace krein::cli

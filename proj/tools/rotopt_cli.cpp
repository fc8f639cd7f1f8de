#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "rotopt/io.hpp"
#include "rotopt/rotopt.hpp"

using namespace rotopt;
using json = nlohmann::json;

namespace {

constexpr int kOk = 0, kUsage = 2, kInfeasible = 3, kNumerical = 4;

// FNV-1a over the raw input bytes and arguments.
struct Digest {
  std::uint64_t h = 1469598103934665603ull;
  void add(const std::string& s) {
    for (unsigned char ch : s) {
      h ^= ch;
      h *= 1099511628211ull;
    }
    h ^= 0xff;
    h *= 1099511628211ull;
  }
  void add_file(const std::string& path) { add(io::read_file(path)); }
  std::string hex() const {
    std::ostringstream ss;
    ss << std::hex << h;
    return ss.str();
  }
};

// A path to a table, or an inline comma-separated list.
Vector vector_arg(const std::string& arg, Digest& dg) {
  if (std::filesystem::exists(arg)) {
    dg.add_file(arg);
    return io::read_vector(arg);
  }
  dg.add(arg);
  const auto rows = io::parse_csv_rows(arg);
  if (rows.size() != 1) throw Error(ErrorKind::Parse, "expected a file or a comma-separated list: '" + arg + "'");
  return Eigen::Map<const Vector>(rows[0].data(), static_cast<Index>(rows[0].size()));
}

Matrix matrix_arg(const std::string& path, Digest& dg) {
  dg.add_file(path);
  return io::read_matrix(path);
}

struct Report {
  json j;
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();

  explicit Report(const std::string& command) { j["command"] = command; }

  void matrix(const Matrix& x, double constraint_residual) {
    j["matrix"] = io::matrix_json(x);
    j["residuals"] = {{"orth", orthogonality_error(x)}, {"constraint", constraint_residual}};
    j["det"] = x.determinant();
  }

  int emit(const Digest& dg, int code, const std::string& out_path = "", const Matrix* x = nullptr) {
    j["inputs_digest"] = dg.hex();
    j["wall_ms"] = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    j["exit_code"] = code;
    if (!out_path.empty() && x) io::write_matrix_file(out_path, *x);
    std::cout << j.dump(2) << std::endl;
    return code;
  }
};

json cut_json(const PpSeparation& s) {
  if (const auto* b = std::get_if<BoxCut>(&s))
    return {{"kind", "box"}, {"index", b->index + 1}, {"sign", b->sign}, {"violation", b->violation}};
  if (const auto* o = std::get_if<OddSetCut>(&s)) {
    json set = json::array();
    for (Index i : o->s) set.push_back(i + 1);
    return {{"kind", "odd_set"}, {"set", set}, {"violation", o->violation}};
  }
  return nullptr;
}

json halfspace_json(const Halfspace& h) { return {{"a", io::vector_json(h.a)}, {"b", h.b}}; }

int cmd_wahba(const std::string& obs_path, const std::string& ref_path, const std::string& out) {
  Digest dg;
  dg.add_file(obs_path);
  dg.add_file(ref_path);
  const Matrix obs = io::read_table(obs_path), ref = io::read_table(ref_path);
  if (obs.rows() == 0 || obs.rows() != ref.rows() || obs.cols() != ref.cols())
    throw Error(ErrorKind::Parse, "observation and reference lists must have the same shape");
  const Index n = obs.cols();
  // min sum |X u_i - v_i|^2 is max <sum v_i u_i^T, X>.
  Matrix m = Matrix::Zero(n, n);
  for (Index i = 0; i < obs.rows(); ++i) m += ref.row(i).transpose() * obs.row(i);
  const TraceMax t = special_trace(m);
  auto loss = [&](const Matrix& x) {
    double s = 0.0;
    for (Index i = 0; i < obs.rows(); ++i) s += (x * obs.row(i).transpose() - ref.row(i).transpose()).squaredNorm();
    return s;
  };
  Report rep("wahba");
  rep.j["value"] = t.value;
  rep.j["loss_before"] = loss(Matrix::Identity(n, n));
  rep.j["loss_after"] = loss(t.argmax);
  rep.matrix(t.argmax, 0.0);
  return rep.emit(dg, kOk, out, &t.argmax);
}

struct Opt1Args {
  std::string a_file, b_file, x0_file, out;
  double lo = -INFINITY, hi = INFINITY, eps = 1e-4;
  double angle = NAN;
};

int cmd_opt1(const Opt1Args& o) {
  Digest dg;
  const Matrix a = matrix_arg(o.a_file, dg);
  Matrix b;
  double lo = o.lo, hi = o.hi;
  if (!std::isnan(o.angle)) {
    if (o.x0_file.empty()) throw Error(ErrorKind::Parse, "--angle needs --x0");
    b = matrix_arg(o.x0_file, dg);
    lo = 1.0 + 2.0 * std::cos(o.angle);
    hi = trace_norm(b);
    dg.add(std::to_string(o.angle));
  } else {
    if (o.b_file.empty()) throw Error(ErrorKind::Parse, "opt1 needs B_FILE or --angle/--x0");
    b = matrix_arg(o.b_file, dg);
  }
  if (lo > hi) throw Error(ErrorKind::Parse, "--lo must not exceed --hi");
  // Open interval ends are clamped to the Hoelder bound |<B, X>| <= |B|_tr.
  const double bt = trace_norm(b);
  lo = std::max(lo, -bt - 1.0);
  hi = std::min(hi, bt + 1.0);
  dg.add(io::format_double(lo) + "," + io::format_double(hi) + "," + io::format_double(o.eps));

  const OneConstraintResult r = solve_one_constraint(a, b, lo, hi, o.eps);
  const Matrix x = round_certificate(a, b, r.certificate);
  const double bx = b.cwiseProduct(x).sum();
  const double viol = std::max({0.0, lo - bx, bx - hi});

  Report rep("opt1");
  rep.j["value"] = r.value;
  rep.j["point"] = {r.point(0), r.point(1)};
  rep.j["upper_bound"] = r.upper_bound * trace_norm(a);
  rep.j["certificate"] = {{"alpha", r.certificate.alpha}, {"beta", r.certificate.beta}, {"slack", r.certificate.slack}};
  rep.j["interval"] = {lo, hi};
  rep.j["oracle_calls"] = r.oracle_calls;
  rep.j["support_evaluations"] = r.support_evaluations;
  rep.j["degenerate"] = r.degenerate;
  rep.j["rounded_value"] = a.cwiseProduct(x).sum();
  rep.matrix(x, viol);
  return rep.emit(dg, kOk, o.out, &x);
}

int cmd_diag(const std::string& target, const std::string& ineq, double eps, const std::string& out) {
  Digest dg;
  Report rep("diag");
  if (!target.empty()) {
    const Vector d = vector_arg(target, dg);
    const PpSeparation sep = pp_separate(d);
    if (!pp_contains(d)) {
      rep.j["infeasible"] = true;
      rep.j["cut"] = cut_json(sep);
      return rep.emit(dg, kInfeasible);
    }
    const Matrix x = construct_with_diagonal(d);
    rep.j["value"] = (x.diagonal() - d).cwiseAbs().maxCoeff();
    rep.j["diagonal"] = io::vector_json(x.diagonal());
    rep.matrix(x, (x.diagonal() - d).cwiseAbs().maxCoeff());
    return rep.emit(dg, kOk, out, &x);
  }
  dg.add_file(ineq);
  const Matrix rows = io::read_table(ineq);
  if (rows.cols() < 2) throw Error(ErrorKind::Parse, "inequality rows need n coefficients and a bound");
  PolyhedralSet cset;
  cset.n = rows.cols() - 1;
  for (Index i = 0; i < rows.rows(); ++i) cset.rows.push_back({rows.row(i).head(cset.n).transpose(), rows(i, cset.n)});
  const DiagFeasibility r = decide_diag_feasibility(cset, eps);
  rep.j["iterations"] = r.iterations;
  if (r.status != FeasibilityStatus::Found) {
    rep.j["infeasible"] = true;
    rep.j["eps"] = eps;
    if (r.last_cut) rep.j["cut"] = halfspace_json(*r.last_cut);
    return rep.emit(dg, kInfeasible);
  }
  double worst = 0.0;
  for (const auto& h : cset.rows) worst = std::max(worst, h.a.dot(r.x.diagonal()) - h.b);
  rep.j["value"] = worst;
  rep.j["diagonal"] = io::vector_json(r.x.diagonal());
  rep.matrix(r.x, worst);
  return rep.emit(dg, kOk, out, &r.x);
}

int cmd_sut(const std::string& sigma_arg, const std::string& rho, const std::string& opt, const std::string& group,
            const std::string& out) {
  Digest dg;
  const SutVector sigma = SutVector::from_entries(vector_arg(sigma_arg, dg));
  Report rep("sut");
  const SutFiber fiber(sigma);
  const DiagBounds bounds = fiber.bounds();
  rep.j["alpha"] = io::vector_json(bounds.alpha);
  rep.j["beta"] = io::vector_json(bounds.beta);
  auto sut_residual = [&](const Matrix& x) { return (project_sut(x).sigma - sigma.sigma).cwiseAbs().maxCoeff(); };
  Matrix x;
  if (!rho.empty()) {
    dg.add(rho);
    const SignPattern p = SignPattern::parse(rho);
    x = fiber.element(p);
    rep.j["value"] = x.determinant();
    rep.j["parity"] = p.parity();
  } else {
    const Vector a = vector_arg(opt, dg);
    dg.add(group);
    if (group == "o") {
      const SutOptimum r = sut_opt_orth(sigma, a);
      x = r.x;
      rep.j["value"] = r.value;
      rep.j["relaxation"] = r.relaxation;
      rep.j["gap_bound"] = 0.0;
    } else {
      const SutOptimum r = sut_opt_special(sigma, a);
      x = r.x;
      rep.j["value"] = r.value;
      rep.j["relaxation"] = r.relaxation;
      rep.j["min_relaxation"] = r.min_relaxation;
      rep.j["gap_bound"] = r.gap_bound;
      rep.j["flipped"] = r.flipped >= 0 ? json(r.flipped + 1) : json(nullptr);
    }
  }
  rep.matrix(x, sut_residual(x));
  return rep.emit(dg, kOk, out, &x);
}

std::string svg_polygon(const std::vector<Vec2>& pts) {
  double x0 = pts[0](0), x1 = x0, y0 = pts[0](1), y1 = y0;
  for (const auto& p : pts) {
    x0 = std::min(x0, p(0));
    x1 = std::max(x1, p(0));
    y0 = std::min(y0, p(1));
    y1 = std::max(y1, p(1));
  }
  const double span = std::max({x1 - x0, y1 - y0, 1e-12});
  const double scale = 472.0 / span;
  const double cx = 0.5 * (x0 + x1), cy = 0.5 * (y0 + y1);
  std::ostringstream ss;
  ss << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 512 512\" width=\"512\" height=\"512\">\n"
     << "<polygon fill=\"#cfe3f7\" stroke=\"#1f4e79\" stroke-width=\"1.5\" points=\"";
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (i) ss << ' ';
    ss << io::format_double(256.0 + scale * (pts[i](0) - cx)) << ','
       << io::format_double(256.0 - scale * (pts[i](1) - cy));
  }
  ss << "\"/>\n</svg>\n";
  return ss.str();
}

int cmd_image(const std::string& a_file, const std::string& b_file, Index k, const std::string& out) {
  Digest dg;
  const Matrix a = matrix_arg(a_file, dg), b = matrix_arg(b_file, dg);
  const auto pts = image_boundary_polygon(a, b, k);
  std::ostringstream csv;
  for (const auto& p : pts) csv << io::format_double(p(0)) << ',' << io::format_double(p(1)) << '\n';
  if (out.empty()) {
    std::cout << csv.str();
    return kOk;
  }
  std::ofstream f(out);
  if (!f) throw Error(ErrorKind::Parse, "cannot write '" + out + "'");
  if (out.size() >= 4 && out.substr(out.size() - 4) == ".svg")
    f << svg_polygon(pts);
  else
    f << csv.str();
  return kOk;
}

int cmd_random(const std::string& kind, Index n, std::uint64_t seed, const std::string& out) {
  Digest dg;
  dg.add(kind + std::to_string(n) + "," + std::to_string(seed));
  Report rep("random");
  rep.j["seed"] = seed;
  if (kind == "pp") {
    const Vector d = pp_random_point(n, seed);
    rep.j["value"] = io::vector_json(d);
    return rep.emit(dg, kOk);
  }
  const Matrix x = random_rotation(n, seed);
  rep.matrix(x, 0.0);
  return rep.emit(dg, kOk, out, &x);
}

int exit_code_for(ErrorKind k) {
  switch (k) {
    case ErrorKind::Parse:
    case ErrorKind::InvalidArgument:
    case ErrorKind::DimensionMismatch:
    case ErrorKind::DimensionTooLarge:
    case ErrorKind::TooManyVectors:
      return kUsage;
    case ErrorKind::Infeasible:
    case ErrorKind::NotInParityPolytope:
      return kInfeasible;
    default:
      return kNumerical;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Linear optimization and feasibility over rotation matrices"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "rotopt 1.0.0");

  std::string obs, ref, out;
  auto* wahba = app.add_subcommand("wahba", "Rotation best aligning paired vectors");
  wahba->add_option("obs_file", obs, "Observed vectors, one per row")->required();
  wahba->add_option("ref_file", ref, "Reference vectors, one per row")->required();
  wahba->add_option("--out", out, "Write the rotation to a CSV/JSON file");

  Opt1Args o;
  auto* opt1 = app.add_subcommand("opt1", "max <A,X> s.t. <B,X> in [lo,hi] over SO(n)");
  opt1->add_option("a_file", o.a_file, "Objective matrix A")->required();
  opt1->add_option("b_file", o.b_file, "Constraint matrix B");
  opt1->add_option("--lo", o.lo, "Lower end of the interval");
  opt1->add_option("--hi", o.hi, "Upper end of the interval");
  opt1->add_option("--eps", o.eps, "Additive accuracy (unit trace-norm scale)")->check(CLI::PositiveNumber);
  opt1->add_option("--angle", o.angle, "Keep X within this rotation angle of X0 (3x3)");
  opt1->add_option("--x0", o.x0_file, "Reference rotation for --angle");
  opt1->add_option("--out", o.out, "Write the rounded rotation");

  std::string target, ineq;
  double deps = 1e-6;
  auto* diag = app.add_subcommand("diag", "Rotation with prescribed or constrained diagonal");
  auto* tgt = diag->add_option("--target", target, "Diagonal vector (file or comma list)");
  auto* inq = diag->add_option("--ineq", ineq, "Rows a_1..a_n,b meaning <a,d> <= b");
  tgt->excludes(inq);
  diag->add_option("--eps", deps, "Ellipsoid accuracy")->check(CLI::PositiveNumber);
  diag->add_option("--out", out, "Write the rotation");

  std::string sigma, rho, opt, group = "so";
  auto* sut = app.add_subcommand("sut", "Orthogonal matrices with prescribed strictly-upper entries");
  sut->add_option("--sigma", sigma, "Strictly-upper entries, row-major (file or comma list)")->required();
  auto* rho_opt = sut->add_option("--rho", rho, "Sign pattern such as +-+");
  auto* opt_opt = sut->add_option("--opt", opt, "Diagonal objective a (file or comma list)");
  rho_opt->excludes(opt_opt);
  sut->add_option("--group", group, "so or o")->check(CLI::IsMember({"so", "o"}));
  sut->add_option("--out", out, "Write the matrix");

  std::string ia, ib;
  Index k = 256;
  auto* image = app.add_subcommand("image", "Boundary points of the image of SO(n) under (A,B)");
  image->add_option("a_file", ia, "Matrix A")->required();
  image->add_option("b_file", ib, "Matrix B")->required();
  image->add_option("--k", k, "Number of directions")->check(CLI::PositiveNumber);
  image->add_option("--out", out, "points.csv or plot.svg (default: CSV on stdout)");

  std::string kind = "rotation";
  Index rn = 3;
  std::uint64_t seed = 0;
  auto* rnd = app.add_subcommand("random", "Seeded random test instances");
  rnd->add_option("--kind", kind, "rotation or pp")->check(CLI::IsMember({"rotation", "pp"}));
  rnd->add_option("--n", rn, "Dimension")->check(CLI::PositiveNumber);
  rnd->add_option("--seed", seed, "Seed (default 0)");
  rnd->add_option("--out", out, "Write the matrix");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kUsage;
  }

  try {
    if (*wahba) return cmd_wahba(obs, ref, out);
    if (*opt1) return cmd_opt1(o);
    if (*diag) {
      if (target.empty() == ineq.empty()) throw Error(ErrorKind::Parse, "diag needs exactly one of --target, --ineq");
      return cmd_diag(target, ineq, deps, out);
    }
    if (*sut) {
      if (rho.empty() == opt.empty()) throw Error(ErrorKind::Parse, "sut needs exactly one of --rho, --opt");
      return cmd_sut(sigma, rho, opt, group, out);
    }
    if (*image) return cmd_image(ia, ib, k, out);
    if (*rnd) return cmd_random(kind, rn, seed, out);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumerical;
  }
  return kUsage;
}

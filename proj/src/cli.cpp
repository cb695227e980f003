#include "qcov/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "qcov/modules.hpp"

namespace qcov::cli {

namespace {

using json = nlohmann::ordered_json;

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string datum = "rank1";
  int height = 4;
  bool height_given = false;
  std::optional<int> pi;
  std::string varsigma;
  std::string tau;
  std::string format = "json";
  std::string out;
  std::uint64_t seed = 0;
  std::string lambda;
  std::optional<int> mu;
  int b1 = 0, b2 = 0, steps = 4;
};

// ------------------------------------------------------------------ rendering

struct Fmt {
  std::optional<int> pi;
  QPiScalar view(const QPiScalar& s) const {
    if (!pi) return s;
    RatFunc r = s.specialize(*pi);
    return {r, r};
  }
  std::string text(const QPiScalar& s) const { return to_string(view(s)); }
  std::string tex(const QPiScalar& s) const { return to_tex(view(s)); }
};

std::string tex_escape(const std::string& s) {
  std::string r;
  for (char c : s) {
    switch (c) {
      case '_': r += "\\_"; break;
      case '^': r += "\\^{}"; break;
      case '&': r += "\\&"; break;
      case '%': r += "\\%"; break;
      case '#': r += "\\#"; break;
      case '$': r += "\\$"; break;
      case '{': r += "\\{"; break;
      case '}': r += "\\}"; break;
      case '~': r += "\\~{}"; break;
      case '\\': r += "\\textbackslash{}"; break;
      default: r += c;
    }
  }
  return r;
}

struct Cell {
  std::string text, tex;
};

Cell plain(const std::string& s) { return {s, "\\texttt{" + tex_escape(s) + "}"}; }
Cell scalar_cell(const Fmt& f, const QPiScalar& s) { return {f.text(s), "$" + f.tex(s) + "$"}; }

struct Table {
  std::string title;
  std::vector<std::string> header;
  std::vector<std::vector<Cell>> rows;
};

struct Report {
  json doc = json::object();
  std::vector<Table> tables;
  int code = kOk;
};

std::string scalar_line(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

void write_text(const Report& r, std::ostream& os) {
  for (const auto& [k, v] : r.doc.items())
    if (v.is_primitive()) os << k << ": " << scalar_line(v) << "\n";
  for (const auto& t : r.tables) {
    os << "\n## " << t.title << "\n";
    for (size_t c = 0; c < t.header.size(); ++c) os << (c ? " | " : "") << t.header[c];
    os << "\n";
    for (const auto& row : t.rows) {
      for (size_t c = 0; c < row.size(); ++c) os << (c ? " | " : "") << row[c].text;
      os << "\n";
    }
  }
}

// Preamble: article class, amsmath and longtable; the summary as a description
// list, then one longtable per result table.
void write_tex(const Report& r, std::ostream& os) {
  os << "\\documentclass{article}\n\\usepackage{amsmath}\n\\usepackage{longtable}\n\\begin{document}\n";
  os << "\\begin{description}\n";
  for (const auto& [k, v] : r.doc.items())
    if (v.is_primitive()) os << "\\item[" << tex_escape(k) << "] \\texttt{" << tex_escape(scalar_line(v)) << "}\n";
  os << "\\end{description}\n";
  for (const auto& t : r.tables) {
    os << "\\section*{" << tex_escape(t.title) << "}\n";
    os << "\\begin{longtable}{" << std::string(t.header.size(), 'l') << "}\n";
    for (size_t c = 0; c < t.header.size(); ++c) os << (c ? " & " : "") << tex_escape(t.header[c]);
    os << " \\\\ \\hline\n";
    for (const auto& row : t.rows) {
      for (size_t c = 0; c < row.size(); ++c) os << (c ? " & " : "") << row[c].tex;
      os << " \\\\\n";
    }
    os << "\\end{longtable}\n";
  }
  os << "\\end{document}\n";
}

void write_report(const Report& r, const std::string& format, std::ostream& os) {
  if (format == "text") {
    write_text(r, os);
  } else if (format == "tex") {
    write_tex(r, os);
  } else {
    os << r.doc.dump(2) << "\n";
  }
}

std::string labels_of(const Datum& d, const Word& w) {
  std::string s = "[";
  for (size_t k = 0; k < w.size(); ++k) s += (k ? "," : "") + d.label(w[k]);
  return s + "]";
}

std::string pi_field(const Fmt& f) { return f.pi ? std::to_string(*f.pi) : "generic"; }

json terms_json(const std::vector<std::pair<std::string, QPiScalar>>& terms, const Fmt& f) {
  json a = json::array();
  for (const auto& [t, c] : terms) a.push_back({{"term", t}, {"coeff", f.text(c)}});
  return a;
}

std::vector<std::pair<std::string, QPiScalar>> pbw_terms(const CoveringAlgebra& u, const PbwElement& x) {
  std::vector<std::pair<std::string, QPiScalar>> r;
  for (const auto& [k, c] : x.terms) r.emplace_back(u.render_key(k), c);
  return r;
}

std::vector<std::pair<std::string, QPiScalar>> tensor_terms(const CoveringAlgebra& u, const TensorElement& x) {
  std::vector<std::pair<std::string, QPiScalar>> r;
  for (const auto& [k, c] : x.terms) r.emplace_back(u.render_key(k.first) + " (x) " + u.render_key(k.second), c);
  return r;
}

std::string join_terms(const std::vector<std::pair<std::string, QPiScalar>>& terms, const Fmt& f) {
  if (terms.empty()) return "0";
  std::string s;
  for (const auto& [t, c] : terms) s += (s.empty() ? "" : " + ") + ("(" + f.text(c) + ")*" + t);
  return s;
}

// ------------------------------------------------------------------ loading

struct Loaded {
  std::shared_ptr<const Datum> d;
  IParams p;
  std::string name;
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> r;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) r.push_back(cur);
  return r;
}

std::vector<int> parse_ints(const std::string& s, const std::string& what) {
  std::vector<int> r;
  for (const auto& t : split(s, ',')) {
    try {
      size_t used = 0;
      r.push_back(std::stoi(t, &used));
      if (used != t.size()) throw std::invalid_argument(t);
    } catch (const std::exception&) {
      throw ParseError(what + ": '" + t + "' is not an integer");
    }
  }
  if (r.empty()) throw ParseError(what + " is empty");
  return r;
}

Loaded load(const Options& o) {
  Loaded l;
  if (auto b = Datum::builtin(o.datum)) {
    l.d = b;
    l.p = default_params(*b);
    l.name = b->name();
  } else {
    std::ifstream in(o.datum);
    if (!in) throw IoError("cannot read datum descriptor '" + o.datum + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    LoadedDatum ld = load_datum_json(ss.str(), o.datum);
    l.d = ld.datum;
    l.p = ld.params_given ? ld.params : default_params(*ld.datum);
    l.name = o.datum;
  }
  const int n = l.d->rank();
  if (!o.varsigma.empty()) {
    auto parts = split(o.varsigma, ',');
    if (parts.size() != 1 && static_cast<int>(parts.size()) != n)
      throw ParseError("--varsigma needs one value or one per index");
    for (int i = 0; i < n; ++i) l.p.varsigma[static_cast<size_t>(i)] = parse_scalar(parts[parts.size() == 1 ? 0 : static_cast<size_t>(i)]);
  }
  if (!o.tau.empty()) {
    auto parts = split(o.tau, ',');
    if (static_cast<int>(parts.size()) != n) throw ParseError("--tau needs one label per index");
    for (int i = 0; i < n; ++i) {
      int found = -1;
      for (int j = 0; j < n; ++j)
        if (l.d->label(j) == parts[static_cast<size_t>(i)]) found = j;
      if (found < 0) throw ParseError("--tau: unknown index label '" + parts[static_cast<size_t>(i)] + "'");
      l.p.tau[static_cast<size_t>(i)] = found;
    }
  }
  return l;
}

json params_json(const Loaded& l, const Fmt& f) {
  json tau = json::array(), vs = json::array();
  for (int t : l.p.tau) tau.push_back(l.d->label(t));
  for (const auto& s : l.p.varsigma) vs.push_back(f.text(s));
  return {{"tau", tau}, {"varsigma", vs}};
}

Report header(const std::string& command, const Loaded& l, int height, const Fmt& f) {
  Report r;
  r.doc["command"] = command;
  r.doc["datum"] = l.name;
  r.doc["rank"] = l.d->rank();
  r.doc["height"] = height;
  r.doc["pi"] = pi_field(f);
  r.doc["params"] = params_json(l, f);
  return r;
}

// Weight with <i, lambda> = labels[i], searched in a box of X.
XWeight weight_from_labels(const Datum& d, const std::vector<int>& labels) {
  if (static_cast<int>(labels.size()) != d.rank()) throw ParseError("--lambda needs one value per index");
  const int n = d.x_rank();
  int bound = 2;
  for (int v : labels) bound = std::max(bound, std::abs(v) + 2);
  std::vector<int> c(static_cast<size_t>(n), -bound);
  while (true) {
    XWeight w(c);
    bool ok = true;
    for (int i = 0; i < d.rank() && ok; ++i) ok = d.pair(i, w) == labels[static_cast<size_t>(i)];
    if (ok) return w;
    int k = 0;
    while (k < n && ++c[static_cast<size_t>(k)] > bound) c[static_cast<size_t>(k++)] = -bound;
    if (k == n) break;
  }
  throw WeightOutOfRange("no weight in X has the requested pairings");
}

struct Env {
  std::shared_ptr<HalfAlgebra> f;
  std::unique_ptr<CoveringAlgebra> u;
  Env(std::shared_ptr<const Datum> d, int n)
      : f(std::make_shared<HalfAlgebra>(std::move(d), n)), u(std::make_unique<CoveringAlgebra>(f, n)) {}
};

// ------------------------------------------------------------------ commands

Report cmd_validate(const Loaded& l, const Options& o, const Fmt& f) {
  Report r = header("validate", l, o.height, f);
  auto v = validate_datum(l.d->cartan(), l.d->root());
  auto pv = validate_params(l.p, *l.d);
  v.insert(v.end(), pv.begin(), pv.end());
  r.doc["valid"] = v.empty();
  json a = json::array();
  Table t{"Violations", {"condition", "message"}, {}};
  for (const auto& x : v) {
    a.push_back({{"condition", x.condition}, {"message", x.message}});
    t.rows.push_back({plain(x.condition), plain(x.message)});
  }
  r.doc["violations"] = a;
  r.tables.push_back(t);
  if (!v.empty()) r.code = kInvalid;
  return r;
}

Report cmd_upsilon(const Loaded& l, const Options& o, const Fmt& f) {
  Report r = header("upsilon", l, o.height, f);
  HalfAlgebra h(l.d, o.height);
  UpsilonExpansion ups = upsilon(h, l.p, o.height);
  json parts = json::object();
  Table t{"Upsilon", {"weight", "term", "coefficient"}, {}};
  for (const auto& [mu, v] : ups.parts) {
    if (v.is_zero()) continue;
    const QuotientBasis& b = h.basis(mu);
    std::vector<std::pair<std::string, QPiScalar>> terms;
    for (size_t k = 0; k < v.c.size(); ++k)
      if (!v.c[k].is_zero()) terms.emplace_back("E" + labels_of(*l.d, b.pivot_words[k]), v.c[k]);
    parts[render_weight(mu)] = terms_json(terms, f);
    for (const auto& [term, c] : terms) t.rows.push_back({plain(render_weight(mu)), plain(term), scalar_cell(f, c)});
  }
  r.doc["parts"] = parts;
  r.tables.push_back(t);
  return r;
}

void tensor_parts(Report& r, const std::string& title, const CoveringAlgebra& u,
                  const std::map<RootWeight, TensorElement>& parts, const Fmt& f) {
  json js = json::object();
  Table t{title, {"weight", "term", "coefficient"}, {}};
  for (const auto& [mu, x] : parts) {
    if (x.is_zero()) continue;
    auto terms = tensor_terms(u, x);
    js[render_weight(mu)] = terms_json(terms, f);
    for (const auto& [term, c] : terms) t.rows.push_back({plain(render_weight(mu)), plain(term), scalar_cell(f, c)});
  }
  r.doc["parts"] = js;
  r.tables.push_back(t);
}

Report cmd_theta(const Loaded& l, const Options& o, const Fmt& f) {
  Report r = header("theta", l, o.height, f);
  Env e(l.d, o.height);
  tensor_parts(r, "Theta", *e.u, theta(*e.u, o.height).parts, f);
  return r;
}

Report cmd_theta_i(const Loaded& l, const Options& o, const Fmt& f) {
  Report r = header("theta-i", l, o.height, f);
  Env e(l.d, o.height);
  UpsilonExpansion ups = upsilon(*e.f, l.p, o.height);
  tensor_parts(r, "Theta^i", *e.u, theta_i(*e.u, ups, theta(*e.u, o.height)).parts, f);
  return r;
}

std::string poly_text(const BPoly& p, const Fmt& f) {
  if (p.coeff.empty()) return "0";
  std::string s;
  for (auto it = p.coeff.rbegin(); it != p.coeff.rend(); ++it) {
    const auto [n, e] = it->first;
    s += (s.empty() ? "" : " + ") + ("(" + f.text(it->second) + ")");
    if (n == 1) s += "*B";
    if (n > 1) s += "*B^" + std::to_string(n);
    if (e) s += "*J";
  }
  return s;
}

Report cmd_idp(const Loaded& l, const Options& o, const Fmt& f) {
  Report r = header("idp", l, o.height, f);
  Env e(l.d, o.height);
  json rows = json::array();
  Table t{"i-divided powers", {"i", "m", "parity", "product", "expansion"}, {}};
  for (int i = 0; i < l.d->rank(); ++i) {
    const bool fixed = l.p.tau[static_cast<size_t>(i)] == i;
    for (int m = 0; m <= o.height; ++m)
      for (IParity par : {IParity::Even, IParity::Odd}) {
        if (!fixed && par == IParity::Odd) continue;
        IDividedPower x = idivided_power(*e.u, l.p, i, m, par);
        const std::string pname = fixed ? (par == IParity::Even ? "even" : "odd") : "none";
        const std::string poly = poly_text(x.poly, f);
        rows.push_back({{"i", l.d->label(i)},
                        {"m", m},
                        {"parity", pname},
                        {"product", x.symbolic},
                        {"polynomial", poly},
                        {"pbw", terms_json(pbw_terms(*e.u, x.value), f)}});
        t.rows.push_back({plain(l.d->label(i)), plain(std::to_string(m)), plain(pname), plain(x.symbolic), plain(poly)});
      }
  }
  r.doc["divided_powers"] = rows;
  r.tables.push_back(t);
  return r;
}

json action_json(const WeightModule& m, const Fmt& f) {
  json a = json::object();
  for (size_t i = 0; i < m.E.size(); ++i)
    for (const auto& [name, mat] : {std::pair<std::string, const Matrix*>{"E", &m.E[i]}, {"F", &m.F[i]}}) {
      json entries = json::array();
      for (int c = 0; c < mat->cols(); ++c)
        for (int row = 0; row < mat->rows(); ++row)
          if (!(*mat)(row, c).is_zero()) entries.push_back({{"row", row}, {"col", c}, {"coeff", f.text((*mat)(row, c))}});
      a[name + m.datum->label(static_cast<int>(i))] = entries;
    }
  return a;
}

constexpr int kAutoHeightCap = 6;

Report cmd_module(const Loaded& l, const Options& o, const Fmt& f) {
  if (o.lambda.empty()) throw ParseError("module needs --lambda");
  std::vector<int> labels = parse_ints(o.lambda, "--lambda");
  XWeight lambda = weight_from_labels(*l.d, labels);
  int n = o.height;
  std::optional<WeightModule> built;
  if (o.height_given) {
    Env e(l.d, n);
    built = simple(*e.u, lambda, n);
  } else {
    n = 1;
    for (int v : labels) n = std::max(n, v + 1);
    for (;; ++n) {
      Env e(l.d, n);
      try {
        built = simple(*e.u, lambda, n);
        break;
      } catch (const DepthExceeded&) {
        // infinite-dimensional modules (km2) never fit; give up at a fixed height
        if (n >= kAutoHeightCap) throw;
      }
    }
  }
  Env e(l.d, n);
  WeightModule m = *built;
  const bool rank1 = l.d->rank() == 1;
  if (rank1) m = canonical_basis_rank1(*e.u, labels[0]).mod;
  Report r = header("module", l, n, f);
  r.doc["lambda"] = labels;
  r.doc["highest_weight"] = render_lattice(lambda);
  r.doc["dim"] = m.dim();
  CheckResult audit = audit_relations(*e.u, m);
  r.doc["relations_ok"] = audit.ok;
  if (!audit.ok) {
    r.doc["relations_detail"] = audit.detail;
    r.code = kAssertion;
  }
  json basis = json::array();
  Table t{rank1 ? "Canonical basis" : "Basis", {"index", "label", "weight"}, {}};
  for (int k = 0; k < m.dim(); ++k) {
    const std::string w = render_lattice(m.weights[static_cast<size_t>(k)]);
    basis.push_back({{"index", k}, {"label", m.labels[static_cast<size_t>(k)]}, {"weight", w}});
    t.rows.push_back({plain(std::to_string(k)), plain(m.labels[static_cast<size_t>(k)]), plain(w)});
  }
  r.doc["basis"] = basis;
  r.doc["canonical_basis"] = rank1 ? json("F^(k)eta") : json(nullptr);
  r.doc["action"] = action_json(m, f);
  r.tables.push_back(t);
  return r;
}

void require_rank1(const Datum& d, const std::string& what) {
  if (d.rank() != 1) throw RankUnsupported(what + " is implemented for rank one only");
}

json expansion_json(const Vec& v, const std::vector<std::string>& labels, const Fmt& f) {
  json a = json::array();
  for (size_t k = 0; k < v.size(); ++k)
    if (!v[k].is_zero()) a.push_back({{"basis", labels[k]}, {"coeff", f.text(v[k])}});
  return a;
}

std::string expansion_text(const Vec& v, const std::vector<std::string>& labels, const Fmt& f) {
  std::vector<std::pair<std::string, QPiScalar>> terms;
  for (size_t k = 0; k < v.size(); ++k)
    if (!v[k].is_zero()) terms.emplace_back(labels[k], v[k]);
  return join_terms(terms, f);
}

Report cmd_icb(const Loaded& l, const Options& o, const Fmt& f) {
  require_rank1(*l.d, "icb");
  if (o.lambda.empty()) throw ParseError("icb needs --lambda");
  const int a = parse_ints(o.lambda, "--lambda")[0];
  const int b = o.mu.value_or(-1);
  if (a < 0 || (o.mu && b < 0)) throw NotDominant("weights must be nonnegative");
  const int depth = o.mu ? a + b : a;
  const int n = o.height_given ? o.height : depth + 1;
  if (n < depth + 1) throw DepthExceeded("icb needs --height at least " + std::to_string(depth + 1));
  Env e(l.d, n);
  UpsilonExpansion ups = upsilon(*e.f, l.p, depth);
  BasedModule based;
  Report r = header("icb", l, n, f);
  r.doc["lambda"] = a;
  if (o.mu) {
    r.doc["mu"] = b;
    BasedModule ma = canonical_basis_rank1(*e.u, a), mb = canonical_basis_rank1(*e.u, b);
    TensorModule t = tensor(*e.u, ma, mb);
    based = t.diamond;
    AntiLinear via_upsilon = psi_i_module(*e.u, ups, based);
    ThetaIExpansion ti = theta_i(*e.u, ups, theta(*e.u, depth));
    const bool agree = psi_i_tensor(*e.u, ups, ti, ma, mb, t).m == via_upsilon.m;
    r.doc["theta_i_agrees"] = agree;
    if (!agree) r.code = kAssertion;
  } else {
    based = canonical_basis_rank1(*e.u, a);
  }
  AntiLinear psi = psi_i_module(*e.u, ups, based);
  if (!psi.involutive()) throw ConsistencyFailure("psi_i is not an involution");
  ICanonicalBasis icb = icanonical_basis(based.mod, psi);
  // (n+1)^2 for L(n); (m+1)(n+1) already suffices on the tensor product.
  const int degree = o.mu ? based.mod.dim() : based.mod.dim() * based.mod.dim();
  bool oracle = true;
  for (int sign : {1, -1})
    oracle = oracle && icb.change.component(sign) == dense_fixed_basis(psi, sign, icb.order, degree);
  r.doc["oracle_agrees"] = oracle;
  if (!oracle) r.code = kAssertion;
  json elems = json::array();
  Table t{"i-canonical basis", {"element", "weight", "expansion"}, {}};
  for (int c = 0; c < based.mod.dim(); ++c) {
    Vec col = icb.change.column(c);
    const std::string name = "b^i[" + based.mod.labels[static_cast<size_t>(c)] + "]";
    const std::string w = render_lattice(based.mod.weights[static_cast<size_t>(c)]);
    elems.push_back({{"element", name}, {"weight", w}, {"expansion", expansion_json(col, based.mod.labels, f)}});
    t.rows.push_back({plain(name), plain(w), plain(expansion_text(col, based.mod.labels, f))});
  }
  r.doc["elements"] = elems;
  r.tables.push_back(t);
  return r;
}

Report cmd_stabilize(const Loaded& l, const Options& o, const Fmt& f) {
  require_rank1(*l.d, "stabilize");
  if (o.lambda.empty() || !o.mu) throw ParseError("stabilize needs --lambda and --mu");
  const int lambda = parse_ints(o.lambda, "--lambda")[0];
  const int mu = *o.mu;
  if (lambda < 0 || mu < 0) throw NotDominant("weights must be nonnegative");
  if (o.steps < 2) throw ParseError("--steps must be at least 2");
  const int depth = lambda + mu + 2 * (o.steps - 1);
  Env e(l.d, depth + 1);
  UpsilonExpansion ups = upsilon(*e.f, l.p, depth);
  StabilizationReport rep = stabilization(*e.u, ups, o.b1, o.b2, lambda, mu, o.steps);
  Report r = header("stabilize", l, depth + 1, f);
  r.doc["b1"] = "E^(" + std::to_string(o.b1) + ")xi";
  r.doc["b2"] = "F^(" + std::to_string(o.b2) + ")eta";
  r.doc["lambda"] = lambda;
  r.doc["mu"] = mu;
  r.doc["zeta"] = (lambda + mu) % 2;
  r.doc["projection_well_defined"] = rep.projection_linear;
  r.doc["stable_from"] = rep.stable_from ? json(*rep.stable_from) : json(nullptr);
  r.doc["status"] = rep.stable_from ? "stable" : "NoStabilization";
  json steps = json::array();
  Table t{"Stabilization", {"nu", "label", "coefficient"}, {}};
  bool invariant = true;
  for (const auto& st : rep.steps) {
    json coeffs = json::array();
    for (const auto& [lab, c] : st.coefficients) {
      const std::string name = "E^(" + std::to_string(lab.first) + ")xi <> F^(" + std::to_string(lab.second) + ")eta";
      coeffs.push_back({{"label", name}, {"coeff", f.text(c)}});
      t.rows.push_back({plain(std::to_string(st.nu)), plain(name), scalar_cell(f, c)});
    }
    if (!st.coefficients.empty()) invariant = invariant && st.psi_i_invariant;
    steps.push_back({{"nu", st.nu}, {"psi_i_invariant", st.psi_i_invariant}, {"coefficients", coeffs}});
  }
  r.doc["steps"] = steps;
  r.tables.push_back(t);
  if (!rep.projection_linear || !invariant) r.code = kAssertion;
  return r;
}

// ------------------------------------------------------------------ verify

struct Check {
  std::string name;
  std::function<CheckResult()> run;
};

std::vector<Check> verify_checks(const Loaded& l, int n, std::uint64_t seed) {
  auto d = l.d;
  IParams p = l.p;
  const int rank = d->rank();
  const int th_n = std::min(n, 4);
  const int thi_n = std::min(n, rank == 1 ? 4 : 3);
  std::vector<Check> cs;
  cs.push_back({"upsilon_recursions", [=] {
                  HalfAlgebra f(d, n);
                  return verify_recursions(f, upsilon(f, p, n, false));
                }});
  cs.push_back({"upsilon_inverse", [=] {
                  HalfAlgebra f(d, n);
                  return verify_inverse(f, upsilon(f, p, n));
                }});
  cs.push_back({"upsilon_vanishing", [=] {
                  HalfAlgebra f(d, n);
                  UpsilonExpansion ups = upsilon(f, p, n);
                  CheckResult r;
                  if (!ups.odd_part_zero) r.fail("sigma-tagged odd part is nonzero");
                  for (const auto& [mu, v] : ups.parts)
                    if ((mu.height() % 2 || d->parity(mu)) && !v.is_zero()) r.fail("Upsilon_" + render_weight(mu) + " != 0");
                  return r;
                }});
  for (int i = 0; i < rank; ++i)
    cs.push_back({"upsilon_intertwiner_" + d->label(i), [=] {
                    Env e(d, n + 1);
                    return verify_intertwiner(*e.u, upsilon(*e.f, p, n), i);
                  }});
  cs.push_back({"serre_in_radical", [=] {
                  HalfAlgebra f(d, std::max(n, 2));
                  CheckResult r;
                  for (int i = 0; i < rank; ++i)
                    for (int j = 0; j < rank; ++j) {
                      if (i == j) continue;
                      FreeElement s = f.serre_element(i, j);
                      RootWeight nu = f.weight(s.terms.begin()->first);
                      if (nu.height() > f.height_bound()) continue;
                      for (const auto& w : f.words_of_weight(nu))
                        if (!f.form(s, FreeElement::word(w)).is_zero()) r.fail("Serre element not in the radical");
                      const QuotientBasis& b = f.basis(nu);
                      if (rank_of(b.gram_words.component(1)) != rank_of(b.gram_words.component(-1)))
                        r.fail("quotient dimensions differ across pi at " + render_weight(nu));
                    }
                  return r;
                }});
  cs.push_back({"theta_intertwining", [=] {
                  Env e(d, th_n);
                  ThetaExpansion th = theta(*e.u, th_n);
                  CheckResult r;
                  for (int i = 0; i < rank; ++i) {
                    for (const auto& x : {e.u->E(i), e.u->F(i), e.u->K(d->tilde_y(i))}) {
                      CheckResult c = verify_theta_intertwining(*e.u, th, x);
                      if (!c.ok) r.fail(c.detail);
                    }
                    if (th_n >= 1) {
                      TensorElement want = e.u->tensor(e.u->F(i), e.u->E(i))
                                               .scaled(-(QPiScalar::monomial(1, d->d(i), d->p(i)) -
                                                         QPiScalar::monomial(1, -d->d(i), 0)));
                      if (th.parts.at(RootWeight::simple(rank, i)) != want) r.fail("Theta_i differs from -(pi_i q_i - q_i^-1) F_i (x) E_i");
                    }
                  }
                  return r;
                }});
  cs.push_back({"theta_random", [=] {
                  Env e(d, th_n);
                  ThetaExpansion th = theta(*e.u, th_n);
                  std::mt19937_64 rng(seed);
                  std::uniform_int_distribution<int> pick(0, rank - 1), coeff(-3, 3), qexp(-2, 2);
                  CheckResult r;
                  for (int trial = 0; trial < 3; ++trial) {
                    PbwElement x;
                    for (int t = 0; t < 3; ++t) {
                      PbwElement a = e.u->mul(e.u->F(pick(rng)), e.u->E(pick(rng)));
                      x += a.scaled(QPiScalar::monomial(coeff(rng), qexp(rng), 0));
                    }
                    CheckResult c = verify_theta_intertwining(*e.u, th, x);
                    if (!c.ok) r.fail("seeded element " + std::to_string(trial) + ": " + c.detail);
                  }
                  return r;
                }});
  cs.push_back({"theta_i", [=] {
                  Env e(d, thi_n);
                  ThetaIExpansion ti = theta_i(*e.u, upsilon(*e.f, p, thi_n), theta(*e.u, thi_n));
                  CheckResult r = verify_theta_i_parity(*e.u, ti);
                  if (ti.parts.at(RootWeight::zero(rank)) != e.u->tensor(e.u->one(), e.u->one())) r.fail("Theta^i_0 != 1 (x) 1");
                  for (int i = 0; i < rank; ++i) {
                    CheckResult c = verify_theta_i_derivation(*e.u, ti, p, i);
                    if (!c.ok) r.fail(c.detail);
                  }
                  return r;
                }});
  cs.push_back({"idp_bar_invariant", [=] {
                  CheckResult r;
                  for (int i = 0; i < rank; ++i)
                    for (IParity par : {IParity::Even, IParity::Odd})
                      for (int m = 0; m <= std::min(n, 6); ++m) {
                        IExpr x = idivided_poly(*d, p, i, m, par).to_expr(i);
                        if (psi_i(x) != x) r.fail("B^(" + std::to_string(m) + ") not psi_i-invariant");
                      }
                  return r;
                }});
  if (rank != 1) return cs;
  const int top = std::min(n, 6);
  cs.push_back({"icb_simple", [=] {
                  Env e(d, top + 1);
                  UpsilonExpansion ups = upsilon(*e.f, p, top);
                  CheckResult r;
                  for (int k = 0; k <= top; ++k) {
                    BasedModule m = canonical_basis_rank1(*e.u, k);
                    AntiLinear psi = psi_i_module(*e.u, ups, m);
                    if (!psi.involutive()) r.fail("psi_i not involutive on L(" + std::to_string(k) + ")");
                    CheckResult c = verify_psi_i_intertwines(*e.u, p, m.mod, psi);
                    if (!c.ok) r.fail(c.detail);
                    ICanonicalBasis icb = icanonical_basis(m.mod, psi);
                    for (int sign : {1, -1})
                      if (icb.change.component(sign) != dense_fixed_basis(psi, sign, icb.order, m.mod.dim() * m.mod.dim()))
                        r.fail("oracle disagrees on L(" + std::to_string(k) + ")");
                  }
                  return r;
                }});
  const int tmax = std::min(3, n / 2);
  cs.push_back({"icb_tensor", [=] {
                  Env e(d, 2 * tmax + 1);
                  UpsilonExpansion ups = upsilon(*e.f, p, 2 * tmax);
                  ThetaIExpansion ti = theta_i(*e.u, ups, theta(*e.u, 2 * tmax));
                  CheckResult r;
                  for (int a = 0; a <= tmax; ++a)
                    for (int b = 0; b <= tmax; ++b) {
                      BasedModule ma = canonical_basis_rank1(*e.u, a), mb = canonical_basis_rank1(*e.u, b);
                      TensorModule t = tensor(*e.u, ma, mb);
                      AntiLinear psi = psi_i_module(*e.u, ups, t.diamond);
                      const std::string tag = "L(" + std::to_string(a) + ")(x)L(" + std::to_string(b) + ")";
                      if (psi_i_tensor(*e.u, ups, ti, ma, mb, t).m != psi.m) r.fail("Theta^i and Upsilon disagree on " + tag);
                      ICanonicalBasis icb = icanonical_basis(t.diamond.mod, psi);
                      const int dim = t.diamond.mod.dim();
                      for (int sign : {1, -1})
                        if (icb.change.component(sign) != dense_fixed_basis(psi, sign, icb.order, dim))
                          r.fail("oracle disagrees on " + tag);
                    }
                  return r;
                }});
  cs.push_back({"based_submodules", [=] {
                  Env e(d, 4);
                  CheckResult r;
                  for (const auto& ls : std::vector<std::vector<int>>{{1}, {1, 1}, {2, 1}, {1, 1, 1}}) {
                    std::string why;
                    if (!chi_check(*e.u, ls, &why)) r.fail(why);
                  }
                  for (int a = 0; a <= 2; ++a)
                    for (int b = 0; b <= 2; ++b) {
                      std::string why;
                      if (!submodule_check(*e.u, a, b, &why)) r.fail(why);
                    }
                  return r;
                }});
  cs.push_back({"stabilization", [=] {
                  Env e(d, 9);
                  UpsilonExpansion ups = upsilon(*e.f, p, 8);
                  CheckResult r;
                  for (int a = 0; a <= 2; ++a)
                    for (int b = 0; a + b <= 2; ++b) {
                      StabilizationReport rep = stabilization(*e.u, ups, a, b, 1, 1, 4);
                      const std::string tag = "(" + std::to_string(a) + "," + std::to_string(b) + ")";
                      if (!rep.projection_linear) r.fail("projection not well defined for " + tag);
                      if (!rep.stable_from) r.fail("no stabilization for " + tag);
                      for (const auto& st : rep.steps)
                        if (!st.coefficients.empty() && !st.psi_i_invariant) r.fail("not psi_i-invariant: " + tag);
                    }
                  return r;
                }});
  cs.push_back({"psi_i_random", [=] {
                  Env e(d, 5);
                  UpsilonExpansion ups = upsilon(*e.f, p, 4);
                  BasedModule m = canonical_basis_rank1(*e.u, 4);
                  AntiLinear psi = psi_i_module(*e.u, ups, m);
                  Matrix b = act(*e.u, embed_b(*e.u, p, 0), m.mod);
                  std::mt19937_64 rng(seed);
                  std::uniform_int_distribution<int> coeff(-4, 4), qexp(-3, 3), piexp(0, 1);
                  CheckResult r;
                  for (int trial = 0; trial < 5; ++trial) {
                    Vec v(static_cast<size_t>(m.mod.dim()));
                    for (auto& x : v) x = QPiScalar::monomial(coeff(rng), qexp(rng), piexp(rng));
                    if (psi(psi(v)) != v) r.fail("psi_i^2 != 1 on a seeded vector");
                    if (psi(b * v) != b * psi(v)) r.fail("psi_i(B v) != B psi_i(v) on a seeded vector");
                  }
                  return r;
                }});
  return cs;
}

Report cmd_verify(const Loaded& l, const Options& o, const Fmt& f) {
  Report r = header("verify", l, o.height, f);
  r.doc["seed"] = o.seed;
  std::vector<Check> checks = verify_checks(l, o.height, o.seed);
  std::vector<CheckResult> results(checks.size());
  std::vector<std::string> errors(checks.size());
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t k; (k = next++) < checks.size();) {
      try {
        results[k] = checks[k].run();
      } catch (const std::exception& ex) {
        results[k].fail(std::string("exception: ") + ex.what());
      }
    }
  };
  const int workers = std::max(1, std::min<int>(thread_cap(), static_cast<int>(checks.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < workers; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  json a = json::array();
  Table t{"Checks", {"check", "status", "detail"}, {}};
  bool ok = true;
  for (size_t k = 0; k < checks.size(); ++k) {
    ok = ok && results[k].ok;
    a.push_back({{"name", checks[k].name}, {"ok", results[k].ok}, {"detail", results[k].detail}});
    t.rows.push_back({plain(checks[k].name), plain(results[k].ok ? "pass" : "FAIL"), plain(results[k].detail)});
  }
  r.doc["ok"] = ok;
  r.doc["checks"] = a;
  r.tables.push_back(t);
  if (!ok) r.code = kAssertion;
  return r;
}

// ------------------------------------------------------------------ driver

int error_code(const Error& e) {
  const std::string& k = e.kind();
  if (k == "ConsistencyFailure" || k == "TriangularityFailure" || k == "LatticeNotPreserved") return kAssertion;
  return kInvalid;
}

void add_common(CLI::App* c, Options& o) {
  c->add_option("--datum", o.datum, "built-in datum name or path to a JSON descriptor")->capture_default_str();
  c->add_option("--height", o.height, "height bound N")->check(CLI::NonNegativeNumber)->capture_default_str();
  c->add_option("--pi", o.pi, "print the specialization at pi = 1 or pi = -1")->check(CLI::IsMember({1, -1}));
  c->add_option("--varsigma", o.varsigma, "varsigma_i, one value or a comma list (e.g. q^-1)");
  c->add_option("--tau", o.tau, "tau as a comma list of index labels");
  c->add_option("--format", o.format, "json, tex or text")->check(CLI::IsMember({"json", "tex", "text"}))->capture_default_str();
  c->add_option("--out", o.out, "write the result to this file");
  c->add_option("--seed", o.seed, "seed for randomized checks")->capture_default_str();
}

}  // namespace

int thread_cap() {
  if (const char* env = std::getenv("QPI_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<int>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"qpi: quasi-K-matrices and i-canonical bases for quantum covering groups"};
  app.name("qpi");
  app.require_subcommand(1);
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"validate", "check a datum and its parameters"},
      {"upsilon", "print Upsilon to height N"},
      {"theta", "print the quasi-R-matrix Theta to height N"},
      {"theta-i", "print Theta^i to height N"},
      {"idp", "table of i-divided powers up to m = N"},
      {"module", "build L(lambda) and print its basis"},
      {"icb", "i-canonical basis of L(lambda) or L(lambda) (x) L(mu)"},
      {"stabilize", "stabilization table for an i-canonical element"},
      {"verify", "run the invariant suite"}};
  std::map<std::string, CLI::App*> subs;
  for (const auto& [name, help] : commands) {
    CLI::App* c = app.add_subcommand(name, help);
    add_common(c, o);
    subs[name] = c;
  }
  for (const char* name : {"module", "icb", "stabilize"})
    subs[name]->add_option("--lambda", o.lambda, "highest weight as <i, lambda> labels, comma separated");
  for (const char* name : {"icb", "stabilize"}) subs[name]->add_option("--mu", o.mu, "second highest weight");
  subs["stabilize"]->add_option("--b1", o.b1, "label a of E^(a) xi")->check(CLI::NonNegativeNumber);
  subs["stabilize"]->add_option("--b2", o.b2, "label b of F^(b) eta")->check(CLI::NonNegativeNumber);
  subs["stabilize"]->add_option("--steps", o.steps, "number of nu steps")->capture_default_str();

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "qpi: " << e.what() << "\n\n" << app.help();
    return kUsage;
  }
  std::string cmd;
  for (const auto& [name, c] : subs)
    if (c->parsed()) cmd = name;
  o.height_given = subs[cmd]->count("--height") > 0;

  Fmt f{o.pi};
  Report report;
  try {
    Loaded l = load(o);
    if (cmd != "validate") {
      auto v = validate_datum(l.d->cartan(), l.d->root());
      auto pv = validate_params(l.p, *l.d);
      v.insert(v.end(), pv.begin(), pv.end());
      if (!v.empty()) {
        Report bad = cmd_validate(l, o, f);
        bad.doc["command"] = cmd;
        report = bad;
        report.code = kInvalid;
        err << "qpi: datum or parameters are invalid: " << v.front().condition << " " << v.front().message << "\n";
      }
    }
    if (report.doc.empty()) {
      if (cmd == "validate") report = cmd_validate(l, o, f);
      if (cmd == "upsilon") report = cmd_upsilon(l, o, f);
      if (cmd == "theta") report = cmd_theta(l, o, f);
      if (cmd == "theta-i") report = cmd_theta_i(l, o, f);
      if (cmd == "idp") report = cmd_idp(l, o, f);
      if (cmd == "module") report = cmd_module(l, o, f);
      if (cmd == "icb") report = cmd_icb(l, o, f);
      if (cmd == "stabilize") report = cmd_stabilize(l, o, f);
      if (cmd == "verify") report = cmd_verify(l, o, f);
    }
  } catch (const IoError& e) {
    err << "qpi: " << e.what() << "\n";
    return kIo;
  } catch (const Error& e) {
    report = Report{};
    report.doc["command"] = cmd;
    report.doc["status"] = "error";
    report.doc["kind"] = e.kind();
    report.doc["message"] = e.what();
    report.code = error_code(e);
    err << "qpi: " << e.kind() << ": " << e.what() << "\n";
  }
  std::ostringstream buf;
  // Failure reports are machine-readable JSON whatever the format.
  write_report(report, report.code == kOk ? o.format : "json", buf);
  if (o.out.empty()) {
    out << buf.str();
  } else {
    std::ofstream file(o.out, std::ios::binary);
    if (!file || !(file << buf.str()) || !file.flush()) {
      err << "qpi: cannot write '" << o.out << "'\n";
      return kIo;
    }
  }
  return report.code;
}

}  // namespace qcov::cli

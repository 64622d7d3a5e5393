#include "kdvr/cli.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "CLI11.hpp"

#include "kdvr/cohft.hpp"
#include "kdvr/descend.hpp"
#include "kdvr/frobenius.hpp"
#include "kdvr/gelfand_dickey.hpp"
#include "kdvr/moduli.hpp"
#include "kdvr/symbols.hpp"

namespace kdvr {

namespace {

nlohmann::ordered_json diffpoly_to_json(const DiffPolynomial& f) {
  nlohmann::ordered_json terms = nlohmann::ordered_json::array();
  for (const auto& [mono, coeff] : f.core().terms()) {
    nlohmann::ordered_json jm;
    jm["monomial"] = nlohmann::ordered_json::array();
    for (const auto& [v, e] : mono) {
      nlohmann::ordered_json jv;
      jv["m"] = v.m;
      jv["j"] = v.j;
      jv["e"] = e;
      jm["monomial"].push_back(jv);
    }
    if (!coeff.is_lambda_free())
      throw ConsistencyError("cli: lambda-bearing coefficient in reported polynomial");
    jm["coefficient"] = coeff.rational_part().to_string();
    terms.push_back(jm);
  }
  return terms;
}

std::vector<int> parse_int_list(const std::string& csv) {
  std::vector<int> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(std::stoi(item));
  }
  return out;
}

std::vector<std::pair<int, int>> parse_pair_list(const std::string& csv) {
  std::vector<std::pair<int, int>> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    auto colon = item.find(':');
    if (colon == std::string::npos)
      throw ShapeError("expected a:b pairs in '" + csv + "'");
    out.emplace_back(std::stoi(item.substr(0, colon)), std::stoi(item.substr(colon + 1)));
  }
  return out;
}

void emit(std::ostringstream& os, const std::string& format, const nlohmann::ordered_json& j,
          const std::string& text) {
  if (format == "json")
    os << j.dump(2) << "\n";
  else
    os << text;
}

int run_flow(std::ostringstream& os, int r, int n, int m, bool semiclassical,
             const std::string& format) {
  FlowResult flow = semiclassical ? sc_flow(PSymbol::generic_symbol(r), n, m)
                                  : gd_flow(PseudoDiffOp::generic_operator(r), n, m);
  nlohmann::ordered_json j;
  j["r"] = r;
  j["n"] = n;
  j["m"] = m;
  j["kind"] = semiclassical ? "semiclassical" : "dispersive";
  j["k_const"] = flow.k.to_string();
  j["flows"] = nlohmann::ordered_json::array();
  std::ostringstream text;
  text << (semiclassical ? "semiclassical" : "dispersive") << " flow r=" << r << " (n,m)=(" << n
       << "," << m << "), k=" << flow.k.to_string() << "\n";
  for (int k = 0; k <= r - 2; ++k) {
    nlohmann::ordered_json jf;
    jf["k"] = k;
    jf["terms"] = diffpoly_to_json(flow.du_dt[k]);
    j["flows"].push_back(jf);
    text << "  du_" << k << "/dt = " << flow.du_dt[k].to_string() << "\n";
  }
  emit(os, format, j, text.str());
  return 0;
}

int run_root(std::ostringstream& os, int r, int depth, const std::string& format) {
  PseudoDiffOp root = root_r(PseudoDiffOp::generic_operator(r), depth);
  nlohmann::ordered_json j;
  j["r"] = r;
  j["depth"] = depth;
  j["coefficients"] = nlohmann::ordered_json::array();
  std::ostringstream text;
  text << "L^(1/" << r << ") = D + sum w_s D^-s, depth " << depth << "\n";
  for (int s = 1; s <= depth; ++s) {
    DiffPolynomial w = root.coefficient(-s);
    nlohmann::ordered_json jw;
    jw["s"] = s;
    jw["terms"] = diffpoly_to_json(w);
    j["coefficients"].push_back(jw);
    text << "  w_" << s << " = " << w.to_string() << "\n";
  }
  emit(os, format, j, text.str());
  return 0;
}

int run_potential(std::ostringstream& os, int r, const std::string& format) {
  FrobeniusPotential f = lg_potential(r);
  nlohmann::ordered_json j = potential_to_json(f);
  std::ostringstream text;
  text << "A_" << r - 1 << " potential, dim " << f.dim << ", d_conf " << f.d_conf.to_string()
       << "\n  Phi = " << qpoly_to_string(f.phi) << "\n";
  emit(os, format, j, text.str());
  return 0;
}

int run_wdvv(std::ostringstream& os, int r, const std::string& input, const std::string& format) {
  FrobeniusPotential f;
  if (!input.empty()) {
    std::ifstream in(input);
    if (!in) throw ShapeError("cannot open '" + input + "'");
    nlohmann::json j;
    in >> j;
    f = potential_from_json(j);
  } else {
    f = lg_potential(r);
  }
  WdvvReport report = wdvv_check(f);
  const bool id_ok = identity_check(f);
  nlohmann::ordered_json j;
  j["dimension"] = f.dim;
  j["wdvv_ok"] = report.ok();
  j["identity_ok"] = id_ok;
  j["violations"] = nlohmann::ordered_json::array();
  std::ostringstream text;
  text << "wdvv: " << (report.ok() ? "pass" : "FAIL") << ", identity: "
       << (id_ok ? "pass" : "FAIL") << "\n";
  for (const auto& v : report.violations) {
    nlohmann::ordered_json jv;
    jv["quadruple"] = {v.a, v.b, v.c, v.d};
    jv["residual"] = qpoly_to_string(v.residual);
    j["violations"].push_back(jv);
    text << "  (" << v.a << "," << v.b << "," << v.c << "," << v.d
         << "): " << qpoly_to_string(v.residual) << "\n";
  }
  emit(os, format, j, text.str());
  return report.ok() && id_ok ? 0 : 2;
}

int run_strata(std::ostringstream& os, int n, int codim, const std::string& psi_csv,
               const std::vector<std::string>& divisor_blocks, const std::string& format) {
  nlohmann::ordered_json j;
  j["n"] = n;
  std::ostringstream text;
  IntegralTable table;

  if (!psi_csv.empty() || !divisor_blocks.empty()) {
    std::vector<int> psi(n, 0);
    if (!psi_csv.empty()) {
      psi = parse_int_list(psi_csv);
      if (static_cast<int>(psi.size()) != n)
        throw ShapeError("strata: --psi needs exactly n entries");
    }
    std::vector<LabelSet> divisors;
    nlohmann::ordered_json jd = nlohmann::ordered_json::array();
    for (const std::string& blk : divisor_blocks) {
      LabelSet mask = 0;
      for (int lbl : parse_int_list(blk)) {
        if (lbl < 1 || lbl > n) throw ShapeError("strata: divisor label out of range");
        mask |= LabelSet{1} << (lbl - 1);
      }
      BoundaryDivisor d(n, mask);
      divisors.push_back(d.block);
      jd.push_back(d.to_string());
    }
    Rational value = table.mixed_integral(n, psi, divisors);
    j["psi"] = psi;
    j["divisors"] = jd;
    j["integral"] = value.to_string();
    text << "integral on moduli of " << n << "-pointed curves = " << value.to_string() << "\n";
    emit(os, format, j, text.str());
    return 0;
  }

  j["strata"] = nlohmann::ordered_json::array();
  const int lo = codim >= 0 ? codim : 0;
  const int hi = codim >= 0 ? codim : std::max(0, n - 3);
  for (int k = lo; k <= hi; ++k) {
    std::vector<StableTree> trees = enumerate_strata(n, k);
    nlohmann::ordered_json jk;
    jk["codim"] = k;
    jk["count"] = trees.size();
    if (codim >= 0) {
      jk["trees"] = nlohmann::ordered_json::array();
      for (const auto& t : trees) {
        nlohmann::ordered_json jt = nlohmann::ordered_json::array();
        for (LabelSet e : t.edges) jt.push_back(BoundaryDivisor(n, e).to_string());
        jk["trees"].push_back(jt);
      }
    }
    j["strata"].push_back(jk);
    text << "codim " << k << ": " << trees.size() << " strata\n";
    if (codim >= 0)
      for (const auto& t : trees) text << "  " << t.to_string() << "\n";
  }
  emit(os, format, j, text.str());
  return 0;
}

int run_correlator(std::ostringstream& os, int r, const std::string& a_csv,
                   const std::string& insertions, const std::string& format) {
  nlohmann::ordered_json j;
  std::ostringstream text;
  if (r == 0) {
    // Pure psi intersection numbers on the moduli of stable curves.
    std::vector<int> a = parse_int_list(a_csv);
    const int n = static_cast<int>(a.size());
    IntegralTable table;
    Rational value = table.psi_monomial_integral(n, a);
    j["n"] = n;
    j["psi"] = a;
    j["value"] = value.to_string();
    text << "<";
    for (int i = 0; i < n; ++i) text << (i ? " " : "") << "tau_" << a[i];
    text << "> = " << value.to_string() << "\n";
  } else {
    DescMultiset ms = parse_pair_list(insertions);
    const int n = static_cast<int>(ms.size());
    int amax = 0;
    for (const auto& [a, m] : ms) amax = std::max(amax, a);
    CohFT0 primaries = from_potential(lg_potential(r), std::max(3, n));
    DescendantCalculator calc(primaries, r);
    Rational value = calc.correlator(ms);
    j["r"] = r;
    j["insertions"] = nlohmann::ordered_json::array();
    for (const auto& [a, m] : ms) j["insertions"].push_back({a, m});
    j["value"] = value.to_string();
    text << "<";
    for (int i = 0; i < n; ++i)
      text << (i ? " " : "") << "tau_" << ms[i].first << "(e_" << ms[i].second << ")";
    text << "> = " << value.to_string() << "\n";
  }
  emit(os, format, j, text.str());
  return 0;
}

int run_witten(std::ostringstream& os, int r, int a_max, int N, const std::string& flows_csv,
               const std::string& format) {
  std::vector<std::pair<int, int>> flows;
  if (!flows_csv.empty()) {
    flows = parse_pair_list(flows_csv);
  } else {
    flows = {{0, 0}, {1, 0}};
    if (r >= 3) flows.push_back({0, 1});
  }
  WittenReport report = witten_verify(r, a_max, N, flows);
  nlohmann::ordered_json j;
  j["r"] = r;
  j["a_max"] = a_max;
  j["N"] = N;
  j["all_zero"] = report.all_zero();
  j["flows"] = nlohmann::ordered_json::array();
  std::ostringstream text;
  text << "hierarchy check r=" << r << " (a_max=" << a_max << ", N=" << N << ")\n";
  for (const auto& f : report.flows) {
    nlohmann::ordered_json jf;
    jf["n"] = f.n;
    jf["m"] = f.m;
    jf["compare_degree"] = f.compare_degree;
    jf["max_residual"] = f.max_abs_coefficient().to_string();
    jf["zero"] = f.zero;
    j["flows"].push_back(jf);
    text << "  flow (" << f.n << "," << f.m << "): residual "
         << f.max_abs_coefficient().to_string() << (f.zero ? " [ok]" : " [FAIL]") << "\n";
  }
  emit(os, format, j, text.str());
  return report.all_zero() ? 0 : 2;
}

int run_tensor(std::ostringstream& os, int r1, int r2, int n_max, const std::string& format) {
  CohFT0 t1 = from_potential(lg_potential(r1), n_max);
  CohFT0 t2 = from_potential(lg_potential(r2), n_max);
  CupCache cache;
  CohFT0 prod = tensor(t1, t2, n_max, cache);
  FrobeniusPotential pot = potential_of(prod, n_max);
  WdvvReport wdvv = wdvv_check(pot);
  const bool euler_ok = euler_check(pot);

  std::vector<Rational> charges = prod.charges;
  std::sort(charges.begin(), charges.end());

  nlohmann::ordered_json j;
  j["r1"] = r1;
  j["r2"] = r2;
  j["n_max"] = n_max;
  j["rank"] = prod.rank;
  j["charges"] = nlohmann::ordered_json::array();
  for (const auto& q : charges) j["charges"].push_back(q.to_string());
  j["d_conf"] = prod.d_conf.to_string();
  j["wdvv_ok"] = wdvv.ok();
  j["euler_ok"] = euler_ok;
  j["potential"] = potential_to_json(pot);

  std::ostringstream text;
  text << "tensor product of A_" << r1 - 1 << " and A_" << r2 - 1 << " (n <= " << n_max << ")\n";
  text << "  rank " << prod.rank << ", d_conf " << prod.d_conf.to_string() << "\n  charges:";
  for (const auto& q : charges) text << " " << q.to_string();
  text << "\n  wdvv: " << (wdvv.ok() ? "pass" : "FAIL")
       << ", euler: " << (euler_ok ? "pass" : "FAIL") << "\n";
  emit(os, format, j, text.str());
  return wdvv.ok() && euler_ok ? 0 : 2;
}

}  // namespace

CliResult run_cli(const std::vector<std::string>& args) {
  CLI::App app{"Exact Gelfand-Dickey hierarchies, genus-zero moduli intersection calculus, "
               "and tensor products of the associated field theories"};
  app.require_subcommand(1);

  std::string format = "text";
  app.add_option("--format", format, "Output format: text or json")
      ->check(CLI::IsMember({"text", "json"}));
  std::string output_path;
  app.add_option("--output", output_path, "Write the report to a file as well");

  int r = 2, n = 0, m = 0, depth = 4, codim = -1, r1 = 3, r2 = 4, n_max = 6, a_max = -1, N = -1;
  bool semiclassical = false;
  std::string input, psi_csv, a_csv, insertions, flows_csv;
  std::vector<std::string> divisor_blocks;

  CLI::App* flow = app.add_subcommand("flow", "Hierarchy flow du_k/dt^m_n");
  flow->add_option("--r", r, "Order of the operator")->required()->check(CLI::Range(2, 16));
  flow->add_option("--n", n)->check(CLI::NonNegativeNumber);
  flow->add_option("--m", m)->check(CLI::NonNegativeNumber);
  flow->add_flag("--semiclassical", semiclassical, "Dispersionless flow instead of dispersive");

  CLI::App* root = app.add_subcommand("root", "r-th root of the generic operator");
  root->add_option("--r", r)->required()->check(CLI::Range(2, 16));
  root->add_option("--depth", depth, "Coefficients w_1..w_depth")->check(CLI::PositiveNumber);

  CLI::App* potential = app.add_subcommand("potential", "Frobenius potential of A_{r-1}");
  potential->add_option("--r", r)->required()->check(CLI::Range(2, 16));

  CLI::App* wdvv = app.add_subcommand("wdvv", "WDVV / identity verification");
  wdvv->add_option("--r", r)->check(CLI::Range(2, 16));
  wdvv->add_option("--input", input, "Potential JSON file instead of --r");

  CLI::App* strata = app.add_subcommand("strata", "Boundary strata and intersection numbers");
  strata->add_option("--n", n, "Number of marked points")->required()->check(CLI::Range(3, 12));
  strata->add_option("--codim", codim, "Restrict to one codimension");
  strata->add_option("--psi", psi_csv, "psi exponents a_1,..,a_n for an integral");
  strata->add_option("--divisor", divisor_blocks,
                     "Boundary divisor as comma-separated labels (repeatable)");

  CLI::App* correlator = app.add_subcommand("correlator", "psi or descendant correlators");
  correlator->add_option("--a", a_csv, "Pure psi exponents a_1,..,a_n");
  correlator->add_option("--r", r1, "Hierarchy order for descendant correlators");
  correlator->add_option("--insertions", insertions, "Descendant insertions a:m,a:m,...");

  CLI::App* witten = app.add_subcommand("witten-verify",
                                        "Hierarchy equations on the reconstructed potential");
  witten->add_option("--r", r)->required()->check(CLI::Range(2, 6));
  witten->add_option("--amax", a_max, "Descendant level cutoff");
  witten->add_option("--N", N, "Series cutoff");
  witten->add_option("--flows", flows_csv, "Flows n:m,n:m,... (default (0,0),(1,0)[,(0,1)])");

  CLI::App* tensor_cmd = app.add_subcommand("tensor", "Tensor product spectrum report");
  tensor_cmd->add_option("--r1", r1)->required()->check(CLI::Range(2, 16));
  tensor_cmd->add_option("--r2", r2)->required()->check(CLI::Range(2, 16));
  tensor_cmd->add_option("--nmax", n_max)->check(CLI::Range(3, 8));

  std::vector<char*> argv;
  std::vector<std::string> storage = args;
  storage.insert(storage.begin(), "kdvr");
  argv.reserve(storage.size());
  for (auto& s : storage) argv.push_back(s.data());

  CliResult result;
  std::ostringstream os;
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    std::ostringstream out, err;
    int code = app.exit(e, out, err);
    result.output = out.str() + err.str();
    result.exit_code = code == 0 ? 0 : 1;
    return result;
  }

  try {
    if (app.got_subcommand(flow)) {
      result.exit_code = run_flow(os, r, n, m, semiclassical, format);
    } else if (app.got_subcommand(root)) {
      result.exit_code = run_root(os, r, depth, format);
    } else if (app.got_subcommand(potential)) {
      result.exit_code = run_potential(os, r, format);
    } else if (app.got_subcommand(wdvv)) {
      result.exit_code = run_wdvv(os, r, input, format);
    } else if (app.got_subcommand(strata)) {
      result.exit_code = run_strata(os, n, codim, psi_csv, divisor_blocks, format);
    } else if (app.got_subcommand(correlator)) {
      if (a_csv.empty() && insertions.empty())
        throw ShapeError("correlator: provide --a or --r with --insertions");
      result.exit_code = run_correlator(os, insertions.empty() ? 0 : r1, a_csv, insertions, format);
    } else if (app.got_subcommand(witten)) {
      if (a_max < 0) a_max = r == 2 ? 3 : 2;
      if (N < 0) N = r == 2 ? 8 : (r == 3 ? 7 : 6);
      result.exit_code = run_witten(os, r, a_max, N, flows_csv, format);
    } else if (app.got_subcommand(tensor_cmd)) {
      result.exit_code = run_tensor(os, r1, r2, n_max, format);
    }
  } catch (const TruncationError& e) {
    os << "error: " << e.what() << "\n";
    result.exit_code = 1;
  } catch (const ShapeError& e) {
    os << "error: " << e.what() << "\n";
    result.exit_code = 1;
  } catch (const std::exception& e) {
    os << "internal error: " << e.what() << "\n";
    result.exit_code = 1;
  }

  result.output = os.str();
  if (!output_path.empty() && result.exit_code != 1) {
    std::ofstream out(output_path);
    out << result.output;
  }
  return result;
}

}  // namespace kdvr

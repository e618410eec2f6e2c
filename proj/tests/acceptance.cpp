// Acceptance run: one PASS/FAIL line per criterion, tolerances pinned below.
//   acceptance <data-dir> <metriko-cli>

#include "metriko/bench.hpp"
#include "metriko/data.hpp"
#include "test_util.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

using namespace metriko;
using namespace testutil;

namespace {

constexpr std::uint64_t kSeed = 0;

struct Outcome {
  bool pass = true;
  std::string detail;
};

double elapsed_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// ---------------------------------------------------------------- 1

Outcome numerical_core() {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(101);
  Outcome o;
  double worst_gap = 0.0, worst_sqrt = 0.0, worst_tmax = 0.0, worst_ratio = 0.0;

  for (int t = 0; t < 10; ++t) {
    const Eigen::Index d = 2 + static_cast<Eigen::Index>(uniform_index(rng, 4));
    const Matrix a = random_symmetric(rng, d) * 3.0;
    const Matrix p = psd_project(a);
    const double best = (a - p).norm();
    for (int s = 0; s < 1000; ++s) {
      const Matrix cand = random_psd(rng, d, 1 + static_cast<Eigen::Index>(uniform_index(rng, static_cast<std::size_t>(d) + 1)));
      worst_gap = std::max(worst_gap, best - (a - cand).norm());
    }
    // Near misses around the projection itself.
    for (int s = 0; s < 100; ++s) worst_gap = std::max(worst_gap, best - (a - psd_project(p + 1e-3 * random_symmetric(rng, d))).norm());

    const Matrix m = random_psd(rng, d, d + 1);
    const Matrix r = sqrt_psd(m);
    worst_sqrt = std::max(worst_sqrt, (r * r - m).norm() / std::max(1.0, m.norm()));

    const Eigen::Index k = 1 + static_cast<Eigen::Index>(uniform_index(rng, static_cast<std::size_t>(d)));
    const Matrix l = solve_trace_max(a, k);
    Eigen::SelfAdjointEigenSolver<Matrix> es(a);
    const double top = es.eigenvalues().tail(k).sum();
    worst_tmax = std::max(worst_tmax, std::abs((l * a * l.transpose()).trace() - top) / std::max(1.0, std::abs(top)));

    const Matrix b = random_pd(rng, d);
    const Matrix lr = solve_trace_ratio(a, b, k);
    const double opt = trace_ratio_objective(lr, a, b);
    for (int s = 0; s < 1000; ++s)
      worst_ratio = std::max(worst_ratio, (trace_ratio_objective(random_orthonormal_rows(rng, k, d), a, b) - opt) /
                                              std::max(1.0, std::abs(opt)));
  }
  const double secs = elapsed_since(t0);
  o.pass = worst_gap <= 1e-10 && worst_sqrt <= 1e-8 && worst_tmax <= 1e-12 && worst_ratio <= 1e-10 && secs < 30.0;
  o.detail = "projection gap " + fmt("%.2e", worst_gap) + ", sqrt round trip " + fmt("%.2e", worst_sqrt) +
             ", trace max " + fmt("%.2e", worst_tmax) + ", ratio loss " + fmt("%.2e", worst_ratio) + ", " +
             fmt("%.1f", secs) + " s";
  return o;
}

// ---------------------------------------------------------------- 2

double grad_error(const std::function<double(const Matrix&)>& f, const Matrix& analytic, const Matrix& at, bool sym) {
  const Matrix numeric = sym ? numeric_gradient_sym(f, at, 1e-5) : numeric_gradient(f, at, 1e-5);
  return rel_error(analytic, numeric);
}

// True when no hinge of the large-margin loss sits within `margin` of its kink.
bool smooth_branch(const std::vector<int>& y, const NeighborLists& targets, const Matrix& d, double margin) {
  for (std::size_t i = 0; i < y.size(); ++i)
    for (auto j : targets[i])
      for (std::size_t l = 0; l < y.size(); ++l)
        if (y[l] != y[i] && std::abs(1.0 + d(static_cast<Eigen::Index>(i), j) - d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(l))) < margin)
          return false;
  return true;
}

Outcome gradient_oracles() {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(202);
  std::map<std::string, double> worst;
  int lmnn_checked = 0;
  for (int t = 0; t < 20; ++t) {
    const Dataset d = blobs(rng, 4, 2, 3, 1.0, 0.8);  // 8 points
    const Matrix l = random_matrix(rng, 2, 3);
    const Matrix m = random_pd(rng, 3);
    auto note = [&](const std::string& name, double e) { worst[name] = std::max(worst[name], e); };

    const NcaProblem nca{d.x, d.y};
    note("NCA", grad_error([&](const Matrix& a) { return nca.value(a); }, nca.gradient(l), l, false));
    const CentroidSet means = class_means(d.x, d.y);
    const CentroidProblem ncm{d.x, d.y, means};
    note("NCMML", grad_error([&](const Matrix& a) { return ncm.value(a); }, ncm.gradient(l), l, false));
    const CentroidSet ctrd = class_kmeans(d.x, d.y, 2, static_cast<std::uint64_t>(t));
    const CentroidProblem ncmc{d.x, d.y, ctrd};
    note("NCMC", grad_error([&](const Matrix& a) { return ncmc.value(a); }, ncmc.gradient(l), l, false));
    const McmlProblem mcml(d.x, d.y);
    note("MCML", grad_error([&](const Matrix& a) { return mcml.value(a); }, mcml.gradient(m), m, true));
    const LdmlProblem ldml{d.x, d.y, 1.0};
    note("LDML", grad_error([&](const Matrix& a) { return ldml.value(a); }, ldml.gradient(m), m, true));

    const NeighborLists targets = lmnn_targets(d.x, d.y, 2);
    const LmnnLoss loss{d.y, targets, 0.5};
    const LmnnProblemL pl{d.x, loss};
    const LmnnProblemM pm{d.x, loss};
    if (smooth_branch(d.y, targets, pairwise_sq_dists(d.x * l.transpose()), 1e-3) &&
        smooth_branch(d.y, targets, metric_sq_dists(d.x, m), 1e-3)) {
      ++lmnn_checked;
      note("LMNN", grad_error([&](const Matrix& a) { return pl.value(a); }, pl.gradient(l), l, false));
      note("LMNN", grad_error([&](const Matrix& a) { return pm.value(a); }, pm.subgradient(m), m, true));
    }

    const KernelSpec spec = resolve(rbf_kernel(), 3);
    const Matrix gram = kernel_matrix(spec, d.x);
    const NeighborLists kt = klmnn_targets(spec, d.x, gram, d.y, 2);
    const KlmnnProblem kl{gram, {d.y, kt, 0.5}};
    const Matrix a = random_matrix(rng, 2, d.size());
    if (smooth_branch(d.y, kt, pairwise_sq_dists(gram * a.transpose()), 1e-3))
      note("KLMNN", grad_error([&](const Matrix& b) { return kl.value(b); }, kl.gradient(a), a, false));
  }
  const double secs = elapsed_since(t0);
  Outcome o;
  o.pass = secs < 60.0 && lmnn_checked > 0 && worst.count("KLMNN");
  for (const auto& [name, e] : worst) {
    o.pass = o.pass && e <= 1e-4;
    o.detail += name + " " + fmt("%.1e", e) + ", ";
  }
  o.detail += fmt("%.1f", secs) + " s";
  return o;
}

// ---------------------------------------------------------------- 3

double value_gap(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  double g = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) g = std::max(g, std::abs(a[i] - b[i]) / std::max(1.0, std::abs(a[i])));
  return g;
}

Outcome kernel_consistency() {
  Rng rng(303);
  double kda = 0.0, kanmm = 0.0, kdmlmj = 0.0;
  const NeighborhoodSpec nb{3, 3, 3};
  for (int t = 0; t < 5; ++t) {
    const Dataset d = blobs(rng, 10, 3, 4, 1.0);  // 30 points, full column rank
    kda = std::max(kda, value_gap(fit_lda(d, 2).report.values, fit_kda(d, 2, linear_kernel()).report.values));
    kdmlmj = std::max(kdmlmj, value_gap(fit_dmlmj(d, 2, nb).report.values,
                                        fit_kdmlmj(d, 2, nb, linear_kernel()).report.values));
    // Orthonormal columns make Gram-row coordinates an isometric copy of the features.
    Dataset o = d;
    Eigen::HouseholderQR<Matrix> qr(Matrix(d.x.rowwise() - d.x.colwise().mean()));
    o.x = qr.householderQ() * Matrix::Identity(d.size(), d.dim());
    const FitResult lin = fit_anmm(o, d.dim(), nb);
    Eigen::Index pos = 0;
    while (pos < d.dim() && lin.report.values[static_cast<std::size_t>(pos)] > 1e-9) ++pos;
    pos = std::max<Eigen::Index>(pos, 1);
    const std::vector<double> head(lin.report.values.begin(), lin.report.values.begin() + pos);
    kanmm = std::max(kanmm, value_gap(head, fit_kanmm(o, pos, nb, linear_kernel()).report.values));
  }
  Outcome o;
  o.pass = kda <= 1e-5 && kanmm <= 1e-5 && kdmlmj <= 1e-5;
  o.detail = "KDA/LDA " + fmt("%.1e", kda) + ", KANMM/ANMM " + fmt("%.1e", kanmm) + ", KDMLMJ/DMLMJ " +
             fmt("%.1e", kdmlmj);
  return o;
}

// ---------------------------------------------------------------- 4

Outcome divergences() {
  Rng rng(404);
  double jeff = 0.0;
  for (int t = 0; t < 100; ++t) {
    const Eigen::Index d = 1 + static_cast<Eigen::Index>(uniform_index(rng, 5));
    const Matrix a = random_pd(rng, d), b = random_pd(rng, d);
    const Vector z = Vector::Zero(d);
    const double sum = kl_gaussian(z, a, z, b) + kl_gaussian(z, b, z, a);
    jeff = std::max(jeff, std::abs(jeffrey_gaussian_equal_mean(a, b) - sum) / std::max(1.0, sum));
  }

  const Vector m1 = (Vector(2) << 0.3, -0.2).finished(), m2 = (Vector(2) << -0.4, 0.5).finished();
  const Matrix s1 = (Matrix(2, 2) << 1.0, 0.3, 0.3, 0.6).finished();
  const Matrix s2 = (Matrix(2, 2) << 1.5, -0.4, -0.4, 0.9).finished();
  const double exact = kl_gaussian(m1, s1, m2, s2);
  const Eigen::LLT<Matrix> c1(s1), c2(s2);
  const Matrix l1 = c1.matrixL();
  const double logdet1 = 2.0 * std::log(l1.diagonal().prod());
  const double logdet2 = 2.0 * std::log(Matrix(c2.matrixL()).diagonal().prod());
  std::mt19937_64 gen(kSeed);
  std::normal_distribution<double> normal;
  const std::size_t n = 1000000;
  double sum = 0.0, sum2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Vector e = (Vector(2) << normal(gen), normal(gen)).finished();
    const Vector x = m1 + l1 * e;
    const Vector d2 = x - m2;
    const double lp = -0.5 * e.squaredNorm() - 0.5 * logdet1;
    const double lq = -0.5 * d2.dot(c2.solve(d2)) - 0.5 * logdet2;
    const double v = lp - lq;
    sum += v;
    sum2 += v * v;
  }
  const double mean = sum / n;
  const double se = std::sqrt((sum2 / n - mean * mean) / n);
  Outcome o;
  o.pass = jeff <= 1e-8 && std::abs(mean - exact) <= 3.0 * se;
  o.detail = "jeffrey " + fmt("%.1e", jeff) + ", KL " + fmt("%.5f", exact) + " vs Monte Carlo " + fmt("%.5f", mean) +
             " (" + fmt("%.2f", std::abs(mean - exact) / se) + " SE)";
  return o;
}

// ---------------------------------------------------------------- 5 to 7

Dataset load(const std::string& dir, const std::string& name) { return load_csv(dir + "/" + name + ".csv"); }

AlgorithmSpec spec(const std::string& label, const std::string& algo, ClassifierSpec clf, Eigen::Index dim = 0) {
  AlgorithmSpec s{label, algo, {}, clf};
  s.options.seed = kSeed;
  s.options.dim = dim;
  return s;
}

double test_score(const ResultTable& t, std::size_t row, std::size_t col) {
  const auto& c = t.cells[row][col];
  return c.mean ? c.mean->test : std::nan("");
}

bool within(double v, double target, double lo, double hi) { return v >= target - lo && v <= target + hi; }

Outcome knn_track(const std::string& dir) {
  const auto t0 = std::chrono::steady_clock::now();
  RunOptions run;
  run.folds = 10;
  run.seed = kSeed;
  const std::vector<Dataset> ds{load(dir, "iris"), load(dir, "wine"), load(dir, "monk-2"), load(dir, "balance")};
  const ResultTable t = run_experiment(
      ds, {spec("Euclidean", "euclidean", {ClassifierKind::Knn, 3}), spec("NCA", "nca", {ClassifierKind::Knn, 3})}, run);
  const double secs = elapsed_since(t0);
  const double eu = test_score(t, 0, 0), iris = test_score(t, 0, 1), wine = test_score(t, 1, 1),
               monk = test_score(t, 2, 1), bal = test_score(t, 3, 1);
  Outcome o;
  o.pass = within(eu, 0.9533, 0.04, 0.04) && within(iris, 0.9666, 0.04, 0.04) && within(wine, 0.9882, 0.04, 0.04) &&
           within(monk, 1.0, 0.02, 0.0) && within(bal, 0.9584, 0.05, 0.05) && secs < 600.0;
  o.detail = "iris Euclidean " + fmt("%.4f", eu) + ", NCA iris " + fmt("%.4f", iris) + " wine " + fmt("%.4f", wine) +
             " monk-2 " + fmt("%.4f", monk) + " balance " + fmt("%.4f", bal) + ", " + fmt("%.0f", secs) + " s";
  return o;
}

Outcome ncm_track(const std::string& dir) {
  RunOptions run;
  run.folds = 10;
  run.seed = kSeed;
  std::vector<Dataset> ds;
  for (const char* n : {"iris", "wine", "balance", "sonar", "glass"}) ds.push_back(load(dir, n));
  const ResultTable t = run_experiment(
      ds, {spec("Euclidean + NCM", "euclidean", {ClassifierKind::Ncm, 1}), spec("NCMML", "ncmml", {ClassifierKind::Ncm, 1})},
      run);
  int wins = 0;
  std::string per;
  for (std::size_t r = 0; r < ds.size(); ++r) {
    const double e = test_score(t, r, 0), l = test_score(t, r, 1);
    wins += l > e;
    per += " " + ds[r].name + " " + fmt("%.4f", l) + "/" + fmt("%.4f", e);
  }
  const double iris = test_score(t, 0, 1), wine = test_score(t, 1, 1);
  Outcome o;
  o.pass = within(iris, 0.96, 0.05, 0.05) && within(wine, 0.9663, 0.05, 0.05) && wins >= 4;  // 70% of 5
  o.detail = "NCMML/Euclidean NCM" + per + ", wins " + std::to_string(wins) + "/5";
  return o;
}

Outcome dim_trend(const std::string& dir) {
  RunOptions run;
  run.folds = 10;
  run.seed = kSeed;
  const Dataset sonar = load(dir, "sonar");
  double gap = 0.0;
  std::string per;
  for (Eigen::Index dim : {5, 10}) {
    const ResultTable t = run_experiment({sonar},
                                         {spec("PCA", "pca", {ClassifierKind::Knn, 3}, dim),
                                          spec("NCA", "nca", {ClassifierKind::Knn, 3}, dim)},
                                         run);
    const double pca = test_score(t, 0, 0), nca = test_score(t, 0, 1);
    gap += (nca - pca) / 2.0;
    per += " dim " + std::to_string(dim) + " NCA " + fmt("%.4f", nca) + " PCA " + fmt("%.4f", pca) + ";";
  }
  Outcome o;
  o.pass = gap >= 0.03;
  o.detail = "sonar 3-NN" + per + " mean NCA minus PCA " + fmt("%+.4f", gap) + " (needs >= 0.03)";
  return o;
}

// ---------------------------------------------------------------- 8

std::string slurp(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

Outcome determinism(const std::string& dir, const std::string& cli) {
  const auto root = std::filesystem::temp_directory_path() / "metriko_acceptance";
  std::filesystem::remove_all(root);
  std::vector<std::string> csv;
  for (const char* run : {"a", "b"}) {
    const auto out = root / run;
    const std::string cmd = cli + " bench --experiment basic --data-dir " + dir +
                            " --datasets iris,wine --folds 3 --knn 3 --seed 7 --out-dir " + out.string() +
                            " >/dev/null 2>&1";
    if (std::system(cmd.c_str()) != 0) return {false, "bench run failed"};
    csv.push_back(slurp(out / "basic_3nn.csv"));
  }
  Outcome o;
  o.pass = !csv[0].empty() && csv[0] == csv[1];
  o.detail = std::to_string(csv[0].size()) + " bytes, " + (o.pass ? "identical" : "different");
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) {
    std::cerr << "usage: acceptance <data-dir> <metriko-cli>\n";
    return 2;
  }
  const std::string dir = argv[1], cli = argv[2];
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"numerical core properties", numerical_core},
      {"gradient oracles", gradient_oracles},
      {"linear kernel consistency", kernel_consistency},
      {"divergence identities", divergences},
      {"3-NN accuracy on iris, wine, monk-2, balance", [&] { return knn_track(dir); }},
      {"NCM track", [&] { return ncm_track(dir); }},
      {"dimensionality trend on sonar", [&] { return dim_trend(dir); }},
      {"benchmark determinism", [&] { return determinism(dir, cli); }},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << i + 1 << " " << criteria[i].first << ": " << o.detail
              << std::endl;
  }
  return failed ? 1 : 0;
}

// metriko: fit, transform, predict and bench from the command line.
// Exit codes: 0 success, 1 runtime failure, 2 bad usage.

#include "metriko/bench.hpp"
#include "metriko/data.hpp"
#include "metriko/learners.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace metriko;

namespace {

std::uint64_t default_seed() {
  if (const char* s = std::getenv("METRIKO_SEED")) {
    try {
      return std::stoull(s);
    } catch (...) {
      std::cerr << "warning: ignoring unparsable METRIKO_SEED '" << s << "'\n";
    }
  }
  return 0;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw Error(ErrorKind::IoError, "cannot write '" + path + "'");
  return os;
}

void print_report(std::ostream& os, const FitReport& r) {
  os << "iterations: " << r.iterations << "\nconverged: " << (r.converged ? "yes" : "no")
     << "\nobjective: " << r.final_objective << "\nelapsed: " << r.elapsed << " s\n";
  if (!r.values.empty()) {
    os << "values:";
    for (double v : r.values) os << ' ' << v;
    os << '\n';
  }
}

void write_dataset_csv(std::ostream& os, const Matrix& z, const Dataset& d) {
  for (Eigen::Index j = 0; j < z.cols(); ++j) os << (j ? "," : "") << 'z' << j + 1;
  os << ",label\n" << std::setprecision(17);
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    for (Eigen::Index j = 0; j < z.cols(); ++j) os << (j ? "," : "") << z(i, j);
    const int y = d.y[static_cast<std::size_t>(i)];
    os << ',' << (static_cast<std::size_t>(y) < d.class_names.size() ? d.class_names[static_cast<std::size_t>(y)] : std::to_string(y))
       << '\n';
  }
}

// Test labels are re-mapped onto the training label ids by class name.
std::vector<int> align_labels(const Dataset& train, const Dataset& test) {
  std::vector<int> out;
  for (int y : test.y) {
    const std::string& name = test.class_names.at(static_cast<std::size_t>(y));
    auto it = std::find(train.class_names.begin(), train.class_names.end(), name);
    out.push_back(it == train.class_names.end() ? -1 : static_cast<int>(it - train.class_names.begin()));
  }
  return out;
}

nlohmann::json report_json(const FitReport& r) {
  return {{"iterations", r.iterations}, {"converged", r.converged},          {"elapsed", r.elapsed},
          {"final_objective", r.final_objective}, {"objective_trace", r.objective_trace}, {"values", r.values},
          {"warnings", r.warnings}};
}

nlohmann::json table_json(const ResultTable& t) {
  nlohmann::json j{{"title", t.title}, {"row_header", t.row_header}, {"rows", t.rows}, {"columns", t.columns}};
  nlohmann::json cells = nlohmann::json::array();
  for (std::size_t i = 0; i < t.rows.size(); ++i)
    for (std::size_t c = 0; c < t.columns.size(); ++c) {
      const Cell& cell = t.cells[i][c];
      nlohmann::json e{{"row", t.rows[i]}, {"column", t.columns[c]}};
      if (cell.mean) {
        e["train"] = cell.mean->train;
        e["test"] = cell.mean->test;
      } else {
        e["error"] = cell.error;
      }
      nlohmann::json reps = nlohmann::json::array();
      for (const auto& r : cell.reports) reps.push_back(report_json(r));
      e["reports"] = reps;
      cells.push_back(e);
    }
  j["cells"] = cells;
  return j;
}

std::vector<Dataset> load_dir(const std::string& dir, const std::vector<std::string>& names) {
  require(fs::is_directory(dir), ErrorKind::IoError, "no such directory '" + dir + "'");
  std::vector<Dataset> out;
  if (!names.empty()) {
    for (const auto& n : names) out.push_back(load_csv((fs::path(dir) / (n + ".csv")).string()));
    return out;
  }
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".csv") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  require(!files.empty(), ErrorKind::IoError, "no .csv files in '" + dir + "'");
  for (const auto& f : files) out.push_back(load_csv(f.string()));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"metriko: Mahalanobis distance metric learning"};
  app.require_subcommand(1);
  const std::uint64_t env_seed = default_seed();

  // fit
  auto* fit = app.add_subcommand("fit", "learn a metric or kernel model");
  std::string algo, data_path, out_path;
  Eigen::Index dim = 0;
  std::size_t k = 3, centroids = 2;
  std::string kernel = "linear";
  std::uint64_t seed = env_seed;
  fit->add_option("--algo", algo, "algorithm")->required()->check(CLI::IsMember(algorithm_names()));
  fit->add_option("--data", data_path, "training CSV (label in the last column)")->required();
  fit->add_option("--dim", dim, "output dimension (default: the learner's maximum)")->check(CLI::PositiveNumber);
  fit->add_option("--k", k, "neighbor count")->check(CLI::Range(1, 1000000));
  fit->add_option("--centroids", centroids, "NCMC centroids per class")->check(CLI::Range(1, 1000000));
  fit->add_option("--kernel", kernel, "linear, poly-D[:c], rbf[:g], laplacian[:g]");
  fit->add_option("--seed", seed, "random seed (default: METRIKO_SEED or 0)");
  fit->add_option("--out", out_path, "model file")->required();

  // transform
  auto* tr = app.add_subcommand("transform", "map data through a fitted model");
  std::string model_path, tr_out;
  tr->add_option("--model", model_path, "model file")->required();
  tr->add_option("--data", data_path, "CSV to transform")->required();
  tr->add_option("--out", tr_out, "output CSV (default: standard output)");

  // predict
  auto* pr = app.add_subcommand("predict", "classify with a fitted model");
  std::string train_path, classifier = "knn:3", pr_out;
  pr->add_option("--model", model_path, "model file")->required();
  pr->add_option("--train", train_path, "training CSV the classifier draws on")->required();
  pr->add_option("--data", data_path, "CSV to classify")->required();
  pr->add_option("--classifier", classifier, "knn:K, ncm, ncmc:C or energy (LMNN energy rule)");
  pr->add_option("--seed", seed, "seed for centroid k-means");
  pr->add_option("--out", pr_out, "predicted labels, one per line");

  // bench
  auto* bench = app.add_subcommand("bench", "cross-validated benchmark campaign");
  BenchConfig bc;
  std::string data_dir, out_dir = ".";
  std::vector<std::string> dataset_names;
  std::vector<std::size_t> knn;
  bool json = false;
  bench->add_option("--experiment", bc.experiment, "basic, ncm, kernel or dim")
      ->required()
      ->check(CLI::IsMember(bench_experiments()));
  bench->add_option("--data-dir", data_dir, "directory of CSV datasets")->required();
  bench->add_option("--datasets", dataset_names, "dataset names (file stems); default: every CSV")->delimiter(',');
  bench->add_option("--folds", bc.run.folds, "cross-validation folds")->check(CLI::Range(2, 1000000));
  bench->add_option("--knn", knn, "k-NN sizes (default 3,5,7; kernel: 3)")->delimiter(',')->check(CLI::Range(1, 1000000));
  bench->add_option("--centroids", bc.centroids, "NCMC centroids per class")->delimiter(',')->check(CLI::Range(1, 1000000));
  bench->add_option("--kernels", bc.kernels, "kernel list")->delimiter(',');
  bench->add_option("--dims", bc.dims, "dimensions; 'max' and 'r-1' allowed")->delimiter(',');
  bench->add_option("--seed", bc.run.seed, "random seed (default: METRIKO_SEED or 0)");
  bench->add_option("--jobs", bc.run.jobs, "worker threads")->check(CLI::Range(1, 1024));
  bench->add_flag("--normalize-global", bc.run.normalize_global, "min-max normalize whole datasets before splitting");
  bench->add_flag("--json", json, "also write JSON with every fit report");
  bench->add_option("--out-dir", out_dir, "output directory");
  bc.run.seed = env_seed;

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    if (code == 0) return 0;
    const auto parsed = app.get_subcommands();
    std::cerr << '\n' << (parsed.empty() ? app.help() : parsed.front()->help());
    return 2;
  }

  try {
    if (*fit) {
      LearnerOptions opt;
      opt.dim = dim;
      opt.k = k;
      opt.centroids = centroids;
      opt.kernel = parse_kernel(kernel);
      opt.seed = seed;
      const Dataset data = load_csv(data_path);
      const Model model = fit_model(algo, data, opt);
      for (const auto& w : model.report.warnings) std::cerr << "warning: " << w << '\n';
      auto os = open_out(out_path);
      save_model(os, model);
      std::cout << "algorithm: " << algo << "\nsamples: " << data.size() << "\ninput dim: " << data.dim() << '\n';
      print_report(std::cout, model.report);
      if (algo == "pca") std::cout << "(values are the explained variances)\n";
      std::cout << "model written to " << out_path << '\n';
    } else if (*tr) {
      std::ifstream is(model_path);
      require(static_cast<bool>(is), ErrorKind::IoError, "cannot read '" + model_path + "'");
      const Model model = load_model(is);
      const Dataset data = load_csv(data_path);
      const Matrix z = model.transform(data.x);
      if (tr_out.empty()) {
        write_dataset_csv(std::cout, z, data);
      } else {
        auto os = open_out(tr_out);
        write_dataset_csv(os, z, data);
      }
    } else if (*pr) {
      std::ifstream is(model_path);
      require(static_cast<bool>(is), ErrorKind::IoError, "cannot read '" + model_path + "'");
      const Model model = load_model(is);
      const Dataset train = load_csv(train_path);
      const Dataset test = load_csv(data_path);
      std::vector<int> pred;
      if (classifier == "energy") {
        const Metric* m = std::get_if<Metric>(&model.map);
        require(m != nullptr, ErrorKind::BadArgument, "the energy rule needs a linear metric model");
        LmnnConfig cfg;
        for (Eigen::Index i = 0; i < test.size(); ++i)
          pred.push_back(lmnn_energy_predict(train, *m, cfg, test.x.row(i).transpose()));
      } else {
        ClassifierSpec spec;
        try {
          spec = parse_classifier(classifier);
        } catch (const Error& e) {
          std::cerr << e.what() << '\n';
          return 2;
        }
        const Matrix zt = model.transform(train.x), zs = model.transform(test.x);
        if (spec.kind == ClassifierKind::Knn) {
          pred = knn_predict_batch(zt, train.y, spec.k, zs);
        } else {
          CentroidSet c;
          if (spec.kind == ClassifierKind::Ncm)
            c = class_means(zt, train.y);
          else if (model.centroids)
            c = {model.transform(model.centroids->centroids), model.centroids->labels};
          else
            c = class_kmeans(zt, train.y, spec.k, seed);
          pred = nearest_centroid_batch(c, zs);
        }
      }
      std::ostringstream lines;
      for (int p : pred) lines << train.class_names.at(static_cast<std::size_t>(p)) << '\n';
      if (pr_out.empty()) {
        std::cout << lines.str();
      } else {
        auto os = open_out(pr_out);
        os << lines.str();
      }
      const auto truth = align_labels(train, test);
      std::cerr << "accuracy: " << accuracy(truth, pred) << '\n';
    } else if (*bench) {
      if (!knn.empty())
        bc.knn = knn;
      else if (bc.experiment == "kernel")
        bc.knn = {3};
      bc.datasets = load_dir(data_dir, dataset_names);
      std::vector<std::string> warnings;
      bc.run.warnings = &warnings;
      const auto outputs = run_bench(bc);
      for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
      fs::create_directories(out_dir);
      for (const auto& o : outputs) {
        const fs::path base = fs::path(out_dir) / o.name;
        {
          auto os = open_out(base.string() + ".csv");
          write_csv(os, o.table, o.summary);
        }
        {
          auto os = open_out(base.string() + ".txt");
          write_pretty(os, o.table, o.summary);
        }
        if (json) {
          auto os = open_out(base.string() + ".json");
          os << table_json(o.table).dump(2) << '\n';
        }
        write_pretty(std::cout, o.table, o.summary);
        std::cout << '\n';
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

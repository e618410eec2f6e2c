// Minimal library tour: load a dataset, learn NCA, score 3-NN before and after.
//   quickstart [path/to/iris.csv]

#include "metriko/classify.hpp"
#include "metriko/data.hpp"
#include "metriko/dml_gradient.hpp"

#include <iostream>

int main(int argc, char** argv) {
  using namespace metriko;
  try {
    const Dataset data = load_csv(argc > 1 ? argv[1] : "data/iris.csv");
    const auto splits = stratified_kfold(data, 5, 42);
    const Split& s = splits.front();
    const NormalizedSets ns = minmax_normalize(subset(data, s.train), {subset(data, s.test)});
    const Dataset& train = ns.train;
    const Dataset& test = ns.others.front();

    const FitResult nca = fit_nca(train, train.dim());
    std::cout << "NCA: " << nca.report.iterations << " iterations, objective " << nca.report.final_objective << '\n';

    auto score = [&](const Metric& m) {
      return accuracy(test.y, knn_predict_batch(m.transform(train.x), train.y, 3, m.transform(test.x)));
    };
    std::cout << "3-NN Euclidean: " << score(Metric::identity(train.dim())) << '\n';
    std::cout << "3-NN NCA:       " << score(nca.metric) << '\n';
    std::cout << "learned map:\n" << to_text(nca.metric);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

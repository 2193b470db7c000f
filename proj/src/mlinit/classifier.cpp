#include "mlbisim/mlinit/classifier.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "mlbisim/core/errors.h"
#include "parallel.h"

namespace mlbisim::mlinit {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::vector<double> scale(std::span<const std::int64_t> x, const std::vector<std::int64_t>& lo,
                          const std::vector<std::int64_t>& hi) {
    std::vector<double> out(x.size() + 1);
    for (std::size_t j = 0; j < x.size(); ++j) {
        out[j] = hi[j] > lo[j] ? static_cast<double>(x[j] - lo[j]) / static_cast<double>(hi[j] - lo[j]) : 0.0;
    }
    out.back() = 1.0;
    return out;
}

double dot(const std::vector<double>& w, const std::vector<double>& x) {
    double sum = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j) sum += w[j] * x[j];
    return sum;
}

std::size_t argmax_class(const std::vector<std::vector<double>>& weights, const std::vector<double>& x) {
    std::size_t best = 0;
    double best_score = dot(weights[0], x);
    for (std::size_t k = 1; k < weights.size(); ++k) {
        double score = dot(weights[k], x);
        if (score > best_score) {
            best = k;
            best_score = score;
        }
    }
    return best;
}

}  // namespace

std::uint64_t subclass_seed(std::uint64_t seed, const Projection& key) {
    std::uint64_t h = splitmix64(seed);
    for (auto v : key) h = splitmix64(h ^ static_cast<std::uint64_t>(v));
    return h;
}

LinearSvmClassifier LinearSvmClassifier::train(const std::vector<std::vector<std::int64_t>>& x,
                                               const std::vector<SuperblockId>& y, std::uint64_t seed,
                                               const SvmOptions& options) {
    if (x.empty() || x.size() != y.size()) throw UsageError("training data must be non-empty with one label per row");
    if (!(options.c > 0)) throw UsageError("regularisation constant must be positive");
    const std::size_t n = x.size();
    const std::size_t d = x[0].size();

    Data data;
    data.seed = seed;
    data.classes = y;
    std::sort(data.classes.begin(), data.classes.end());
    data.classes.erase(std::unique(data.classes.begin(), data.classes.end()), data.classes.end());
    if (data.classes.size() < 2) throw UsageError("linear classifier needs at least two classes");
    data.feature_min = x[0];
    data.feature_max = x[0];
    for (const auto& row : x) {
        if (row.size() != d) throw UsageError("training rows differ in length");
        for (std::size_t j = 0; j < d; ++j) {
            data.feature_min[j] = std::min(data.feature_min[j], row[j]);
            data.feature_max[j] = std::max(data.feature_max[j], row[j]);
        }
    }

    std::vector<std::vector<double>> scaled;
    scaled.reserve(n);
    for (const auto& row : x) scaled.push_back(scale(row, data.feature_min, data.feature_max));
    std::vector<std::size_t> label(n);
    for (std::size_t i = 0; i < n; ++i) {
        label[i] = static_cast<std::size_t>(std::lower_bound(data.classes.begin(), data.classes.end(), y[i]) -
                                            data.classes.begin());
    }

    const std::size_t k = data.classes.size();
    const double lambda = 1.0 / (options.c * static_cast<double>(n));
    const double radius = 1.0 / std::sqrt(lambda);
    std::vector<std::vector<double>> w(k, std::vector<double>(d + 1, 0.0));
    data.weights = w;
    data.accuracy = -1.0;

    std::mt19937_64 rng(seed);
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::size_t step = 0;
    for (std::size_t epoch = 0; epoch < options.max_epochs; ++epoch) {
        for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng() % i]);
        for (std::size_t idx : order) {
            ++step;
            const double eta = 1.0 / (lambda * static_cast<double>(step));
            const auto& xi = scaled[idx];
            for (std::size_t c = 0; c < k; ++c) {
                const double target = label[idx] == c ? 1.0 : -1.0;
                const bool violated = target * dot(w[c], xi) < 1.0;
                const double shrink = 1.0 - eta * lambda;
                double norm2 = 0.0;
                for (std::size_t j = 0; j <= d; ++j) {
                    w[c][j] = shrink * w[c][j] + (violated ? eta * target * xi[j] : 0.0);
                    norm2 += w[c][j] * w[c][j];
                }
                if (norm2 > radius * radius) {
                    const double f = radius / std::sqrt(norm2);
                    for (auto& v : w[c]) v *= f;
                }
            }
        }
        std::size_t correct = 0;
        for (std::size_t i = 0; i < n; ++i) correct += argmax_class(w, scaled[i]) == label[i];
        const double accuracy = static_cast<double>(correct) / static_cast<double>(n);
        data.epochs = epoch + 1;
        if (accuracy > data.accuracy) {
            data.accuracy = accuracy;
            data.weights = w;
        }
        if (correct == n) break;
    }
    return LinearSvmClassifier(std::move(data));
}

SuperblockId LinearSvmClassifier::predict(std::span<const std::int64_t> features) const {
    if (features.size() != data_.feature_min.size()) throw UsageError("feature vector has the wrong length");
    return data_.classes[argmax_class(data_.weights, scale(features, data_.feature_min, data_.feature_max))];
}

ClassifierModel::ClassifierModel(std::vector<SubclassModel> subclasses) : subclasses_(std::move(subclasses)) {
    std::sort(subclasses_.begin(), subclasses_.end(), [](const auto& a, const auto& b) { return a.key < b.key; });
}

const SubclassModel* ClassifierModel::find(const Projection& key) const {
    auto it = std::lower_bound(subclasses_.begin(), subclasses_.end(), key,
                               [](const SubclassModel& m, const Projection& k) { return m.key < k; });
    return it != subclasses_.end() && it->key == key ? &*it : nullptr;
}

SuperblockId ClassifierModel::predict(const Projection& key, std::span<const std::int64_t> features) const {
    if (feature_count_ != 0 && features.size() != feature_count_) {
        throw UsageError("state has " + std::to_string(features.size()) + " features, model expects " +
                         std::to_string(feature_count_));
    }
    const SubclassModel* sub = find(key);
    return sub ? sub->classifier->predict(features) : kSingular;
}

ClassifierModel train_classifiers(const std::vector<TrainingRow>& rows, std::uint64_t seed, const SvmOptions& options,
                                  unsigned threads) {
    std::map<Projection, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < rows.size(); ++i) groups[rows[i].key].push_back(i);
    std::vector<const std::pair<const Projection, std::vector<std::size_t>>*> work;
    for (const auto& g : groups) work.push_back(&g);

    std::vector<SubclassModel> models(work.size());
    detail::parallel_for(work.size(), threads, [&](std::size_t w) {
        const auto& [key, members] = *work[w];
        SubclassModel model{key, members.size(), nullptr};
        std::vector<std::vector<std::int64_t>> x;
        std::vector<SuperblockId> y;
        for (auto i : members) {
            x.push_back(rows[i].features);
            y.push_back(rows[i].label);
        }
        if (std::all_of(y.begin(), y.end(), [&](SuperblockId v) { return v == y.front(); })) {
            model.classifier = std::make_shared<ConstantClassifier>(y.front());
        } else {
            model.classifier =
                std::make_shared<LinearSvmClassifier>(LinearSvmClassifier::train(x, y, subclass_seed(seed, key), options));
        }
        models[w] = std::move(model);
    });
    ClassifierModel out(std::move(models));
    if (!rows.empty()) out.set_feature_count(rows.front().features.size());
    return out;
}

}  // namespace mlbisim::mlinit

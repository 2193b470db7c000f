#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "mlbisim/mlinit/superblocks.h"

namespace mlbisim::mlinit {

/// Predicts the superblock of a state of one subclass from its features.
class Classifier {
public:
    virtual ~Classifier() = default;
    virtual std::string kind() const = 0;
    virtual SuperblockId predict(std::span<const std::int64_t> features) const = 0;
    virtual double training_accuracy() const = 0;
};

/// Every state of the subclass carried the same superblock during training.
class ConstantClassifier : public Classifier {
public:
    explicit ConstantClassifier(SuperblockId value) : value_(value) {}
    std::string kind() const override { return "constant"; }
    SuperblockId predict(std::span<const std::int64_t>) const override { return value_; }
    double training_accuracy() const override { return 1.0; }
    SuperblockId value() const { return value_; }

private:
    SuperblockId value_;
};

struct SvmOptions {
    double c = 1.0;
    std::size_t max_epochs = 10'000;
};

/// One-vs-rest linear maximum-margin classifier trained with stochastic
/// subgradient descent on the regularised hinge loss. Features are scaled to
/// [0,1] by the per-feature minimum and maximum seen in training and a
/// constant bias feature is appended.
class LinearSvmClassifier : public Classifier {
public:
    struct Data {
        std::vector<SuperblockId> classes;          ///< increasing
        std::vector<std::int64_t> feature_min;
        std::vector<std::int64_t> feature_max;
        std::vector<std::vector<double>> weights;   ///< per class, features then bias
        std::uint64_t seed = 0;
        std::size_t epochs = 0;                     ///< epochs run
        double accuracy = 0.0;                      ///< training accuracy of the kept weights
    };

    explicit LinearSvmClassifier(Data data) : data_(std::move(data)) {}

    /// Trains on rows `x` with labels `y` (at least two distinct labels).
    /// Training stops once every row is classified correctly or after
    /// options.max_epochs epochs; the weights of the most accurate epoch are
    /// kept. Bitwise reproducible for a given seed.
    static LinearSvmClassifier train(const std::vector<std::vector<std::int64_t>>& x,
                                     const std::vector<SuperblockId>& y, std::uint64_t seed,
                                     const SvmOptions& options = {});

    std::string kind() const override { return "linear_svm"; }
    SuperblockId predict(std::span<const std::int64_t> features) const override;
    double training_accuracy() const override { return data_.accuracy; }
    const Data& data() const { return data_; }

private:
    Data data_;
};

/// Classifier of one subclass, identified by its projection.
struct SubclassModel {
    Projection key;
    std::size_t n_train = 0;
    std::shared_ptr<const Classifier> classifier;
};

/// Per-subclass classifiers, sorted by key.
class ClassifierModel {
public:
    ClassifierModel() = default;
    explicit ClassifierModel(std::vector<SubclassModel> subclasses);

    const std::vector<SubclassModel>& subclasses() const { return subclasses_; }
    const SubclassModel* find(const Projection& key) const;

    /// Superblock of a state; states of subclasses unseen in training get the
    /// singular superblock. Throws UsageError on a feature-length mismatch.
    SuperblockId predict(const Projection& key, std::span<const std::int64_t> features) const;

    std::size_t feature_count() const { return feature_count_; }
    void set_feature_count(std::size_t n) { feature_count_ = n; }

private:
    std::vector<SubclassModel> subclasses_;
    std::size_t feature_count_ = 0;
};

struct TrainingRow {
    Projection key;
    std::vector<std::int64_t> features;
    SuperblockId label;
};

/// Groups rows by subclass key and trains one classifier per subclass, using
/// a constant classifier when the subclass has a single label. Subclasses are
/// trained on up to `threads` threads; the result does not depend on it.
ClassifierModel train_classifiers(const std::vector<TrainingRow>& rows, std::uint64_t seed,
                                  const SvmOptions& options = {}, unsigned threads = 1);

/// Seed of the trainer for one subclass.
std::uint64_t subclass_seed(std::uint64_t seed, const Projection& key);

}  // namespace mlbisim::mlinit

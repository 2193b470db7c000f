#include "mlbisim/mlinit/model.h"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "mlbisim/core/errors.h"

namespace mlbisim::mlinit {

using nlohmann::json;

namespace {

json classifier_to_json(const Classifier& c) {
    json j;
    j["kind"] = c.kind();
    if (const auto* constant = dynamic_cast<const ConstantClassifier*>(&c)) {
        j["value"] = constant->value();
    } else if (const auto* svm = dynamic_cast<const LinearSvmClassifier*>(&c)) {
        const auto& d = svm->data();
        j["classes"] = d.classes;
        j["feature_min"] = d.feature_min;
        j["feature_max"] = d.feature_max;
        j["weights"] = d.weights;
        j["seed"] = d.seed;
        j["epochs"] = d.epochs;
        j["accuracy"] = d.accuracy;
    } else {
        throw UsageError("cannot serialise classifier of kind " + c.kind());
    }
    return j;
}

std::shared_ptr<const Classifier> classifier_from_json(const json& j) {
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "constant") return std::make_shared<ConstantClassifier>(j.at("value").get<SuperblockId>());
    if (kind == "linear_svm") {
        LinearSvmClassifier::Data d;
        j.at("classes").get_to(d.classes);
        j.at("feature_min").get_to(d.feature_min);
        j.at("feature_max").get_to(d.feature_max);
        j.at("weights").get_to(d.weights);
        j.at("seed").get_to(d.seed);
        j.at("epochs").get_to(d.epochs);
        j.at("accuracy").get_to(d.accuracy);
        if (d.classes.size() < 2 || d.weights.size() != d.classes.size() ||
            d.feature_min.size() != d.feature_max.size()) {
            throw ParseError("model file: inconsistent linear classifier");
        }
        for (const auto& w : d.weights) {
            if (w.size() != d.feature_min.size() + 1) throw ParseError("model file: inconsistent linear classifier");
        }
        return std::make_shared<LinearSvmClassifier>(std::move(d));
    }
    throw ParseError("model file: unknown classifier kind '" + kind + "'");
}

}  // namespace

void SuperblockModel::check_compatible(const Mdp& m) const {
    const auto& vars = m.variables();
    bool ok = vars.size() == variables.size();
    for (std::size_t v = 0; ok && v < vars.size(); ++v) {
        ok = vars[v].name == variables[v] && vars[v].parametric == parametric[v];
    }
    if (!ok) throw UsageError("model was trained on a program with different variables");
}

std::string model_to_text(const SuperblockModel& model) {
    json j;
    j["format"] = "mlbisim-superblock-model";
    j["version"] = SuperblockModel::kVersion;
    j["parameter"] = model.parameter;
    j["variables"] = model.variables;
    j["parametric"] = model.parametric;
    j["sample_parameters"] = model.sample_parameters;
    j["seed"] = model.seed;
    j["svm"] = {{"c", model.svm.c}, {"max_epochs", model.svm.max_epochs}};
    j["superblocks"] = model.superblocks;
    j["feature_count"] = model.classifier.feature_count();
    json subclasses = json::array();
    for (const auto& sub : model.classifier.subclasses()) {
        subclasses.push_back({{"key", sub.key}, {"n_train", sub.n_train}, {"classifier", classifier_to_json(*sub.classifier)}});
    }
    j["subclasses"] = std::move(subclasses);
    json patterns = json::array();
    for (const auto& p : model.patterns) {
        json relations = json::array();
        for (const auto& r : p.relations) {
            relations.push_back({{"projection", r.projection},
                                 {"coefficients", r.coefficients},
                                 {"alpha", r.alpha.to_string()},
                                 {"beta", r.beta.to_string()}});
        }
        patterns.push_back({{"superblock", p.superblock},
                            {"pattern_free", p.pattern_free},
                            {"reason", p.reason},
                            {"relations", std::move(relations)}});
    }
    j["patterns"] = std::move(patterns);
    return j.dump(1) + "\n";
}

SuperblockModel model_from_text(const std::string& text) {
    try {
        json j = json::parse(text);
        if (j.at("format") != "mlbisim-superblock-model") throw ParseError("model file: not a superblock model");
        if (j.at("version") != SuperblockModel::kVersion) {
            throw ParseError("model file: unsupported version " + j.at("version").dump());
        }
        SuperblockModel m;
        j.at("parameter").get_to(m.parameter);
        j.at("variables").get_to(m.variables);
        j.at("parametric").get_to(m.parametric);
        j.at("sample_parameters").get_to(m.sample_parameters);
        j.at("seed").get_to(m.seed);
        j.at("svm").at("c").get_to(m.svm.c);
        j.at("svm").at("max_epochs").get_to(m.svm.max_epochs);
        j.at("superblocks").get_to(m.superblocks);
        if (m.variables.size() != m.parametric.size()) throw ParseError("model file: variable lists differ in length");
        std::vector<SubclassModel> subclasses;
        for (const auto& s : j.at("subclasses")) {
            SubclassModel sub;
            s.at("key").get_to(sub.key);
            s.at("n_train").get_to(sub.n_train);
            sub.classifier = classifier_from_json(s.at("classifier"));
            subclasses.push_back(std::move(sub));
        }
        m.classifier = ClassifierModel(std::move(subclasses));
        m.classifier.set_feature_count(j.at("feature_count").get<std::size_t>());
        for (const auto& p : j.at("patterns")) {
            RelationPattern pattern;
            p.at("superblock").get_to(pattern.superblock);
            p.at("pattern_free").get_to(pattern.pattern_free);
            p.at("reason").get_to(pattern.reason);
            for (const auto& r : p.at("relations")) {
                ProjectionRelation rel;
                r.at("projection").get_to(rel.projection);
                r.at("coefficients").get_to(rel.coefficients);
                rel.alpha = Rational::parse(r.at("alpha").get<std::string>());
                rel.beta = Rational::parse(r.at("beta").get<std::string>());
                pattern.relations.push_back(std::move(rel));
            }
            if (pattern.superblock == kSingular || pattern.superblock >= m.superblocks.size()) {
                throw ParseError("model file: pattern for unknown superblock");
            }
            m.patterns.push_back(std::move(pattern));
        }
        return m;
    } catch (const json::exception& e) {
        throw ParseError(std::string("model file: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw ParseError(std::string("model file: ") + e.what());
    }
}

void save_model(const SuperblockModel& model, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << model_to_text(model);
}

SuperblockModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return model_from_text(buffer.str());
}

void save_eta(const std::vector<SuperblockId>& eta, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    for (std::size_t s = 0; s < eta.size(); ++s) out << s << " " << eta[s] << "\n";
}

}  // namespace mlbisim::mlinit

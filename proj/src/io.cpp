#include "ensemblepool/io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <unordered_map>

namespace ensemblepool::io {

namespace fs = std::filesystem;

void write_atomic(const fs::path& path, const std::string& contents)
{
    if (path.has_parent_path())
        fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw Error("cannot write " + tmp.string());
        out << contents;
        if (!out.flush())
            throw Error("failed writing " + tmp.string());
    }
    fs::rename(tmp, path);
}

std::string read_file(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ParseError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

namespace {

std::vector<std::string> split_fields(const std::string& line)
{
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ','))
        fields.push_back(field);
    if (!line.empty() && line.back() == ',')
        fields.emplace_back();
    return fields;
}

std::vector<std::string> lines_of(const std::string& text)
{
    std::vector<std::string> lines;
    std::istringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        lines.push_back(line);
    }
    return lines;
}

std::string where(const std::string& source, std::size_t line)
{
    return source + ":" + std::to_string(line) + ": ";
}

double parse_double(const std::string& s, const std::string& source, std::size_t line)
{
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE)
        throw ParseError(where(source, line) + "'" + s + "' is not a number");
    return v;
}

std::string format_double(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

json matrix_to_json(const Eigen::MatrixXd& m)
{
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(rows)}};
}

Eigen::MatrixXd matrix_from_json(const json& doc)
{
    const auto rows = doc.at("rows").get<Eigen::Index>();
    const auto cols = doc.at("cols").get<Eigen::Index>();
    const auto& data = doc.at("data");
    if (static_cast<Eigen::Index>(data.size()) != rows)
        throw ParseError("matrix row count mismatch");
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const auto& row = data.at(static_cast<std::size_t>(i));
        if (static_cast<Eigen::Index>(row.size()) != cols)
            throw ParseError("matrix column count mismatch");
        for (Eigen::Index j = 0; j < cols; ++j)
            m(i, j) = row.at(static_cast<std::size_t>(j)).get<double>();
    }
    return m;
}

json vector_to_json(const Eigen::VectorXd& v)
{
    return std::vector<double>(v.data(), v.data() + v.size());
}

Eigen::VectorXd vector_from_json(const json& doc)
{
    const auto values = doc.get<std::vector<double>>();
    return Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

json rate_json(const Rate& r)
{
    return json{{"value", r.value}, {"degenerate", r.degenerate}};
}

}  // namespace

PredictionTable parse_predictions_csv(const std::string& text, const std::string& source)
{
    const auto lines = lines_of(text);
    if (lines.empty())
        throw ParseError(where(source, 1) + "missing header");
    const auto header = split_fields(lines[0]);
    if (header.size() < 2 || header[0] != "sample_id")
        throw ParseError(where(source, 1) + "header must be sample_id,<class_0>,...");
    PredictionTable table;
    table.class_names.assign(header.begin() + 1, header.end());
    const std::size_t classes = table.class_names.size();
    std::vector<std::string> ids;
    std::vector<double> values;
    for (std::size_t ln = 1; ln < lines.size(); ++ln) {
        if (lines[ln].empty())
            continue;
        const auto fields = split_fields(lines[ln]);
        if (fields.size() != classes + 1)
            throw ParseError(where(source, ln + 1) + "expected " + std::to_string(classes + 1) + " fields, got " +
                             std::to_string(fields.size()));
        if (fields[0].empty())
            throw ParseError(where(source, ln + 1) + "empty sample id");
        ids.push_back(fields[0]);
        for (std::size_t c = 0; c < classes; ++c)
            values.push_back(parse_double(fields[c + 1], source, ln + 1));
    }
    table.matrix = PredictionMatrix(std::move(ids), classes, std::move(values));
    return table;
}

std::string format_predictions_csv(const PredictionMatrix& matrix, const std::vector<std::string>& class_names)
{
    if (class_names.size() != matrix.class_count())
        throw ShapeMismatchError("class name count does not match the prediction matrix");
    std::string out = "sample_id";
    for (const auto& name : class_names)
        out += "," + name;
    out += "\n";
    for (std::size_t i = 0; i < matrix.sample_count(); ++i) {
        out += matrix.sample_ids()[i];
        for (double v : matrix.row(i))
            out += "," + format_double(v);
        out += "\n";
    }
    return out;
}

PredictionTable read_predictions_csv(const fs::path& path)
{
    return parse_predictions_csv(read_file(path), path.string());
}

LabelVector parse_labels_csv(const std::string& text, std::size_t class_count, const std::string& source)
{
    const auto lines = lines_of(text);
    if (lines.empty() || split_fields(lines[0]) != std::vector<std::string>{"sample_id", "label"})
        throw ParseError(where(source, 1) + "header must be sample_id,label");
    std::vector<std::string> ids;
    std::vector<int> labels;
    for (std::size_t ln = 1; ln < lines.size(); ++ln) {
        if (lines[ln].empty())
            continue;
        const auto fields = split_fields(lines[ln]);
        if (fields.size() != 2 || fields[0].empty())
            throw ParseError(where(source, ln + 1) + "expected sample_id,label");
        char* end = nullptr;
        errno = 0;
        const long v = std::strtol(fields[1].c_str(), &end, 10);
        if (fields[1].empty() || end != fields[1].c_str() + fields[1].size() || errno == ERANGE || v < 0 ||
            static_cast<std::size_t>(v) >= class_count)
            throw ParseError(where(source, ln + 1) + "label '" + fields[1] + "' is not a class index in [0, " +
                             std::to_string(class_count) + ")");
        ids.push_back(fields[0]);
        labels.push_back(static_cast<int>(v));
    }
    try {
        return LabelVector(std::move(ids), std::move(labels), class_count);
    } catch (const Error& e) {
        throw ParseError(source + ": " + e.what());
    }
}

LabelVector read_labels_csv(const fs::path& path, std::size_t class_count)
{
    return parse_labels_csv(read_file(path), class_count, path.string());
}

std::size_t infer_class_count(const fs::path& path)
{
    // Parse once with an unbounded class count to find the largest label.
    const auto labels = parse_labels_csv(read_file(path), static_cast<std::size_t>(std::numeric_limits<int>::max()),
                                         path.string());
    int top = 0;
    for (int l : labels.labels())
        top = std::max(top, l);
    return static_cast<std::size_t>(top) + 1;
}

LabelVector align_labels(const LabelVector& labels, const std::vector<std::string>& sample_ids)
{
    if (labels.sample_ids() == sample_ids)
        return labels;
    if (labels.size() != sample_ids.size())
        throw AlignmentError("labels cover " + std::to_string(labels.size()) + " samples, predictions " +
                             std::to_string(sample_ids.size()));
    std::unordered_map<std::string, std::size_t> pos;
    for (std::size_t i = 0; i < labels.size(); ++i)
        pos.emplace(labels.sample_ids()[i], i);
    std::vector<std::size_t> order;
    order.reserve(sample_ids.size());
    for (const auto& id : sample_ids) {
        auto it = pos.find(id);
        if (it == pos.end())
            throw AlignmentError("sample '" + id + "' has no label");
        order.push_back(it->second);
    }
    return labels.select(order);
}

std::string format_roc_csv(const RocCurve& curve)
{
    std::string out = "threshold,fpr,tpr\n";
    for (const auto& p : curve.points)
        out += (std::isinf(p.threshold) ? std::string("inf") : format_double(p.threshold)) + "," +
               format_double(p.fpr) + "," + format_double(p.tpr) + "\n";
    return out;
}

// ---------------------------------------------------------------- splits

namespace {

json partitions_json(const std::vector<Partition>& parts)
{
    json arr = json::array();
    for (auto p : parts)
        arr.push_back(to_string(p));
    return arr;
}

std::vector<Partition> partitions_from(const json& arr, std::size_t expected)
{
    if (!arr.is_array() || arr.size() != expected)
        throw ParseError("split document: partition list length does not match sample_ids");
    std::vector<Partition> out;
    out.reserve(arr.size());
    for (const auto& v : arr)
        out.push_back(partition_from_string(v.get<std::string>()));
    return out;
}

json counts_json(const SplitAssignment& s)
{
    json counts = json::object();
    for (auto p : {Partition::ModelTrain, Partition::ModelVal, Partition::EnsembleTrain, Partition::Testing,
                   Partition::FoldTrain, Partition::FoldVal})
        if (auto n = s.count(p))
            counts[to_string(p)] = n;
    return counts;
}

}  // namespace

json split_to_json(const SplitAssignment& split, const std::vector<SplitAssignment>& folds)
{
    json doc{{"schema_version", kSchemaVersion},
             {"sample_ids", split.sample_ids},
             {"partitions", partitions_json(split.partitions)},
             {"counts", counts_json(split)}};
    if (!folds.empty()) {
        json arr = json::array();
        for (const auto& f : folds)
            arr.push_back(
                {{"fold_index", f.fold_index.value_or(0)}, {"partitions", partitions_json(f.partitions)}, {"counts", counts_json(f)}});
        doc["folds"] = std::move(arr);
    }
    return doc;
}

SplitAssignment split_from_json(const json& doc)
{
    try {
        SplitAssignment s;
        s.sample_ids = doc.at("sample_ids").get<std::vector<std::string>>();
        s.partitions = partitions_from(doc.at("partitions"), s.sample_ids.size());
        return s;
    } catch (const json::exception& e) {
        throw ParseError(std::string("split document: ") + e.what());
    }
}

std::vector<SplitAssignment> folds_from_json(const json& doc)
{
    std::vector<SplitAssignment> out;
    if (!doc.contains("folds"))
        return out;
    try {
        const auto ids = doc.at("sample_ids").get<std::vector<std::string>>();
        for (const auto& f : doc.at("folds")) {
            SplitAssignment s;
            s.sample_ids = ids;
            s.partitions = partitions_from(f.at("partitions"), ids.size());
            s.fold_index = f.at("fold_index").get<int>();
            out.push_back(std::move(s));
        }
    } catch (const json::exception& e) {
        throw ParseError(std::string("split document: ") + e.what());
    }
    return out;
}

// ---------------------------------------------------------------- poolers

namespace {

json learner_to_json(const LearnerModel& model)
{
    if (const auto* m = std::get_if<TreeModel>(&model)) {
        json nodes = json::array();
        for (const auto& n : m->nodes)
            nodes.push_back({{"feature", n.feature},
                             {"threshold", n.threshold},
                             {"left", n.left},
                             {"right", n.right},
                             {"class_counts", n.class_counts}});
        return {{"type", "tree"}, {"feature_count", m->feature_count}, {"class_count", m->class_count}, {"nodes", nodes}};
    }
    if (const auto* m = std::get_if<LogRegModel>(&model))
        return {{"type", "logistic_regression"},
                {"weights", matrix_to_json(m->weights)},
                {"bias", vector_to_json(m->bias)},
                {"iterations", m->iterations},
                {"gradient_norm", m->gradient_norm},
                {"converged", m->converged}};
    if (const auto* m = std::get_if<CnbModel>(&model))
        return {{"type", "complement_nb"},
                {"alpha", m->alpha},
                {"complement_counts", matrix_to_json(m->complement_counts)},
                {"weights", matrix_to_json(m->weights)}};
    if (const auto* m = std::get_if<SvmModel>(&model)) {
        json pairs = json::array();
        for (const auto& p : m->pairs)
            pairs.push_back({{"positive", p.positive},
                             {"negative", p.negative},
                             {"support_vectors", matrix_to_json(p.support_vectors)},
                             {"coefficients", vector_to_json(p.coefficients)},
                             {"rho", p.rho},
                             {"dual_objective", p.dual_objective},
                             {"kkt_gap", p.kkt_gap},
                             {"alpha_dot_y", p.alpha_dot_y},
                             {"iterations", p.iterations},
                             {"converged", p.converged}});
        return {{"type", "svm"},
                {"feature_count", m->feature_count},
                {"class_count", m->class_count},
                {"gamma", m->gamma},
                {"c_reg", m->c_reg},
                {"pairs", pairs}};
    }
    if (const auto* m = std::get_if<KnnModel>(&model))
        return {{"type", "knn"},
                {"k", m->k},
                {"class_count", m->class_count},
                {"features", matrix_to_json(m->features)},
                {"labels", m->labels}};
    const auto& m = std::get<GpModel>(model);
    json per_class = json::array();
    for (const auto& g : m.per_class)
        per_class.push_back({{"mode", vector_to_json(g.mode)},
                             {"grad_log_lik", vector_to_json(g.grad_log_lik)},
                             {"sqrt_w", vector_to_json(g.sqrt_w)},
                             {"chol", matrix_to_json(g.chol)},
                             {"gradient_norm", g.gradient_norm},
                             {"iterations", g.iterations},
                             {"converged", g.converged}});
    return {{"type", "gaussian_process"},
            {"length_scale", m.length_scale},
            {"class_count", m.class_count},
            {"inputs", matrix_to_json(m.inputs)},
            {"per_class", per_class}};
}

LearnerModel learner_from_json(const json& doc)
{
    const auto type = doc.at("type").get<std::string>();
    if (type == "tree") {
        TreeModel m;
        m.feature_count = doc.at("feature_count").get<std::size_t>();
        m.class_count = doc.at("class_count").get<std::size_t>();
        for (const auto& n : doc.at("nodes"))
            m.nodes.push_back({n.at("feature").get<int>(), n.at("threshold").get<double>(), n.at("left").get<int>(),
                               n.at("right").get<int>(), n.at("class_counts").get<std::vector<double>>()});
        if (m.nodes.empty())
            throw ParseError("tree without nodes");
        return m;
    }
    if (type == "logistic_regression") {
        LogRegModel m;
        m.weights = matrix_from_json(doc.at("weights"));
        m.bias = vector_from_json(doc.at("bias"));
        m.iterations = doc.at("iterations").get<int>();
        m.gradient_norm = doc.at("gradient_norm").get<double>();
        m.converged = doc.at("converged").get<bool>();
        return m;
    }
    if (type == "complement_nb") {
        CnbModel m;
        m.alpha = doc.at("alpha").get<double>();
        m.complement_counts = matrix_from_json(doc.at("complement_counts"));
        m.weights = matrix_from_json(doc.at("weights"));
        return m;
    }
    if (type == "svm") {
        SvmModel m;
        m.feature_count = doc.at("feature_count").get<std::size_t>();
        m.class_count = doc.at("class_count").get<std::size_t>();
        m.gamma = doc.at("gamma").get<double>();
        m.c_reg = doc.at("c_reg").get<double>();
        for (const auto& p : doc.at("pairs")) {
            SvmPair pair;
            pair.positive = p.at("positive").get<int>();
            pair.negative = p.at("negative").get<int>();
            pair.support_vectors = matrix_from_json(p.at("support_vectors"));
            pair.coefficients = vector_from_json(p.at("coefficients"));
            pair.rho = p.at("rho").get<double>();
            pair.dual_objective = p.at("dual_objective").get<double>();
            pair.kkt_gap = p.at("kkt_gap").get<double>();
            pair.alpha_dot_y = p.at("alpha_dot_y").get<double>();
            pair.iterations = p.at("iterations").get<long>();
            pair.converged = p.at("converged").get<bool>();
            m.pairs.push_back(std::move(pair));
        }
        return m;
    }
    if (type == "knn") {
        KnnModel m;
        m.k = doc.at("k").get<int>();
        m.class_count = doc.at("class_count").get<std::size_t>();
        m.features = matrix_from_json(doc.at("features"));
        m.labels = doc.at("labels").get<std::vector<int>>();
        return m;
    }
    if (type == "gaussian_process") {
        GpModel m;
        m.length_scale = doc.at("length_scale").get<double>();
        m.class_count = doc.at("class_count").get<std::size_t>();
        m.inputs = matrix_from_json(doc.at("inputs"));
        for (const auto& g : doc.at("per_class")) {
            GpBinary b;
            b.mode = vector_from_json(g.at("mode"));
            b.grad_log_lik = vector_from_json(g.at("grad_log_lik"));
            b.sqrt_w = vector_from_json(g.at("sqrt_w"));
            b.chol = matrix_from_json(g.at("chol"));
            b.gradient_norm = g.at("gradient_norm").get<double>();
            b.iterations = g.at("iterations").get<int>();
            b.converged = g.at("converged").get<bool>();
            m.per_class.push_back(std::move(b));
        }
        return m;
    }
    throw ParseError("unknown learner type '" + type + "'");
}

}  // namespace

json pooler_to_json(const FittedPooler& pooler)
{
    json state = nullptr;
    if (const auto* w = std::get_if<MemberWeights>(&pooler.state))
        state = {{"model_weights", w->weights}};
    else if (const auto* b = std::get_if<BestMember>(&pooler.state))
        state = {{"best_index", b->index}};
    else if (const auto* l = std::get_if<LearnerModel>(&pooler.state))
        state = {{"learner", learner_to_json(*l)}};
    return {{"schema_version", kSchemaVersion},
            {"kind", to_string(pooler.kind)},
            {"member_count", pooler.member_count},
            {"class_count", pooler.class_count},
            {"state", state}};
}

FittedPooler pooler_from_json(const json& doc)
{
    try {
        if (doc.at("schema_version").get<int>() != kSchemaVersion)
            throw ParseError("unsupported pooler schema version");
        FittedPooler p;
        p.kind = pooler_kind_from_string(doc.at("kind").get<std::string>());
        p.member_count = doc.at("member_count").get<std::size_t>();
        p.class_count = doc.at("class_count").get<std::size_t>();
        const auto& state = doc.at("state");
        if (p.kind == PoolerKind::MeanWeighted)
            p.state = MemberWeights{state.at("model_weights").get<std::vector<double>>()};
        else if (p.kind == PoolerKind::BestModel)
            p.state = BestMember{state.at("best_index").get<std::size_t>()};
        else if (is_trainable(p.kind))
            p.state = learner_from_json(state.at("learner"));
        return p;
    } catch (const json::exception& e) {
        throw ParseError(std::string("pooler document: ") + e.what());
    }
}

// ---------------------------------------------------------------- reports

json metrics_to_json(const MetricReport& report, const std::vector<std::string>& class_names)
{
    json per_class = json::array();
    for (std::size_t c = 0; c < report.per_class.size(); ++c) {
        const auto& m = report.per_class[c];
        json entry{{"index", c},
                   {"name", c < class_names.size() ? class_names[c] : std::to_string(c)},
                   {"tp", m.counts.tp},
                   {"fp", m.counts.fp},
                   {"tn", m.counts.tn},
                   {"fn", m.counts.fn},
                   {"accuracy", m.accuracy},
                   {"f1", rate_json(m.f1)},
                   {"sensitivity", rate_json(m.sensitivity)},
                   {"fpr", rate_json(m.fpr)},
                   {"specificity", rate_json(m.specificity)}};
        if (m.roc) {
            entry["auc"] = m.roc->auc;
        } else {
            entry["auc"] = nullptr;
            entry["auc_error"] = "OneClassError: class has only positive or only negative samples";
        }
        per_class.push_back(std::move(entry));
    }
    json macro{{"accuracy", report.macro_accuracy},
               {"f1", report.macro_f1},
               {"sensitivity", report.macro_sensitivity},
               {"fpr", report.macro_fpr},
               {"specificity", report.macro_specificity},
               {"auc", report.macro_auc ? json(*report.macro_auc) : json(nullptr)},
               {"top1_error", report.top1_error},
               {"top3_error", report.top3_error ? json(*report.top3_error) : json(nullptr)}};
    return {{"schema_version", kSchemaVersion},
            {"sample_count", report.sample_count},
            {"macro", macro},
            {"per_class", per_class}};
}

json experiment_report_to_json(const ExperimentReport& report, const ExperimentConfig& config)
{
    json results = json::array();
    for (const auto& r : report.results) {
        json metrics = metrics_to_json(r.metrics, {});
        results.push_back({{"technique", to_string(r.technique)},
                           {"learner", r.learner},
                           {"method", r.method},
                           {"macro", metrics.at("macro")},
                           {"per_class", metrics.at("per_class")}});
    }
    json deltas = json::array();
    for (const auto& d : report.deltas)
        deltas.push_back({{"technique", to_string(d.technique)},
                          {"best_learner", d.best_learner},
                          {"best_method", d.best_method},
                          {"f1", d.f1},
                          {"accuracy", d.accuracy},
                          {"f1_gain_percent", d.f1_gain_percent},
                          {"accuracy_gain_percent", d.accuracy_gain_percent}});
    return {{"schema_version", kSchemaVersion},
            {"seed", config.seed},
            {"baseline_best", {{"learner", report.baseline_best},
                               {"f1", report.baseline_best_f1},
                               {"accuracy", report.baseline_best_accuracy}}},
            {"results", results},
            {"deltas", deltas}};
}

// ---------------------------------------------------------------- config

namespace {

class ConfigReader {
public:
    explicit ConfigReader(const json& doc, std::string path = "") : doc_(doc), path_(std::move(path)) {}

    bool has(const char* key) const { return doc_.is_object() && doc_.contains(key); }

    std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    template <class T>
    void read(const char* key, T& out) const
    {
        if (!has(key))
            return;
        try {
            out = doc_.at(key).get<T>();
        } catch (const json::exception&) {
            throw ConfigError(field(key) + ": wrong type");
        }
    }

    ConfigReader child(const char* key) const { return ConfigReader(doc_.at(key), field(key)); }

    const json& raw(const char* key) const { return doc_.at(key); }

private:
    const json& doc_;
    std::string path_;
};

}  // namespace

ExperimentConfig config_from_json(const json& doc)
{
    if (!doc.is_object())
        throw ConfigError("config: expected a JSON object");
    ExperimentConfig cfg;
    ConfigReader root(doc);
    root.read("seed", cfg.seed);
    root.read("stratified", cfg.stratified);
    root.read("focal_gamma", cfg.focal_gamma);

    if (root.has("dataset")) {
        auto d = root.child("dataset");
        d.read("n_samples", cfg.dataset.n_samples);
        d.read("n_classes", cfg.dataset.n_classes);
        d.read("n_features", cfg.dataset.n_features);
        d.read("class_separation", cfg.dataset.class_separation);
        d.read("label_noise", cfg.dataset.label_noise);
        d.read("imbalance", cfg.dataset.imbalance);
        d.read("seed", cfg.dataset.seed);
    }
    if (root.has("ratios")) {
        auto r = root.child("ratios");
        r.read("model_train", cfg.ratios.model_train);
        r.read("model_val", cfg.ratios.model_val);
        r.read("ensemble_train", cfg.ratios.ensemble_train);
        r.read("testing", cfg.ratios.testing);
    }
    if (root.has("learners")) {
        const auto& arr = root.raw("learners");
        if (!arr.is_array())
            throw ConfigError("learners: expected an array");
        cfg.learners.clear();
        for (std::size_t i = 0; i < arr.size(); ++i) {
            ConfigReader l(arr[i], "learners[" + std::to_string(i) + "]");
            BaseLearnerSpec spec;
            spec.member_name = "learner" + std::to_string(i);
            spec.init_seed = i;
            l.read("name", spec.member_name);
            l.read("feature_subset_fraction", spec.feature_subset_fraction);
            l.read("init_seed", spec.init_seed);
            l.read("learning_rate", spec.learning_rate);
            l.read("max_epochs", spec.max_epochs);
            l.read("patience", spec.patience);
            cfg.learners.push_back(std::move(spec));
        }
    }
    if (root.has("scenarios")) {
        std::vector<std::string> names;
        root.read("scenarios", names);
        cfg.scenarios.clear();
        for (std::size_t i = 0; i < names.size(); ++i) {
            try {
                cfg.scenarios.push_back(scenario_from_string(names[i]));
            } catch (const ConfigError& e) {
                throw ConfigError("scenarios[" + std::to_string(i) + "]: " + e.what());
            }
        }
    }
    if (root.has("poolers")) {
        std::vector<std::string> names;
        root.read("poolers", names);
        cfg.poolers.clear();
        if (names.size() == 1 && names[0] == "all") {
            cfg.poolers.assign(kAllPoolerKinds.begin(), kAllPoolerKinds.end());
        } else {
            for (std::size_t i = 0; i < names.size(); ++i) {
                try {
                    cfg.poolers.push_back(pooler_kind_from_string(names[i]));
                } catch (const ParameterError& e) {
                    throw ConfigError("poolers[" + std::to_string(i) + "]: " + e.what());
                }
            }
        }
    }
    if (root.has("augment")) {
        auto a = root.child("augment");
        a.read("copies", cfg.augment.copies);
        a.read("jitter_sigma", cfg.augment.jitter_sigma);
        a.read("seed", cfg.augment.seed);
    }
    if (root.has("kfold")) {
        auto k = root.child("kfold");
        k.read("k", cfg.kfold.k);
        k.read("seed", cfg.kfold.seed);
    }
    cfg.validate();
    return cfg;
}

// ---------------------------------------------------------------- manifests

BundleManifest read_manifest(const fs::path& path)
{
    json doc;
    try {
        doc = json::parse(read_file(path));
    } catch (const json::parse_error& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    const fs::path base = path.parent_path();
    auto resolve = [&](const std::string& p) { return fs::path(p).is_absolute() ? fs::path(p) : base / p; };
    try {
        BundleManifest m;
        m.schema_version = doc.at("schema_version").get<int>();
        if (m.schema_version != kSchemaVersion)
            throw ParseError(path.string() + ": unsupported schema_version " + std::to_string(m.schema_version));
        m.class_names = doc.at("class_names").get<std::vector<std::string>>();
        if (doc.contains("labels"))
            m.labels = resolve(doc.at("labels").get<std::string>());
        for (const auto& member : doc.at("members")) {
            BundleManifest::Member entry;
            entry.name = member.at("name").get<std::string>();
            entry.path = resolve(member.at("path").get<std::string>());
            if (member.contains("source_kind"))
                entry.source_kind = source_kind_from_string(member.at("source_kind").get<std::string>());
            m.members.push_back(std::move(entry));
        }
        if (m.members.empty())
            throw ParseError(path.string() + ": manifest lists no members");
        return m;
    } catch (const json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

EnsembleBundle load_bundle(const BundleManifest& manifest)
{
    EnsembleBundle bundle;
    for (const auto& member : manifest.members) {
        auto table = read_predictions_csv(member.path);
        if (table.class_names.size() != manifest.class_names.size())
            throw AlignmentError(member.path.string() + ": has " + std::to_string(table.class_names.size()) +
                                 " classes, manifest lists " + std::to_string(manifest.class_names.size()));
        bundle.members.push_back({member.name, member.source_kind, std::move(table.matrix)});
    }
    return validate_bundle(std::move(bundle));
}

}  // namespace ensemblepool::io

#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mlloglint/errors.hpp"

namespace mlloglint {

enum class TrackerVerb { Metric, Param, Artifact, Generic };

inline const char* to_string(TrackerVerb v) {
    switch (v) {
        case TrackerVerb::Metric: return "metric";
        case TrackerVerb::Param: return "param";
        case TrackerVerb::Artifact: return "artifact";
        case TrackerVerb::Generic: return "generic";
    }
    return "generic";
}

inline std::optional<TrackerVerb> tracker_verb_from(const std::string& s) {
    if (s == "metric") return TrackerVerb::Metric;
    if (s == "param") return TrackerVerb::Param;
    if (s == "artifact") return TrackerVerb::Artifact;
    if (s == "generic") return TrackerVerb::Generic;
    return std::nullopt;
}

/// One ML-tracking library the registry knows: the module (or submodule)
/// whose import marks a file, and the display name used in records and
/// statistics. `ancestor_import_counts` controls whether importing an
/// ancestor package (e.g. plain `import tensorflow`) marks the file; it is
/// off for submodule entries of large frameworks so that every torch or
/// tensorflow file does not become a logging file.
struct MlLibrary {
    std::string module;
    std::string display_name;
    bool ancestor_import_counts = true;
};

struct LibraryRegistry {
    std::vector<std::string> general_purpose;          // module names
    std::vector<MlLibrary> ml_specific;
    std::vector<std::string> config_call_patterns;     // dotted or bare patterns
    std::vector<std::pair<std::string, TrackerVerb>> tracker_verbs;
    std::vector<std::string> tracker_receivers;        // conventional receiver names
    std::vector<std::string> logger_receivers;         // conventional general-logger names
    std::vector<std::string> level_names;              // recognized level methods

    static LibraryRegistry defaults() {
        LibraryRegistry r;
        r.general_purpose = {"logging", "warnings"};
        r.ml_specific = {
            {"mlflow", "mlflow", true},
            {"wandb", "wandb", true},
            {"tensorboard", "tensorboard", true},
            {"tensorboardX", "tensorboard", true},
            {"torch.utils.tensorboard", "tensorboard", false},
            {"neptune", "neptune", true},
            {"comet_ml", "comet_ml", true},
            {"dowel", "dowel", true},
            {"ml_logger", "ml_logger", true},
            {"whylogs", "whylogs", true},
            {"sacred", "sacred", true},
            {"tensorflow.summary", "tensorflow", false},
        };
        r.config_call_patterns = {
            // the five initialization examples the taxonomy names outright
            "logging.basicConfig", "logging.getLogger", "wandb.init", "mlflow.set_tags",
            "neptune.init",
            // plus the declared extended set
            "getLogger", "setLevel", "addHandler", "addFilter", "removeHandler",
            "logging.config.fileConfig", "logging.config.dictConfig", "fileConfig", "dictConfig",
            "logging.captureWarnings", "captureWarnings", "logging.disable",
            "wandb.login", "wandb.setup", "mlflow.set_tracking_uri", "mlflow.set_experiment",
            "mlflow.set_tag", "neptune.create_experiment", "neptune.init_run",
            "comet_ml.start", "comet_ml.Experiment", "comet_ml.init",
            "SummaryWriter", "create_file_writer", "dowel.logger.add_output",
        };
        r.tracker_verbs = {
            {"log_metric", TrackerVerb::Metric},
            {"log_metrics", TrackerVerb::Metric},
            {"wandb.log", TrackerVerb::Metric},
            {"add_scalar", TrackerVerb::Metric},
            {"add_scalars", TrackerVerb::Metric},
            {"record_tabular", TrackerVerb::Metric},
            {"summary.scalar", TrackerVerb::Metric},
            {"log_scalar", TrackerVerb::Metric},
            {"send_metric", TrackerVerb::Metric},
            {"log_param", TrackerVerb::Param},
            {"log_params", TrackerVerb::Param},
            {"log_parameter", TrackerVerb::Param},
            {"log_parameters", TrackerVerb::Param},
            {"log_multiple_params", TrackerVerb::Param},
            {"log_hyperparams", TrackerVerb::Param},
            {"add_hparams", TrackerVerb::Param},
            {"config.update", TrackerVerb::Param},
            {"log_artifact", TrackerVerb::Artifact},
            {"log_artifacts", TrackerVerb::Artifact},
            {"log_model", TrackerVerb::Artifact},
            {"wandb.save", TrackerVerb::Artifact},
        };
        r.tracker_receivers = {"run", "writer", "summary_writer", "tb_writer", "experiment",
                               "exp", "tracker", "client", "wandb_run", "neptune_run"};
        r.logger_receivers = {"logger", "LOGGER", "log", "_logger", "_log", "Logger"};
        r.level_names = {"debug", "info", "warning", "warn", "error", "exception",
                         "critical", "fatal"};
        return r;
    }

    /// Additive overrides from a JSON document; full arrays replace when
    /// given without the "extra_" prefix.
    void apply_overrides(const nlohmann::json& doc) {
        auto strings = [](const nlohmann::json& arr) {
            std::vector<std::string> v;
            for (const auto& x : arr) v.push_back(x.get<std::string>());
            return v;
        };
        if (doc.contains("general_purpose")) general_purpose = strings(doc["general_purpose"]);
        if (doc.contains("extra_general_purpose"))
            for (auto& s : strings(doc["extra_general_purpose"])) general_purpose.push_back(s);
        auto read_lib = [](const nlohmann::json& x) {
            MlLibrary lib;
            if (x.is_string()) {
                lib.module = x.get<std::string>();
                lib.display_name = lib.module;
            } else {
                lib.module = x.at("module").get<std::string>();
                lib.display_name = x.value("name", lib.module);
                lib.ancestor_import_counts = x.value("ancestor_import_counts", true);
            }
            return lib;
        };
        if (doc.contains("ml_specific")) {
            ml_specific.clear();
            for (const auto& x : doc["ml_specific"]) ml_specific.push_back(read_lib(x));
        }
        if (doc.contains("extra_ml_specific"))
            for (const auto& x : doc["extra_ml_specific"]) ml_specific.push_back(read_lib(x));
        if (doc.contains("config_call_patterns"))
            config_call_patterns = strings(doc["config_call_patterns"]);
        if (doc.contains("extra_config_call_patterns"))
            for (auto& s : strings(doc["extra_config_call_patterns"]))
                config_call_patterns.push_back(s);
        auto read_verbs = [&](const nlohmann::json& obj, bool replace) {
            if (replace) tracker_verbs.clear();
            for (auto it = obj.begin(); it != obj.end(); ++it) {
                auto v = tracker_verb_from(it.value().get<std::string>());
                if (!v) throw DomainError("unknown tracker verb: " + it.value().get<std::string>());
                tracker_verbs.emplace_back(it.key(), *v);
            }
        };
        if (doc.contains("tracker_verbs")) read_verbs(doc["tracker_verbs"], true);
        if (doc.contains("extra_tracker_verbs")) read_verbs(doc["extra_tracker_verbs"], false);
        if (doc.contains("tracker_receivers")) tracker_receivers = strings(doc["tracker_receivers"]);
        if (doc.contains("extra_tracker_receivers"))
            for (auto& s : strings(doc["extra_tracker_receivers"])) tracker_receivers.push_back(s);
        if (doc.contains("logger_receivers")) logger_receivers = strings(doc["logger_receivers"]);
        if (doc.contains("extra_logger_receivers"))
            for (auto& s : strings(doc["extra_logger_receivers"])) logger_receivers.push_back(s);
    }

    static LibraryRegistry load(const std::string& path) {
        LibraryRegistry r = defaults();
        std::ifstream f(path);
        if (!f) throw std::runtime_error("cannot open registry file: " + path);
        nlohmann::json doc = nlohmann::json::parse(f);
        r.apply_overrides(doc);
        return r;
    }

    bool is_general_module(const std::string& dotted) const {
        for (const auto& m : general_purpose)
            if (module_matches(m, dotted)) return true;
        return false;
    }

    const MlLibrary* ml_library_for(const std::string& dotted) const {
        for (const auto& lib : ml_specific)
            if (module_matches(lib.module, dotted)) return &lib;
        return nullptr;
    }

    /// Import-level matching honoring the ancestor flag: `import x.y.z`
    /// matches entry x.y; `import x` matches entry x.y only when the entry
    /// allows ancestor imports.
    bool import_matches_general(const std::string& import_path) const {
        for (const auto& m : general_purpose)
            if (import_path == m || starts_with(import_path, m + ".")) return true;
        return false;
    }

    const MlLibrary* import_matches_ml(const std::string& import_path) const {
        for (const auto& lib : ml_specific) {
            if (import_path == lib.module || starts_with(import_path, lib.module + "."))
                return &lib;
            if (lib.ancestor_import_counts && starts_with(lib.module, import_path + "."))
                return &lib;
        }
        return nullptr;
    }

    /// FNV-1a over a canonical serialization; embedded in reports so runs
    /// can state exactly which registry produced them.
    std::string fingerprint() const {
        std::ostringstream os;
        for (const auto& s : general_purpose) os << "g:" << s << ";";
        for (const auto& l : ml_specific)
            os << "m:" << l.module << "=" << l.display_name << (l.ancestor_import_counts ? "+" : "-")
               << ";";
        for (const auto& s : config_call_patterns) os << "c:" << s << ";";
        for (const auto& [p, v] : tracker_verbs) os << "v:" << p << "=" << to_string(v) << ";";
        for (const auto& s : tracker_receivers) os << "t:" << s << ";";
        for (const auto& s : logger_receivers) os << "l:" << s << ";";
        return fnv1a_hex(os.str());
    }

    static std::string fnv1a_hex(const std::string& data) {
        std::uint64_t h = 1469598103934665603ULL;
        for (unsigned char c : data) {
            h ^= c;
            h *= 1099511628211ULL;
        }
        char buf[17];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
        return buf;
    }

private:
    static bool starts_with(const std::string& s, const std::string& prefix) {
        return s.size() >= prefix.size() && s.compare(0, prefix.size(), prefix) == 0;
    }

    /// Resolved call paths match a registry module if equal or nested under it.
    static bool module_matches(const std::string& module, const std::string& dotted) {
        return dotted == module || starts_with(dotted, module + ".");
    }
};

}  // namespace mlloglint

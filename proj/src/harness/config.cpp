#include "glcoef/harness/config.hpp"

#include "glcoef/parallel.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace glcoef::harness {
namespace {

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>>& schema() {
    static const std::map<std::string, std::set<std::string>> s{
        {"model", {"kind", "id", "dimension", "matrices", "probabilities", "scales", "log_scales", "a",
                   "moment_epsilon"}},
        {"spectral", {"m", "h", "s_max", "eig_tol", "max_iter", "n_quad", "derivatives"}},
        {"experiment", {"s", "n", "n_mc", "A", "gamma", "t_min", "t_max", "t_points", "t", "x_theta", "y_theta",
                        "phi", "n_phi", "b_tol", "b_max_iter", "walk_steps", "check_steps", "check_reps",
                        "moment_samples", "seed"}},
        {"output", {"dir", "threads"}},
    };
    return s;
}

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_tokens(const std::string& s, const std::string& seps) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (seps.find(c) != std::string::npos) {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

class Reader {
public:
    explicit Reader(const pt::ptree& tree) : tree_(tree) {
        for (const auto& [section, body] : tree) {
            const auto it = schema().find(section);
            if (it == schema().end()) throw ConfigError("unknown config section [" + section + "]");
            if (!body.data().empty() && body.empty())
                throw ConfigError("key '" + section + "' must live inside a section");
            for (const auto& [key, value] : body) {
                if (!it->second.count(key)) throw ConfigError("unknown config key '" + section + "." + key + "'");
                (void)value;
            }
        }
    }

    std::optional<std::string> raw(const std::string& section, const std::string& key) const {
        const auto sec = tree_.get_child_optional(section);
        if (!sec) return std::nullopt;
        const auto v = sec->get_optional<std::string>(pt::ptree::path_type(key, '\0'));
        if (!v) return std::nullopt;
        return trim(*v);
    }

    static std::string name(const std::string& section, const std::string& key) { return section + "." + key; }

    double number(const std::string& section, const std::string& key, const std::string& text) const {
        double v = 0.0;
        const char* b = text.data();
        const char* e = b + text.size();
        const auto [p, ec] = std::from_chars(b, e, v);
        if (ec != std::errc() || p != e || !std::isfinite(v))
            throw ConfigError("config key '" + name(section, key) + "': '" + text + "' is not a finite number");
        return v;
    }

    void get(const std::string& section, const std::string& key, double& out) const {
        if (auto r = raw(section, key)) out = number(section, key, *r);
    }

    template <class Int>
    void get_int(const std::string& section, const std::string& key, Int& out, long long lo) const {
        if (auto r = raw(section, key)) {
            long long v = 0;
            const auto [p, ec] = std::from_chars(r->data(), r->data() + r->size(), v);
            if (ec != std::errc() || p != r->data() + r->size())
                throw ConfigError("config key '" + name(section, key) + "': '" + *r + "' is not an integer");
            if (v < lo)
                throw ConfigError("config key '" + name(section, key) + "' must be >= " + std::to_string(lo));
            out = static_cast<Int>(v);
        }
    }

    std::vector<double> numbers(const std::string& section, const std::string& key, const std::string& text) const {
        std::vector<double> v;
        for (const auto& tok : split_tokens(text, " \t,")) v.push_back(number(section, key, tok));
        return v;
    }

private:
    const pt::ptree& tree_;
};

MatrixModel parse_model(const Reader& rd) {
    const auto kind = rd.raw("model", "kind");
    if (!kind) throw ConfigError("config key 'model.kind' is required");
    const std::string id = rd.raw("model", "id").value_or(*kind);
    int dim = 2;
    rd.get_int("model", "dimension", dim, 2);
    auto list = [&](const char* key) -> std::optional<std::vector<double>> {
        if (auto r = rd.raw("model", key)) return rd.numbers("model", key, *r);
        return std::nullopt;
    };
    try {
        if (*kind == "finite-support") {
            const auto text = rd.raw("model", "matrices");
            if (!text) throw ConfigError("config key 'model.matrices' is required for finite-support");
            std::vector<Matrix> mats;
            for (const auto& chunk : split_tokens(*text, ";")) {
                const auto vals = rd.numbers("model", "matrices", chunk);
                if (static_cast<int>(vals.size()) != dim * dim)
                    throw ConfigError("config key 'model.matrices': each matrix needs " + std::to_string(dim * dim) +
                                      " row-major entries");
                Matrix g(dim, dim);
                for (int i = 0; i < dim; ++i)
                    for (int j = 0; j < dim; ++j) g(i, j) = vals[i * dim + j];
                mats.push_back(g);
            }
            auto probs = list("probabilities");
            if (!probs) probs = std::vector<double>(mats.size(), 1.0 / static_cast<double>(mats.size()));
            return MatrixModel::finite_support(id, std::move(mats), std::move(*probs));
        }
        if (*kind == "scalar-rotation") {
            auto scales = list("scales");
            if (!scales) throw ConfigError("config key 'model.scales' is required for scalar-rotation");
            auto probs = list("probabilities");
            if (!probs) probs = std::vector<double>(scales->size(), 1.0 / static_cast<double>(scales->size()));
            return MatrixModel::scalar_rotation(id, dim, std::move(*scales), std::move(*probs));
        }
        if (*kind == "rotation-diag-rotation") {
            if (auto ls = list("log_scales")) return MatrixModel::rotation_diag_rotation(id, std::move(*ls));
            double a = 1.0;
            rd.get("model", "a", a);
            if (dim != 2) throw ConfigError("config key 'model.a' applies to dimension 2; use model.log_scales");
            return MatrixModel::rotation_diag_rotation(id, a);
        }
    } catch (const DomainError& e) {
        throw ConfigError(std::string("invalid [model]: ") + e.what());
    }
    throw ConfigError("config key 'model.kind': unknown kind '" + *kind +
                      "' (finite-support, scalar-rotation, rotation-diag-rotation)");
}

ExperimentConfig from_tree(const pt::ptree& tree) {
    const Reader rd(tree);
    ExperimentConfig c;
    if (tree.get_child_optional("model")) c.model = parse_model(rd);
    rd.get("model", "moment_epsilon", c.moment_epsilon);
    if (!(c.moment_epsilon > 0.0)) throw ConfigError("config key 'model.moment_epsilon' must be positive");

    rd.get_int("spectral", "m", c.m, 4);
    rd.get("spectral", "h", c.h);
    rd.get("spectral", "s_max", c.s_max);
    rd.get("spectral", "eig_tol", c.eig_tol);
    rd.get_int("spectral", "max_iter", c.max_iter, 1);
    rd.get_int("spectral", "n_quad", c.n_quad, 1);
    if (auto d = rd.raw("spectral", "derivatives")) {
        if (*d == "richardson")
            c.scheme = DerivativeScheme::richardson;
        else if (*d == "plain")
            c.scheme = DerivativeScheme::plain;
        else
            throw ConfigError("config key 'spectral.derivatives' must be 'richardson' or 'plain'");
    }
    if (!(c.h > 0.0)) throw ConfigError("config key 'spectral.h' must be positive");
    if (!(c.s_max > 0.0)) throw ConfigError("config key 'spectral.s_max' must be positive");
    if (!(c.eig_tol > 0.0)) throw ConfigError("config key 'spectral.eig_tol' must be positive");

    if (auto s = rd.raw("experiment", "s")) c.s_list = rd.numbers("experiment", "s", *s);
    if (c.s_list.empty()) throw ConfigError("config key 'experiment.s' must list at least one tilt");
    for (double s : c.s_list)
        if (std::abs(s) + 3.0 * c.h > c.s_max + 1e-15)
            throw ConfigError("config key 'experiment.s': |s| + 3h exceeds spectral.s_max for s = " +
                              std::to_string(s));
    if (auto n = rd.raw("experiment", "n")) {
        c.n_list.clear();
        for (double v : rd.numbers("experiment", "n", *n)) {
            if (v < 1.0 || v != std::floor(v)) throw ConfigError("config key 'experiment.n' needs positive integers");
            c.n_list.push_back(static_cast<std::size_t>(v));
        }
        if (c.n_list.empty()) throw ConfigError("config key 'experiment.n' must list at least one horizon");
        if (!std::is_sorted(c.n_list.begin(), c.n_list.end()) ||
            std::adjacent_find(c.n_list.begin(), c.n_list.end()) != c.n_list.end())
            throw ConfigError("config key 'experiment.n' must be strictly increasing");
    }
    rd.get_int("experiment", "n_mc", c.n_mc, 100);
    rd.get("experiment", "A", c.A);
    if (!(c.A > 0.0)) throw ConfigError("config key 'experiment.A' must be positive");
    rd.get("experiment", "gamma", c.gamma);
    if (!(c.gamma > 0.0 && c.gamma <= 1.0)) throw ConfigError("config key 'experiment.gamma' must be in (0, 1]");
    rd.get("experiment", "t_min", c.t_min);
    rd.get("experiment", "t_max", c.t_max);
    rd.get_int("experiment", "t_points", c.t_points, 2);
    if (!(c.t_max > c.t_min)) throw ConfigError("config key 'experiment.t_max' must exceed experiment.t_min");
    rd.get("experiment", "t", c.t);
    rd.get("experiment", "x_theta", c.x_theta);
    rd.get("experiment", "y_theta", c.y_theta);
    if (auto p = rd.raw("experiment", "phi")) {
        c.phi = *p;
        if (c.phi != "const" && c.phi.rfind("trig:", 0) != 0)
            throw ConfigError("config key 'experiment.phi' must be 'const' or 'trig:K'");
        if (c.phi != "const") {
            const std::string k = c.phi.substr(5);
            int modes = 0;
            const auto [ptr, ec] = std::from_chars(k.data(), k.data() + k.size(), modes);
            if (ec != std::errc() || ptr != k.data() + k.size() || modes < 1)
                throw ConfigError("config key 'experiment.phi': trig:K needs an integer K >= 1");
        }
    }
    rd.get_int("experiment", "n_phi", c.n_phi, 1);
    rd.get("experiment", "b_tol", c.b_tol);
    if (!(c.b_tol > 0.0)) throw ConfigError("config key 'experiment.b_tol' must be positive");
    rd.get_int("experiment", "b_max_iter", c.b_max_iter, 1);
    rd.get_int("experiment", "walk_steps", c.walk_steps, 1);
    rd.get_int("experiment", "check_steps", c.check_steps, 100);
    rd.get_int("experiment", "check_reps", c.check_reps, 1);
    rd.get_int("experiment", "moment_samples", c.moment_samples, 1);
    rd.get_int("experiment", "seed", c.seed, 0);

    if (auto d = rd.raw("output", "dir")) c.out_dir = *d;
    rd.get_int("output", "threads", c.threads, 0);
    return c;
}

} // namespace

const MatrixModel& ExperimentConfig::require_model() const {
    if (!model) throw ConfigError("config section [model] is required for this subcommand");
    return *model;
}

SpectralOptions ExperimentConfig::spectral_options() const {
    SpectralOptions o;
    o.build.n_quad = n_quad;
    o.build.s_max = s_max;
    o.build.threads = thread_count();
    o.eig.tol = eig_tol;
    o.eig.max_iter = max_iter;
    o.h = h;
    o.scheme = scheme;
    return o;
}

unsigned ExperimentConfig::thread_count() const { return threads > 0 ? threads : default_thread_count(); }

ExperimentConfig parse_config_string(const std::string& text) {
    std::istringstream in(text);
    pt::ptree tree;
    try {
        pt::ini_parser::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.message() + " (line " + std::to_string(e.line()) +
                          ")");
    }
    return from_tree(tree);
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_string(buf.str());
}

} // namespace glcoef::harness

#include "rdesplit/config.hpp"

#include "rdesplit/errors.hpp"
#include "rdesplit/format.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>

namespace rdesplit {

namespace {

using Setter = std::function<void(std::string_view)>;
using Getter = std::function<std::string()>;

struct Key {
    std::string name;
    Setter set;
    Getter get;
};

int to_int(std::string_view v) {
    const long long x = parse_integer(v);
    require(x >= std::numeric_limits<int>::min() && x <= std::numeric_limits<int>::max(), "integer out of range");
    return static_cast<int>(x);
}

std::uint64_t to_seed(std::string_view v) {
    const long long x = parse_integer(v);
    require(x >= 0, "seed must be nonnegative");
    return static_cast<std::uint64_t>(x);
}

template <typename T, typename Parse>
std::vector<T> to_list(std::string_view v, Parse parse) {
    std::vector<T> out;
    if (trim(v).empty()) return out;
    for (auto item : split(v, ',')) out.push_back(parse(item));
    return out;
}

template <typename T, typename Show>
std::string show_list(const std::vector<T>& xs, Show show) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? ", " : "") + show(xs[i]);
    return out;
}

Key text(std::string name, std::string& field) {
    return {std::move(name), [&field](std::string_view v) { field = std::string(trim(v)); },
            [&field] { return field; }};
}
Key real(std::string name, double& field) {
    return {std::move(name), [&field](std::string_view v) { field = parse_double(v); },
            [&field] { return format_double(field); }};
}
Key integer(std::string name, int& field) {
    return {std::move(name), [&field](std::string_view v) { field = to_int(v); },
            [&field] { return std::to_string(field); }};
}
Key seed(std::string name, std::uint64_t& field) {
    return {std::move(name), [&field](std::string_view v) { field = to_seed(v); },
            [&field] { return std::to_string(field); }};
}

using Schema = std::vector<std::pair<std::string, std::vector<Key>>>;

// Binds every section and key to a field of `c`; order is the canonical emission order.
Schema schema(ProblemConfig& c) {
    auto& e = c.experiment;
    return {
        {"driver",
         {text("kind", c.driver.kind), integer("dim", c.driver.dim), real("alpha", c.driver.alpha),
          seed("seed", c.driver.seed), integer("levels", c.driver.levels),
          text("displacement", c.driver.displacement), integer("samples", c.driver.samples),
          text("file", c.driver.file)}},
        {"field",
         {text("preset", c.field.preset), integer("n", c.field.n), integer("d", c.field.d),
          real("gamma", c.field.gamma), seed("seed", c.field.seed), real("scale", c.field.scale),
          real("box", c.field.box)}},
        {"z", {text("kind", c.z.kind), real("exponent", c.z.exponent), real("scale", c.z.scale)}},
        {"problem",
         {real("T", c.T), integer("N", c.N),
          {"y0", [&c](std::string_view v) { c.y0 = to_list<double>(v, parse_double); },
           [&c] { return show_list(c.y0, format_double); }}}},
        {"experiment",
         {integer("base_N", e.base_N), integer("levels", e.levels), real("beta", e.beta),
          {"q",
           [&e](std::string_view v) {
               const auto parts = split(trim(v), '/');
               require(parts.size() == 2, "q must be written as num/den");
               e.q_num = to_int(parts[0]);
               e.q_den = to_int(parts[1]);
           },
           [&e] { return std::to_string(e.q_num) + "/" + std::to_string(e.q_den); }},
          {"seeds", [&e](std::string_view v) { e.seeds = to_list<std::uint64_t>(v, to_seed); },
           [&e] { return show_list(e.seeds, [](std::uint64_t s) { return std::to_string(s); }); }},
          integer("check_N", e.check_N), integer("samples", e.samples), real("box", e.box)}},
    };
}

}  // namespace

ProblemConfig parse_config(const std::string& text) {
    ProblemConfig config;
    auto table = schema(config);
    std::vector<Key>* section = nullptr;
    std::string section_name;
    std::map<std::string, int> seen;

    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string where = "config line " + std::to_string(line_no) + ": ";
        std::string_view line = raw;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            require(line.back() == ']', where + "malformed section header");
            section_name = std::string(trim(line.substr(1, line.size() - 2)));
            section = nullptr;
            for (auto& [name, keys] : table)
                if (name == section_name) section = &keys;
            require(section != nullptr, where + "unknown section [" + section_name + "]");
            continue;
        }
        require(section != nullptr, where + "key outside of any section");
        const auto eq = line.find('=');
        require(eq != std::string_view::npos, where + "expected key = value");
        const std::string key(trim(line.substr(0, eq)));
        const auto value = trim(line.substr(eq + 1));
        Key* target = nullptr;
        for (auto& k : *section)
            if (k.name == key) target = &k;
        require(target != nullptr, where + "unknown key '" + key + "' in [" + section_name + "]");
        require(++seen[section_name + "." + key] == 1, where + "duplicate key '" + key + "'");
        try {
            target->set(value);
        } catch (const InvalidArgument& err) {
            throw InvalidArgument(where + section_name + "." + key + ": " + err.what());
        }
    }
    return config;
}

ProblemConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    require(static_cast<bool>(in), "cannot read config file " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

std::string emit_config(const ProblemConfig& config) {
    ProblemConfig copy = config;
    std::string out;
    for (const auto& [section, keys] : schema(copy)) {
        if (!out.empty()) out += "\n";
        out += "[" + section + "]\n";
        for (const auto& k : keys) out += k.name + " = " + k.get() + "\n";
    }
    return out;
}

void validate_config(const ProblemConfig& c) {
    const auto& d = c.driver;
    require(d.kind == "smooth" || d.kind == "synthetic" || d.kind == "file",
            "driver.kind must be smooth, synthetic or file");
    require(d.dim >= 1, "driver.dim must be >= 1");
    require(d.alpha > 1.0 / 3.0 && d.alpha <= 0.5, "driver.alpha must lie in (1/3, 1/2]");
    require(d.levels >= 1 && d.levels <= 22, "driver.levels must lie in [1, 22]");
    require(d.displacement == "sign" || d.displacement == "gaussian", "driver.displacement must be sign or gaussian");
    require(d.samples >= 2, "driver.samples must be >= 2");
    require(d.kind != "file" || !d.file.empty(), "driver.file is required for kind = file");

    const auto& f = c.field;
    require(f.preset == "zero" || f.preset == "constant" || f.preset == "linear" || f.preset == "sine",
            "field.preset must be zero, constant, linear or sine");
    require(f.n >= 1, "field.n must be >= 1");
    require(f.d >= 0, "field.d must be >= 0");
    require(f.gamma > 1.0 / d.alpha, "field.gamma must exceed 1 / driver.alpha");
    require(f.box > 0.0, "field.box must be positive");

    require(c.z.kind == "canonical" || c.z.kind == "zero" || c.z.kind == "transposed" || c.z.kind == "rough",
            "z.kind must be canonical, zero, transposed or rough");
    require(c.z.exponent >= 0.0, "z.exponent must be >= 0");

    require(c.T > 0.0, "problem.T must be positive");
    require(c.N >= 1, "problem.N must be >= 1");
    require(static_cast<int>(c.y0.size()) == f.n, "problem.y0 must have field.n entries");

    const auto& e = c.experiment;
    require(e.base_N >= 4, "experiment.base_N must be >= 4");
    require(e.levels >= 3, "experiment.levels must be >= 3");
    require(e.beta > 0.0 && e.beta < d.alpha, "experiment.beta must lie in (0, alpha)");
    require(e.q_den > 0 && e.q_num > e.q_den && e.q_num < 2 * e.q_den, "experiment.q must lie in (1, 2)");
    require(std::gcd(e.q_num, e.q_den) == 1, "experiment.q must be in lowest terms");
    require(!e.seeds.empty(), "experiment.seeds must not be empty");
    require(e.check_N >= 2, "experiment.check_N must be >= 2");
    require(e.samples >= 1, "experiment.samples must be >= 1");
    require(e.box > 0.0, "experiment.box must be positive");
}

bool driver_is_seeded(const ProblemConfig& config) { return config.driver.kind == "synthetic"; }

Problem build_problem(const ProblemConfig& c, const std::filesystem::path& base_dir,
                      std::optional<std::uint64_t> seed) {
    validate_config(c);

    SampledPath path;
    if (c.driver.kind == "smooth") {
        path = smooth_curve_path(c.driver.dim, c.T, c.driver.samples);
    } else if (c.driver.kind == "synthetic") {
        const auto kind = c.driver.displacement == "gaussian" ? Displacement::Gaussian : Displacement::Sign;
        path = rescale_time(synth_midpoint_path(seed.value_or(c.driver.seed), c.driver.alpha, c.driver.levels,
                                                c.driver.dim, kind),
                            c.T);
    } else {
        std::filesystem::path file = c.driver.file;
        if (file.is_relative() && !base_dir.empty()) file = base_dir / file;
        std::ifstream in(file);
        require(static_cast<bool>(in), "cannot read driver file " + file.string());
        path = read_path_csv(in);
        require(path.dimension() == c.driver.dim, "driver file dimension differs from driver.dim");
    }
    auto driver = lift_piecewise_linear(std::move(path), c.driver.alpha);

    const int n = c.field.n;
    const int d = c.field.d == 0 ? c.driver.dim : c.field.d;
    VectorField field = [&] {
        if (c.field.preset == "zero") return zero_field(n, d, c.field.gamma);
        if (c.field.preset == "constant") return constant_field(Matrix::Constant(n, d, c.field.scale), c.field.gamma);
        if (c.field.preset == "linear")
            return linear_field_preset(n, d, c.field.seed, c.field.scale, c.field.box, c.field.gamma);
        return sine_field_preset(n, d, c.field.seed, c.field.scale, c.field.gamma);
    }();
    validate_pairing(field, *driver);

    SecondOrderMap z = [&] {
        if (c.z.kind == "canonical") return canonical_z(field, driver);
        if (c.z.kind == "transposed") return transposed_z(field, driver);
        if (c.z.kind == "rough") return rough_z(n, c.z.exponent > 0.0 ? c.z.exponent : c.driver.alpha, c.z.scale);
        return zero_z(n);
    }();

    Vector y0 = Eigen::Map<const Vector>(c.y0.data(), static_cast<Eigen::Index>(c.y0.size()));
    return Problem{driver, std::move(field), std::move(z), std::move(y0), c.T};
}

}  // namespace rdesplit

#include "chemo/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace chemo {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
    double out = 0;
    const auto* end = v.data() + v.size();
    const auto [ptr, ec] = std::from_chars(v.data(), end, out);
    if (ec != std::errc() || ptr != end) throw ConfigError("invalid number for '" + key + "': " + v);
    return out;
}

long parse_long(const std::string& key, const std::string& v) {
    long out = 0;
    const auto* end = v.data() + v.size();
    const auto [ptr, ec] = std::from_chars(v.data(), end, out);
    if (ec != std::errc() || ptr != end) throw ConfigError("invalid integer for '" + key + "': " + v);
    return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("invalid boolean for '" + key + "': " + v);
}

template <typename E>
struct EnumNames {
    std::vector<std::pair<E, std::string>> names;

    E parse(const std::string& key, const std::string& v) const {
        for (const auto& [e, n] : names)
            if (n == v) return e;
        std::string allowed;
        for (const auto& [e, n] : names) allowed += (allowed.empty() ? "" : "|") + n;
        throw ConfigError("invalid value for '" + key + "': " + v + " (expected " + allowed + ")");
    }

    std::string name(E e) const {
        for (const auto& [x, n] : names)
            if (x == e) return n;
        return "?";
    }
};

const EnumNames<Interaction> kInteraction{
    {{Interaction::SoftExponential, "soft"}, {Interaction::HardSphere, "hard"}, {Interaction::None, "none"}}};
const EnumNames<Integrator> kIntegrator{
    {{Integrator::EulerMaruyama, "euler_maruyama"}, {Integrator::Tamed, "tamed"}}};
const EnumNames<Scheduler> kScheduler{{{Scheduler::FixedStep, "fixed"}, {Scheduler::GillespieAlpha, "gillespie"}}};
const EnumNames<FieldBoundary> kBoundary{{{FieldBoundary::Neumann, "neumann"}, {FieldBoundary::Periodic, "periodic"}}};
const EnumNames<InitialField> kInitialField{{{InitialField::Zero, "zero"}, {InitialField::LinearX, "linear_x"}}};
const EnumNames<KernelKind> kKernel{{{KernelKind::Gaussian, "gaussian"}, {KernelKind::CloudInCell, "cic"}}};
const EnumNames<CellSizing> kSizing{
    {{CellSizing::QueryRadius, "radius"}, {CellSizing::TenPerCell, "ten_per_cell"}}};

struct Member {
    std::function<void(SimConfig&, const std::string&, const std::string&)> set;
    std::function<std::string(const SimConfig&)> get;
};

template <typename T>
Member number(T SimConfig::*m) {
    return {[m](SimConfig& c, const std::string& k, const std::string& v) {
                if constexpr (std::is_same_v<T, double>) {
                    c.*m = parse_double(k, v);
                } else {
                    c.*m = parse_long(k, v);
                }
            },
            [m](const SimConfig& c) {
                if constexpr (std::is_same_v<T, double>) {
                    return format_double(c.*m);
                } else {
                    return std::to_string(c.*m);
                }
            }};
}

Member optional_double(std::optional<double> SimConfig::*m) {
    return {[m](SimConfig& c, const std::string& k, const std::string& v) {
                if (v == "auto") {
                    (c.*m).reset();
                } else {
                    c.*m = parse_double(k, v);
                }
            },
            [m](const SimConfig& c) { return (c.*m) ? format_double(*(c.*m)) : std::string("auto"); }};
}

template <typename E>
Member enumeration(E SimConfig::*m, const EnumNames<E>& names) {
    return {[m, &names](SimConfig& c, const std::string& k, const std::string& v) { c.*m = names.parse(k, v); },
            [m, &names](const SimConfig& c) { return names.name(c.*m); }};
}

const std::vector<std::pair<std::string, Member>>& members() {
    static const std::vector<std::pair<std::string, Member>> table = {
        {"experiment", {[](SimConfig& c, const std::string&, const std::string& v) { c.experiment = v; },
                        [](const SimConfig& c) { return c.experiment; }}},
        {"n_alpha", number(&SimConfig::n_alpha)},
        {"n_beta", number(&SimConfig::n_beta)},
        {"sigma", number(&SimConfig::sigma)},
        {"domain_length", number(&SimConfig::domain_length)},
        {"periodic", {[](SimConfig& c, const std::string& k, const std::string& v) { c.periodic = parse_bool(k, v); },
                      [](const SimConfig& c) { return std::string(c.periodic ? "true" : "false"); }}},
        {"D_alpha", number(&SimConfig::D_alpha)},
        {"D_beta", number(&SimConfig::D_beta)},
        {"chi", number(&SimConfig::chi)},
        {"epsilon", number(&SimConfig::epsilon)},
        {"dt", optional_double(&SimConfig::dt)},
        {"T_f", number(&SimConfig::T_f)},
        {"interaction", enumeration(&SimConfig::interaction, kInteraction)},
        {"interaction_cutoff", optional_double(&SimConfig::interaction_cutoff)},
        {"integrator", enumeration(&SimConfig::integrator, kIntegrator)},
        {"cell_sizing", enumeration(&SimConfig::cell_sizing, kSizing)},
        {"r_alpha", number(&SimConfig::r_alpha)},
        {"r_beta", number(&SimConfig::r_beta)},
        {"scheduler", enumeration(&SimConfig::scheduler, kScheduler)},
        {"D_c", number(&SimConfig::D_c)},
        {"k_alpha", number(&SimConfig::k_alpha)},
        {"k_beta", number(&SimConfig::k_beta)},
        {"gamma", number(&SimConfig::gamma)},
        {"n_c", number(&SimConfig::n_c)},
        {"field_boundary",
         {[](SimConfig& c, const std::string& k, const std::string& v) {
              if (v == "auto") {
                  c.field_boundary.reset();
              } else {
                  c.field_boundary = kBoundary.parse(k, v);
              }
          },
          [](const SimConfig& c) { return c.field_boundary ? kBoundary.name(*c.field_boundary) : "auto"; }}},
        {"initial_field", enumeration(&SimConfig::initial_field, kInitialField)},
        {"kernel", enumeration(&SimConfig::kernel, kKernel)},
        {"bandwidth", optional_double(&SimConfig::bandwidth)},
        {"kernel_cutoff", optional_double(&SimConfig::kernel_cutoff)},
        {"samples", number(&SimConfig::samples)},
        {"seed_base", number(&SimConfig::seed_base)},
        {"output_every", number(&SimConfig::output_every)},
        {"snapshots", number(&SimConfig::snapshots)},
        {"hist_bins", number(&SimConfig::hist_bins)},
    };
    return table;
}

}  // namespace

SimConfig parse_config(const std::string& text, SimConfig base) {
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const auto& table = members();
        const auto it = std::find_if(table.begin(), table.end(), [&](const auto& m) { return m.first == key; });
        if (it == table.end()) throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
        it->second.set(base, key, value);
    }
    return base;
}

SimConfig load_config(const std::filesystem::path& path, SimConfig base) {
    std::ifstream in(path);
    if (!in) throw std::ios_base::failure("cannot read config file " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str(), std::move(base));
}

std::vector<std::pair<std::string, std::string>> config_entries(const SimConfig& config) {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& [key, m] : members()) out.emplace_back(key, m.get(config));
    return out;
}

}  // namespace chemo

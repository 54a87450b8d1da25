#include "chemo/io.hpp"

#include "chemo/config.hpp"

#include "json.hpp"

#include <fstream>
#include <sstream>

namespace chemo {

namespace {

std::ofstream open_for_write(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::ios_base::failure("cannot write " + path.string());
    return out;
}

void check(std::ofstream& out, const std::filesystem::path& path) {
    out.flush();
    if (!out) throw std::ios_base::failure("write failed for " + path.string());
}

void write_grid(const std::filesystem::path& path, double t, const Eigen::MatrixXd& values, double min, double max) {
    auto out = open_for_write(path);
    out << "# t=" << format_double(t) << " bins=" << values.rows() << " domain=" << format_double(min) << ','
        << format_double(max) << '\n';
    for (Eigen::Index r = 0; r < values.rows(); ++r) {
        for (Eigen::Index c = 0; c < values.cols(); ++c) {
            if (c > 0) out << ',';
            out << format_double(values(r, c));
        }
        out << '\n';
    }
    check(out, path);
}

std::vector<double> split_doubles(const std::string& line) {
    std::vector<double> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(std::stod(cell));
    return out;
}

}  // namespace

void write_outputs(const EnsembleObservables& obs, RunManifest& manifest, const SimConfig& config,
                   const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw std::ios_base::failure("cannot create output directory " + dir.string() + ": " + ec.message());

    manifest.files.clear();
    {
        const auto path = dir / "counts.csv";
        auto out = open_for_write(path);
        out << "t,n_alpha_mean,n_alpha_se,n_beta_mean,n_beta_se\n";
        for (std::size_t k = 0; k < obs.t.size(); ++k)
            out << format_double(obs.t[k]) << ',' << format_double(obs.n_alpha_mean[k]) << ','
                << format_double(obs.n_alpha_se[k]) << ',' << format_double(obs.n_beta_mean[k]) << ','
                << format_double(obs.n_beta_se[k]) << '\n';
        check(out, path);
        manifest.files.push_back(path.filename().string());
    }
    {
        const auto path = dir / "msd.csv";
        auto out = open_for_write(path);
        out << "t,msd_mean,msd_se\n";
        for (std::size_t k = 0; k < obs.t.size(); ++k)
            out << format_double(obs.t[k]) << ',' << format_double(obs.msd_mean[k]) << ','
                << format_double(obs.msd_se[k]) << '\n';
        check(out, path);
        manifest.files.push_back(path.filename().string());
    }

    const Domain<double> domain = config.domain();
    const Grid<double> grid = config.grid();
    for (std::size_t k = 0; k < obs.snapshots.size(); ++k) {
        const Snapshot& s = obs.snapshots[k];
        const std::string suffix = "_t" + std::to_string(k) + ".csv";
        write_grid(dir / ("hist_alpha" + suffix), s.t, s.hist_alpha, domain.min[0], domain.max[0]);
        write_grid(dir / ("hist_beta" + suffix), s.t, s.hist_beta, domain.min[0], domain.max[0]);
        write_grid(dir / ("field" + suffix), s.t, s.field, grid.min()[0], grid.min()[0] + grid.length());
        manifest.files.push_back("hist_alpha" + suffix);
        manifest.files.push_back("hist_beta" + suffix);
        manifest.files.push_back("field" + suffix);
    }

    nlohmann::ordered_json j;
    j["software"] = "chemo_sim";
    j["version"] = manifest.version;
    j["started_at"] = manifest.started_at;
    j["wall_seconds"] = manifest.wall_seconds;
    nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
    for (const auto& [k, v] : manifest.config) cfg[k] = v;
    j["config"] = cfg;
    nlohmann::ordered_json samples = nlohmann::ordered_json::array();
    for (std::size_t s = 0; s < manifest.seeds.size(); ++s)
        samples.push_back({{"sample", manifest.sample_ids.at(s)}, {"seed", manifest.seeds[s]}});
    j["samples"] = samples;
    j["files"] = manifest.files;

    const auto path = dir / "manifest.json";
    auto out = open_for_write(path);
    out << j.dump(2) << '\n';
    check(out, path);
}

SeriesTable read_series_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::ios_base::failure("cannot read " + path.string());
    SeriesTable table;
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path.string() + " is empty");
    std::stringstream header(line);
    std::string col;
    while (std::getline(header, col, ',')) table.columns.push_back(col);
    while (std::getline(in, line))
        if (!line.empty()) table.rows.push_back(split_doubles(line));
    return table;
}

GridTable read_grid_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::ios_base::failure("cannot read " + path.string());
    GridTable g;
    std::string line;
    if (!std::getline(in, line) || line.rfind("# ", 0) != 0)
        throw std::runtime_error(path.string() + ": missing header line");
    std::stringstream header(line.substr(2));
    std::string token;
    while (header >> token) {
        const auto eq = token.find('=');
        const std::string key = token.substr(0, eq);
        const std::string value = token.substr(eq + 1);
        if (key == "t") {
            g.t = std::stod(value);
        } else if (key == "bins") {
            g.bins = std::stol(value);
        } else if (key == "domain") {
            const auto comma = value.find(',');
            g.min = std::stod(value.substr(0, comma));
            g.max = std::stod(value.substr(comma + 1));
        }
    }
    g.values.resize(g.bins, g.bins);
    for (long r = 0; r < g.bins; ++r) {
        if (!std::getline(in, line)) throw std::runtime_error(path.string() + ": truncated grid");
        const auto row = split_doubles(line);
        if (static_cast<long>(row.size()) != g.bins) throw std::runtime_error(path.string() + ": ragged row");
        for (long c = 0; c < g.bins; ++c) g.values(r, c) = row[static_cast<std::size_t>(c)];
    }
    return g;
}

}  // namespace chemo

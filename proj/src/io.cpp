#include "splap/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "splap/errors.hpp"

namespace splap::io {

std::string format_double(double v) {
    char buf[40];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

json params_to_json(const ProblemParams& params) {
    json j;
    j["N"] = params.dim_N;
    j["p"] = params.p;
    j["q"] = params.q;
    j["delta"] = params.delta;
    j["lambda"] = params.lambda;
    j["n"] = params.reg_index;
    j["q_term"] = params.q_enabled ? 1 : 0;
    return j;
}

ProblemParams params_from_json(const json& j) {
    ProblemParams p;
    p.dim_N = j.at("N").get<int>();
    p.p = j.at("p").get<double>();
    p.q = j.at("q").get<double>();
    p.delta = j.at("delta").get<double>();
    p.lambda = j.at("lambda").get<double>();
    p.reg_index = j.at("n").get<long>();
    if (j.contains("q_term")) p.q_enabled = j.at("q_term").get<int>() != 0;
    return p;
}

json grid_descriptor(const RadialGrid& grid) {
    json j;
    j["m"] = grid.m();
    j["grading"] = grid.grading;
    j["N"] = grid.dim_N;
    return j;
}

std::string field_to_csv(const Field& field, const json& config) {
    std::ostringstream os;
    os << "# schema=" << kSchemaVersion << "\n";
    os << "# config=" << config.dump() << "\n";
    os << "r,value\n";
    for (std::size_t j = 0; j < field.values.size(); ++j)
        os << format_double(field.grid->nodes[j]) << "," << format_double(field.values[j])
           << "\n";
    return os.str();
}

Field field_from_csv(const std::string& text, const GridPtr& grid) {
    Field out(grid);
    std::istringstream is(text);
    std::string line;
    std::size_t j = 0;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#' || line.rfind("r,", 0) == 0) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw Error(errc::ConfigInvalid, "malformed field CSV line: " + line);
        if (j >= out.values.size())
            throw Error(errc::ConfigInvalid, "field CSV has more rows than grid nodes");
        out.values[j++] = std::stod(line.substr(comma + 1));
    }
    if (j != out.values.size())
        throw Error(errc::ConfigInvalid, "field CSV row count does not match the grid");
    return out;
}

std::string diagram_to_csv(const BifurcationDiagram& diagram, const json& config) {
    std::ostringstream os;
    os << "# schema=" << kSchemaVersion << "\n";
    os << "# config=" << config.dump() << "\n";
    os << "lambda,branch,M,sup_norm\n";
    for (const auto& pt : diagram.points)
        os << format_double(pt.lambda) << ","
           << (pt.tag == BranchTag::Lower ? "lower" : "upper") << ","
           << format_double(pt.M_root) << "," << format_double(pt.sup_norm) << "\n";
    return os.str();
}

json diagram_summary(const BifurcationDiagram& diagram, const json& config) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["config"] = config;
    j["fold_lambda"] = diagram.fold_lambda;
    j["picone_bound"] = diagram.picone_bound;
    j["status"] = diagram.open_right            ? "OPEN_RIGHT"
                  : diagram.fold_lambda > 0.0   ? "FOLD_FOUND"
                                                : "NO_TWO_ROOT_REGION";
    j["points"] = diagram.points.size();
    json counts = json::array();
    for (const auto& [lam, count] : diagram.root_counts) counts.push_back({lam, count});
    j["root_counts"] = counts;
    return j;
}

std::string diagram_to_svg(const BifurcationDiagram& diagram) {
    if (diagram.points.empty())
        throw Error(errc::EmptyDiagram, "cannot plot an empty diagram");

    const double W = 640, H = 480, ml = 60, mr = 20, mt = 20, mb = 40;
    double xmax = diagram.picone_bound;
    double ymax = 0.0;
    for (const auto& pt : diagram.points) {
        xmax = std::max(xmax, pt.lambda);
        ymax = std::max(ymax, pt.sup_norm);
    }
    if (xmax <= 0.0) xmax = 1.0;
    if (ymax <= 0.0) ymax = 1.0;
    xmax *= 1.05;
    ymax *= 1.10;
    auto X = [&](double lam) { return ml + (W - ml - mr) * lam / xmax; };
    auto Y = [&](double v) { return H - mb - (H - mt - mb) * v / ymax; };

    auto polyline = [&](BranchTag tag, const char* color) {
        std::ostringstream pts;
        for (const auto& pt : diagram.points)
            if (pt.tag == tag)
                pts << format_double(X(pt.lambda)) << "," << format_double(Y(pt.sup_norm)) << " ";
        std::ostringstream os;
        os << "  <polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\""
           << pts.str() << "\"/>\n";
        return os.str();
    };

    std::ostringstream os;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
       << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
    os << "  <rect x=\"0\" y=\"0\" width=\"" << W << "\" height=\"" << H
       << "\" fill=\"white\"/>\n";
    // axes
    os << "  <path d=\"M " << ml << " " << mt << " L " << ml << " " << H - mb << " L " << W - mr
       << " " << H - mb << "\" stroke=\"black\" fill=\"none\"/>\n";
    os << "  <text x=\"" << W / 2 << "\" y=\"" << H - 8 << "\" font-size=\"12\">lambda</text>\n";
    os << "  <text x=\"8\" y=\"" << mt + 10 << "\" font-size=\"12\">sup-norm</text>\n";
    os << polyline(BranchTag::Lower, "#1f77b4");
    os << polyline(BranchTag::Upper, "#d62728");
    for (const auto& pt : diagram.points)
        os << "  <circle cx=\"" << format_double(X(pt.lambda)) << "\" cy=\""
           << format_double(Y(pt.sup_norm)) << "\" r=\"2.5\" fill=\""
           << (pt.tag == BranchTag::Lower ? "#1f77b4" : "#d62728") << "\"/>\n";
    if (!diagram.open_right && diagram.fold_lambda > 0.0)
        os << "  <line x1=\"" << format_double(X(diagram.fold_lambda)) << "\" y1=\"" << mt
           << "\" x2=\"" << format_double(X(diagram.fold_lambda)) << "\" y2=\"" << H - mb
           << "\" stroke=\"#2ca02c\" stroke-dasharray=\"6,3\"/>\n";
    if (diagram.picone_bound > 0.0)
        os << "  <line x1=\"" << format_double(X(diagram.picone_bound)) << "\" y1=\"" << mt
           << "\" x2=\"" << format_double(X(diagram.picone_bound)) << "\" y2=\"" << H - mb
           << "\" stroke=\"#7f7f7f\" stroke-dasharray=\"2,4\"/>\n";
    os << "</svg>\n";
    return os.str();
}

namespace {
const char* status_name(CheckStatus s) {
    switch (s) {
        case CheckStatus::Pass: return "pass";
        case CheckStatus::Fail: return "fail";
        default: return "inconclusive";
    }
}
}  // namespace

json report_to_json(const VerificationReport& report, const json& config) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["config"] = config;
    j["context"] = report.context;
    json arr = json::array();
    for (const auto& c : report.checks) {
        json jc;
        jc["name"] = c.name;
        jc["anchor"] = c.anchor;
        jc["measured"] = c.measured;
        jc["tolerance"] = c.tolerance;
        jc["status"] = status_name(c.status);
        jc["pass"] = c.status != CheckStatus::Fail;
        jc["note"] = c.note;
        arr.push_back(jc);
    }
    j["checks"] = arr;
    j["failures"] = report.failures();
    return j;
}

std::string report_to_table(const VerificationReport& report) {
    std::ostringstream os;
    os << "check                                     status        measured      tolerance\n";
    os << "------------------------------------------------------------------------------\n";
    for (const auto& c : report.checks) {
        std::string name = c.name;
        if (name.size() > 40) name = name.substr(0, 40);
        os << name << std::string(42 - name.size(), ' ');
        std::string st = status_name(c.status);
        os << st << std::string(14 - st.size(), ' ');
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%-14.6g%-14.6g", c.measured, c.tolerance);
        os << buf << "\n";
    }
    os << "------------------------------------------------------------------------------\n";
    os << report.checks.size() << " checks, " << report.failures() << " failures\n";
    return os.str();
}

std::string calibration_key(int dim_N, double p, double delta) {
    std::ostringstream os;
    os << "N=" << dim_N << ",p=" << format_double(p) << ",delta=" << format_double(delta);
    return os.str();
}

std::map<std::string, double> load_calibration(const std::string& dir) {
    std::map<std::string, double> table;
    const auto path = std::filesystem::path(dir) / "calibration.json";
    std::ifstream in(path);
    if (!in) return table;
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.is_object()) return table;
    for (auto& [key, value] : j.items())
        if (value.is_number()) table[key] = value.get<double>();
    return table;
}

void save_calibration(const std::string& dir, const std::map<std::string, double>& table) {
    std::filesystem::create_directories(dir);
    json j;
    for (const auto& [key, value] : table) j[key] = value;
    write_text_file((std::filesystem::path(dir) / "calibration.json").string(), j.dump(2) + "\n");
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(errc::ConfigInvalid, "cannot open for writing: " + path);
    out << content;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(errc::ConfigInvalid, "cannot open for reading: " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

}  // namespace splap::io

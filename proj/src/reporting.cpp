#include "qmetrix/reporting.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include <openssl/evp.h>

#include "qmetrix/analytic_laws.hpp"

namespace qmetrix {

std::string format_double(double v)
{
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::size_t CsvTable::column(std::string_view name) const
{
    const auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end()) throw std::invalid_argument("CSV has no column '" + std::string(name) + "'");
    return static_cast<std::size_t>(it - columns.begin());
}

std::string CsvTable::meta_value(std::string_view key) const
{
    for (const auto& [k, v] : meta)
        if (k == key) return v;
    throw std::invalid_argument("CSV metadata lacks '" + std::string(key) + "'");
}

namespace {

std::string join(const std::vector<std::string>& cells)
{
    std::string out;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out += ',';
        out += cells[i];
    }
    return out;
}

std::vector<std::string> split(const std::string& line)
{
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double parse_number(std::string_view s)
{
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw std::invalid_argument("not a number: '" + std::string(s) + "'");
    return v;
}

}  // namespace

std::string to_csv_string(const CsvTable& table)
{
    std::string out = "# schema: " + table.schema + "\n";
    for (const auto& [k, v] : table.meta) out += "# " + k + "=" + v + "\n";
    out += join(table.columns) + "\n";
    for (const auto& row : table.rows) out += join(row) + "\n";
    return out;
}

void write_csv(const std::filesystem::path& path, const CsvTable& table)
{
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << to_csv_string(table);
    if (!f) throw std::runtime_error("write failed for " + path.string());
}

CsvTable read_csv(const std::filesystem::path& path)
{
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot read " + path.string());
    CsvTable t;
    std::string line;
    bool header = false;
    while (std::getline(f, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line.rfind("# ", 0) == 0 && !header) {
            const std::string body = line.substr(2);
            if (body.rfind("schema: ", 0) == 0) {
                t.schema = body.substr(8);
            } else if (const auto eq = body.find('='); eq != std::string::npos) {
                t.meta.emplace_back(body.substr(0, eq), body.substr(eq + 1));
            }
            continue;
        }
        if (!header) {
            t.columns = split(line);
            header = true;
        } else {
            t.rows.push_back(split(line));
        }
    }
    if (t.schema.empty()) throw std::runtime_error(path.string() + " has no schema line");
    return t;
}

std::string sha256_file(const std::filesystem::path& path)
{
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot read " + path.string());
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (ctx == nullptr || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
        EVP_MD_CTX_free(ctx);
        throw std::runtime_error("sha256 init failed");
    }
    char buf[1 << 15];
    while (f.read(buf, sizeof buf) || f.gcount() > 0) EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(f.gcount()));
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx, digest, &len);
    EVP_MD_CTX_free(ctx);
    std::ostringstream hex;
    for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int{digest[i]};
    return hex.str();
}

void RunManifest::add_output(const std::filesystem::path& path)
{
    output_digests[path.string()] = sha256_file(path);
}

nlohmann::json RunManifest::to_json() const
{
    return {
        {"command", command},
        {"config", config},
        {"seeds", seeds},
        {"version", version},
        {"wall_seconds", wall_seconds},
        {"outputs", output_digests},
    };
}

std::filesystem::path write_manifest(const RunManifest& manifest, const std::filesystem::path& primary_output)
{
    auto path = primary_output;
    path += ".manifest.json";
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << manifest.to_json().dump(2) << "\n";
    return path;
}

std::vector<double> parse_grid(std::string_view text)
{
    const std::string s(text);
    std::vector<double> out;
    if (s.find(':') != std::string::npos) {
        std::vector<std::string> parts;
        std::istringstream in(s);
        std::string p;
        while (std::getline(in, p, ':')) parts.push_back(p);
        if (parts.size() != 3) throw std::invalid_argument("grid must look like lo:step:hi");
        const double lo = parse_number(parts[0]);
        const double step = parse_number(parts[1]);
        const double hi = parse_number(parts[2]);
        if (!(step > 0.0) || hi < lo) throw std::invalid_argument("grid needs step > 0 and hi >= lo");
        const auto n = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
        for (long i = 0; i <= n; ++i) out.push_back(std::min(hi, lo + static_cast<double>(i) * step));
        if (hi - out.back() > 1e-9 * std::max(1.0, std::abs(hi))) out.push_back(hi);
        else out.back() = hi;
    } else {
        std::istringstream in(s);
        std::string p;
        while (std::getline(in, p, ',')) {
            p.erase(0, p.find_first_not_of(' '));
            p.erase(p.find_last_not_of(' ') + 1);
            if (!p.empty()) out.push_back(parse_number(p));
        }
    }
    if (out.empty()) throw std::invalid_argument("empty grid");
    return out;
}

void write_svg_chart(const std::filesystem::path& path, std::string_view title, std::string_view x_label,
                     std::string_view y_label, const std::vector<SvgSeries>& series)
{
    double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
    for (const auto& s : series) {
        for (double v : s.x) x0 = std::min(x0, v), x1 = std::max(x1, v);
        for (double v : s.y) y0 = std::min(y0, v), y1 = std::max(y1, v);
    }
    if (!std::isfinite(x0) || !std::isfinite(y0)) throw std::invalid_argument("chart has no data");
    if (x1 == x0) x1 = x0 + 1.0;
    if (y1 == y0) y1 = y0 + 1.0;
    const double width = 640, height = 420, left = 70, right = 20, top = 40, bottom = 50;
    auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * (width - left - right); };
    auto py = [&](double y) { return height - bottom - (y - y0) / (y1 - y0) * (height - top - bottom); };
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

    std::ostringstream svg;
    svg << std::setprecision(6);
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<text x=\"" << width / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << title << "</text>\n";
    svg << "<line x1=\"" << left << "\" y1=\"" << height - bottom << "\" x2=\"" << width - right << "\" y2=\""
        << height - bottom << "\" stroke=\"black\"/>\n";
    svg << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << height - bottom
        << "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 5; ++i) {
        const double xv = x0 + (x1 - x0) * i / 5.0;
        const double yv = y0 + (y1 - y0) * i / 5.0;
        svg << "<text x=\"" << px(xv) << "\" y=\"" << height - bottom + 16 << "\" text-anchor=\"middle\">" << xv
            << "</text>\n";
        svg << "<text x=\"" << left - 6 << "\" y=\"" << py(yv) + 4 << "\" text-anchor=\"end\">" << yv << "</text>\n";
    }
    svg << "<text x=\"" << width / 2 << "\" y=\"" << height - 10 << "\" text-anchor=\"middle\">" << x_label
        << "</text>\n";
    svg << "<text x=\"16\" y=\"" << height / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " << height / 2
        << ")\">" << y_label << "</text>\n";
    for (std::size_t s = 0; s < series.size(); ++s) {
        const char* color = colors[s % std::size(colors)];
        svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < std::min(series[s].x.size(), series[s].y.size()); ++i)
            svg << px(series[s].x[i]) << "," << py(series[s].y[i]) << " ";
        svg << "\"/>\n";
        svg << "<text x=\"" << width - right - 150 << "\" y=\"" << top + 16 * (s + 1) << "\" fill=\"" << color << "\">"
            << series[s].label << "</text>\n";
    }
    svg << "</svg>\n";
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << svg.str();
}

CsvTable law_table(Measure measure, std::span<const double> values, int local_dim, bool unequal_d3)
{
    if (unequal_d3 && local_dim != 3) throw std::invalid_argument("the unequal-spacing law is for d = 3");
    if (local_dim < 2 || local_dim > 5) throw std::invalid_argument("analytic laws cover d in 2..5");
    if (measure == Measure::Entropy) {
        for (double v : values)
            if (v < 0.0 || v > 1.0) throw std::invalid_argument("analytic entropy law covers S in [0, 1]");
    } else {
        for (double v : values)
            if (v < 0.0 || v > 0.5) throw std::invalid_argument("analytic GGM law covers G in [0, 1/2]");
    }
    CsvTable t;
    t.schema = "qmetrix.law/v1";
    t.meta = {{"measure", std::string(to_string(measure))},
              {"d", std::to_string(local_dim)},
              {"spectrum", unequal_d3 ? "custom:0,2,3" : (local_dim == 2 ? "pauli-z" : "spin-rescaled")}};
    t.columns = {"measure", "value", "q_opt", "stddev"};
    for (double v : values) {
        const auto pt = law_point(measure, v, unequal_d3);
        t.rows.push_back({std::string(to_string(measure)), format_double(v), format_double(pt.q_opt), format_double(pt.stddev)});
    }
    return t;
}

CsvTable sampler_table(const SampleReport& report)
{
    const auto& cfg = report.config;
    CsvTable t;
    t.schema = "qmetrix.sample-gm/v1";
    t.meta = {{"N", std::to_string(cfg.parties)},
              {"d", std::to_string(cfg.local_dim)},
              {"nu", std::to_string(cfg.samples)},
              {"bin_width", format_double(cfg.bin_width)},
              {"seed", std::to_string(cfg.seed)},
              {"chunk_size", std::to_string(cfg.chunk_size)},
              {"out_of_range", std::to_string(report.out_of_range)}};
    t.columns = {"k", "gm_lo", "gm_hi", "count", "q_max", "stddev"};
    for (const auto& b : report.bins) {
        t.rows.push_back({std::to_string(b.k), format_double(b.gm_lo), format_double(b.gm_hi), std::to_string(b.count),
                          b.q_max ? format_double(*b.q_max) : "",
                          b.q_max && *b.q_max > 0.0 ? format_double(cramer_rao_stddev(*b.q_max)) : ""});
    }
    return t;
}

SampleReport sampler_report_from_table(const CsvTable& table)
{
    if (table.schema != "qmetrix.sample-gm/v1") throw std::invalid_argument("not a sample-gm file: " + table.schema);
    SampleReport r;
    r.config.parties = std::stoi(table.meta_value("N"));
    r.config.local_dim = std::stoi(table.meta_value("d"));
    r.config.samples = std::stoull(table.meta_value("nu"));
    r.config.bin_width = parse_number(table.meta_value("bin_width"));
    r.config.seed = std::stoull(table.meta_value("seed"));
    r.out_of_range = std::stoull(table.meta_value("out_of_range"));
    const auto ck = table.column("k"), clo = table.column("gm_lo"), chi = table.column("gm_hi"),
               cc = table.column("count"), cq = table.column("q_max");
    for (const auto& row : table.rows) {
        BinReport b{std::stoi(row.at(ck)), parse_number(row.at(clo)), parse_number(row.at(chi)), std::stoull(row.at(cc)), {}, {}, {}};
        if (!row.at(cq).empty()) b.q_max = parse_number(row.at(cq));
        r.bins.push_back(std::move(b));
    }
    return r;
}

}  // namespace qmetrix

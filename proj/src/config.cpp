#include "lamcon/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace lamcon {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

double to_double(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigParseError("config key '" + key + "': cannot parse number '" + v + "'");
    }
}

long to_int(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        const long x = std::stol(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigParseError("config key '" + key + "': cannot parse integer '" + v + "'");
    }
}

const std::set<std::string>& known_steps() {
    static const std::set<std::string> steps{"build", "energy", "twist",
                                             "dual",  "residue", "lightcone"};
    return steps;
}

}  // namespace

cplx parse_complex(const std::string& s0) {
    std::string s = trim(s0);
    if (s.empty()) throw ConfigParseError("empty complex literal");
    if (s.back() != 'i' && s.back() != 'I') {
        size_t pos = 0;
        const double re = std::stod(s, &pos);
        if (pos != s.size()) throw ConfigParseError("cannot parse complex '" + s0 + "'");
        return cplx(re, 0.0);
    }
    s.pop_back();  // drop the trailing i
    // split at the last +/- that is not an exponent sign and not leading
    size_t split = std::string::npos;
    for (size_t i = s.size(); i-- > 1;) {
        if ((s[i] == '+' || s[i] == '-') && s[i - 1] != 'e' && s[i - 1] != 'E') {
            split = i;
            break;
        }
    }
    try {
        if (split == std::string::npos) {
            // pure imaginary: "i", "-i", "2.5i"
            if (s.empty() || s == "+") return cplx(0.0, 1.0);
            if (s == "-") return cplx(0.0, -1.0);
            return cplx(0.0, std::stod(s));
        }
        const double re = std::stod(s.substr(0, split));
        std::string im = s.substr(split);
        if (im == "+") return cplx(re, 1.0);
        if (im == "-") return cplx(re, -1.0);
        return cplx(re, std::stod(im));
    } catch (const std::exception&) {
        throw ConfigParseError("cannot parse complex '" + s0 + "'");
    }
}

std::string format_complex(cplx v) {
    char buf[80];
    std::snprintf(buf, sizeof(buf), "%.17g%+.17gi", v.real(), v.imag());
    return buf;
}

ExperimentConfig parse_config_text(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigParseError("config line " + std::to_string(lineno) +
                                   ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigParseError("config line " + std::to_string(lineno) +
                                                ": empty key");
        if (kv.count(key))
            throw ConfigParseError("config key '" + key + "' given twice");
        kv[key] = val;
    }

    ExperimentConfig cfg;
    cfg.tolerances.clear();
    cfg.report_formats.clear();
    cfg.pipeline.clear();

    // domain assembled after the scan
    std::string dkind = "torus";
    cplx modulus(0.0, 1.0);
    double x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;
    int nx = 64, ny = 64;

    for (const auto& [key, val] : kv) {
        if (key == "schema_version")
            cfg.schema_version = static_cast<int>(to_int(key, val));
        else if (key == "name")
            cfg.name = val;
        else if (key == "seed")
            cfg.seed = static_cast<std::uint64_t>(to_int(key, val));
        else if (key == "out_dir")
            cfg.out_dir = val;
        else if (key == "domain.kind")
            dkind = val;
        else if (key == "domain.modulus")
            modulus = parse_complex(val);
        else if (key == "domain.nx")
            nx = static_cast<int>(to_int(key, val));
        else if (key == "domain.ny")
            ny = static_cast<int>(to_int(key, val));
        else if (key == "domain.x0")
            x0 = to_double(key, val);
        else if (key == "domain.x1")
            x1 = to_double(key, val);
        else if (key == "domain.y0")
            y0 = to_double(key, val);
        else if (key == "domain.y1")
            y1 = to_double(key, val);
        else if (key == "solution.target") {
            if (val == "h3")
                cfg.target = Target::H3;
            else if (val == "s3")
                cfg.target = Target::S3;
            else
                throw ConfigParseError("solution.target must be h3 or s3, got '" + val + "'");
        } else if (key == "solution.solver") {
            if (val != "constant" && val != "gordon_strip")
                throw ConfigParseError("solution.solver must be constant or gordon_strip");
            cfg.solver = val;
        } else if (key == "solution.q0")
            cfg.q0 = parse_complex(val);
        else if (key == "solution.u0") {
            if (val == "min")
                cfg.u0_at_minimum = true;
            else
                cfg.u0 = to_double(key, val);
        } else if (key == "solution.du0")
            cfg.du0 = to_double(key, val);
        else if (key == "pipeline") {
            cfg.pipeline = split_list(val);
            for (const auto& step : cfg.pipeline)
                if (!known_steps().count(step))
                    throw ConfigParseError("unknown pipeline step '" + step + "'");
        } else if (key == "report.formats") {
            cfg.report_formats = split_list(val);
            for (const auto& f : cfg.report_formats)
                if (f != "json" && f != "csv")
                    throw ConfigParseError("unknown report format '" + f + "'");
        } else if (key.rfind("tolerance.", 0) == 0) {
            const std::string name = key.substr(10);
            const double tol = to_double(key, val);
            if (!(tol > 0.0))
                throw ConfigParseError("tolerance '" + name + "' must be positive");
            cfg.tolerances[name] = tol;
        } else {
            throw ConfigParseError("unknown config key '" + key + "'");
        }
    }

    if (dkind == "torus")
        cfg.domain = Domain::torus(modulus, nx, ny);
    else if (dkind == "patch")
        cfg.domain = Domain::patch(x0, x1, y0, y1, nx, ny);
    else
        throw ConfigParseError("domain.kind must be torus or patch");

    if (cfg.report_formats.empty()) cfg.report_formats = {"json"};
    return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigParseError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << is.rdbuf();
    return parse_config_text(ss.str());
}

std::string config_to_text(const ExperimentConfig& cfg) {
    std::ostringstream os;
    os.precision(17);
    os << "schema_version = " << cfg.schema_version << "\n";
    os << "name = " << cfg.name << "\n";
    os << "seed = " << cfg.seed << "\n";
    os << "out_dir = " << cfg.out_dir << "\n";
    if (cfg.domain.is_torus()) {
        os << "domain.kind = torus\n";
        os << "domain.modulus = " << format_complex(cfg.domain.modulus()) << "\n";
    } else {
        os << "domain.kind = patch\n";
        os << "domain.x0 = " << cfg.domain.x0() << "\n";
        os << "domain.x1 = " << cfg.domain.x1() << "\n";
        os << "domain.y0 = " << cfg.domain.y0() << "\n";
        os << "domain.y1 = " << cfg.domain.y1() << "\n";
    }
    os << "domain.nx = " << cfg.domain.nx() << "\n";
    os << "domain.ny = " << cfg.domain.ny() << "\n";
    os << "solution.target = " << (cfg.target == Target::H3 ? "h3" : "s3") << "\n";
    os << "solution.solver = " << cfg.solver << "\n";
    os << "solution.q0 = " << format_complex(cfg.q0) << "\n";
    if (cfg.u0_at_minimum)
        os << "solution.u0 = min\n";
    else
        os << "solution.u0 = " << cfg.u0 << "\n";
    os << "solution.du0 = " << cfg.du0 << "\n";
    if (!cfg.pipeline.empty()) {
        os << "pipeline = ";
        for (size_t i = 0; i < cfg.pipeline.size(); ++i)
            os << (i ? ", " : "") << cfg.pipeline[i];
        os << "\n";
    }
    for (const auto& [name, tol] : cfg.tolerances)
        os << "tolerance." << name << " = " << tol << "\n";
    os << "report.formats = ";
    for (size_t i = 0; i < cfg.report_formats.size(); ++i)
        os << (i ? "," : "") << cfg.report_formats[i];
    os << "\n";
    return os.str();
}

}  // namespace lamcon

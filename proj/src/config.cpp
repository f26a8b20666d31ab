#include "corofsi/config.hpp"

#include <charconv>
#include <cmath>
#include <map>
#include <sstream>

#include "corofsi/spectral.hpp"

namespace corofsi {

namespace {

struct Document {
    // section -> key -> (value, line)
    std::map<std::string, std::map<std::string, std::pair<std::string, int>>> kv;
};

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

Document tokenize(const std::string& text) {
    Document doc;
    std::istringstream in(text);
    std::string line, section = "run";
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ParseError("line " + std::to_string(lineno) +
                                 ": unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError("line " + std::to_string(lineno) +
                             ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty())
            throw ParseError("line " + std::to_string(lineno) + ": empty key");
        if (doc.kv[section].count(key))
            throw ParseError("line " + std::to_string(lineno) +
                             ": duplicate key '" + key + "'");
        doc.kv[section][key] = {val, lineno};
    }
    return doc;
}

/// Typed readers; each consumes the key so leftovers can be rejected.
class Section {
  public:
    Section(Document& doc, std::string name) : doc_(doc), name_(std::move(name)) {}

    bool present() const { return doc_.kv.count(name_) > 0; }

    double number(const std::string& key, double dflt) {
        const std::string* s = take(key);
        if (!s) return dflt;
        try {
            std::size_t pos = 0;
            const double v = std::stod(*s, &pos);
            if (pos != s->size()) throw std::invalid_argument(*s);
            return v;
        } catch (const std::exception&) {
            throw ParseError("line " + std::to_string(line_) + ": key '" + key +
                             "' is not a number: " + *s);
        }
    }

    int integer(const std::string& key, int dflt) {
        const double v = number(key, static_cast<double>(dflt));
        if (v != std::floor(v))
            throw ParseError("key '" + key + "' must be an integer");
        return static_cast<int>(v);
    }

    std::uint64_t unsigned64(const std::string& key, std::uint64_t dflt) {
        const std::string* s = take(key);
        if (!s) return dflt;
        std::uint64_t v = 0;
        const auto res = std::from_chars(s->data(), s->data() + s->size(), v);
        if (res.ec != std::errc{} || res.ptr != s->data() + s->size())
            throw ParseError("key '" + key + "' is not an unsigned integer");
        return v;
    }

    std::string word(const std::string& key, const std::string& dflt) {
        const std::string* s = take(key);
        return s ? *s : dflt;
    }

    std::vector<double> number_list(const std::string& key,
                                    const std::vector<double>& dflt) {
        const std::string* s = take(key);
        if (!s) return dflt;
        std::vector<double> out;
        std::string item;
        std::istringstream in(*s);
        while (std::getline(in, item, ',')) {
            item = trim(item);
            if (item.empty())
                throw ParseError("key '" + key + "': empty list item");
            out.push_back(std::stod(item));
        }
        return out;
    }

    void reject_unknown() const {
        if (!doc_.kv.count(name_)) return;
        for (const auto& [key, val] : doc_.kv.at(name_)) {
            throw ParseError("line " + std::to_string(val.second) +
                             ": unknown key '" + key + "' in [" + name_ + "]");
        }
    }

  private:
    const std::string* take(const std::string& key) {
        auto sec = doc_.kv.find(name_);
        if (sec == doc_.kv.end()) return nullptr;
        auto it = sec->second.find(key);
        if (it == sec->second.end()) return nullptr;
        line_ = it->second.second;
        static thread_local std::string held;
        held = it->second.first;
        sec->second.erase(it);
        return &held;
    }

    Document& doc_;
    std::string name_;
    int line_ = 0;
};

SimConfig read_run_section(Document& doc) {
    Section run(doc, "run");
    SimConfig c;
    c.eps = run.number("eps", c.eps);
    c.gamma = run.number("gamma", c.gamma);
    c.L = run.number("L", c.L);
    c.T_final = run.number("T_final", c.T_final);
    c.geometry = run.word("geometry", c.geometry);
    c.nx = run.integer("nx", c.nx);
    c.ny = run.integer("ny", c.ny);
    c.ny_s = run.integer("ny_s", c.ny_s);
    c.dt = run.number("dt", c.dt);
    c.subiterations = run.integer("subiterations", c.subiterations);
    c.output_cadence = run.integer("output_cadence", c.output_cadence);
    c.seed = run.unsigned64("seed", c.seed);
    c.eta0_mode = run.integer("eta0_mode", c.eta0_mode);
    c.eta0_amp = run.number("eta0_amp", c.eta0_amp);
    c.etastar_mode = run.integer("etastar_mode", c.etastar_mode);
    c.etastar_amp = run.number("etastar_amp", c.etastar_amp);
    c.u0_kind = run.word("u0", c.u0_kind);
    c.rho0_base = run.number("rho0_base", c.rho0_base);
    c.rho0_bump_amp = run.number("rho0_bump_amp", c.rho0_bump_amp);
    c.rho0_bump_x = run.number("rho0_bump_x", c.rho0_bump_x);
    c.rho0_bump_y = run.number("rho0_bump_y", c.rho0_bump_y);
    c.rho0_bump_width = run.number("rho0_bump_width", c.rho0_bump_width);
    c.t0_base = run.number("t0_base", c.t0_base);
    c.t0_dev_amp = run.number("t0_dev_amp", c.t0_dev_amp);
    c.t0_dev_mode = run.integer("t0_dev_mode", c.t0_dev_mode);
    run.reject_unknown();
    return c;
}

void reject_other_sections(const Document& doc,
                           std::initializer_list<const char*> allowed) {
    for (const auto& [name, keys] : doc.kv) {
        bool ok = false;
        for (const char* a : allowed)
            if (name == a) ok = true;
        if (!ok && !keys.empty())
            throw ParseError("unknown section [" + name + "]");
    }
}

} // namespace

void SimConfig::validate() const {
    if (eps < 0.0) throw ValidationError("eps must satisfy eps >= 0");
    if (gamma <= 0.0) throw ValidationError("gamma must satisfy gamma > 0");
    if (dt <= 0.0) throw ValidationError("dt must satisfy dt > 0");
    if (T_final < 0.0) throw ValidationError("T_final must satisfy T_final >= 0");
    if (geometry != "channel" && geometry != "disk")
        throw ValidationError("geometry must be 'channel' or 'disk'");
    if (nx < 8 || ny < 8) throw ValidationError("grid sizes must satisfy nx, ny >= 8");
    if (ny_s < 8 || !is_power_of_two(ny_s))
        throw ValidationError("ny_s must be a power of two >= 8");
    if (subiterations < 1)
        throw ValidationError("subiterations must satisfy subiterations >= 1");
    if (output_cadence < 1)
        throw ValidationError("output_cadence must satisfy output_cadence >= 1");
    ReferenceGeometry rg{instance(), L};
    rg.validate();
    if (std::abs(eta0_amp) >= L)
        throw ValidationError("eta0 amplitude >= L violates ||eta0||_inf < L");
    if (u0_kind != "zero" && u0_kind != "lifted")
        throw ValidationError("u0 must be 'zero' or 'lifted'");
    if (etastar_amp != 0.0 && u0_kind == "zero")
        throw ValidationError(
            "etastar_amp != 0 requires u0 = lifted (compatibility u0 = eta* n)");
    if (rho0_base + rho0_bump_amp < 0.0 || rho0_base < 0.0)
        throw ValidationError("rho0 must be nonnegative");
    if (rho0_bump_width <= 0.0)
        throw ValidationError("rho0_bump_width must be positive");
    if (t0_base <= std::abs(t0_dev_amp) * 1.2)
        throw ValidationError("T0 must be SPD: t0_base > 1.2 |t0_dev_amp|");
    if (geometry == "disk" && (eta0_amp != 0.0 || etastar_amp != 0.0))
        throw ValidationError(
            "coupled runs use the channel instance; disk runs require eta0 = 0");
}

void SweepConfig::validate() const {
    base.validate();
    if (eps_list.size() < 2)
        throw ValidationError("eps_list needs at least two entries");
    for (std::size_t i = 0; i < eps_list.size(); ++i) {
        if (eps_list[i] <= 0.0)
            throw ValidationError("eps_list entries must be positive");
        if (i > 0 && eps_list[i] >= eps_list[i - 1])
            throw ValidationError("eps_list must be strictly decreasing");
    }
}

void OracleConfig::validate() const {
    if (nq < 16) throw ValidationError("oracle nq must be >= 16");
    if (q_max < 6.0)
        throw ValidationError("oracle q_max must be >= 6 (Gaussian tail control)");
    if (dt <= 0.0 || t_end <= 0.0)
        throw ValidationError("oracle dt and t_end must be positive");
    if (rho0 <= 0.0) throw ValidationError("oracle rho0 must be positive");
    if (!(SymMat2{t0_11, t0_12, t0_22}.spd()))
        throw ValidationError("oracle T0 must be SPD");
}

SimConfig parse_run_config(const std::string& text) {
    Document doc = tokenize(text);
    SimConfig c = read_run_section(doc);
    reject_other_sections(doc, {"run", "sweep", "oracle"});
    c.validate();
    return c;
}

SweepConfig parse_sweep_config(const std::string& text) {
    Document doc = tokenize(text);
    SweepConfig s;
    s.base = read_run_section(doc);
    Section sweep(doc, "sweep");
    s.eps_list = sweep.number_list("eps_list", {1e-1, 3e-2, 1e-2, 3e-3, 1e-3});
    sweep.reject_unknown();
    reject_other_sections(doc, {"run", "sweep", "oracle"});
    s.validate();
    return s;
}

OracleConfig parse_oracle_config(const std::string& text) {
    Document doc = tokenize(text);
    Section sec(doc, "oracle");
    OracleConfig c;
    c.nq = sec.integer("nq", c.nq);
    c.q_max = sec.number("q_max", c.q_max);
    c.theta = sec.number("theta", c.theta);
    c.t_end = sec.number("t_end", c.t_end);
    c.dt = sec.number("dt", c.dt);
    c.rho0 = sec.number("rho0", c.rho0);
    c.t0_11 = sec.number("t0_11", c.t0_11);
    c.t0_12 = sec.number("t0_12", c.t0_12);
    c.t0_22 = sec.number("t0_22", c.t0_22);
    sec.reject_unknown();
    reject_other_sections(doc, {"run", "sweep", "oracle"});
    c.validate();
    return c;
}

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void render_run(std::ostringstream& out, const SimConfig& c) {
    out << "[run]\n";
    out << "geometry = " << c.geometry << "\n";
    out << "eps = " << fmt(c.eps) << "\n";
    out << "gamma = " << fmt(c.gamma) << "\n";
    out << "L = " << fmt(c.L) << "\n";
    out << "T_final = " << fmt(c.T_final) << "\n";
    out << "nx = " << c.nx << "\n";
    out << "ny = " << c.ny << "\n";
    out << "ny_s = " << c.ny_s << "\n";
    out << "dt = " << fmt(c.dt) << "\n";
    out << "subiterations = " << c.subiterations << "\n";
    out << "output_cadence = " << c.output_cadence << "\n";
    out << "seed = " << c.seed << "\n";
    out << "eta0_mode = " << c.eta0_mode << "\n";
    out << "eta0_amp = " << fmt(c.eta0_amp) << "\n";
    out << "etastar_mode = " << c.etastar_mode << "\n";
    out << "etastar_amp = " << fmt(c.etastar_amp) << "\n";
    out << "u0 = " << c.u0_kind << "\n";
    out << "rho0_base = " << fmt(c.rho0_base) << "\n";
    out << "rho0_bump_amp = " << fmt(c.rho0_bump_amp) << "\n";
    out << "rho0_bump_x = " << fmt(c.rho0_bump_x) << "\n";
    out << "rho0_bump_y = " << fmt(c.rho0_bump_y) << "\n";
    out << "rho0_bump_width = " << fmt(c.rho0_bump_width) << "\n";
    out << "t0_base = " << fmt(c.t0_base) << "\n";
    out << "t0_dev_amp = " << fmt(c.t0_dev_amp) << "\n";
    out << "t0_dev_mode = " << c.t0_dev_mode << "\n";
}

} // namespace

std::string render_config(const SimConfig& cfg) {
    std::ostringstream out;
    render_run(out, cfg);
    return out.str();
}

std::string render_config(const SweepConfig& cfg) {
    std::ostringstream out;
    render_run(out, cfg.base);
    out << "\n[sweep]\neps_list = ";
    for (std::size_t i = 0; i < cfg.eps_list.size(); ++i) {
        if (i) out << ", ";
        out << fmt(cfg.eps_list[i]);
    }
    out << "\n";
    return out.str();
}

std::string render_config(const OracleConfig& cfg) {
    std::ostringstream out;
    out << "[oracle]\n";
    out << "nq = " << cfg.nq << "\n";
    out << "q_max = " << fmt(cfg.q_max) << "\n";
    out << "theta = " << fmt(cfg.theta) << "\n";
    out << "t_end = " << fmt(cfg.t_end) << "\n";
    out << "dt = " << fmt(cfg.dt) << "\n";
    out << "rho0 = " << fmt(cfg.rho0) << "\n";
    out << "t0_11 = " << fmt(cfg.t0_11) << "\n";
    out << "t0_12 = " << fmt(cfg.t0_12) << "\n";
    out << "t0_22 = " << fmt(cfg.t0_22) << "\n";
    return out.str();
}

} // namespace corofsi

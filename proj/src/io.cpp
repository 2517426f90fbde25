#include "stc/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace stc {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

std::string matrix_to_json(const Eigen::MatrixXd& m) {
    std::ostringstream os;
    os << '[';
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        if (i) os << ',';
        os << '[';
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j) os << ',';
            os << format_double(m(i, j));
        }
        os << ']';
    }
    os << ']';
    return os.str();
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& j) {
    const auto rows = j.size();
    const auto cols = rows ? j.at(0).size() : 0;
    Eigen::MatrixXd m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t k = 0; k < cols; ++k) m(i, k) = j.at(i).at(k).get<double>();
    return m;
}

}  // namespace

std::string bank_to_json(const CertificateBank& bank) {
    std::ostringstream os;
    os << "{\n  \"p_matrix\": " << matrix_to_json(bank.p_matrix) << ",\n  \"theta\": "
       << format_double(bank.theta) << ",\n  \"levels\": [";
    for (std::size_t l = 0; l < bank.levels.size(); ++l) {
        const auto& level = bank.levels[l];
        if (l) os << ',';
        os << "\n    {\"c\": "
           << (std::isfinite(level.c) ? format_double(level.c) : std::string("null"))
           << ", \"sets\": [";
        for (std::size_t i = 0; i < level.sets.size(); ++i) {
            const auto& s = level.sets[i];
            if (i) os << ',';
            os << "\n      {\"epsilon\": " << format_double(s.epsilon) << ", \"gamma\": "
               << format_double(s.gamma) << ", \"l_gain\": " << format_double(s.l_gain) << '}';
        }
        os << "\n    ]}";
    }
    os << "\n  ]\n}\n";
    return os.str();
}

CertificateBank bank_from_json(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    CertificateBank bank;
    bank.p_matrix = matrix_from_json(j.at("p_matrix"));
    bank.theta = j.at("theta").get<double>();
    for (const auto& jl : j.at("levels")) {
        LevelCertificate level;
        level.c = jl.at("c").is_null() ? std::numeric_limits<double>::infinity()
                                       : jl.at("c").get<double>();
        for (const auto& js : jl.at("sets"))
            level.sets.push_back({js.at("epsilon").get<double>(), js.at("gamma").get<double>(),
                                  js.at("l_gain").get<double>()});
        bank.levels.push_back(std::move(level));
    }
    if (bank.levels.empty()) throw std::runtime_error("bank_from_json: no levels");
    return bank;
}

void save_bank(const CertificateBank& bank, const std::string& path) {
    write_text_file(path, bank_to_json(bank));
}

CertificateBank load_bank(const std::string& path) { return bank_from_json(read_text_file(path)); }

std::string trajectory_to_csv(const HybridTrajectory& traj) {
    std::ostringstream os;
    const Eigen::Index n_x = traj.samples.empty() ? 0 : traj.samples.front().x.size();
    os << "t,j";
    for (Eigen::Index i = 0; i < n_x; ++i) os << ",x" << (i + 1);
    os << ",V,interval,event_flag,level,fallback_flag\n";
    auto row = [&](double t, int j, const Eigen::VectorXd& x, double v, double interval,
                   int event_flag, int level, int fallback) {
        os << format_double(t) << ',' << j;
        for (Eigen::Index i = 0; i < n_x; ++i) os << ',' << format_double(x(i));
        os << ',' << format_double(v) << ',' << format_double(interval) << ',' << event_flag
           << ',' << level << ',' << fallback << '\n';
    };
    std::size_t s = 0;
    for (const auto& ev : traj.events) {
        // State at the sampling instant: the last logged sample before the jump.
        while (s + 1 < traj.samples.size() && traj.samples[s + 1].j < ev.j) ++s;
        row(ev.t, ev.j, traj.samples[s].x, ev.v, ev.gamma, 1, ev.level, ev.fallback ? 1 : 0);
        for (std::size_t k = s; k < traj.samples.size(); ++k) {
            if (traj.samples[k].j != ev.j) continue;
            const auto& sm = traj.samples[k];
            row(sm.t, sm.j, sm.x, sm.v, ev.gamma, 0, ev.level, ev.fallback ? 1 : 0);
        }
    }
    return os.str();
}

void save_trajectory_csv(const HybridTrajectory& traj, const std::string& path) {
    write_text_file(path, trajectory_to_csv(traj));
}

std::string summary_to_json(const HybridTrajectory& traj, const BoundReport& report) {
    double min_iv = std::numeric_limits<double>::infinity(), max_iv = 0.0;
    for (const auto& ev : traj.events) {
        min_iv = std::min(min_iv, ev.gamma);
        max_iv = std::max(max_iv, ev.gamma);
    }
    const double final_v = traj.samples.empty() ? 0.0 : traj.samples.back().v;
    std::ostringstream os;
    os << "{\n  \"num_events\": " << traj.events.size() << ",\n  \"min_interval\": "
       << format_double(traj.events.empty() ? 0.0 : min_iv) << ",\n  \"max_interval\": "
       << format_double(max_iv) << ",\n  \"final_V\": " << format_double(final_v)
       << ",\n  \"bound_report\": {\"passed\": " << (report.passed ? "true" : "false")
       << ", \"worst_margin\": "
       << (std::isfinite(report.worst_margin) ? format_double(report.worst_margin) : "null")
       << ", \"worst_certificate_eig\": "
       << (std::isfinite(report.worst_certificate_eig)
               ? format_double(report.worst_certificate_eig)
               : "null")
       << ", \"checked_samples\": " << report.checked_samples
       << ", \"violations\": " << report.violations.size() << "}\n}\n";
    return os.str();
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << text;
}

std::string read_text_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for reading: " + path);
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

}  // namespace stc

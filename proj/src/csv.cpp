#include "railfd/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace railfd {

std::string format_sig9(double x) {
    if (std::isinf(x)) return x > 0 ? "INF" : "-INF";
    if (std::isnan(x)) return "NAN";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", x);
    return buf;
}

std::string render_trains_csv(const std::vector<TrainState>& trains) {
    std::ostringstream out;
    out << "n,t_arr_h,t_dep_h,T_h,h_a_h,h_d_h,q_trph,k_trpkm,a_p_paxph,regime\n";
    for (const auto& s : trains) {
        out << format_sig9(s.n) << ',' << format_sig9(s.t_arr) << ','
            << format_sig9(s.t_dep) << ',' << format_sig9(s.T) << ','
            << format_sig9(s.h_a) << ',' << format_sig9(s.h_d) << ','
            << format_sig9(s.q) << ',' << format_sig9(s.k) << ','
            << format_sig9(s.a_p) << ','
            << (s.regime == Regime::FreeFlow ? "free" : "congested") << '\n';
    }
    return out.str();
}

std::string render_curves_csv(const CurveSamples& c) {
    std::ostringstream out;
    out << "t_h,A,D,Ap,Dp\n";
    for (std::size_t i = 0; i < c.t.size(); ++i) {
        out << format_sig9(c.t[i]) << ',' << format_sig9(c.a[i]) << ','
            << format_sig9(c.d[i]) << ',' << format_sig9(c.a_pax[i]) << ','
            << format_sig9(c.d_pax[i]) << '\n';
    }
    return out.str();
}

std::string render_summary(
    const std::vector<std::pair<std::string, std::string>>& kv) {
    std::ostringstream out;
    for (const auto& [k, v] : kv) out << k << " = " << v << '\n';
    return out.str();
}

std::uint64_t fnv1a64(const std::string& data) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

void RunManifest::note(const std::string& key, const std::string& value) {
    notes_.emplace_back(key, value);
}

void RunManifest::write_file(const std::string& dir, const std::string& name,
                             const std::string& contents) {
    const std::string path = dir + "/" + name;
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << contents;
    if (!f) throw std::runtime_error("write failed: " + path);
    files_.emplace_back(name, fnv1a64(contents));
}

std::string RunManifest::render() const {
    std::ostringstream out;
    for (const auto& [k, v] : notes_) out << k << " = " << v << '\n';
    for (const auto& [name, sum] : files_) {
        char hex[20];
        std::snprintf(hex, sizeof hex, "%016llx",
                      static_cast<unsigned long long>(sum));
        out << "file " << name << " fnv1a64:" << hex << '\n';
    }
    return out.str();
}

void RunManifest::finalize(const std::string& dir) const {
    const std::string path = dir + "/manifest.txt";
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << render();
}

} // namespace railfd

#include "rmt/chain.hpp"

#include <cstdio>
#include <cstdlib>
#include <stdexcept>

namespace rmt {

void ChainSpec::validate() const {
    if (w.empty()) throw std::invalid_argument("chain: at least one w required");
    if (B.size() + 1 != w.size())
        throw std::invalid_argument("chain: need exactly m-1 interior B's");
    for (cd wj : w)
        if (wj.imag() == 0.0)
            throw std::invalid_argument("chain: Im w must be nonzero");
}

cd parse_complex(const std::string& tok) {
    const char* p = tok.c_str();
    char* end = nullptr;
    const double re = std::strtod(p, &end);
    if (end == p) throw std::invalid_argument("chain: bad complex '" + tok + "'");
    if (*end == '\0') return {re, 0.0};
    const char* q = end;
    double im = std::strtod(q, &end);
    if (end == q) {
        // allow "+i" / "-i"
        if ((*q == '+' || *q == '-') && q[1] == 'i') {
            im = (*q == '+') ? 1.0 : -1.0;
            end = const_cast<char*>(q + 1);
        } else {
            throw std::invalid_argument("chain: bad complex '" + tok + "'");
        }
    }
    if (*end != 'i')
        throw std::invalid_argument("chain: bad complex '" + tok + "'");
    return {re, im};
}

Quat parse_deformation(const std::string& tok) {
    if (tok == "E+") return Quat::basis(0);
    if (tok == "E-") return Quat::basis(1);
    if (tok == "F") return Quat::basis(2);
    if (tok == "F~") return Quat::basis(3);
    return parse_quat(tok);  // general algebra element
}

ChainSpec ChainSpec::parse(const std::string& text) {
    ChainSpec spec;
    size_t pos = 0;
    bool expect_w = true;
    while (pos < text.size()) {
        size_t next = text.find(';', pos);
        if (next == std::string::npos) next = text.size();
        std::string item = text.substr(pos, next - pos);
        pos = next + 1;
        // trim
        const size_t b = item.find_first_not_of(" \t");
        if (b == std::string::npos) continue;
        const size_t e = item.find_last_not_of(" \t");
        item = item.substr(b, e - b + 1);
        const size_t eq = item.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("chain: expected key=value, got '" + item + "'");
        const std::string key = item.substr(0, eq);
        const std::string val = item.substr(eq + 1);
        if (key == "w") {
            if (!expect_w) throw std::invalid_argument("chain: two w's in a row need a B between them");
            spec.w.push_back(parse_complex(val));
            expect_w = false;
        } else if (key == "B") {
            if (expect_w) throw std::invalid_argument("chain: B before first w");
            spec.B.push_back(parse_deformation(val));
            expect_w = true;
        } else {
            throw std::invalid_argument("chain: unknown key '" + key + "'");
        }
    }
    spec.validate();
    return spec;
}

std::string ChainSpec::str() const {
    std::string out;
    char buf[96];
    for (size_t j = 0; j < w.size(); ++j) {
        std::snprintf(buf, sizeof(buf), "w=%.17g%+.17gi", w[j].real(), w[j].imag());
        out += buf;
        if (j + 1 < w.size()) {
            out += "; B=";
            const Quat& b = B[j];
            if (b == Quat::basis(0)) out += "E+";
            else if (b == Quat::basis(1)) out += "E-";
            else if (b == Quat::basis(2)) out += "F";
            else if (b == Quat::basis(3)) out += "F~";
            else out += to_string(b);
            out += "; ";
        }
    }
    return out;
}

}  // namespace rmt

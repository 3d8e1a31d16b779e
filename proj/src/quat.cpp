#include "rmt/quat.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace rmt {

namespace {

std::string fmt_coeff(cd v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "(%.17g%+.17gi)", v.real(), v.imag());
    return buf;
}

// Parses "(re+imi)" or a bare real; advances *s past the coefficient.
cd parse_coeff(const char** s) {
    const char* p = *s;
    while (*p == ' ') ++p;
    if (*p == '(') {
        ++p;
        char* end = nullptr;
        double re = std::strtod(p, &end);
        if (end == p) throw std::invalid_argument("bad quaternion coefficient");
        p = end;
        double im = std::strtod(p, &end);
        if (end == p || *end != 'i') throw std::invalid_argument("bad quaternion coefficient");
        p = end + 1;
        if (*p != ')') throw std::invalid_argument("bad quaternion coefficient");
        *s = p + 1;
        return {re, im};
    }
    char* end = nullptr;
    double re = std::strtod(p, &end);
    if (end == p) throw std::invalid_argument("bad quaternion coefficient");
    *s = end;
    return {re, 0.0};
}

}  // namespace

std::string to_string(const Quat& q) {
    return fmt_coeff(q.ep) + "*E+ + " + fmt_coeff(q.em) + "*E- + " +
           fmt_coeff(q.f) + "*F + " + fmt_coeff(q.fs) + "*F~";
}

Quat parse_quat(const std::string& text) {
    Quat q;
    const char* s = text.c_str();
    bool seen[4] = {false, false, false, false};
    while (true) {
        while (*s == ' ' || *s == '+') ++s;
        if (*s == '\0') break;
        cd c = parse_coeff(&s);
        if (*s != '*') throw std::invalid_argument("expected '*' after coefficient");
        ++s;
        int idx;
        if (std::strncmp(s, "E+", 2) == 0) { idx = 0; s += 2; }
        else if (std::strncmp(s, "E-", 2) == 0) { idx = 1; s += 2; }
        else if (std::strncmp(s, "F~", 2) == 0) { idx = 3; s += 2; }
        else if (*s == 'F') { idx = 2; s += 1; }
        else throw std::invalid_argument("unknown basis element in quaternion");
        if (seen[idx]) throw std::invalid_argument("repeated basis element in quaternion");
        seen[idx] = true;
        switch (idx) {
            case 0: q.ep = c; break;
            case 1: q.em = c; break;
            case 2: q.f = c; break;
            case 3: q.fs = c; break;
        }
    }
    return q;
}

}  // namespace rmt

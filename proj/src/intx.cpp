#include "mbcf/intx.hpp"

#include <cctype>

namespace mbcf {

Rat pow_rat(const Rat& base, long e) {
    if (e == 0) return Rat(1);
    if (base == 0 && e < 0) throw SpecError("pow_rat: zero base with negative exponent");
    unsigned long a = static_cast<unsigned long>(e < 0 ? -e : e);
    Rat r;
    mpz_pow_ui(r.get_num().get_mpz_t(), base.get_num().get_mpz_t(), a);
    mpz_pow_ui(r.get_den().get_mpz_t(), base.get_den().get_mpz_t(), a);
    r.canonicalize();
    if (e < 0) r = 1 / r;
    return r;
}

std::string rat_to_string(const Rat& r) {
    if (r.get_den() == 1) return r.get_num().get_str(10);
    return r.get_num().get_str(10) + "/" + r.get_den().get_str(10);
}

Rat rat_from_string(const std::string& s) {
    if (s.empty()) throw SpecError("empty rational literal");
    auto slash = s.find('/');
    if (slash != std::string::npos) {
        Rat r;
        if (r.set_str(s, 10) != 0) throw SpecError("bad rational literal: " + s);
        if (r.get_den() == 0) throw SpecError("zero denominator: " + s);
        r.canonicalize();
        return r;
    }
    auto dot = s.find('.');
    if (dot == std::string::npos) {
        Int n;
        if (n.set_str(s, 10) != 0) throw SpecError("bad integer literal: " + s);
        return Rat(n);
    }
    std::string intpart = s.substr(0, dot);
    std::string fracpart = s.substr(dot + 1);
    bool neg = !intpart.empty() && intpart[0] == '-';
    if (neg) intpart = intpart.substr(1);
    if (!intpart.empty() && intpart[0] == '+') intpart = intpart.substr(1);
    if (intpart.empty()) intpart = "0";
    if (fracpart.empty()) fracpart = "0";
    for (char c : intpart)
        if (!std::isdigit(static_cast<unsigned char>(c))) throw SpecError("bad decimal literal: " + s);
    for (char c : fracpart)
        if (!std::isdigit(static_cast<unsigned char>(c))) throw SpecError("bad decimal literal: " + s);
    Int num(intpart + fracpart, 10);
    Int den = pow_int(Int(10), fracpart.size());
    Rat r = make_rat(num, den);
    return neg ? Rat(-r) : r;
}

std::string decimal_approx(const Rat& r, int digits) {
    if (digits < 0) digits = 0;
    bool neg = r < 0;
    Rat a = neg ? Rat(-r) : r;
    Int scale = pow_int(Int(10), static_cast<unsigned long>(digits));
    Int scaled = floor_div(a.get_num() * scale, a.get_den());  // truncation toward zero
    Int ip = scaled / scale;
    Int fp = scaled % scale;
    std::string out = (neg && scaled != 0 ? "-" : "") + dec(ip);
    if (digits > 0) {
        std::string f = dec(fp);
        out += "." + std::string(static_cast<std::size_t>(digits) - f.size(), '0') + f;
    }
    return out;
}

}  // namespace mbcf

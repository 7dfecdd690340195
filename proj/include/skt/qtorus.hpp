#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "qcoeff.hpp"

namespace skt {

using ExpVec = std::vector<int>;

// Antisymmetric integer form over a named, ordered index set.  Instances of
// this are the face form of a triangulation, the vertex form of a
// quasitriangulation, and their extensions.
struct AntisymForm {
    std::vector<std::string> names;
    std::vector<std::vector<long long>> entries;

    AntisymForm() = default;
    explicit AntisymForm(std::vector<std::string> n)
        : names(std::move(n)),
          entries(names.size(), std::vector<long long>(names.size(), 0)) {}

    size_t size() const { return names.size(); }

    size_t index(const std::string& name) const {
        for (size_t i = 0; i < names.size(); ++i)
            if (names[i] == name) return i;
        throw std::invalid_argument("unknown generator: " + name);
    }

    void set(size_t i, size_t j, long long v) {
        entries[i][j] = v;
        entries[j][i] = -v;
    }

    void check_antisymmetric() const {
        for (size_t i = 0; i < size(); ++i)
            for (size_t j = 0; j < size(); ++j)
                if (entries[i][j] != -entries[j][i])
                    throw std::logic_error("form is not antisymmetric");
    }

    // <k,k'> = sum Q_ij k_i k'_j
    long long pairing(const ExpVec& k, const ExpVec& k2) const {
        if (k.size() != size() || k2.size() != size())
            throw std::invalid_argument("exponent vector has wrong length");
        long long s = 0;
        for (size_t i = 0; i < size(); ++i) {
            if (k[i] == 0) continue;
            for (size_t j = 0; j < size(); ++j)
                if (k2[j] != 0) s += entries[i][j] * (long long)k[i] * k2[j];
        }
        return s;
    }

    friend bool operator==(const AntisymForm& a, const AntisymForm& b) {
        return a.names == b.names && a.entries == b.entries;
    }
};

using FormPtr = std::shared_ptr<const AntisymForm>;

// Element of the quantum torus T(Q): a finitely supported map from exponent
// vectors to coefficients, written in the basis of Weyl-normalized monomials
// x^k.  Products follow x^k x^k' = q^{<k,k'>/2} x^{k+k'}.
class TorusElement {
public:
    TorusElement() = default;
    explicit TorusElement(FormPtr form) : form_(std::move(form)) {}

    static TorusElement monomial(FormPtr form, ExpVec k, HalfLaurent coeff = HalfLaurent(1)) {
        TorusElement r(std::move(form));
        if (k.size() != r.form_->size())
            throw std::invalid_argument("exponent vector has wrong length");
        if (!coeff.is_zero()) r.terms_.emplace(std::move(k), std::move(coeff));
        return r;
    }
    static TorusElement unit(FormPtr form) {
        ExpVec zero(form->size(), 0);
        return monomial(std::move(form), std::move(zero), HalfLaurent(1));
    }

    const FormPtr& form() const { return form_; }
    const std::map<ExpVec, HalfLaurent>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    size_t term_count() const { return terms_.size(); }

    void add_term(const ExpVec& k, const HalfLaurent& c) {
        if (c.is_zero()) return;
        auto it = terms_.find(k);
        if (it == terms_.end()) {
            terms_.emplace(k, c);
        } else {
            it->second += c;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }

    friend bool operator==(const TorusElement& a, const TorusElement& b) {
        if (a.terms_ != b.terms_) return false;
        if (a.form_ == b.form_) return true;
        if (!a.form_ || !b.form_) return a.terms_.empty() && b.terms_.empty();
        return *a.form_ == *b.form_;
    }
    friend bool operator!=(const TorusElement& a, const TorusElement& b) { return !(a == b); }

    friend TorusElement operator+(const TorusElement& a, const TorusElement& b) {
        TorusElement r = a;
        if (!r.form_) r.form_ = b.form_;
        else if (b.form_ && !(b.form_ == r.form_ || *b.form_ == *r.form_))
            throw std::invalid_argument("torus form mismatch in addition");
        for (const auto& [k, c] : b.terms_) r.add_term(k, c);
        return r;
    }
    friend TorusElement operator-(const TorusElement& a, const TorusElement& b) {
        return a + (b * HalfLaurent(-1));
    }
    friend TorusElement operator*(const TorusElement& a, const HalfLaurent& s) {
        TorusElement r(a.form_);
        for (const auto& [k, c] : a.terms_) r.add_term(k, c * s);
        return r;
    }
    friend TorusElement operator*(const HalfLaurent& s, const TorusElement& a) { return a * s; }

    friend TorusElement operator*(const TorusElement& a, const TorusElement& b) {
        if (!a.form_ || !b.form_ || !(a.form_ == b.form_ || *a.form_ == *b.form_))
            throw std::invalid_argument("torus form mismatch in product");
        TorusElement r(a.form_);
        const AntisymForm& Q = *a.form_;
        for (const auto& [ka, ca] : a.terms_) {
            for (const auto& [kb, cb] : b.terms_) {
                long long p = Q.pairing(ka, kb); // q^{p/2} twist
                ExpVec k(ka.size());
                for (size_t i = 0; i < k.size(); ++i) k[i] = ka[i] + kb[i];
                HalfLaurent c = ca * cb;
                c.shift(p);
                r.add_term(k, c);
            }
        }
        return r;
    }
    TorusElement& operator+=(const TorusElement& o) { *this = *this + o; return *this; }
    TorusElement& operator*=(const TorusElement& o) { *this = *this * o; return *this; }

    // Reflection anti-involution: fixes normalized monomials, bars coefficients.
    TorusElement reflect() const {
        TorusElement r(form_);
        for (const auto& [k, c] : terms_) r.terms_.emplace(k, c.bar());
        return r;
    }

    bool reflection_invariant() const { return reflect() == *this; }

    // Sum of the terms whose exponent vector maximizes the given weight.
    TorusElement leading_term(const std::vector<long long>& weight) const {
        if (terms_.empty()) throw std::invalid_argument("leading_term of zero");
        if (weight.size() != form_->size())
            throw std::invalid_argument("weight vector has wrong length");
        long long best = 0;
        bool have = false;
        for (const auto& [k, c] : terms_) {
            (void)c;
            long long w = 0;
            for (size_t i = 0; i < k.size(); ++i) w += weight[i] * k[i];
            if (!have || w > best) { best = w; have = true; }
        }
        TorusElement r(form_);
        for (const auto& [k, c] : terms_) {
            long long w = 0;
            for (size_t i = 0; i < k.size(); ++i) w += weight[i] * k[i];
            if (w == best) r.terms_.emplace(k, c);
        }
        return r;
    }

    // Multiplicatively linear map x^k -> y^{k*rows}; rows[i] is the image
    // exponent vector of the i-th generator.  Coefficients are untouched.
    TorusElement apply_linear(const FormPtr& target,
                              const std::vector<ExpVec>& rows) const {
        if (rows.size() != form_->size())
            throw std::invalid_argument("row count does not match source form");
        TorusElement r(target);
        for (const auto& [k, c] : terms_) {
            ExpVec img(target->size(), 0);
            for (size_t i = 0; i < k.size(); ++i) {
                if (k[i] == 0) continue;
                if (rows[i].size() != target->size())
                    throw std::invalid_argument("row length does not match target form");
                for (size_t j = 0; j < img.size(); ++j) img[j] += k[i] * rows[i][j];
            }
            r.add_term(img, c);
        }
        return r;
    }

    // One term per line: coefficient, " * ", generators in index order with
    // nonzero exponents; terms sorted lexicographically by exponent vector.
    std::string to_string() const {
        if (terms_.empty()) return "0";
        std::ostringstream os;
        bool first = true;
        for (const auto& [k, c] : terms_) {
            if (!first) os << "\n";
            first = false;
            std::string coeff = c.to_string();
            if (c.terms().size() > 1) coeff = "(" + coeff + ")";
            std::string mono;
            for (size_t i = 0; i < k.size(); ++i) {
                if (k[i] == 0) continue;
                if (!mono.empty()) mono += " ";
                mono += form_->names[i] + "^" + std::to_string(k[i]);
            }
            if (mono.empty()) os << coeff;
            else os << coeff << " * " << mono;
        }
        return os.str();
    }

private:
    FormPtr form_;
    std::map<ExpVec, HalfLaurent> terms_;
};

// Weyl-normalized product [x_{g_1}^{p_1} ... x_{g_n}^{p_n}]: the scalar
// correction q^{-sum Q(g_i,g_j) p_i p_j / 2} makes the result independent of
// the factor order, so it is exactly the basis monomial with the summed
// exponent vector.
inline TorusElement weyl_normalize(const FormPtr& form,
                                   const std::vector<std::pair<std::string, int>>& factors) {
    ExpVec k(form->size(), 0);
    for (const auto& [name, p] : factors) k[form->index(name)] += p;
    return TorusElement::monomial(form, std::move(k));
}

// The same product evaluated literally: multiply the ordered factors one by
// one and apply the Weyl prefactor afterwards.  Used as an independent oracle
// for weyl_normalize in tests.
inline TorusElement weyl_normalize_by_sorting(const FormPtr& form,
                                              const std::vector<std::pair<std::string, int>>& factors) {
    TorusElement prod = TorusElement::monomial(form, ExpVec(form->size(), 0));
    long long pref = 0; // doubled exponent of the prefactor
    std::vector<size_t> idx;
    std::vector<int> pw;
    for (const auto& [name, p] : factors) { idx.push_back(form->index(name)); pw.push_back(p); }
    for (size_t i = 0; i < idx.size(); ++i)
        for (size_t j = i + 1; j < idx.size(); ++j)
            pref -= form->entries[idx[i]][idx[j]] * (long long)pw[i] * pw[j];
    for (size_t i = 0; i < idx.size(); ++i) {
        ExpVec k(form->size(), 0);
        k[idx[i]] = pw[i];
        prod = prod * TorusElement::monomial(form, k);
    }
    return prod * HalfLaurent::q_half(pref);
}

} // namespace skt

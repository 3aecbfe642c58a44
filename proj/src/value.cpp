#include "heapinv/value.hpp"

#include <functional>
#include <stdexcept>

namespace heapinv {

Object::Object(std::uint32_t adt, std::uint32_t ctor, std::vector<Value> fields)
    : data_(std::make_shared<const ObjectData>(ObjectData{adt, ctor, std::move(fields)})) {}

std::uint32_t Object::adt() const { return data_->adt; }
std::uint32_t Object::ctor() const { return data_->ctor; }
const std::vector<Value>& Object::fields() const { return data_->fields; }

namespace {
std::optional<Integer> number_of(const Value& v) {
    if (v.is_int())
        return v.as_int();
    if (v.is_addr())
        return Integer(static_cast<std::int64_t>(v.as_addr().value));
    return std::nullopt;
}
}  // namespace

bool Value::numerically_equal(const Value& other) const {
    auto a = number_of(*this), b = number_of(other);
    if (a && b)
        return *a == *b;
    if (is_obj() && other.is_obj()) {
        const auto& x = as_obj();
        const auto& y = other.as_obj();
        if (x.adt() != y.adt() || x.ctor() != y.ctor() || x.fields().size() != y.fields().size())
            return false;
        for (std::size_t i = 0; i < x.fields().size(); ++i)
            if (!x.fields()[i].numerically_equal(y.fields()[i]))
                return false;
        return true;
    }
    return false;
}

bool operator==(const Value& a, const Value& b) { return (a <=> b) == std::strong_ordering::equal; }

std::strong_ordering operator<=>(const Value& a, const Value& b) {
    if (a.v_.index() != b.v_.index())
        return a.v_.index() <=> b.v_.index();
    if (a.is_int())
        return a.as_int() <=> b.as_int();
    if (a.is_addr())
        return a.as_addr() <=> b.as_addr();
    const ObjectData* x = a.as_obj().data();
    const ObjectData* y = b.as_obj().data();
    if (x == y)
        return std::strong_ordering::equal;
    if (auto c = x->adt <=> y->adt; c != 0)
        return c;
    if (auto c = x->ctor <=> y->ctor; c != 0)
        return c;
    return compare_tuples(x->fields, y->fields);
}

std::size_t Value::hash() const {
    if (is_int())
        return as_int().hash();
    if (is_addr())
        return std::hash<std::uint64_t>{}(as_addr().value) * 31 + 7;
    const ObjectData* d = as_obj().data();
    std::size_t h = (static_cast<std::size_t>(d->adt) << 16) ^ d->ctor;
    for (const auto& f : d->fields)
        h = h * 1000003 ^ f.hash();
    return h;
}

std::size_t TupleHash::operator()(const Tuple& t) const {
    std::size_t h = t.size();
    for (const auto& v : t)
        h = h * 1000003 ^ v.hash();
    return h;
}

std::strong_ordering compare_tuples(const Tuple& a, const Tuple& b) {
    std::size_t n = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i)
        if (auto c = a[i] <=> b[i]; c != 0)
            return c;
    return a.size() <=> b.size();
}

Value default_value(const ast::Program& p, const ast::TypeTag& t) {
    switch (t.kind) {
    case ast::TypeTag::Kind::Int: return Integer(0);
    case ast::TypeTag::Kind::Addr: return Address{0};
    case ast::TypeTag::Kind::Obj: {
        auto idx = p.adt_index(t.adt);
        if (!idx)
            throw std::logic_error("unknown ADT " + t.adt);
        const auto& c = p.adts[*idx].ctors.front();
        std::vector<Value> fields;
        for (const auto& f : c.fields)
            fields.push_back(default_value(p, f.type));
        return Object(static_cast<std::uint32_t>(*idx), 0, std::move(fields));
    }
    }
    return Integer(0);
}

Value def_obj(const ast::Program& p) {
    if (!p.heap_type)
        throw std::logic_error("program has no heap type");
    return default_value(p, ast::TypeTag::object(*p.heap_type));
}

std::string to_string(const ast::Program& p, const Value& v) {
    if (v.is_int())
        return v.as_int().to_string();
    if (v.is_addr())
        return v.as_addr().value == 0 ? "null" : "@" + std::to_string(v.as_addr().value);
    const ObjectData* d = v.as_obj().data();
    std::string out = d->adt < p.adts.size() && d->ctor < p.adts[d->adt].ctors.size()
                          ? p.adts[d->adt].ctors[d->ctor].name
                          : "ctor" + std::to_string(d->ctor);
    out += '(';
    for (std::size_t i = 0; i < d->fields.size(); ++i) {
        if (i)
            out += ", ";
        out += to_string(p, d->fields[i]);
    }
    return out + ')';
}

std::string to_string(const ast::Program& p, const Tuple& t) {
    std::string out = "(";
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (i)
            out += ", ";
        out += to_string(p, t[i]);
    }
    return out + ')';
}

}  // namespace heapinv
